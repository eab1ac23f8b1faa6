//! Library side of the command-line driver: config loading, the parameter
//! sweeps behind each subcommand, and CSV emission.
//!
//! Determinism contract: every run is a pure function of (config, seed).
//! Channel fading for trial t comes from a substream labeled only by t,
//! so the same trial sees identical fading across rates, user positions,
//! and solver choices; solver randomness lives in disjoint label spaces.
//! That makes solver comparisons paired and position sweeps exactly
//! symmetric where the geometry is.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use irsec_core::channel::{sample_channels, ApIrsChannel, ChannelMode};
use irsec_core::config::ScenarioConfig;
use irsec_core::jointdesign::{
    solve_full_rank, solve_rank_one, solve_stat_both, solve_stat_eve, DesignResult, SolveOpts,
};
use irsec_core::numkernel::substream;
use irsec_core::phaseopt::{
    brute_force_phase, build_phase_problem, pgd_phase, sdp_round, stat_eve_phase, PhaseVector,
};
use irsec_core::sdpsolver::solve_unit_diag_sdp;
use irsec_core::secrecy::CsiMode;
use irsec_core::Error as CoreError;

/// Substream label spaces. Fading depends on the trial index alone;
/// each solver arm gets its own space so running one arm never perturbs
/// another.
const LABEL_CHANNEL: u64 = 1 << 32;
const LABEL_SOLVER: u64 = 2 << 32;
const LABEL_SOLVER_ALT: u64 = 3 << 32;

/// Exhaustive-grid resolution for the oracle harness; dropped to
/// `ORACLE_GRID_LEVELS_N4` at N = 4 where the full grid would be 128^4
/// points (the polish step restores exactness in both cases).
pub const ORACLE_GRID_LEVELS: usize = 128;
const ORACLE_GRID_LEVELS_N4: usize = 24;

#[derive(Debug)]
pub enum CliError {
    /// A file could not be read or written.
    Io(String),
    /// Config file is not valid JSON (message carries line and column).
    Parse(String),
    /// Config parsed but failed validation; all violations listed.
    Validation(Vec<String>),
    /// A sweep precondition failed (empty list, unordered rates, ...).
    BadRequest(String),
    /// The core library refused an instance for a non-feasibility reason.
    Solver(CoreError),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::Parse(msg) => write!(f, "config parse error: {msg}"),
            CliError::Validation(violations) => {
                write!(f, "invalid configuration:")?;
                for v in violations {
                    write!(f, "\n  - {v}")?;
                }
                Ok(())
            }
            CliError::BadRequest(msg) => write!(f, "bad request: {msg}"),
            CliError::Solver(e) => write!(f, "solver error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidConfig(v) => CliError::Validation(v),
            other => CliError::Solver(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Load a scenario from a JSON file. An empty (or whitespace-only) file
/// means "all defaults". Unknown keys are rejected, and the parsed
/// scenario is validated before being returned.
pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Parse; used by `load_config` and directly by tests.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = if text.trim().is_empty() {
        ScenarioConfig::default()
    } else {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?
    };
    cfg.validate()?;
    Ok(cfg)
}

/// One aggregated sweep point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    /// Independent variable: target rate in bits or user y-coordinate.
    pub x: f64,
    /// Mean power over the feasible trials; NaN when none were feasible.
    pub mean_power_w: f64,
    /// Sample standard deviation over the feasible trials.
    pub power_std: f64,
    /// Fraction of trials that admitted the target rate.
    pub feasibility_rate: f64,
    /// Mean solver iteration count over the feasible trials.
    pub mean_iterations: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Feasible fraction over the whole run. Rows share the same trial
    /// count, so the row mean is the trial-weighted mean.
    pub fn overall_feasibility(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().map(|r| r.feasibility_rate).sum::<f64>() / self.rows.len() as f64
    }
}

/// Run the design pipeline selected by the config's CSI mode and channel
/// model on the fading realization of trial `trial`.
pub fn run_design(
    cfg: &ScenarioConfig,
    rate_bits: f64,
    trial: u64,
) -> std::result::Result<DesignResult, CoreError> {
    let mut ch_rng = substream(cfg.seed, LABEL_CHANNEL | trial);
    let ch = sample_channels(cfg, &mut ch_rng)?;
    let mut solver_rng = substream(cfg.seed, LABEL_SOLVER | trial);
    let opts = SolveOpts::from_config(cfg);
    match cfg.csi_mode {
        CsiMode::FullBoth => match cfg.channel_mode {
            ChannelMode::RankOne => solve_rank_one(
                &ch,
                rate_bits,
                cfg.sigma2_noise_w,
                cfg.solver,
                &opts,
                &mut solver_rng,
            ),
            ChannelMode::Rician => solve_full_rank(
                &ch,
                rate_bits,
                cfg.sigma2_noise_w,
                cfg.solver,
                &opts,
                &mut solver_rng,
            ),
        },
        CsiMode::FullLegitStatEve => solve_stat_eve(&ch, rate_bits, cfg.sigma2_noise_w),
        CsiMode::StatBoth => solve_stat_both(&ch, rate_bits, cfg.sigma2_noise_w),
    }
}

fn aggregate(
    x: f64,
    outcomes: &[std::result::Result<DesignResult, CoreError>],
) -> Result<SweepRow> {
    let mut powers = Vec::new();
    let mut iterations = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(d) => {
                powers.push(d.power_w);
                iterations.push(d.report.iterations as f64);
            }
            Err(CoreError::Infeasible) => {}
            Err(other) => return Err(CliError::Solver(other.clone())),
        }
    }
    let n_ok = powers.len();
    let feasibility_rate = n_ok as f64 / outcomes.len() as f64;
    if n_ok == 0 {
        return Ok(SweepRow {
            x,
            mean_power_w: f64::NAN,
            power_std: f64::NAN,
            feasibility_rate,
            mean_iterations: f64::NAN,
        });
    }
    let mean = powers.iter().sum::<f64>() / n_ok as f64;
    let var = if n_ok > 1 {
        powers.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (n_ok as f64 - 1.0)
    } else {
        0.0
    };
    Ok(SweepRow {
        x,
        mean_power_w: mean,
        power_std: var.sqrt(),
        feasibility_rate,
        mean_iterations: iterations.iter().sum::<f64>() / n_ok as f64,
    })
}

/// Average required power per target rate over matched channel draws.
/// Rates must be positive and strictly ascending.
pub fn sweep_rate(cfg: &ScenarioConfig, rates: &[f64]) -> Result<SweepResult> {
    if rates.is_empty() {
        return Err(CliError::BadRequest("rates list is empty".into()));
    }
    if rates.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::BadRequest("rates must be strictly ascending".into()));
    }
    if rates.iter().any(|r| *r <= 0.0 || r.is_nan()) {
        return Err(CliError::BadRequest("rates must be positive".into()));
    }
    cfg.validate()?;
    let mut rows = Vec::with_capacity(rates.len());
    for &rate in rates {
        let outcomes: Vec<_> =
            (0..cfg.n_trials as u64).map(|t| run_design(cfg, rate, t)).collect();
        rows.push(aggregate(rate, &outcomes)?);
    }
    Ok(SweepResult { rows })
}

/// Average required power per user y-position over matched channel
/// draws: trial t uses the same fading at every position.
pub fn sweep_distance(cfg: &ScenarioConfig, user_y_positions: &[f64]) -> Result<SweepResult> {
    if user_y_positions.is_empty() {
        return Err(CliError::BadRequest("positions list is empty".into()));
    }
    cfg.validate()?;
    let mut rows = Vec::with_capacity(user_y_positions.len());
    for &y in user_y_positions {
        let mut local = cfg.clone();
        local.geometry.user_pos[1] = y;
        local.validate()?;
        let outcomes: Vec<_> = (0..local.n_trials as u64)
            .map(|t| run_design(&local, local.target_rate_bits, t))
            .collect();
        rows.push(aggregate(y, &outcomes)?);
    }
    Ok(SweepResult { rows })
}

/// One oracle-compare instance: the phase-problem objective reached by
/// the exhaustive grid (plus a deterministic polish), by projected
/// gradient descent with restarts, and by the relaxation pipeline, with
/// the relaxation's upper bound and the solvers' relative gaps.
#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub instance: usize,
    pub oracle_objective: f64,
    pub pgd_objective: f64,
    pub sdp_objective: f64,
    pub sdp_upper_bound: f64,
    /// (oracle - pgd) / max(|oracle|, tiny); negative means PGD won.
    pub pgd_gap: f64,
    pub sdp_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub rows: Vec<OracleRow>,
    pub median_pgd_gap: f64,
    pub median_sdp_gap: f64,
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn relative_gap(oracle: f64, attained: f64) -> f64 {
    (oracle - attained) / oracle.abs().max(f64::MIN_POSITIVE)
}

/// Desk-scale validation: on `cfg.n_trials` random rank-one instances
/// with N <= 4 surface elements, compare the exhaustive phase grid
/// against the shipped solvers. The channel mode is forced to the
/// rank-one model, where the decoupled phase problem has an exact
/// oracle; fading and solver substreams follow the sweep discipline.
pub fn oracle_compare(cfg: &ScenarioConfig) -> Result<OracleReport> {
    cfg.validate()?;
    if cfg.n_elements > 4 {
        return Err(CliError::Solver(CoreError::TooLarge { size: cfg.n_elements, cap: 4 }));
    }
    let mut local = cfg.clone();
    local.channel_mode = ChannelMode::RankOne;
    let opts = SolveOpts::from_config(&local);
    let grid_levels =
        if local.n_elements == 4 { ORACLE_GRID_LEVELS_N4 } else { ORACLE_GRID_LEVELS };

    let mut rows = Vec::with_capacity(local.n_trials);
    let mut pgd_gaps = Vec::new();
    let mut sdp_gaps = Vec::new();
    for t in 0..local.n_trials as u64 {
        let mut ch_rng = substream(local.seed, LABEL_CHANNEL | t);
        let ch = sample_channels(&local, &mut ch_rng)?;
        let b = match &ch.g_mode {
            ApIrsChannel::RankOne { b, .. } => b,
            ApIrsChannel::Full { .. } => unreachable!("channel mode forced to rank-one"),
        };
        let prob = build_phase_problem(
            b,
            &ch.h_r,
            &ch.h_e,
            ch.alpha_r,
            ch.alpha_e,
            local.target_rate_bits,
        )?;

        let (grid_best, _) = brute_force_phase(&prob, grid_levels)?;
        let (_, polish) = pgd_phase(&prob, &grid_best, opts.eps, opts.pgd_max_iters)?;
        let oracle_objective = polish.objective;

        let mut pgd_rng = substream(local.seed, LABEL_SOLVER | t);
        let warm = stat_eve_phase(&ch.h_r, b);
        let (_, mut pgd_rep) = pgd_phase(&prob, &warm, opts.eps, opts.pgd_max_iters)?;
        for _ in 0..opts.pgd_restarts {
            let init = PhaseVector::from_thetas(
                (0..prob.n()).map(|_| pgd_rng.gen::<f64>() * std::f64::consts::TAU).collect(),
            );
            let (_, rep) = pgd_phase(&prob, &init, opts.eps, opts.pgd_max_iters)?;
            if rep.objective > pgd_rep.objective {
                pgd_rep = rep;
            }
        }

        let mut sdp_rng = substream(local.seed, LABEL_SOLVER_ALT | t);
        let sol = solve_unit_diag_sdp(prob.matrix(), opts.sdp_tol, opts.sdp_max_iters)?;
        let (rounded, round_rep) = sdp_round(&sol.v, &prob, opts.n_draws, &mut sdp_rng)?;
        let (_, sdp_polish) = pgd_phase(&prob, &rounded, opts.eps, opts.pgd_max_iters)?;

        let pgd_gap = relative_gap(oracle_objective, pgd_rep.objective);
        let sdp_gap = relative_gap(oracle_objective, sdp_polish.objective);
        pgd_gaps.push(pgd_gap);
        sdp_gaps.push(sdp_gap);
        rows.push(OracleRow {
            instance: t as usize,
            oracle_objective,
            pgd_objective: pgd_rep.objective,
            sdp_objective: sdp_polish.objective,
            sdp_upper_bound: round_rep.sdp_upper_bound.unwrap_or(f64::NAN),
            pgd_gap,
            sdp_gap,
        });
    }
    Ok(OracleReport {
        rows,
        median_pgd_gap: median(&mut pgd_gaps),
        median_sdp_gap: median(&mut sdp_gaps),
    })
}

/// Fixed CSV column contract for sweeps. Floats use Rust's shortest
/// round-trip formatting, so re-parsing reproduces the in-memory values
/// exactly.
pub const SWEEP_CSV_HEADER: &str = "x,mean_power_w,power_std,feasibility_rate,mean_iterations";

pub fn render_csv(result: &SweepResult) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.x, r.mean_power_w, r.power_std, r.feasibility_rate, r.mean_iterations
        ));
    }
    out
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    write_file(path, render_csv(result).as_bytes())
}

pub const ORACLE_CSV_HEADER: &str =
    "instance,oracle_objective,pgd_objective,sdp_objective,sdp_upper_bound,pgd_gap,sdp_gap";

pub fn render_oracle_csv(report: &OracleReport) -> String {
    let mut out = String::from(ORACLE_CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.instance,
            r.oracle_objective,
            r.pgd_objective,
            r.sdp_objective,
            r.sdp_upper_bound,
            r.pgd_gap,
            r.sdp_gap
        ));
    }
    out
}

pub fn emit_oracle_csv(report: &OracleReport, path: &Path) -> Result<()> {
    write_file(path, render_oracle_csv(report).as_bytes())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    f.write_all(bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}
