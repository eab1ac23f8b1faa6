//! End-to-end minimum-power designs: the (omega, Theta, P) triple that
//! meets a target secrecy rate.
//!
//! Four pipelines. Rank-one links decouple (closed-form beamformer, one
//! phase solve). General links alternate beamformer and phase steps until
//! the power stops moving. With distribution-only eavesdropper knowledge
//! the phases align for the legitimate user and the power comes from a
//! scalar rate equation; with distribution-only knowledge of both, the
//! phases drop out entirely and only the rate equation remains.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::beamform::{
    effective_channels, eig_beamformer, rank_one_beamformer, required_power_full_rank,
    required_power_rank_one, BeamformResult,
};
use crate::channel::{ApIrsChannel, ChannelSet};
use crate::config::{PhaseSolver, ScenarioConfig};
use crate::error::{Error, Result};
use crate::numkernel::{ComplexMatrix, ComplexVector};
use crate::phaseopt::{
    build_phase_problem, pgd_phase, sdp_round, stat_eve_phase, PhaseProblem, PhaseSolveReport,
    PhaseVector,
};
use crate::sdpsolver::solve_unit_diag_sdp;
use crate::secrecy::f1;

use std::f64::consts::TAU;

/// Random surface initializations tried when the zero-phase start is
/// infeasible for the alternating design.
const FULL_RANK_RESTARTS: usize = 10;
/// The alternating design treats a top eigenvalue at or below this
/// fraction of the weighted channel scale as zero: a genuinely positive
/// value that small would need power beyond any physical meaning, and
/// the eigensolver's own noise floor sits there.
const LAMBDA_REL_FLOOR: f64 = 1e-12;
/// Power bracket cap factor: brackets grow up to this multiple of
/// sigma2 / min(alpha) before the rate equation is declared infeasible.
const POWER_CAP_FACTOR: f64 = 1e6;
/// Bisection iteration cap for the scalar rate equations.
const BISECT_MAX: usize = 200;

/// Which pipeline produced a design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DesignMethod {
    RankOneSdp,
    RankOnePgd,
    FullRankAlternating,
    StatEveClosedForm,
    StatBothClosedForm,
}

/// A complete transmit design and the power it needs.
///
/// For feasible designs the rate constraint is tight:
/// `achieved_rate_bits` equals the target within 1e-8. The `report`
/// carries the phase solver's diagnostics; the statistical pipelines
/// have no phase solve, so their report stores the rate-equation
/// residual (achieved minus target) as the objective and the bisection
/// step count as the iteration count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignResult {
    /// Unit-norm transmit beamformer.
    pub omega: ComplexVector,
    /// Surface phase shifts.
    pub phases: PhaseVector,
    /// Minimum transmit power in watts.
    pub power_w: f64,
    /// Secrecy capacity recomputed at the returned design.
    pub achieved_rate_bits: f64,
    pub method: DesignMethod,
    pub report: PhaseSolveReport,
    /// Outer alternating iterations; 1 for the decoupled pipelines.
    pub outer_iterations: usize,
}

/// Solver budgets shared by the design pipelines.
#[derive(Debug, Clone, Copy)]
pub struct SolveOpts {
    /// PGD stopping threshold on the scale-free gradient norm.
    pub eps: f64,
    pub pgd_max_iters: usize,
    /// Random restarts after the warm start in the PGD pipeline.
    pub pgd_restarts: usize,
    pub sdp_tol: f64,
    pub sdp_max_iters: usize,
    /// Gaussian randomization draws when rounding an SDP solution.
    pub n_draws: usize,
    /// Relative power change that stops the alternating loop.
    pub outer_tol: f64,
    pub max_outer_iters: usize,
}

impl Default for SolveOpts {
    fn default() -> Self {
        SolveOpts {
            eps: 1e-4,
            pgd_max_iters: 5000,
            pgd_restarts: 10,
            sdp_tol: 1e-6,
            sdp_max_iters: 20_000,
            n_draws: 200,
            outer_tol: 1e-4,
            max_outer_iters: 50,
        }
    }
}

impl SolveOpts {
    pub fn from_config(cfg: &ScenarioConfig) -> Self {
        SolveOpts {
            eps: cfg.eps,
            pgd_max_iters: cfg.pgd_max_iters,
            pgd_restarts: cfg.pgd_restarts,
            sdp_tol: cfg.sdp_tol,
            sdp_max_iters: cfg.sdp_max_iters,
            n_draws: cfg.n_draws,
            outer_tol: cfg.outer_tol,
            max_outer_iters: cfg.max_outer_iters,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.outer_tol > 0.0) || self.max_outer_iters == 0 {
            return Err(Error::DomainError("SolveOpts needs outer_tol > 0, max_outer_iters >= 1"));
        }
        Ok(())
    }
}

/// Independent recomputation of the rate constraint at a design point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    /// log2 of the SNR ratio (1 + snr_user) / (1 + snr_eve).
    pub constraint_ratio_bits: f64,
    /// constraint_ratio_bits minus the target rate.
    pub slack_bits: f64,
    /// | |omega| - 1 |.
    pub omega_norm_dev: f64,
    /// Constraint met (slack >= -1e-8) and omega unit norm (dev <= 1e-9).
    pub ok: bool,
}

fn check_common(ch: &ChannelSet, rate_r: f64, sigma2: f64) -> Result<()> {
    ch.check_dimensions()?;
    if !(rate_r > 0.0) || !(sigma2 > 0.0) {
        return Err(Error::DomainError("design needs rate_r > 0 and sigma2 > 0"));
    }
    Ok(())
}

fn rank_one_parts(ch: &ChannelSet) -> Result<(&ComplexVector, &ComplexVector)> {
    match &ch.g_mode {
        ApIrsChannel::RankOne { a, b } => Ok((a, b)),
        ApIrsChannel::Full { .. } => {
            Err(Error::DomainError("this pipeline needs a rank-one AP-IRS channel"))
        }
    }
}

fn random_phases(n: usize, rng: &mut impl Rng) -> PhaseVector {
    PhaseVector::from_thetas((0..n).map(|_| rng.gen::<f64>() * TAU).collect())
}

/// One phase solve under the chosen policy. PGD runs from the warm start
/// plus random restarts and keeps the best; SDP solves the relaxation,
/// rounds it, then polishes the rounded point with PGD. Reported
/// iterations aggregate all stages.
fn solve_phases(
    prob: &PhaseProblem,
    warm: &PhaseVector,
    solver: PhaseSolver,
    opts: &SolveOpts,
    rng: &mut impl Rng,
) -> Result<(PhaseVector, PhaseSolveReport)> {
    match solver {
        PhaseSolver::Pgd => {
            let (mut best, mut best_rep) = pgd_phase(prob, warm, opts.eps, opts.pgd_max_iters)?;
            let mut total = best_rep.iterations;
            for _ in 0..opts.pgd_restarts {
                let init = random_phases(prob.n(), rng);
                let (cand, rep) = pgd_phase(prob, &init, opts.eps, opts.pgd_max_iters)?;
                total += rep.iterations;
                if rep.objective > best_rep.objective {
                    best = cand;
                    best_rep = rep;
                }
            }
            best_rep.iterations = total;
            Ok((best, best_rep))
        }
        PhaseSolver::Sdp => {
            let sol = solve_unit_diag_sdp(prob.matrix(), opts.sdp_tol, opts.sdp_max_iters)?;
            let (rounded, round_rep) = sdp_round(&sol.v, prob, opts.n_draws, rng)?;
            let (polished, polish_rep) = pgd_phase(prob, &rounded, opts.eps, opts.pgd_max_iters)?;
            let report = PhaseSolveReport {
                objective: polish_rep.objective,
                iterations: sol.iterations + round_rep.iterations + polish_rep.iterations,
                sdp_upper_bound: round_rep.sdp_upper_bound,
                converged: sol.converged && polish_rep.converged,
            };
            Ok((polished, report))
        }
    }
}

/// Joint design for a rank-one AP-IRS link: omega = a/|a| is optimal
/// independent of the phases, and the phases maximize the weighted
/// channel-difference quadratic form.
pub fn solve_rank_one(
    ch: &ChannelSet,
    rate_r: f64,
    sigma2: f64,
    solver: PhaseSolver,
    opts: &SolveOpts,
    rng: &mut impl Rng,
) -> Result<DesignResult> {
    check_common(ch, rate_r, sigma2)?;
    let (a, b) = rank_one_parts(ch)?;
    let prob = build_phase_problem(b, &ch.h_r, &ch.h_e, ch.alpha_r, ch.alpha_e, rate_r)?;
    let warm = stat_eve_phase(&ch.h_r, b);
    let (phases, report) = solve_phases(&prob, &warm, solver, opts, rng)?;
    let omega = rank_one_beamformer(a)?.omega;
    let power_w = required_power_rank_one(ch, &phases, rate_r, sigma2)?;
    let achieved =
        crate::secrecy::capacity_full(ch, &phases, &omega, power_w, sigma2)?.value_bits;
    Ok(DesignResult {
        omega,
        phases,
        power_w,
        achieved_rate_bits: achieved,
        method: match solver {
            PhaseSolver::Sdp => DesignMethod::RankOneSdp,
            PhaseSolver::Pgd => DesignMethod::RankOnePgd,
        },
        report,
        outer_iterations: 1,
    })
}

/// Beamformer step plus the scale the eigenvalue should be judged
/// against (an upper bound on the spectral norm of the weighted
/// channel-difference matrix).
fn beam_step(ch: &ChannelSet, theta: &PhaseVector, rate_r: f64) -> Result<(BeamformResult, f64)> {
    let (h_r_eff, h_e_eff) = effective_channels(ch, theta)?;
    let scale = ch.alpha_r * h_r_eff.norm_sqr()
        + 2f64.powf(rate_r) * ch.alpha_e * h_e_eff.norm_sqr();
    let beam = eig_beamformer(&h_r_eff, &h_e_eff, ch.alpha_r, ch.alpha_e, rate_r)?;
    Ok((beam, scale))
}

fn lambda_if_feasible(beam: &BeamformResult, scale: f64) -> Option<f64> {
    let lambda = beam.lambda_star?;
    if lambda > LAMBDA_REL_FLOOR * scale {
        Some(lambda)
    } else {
        None
    }
}

/// Alternating design for a general AP-IRS link. Starts from zero phases,
/// alternates the eigenvector beamformer with a phase solve on the
/// effective-channel problem, and stops when the relative power change
/// drops below `opts.outer_tol`. The accepted power sequence never
/// increases: a phase candidate that does not beat the incumbent
/// objective is discarded, and a power increase reverts to the previous
/// iterate and stops the loop.
pub fn solve_full_rank(
    ch: &ChannelSet,
    rate_r: f64,
    sigma2: f64,
    solver: PhaseSolver,
    opts: &SolveOpts,
    rng: &mut impl Rng,
) -> Result<DesignResult> {
    check_common(ch, rate_r, sigma2)?;
    opts.check()?;
    let g = ch.g_mode.as_matrix();
    let n = ch.n_elements();

    let mut phases = PhaseVector::zeros(n);
    let (mut beam, scale) = beam_step(ch, &phases, rate_r)?;
    let mut lambda = lambda_if_feasible(&beam, scale);
    if lambda.is_none() {
        for _ in 0..FULL_RANK_RESTARTS {
            let cand = random_phases(n, rng);
            let (trial, trial_scale) = beam_step(ch, &cand, rate_r)?;
            if let Some(l) = lambda_if_feasible(&trial, trial_scale) {
                phases = cand;
                beam = trial;
                lambda = Some(l);
                break;
            }
        }
    }
    let lambda = lambda.ok_or(Error::Infeasible)?;
    let mut power_w = required_power_full_rank(lambda, rate_r, sigma2)?;
    let mut report = PhaseSolveReport {
        objective: lambda,
        iterations: 0,
        sdp_upper_bound: None,
        converged: true,
    };

    let mut outer_iterations = 0;
    let mut settled = false;
    while outer_iterations < opts.max_outer_iters {
        outer_iterations += 1;

        let b_eff = g.adjoint().matvec(&beam.omega);
        let prob = build_phase_problem(&b_eff, &ch.h_r, &ch.h_e, ch.alpha_r, ch.alpha_e, rate_r)?;
        let (cand, mut cand_rep) = solve_phases(&prob, &phases, solver, opts, rng)?;
        let incumbent_obj = prob.objective(&phases);
        let next = if cand_rep.objective > incumbent_obj {
            cand
        } else {
            cand_rep.objective = incumbent_obj;
            phases.clone()
        };

        let (beam_next, scale_next) = beam_step(ch, &next, rate_r)?;
        let lambda_next = match lambda_if_feasible(&beam_next, scale_next) {
            Some(l) => l,
            None => {
                // cannot happen while the incumbent guard holds; keep the
                // previous feasible iterate
                settled = true;
                break;
            }
        };
        let power_next = required_power_full_rank(lambda_next, rate_r, sigma2)?;
        if power_next > power_w {
            settled = true;
            break;
        }
        let rel_drop = (power_w - power_next) / power_w;
        phases = next;
        beam = beam_next;
        power_w = power_next;
        report = cand_rep;
        if rel_drop < opts.outer_tol {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::NotConverged("alternating design outer loop"));
    }

    let achieved =
        crate::secrecy::capacity_full(ch, &phases, &beam.omega, power_w, sigma2)?.value_bits;
    Ok(DesignResult {
        omega: beam.omega,
        phases,
        power_w,
        achieved_rate_bits: achieved,
        method: DesignMethod::FullRankAlternating,
        report,
        outer_iterations,
    })
}

/// Doubling bracket plus bisection on an increasing-enough rate curve.
/// Returns the smallest power found with rate(p) >= target, and the
/// number of rate evaluations spent.
fn bisect_power(
    rate_at: impl Fn(f64) -> Result<f64>,
    target: f64,
    cap: f64,
) -> Result<(f64, usize)> {
    let mut evals = 0;
    let mut lo = 0.0;
    let mut hi = cap * 1e-18;
    loop {
        evals += 1;
        if rate_at(hi)? >= target {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > cap {
            return Err(Error::Infeasible);
        }
    }
    for _ in 0..BISECT_MAX {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        evals += 1;
        if rate_at(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, evals))
}

fn positive_alpha_floor(ch: &ChannelSet) -> Result<f64> {
    if !(ch.alpha_r > 0.0) {
        return Err(Error::Infeasible);
    }
    Ok(if ch.alpha_e > 0.0 { ch.alpha_r.min(ch.alpha_e) } else { ch.alpha_r })
}

/// Design with instantaneous legitimate CSI and distribution-only
/// eavesdropper CSI. The phases align the legitimate cascade (optimal
/// because the eavesdropper's ergodic term is phase-invariant), the
/// beamformer is a/|a|, and the power solves
/// log2(1 + c_r p) - F1(c_e p) = R by bisection.
pub fn solve_stat_eve(ch: &ChannelSet, rate_r: f64, sigma2: f64) -> Result<DesignResult> {
    check_common(ch, rate_r, sigma2)?;
    let (a, b) = rank_one_parts(ch)?;
    let phases = stat_eve_phase(&ch.h_r, b);
    let omega = a.normalized()?;
    let gain_a = a.norm_sqr();
    let legit_gain = b.inner(&phases.adjoint_apply(&ch.h_r)).norm_sqr();
    let c_r = ch.alpha_r * gain_a * legit_gain / sigma2;
    let c_e = ch.alpha_e * ch.sigma2_he * gain_a * b.norm_sqr() / sigma2;
    if !(c_r > 0.0) {
        return Err(Error::Infeasible);
    }

    let rate_at = |p: f64| -> Result<f64> {
        let eve = if c_e * p > 0.0 { f1(c_e * p)? } else { 0.0 };
        Ok((1.0 + c_r * p).log2() - eve)
    };
    let cap = POWER_CAP_FACTOR * sigma2 / positive_alpha_floor(ch)?;
    let (power_w, evals) = bisect_power(rate_at, rate_r, cap)?;
    let achieved = rate_at(power_w)?;
    Ok(DesignResult {
        omega,
        phases,
        power_w,
        achieved_rate_bits: achieved,
        method: DesignMethod::StatEveClosedForm,
        report: PhaseSolveReport {
            objective: achieved - rate_r,
            iterations: evals,
            sdp_upper_bound: None,
            converged: true,
        },
        outer_iterations: 1,
    })
}

/// Design with distribution-only CSI on both sides. Every phase choice
/// gives the same ergodic rates, so the phases stay at zero; the power
/// solves F1(c_r p) - F1(c_e p) = R, feasible only when the legitimate
/// side's mean SNR coefficient is strictly larger and R is below the
/// saturation value log2(c_r / c_e).
pub fn solve_stat_both(ch: &ChannelSet, rate_r: f64, sigma2: f64) -> Result<DesignResult> {
    check_common(ch, rate_r, sigma2)?;
    let (a, b) = rank_one_parts(ch)?;
    let omega = a.normalized()?;
    let scale = a.norm_sqr() * b.norm_sqr() / sigma2;
    let c_r = ch.alpha_r * ch.sigma2_hr * scale;
    let c_e = ch.alpha_e * ch.sigma2_he * scale;
    if !(c_r > 0.0) || c_r <= c_e {
        return Err(Error::Infeasible);
    }

    let rate_at = |p: f64| -> Result<f64> {
        if p <= 0.0 {
            return Ok(0.0);
        }
        let eve = if c_e * p > 0.0 { f1(c_e * p)? } else { 0.0 };
        Ok(f1(c_r * p)? - eve)
    };
    let cap = POWER_CAP_FACTOR * sigma2 / positive_alpha_floor(ch)?;
    let (power_w, evals) = bisect_power(rate_at, rate_r, cap)?;
    let achieved = rate_at(power_w)?;
    Ok(DesignResult {
        omega,
        phases: PhaseVector::zeros(b.len()),
        power_w,
        achieved_rate_bits: achieved,
        method: DesignMethod::StatBothClosedForm,
        report: PhaseSolveReport {
            objective: achieved - rate_r,
            iterations: evals,
            sdp_upper_bound: None,
            converged: true,
        },
        outer_iterations: 1,
    })
}

/// Recompute the rate constraint longhand, composing the cascade through
/// the explicit G matrix and the diagonal phase matrix rather than
/// through the solver's own shortcuts.
pub fn verify_design(
    ch: &ChannelSet,
    result: &DesignResult,
    rate_r: f64,
    sigma2: f64,
) -> Result<VerificationReport> {
    ch.check_dimensions()?;
    if !(sigma2 > 0.0) {
        return Err(Error::DomainError("verify_design needs sigma2 > 0"));
    }
    if result.phases.len() != ch.n_elements() {
        return Err(Error::DimensionMismatch {
            expected: ch.n_elements(),
            got: result.phases.len(),
        });
    }
    if result.omega.len() != ch.m_antennas() {
        return Err(Error::DimensionMismatch {
            expected: ch.m_antennas(),
            got: result.omega.len(),
        });
    }
    let g = ch.g_mode.as_matrix();
    let theta_mat = ComplexMatrix::diag(&result.phases.unit_vector());
    let cascade = theta_mat.matvec(&g.adjoint().matvec(&result.omega));
    let snr_r = ch.alpha_r * result.power_w * ch.h_r.inner(&cascade).norm_sqr() / sigma2;
    let snr_e = ch.alpha_e * result.power_w * ch.h_e.inner(&cascade).norm_sqr() / sigma2;
    let constraint_ratio_bits = ((1.0 + snr_r) / (1.0 + snr_e)).log2();
    let slack_bits = constraint_ratio_bits - rate_r;
    let omega_norm_dev = (result.omega.norm() - 1.0).abs();
    Ok(VerificationReport {
        constraint_ratio_bits,
        slack_bits,
        omega_norm_dev,
        ok: slack_bits >= -1e-8 && omega_norm_dev <= 1e-9,
    })
}
