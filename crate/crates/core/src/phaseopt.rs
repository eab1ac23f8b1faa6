//! Phase-shift optimization for the reflecting surface.
//!
//! The common currency is the Hermitian matrix A with objective v^H A v
//! over unimodular v = e^(j theta). Solvers: projected gradient with
//! Armijo backtracking, Gaussian randomization rounding of an SDP
//! solution, a closed-form alignment for the statistical-eavesdropper
//! case, and an exhaustive grid oracle for tiny N.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{hermitian_eig, sample_cn, ComplexMatrix, ComplexVector};

use std::f64::consts::TAU;

const ARMIJO_C1: f64 = 1e-4;
const ARMIJO_SHRINK: f64 = 0.5;
const ARMIJO_MAX_HALVINGS: usize = 50;
/// Reject rounding inputs whose smallest eigenvalue is below this floor.
const ROUND_PSD_FLOOR: f64 = -1e-5;

/// N surface phases, each kept in [0, 2 pi).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector {
    pub theta: Vec<f64>,
}

fn wrap_tau(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl PhaseVector {
    pub fn zeros(n: usize) -> Self {
        PhaseVector { theta: vec![0.0; n] }
    }

    /// Build from raw angles, wrapping each into [0, 2 pi).
    pub fn from_thetas(raw: Vec<f64>) -> Self {
        PhaseVector { theta: raw.into_iter().map(wrap_tau).collect() }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// The induced unimodular vector v with v_n = e^(j theta_n).
    pub fn unit_vector(&self) -> ComplexVector {
        ComplexVector::new(self.theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect())
    }

    /// Same phases shifted by a common constant (a physically equivalent
    /// configuration).
    pub fn shifted(&self, delta: f64) -> Self {
        PhaseVector::from_thetas(self.theta.iter().map(|&t| t + delta).collect())
    }

    /// Apply the adjoint surface action to a fading vector:
    /// entry n of the result is e^(-j theta_n) h_n.
    pub fn adjoint_apply(&self, h: &ComplexVector) -> ComplexVector {
        debug_assert_eq!(self.len(), h.len());
        ComplexVector::new(
            self.theta
                .iter()
                .zip(&h.entries)
                .map(|(&t, z)| Complex64::from_polar(1.0, -t) * z)
                .collect(),
        )
    }
}

/// The quadratic phase problem: maximize v^H A v over unimodular v.
#[derive(Debug, Clone)]
pub struct PhaseProblem {
    matrix: ComplexMatrix,
}

impl PhaseProblem {
    /// Wrap an existing Hermitian matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.require_hermitian()?;
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.rows, got: matrix.cols });
        }
        Ok(PhaseProblem { matrix: matrix.hermitize() })
    }

    pub fn n(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// v^H A v at the induced unimodular v; real because A is Hermitian.
    pub fn objective(&self, phases: &PhaseVector) -> f64 {
        self.matrix.quadratic_form(&phases.unit_vector())
    }
}

/// What a phase solve produced and how hard it worked.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseSolveReport {
    pub objective: f64,
    pub iterations: usize,
    pub sdp_upper_bound: Option<f64>,
    pub converged: bool,
}

/// A = B^H (alpha_r h_r h_r^H - 2^R alpha_e h_e h_e^H) B with B the
/// diagonal matrix of `b_diag_source`. The induced objective satisfies
/// v^H A v = alpha_r |h_r^H Theta b|^2 - 2^R alpha_e |h_e^H Theta b|^2.
pub fn build_phase_problem(
    b_diag_source: &ComplexVector,
    h_r: &ComplexVector,
    h_e: &ComplexVector,
    alpha_r: f64,
    alpha_e: f64,
    rate_r: f64,
) -> Result<PhaseProblem> {
    let n = b_diag_source.len();
    if h_r.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: h_r.len() });
    }
    if h_e.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: h_e.len() });
    }
    let eve_weight = 2f64.powf(rate_r) * alpha_e;
    let m = ComplexMatrix::from_fn(n, n, |i, j| {
        let inner = alpha_r * h_r.entries[i] * h_r.entries[j].conj()
            - eve_weight * h_e.entries[i] * h_e.entries[j].conj();
        b_diag_source.entries[i].conj() * inner * b_diag_source.entries[j]
    });
    PhaseProblem::new(m.hermitize())
}

/// Gradient of the minimized objective -v^H A v with respect to each
/// phase: g_i = -2 Im(e^(-j theta_i) (A v)_i).
pub fn phase_gradient(prob: &PhaseProblem, theta: &PhaseVector) -> Vec<f64> {
    debug_assert_eq!(prob.n(), theta.len());
    let v = theta.unit_vector();
    let av = prob.matrix.matvec(&v);
    (0..prob.n())
        .map(|i| -2.0 * (v.entries[i].conj() * av.entries[i]).im)
        .collect()
}

/// Projected gradient descent on the phases with Armijo backtracking.
///
/// Works on a copy of A scaled to unit Frobenius norm so the stopping
/// threshold `eps` means the same thing at any problem scale; the
/// reported objective is in the original scale. Accepted steps never
/// increase the minimized objective. `converged = false` means the
/// iteration or line-search budget ran out first.
pub fn pgd_phase(
    prob: &PhaseProblem,
    init: &PhaseVector,
    eps: f64,
    max_iters: usize,
) -> Result<(PhaseVector, PhaseSolveReport)> {
    if init.len() != prob.n() {
        return Err(Error::DimensionMismatch { expected: prob.n(), got: init.len() });
    }
    if !(eps > 0.0) {
        return Err(Error::DomainError("pgd_phase requires eps > 0"));
    }
    let scale = prob.matrix.frobenius_norm();
    if scale == 0.0 {
        let phases = PhaseVector::from_thetas(init.theta.clone());
        return Ok((
            phases,
            PhaseSolveReport { objective: 0.0, iterations: 0, sdp_upper_bound: None, converged: true },
        ));
    }
    let scaled = PhaseProblem::new(prob.matrix.scale_real(1.0 / scale))?;

    let mut theta = init.theta.clone();
    let mut f = -scaled.objective(&PhaseVector { theta: theta.clone() });
    let mut iterations = 0;
    let mut converged = false;

    for _ in 0..max_iters {
        iterations += 1;
        let g = phase_gradient(&scaled, &PhaseVector { theta: theta.clone() });
        let g_norm_sqr: f64 = g.iter().map(|x| x * x).sum();
        if g_norm_sqr.sqrt() < eps {
            converged = true;
            break;
        }
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..ARMIJO_MAX_HALVINGS {
            let cand: Vec<f64> =
                theta.iter().zip(&g).map(|(&t, &gi)| t - step * gi).collect();
            let f_cand = -scaled.objective(&PhaseVector { theta: cand.clone() });
            if f_cand <= f - ARMIJO_C1 * step * g_norm_sqr {
                debug_assert!(f_cand <= f, "line search accepted an increase");
                theta = cand;
                f = f_cand;
                accepted = true;
                break;
            }
            step *= ARMIJO_SHRINK;
        }
        if !accepted {
            // No productive step at the smallest trial length: treat the
            // iterate as stationary at working precision.
            converged = true;
            break;
        }
    }

    let phases = PhaseVector::from_thetas(theta);
    let objective = prob.objective(&phases);
    Ok((phases, PhaseSolveReport { objective, iterations, sdp_upper_bound: None, converged }))
}

/// Gaussian randomization rounding of an SDP solution V*.
///
/// Draws v = U diag(sqrt(lambda)) r with r standard complex normal, maps
/// each to the unimodular e^(j Arg(v)), always includes the deterministic
/// leading-eigenvector candidate, and returns the best by v^H A v. Ties
/// keep the earliest candidate, so a fixed rng gives one answer.
pub fn sdp_round(
    v_star: &ComplexMatrix,
    prob: &PhaseProblem,
    n_draws: usize,
    rng: &mut impl Rng,
) -> Result<(PhaseVector, PhaseSolveReport)> {
    let n = prob.n();
    if v_star.rows != n || v_star.cols != n {
        return Err(Error::DimensionMismatch { expected: n, got: v_star.rows });
    }
    for i in 0..n {
        if (v_star[(i, i)] - Complex64::new(1.0, 0.0)).norm() > 1e-6 {
            return Err(Error::DomainError("sdp_round needs a unit-diagonal V*"));
        }
    }
    let pairs = hermitian_eig(v_star)?;
    if let Some(last) = pairs.last() {
        if last.value < ROUND_PSD_FLOOR {
            return Err(Error::DomainError("sdp_round needs a PSD V*"));
        }
    }
    let upper = prob.matrix().trace_product_re(v_star);

    let candidate_phases = |v: &ComplexVector| -> PhaseVector {
        PhaseVector::from_thetas(v.entries.iter().map(|z| z.arg()).collect())
    };

    let mut best = candidate_phases(&pairs[0].vector);
    let mut best_obj = prob.objective(&best);
    let mut evaluated = 1;

    // Directions with negligible eigenvalue carry no sampling mass but
    // would amplify eigenvalue noise through the square root; drop them.
    let lam_floor = pairs.first().map(|p| p.value.max(0.0)).unwrap_or(0.0) * 1e-12;
    let roots: Vec<f64> =
        pairs.iter().map(|p| if p.value > lam_floor { p.value.sqrt() } else { 0.0 }).collect();
    for _ in 0..n_draws {
        let r = sample_cn(n, 1.0, rng)?;
        let mut v = ComplexVector::zeros(n);
        for (k, pair) in pairs.iter().enumerate() {
            if roots[k] == 0.0 {
                continue;
            }
            let w = roots[k] * r.entries[k];
            for i in 0..n {
                v.entries[i] += w * pair.vector.entries[i];
            }
        }
        let cand = candidate_phases(&v);
        let obj = prob.objective(&cand);
        evaluated += 1;
        if obj > best_obj {
            best_obj = obj;
            best = cand;
        }
    }

    Ok((
        best,
        PhaseSolveReport {
            objective: best_obj,
            iterations: evaluated,
            sdp_upper_bound: Some(upper),
            converged: true,
        },
    ))
}

/// Closed-form alignment when only the legitimate channel matters:
/// theta_n = -Arg(conj(h_r_n) b_n), making every summand of h_r^H Theta b
/// real positive so the magnitudes add.
pub fn stat_eve_phase(h_r: &ComplexVector, b: &ComplexVector) -> PhaseVector {
    debug_assert_eq!(h_r.len(), b.len());
    PhaseVector::from_thetas(
        h_r.entries
            .iter()
            .zip(&b.entries)
            .map(|(h, bn)| -(h.conj() * bn).arg())
            .collect(),
    )
}

/// Exhaustive grid search over phases with theta_1 pinned to zero
/// (global-phase invariance). Only for tiny N; the oracle other solvers
/// are judged against.
pub fn brute_force_phase(prob: &PhaseProblem, grid_levels: usize) -> Result<(PhaseVector, f64)> {
    let n = prob.n();
    if n > 4 {
        return Err(Error::TooLarge { size: n, cap: 4 });
    }
    if grid_levels > 128 {
        return Err(Error::TooLarge { size: grid_levels, cap: 128 });
    }
    if grid_levels == 0 || n == 0 {
        return Err(Error::DomainError("brute_force_phase needs n >= 1, grid_levels >= 1"));
    }
    let mut theta = vec![0.0f64; n];
    let mut best = PhaseVector::zeros(n);
    let mut best_obj = prob.objective(&best);
    let total = grid_levels.pow((n - 1) as u32);
    for idx in 0..total {
        let mut rem = idx;
        for t in theta.iter_mut().skip(1) {
            *t = TAU * (rem % grid_levels) as f64 / grid_levels as f64;
            rem /= grid_levels;
        }
        let cand = PhaseVector { theta: theta.clone() };
        let obj = prob.objective(&cand);
        if obj > best_obj {
            best_obj = obj;
            best = cand;
        }
    }
    Ok((best, best_obj))
}
