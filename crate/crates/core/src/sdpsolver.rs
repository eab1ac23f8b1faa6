//! Splitting solver for the unit-diagonal complex SDP
//! maximize Tr(AV) subject to diag(V) = 1, V PSD,
//! the convex relaxation of the unimodular phase problem.
//!
//! Alternating projections with a running dual (ADMM): one copy of V
//! lives on the affine unit-diagonal set, one on the PSD cone, and the
//! dual ties them together. Everything stays in complex arithmetic; the
//! per-iteration cost is one Hermitian eigendecomposition, cheap at the
//! sizes this crate cares about (N <= 64).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{hermitian_eig, psd_project, ComplexMatrix};

/// Hard cap on problem size.
pub const SDP_SIZE_CAP: usize = 64;

const RHO_INIT: f64 = 1.0;
const BALANCE_EVERY: usize = 25;
const BALANCE_RATIO: f64 = 10.0;
const BALANCE_SCALE: f64 = 2.0;
const STALL_WINDOW: usize = 100;
const STALL_REL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Feasible optimizer: unit diagonal exactly, PSD up to eig accuracy.
    pub v: ComplexMatrix,
    /// Tr(A V), real.
    pub objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// (primal, dual) residuals sampled every few iterations.
    pub residual_trace: Vec<(f64, f64)>,
}

/// Solve max Tr(AV) over unit-diagonal PSD V.
///
/// A is scaled to unit Frobenius norm internally so `tol` is scale-free;
/// the returned objective is in the original scale. The returned V is
/// repaired to satisfy both constraint families exactly: the unit
/// diagonal by construction, positive semidefiniteness by a diagonal
/// lift (V + sI)/(1 + s) with s the magnitude of the most negative
/// eigenvalue, which preserves the diagonal.
pub fn solve_unit_diag_sdp(a: &ComplexMatrix, tol: f64, max_iters: usize) -> Result<SdpSolution> {
    a.require_hermitian()?;
    let n = a.rows;
    if n > SDP_SIZE_CAP {
        return Err(Error::TooLarge { size: n, cap: SDP_SIZE_CAP });
    }
    if !(tol > 0.0) {
        return Err(Error::DomainError("solve_unit_diag_sdp requires tol > 0"));
    }
    if max_iters == 0 {
        return Err(Error::DomainError("solve_unit_diag_sdp requires max_iters >= 1"));
    }
    if n == 0 {
        return Err(Error::DomainError("empty problem"));
    }

    let scale = a.frobenius_norm();
    if scale == 0.0 {
        // Any feasible point is optimal; the identity is the canonical one.
        return Ok(SdpSolution {
            v: ComplexMatrix::identity(n),
            objective: 0.0,
            primal_residual: 0.0,
            dual_residual: 0.0,
            iterations: 0,
            converged: true,
            residual_trace: Vec::new(),
        });
    }
    let a_hat = a.scale_real(1.0 / scale);

    let mut v = ComplexMatrix::identity(n);
    let mut z = ComplexMatrix::identity(n);
    let mut u = ComplexMatrix::zeros(n, n);
    let mut rho = RHO_INIT;

    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut trace = Vec::new();
    let mut stall_ring: Vec<f64> = Vec::with_capacity(STALL_WINDOW);

    for it in 0..max_iters {
        iterations = it + 1;

        // Affine step: unconstrained minimizer of the augmented objective
        // is Z - U + A/rho; the unit-diagonal constraint pins the diagonal.
        v = z.sub(&u).add(&a_hat.scale_real(1.0 / rho));
        for i in 0..n {
            v[(i, i)] = Complex64::new(1.0, 0.0);
        }

        // Cone step.
        let z_prev = z;
        z = psd_project(&v.add(&u))?;

        // Dual ascent.
        u = u.add(&v.sub(&z));

        primal = v.sub(&z).frobenius_norm();
        dual = rho * z.sub(&z_prev).frobenius_norm();
        if it % 10 == 0 {
            trace.push((primal, dual));
        }

        let v_scale = v.frobenius_norm().max(1.0);
        if primal <= tol * v_scale && dual <= tol * v_scale {
            converged = true;
            break;
        }

        // Objective stall: progress below measurement noise for a full
        // window counts as converged for reporting purposes.
        let obj = a_hat.trace_product_re(&v);
        if stall_ring.len() == STALL_WINDOW {
            let old = stall_ring.remove(0);
            if (obj - old).abs() < STALL_REL * obj.abs().max(1.0) && primal <= 100.0 * tol {
                converged = true;
                break;
            }
        }
        stall_ring.push(obj);

        if it % BALANCE_EVERY == BALANCE_EVERY - 1 {
            if primal > BALANCE_RATIO * dual {
                rho *= BALANCE_SCALE;
                u = u.scale_real(1.0 / BALANCE_SCALE);
            } else if dual > BALANCE_RATIO * primal {
                rho /= BALANCE_SCALE;
                u = u.scale_real(BALANCE_SCALE);
            }
        }
    }

    // Repair: v has an exact unit diagonal; lift away any residual
    // negative curvature without touching the diagonal.
    let v = v.hermitize();
    let pairs = hermitian_eig(&v)?;
    let min_eig = pairs.last().map(|p| p.value).unwrap_or(0.0);
    let v = if min_eig < 0.0 {
        let s = -min_eig;
        let lifted = v.add(&ComplexMatrix::identity(n).scale_real(s)).scale_real(1.0 / (1.0 + s));
        lifted.hermitize()
    } else {
        v
    };

    let objective = a.trace_product_re(&v);
    Ok(SdpSolution {
        v,
        objective,
        primal_residual: primal,
        dual_residual: dual,
        iterations,
        converged,
        residual_trace: trace,
    })
}

/// Audit residuals for a candidate primal V and dual slack S.
///
/// Primal: distance of V from the feasible set (diagonal deviation plus
/// the most negative eigenvalue). Dual: stationarity defect of S against
/// A off the diagonal, distance of S from the PSD cone, and the
/// complementarity gap |Tr(SV)|. Both vanish at an exact KKT point.
pub fn sdp_residuals(a: &ComplexMatrix, v: &ComplexMatrix, s_dual: &ComplexMatrix) -> (f64, f64) {
    let n = a.rows;
    let mut diag_dev = 0.0;
    for i in 0..n {
        diag_dev += (v[(i, i)] - Complex64::new(1.0, 0.0)).norm_sqr();
    }
    let min_eig = hermitian_eig(&v.hermitize())
        .map(|p| p.last().map(|q| q.value).unwrap_or(0.0))
        .unwrap_or(f64::NEG_INFINITY);
    let primal = diag_dev.sqrt() + (-min_eig).max(0.0);

    let mut offdiag_defect = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                offdiag_defect += (s_dual[(i, j)] + a[(i, j)]).norm_sqr();
            }
        }
    }
    let s_h = s_dual.hermitize();
    let cone_dist = match psd_project(&s_h) {
        Ok(p) => s_h.sub(&p).frobenius_norm(),
        Err(_) => f64::INFINITY,
    };
    let comp = s_dual.trace_product_re(v).abs();
    let dual = offdiag_defect.sqrt() + cone_dist + comp;
    (primal, dual)
}
