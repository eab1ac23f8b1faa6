//! Transmit beamformer design and the power needed to hit a secrecy rate.
//!
//! Two regimes: the rank-one AP-IRS link admits a closed form (match the
//! array factor), the general link reduces to a maximum-eigenvector
//! problem for fixed surface phases. Both power formulas are the same
//! tight constraint solved for P.

use crate::channel::{ApIrsChannel, ChannelSet};
use crate::error::{Error, Result};
use crate::numkernel::{max_eigpair, ComplexMatrix, ComplexVector};
use crate::phaseopt::PhaseVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamformMethod {
    RankOneClosedForm,
    EigenvalueBased,
}

#[derive(Debug, Clone)]
pub struct BeamformResult {
    /// Unit-norm transmit direction.
    pub omega: ComplexVector,
    /// Max eigenvalue of the weighted channel difference; only the
    /// eigenvalue-based path produces one.
    pub lambda_star: Option<f64>,
    pub method: BeamformMethod,
}

/// Match the AP array factor: omega = a / |a|.
pub fn rank_one_beamformer(a: &ComplexVector) -> Result<BeamformResult> {
    Ok(BeamformResult {
        omega: a.normalized()?,
        lambda_star: None,
        method: BeamformMethod::RankOneClosedForm,
    })
}

/// Compose the AP-to-receiver channels through the surface:
/// h_eff = G Theta^H h, so that h_eff^H omega = h^H Theta G^H omega.
pub fn effective_channels(
    ch: &ChannelSet,
    theta: &PhaseVector,
) -> Result<(ComplexVector, ComplexVector)> {
    let n = ch.n_elements();
    if theta.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: theta.len() });
    }
    ch.check_dimensions()?;
    let compose = |h: &ComplexVector| -> ComplexVector {
        let rotated = theta.adjoint_apply(h);
        match &ch.g_mode {
            ApIrsChannel::RankOne { a, b } => {
                // G Theta^H h = a (b^H Theta^H h)
                let coeff = b.inner(&rotated);
                a.scale(coeff)
            }
            ApIrsChannel::Full { g } => g.matvec(&rotated),
        }
    };
    Ok((compose(&ch.h_r), compose(&ch.h_e)))
}

/// Best beamformer for fixed phases: the leading eigenvector of
/// W = alpha_r h_r_eff h_r_eff^H - 2^R alpha_e h_e_eff h_e_eff^H,
/// with lambda_star its eigenvalue. lambda_star <= 0 means the rate is
/// unreachable at any power for these phases.
pub fn eig_beamformer(
    h_r_eff: &ComplexVector,
    h_e_eff: &ComplexVector,
    alpha_r: f64,
    alpha_e: f64,
    rate_r: f64,
) -> Result<BeamformResult> {
    if h_r_eff.len() != h_e_eff.len() {
        return Err(Error::DimensionMismatch { expected: h_r_eff.len(), got: h_e_eff.len() });
    }
    if !(rate_r > 0.0) {
        return Err(Error::DomainError("eig_beamformer requires rate_r > 0"));
    }
    let m = h_r_eff.len();
    let eve_weight = 2f64.powf(rate_r) * alpha_e;
    let w = ComplexMatrix::from_fn(m, m, |i, j| {
        alpha_r * h_r_eff.entries[i] * h_r_eff.entries[j].conj()
            - eve_weight * h_e_eff.entries[i] * h_e_eff.entries[j].conj()
    })
    .hermitize();
    let top = max_eigpair(&w)?;
    Ok(BeamformResult {
        omega: top.vector,
        lambda_star: Some(top.value),
        method: BeamformMethod::EigenvalueBased,
    })
}

/// Minimum power meeting the secrecy-rate constraint on a rank-one link
/// with omega = a/|a|:
/// P = sigma2 (2^R - 1) / (|a|^2 D), D = alpha_r |h_r^H Theta b|^2
/// - 2^R alpha_e |h_e^H Theta b|^2. D <= 0 means infeasible.
pub fn required_power_rank_one(
    ch: &ChannelSet,
    theta: &PhaseVector,
    rate_r: f64,
    sigma2: f64,
) -> Result<f64> {
    if !(rate_r > 0.0) || !(sigma2 > 0.0) {
        return Err(Error::DomainError("required_power_rank_one needs rate_r > 0, sigma2 > 0"));
    }
    let (a, b) = match &ch.g_mode {
        ApIrsChannel::RankOne { a, b } => (a, b),
        ApIrsChannel::Full { .. } => {
            return Err(Error::DomainError("required_power_rank_one needs a rank-one channel"))
        }
    };
    if theta.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: b.len(), got: theta.len() });
    }
    let c_r = b.inner(&theta.adjoint_apply(&ch.h_r)).norm_sqr();
    let c_e = b.inner(&theta.adjoint_apply(&ch.h_e)).norm_sqr();
    let pow2r = 2f64.powf(rate_r);
    let d = ch.alpha_r * c_r - pow2r * ch.alpha_e * c_e;
    if d <= 0.0 {
        return Err(Error::Infeasible);
    }
    Ok(sigma2 * (pow2r - 1.0) / (a.norm_sqr() * d))
}

/// Minimum power for the eigenvalue-based beamformer:
/// P = sigma2 (2^R - 1) / lambda_star.
pub fn required_power_full_rank(lambda_star: f64, rate_r: f64, sigma2: f64) -> Result<f64> {
    if !(rate_r > 0.0) || !(sigma2 > 0.0) {
        return Err(Error::DomainError("required_power_full_rank needs rate_r > 0, sigma2 > 0"));
    }
    if lambda_star <= 0.0 {
        return Err(Error::Infeasible);
    }
    Ok(sigma2 * (2f64.powf(rate_r) - 1.0) / lambda_star)
}
