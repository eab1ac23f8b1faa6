//! Secrecy capacity under the three channel-knowledge assumptions, and
//! the closed-form ergodic rate F1 for exponentially distributed SNR.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::beamform::effective_channels;
use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::numkernel::{exp_e1_scaled, sample_cn, ComplexVector, LOG2_E};
use crate::phaseopt::PhaseVector;

/// What the transmitter knows about each channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CsiMode {
    /// Instantaneous knowledge of both receivers' channels.
    FullBoth,
    /// Instantaneous legitimate channel, distribution-only eavesdropper.
    FullLegitStatEve,
    /// Distribution-only knowledge of both.
    StatBoth,
}

/// A capacity value in bits/s/Hz with its Monte-Carlo uncertainty;
/// deterministic evaluations carry std_error = 0 and n_samples = 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub value_bits: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

fn check_inputs(ch: &ChannelSet, theta: &PhaseVector, omega: &ComplexVector, p: f64) -> Result<()> {
    ch.check_dimensions()?;
    if theta.len() != ch.n_elements() {
        return Err(Error::DimensionMismatch { expected: ch.n_elements(), got: theta.len() });
    }
    if omega.len() != ch.m_antennas() {
        return Err(Error::DimensionMismatch { expected: ch.m_antennas(), got: omega.len() });
    }
    if (omega.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::DomainError("omega must be unit norm"));
    }
    if !(p >= 0.0) {
        return Err(Error::DomainError("power must be >= 0"));
    }
    Ok(())
}

/// Instantaneous secrecy capacity
/// C = log2(1 + alpha_r p |h_r^H Theta G^H omega|^2 / sigma2) -
/// log2(1 + alpha_e p |h_e^H Theta G^H omega|^2 / sigma2).
/// May be negative; clamping is the caller's policy.
pub fn capacity_full(
    ch: &ChannelSet,
    theta: &PhaseVector,
    omega: &ComplexVector,
    p: f64,
    sigma2: f64,
) -> Result<CapacityEstimate> {
    check_inputs(ch, theta, omega, p)?;
    if !(sigma2 > 0.0) {
        return Err(Error::DomainError("sigma2 must be > 0"));
    }
    let (h_r_eff, h_e_eff) = effective_channels(ch, theta)?;
    let snr_r = ch.alpha_r * p * h_r_eff.inner(omega).norm_sqr() / sigma2;
    let snr_e = ch.alpha_e * p * h_e_eff.inner(omega).norm_sqr() / sigma2;
    let value_bits = (1.0 + snr_r).log2() - (1.0 + snr_e).log2();
    Ok(CapacityEstimate { value_bits, std_error: 0.0, n_samples: 0 })
}

/// Secrecy capacity when only the eavesdropper's fading distribution is
/// known: the legitimate term is instantaneous, the eavesdropper term is
/// a Monte-Carlo average over fresh fading draws.
pub fn capacity_stat_eve(
    ch: &ChannelSet,
    theta: &PhaseVector,
    omega: &ComplexVector,
    p: f64,
    sigma2: f64,
    n_mc: usize,
    rng: &mut impl Rng,
) -> Result<CapacityEstimate> {
    check_inputs(ch, theta, omega, p)?;
    if !(sigma2 > 0.0) {
        return Err(Error::DomainError("sigma2 must be > 0"));
    }
    if n_mc < 100 {
        return Err(Error::DomainError("n_mc must be >= 100"));
    }
    let (h_r_eff, _) = effective_channels(ch, theta)?;
    let legit = (1.0 + ch.alpha_r * p * h_r_eff.inner(omega).norm_sqr() / sigma2).log2();
    let (eve_mean, eve_se) = mc_term(ch, theta, omega, p / sigma2, false, n_mc, rng)?;
    Ok(CapacityEstimate { value_bits: legit - eve_mean, std_error: eve_se, n_samples: n_mc })
}

/// Secrecy capacity when both channels are known only by distribution:
/// each rate term is a Monte-Carlo average over independent draws.
pub fn capacity_stat_both(
    ch: &ChannelSet,
    theta: &PhaseVector,
    omega: &ComplexVector,
    p: f64,
    sigma2: f64,
    n_mc: usize,
    rng: &mut impl Rng,
) -> Result<CapacityEstimate> {
    check_inputs(ch, theta, omega, p)?;
    if !(sigma2 > 0.0) {
        return Err(Error::DomainError("sigma2 must be > 0"));
    }
    if n_mc < 100 {
        return Err(Error::DomainError("n_mc must be >= 100"));
    }
    let (legit_mean, legit_se) = mc_term(ch, theta, omega, p / sigma2, true, n_mc, rng)?;
    let (eve_mean, eve_se) = mc_term(ch, theta, omega, p / sigma2, false, n_mc, rng)?;
    Ok(CapacityEstimate {
        value_bits: legit_mean - eve_mean,
        std_error: (legit_se * legit_se + eve_se * eve_se).sqrt(),
        n_samples: n_mc,
    })
}

/// Sample mean and standard error of log2(1 + SNR) over fresh fading
/// draws for one receiver. `snr_scale` is p / sigma2.
fn mc_term(
    ch: &ChannelSet,
    theta: &PhaseVector,
    omega: &ComplexVector,
    snr_scale: f64,
    legit: bool,
    n_mc: usize,
    rng: &mut impl Rng,
) -> Result<(f64, f64)> {
    let n = ch.n_elements();
    let (alpha, var) = if legit {
        (ch.alpha_r, ch.sigma2_hr)
    } else {
        (ch.alpha_e, ch.sigma2_he)
    };
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut fresh = ch.clone();
    for _ in 0..n_mc {
        let h = sample_cn(n, var, rng)?;
        if legit {
            fresh.h_r = h;
        } else {
            fresh.h_e = h;
        }
        let (h_r_eff, h_e_eff) = effective_channels(&fresh, theta)?;
        let eff = if legit { h_r_eff } else { h_e_eff };
        let rate = (1.0 + alpha * snr_scale * eff.inner(omega).norm_sqr()).log2();
        sum += rate;
        sum_sq += rate * rate;
    }
    let mean = sum / n_mc as f64;
    let var_est = ((sum_sq - sum * sum / n_mc as f64) / (n_mc as f64 - 1.0)).max(0.0);
    Ok((mean, (var_est / n_mc as f64).sqrt()))
}

/// Ergodic rate of an exponentially distributed SNR with mean x:
/// F1(x) = E[log2(1 + x t)], t ~ Exp(1), equal to e^(1/x) E1(1/x) log2(e).
pub fn f1(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::DomainError("f1 requires finite x > 0"));
    }
    Ok(exp_e1_scaled(1.0 / x)? * LOG2_E)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{ApIrsChannel, make_rank_one_g, Geometry};
    use crate::numkernel::{substream, ComplexMatrix};
    use num_complex::Complex64;
    use rand::Rng;
    use rand_distr::{Distribution, Exp1};
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_set(alpha_r: f64, alpha_e: f64) -> ChannelSet {
        ChannelSet {
            g_mode: ApIrsChannel::RankOne {
                a: ComplexVector::new(vec![c(1.0, 0.0)]),
                b: ComplexVector::new(vec![c(1.0, 0.0)]),
            },
            h_r: ComplexVector::new(vec![c(1.0, 0.0)]),
            h_e: ComplexVector::new(vec![c(1.0, 0.0)]),
            alpha_r,
            alpha_e,
            sigma2_hr: 1.0,
            sigma2_he: 1.0,
        }
    }

    fn rank_one_set(m: usize, n: usize, seed: u64, alpha_r: f64, alpha_e: f64) -> ChannelSet {
        let geom = Geometry::default();
        let (a, b) = make_rank_one_g(&geom, m, n);
        let mut rng = substream(seed, 0x5EC);
        ChannelSet {
            g_mode: ApIrsChannel::RankOne { a, b },
            h_r: sample_cn(n, 1.0, &mut rng).unwrap(),
            h_e: sample_cn(n, 1.0, &mut rng).unwrap(),
            alpha_r,
            alpha_e,
            sigma2_hr: 1.0,
            sigma2_he: 1.0,
        }
    }

    fn random_phases(n: usize, seed: u64) -> PhaseVector {
        let mut rng = substream(seed, 0xAB);
        PhaseVector::from_thetas((0..n).map(|_| rng.gen::<f64>() * TAU).collect())
    }

    fn unit_omega(m: usize, seed: u64) -> ComplexVector {
        sample_cn(m, 1.0, &mut substream(seed, 0xE))
            .unwrap()
            .normalized()
            .unwrap()
    }

    #[test]
    fn zero_power_gives_zero_capacity() {
        let ch = scalar_set(1.0, 1.0);
        let omega = ComplexVector::new(vec![c(1.0, 0.0)]);
        let theta = PhaseVector::zeros(1);
        let cap = capacity_full(&ch, &theta, &omega, 0.0, 1.0).unwrap();
        assert_eq!(cap.value_bits, 0.0);
        assert_eq!(cap.std_error, 0.0);
        let cap = capacity_stat_eve(&ch, &theta, &omega, 0.0, 1.0, 200, &mut substream(1, 1))
            .unwrap();
        assert_eq!(cap.value_bits, 0.0);
        let cap = capacity_stat_both(&ch, &theta, &omega, 0.0, 1.0, 200, &mut substream(1, 2))
            .unwrap();
        assert_eq!(cap.value_bits, 0.0);
    }

    #[test]
    fn unit_snr_without_eavesdropper_is_one_bit() {
        let ch = scalar_set(1.0, 0.0);
        let omega = ComplexVector::new(vec![c(1.0, 0.0)]);
        let cap = capacity_full(&ch, &PhaseVector::zeros(1), &omega, 1.0, 1.0).unwrap();
        assert!((cap.value_bits - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_capacity_matches_longhand_formula() {
        let ch = rank_one_set(4, 5, 50, 1.7, 0.6);
        let theta = random_phases(5, 51);
        let omega = unit_omega(4, 52);
        let (p, sigma2) = (2.5, 0.8);
        let cap = capacity_full(&ch, &theta, &omega, p, sigma2).unwrap();

        // longhand: materialize G and Theta, compose, take magnitudes
        let g = ch.g_mode.as_matrix();
        let v = theta.unit_vector();
        let gw = g.adjoint().matvec(&omega);
        let mut cr = c(0.0, 0.0);
        let mut ce = c(0.0, 0.0);
        for i in 0..5 {
            cr += ch.h_r.entries[i].conj() * v.entries[i] * gw.entries[i];
            ce += ch.h_e.entries[i].conj() * v.entries[i] * gw.entries[i];
        }
        let want = (1.0 + ch.alpha_r * p * cr.norm_sqr() / sigma2).log2()
            - (1.0 + ch.alpha_e * p * ce.norm_sqr() / sigma2).log2();
        assert!((cap.value_bits - want).abs() < 1e-12);
    }

    #[test]
    fn capacity_invariant_under_global_phase_shift() {
        let ch = rank_one_set(4, 6, 53, 1.0, 0.5);
        let theta = random_phases(6, 54);
        let omega = unit_omega(4, 55);
        let a = capacity_full(&ch, &theta, &omega, 1.0, 1.0).unwrap();
        let b = capacity_full(&ch, &theta.shifted(1.234), &omega, 1.0, 1.0).unwrap();
        assert!((a.value_bits - b.value_bits).abs() < 1e-10);
    }

    #[test]
    fn capacity_rejects_non_unit_omega() {
        let ch = scalar_set(1.0, 1.0);
        let omega = ComplexVector::new(vec![c(2.0, 0.0)]);
        assert!(capacity_full(&ch, &PhaseVector::zeros(1), &omega, 1.0, 1.0).is_err());
    }

    #[test]
    fn stat_eve_mc_matches_f1_closed_form() {
        let n = 6;
        let ch = rank_one_set(4, n, 56, 1.0, 0.8);
        let theta = random_phases(n, 57);
        let a = match &ch.g_mode {
            ApIrsChannel::RankOne { a, .. } => a.clone(),
            _ => unreachable!(),
        };
        let b_norm_sqr = match &ch.g_mode {
            ApIrsChannel::RankOne { b, .. } => b.norm_sqr(),
            _ => unreachable!(),
        };
        let omega = a.normalized().unwrap();
        let (p, sigma2) = (3.0, 1.0);
        let cap = capacity_stat_eve(&ch, &theta, &omega, p, sigma2, 40_000, &mut substream(58, 0))
            .unwrap();
        // |h_e^H Theta b|^2 |a^H omega|^2 is exponential with mean
        // sigma2_he |b|^2 |a|^2, so the eavesdropper term is F1 of that.
        let x = ch.alpha_e * ch.sigma2_he * b_norm_sqr * a.norm_sqr() * p / sigma2;
        let legit = {
            let (hr, _) = effective_channels(&ch, &theta).unwrap();
            (1.0 + ch.alpha_r * p * hr.inner(&omega).norm_sqr() / sigma2).log2()
        };
        let want = legit - f1(x).unwrap();
        assert!(
            (cap.value_bits - want).abs() < 3.0 * cap.std_error,
            "mc {} vs closed form {want}, se {}",
            cap.value_bits,
            cap.std_error
        );
    }

    #[test]
    fn std_error_shrinks_with_sample_count() {
        let ch = rank_one_set(4, 4, 59, 1.0, 1.0);
        let theta = random_phases(4, 60);
        let omega = unit_omega(4, 61);
        let c1 = capacity_stat_eve(&ch, &theta, &omega, 2.0, 1.0, 2000, &mut substream(62, 0))
            .unwrap();
        let c2 = capacity_stat_eve(&ch, &theta, &omega, 2.0, 1.0, 4000, &mut substream(62, 1))
            .unwrap();
        let ratio = c1.std_error / c2.std_error;
        assert!(ratio > 1.2 && ratio < 1.7, "ratio {ratio}");
    }

    #[test]
    fn stat_both_invariant_to_phases_on_rank_one() {
        let n = 6;
        let ch = rank_one_set(4, n, 63, 1.0, 0.7);
        let a = match &ch.g_mode {
            ApIrsChannel::RankOne { a, .. } => a.clone(),
            _ => unreachable!(),
        };
        let omega = a.normalized().unwrap();
        let (p, sigma2, n_mc) = (2.0, 1.0, 30_000);
        let c1 = capacity_stat_both(&ch, &random_phases(n, 64), &omega, p, sigma2, n_mc,
            &mut substream(65, 0)).unwrap();
        let c2 = capacity_stat_both(&ch, &random_phases(n, 66), &omega, p, sigma2, n_mc,
            &mut substream(65, 1)).unwrap();
        let combined = (c1.std_error.powi(2) + c2.std_error.powi(2)).sqrt();
        assert!(
            (c1.value_bits - c2.value_bits).abs() < 3.0 * combined,
            "{} vs {}",
            c1.value_bits,
            c2.value_bits
        );
    }

    #[test]
    fn stat_both_matches_f1_difference() {
        let n = 5;
        let ch = rank_one_set(4, n, 67, 1.0, 0.25);
        let (a, b) = match &ch.g_mode {
            ApIrsChannel::RankOne { a, b } => (a.clone(), b.clone()),
            _ => unreachable!(),
        };
        let omega = a.normalized().unwrap();
        let (p, sigma2, n_mc) = (4.0, 1.0, 40_000);
        let cap = capacity_stat_both(&ch, &PhaseVector::zeros(n), &omega, p, sigma2, n_mc,
            &mut substream(68, 0)).unwrap();
        let scale = a.norm_sqr() * b.norm_sqr() * p / sigma2;
        let want = f1(ch.alpha_r * ch.sigma2_hr * scale).unwrap()
            - f1(ch.alpha_e * ch.sigma2_he * scale).unwrap();
        assert!(
            (cap.value_bits - want).abs() < 3.0 * cap.std_error,
            "mc {} vs closed form {want}, se {}",
            cap.value_bits,
            cap.std_error
        );
    }

    #[test]
    fn f1_small_argument_slope_is_log2e() {
        let x = 1e-4;
        let ratio = f1(x).unwrap() / x;
        assert!((ratio - LOG2_E).abs() < 1e-3 * LOG2_E, "ratio {ratio}");
    }

    #[test]
    fn f1_reference_values() {
        // frozen: e^(1/x) E1(1/x) log2(e) at x = 0.1, 1, 10
        #[allow(clippy::excessive_precision)]
        let cases = [
            (0.1, 0.13209796780219237770),
            (1.0, 0.86034738227088595119),
            (10.0, 2.9065148084148049847),
        ];
        for (x, want) in cases {
            let got = f1(x).unwrap();
            assert!((got - want).abs() < 1e-13 * want, "F1({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn f1_matches_monte_carlo() {
        for (k, &x) in [0.1f64, 1.0, 10.0].iter().enumerate() {
            let mut rng = substream(70, k as u64);
            let n = 1_000_000usize;
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..n {
                let t: f64 = Exp1.sample(&mut rng);
                let r = (1.0 + x * t).log2();
                sum += r;
                sum_sq += r * r;
            }
            let mean = sum / n as f64;
            let se = (((sum_sq - sum * sum / n as f64) / (n as f64 - 1.0)) / n as f64).sqrt();
            let want = f1(x).unwrap();
            assert!(
                (mean - want).abs() < 3.0 * se,
                "x={x}: mc {mean} vs f1 {want}, se {se}"
            );
        }
    }

    #[test]
    fn f1_increasing_and_concave() {
        let xs: Vec<f64> = (1..200).map(|i| 0.1 * i as f64).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| f1(x).unwrap()).collect();
        for w in vals.windows(2) {
            assert!(w[1] > w[0]);
        }
        for w in vals.windows(3) {
            assert!(w[2] - w[1] < w[1] - w[0], "second difference not decreasing");
        }
    }

    #[test]
    fn f1_rejects_nonpositive() {
        assert!(f1(0.0).is_err());
        assert!(f1(-1.0).is_err());
    }

    #[test]
    fn mc_capacity_dimension_checks() {
        let ch = ChannelSet {
            g_mode: ApIrsChannel::Full { g: ComplexMatrix::identity(3) },
            h_r: ComplexVector::zeros(3),
            h_e: ComplexVector::zeros(2), // wrong length
            alpha_r: 1.0,
            alpha_e: 1.0,
            sigma2_hr: 1.0,
            sigma2_he: 1.0,
        };
        let omega = ComplexVector::basis(3, 0);
        assert!(matches!(
            capacity_full(&ch, &PhaseVector::zeros(3), &omega, 1.0, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
