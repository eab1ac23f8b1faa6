//! Scenario description: every knob a run needs, with defaults matching
//! the reference simulation setup, plus whole-config validation.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelMode, Geometry, PathLossModel};
use crate::error::{Error, Result};
use crate::secrecy::CsiMode;

/// Which phase-shift optimizer a pipeline uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseSolver {
    Sdp,
    Pgd,
}

/// Full description of one experiment. Deserializes from JSON with every
/// field optional; omitted fields take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Transmit antennas at the AP.
    pub m_antennas: usize,
    /// Reflecting elements at the IRS.
    pub n_elements: usize,
    pub geometry: Geometry,
    pub channel_mode: ChannelMode,
    /// Rician factor for the AP-IRS link when channel_mode = Rician.
    pub rician_k: f64,
    /// Receiver noise variance in watts.
    pub sigma2_noise_w: f64,
    pub path_loss: PathLossModel,
    /// IRS-User fading variance per element.
    pub sigma2_hr: f64,
    /// IRS-Eve fading variance per element.
    pub sigma2_he: f64,
    /// Target secrecy rate in bits/s/Hz.
    pub target_rate_bits: f64,
    pub csi_mode: CsiMode,
    pub solver: PhaseSolver,
    /// Gradient-norm stopping threshold for the phase optimizer.
    pub eps: f64,
    pub pgd_max_iters: usize,
    /// Extra projected-gradient starts beyond the aligned one.
    pub pgd_restarts: usize,
    pub sdp_tol: f64,
    pub sdp_max_iters: usize,
    /// Gaussian randomization draws when rounding an SDP solution.
    pub n_draws: usize,
    /// Relative power-change threshold ending the alternating design.
    pub outer_tol: f64,
    pub max_outer_iters: usize,
    /// Monte-Carlo samples for statistical capacity estimates.
    pub n_mc: usize,
    /// Channel draws per sweep point.
    pub n_trials: usize,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            m_antennas: 8,
            n_elements: 8,
            geometry: Geometry::default(),
            channel_mode: ChannelMode::RankOne,
            rician_k: 2.0,
            sigma2_noise_w: 1e-11,
            path_loss: PathLossModel::default(),
            sigma2_hr: 1.0,
            sigma2_he: 1.0,
            target_rate_bits: 8.0,
            csi_mode: CsiMode::FullBoth,
            solver: PhaseSolver::Sdp,
            eps: 1e-4,
            pgd_max_iters: 5000,
            pgd_restarts: 10,
            sdp_tol: 1e-6,
            sdp_max_iters: 20_000,
            n_draws: 200,
            outer_tol: 1e-4,
            max_outer_iters: 50,
            n_mc: 10_000,
            n_trials: 50,
            seed: 1,
        }
    }
}

impl ScenarioConfig {
    /// Check every field, collecting all violations rather than stopping
    /// at the first.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.m_antennas < 1 {
            bad.push("m_antennas must be >= 1".to_string());
        }
        if self.m_antennas > 256 {
            bad.push("m_antennas must be <= 256".to_string());
        }
        if self.n_elements < 1 {
            bad.push("n_elements must be >= 1".to_string());
        }
        if self.n_elements > 64 {
            bad.push("n_elements must be <= 64 (SDP solver cap)".to_string());
        }
        if !self.geometry.all_finite() {
            bad.push("geometry contains non-finite values".to_string());
        }
        if !(self.geometry.d_t_over_lambda > 0.0) {
            bad.push("d_t_over_lambda must be > 0".to_string());
        }
        if !(self.geometry.d_i_over_lambda > 0.0) {
            bad.push("d_i_over_lambda must be > 0".to_string());
        }
        if self.geometry.all_finite() {
            if self.geometry.irs_user_distance() < 1.0 {
                bad.push("user must be at least 1 m from the IRS".to_string());
            }
            if self.geometry.irs_eve_distance() < 1.0 {
                bad.push("eavesdropper must be at least 1 m from the IRS".to_string());
            }
        }
        if !(self.rician_k >= 0.0) || !self.rician_k.is_finite() {
            bad.push("rician_k must be finite and >= 0".to_string());
        }
        if !(self.sigma2_noise_w > 0.0) {
            bad.push("sigma2_noise_w must be > 0".to_string());
        }
        if !(self.path_loss.exponent_reflect >= 2.0) {
            bad.push("path_loss.exponent_reflect must be >= 2".to_string());
        }
        if !self.path_loss.c0_db.is_finite() {
            bad.push("path_loss.c0_db must be finite".to_string());
        }
        if !(self.sigma2_hr > 0.0) {
            bad.push("sigma2_hr must be > 0".to_string());
        }
        if !(self.sigma2_he > 0.0) {
            bad.push("sigma2_he must be > 0".to_string());
        }
        if !(self.target_rate_bits > 0.0) {
            bad.push("target_rate_bits must be > 0".to_string());
        }
        if !(self.eps > 0.0) {
            bad.push("eps must be > 0".to_string());
        }
        if self.pgd_max_iters < 1 {
            bad.push("pgd_max_iters must be >= 1".to_string());
        }
        if !(self.sdp_tol > 0.0) {
            bad.push("sdp_tol must be > 0".to_string());
        }
        if self.sdp_max_iters < 1 {
            bad.push("sdp_max_iters must be >= 1".to_string());
        }
        if !(self.outer_tol > 0.0) {
            bad.push("outer_tol must be > 0".to_string());
        }
        if self.max_outer_iters < 1 {
            bad.push("max_outer_iters must be >= 1".to_string());
        }
        if self.n_mc < 100 {
            bad.push("n_mc must be >= 100".to_string());
        }
        if self.n_trials < 1 {
            bad.push("n_trials must be >= 1".to_string());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(bad))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ScenarioConfig::default().validate().unwrap();
    }

    #[test]
    fn default_values_match_reference_setup() {
        let c = ScenarioConfig::default();
        assert_eq!(c.m_antennas, 8);
        assert_eq!(c.n_elements, 8);
        assert_eq!(c.geometry.ap_pos, [0.0, 0.0, 25.0]);
        assert_eq!(c.geometry.irs_pos, [0.0, 100.0, 40.0]);
        assert_eq!(c.sigma2_noise_w, 1e-11);
        assert_eq!(c.eps, 1e-4);
        assert_eq!(c.rician_k, 2.0);
        assert_eq!(c.geometry.elevation_ap, std::f64::consts::PI / 2.0);
        assert_eq!(c.geometry.elevation_irs, 3.0 * std::f64::consts::PI / 2.0);
    }

    #[test]
    fn zero_antennas_rejected() {
        let c = ScenarioConfig { m_antennas: 0, ..ScenarioConfig::default() };
        let err = c.validate().unwrap_err();
        match err {
            Error::InvalidConfig(v) => {
                assert!(v.iter().any(|s| s.contains("m_antennas")));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn all_violations_listed_together() {
        let c = ScenarioConfig {
            m_antennas: 0,
            target_rate_bits: -1.0,
            sigma2_noise_w: 0.0,
            ..ScenarioConfig::default()
        };
        match c.validate().unwrap_err() {
            Error::InvalidConfig(v) => {
                assert!(v.len() >= 3, "got {v:?}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let c = ScenarioConfig::default();
        let s = serde_json::to_string(&c).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn empty_object_gives_defaults() {
        let c: ScenarioConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, ScenarioConfig::default());
    }

    #[test]
    fn partial_override_keeps_other_defaults() {
        let c: ScenarioConfig =
            serde_json::from_str(r#"{"n_elements": 4, "geometry": {"user_pos": [0.0, 70.0, 1.8]}}"#)
                .unwrap();
        assert_eq!(c.n_elements, 4);
        assert_eq!(c.m_antennas, 8);
        assert_eq!(c.geometry.user_pos, [0.0, 70.0, 1.8]);
        assert_eq!(c.geometry.irs_pos, [0.0, 100.0, 40.0]);
    }

    #[test]
    fn unknown_key_rejected() {
        let r: std::result::Result<ScenarioConfig, _> =
            serde_json::from_str(r#"{"antennas": 8}"#);
        assert!(r.is_err());
    }
}
