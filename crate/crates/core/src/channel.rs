//! Channel construction: uniform-linear-array steering vectors, the AP-IRS
//! link in rank-one or Rician form, reflect-path gains, and fading draws
//! for the IRS-User and IRS-Eve links.
//!
//! The AP-User and AP-Eve direct links are blocked by assumption, so every
//! signal path goes through the surface.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::numkernel::{sample_cn, ComplexMatrix, ComplexVector};

use std::f64::consts::{PI, TAU};

/// Placement and array orientation of every terminal.
///
/// Angles are line-of-sight angles of departure; spacings are the
/// element separations in carrier wavelengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    pub ap_pos: [f64; 3],
    pub irs_pos: [f64; 3],
    pub user_pos: [f64; 3],
    pub eve_pos: [f64; 3],
    pub d_t_over_lambda: f64,
    pub d_i_over_lambda: f64,
    pub azimuth_ap: f64,
    pub elevation_ap: f64,
    pub azimuth_irs: f64,
    pub elevation_irs: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry {
            ap_pos: [0.0, 0.0, 25.0],
            irs_pos: [0.0, 100.0, 40.0],
            user_pos: [0.0, 90.0, 1.8],
            eve_pos: [0.0, 120.0, 1.8],
            d_t_over_lambda: 0.5,
            d_i_over_lambda: 0.5,
            azimuth_ap: PI / 2.0,
            elevation_ap: PI / 2.0,
            azimuth_irs: PI / 2.0,
            elevation_irs: 3.0 * PI / 2.0,
        }
    }
}

impl Geometry {
    /// Elevation angle of the AP-IRS ray from the AP's perspective:
    /// atan of ground offset over height offset. Provided for configs
    /// that tie the AoD to the placement instead of using a fixed value.
    pub fn ap_irs_elevation(&self) -> f64 {
        (self.irs_pos[1] - self.ap_pos[1]).atan2(self.irs_pos[2] - self.ap_pos[2])
    }

    pub fn irs_user_distance(&self) -> f64 {
        dist(self.irs_pos, self.user_pos)
    }

    pub fn irs_eve_distance(&self) -> f64 {
        dist(self.irs_pos, self.eve_pos)
    }

    pub fn all_finite(&self) -> bool {
        self.ap_pos
            .iter()
            .chain(&self.irs_pos)
            .chain(&self.user_pos)
            .chain(&self.eve_pos)
            .all(|x| x.is_finite())
            && [
                self.d_t_over_lambda,
                self.d_i_over_lambda,
                self.azimuth_ap,
                self.elevation_ap,
                self.azimuth_irs,
                self.elevation_irs,
            ]
            .iter()
            .all(|x| x.is_finite())
    }
}

fn dist(p: [f64; 3], q: [f64; 3]) -> f64 {
    p.iter()
        .zip(&q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Distance-power-law attenuation for one reflect link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathLossModel {
    /// Reference gain at 1 m, in dB.
    pub c0_db: f64,
    /// Power-law exponent; 2 is free space, reflect links sit near 3.
    pub exponent_reflect: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        PathLossModel { c0_db: -30.0, exponent_reflect: 3.0 }
    }
}

/// How the AP-IRS link is modeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelMode {
    /// Pure line of sight, G = a b^H.
    RankOne,
    /// Rician mixture of the LoS dyad and Rayleigh scatter.
    Rician,
}

/// The AP-IRS link, either as its rank-one factors or as a full matrix.
#[derive(Debug, Clone)]
pub enum ApIrsChannel {
    RankOne { a: ComplexVector, b: ComplexVector },
    Full { g: ComplexMatrix },
}

impl ApIrsChannel {
    pub fn m_antennas(&self) -> usize {
        match self {
            ApIrsChannel::RankOne { a, .. } => a.len(),
            ApIrsChannel::Full { g } => g.rows,
        }
    }

    pub fn n_elements(&self) -> usize {
        match self {
            ApIrsChannel::RankOne { b, .. } => b.len(),
            ApIrsChannel::Full { g } => g.cols,
        }
    }

    /// Materialize G as an M x N matrix.
    pub fn as_matrix(&self) -> ComplexMatrix {
        match self {
            ApIrsChannel::RankOne { a, b } => a.outer(b),
            ApIrsChannel::Full { g } => g.clone(),
        }
    }
}

/// One channel realization plus the static link budget around it.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    pub g_mode: ApIrsChannel,
    /// IRS-User small-scale fading, length N.
    pub h_r: ComplexVector,
    /// IRS-Eve small-scale fading, length N.
    pub h_e: ComplexVector,
    /// Linear reflect-path gain toward the user.
    pub alpha_r: f64,
    /// Linear reflect-path gain toward the eavesdropper.
    pub alpha_e: f64,
    pub sigma2_hr: f64,
    pub sigma2_he: f64,
}

impl ChannelSet {
    pub fn m_antennas(&self) -> usize {
        self.g_mode.m_antennas()
    }

    pub fn n_elements(&self) -> usize {
        self.g_mode.n_elements()
    }

    pub fn check_dimensions(&self) -> Result<()> {
        let n = self.g_mode.n_elements();
        if self.h_r.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.h_r.len() });
        }
        if self.h_e.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.h_e.len() });
        }
        if self.alpha_r < 0.0 || self.alpha_e < 0.0 {
            return Err(Error::DomainError("path gains must be nonnegative"));
        }
        Ok(())
    }
}

/// Uniform-linear-array steering vector: entry m (0-based) is
/// exp(j 2 pi ratio m sin(azimuth) sin(elevation)).
pub fn steering_vector(
    n_elems: usize,
    spacing_ratio: f64,
    azimuth: f64,
    elevation: f64,
) -> ComplexVector {
    debug_assert!(n_elems >= 1);
    let step = TAU * spacing_ratio * azimuth.sin() * elevation.sin();
    ComplexVector::from_fn(n_elems, |m| Complex64::from_polar(1.0, step * m as f64))
}

/// Line-of-sight AP-IRS factors: a is the AP steering vector (length M),
/// b the IRS steering vector (length N); G = a b^H.
pub fn make_rank_one_g(
    geom: &Geometry,
    m_antennas: usize,
    n_elements: usize,
) -> (ComplexVector, ComplexVector) {
    let a = steering_vector(m_antennas, geom.d_t_over_lambda, geom.azimuth_ap, geom.elevation_ap);
    let b = steering_vector(n_elements, geom.d_i_over_lambda, geom.azimuth_irs, geom.elevation_irs);
    (a, b)
}

/// Rician AP-IRS matrix: sqrt(K/(1+K)) a b^H + sqrt(1/(1+K)) G_scatter,
/// scatter entries iid CN(0,1).
pub fn make_rician_g(
    geom: &Geometry,
    m_antennas: usize,
    n_elements: usize,
    k_factor: f64,
    rng: &mut impl Rng,
) -> Result<ComplexMatrix> {
    if !(k_factor >= 0.0) {
        return Err(Error::DomainError("Rician factor must be >= 0"));
    }
    let (a, b) = make_rank_one_g(geom, m_antennas, n_elements);
    let los = a.outer(&b);
    let scatter_raw = sample_cn(m_antennas * n_elements, 1.0, rng)?;
    let scatter =
        ComplexMatrix::from_fn(m_antennas, n_elements, |i, j| scatter_raw.entries[i * n_elements + j]);
    let w_los = (k_factor / (1.0 + k_factor)).sqrt();
    let w_nlos = (1.0 / (1.0 + k_factor)).sqrt();
    Ok(los.scale_real(w_los).add(&scatter.scale_real(w_nlos)))
}

/// Linear power gain 10^(c0_db/10) * d^(-exponent); rejects d < 1 m where
/// the reference model is meaningless.
pub fn path_gain(model: &PathLossModel, distance_m: f64) -> Result<f64> {
    if !(distance_m >= 1.0) {
        return Err(Error::DomainError("path_gain requires distance >= 1 m"));
    }
    Ok(10f64.powf(model.c0_db / 10.0) * distance_m.powf(-model.exponent_reflect))
}

/// Draw one full channel realization for a scenario. Draw order is fixed
/// (h_r, h_e, then scatter) so a given rng state maps to one ChannelSet.
pub fn sample_channels(cfg: &ScenarioConfig, rng: &mut impl Rng) -> Result<ChannelSet> {
    cfg.validate()?;
    let geom = &cfg.geometry;
    let n = cfg.n_elements;
    let h_r = sample_cn(n, cfg.sigma2_hr, rng)?;
    let h_e = sample_cn(n, cfg.sigma2_he, rng)?;
    let g_mode = match cfg.channel_mode {
        ChannelMode::RankOne => {
            let (a, b) = make_rank_one_g(geom, cfg.m_antennas, n);
            ApIrsChannel::RankOne { a, b }
        }
        ChannelMode::Rician => ApIrsChannel::Full {
            g: make_rician_g(geom, cfg.m_antennas, n, cfg.rician_k, rng)?,
        },
    };
    let alpha_r = path_gain(&cfg.path_loss, geom.irs_user_distance())?;
    let alpha_e = path_gain(&cfg.path_loss, geom.irs_eve_distance())?;
    Ok(ChannelSet {
        g_mode,
        h_r,
        h_e,
        alpha_r,
        alpha_e,
        sigma2_hr: cfg.sigma2_hr,
        sigma2_he: cfg.sigma2_he,
    })
}
