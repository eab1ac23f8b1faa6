//! Minimum-power secure transmit design for an IRS-assisted MISO wiretap
//! channel.
//!
//! An access point with `m` antennas serves a single-antenna user while a
//! single-antenna eavesdropper listens; an intelligent reflecting surface
//! with `n` unit-modulus elements sits in the only propagation path. The
//! crate finds the transmit beamformer, the surface phase shifts, and the
//! minimum transmit power that still guarantee a target secrecy rate.
//!
//! Module layout:
//! - [`numkernel`]: complex vectors and matrices, Hermitian eigensolver,
//!   Gaussian sampling, exponential integral.
//! - [`channel`]: geometry, path loss, and channel realizations.
//! - [`secrecy`]: secrecy capacity under full and statistical CSI.
//! - [`beamform`]: transmit beamformer choices and required power.
//! - [`phaseopt`]: phase-shift optimization (projected gradient, SDP
//!   rounding, closed forms).
//! - [`sdpsolver`]: unit-diagonal semidefinite program solver.
//! - [`jointdesign`]: end-to-end design routines and verification.
//! - [`config`]: scenario description and validation.

// Domain guards are written `!(x > 0.0)` on purpose: the negation rejects
// NaN along with the out-of-range values, which `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamform;
pub mod channel;
pub mod config;
pub mod error;
pub mod jointdesign;
pub mod numkernel;
pub mod phaseopt;
pub mod sdpsolver;
pub mod secrecy;

pub use error::{Error, Result};
