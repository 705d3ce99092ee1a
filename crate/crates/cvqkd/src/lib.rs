//! Security analysis of continuous-variable quantum key distribution with
//! noisy coherent states.
//!
//! A coherent-state CV-QKD link is modelled by a handful of variances in
//! shot-noise units: source variance `V = 1 + σ` (modulation σ), trusted
//! preparation noise `ΔV` from the imperfect modulator, a sender-side
//! purifying attenuator `T`, a lossy channel with transmittivity `η` and
//! untrusted excess noise `ε`, and trusted detection noise `χ` at the
//! receiver. The crate computes lower bounds on the reverse-reconciliation
//! secret-key rate against individual and collective Gaussian attacks,
//! locates security thresholds, optimizes the purifying attenuation, and
//! folds in realistic reconciliation efficiency.
//!
//! Layered as:
//!
//! - [`gaussian`] — covariance matrices and symplectic operations (sources,
//!   couplers, loss, homodyne conditioning, von Neumann entropy);
//! - [`analytic`] — closed-form individual-attack rates, noise thresholds,
//!   and the optimal-attenuation formula;
//! - [`collective`] — Holevo bounds by the direct eavesdropper-mode method,
//!   the five-mode purification method, and the entangling-cloner method;
//! - [`optimize`] — golden-section maximization and bisection threshold
//!   finders, security-region and maximal-rate surfaces;
//! - [`recon`] — reconciliation-efficiency discounting and SNR-constrained
//!   thresholds;
//! - [`sweep`], [`figures`], [`validate`] — grid sweeps, canned figure
//!   presets, and cross-method validation suites behind the `cvqkd` binary.
//!
//! All quantities are in bits per channel use (base-2 logarithms) and
//! shot-noise units (vacuum quadrature variance 1). Every function here is a
//! pure function of its inputs; results are deterministic and independent of
//! thread count.
//!
//! ```
//! use cvqkd::analytic::{self, ProtocolParams};
//!
//! // Pure coherent states through a 3 dB channel: ½ log2(1/(1-η)) ceiling.
//! let p = ProtocolParams { v: 1e9, eta: 0.5, ..ProtocolParams::ideal() };
//! let r = analytic::individual_rate_detection(&p).unwrap();
//! assert!((r.rate - 0.5).abs() < 1e-6);
//! ```

pub mod analytic;
pub mod cli;
pub mod collective;
pub mod figures;
pub mod gaussian;
pub mod optimize;
pub mod recon;
pub mod sweep;
pub mod validate;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} violates {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("covariance matrix is not symmetric (max asymmetry {max_asymmetry:.3e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("covariance matrix must be square with even dimension, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },

    #[error("mode index {mode} out of range for {n_modes}-mode state")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("operation requires two distinct modes")]
    DistinctModesRequired,

    #[error("measured quadrature variance {variance:.3e} is degenerate")]
    DegenerateMeasurement { variance: f64 },

    #[error("direct Holevo method requires a pure-loss channel (eps = 0), got eps = {eps}")]
    DirectMethodNeedsPureLoss { eps: f64 },

    #[error("individual-attack rate supports either detection noise or channel noise, not both (chi = {chi}, eps = {eps})")]
    MixedNoiseUnsupported { chi: f64, eps: f64 },

    #[error("attenuation cannot improve the rate here (radicand {radicand:.3e} <= 0)")]
    NoPurificationGain { radicand: f64 },

    #[error("noise-source model (tn = {tn}, dv0 = {dv0}) does not reproduce dv = {dv}")]
    InconsistentPurification { tn: f64, dv0: f64, dv: f64 },

    #[error("SNR {snr} is infeasible here (would need T > 1; max achievable {max:.6})")]
    InfeasibleSnr { snr: f64, max: f64 },

    #[error("SNR {snr} outside beta-table range [{lo}, {hi}]")]
    BetaTableRange { snr: f64, lo: f64, hi: f64 },

    #[error("invalid beta table: {0}")]
    BetaTable(String),

    #[error("unknown figure preset `{name}`; valid: {valid}")]
    UnknownPreset { name: String, valid: &'static str },

    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use analytic::{Attack, KeyRateResult, ProtocolParams};
pub use gaussian::{CovarianceMatrix, Quadrature, SymplecticSpectrum};
