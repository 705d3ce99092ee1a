//! Closed-form individual-attack key rates, security thresholds, and the
//! analytic optimal-purification formula.
//!
//! All rates are reverse-reconciliation lower bounds in bits per channel
//! use, `I = (1/2) log2(V_B|E / V_B|A)`. Negative rates are returned as-is
//! so threshold finders can bisect sign changes.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub(crate) const LN_4_INV: f64 = 0.721_347_520_444_481_7; // 1/ln 4

/// Trusted-station and channel parameters in shot-noise units.
///
/// `v` is the source variance `V = 1 + σ` with modulation variance `σ`;
/// `dv` the preparation noise `ΔV`; `t` the sender-side purifying
/// attenuation; `chi` the trusted detection noise; `eta` the channel
/// transmittivity; `eps` the untrusted channel excess noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub v: f64,
    pub dv: f64,
    pub t: f64,
    pub chi: f64,
    pub eta: f64,
    pub eps: f64,
}

impl ProtocolParams {
    /// Noise-free baseline: unit source variance, no attenuation, lossless
    /// placeholder channel. Override fields as needed.
    pub fn ideal() -> Self {
        Self {
            v: 1.0,
            dv: 0.0,
            t: 1.0,
            chi: 0.0,
            eta: 1.0,
            eps: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "v",
                value: self.v,
                constraint: "V >= 1",
            });
        }
        if !(self.dv >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "dv",
                value: self.dv,
                constraint: "dV >= 0",
            });
        }
        if !(self.t > 0.0 && self.t <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "t",
                value: self.t,
                constraint: "0 < T <= 1",
            });
        }
        if !(self.chi >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "chi",
                value: self.chi,
                constraint: "chi >= 0",
            });
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: self.eta,
                constraint: "0 < eta <= 1",
            });
        }
        if !(self.eps >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: self.eps,
                constraint: "eps >= 0",
            });
        }
        Ok(())
    }
}

/// Eavesdropping model a bound is computed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attack {
    Individual,
    Collective,
}

/// A key-rate lower bound with its two information terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateResult {
    /// Alice-Bob Shannon mutual information (bits/symbol).
    pub i_ab: f64,
    /// Eve's information on Bob: `I_BE` (individual) or `chi_BE` (collective).
    pub eve_info: f64,
    /// Net lower bound `i_ab - eve_info`, not floored at zero.
    pub rate: f64,
    pub attack: Attack,
    pub params: ProtocolParams,
}

/// Signal variance entering the channel after modulator noise and
/// attenuation: `1 + T (V + dV - 1)`.
pub(crate) fn attenuated_variance(v: f64, dv: f64, t: f64) -> f64 {
    1.0 + t * (v + dv - 1.0)
}

/// Individual-attack rate for a pure-loss channel with trusted detection
/// noise `chi` (requires `eps = 0`).
///
/// `I = ½ log2[(1+Tu)/(1+Tu(1-η)) + χ] − ½ log2(1 + Tη dV + χ)` with
/// `u = V + dV − 1`; the log arguments are the conditional variances
/// `V_B|E` and `V_B|A` of Bob's data given Eve's and Alice's measurements.
pub fn individual_rate_detection(p: &ProtocolParams) -> Result<KeyRateResult> {
    p.validate()?;
    if p.eps != 0.0 {
        return Err(Error::MixedNoiseUnsupported {
            chi: p.chi,
            eps: p.eps,
        });
    }
    let u = p.v + p.dv - 1.0;
    let v_be = (1.0 + p.t * u) / (1.0 + p.t * u * (1.0 - p.eta)) + p.chi;
    let v_bam = 1.0 + p.t * p.eta * p.dv + p.chi;
    let rate = 0.5 * v_be.log2() - 0.5 * v_bam.log2();
    let v_b = p.eta * attenuated_variance(p.v, p.dv, p.t) + 1.0 - p.eta + p.chi;
    let i_ab = 0.5 * (v_b / v_bam).log2();
    let i_be = 0.5 * (v_b / v_be).log2();
    Ok(KeyRateResult {
        i_ab,
        eve_info: i_be,
        rate,
        attack: Attack::Individual,
        params: *p,
    })
}

/// Individual-attack rate against the entangling-cloner attack on a channel
/// with excess noise `eps` (requires `chi = 0`).
pub fn individual_rate_channel(p: &ProtocolParams) -> Result<KeyRateResult> {
    p.validate()?;
    if p.chi != 0.0 {
        return Err(Error::MixedNoiseUnsupported {
            chi: p.chi,
            eps: p.eps,
        });
    }
    let w = attenuated_variance(p.v, p.dv, p.t);
    let v_be = 1.0 / (p.eta * (1.0 / w - 1.0 + p.eps) + 1.0);
    let v_bam = 1.0 + p.t * p.eta * p.dv + p.eta * p.eps;
    let rate = 0.5 * v_be.log2() - 0.5 * v_bam.log2();
    let v_b = p.eta * w + 1.0 - p.eta + p.eta * p.eps;
    let i_ab = 0.5 * (v_b / v_bam).log2();
    let i_be = 0.5 * (v_b / v_be).log2();
    Ok(KeyRateResult {
        i_ab,
        eve_info: i_be,
        rate,
        attack: Attack::Individual,
        params: *p,
    })
}

/// Preparation-noise threshold for the unpurified (`T = 1`) individual rate
/// over a pure-loss channel; independent of the detection noise.
///
/// Solves `dV² + (V−1) dV − (V−1)/(1−η) = 0`, evaluated as
/// `dV_max = 2/((1−η)(1 + sqrt(1 + 4/((1−η)(V−1)))))` so the large-`V`
/// form is exact and tends to `1/(1−η)`.
pub fn dv_threshold_individual(v: f64, eta: f64) -> Result<f64> {
    if !(v >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "v",
            value: v,
            constraint: "V >= 1",
        });
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: eta,
            constraint: "0 < eta < 1",
        });
    }
    if v == 1.0 {
        return Ok(0.0);
    }
    let x = v - 1.0;
    let a = 4.0 / (1.0 - eta);
    // 0.5 (sqrt(x(x+a)) - x) without cancellation at large x
    Ok(0.5 * a / (1.0 + (1.0 + a / x).sqrt()))
}

/// Preparation-noise threshold in the infinite-modulation limit under
/// attenuation `T`: `1/(T(1−η))` for a pure-loss channel, and
/// `(1−ε)/(T(1−η+ηε)) − ε/T` with channel excess noise.
pub fn dv_threshold_inf_v(t: f64, eta: f64, eps: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            constraint: "0 < T <= 1",
        });
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: eta,
            constraint: "0 < eta < 1",
        });
    }
    if eps >= 1.0 {
        return Err(Error::InvalidParameter {
            name: "eps",
            value: eps,
            constraint: "eps < 1 for a positive threshold",
        });
    }
    Ok((1.0 - eps) / (t * (1.0 - eta + eta * eps)) - eps / t)
}

/// Optimal purifying attenuation maximizing the individual channel-noise
/// rate, clamped to `(0, 1]`; raw values above 1 mean no attenuation helps.
///
/// `T_opt = [sqrt(((V+dV−1)(ηε+1) − η dV)/(dV(ηε+1−η))) − 1]/(V+dV−1)`.
pub fn t_opt_analytic(v: f64, dv: f64, eta: f64, eps: f64) -> Result<f64> {
    if !(v >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "v",
            value: v,
            constraint: "V >= 1",
        });
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: eta,
            constraint: "0 < eta < 1",
        });
    }
    if !(dv > 0.0) {
        // singular at dV = 0, where attenuation only hurts
        return Ok(1.0);
    }
    let u = v + dv - 1.0;
    let radicand = (u * (eta * eps + 1.0) - eta * dv) / (dv * (eta * eps + 1.0 - eta));
    if radicand <= 0.0 {
        return Err(Error::NoPurificationGain { radicand });
    }
    let t = (radicand.sqrt() - 1.0) / u;
    Ok(t.clamp(f64::MIN_POSITIVE, 1.0))
}

/// Slope of the key rate in the attenuation at `T = 0`:
/// `(1/ln 4) η (V−1)/(1 + noise)`, with `noise` the additive receiver-side
/// noise (`χ` for a trusted detector, `ηε` for channel excess noise).
pub fn didt_at_zero(v: f64, eta: f64, noise: f64) -> f64 {
    LN_4_INV * eta * (v - 1.0) / (1.0 + noise)
}

/// Eve's entangling-cloner source variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloneParams {
    pub n: f64,
}

impl CloneParams {
    /// The variance emulating a channel of transmittivity `eta` and excess
    /// noise `eps`: `N = 1 + ηε/(1−η)`.
    pub fn from_channel(eta: f64, eps: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: eta,
                constraint: "0 < eta < 1",
            });
        }
        if !(eps >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: eps,
                constraint: "eps >= 0",
            });
        }
        Ok(Self {
            n: 1.0 + eta * eps / (1.0 - eta),
        })
    }
}

/// Transmittivity bound from the optimal-purification condition `T_opt < 1`
/// with Eve's cloner variance `N` held fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaBound {
    /// Raw value of `1/(1 + (V−1)/(N(1 − V − dV + dV (V+dV)²)))`.
    pub value: f64,
    /// True when the raw value lies in `(0, 1)` and actually restricts `η`.
    pub restricted: bool,
}

/// Channel-transmittivity region in which purification (`T_opt < 1`) applies
/// for the given noise levels: `η < 1/(1 + (V−1)/(N·Q))` with
/// `Q = 1 − V − dV + dV (V+dV)²`.
///
/// A vanishing `Q` makes the bound vacuous (reported unrestricted), as does
/// any raw value outside `(0, 1)`.
pub fn eta_bound(v: f64, dv: f64, n: f64) -> Result<EtaBound> {
    if !(v > 1.0) {
        return Err(Error::InvalidParameter {
            name: "v",
            value: v,
            constraint: "V > 1",
        });
    }
    if !(n >= 1.0) {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n,
            constraint: "N >= 1",
        });
    }
    let q = 1.0 - v - dv + dv * (v + dv) * (v + dv);
    if q == 0.0 {
        return Ok(EtaBound {
            value: 1.0,
            restricted: false,
        });
    }
    let value = 1.0 / (1.0 + (v - 1.0) / (n * q));
    Ok(EtaBound {
        value,
        restricted: value > 0.0 && value < 1.0,
    })
}

/// Infinite-modulation rate ceiling reached by optimal purification:
/// `½ log2[(1+χ(1−η))/((1+χ)(1−η))]` for a pure-loss channel with trusted
/// detection noise, `½ log2[1/(ηε+1−η)] − ½ log2(1+ηε)` with channel noise.
pub fn rate_inf_v_optimal(eta: f64, chi: f64, eps: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: eta,
            constraint: "0 < eta < 1",
        });
    }
    if chi != 0.0 && eps != 0.0 {
        return Err(Error::MixedNoiseUnsupported { chi, eps });
    }
    if eps > 0.0 {
        Ok(0.5 * (1.0 / (eta * eps + 1.0 - eta)).log2() - 0.5 * (1.0 + eta * eps).log2())
    } else {
        Ok(0.5 * ((1.0 + chi * (1.0 - eta)) / ((1.0 + chi) * (1.0 - eta))).log2())
    }
}
