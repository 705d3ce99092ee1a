//! Canned sweep presets producing the data behind the standard plots of
//! the analysis: trusted-noise maps, optimal-purification maps, tolerable
//! channel noise, security regions, and reconciliation thresholds.
//!
//! Fixed parameters follow the corresponding plot captions; grid ranges
//! and the default 41-point resolution are presentation choices.

use std::collections::BTreeMap;

use crate::analytic::Attack;
use crate::collective::HolevoMethod;
use crate::sweep::{AxisSpec, Quantity, Scale, SweepSpec};
use crate::{Error, Result};

pub const PRESET_NAMES: &[&str] = &[
    "fig2", "fig3", "fig4", "fig5a", "fig5b", "fig6", "fig7", "fig8",
];

/// Default per-axis resolution of the figure grids.
pub const DEFAULT_STEPS: usize = 41;

fn axis(name: &str, min: f64, max: f64, steps: usize, scale: Scale) -> AxisSpec {
    AxisSpec {
        name: name.into(),
        min,
        max,
        steps,
        scale,
    }
}

fn fixed(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Build the sweep spec for a named figure preset with the given per-axis
/// resolution (`None` for the default 41).
pub fn figure_preset(name: &str, steps: Option<usize>) -> Result<SweepSpec> {
    let n = steps.unwrap_or(DEFAULT_STEPS);
    let base = SweepSpec {
        quantity: Quantity::CollectiveRate,
        fixed: BTreeMap::new(),
        axes: vec![],
        attack: Some(Attack::Collective),
        method: None,
        optimize_t: false,
        tn: None,
        cap: None,
        output: None,
    };
    let spec = match name {
        // Unpurified collective rate against trusted detection and
        // preparation noise; V = 20, eta = 0.01.
        "fig2" => SweepSpec {
            quantity: Quantity::CollectiveRate,
            fixed: fixed(&[("v", 20.0), ("eta", 0.01), ("t", 1.0), ("eps", 0.0)]),
            axes: vec![
                axis("chi", 0.0, 1.0, n, Scale::Linear),
                axis("dv", 0.0, 3.0, n, Scale::Linear),
            ],
            method: Some(HolevoMethod::Direct),
            ..base
        },
        // Same map with the attenuation optimized at every grid point.
        "fig3" => SweepSpec {
            quantity: Quantity::CollectiveRate,
            fixed: fixed(&[("v", 20.0), ("eta", 0.01), ("eps", 0.0)]),
            axes: vec![
                axis("chi", 0.0, 1.0, n, Scale::Linear),
                axis("dv", 0.0, 12.0, n, Scale::Linear),
            ],
            method: Some(HolevoMethod::Direct),
            optimize_t: true,
            ..base
        },
        // Maximal tolerable channel excess noise versus preparation noise,
        // eta = 0.01; V axis carries the two caption variances {10, 1e5}.
        "fig4" => SweepSpec {
            quantity: Quantity::EpsMax,
            fixed: fixed(&[("eta", 0.01)]),
            axes: vec![
                axis("v", 10.0, 1e5, 2, Scale::Log),
                axis("dv", 0.0, 4.0, n, Scale::Linear),
            ],
            ..base
        },
        // Maximal key rate over (eps, dv); V = 10 / V = 100, eta = 0.01.
        "fig5a" => SweepSpec {
            quantity: Quantity::CollectiveRate,
            fixed: fixed(&[("v", 10.0), ("eta", 0.01)]),
            axes: vec![
                axis("eps", 0.0, 0.1, n, Scale::Linear),
                axis("dv", 0.0, 12.0, n, Scale::Linear),
            ],
            optimize_t: true,
            ..base
        },
        "fig5b" => SweepSpec {
            quantity: Quantity::CollectiveRate,
            fixed: fixed(&[("v", 100.0), ("eta", 0.01)]),
            axes: vec![
                axis("eps", 0.0, 0.1, n, Scale::Linear),
                axis("dv", 0.0, 12.0, n, Scale::Linear),
            ],
            optimize_t: true,
            ..base
        },
        // Security region: purified dv threshold over (eta, eps), V = 100.
        "fig6" => SweepSpec {
            quantity: Quantity::DvMax,
            fixed: fixed(&[("v", 100.0)]),
            axes: vec![
                axis("eta", 0.01, 0.1, n, Scale::Linear),
                axis("eps", 0.01, 0.1, n, Scale::Linear),
            ],
            ..base
        },
        // Reconciliation threshold without purification (T = 1), eta = 0.1,
        // any source variance (eliminated through the SNR).
        "fig7" => SweepSpec {
            quantity: Quantity::DvMax,
            fixed: fixed(&[("eta", 0.1)]),
            axes: vec![
                axis("beta", 0.8, 1.0, n, Scale::Linear),
                axis("snr", 0.1, 10.0, n, Scale::Log),
            ],
            cap: Some(10.0),
            ..base
        },
        // Reconciliation threshold with the attenuation pinned by the SNR;
        // V = 20, eta = 0.1; values capped at 10 for plotting.
        "fig8" => SweepSpec {
            quantity: Quantity::DvMax,
            fixed: fixed(&[("eta", 0.1), ("v", 20.0)]),
            axes: vec![
                axis("beta", 0.8, 1.0, n, Scale::Linear),
                axis("snr", 0.05, 1.5, n, Scale::Log),
            ],
            cap: Some(10.0),
            ..base
        },
        _ => {
            return Err(Error::UnknownPreset {
                name: name.into(),
                valid: "fig2, fig3, fig4, fig5a, fig5b, fig6, fig7, fig8",
            })
        }
    };
    Ok(spec)
}
