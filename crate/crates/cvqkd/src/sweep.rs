//! Deterministic parameter sweeps with CSV output.
//!
//! A [`SweepSpec`] names a quantity, fixes some parameters, and sweeps one
//! to three axes over linear or logarithmic grids. Records come out in
//! row-major grid order regardless of how many worker threads evaluate
//! them, so identical specs produce byte-identical CSV.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{
    individual_rate_channel, individual_rate_detection, t_opt_analytic, Attack, ProtocolParams,
};
use crate::collective::{collective_rate_with, HolevoMethod};
use crate::optimize::{dv_max, eps_max, maximize_rate_over_t, Threshold, ThresholdConfig};
use crate::recon::{
    dv_max_purified, dv_max_unpurified, effective_rate_purified, effective_rate_unpurified, snr,
    BetaTable,
};
use crate::{Error, Result};

/// What a sweep computes at every grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    IndividualRate,
    CollectiveRate,
    Holevo,
    DvMax,
    EpsMax,
    TOpt,
    SnrSurface,
    IEff,
}

/// Grid spacing of one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

/// One swept parameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisSpec {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    #[serde(default = "default_scale")]
    pub scale: Scale,
}

fn default_scale() -> Scale {
    Scale::Linear
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Linear => self.min + f * (self.max - self.min),
                    Scale::Log => (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

const AXIS_NAMES: &[&str] = &["v", "dv", "t", "chi", "eta", "eps", "beta", "snr"];

/// Full description of a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub quantity: Quantity,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    pub axes: Vec<AxisSpec>,
    /// Attack model for rate quantities (default collective).
    #[serde(default)]
    pub attack: Option<Attack>,
    /// Holevo construction for collective quantities.
    #[serde(default)]
    pub method: Option<HolevoMethod>,
    /// Maximize each point over the attenuation.
    #[serde(default)]
    pub optimize_t: bool,
    /// Noise-coupling transmittance knob for the purification method.
    #[serde(default)]
    pub tn: Option<f64>,
    /// Cap applied to the extra `*_capped` column of threshold sweeps.
    #[serde(default)]
    pub cap: Option<f64>,
    /// Output path (stdout when absent).
    #[serde(default)]
    pub output: Option<std::path::PathBuf>,
}

/// One output row: the axis coordinates plus named output columns.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub coords: Vec<f64>,
    /// Column values; `None` marks an infeasible cell (empty CSV field).
    pub outputs: Vec<Option<f64>>,
}

/// A finished sweep: column names plus records in grid order.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis_names: Vec<String>,
    pub output_names: Vec<String>,
    pub records: Vec<SweepRecord>,
}

#[derive(Debug, Clone, Copy)]
struct Point {
    v: f64,
    dv: f64,
    t: f64,
    chi: f64,
    eta: f64,
    eps: f64,
    beta: f64,
    snr: f64,
}

struct ResolvedSpec {
    spec: SweepSpec,
    grids: Vec<Vec<f64>>,
}

impl SweepSpec {
    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn has_param(&self, name: &str) -> bool {
        self.fixed.contains_key(name) || self.axes.iter().any(|a| a.name == name)
    }

    fn validate(&self) -> Result<ResolvedSpec> {
        if self.axes.is_empty() || self.axes.len() > 3 {
            return Err(Error::InvalidSpec(format!(
                "need 1..=3 axes, got {}",
                self.axes.len()
            )));
        }
        for a in &self.axes {
            if !AXIS_NAMES.contains(&a.name.as_str()) {
                return Err(Error::InvalidSpec(format!(
                    "unknown axis `{}`; valid: {}",
                    a.name,
                    AXIS_NAMES.join(", ")
                )));
            }
            if a.steps < 2 {
                return Err(Error::InvalidSpec(format!(
                    "axis `{}` needs steps >= 2",
                    a.name
                )));
            }
            if !(a.min.is_finite() && a.max.is_finite() && a.min < a.max) {
                return Err(Error::InvalidSpec(format!(
                    "axis `{}` needs finite min < max",
                    a.name
                )));
            }
            if a.scale == Scale::Log && a.min <= 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "axis `{}`: log scale needs min > 0",
                    a.name
                )));
            }
            if self.fixed.contains_key(&a.name) {
                return Err(Error::InvalidSpec(format!(
                    "`{}` is both fixed and an axis",
                    a.name
                )));
            }
        }
        for name in self.fixed.keys() {
            if !AXIS_NAMES.contains(&name.as_str()) {
                return Err(Error::InvalidSpec(format!(
                    "unknown fixed parameter `{name}`"
                )));
            }
        }
        let mut names: Vec<&str> = self.axes.iter().map(|a| a.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != self.axes.len() {
            return Err(Error::InvalidSpec("duplicate axis names".into()));
        }
        // required parameters
        let recon_mode = self.has_param("snr") || self.has_param("beta");
        let mut required: Vec<&str> = vec!["eta"];
        match self.quantity {
            Quantity::IEff => required.extend(["beta", "snr"]),
            Quantity::DvMax if recon_mode => required.extend(["beta", "snr"]),
            Quantity::SnrSurface => required.push("v"),
            _ => required.push("v"),
        }
        for r in required {
            if !self.has_param(r) {
                return Err(Error::InvalidSpec(format!(
                    "required parameter `{r}` is neither fixed nor an axis"
                )));
            }
        }
        let grids = self.axes.iter().map(|a| a.values()).collect();
        Ok(ResolvedSpec {
            spec: self.clone(),
            grids,
        })
    }
}

fn output_columns(spec: &SweepSpec) -> Vec<String> {
    let recon_mode = spec.has_param("snr") || spec.has_param("beta");
    match spec.quantity {
        Quantity::IndividualRate | Quantity::CollectiveRate => {
            let mut cols = vec!["rate".into(), "i_ab".into(), "eve_info".into()];
            if spec.optimize_t {
                cols.push("t_star".into());
                cols.push("rate_clipped".into());
            }
            cols
        }
        Quantity::Holevo => vec!["chi_be".into()],
        Quantity::DvMax if recon_mode => vec![
            "dv_max".into(),
            "dv_max_capped".into(),
            "converged".into(),
        ],
        Quantity::DvMax => vec![
            "dv_max_t1".into(),
            "dv_max_topt".into(),
            "dv_max_topt_db".into(),
            "converged".into(),
        ],
        Quantity::EpsMax => vec![
            "eps_max_t1".into(),
            "eps_max_topt".into(),
            "converged".into(),
        ],
        Quantity::TOpt => vec!["t_opt".into()],
        Quantity::SnrSurface => vec!["snr".into()],
        Quantity::IEff => vec!["i_eff_t1".into(), "i_eff_purified".into()],
    }
}

fn eval_point(spec: &SweepSpec, pt: &Point) -> Result<Vec<Option<f64>>> {
    let cfg = ThresholdConfig::default();
    let recon_mode = spec.has_param("snr") || spec.has_param("beta");
    let params = ProtocolParams {
        v: pt.v,
        dv: pt.dv,
        t: pt.t,
        chi: pt.chi,
        eta: pt.eta,
        eps: pt.eps,
    };
    let attack = spec.attack.unwrap_or(Attack::Collective);
    let rate_with = |t: f64| -> Result<crate::KeyRateResult> {
        let p = ProtocolParams { t, ..params };
        match spec.quantity {
            Quantity::IndividualRate => {
                if p.eps > 0.0 {
                    individual_rate_channel(&p)
                } else {
                    individual_rate_detection(&p)
                }
            }
            _ => {
                let method = spec.method.unwrap_or(if p.eps > 0.0 {
                    HolevoMethod::Cloner
                } else {
                    HolevoMethod::Direct
                });
                collective_rate_with(&p, method, spec.tn)
            }
        }
    };
    match spec.quantity {
        Quantity::IndividualRate | Quantity::CollectiveRate => {
            if spec.optimize_t {
                rate_with(1.0)?; // surface parameter errors
                let opt =
                    maximize_rate_over_t(|t| rate_with(t).map(|r| r.rate).unwrap_or(f64::NEG_INFINITY));
                let at_opt = rate_with(opt.t_star)?;
                Ok(vec![
                    Some(opt.rate_star),
                    Some(at_opt.i_ab),
                    Some(at_opt.eve_info),
                    Some(opt.t_star),
                    Some(opt.rate_star.max(0.0)),
                ])
            } else {
                let r = rate_with(pt.t)?;
                Ok(vec![Some(r.rate), Some(r.i_ab), Some(r.eve_info)])
            }
        }
        Quantity::Holevo => {
            let r = rate_with(pt.t)?;
            Ok(vec![Some(r.eve_info)])
        }
        Quantity::DvMax if recon_mode => {
            let cap = spec.cap.unwrap_or(10.0);
            let th = if spec.has_param("v") {
                match dv_max_purified(pt.beta, pt.snr, pt.v, pt.eta, &cfg) {
                    Err(Error::InfeasibleSnr { .. }) => return Ok(vec![None, None, None]),
                    other => other?,
                }
            } else {
                dv_max_unpurified(pt.beta, pt.snr, pt.eta, &cfg)?
            };
            let raw = th.value();
            let converged = matches!(
                th,
                Threshold::Root(crate::optimize::ThresholdResult { converged: true, .. })
                    | Threshold::SecureThroughout { .. }
                    | Threshold::InsecureAtZero
            );
            Ok(vec![
                Some(raw),
                Some(raw.min(cap)),
                Some(if converged { 1.0 } else { 0.0 }),
            ])
        }
        Quantity::DvMax => {
            let t1 = dv_max(attack, pt.v, pt.eta, pt.eps, pt.chi, false, &cfg)?;
            let topt = dv_max(attack, pt.v, pt.eta, pt.eps, pt.chi, true, &cfg)?;
            let conv = threshold_converged(&t1) && threshold_converged(&topt);
            let db = if topt.value() > 0.0 && topt.value().is_finite() {
                Some(10.0 * topt.value().log10())
            } else {
                None
            };
            Ok(vec![
                Some(t1.value()),
                Some(topt.value()),
                db,
                Some(if conv { 1.0 } else { 0.0 }),
            ])
        }
        Quantity::EpsMax => {
            let t1 = eps_max(pt.v, pt.dv, pt.eta, false, &cfg)?;
            let topt = eps_max(pt.v, pt.dv, pt.eta, true, &cfg)?;
            let conv = threshold_converged(&t1) && threshold_converged(&topt);
            Ok(vec![
                Some(t1.value()),
                Some(topt.value()),
                Some(if conv { 1.0 } else { 0.0 }),
            ])
        }
        Quantity::TOpt => match t_opt_analytic(pt.v, pt.dv, pt.eta, pt.eps) {
            Ok(t) => Ok(vec![Some(t)]),
            Err(Error::NoPurificationGain { .. }) => Ok(vec![None]),
            Err(e) => Err(e),
        },
        Quantity::SnrSurface => Ok(vec![Some(snr(pt.v, pt.dv, pt.t, pt.eta))]),
        Quantity::IEff => {
            let t1 = effective_rate_unpurified(pt.beta, pt.snr, pt.eta, pt.dv)?;
            let pur = if spec.has_param("v") {
                match effective_rate_purified(pt.beta, pt.snr, pt.v, pt.eta, pt.dv) {
                    Ok(r) => Some(r),
                    Err(Error::InfeasibleSnr { .. }) => None,
                    Err(e) => return Err(e),
                }
            } else {
                None
            };
            Ok(vec![Some(t1), pur])
        }
    }
}

fn threshold_converged(th: &Threshold) -> bool {
    match th {
        Threshold::Root(r) => r.converged,
        _ => true,
    }
}

/// Run a sweep; records come back in row-major grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    let resolved = spec.validate()?;
    let grids = &resolved.grids;
    let spec = &resolved.spec;
    let n_total: usize = grids.iter().map(Vec::len).product();
    let mut coords = Vec::with_capacity(n_total);
    let mut idx = vec![0usize; grids.len()];
    loop {
        coords.push(idx.clone());
        let mut k = grids.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < grids[k].len() {
                break;
            }
            idx[k] = 0;
            if k == 0 {
                break;
            }
        }
        if idx.iter().all(|&i| i == 0) {
            break;
        }
    }
    debug_assert_eq!(coords.len(), n_total);

    let defaults = Point {
        v: f64::NAN,
        dv: 0.0,
        t: 1.0,
        chi: 0.0,
        eta: f64::NAN,
        eps: 0.0,
        beta: 1.0,
        snr: f64::NAN,
    };
    let make_point = |ix: &[usize]| -> Point {
        let mut pt = defaults;
        let set = |name: &str, value: f64, pt: &mut Point| match name {
            "v" => pt.v = value,
            "dv" => pt.dv = value,
            "t" => pt.t = value,
            "chi" => pt.chi = value,
            "eta" => pt.eta = value,
            "eps" => pt.eps = value,
            "beta" => pt.beta = value,
            "snr" => pt.snr = value,
            _ => unreachable!(),
        };
        for (name, &value) in &spec.fixed {
            set(name, value, &mut pt);
        }
        for (a, &i) in spec.axes.iter().zip(ix) {
            set(&a.name, grids[spec.axes.iter().position(|x| x.name == a.name).unwrap()][i], &mut pt);
        }
        pt
    };

    let records: Result<Vec<SweepRecord>> = coords
        .par_iter()
        .map(|ix| {
            let pt = make_point(ix);
            let outputs = eval_point(spec, &pt)?;
            let coord_vals = spec
                .axes
                .iter()
                .enumerate()
                .map(|(k, _)| grids[k][ix[k]])
                .collect();
            Ok(SweepRecord {
                coords: coord_vals,
                outputs,
            })
        })
        .collect();

    Ok(SweepResult {
        axis_names: spec.axes.iter().map(|a| a.name.clone()).collect(),
        output_names: output_columns(spec),
        records: records?,
    })
}

/// Evaluate a recon threshold sweep along a `β(Σ)` curve instead of a
/// `beta` axis: one record per `snr` grid point, with the interpolated
/// `beta` emitted as a column.
pub fn run_sweep_with_beta_table(spec: &SweepSpec, table: &BetaTable) -> Result<SweepResult> {
    let snr_axis = spec
        .axes
        .iter()
        .find(|a| a.name == "snr")
        .ok_or_else(|| Error::InvalidSpec("beta-table projection needs an `snr` axis".into()))?
        .clone();
    let mut projected = spec.clone();
    projected.axes.retain(|a| a.name != "beta");
    projected.fixed.remove("beta");
    let snr_values = snr_axis.values();
    // every grid point must be inside the table
    for &s in &snr_values {
        table.beta_at(s)?;
    }
    let mut records = Vec::with_capacity(snr_values.len());
    let mut base = projected.clone();
    base.axes.retain(|a| a.name == "snr");
    let resolved_cols = output_columns(&base);
    for &s in &snr_values {
        let beta = table.beta_at(s)?;
        let mut one = base.clone();
        one.axes = vec![AxisSpec {
            name: "snr".into(),
            min: s,
            max: s * (1.0 + 1e-12) + 1e-300,
            steps: 2,
            scale: Scale::Linear,
        }];
        one.fixed.insert("beta".into(), beta);
        let res = run_sweep(&one)?;
        let rec = &res.records[0];
        records.push(SweepRecord {
            coords: vec![s, beta],
            outputs: rec.outputs.clone(),
        });
    }
    Ok(SweepResult {
        axis_names: vec!["snr".into(), "beta".into()],
        output_names: resolved_cols,
        records,
    })
}

/// Format one value the way the CSV writer does: nine significant digits,
/// `inf` for the secure-throughout sentinel, empty for infeasible cells.
pub fn format_value(v: Option<f64>) -> String {
    match v {
        None => String::new(),
        Some(x) if x.is_nan() => String::new(),
        Some(x) if x.is_infinite() && x > 0.0 => "inf".into(),
        Some(x) if x.is_infinite() => "-inf".into(),
        Some(x) => format!("{x:.8e}"),
    }
}

impl SweepResult {
    /// Write the CSV: header row, one record per row, LF line endings.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let mut header: Vec<&str> = self.axis_names.iter().map(String::as_str).collect();
        header.extend(self.output_names.iter().map(String::as_str));
        writeln!(w, "{}", header.join(","))?;
        for rec in &self.records {
            let mut fields: Vec<String> =
                rec.coords.iter().map(|&c| format_value(Some(c))).collect();
            fields.extend(rec.outputs.iter().map(|&o| format_value(o)));
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(name: &str, min: f64, max: f64, steps: usize) -> AxisSpec {
        AxisSpec {
            name: name.into(),
            min,
            max,
            steps,
            scale: Scale::Linear,
        }
    }

    fn base_spec(quantity: Quantity) -> SweepSpec {
        SweepSpec {
            quantity,
            fixed: BTreeMap::new(),
            axes: vec![],
            attack: None,
            method: None,
            optimize_t: false,
            tn: None,
            cap: None,
            output: None,
        }
    }

    #[test]
    fn missing_eta_is_config_error() {
        let mut spec = base_spec(Quantity::IndividualRate);
        spec.fixed.insert("v".into(), 20.0);
        spec.axes.push(axis("dv", 0.0, 2.0, 3));
        assert!(matches!(run_sweep(&spec), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn axis_validation() {
        let mut spec = base_spec(Quantity::IndividualRate);
        spec.fixed.insert("v".into(), 20.0);
        spec.fixed.insert("eta".into(), 0.1);
        spec.axes.push(axis("dv", 0.0, 2.0, 1));
        assert!(run_sweep(&spec).is_err());
        spec.axes[0].steps = 3;
        spec.axes[0].name = "bogus".into();
        assert!(run_sweep(&spec).is_err());
        spec.axes[0].name = "eta".into();
        assert!(run_sweep(&spec).is_err()); // fixed and axis at once
    }

    #[test]
    fn one_axis_sweep_finds_threshold_crossing() {
        let mut spec = base_spec(Quantity::IndividualRate);
        spec.attack = Some(Attack::Individual);
        spec.fixed.insert("v".into(), 20.0);
        spec.fixed.insert("eta".into(), 0.01);
        spec.axes.push(axis("dv", 0.0, 2.0, 201));
        let res = run_sweep(&spec).unwrap();
        assert_eq!(res.records.len(), 201);
        // rate changes sign near the closed-form threshold 0.9614
        let threshold = crate::analytic::dv_threshold_individual(20.0, 0.01).unwrap();
        let crossing = res
            .records
            .windows(2)
            .find(|w| w[0].outputs[0].unwrap() > 0.0 && w[1].outputs[0].unwrap() <= 0.0)
            .map(|w| 0.5 * (w[0].coords[0] + w[1].coords[0]))
            .expect("crossing in range");
        assert!((crossing - threshold).abs() < 0.01);
    }

    #[test]
    fn grid_order_is_row_major() {
        let mut spec = base_spec(Quantity::SnrSurface);
        spec.fixed.insert("v".into(), 20.0);
        spec.fixed.insert("eta".into(), 0.1);
        spec.axes.push(axis("dv", 0.0, 1.0, 2));
        spec.axes.push(axis("t", 0.5, 1.0, 2));
        let res = run_sweep(&spec).unwrap();
        let coords: Vec<(f64, f64)> = res
            .records
            .iter()
            .map(|r| (r.coords[0], r.coords[1]))
            .collect();
        assert_eq!(
            coords,
            vec![(0.0, 0.5), (0.0, 1.0), (1.0, 0.5), (1.0, 1.0)]
        );
    }

    #[test]
    fn csv_formatting() {
        assert_eq!(format_value(None), "");
        assert_eq!(format_value(Some(f64::INFINITY)), "inf");
        assert_eq!(format_value(Some(1.0)), "1.00000000e0");
        assert_eq!(format_value(Some(0.5)), "5.00000000e-1");
    }

    #[test]
    fn csv_deterministic_across_thread_counts() {
        let mut spec = base_spec(Quantity::CollectiveRate);
        spec.fixed.insert("v".into(), 20.0);
        spec.fixed.insert("eta".into(), 0.01);
        spec.axes.push(axis("dv", 0.0, 1.5, 4));
        spec.axes.push(axis("chi", 0.0, 1.0, 3));
        let csv1 = {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .unwrap();
            pool.install(|| run_sweep(&spec).unwrap().to_csv_string())
        };
        let csv4 = {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(4)
                .build()
                .unwrap();
            pool.install(|| run_sweep(&spec).unwrap().to_csv_string())
        };
        assert_eq!(csv1, csv4);
    }

    #[test]
    fn spec_json_round_trip() {
        let mut spec = base_spec(Quantity::DvMax);
        spec.fixed.insert("eta".into(), 0.1);
        spec.fixed.insert("v".into(), 20.0);
        spec.axes.push(axis("beta", 0.8, 1.0, 5));
        spec.axes.push(AxisSpec {
            name: "snr".into(),
            min: 0.1,
            max: 1.5,
            steps: 5,
            scale: Scale::Log,
        });
        let json = spec.to_json().unwrap();
        let back = SweepSpec::from_json(&json).unwrap();
        assert_eq!(back.to_json().unwrap(), json);
    }

    #[test]
    fn ieff_sweep_emits_both_columns() {
        let mut spec = base_spec(Quantity::IEff);
        spec.fixed.insert("eta".into(), 0.1);
        spec.fixed.insert("v".into(), 20.0);
        spec.fixed.insert("beta".into(), 0.95);
        spec.axes.push(axis("snr", 0.2, 1.0, 3));
        let res = run_sweep(&spec).unwrap();
        assert_eq!(res.output_names, vec!["i_eff_t1", "i_eff_purified"]);
        for rec in &res.records {
            assert!(rec.outputs[0].is_some());
            assert!(rec.outputs[1].is_some()); // feasible across this range
        }
    }

    #[test]
    fn beta_table_projection() {
        let table = BetaTable::from_reader("0.1,0.85\n2.0,0.95\n".as_bytes()).unwrap();
        let mut spec = base_spec(Quantity::DvMax);
        spec.fixed.insert("eta".into(), 0.1);
        spec.axes.push(axis("beta", 0.8, 1.0, 3));
        spec.axes.push(axis("snr", 0.2, 1.0, 3));
        let res = run_sweep_with_beta_table(&spec, &table).unwrap();
        assert_eq!(res.axis_names, vec!["snr", "beta"]);
        assert_eq!(res.records.len(), 3);
        // beta column carries the interpolated values
        for rec in &res.records {
            let (s, b) = (rec.coords[0], rec.coords[1]);
            let expect = 0.85 + (0.95 - 0.85) * (s - 0.1) / 1.9;
            assert!((b - expect).abs() < 1e-12);
        }
        // out-of-range snr axis is an error
        let narrow = BetaTable::from_reader("0.5,0.9\n0.8,0.95\n".as_bytes()).unwrap();
        assert!(run_sweep_with_beta_table(&spec, &narrow).is_err());
    }
}
