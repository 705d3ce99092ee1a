//! Numerical optimizers and threshold finders: optimal attenuation,
//! tolerable-noise thresholds, and the security-region surfaces.

use rayon::prelude::*;

use crate::analytic::{
    individual_rate_channel, individual_rate_detection, Attack, ProtocolParams,
};
use crate::collective::{collective_rate, HolevoMethod};
use crate::{Error, Result};

/// Search interval endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidParameter {
                name: "bracket",
                value: lo,
                constraint: "lo < hi",
            });
        }
        Ok(Self { lo, hi })
    }
}

/// Tolerances and probe caps for the threshold searches.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdConfig {
    /// Convergence tolerance on the swept parameter.
    pub param_tol: f64,
    /// Residual-rate tolerance certifying the root.
    pub rate_tol: f64,
    /// Preparation-noise probe cap standing in for "secure at any dV".
    pub dv_cap: f64,
    /// Excess-noise probe cap.
    pub eps_cap: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            param_tol: 1e-5,
            rate_tol: 1e-7,
            dv_cap: 1e3,
            eps_cap: 16.0,
        }
    }
}

/// A converged root of a rate curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    pub value: f64,
    pub achieved_rate: f64,
    pub iterations: u32,
    pub converged: bool,
}

/// Outcome of a threshold search over a noise parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// The rate crosses zero at `value`.
    Root(ThresholdResult),
    /// The rate stayed positive up to the probe cap.
    SecureThroughout { probed_to: f64 },
    /// The rate is already nonpositive with no noise added.
    InsecureAtZero,
}

impl Threshold {
    /// Threshold as a plain number: the root, `+inf` for the sentinel,
    /// 0 for insecure-at-zero.
    pub fn value(&self) -> f64 {
        match self {
            Threshold::Root(r) => r.value,
            Threshold::SecureThroughout { .. } => f64::INFINITY,
            Threshold::InsecureAtZero => 0.0,
        }
    }
}

/// Result of a one-dimensional rate maximization over the attenuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenResult {
    pub t_star: f64,
    pub rate_star: f64,
    pub evaluations: u32,
    /// Set when the golden-section result lost to a grid probe and the
    /// search was restarted around the better grid cell.
    pub grid_fallback: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn golden_section_max(
    f: &dyn Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> (f64, f64, u32) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evals = 2;
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evals += 1;
        if evals > 200 {
            break;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x), evals + 1)
}

/// Maximize a rate curve over the attenuation `T` in `(0, 1]`.
///
/// Golden-section search to `T`-tolerance 1e-6, guarded against
/// non-unimodal curves by a coarse grid sweep: if a grid probe beats the
/// section result by more than 1e-9 bits, the search is redone around the
/// best grid cell and the result is flagged.
pub fn maximize_rate_over_t(ratefn: impl Fn(f64) -> f64) -> GoldenResult {
    const T_FLOOR: f64 = 1e-9;
    const T_TOL: f64 = 1e-6;
    const GUARD_STEPS: u32 = 100;
    let f = |t: f64| ratefn(t);
    let (mut t_star, mut rate_star, mut evals) = golden_section_max(&f, T_FLOOR, 1.0, T_TOL);
    let mut grid_fallback = false;
    let mut best_grid = (T_FLOOR, f64::NEG_INFINITY);
    for k in 0..=GUARD_STEPS {
        let t = (k as f64 / GUARD_STEPS as f64).max(T_FLOOR);
        let r = f(t);
        evals += 1;
        if r > best_grid.1 {
            best_grid = (t, r);
        }
    }
    if best_grid.1 > rate_star + 1e-9 {
        grid_fallback = true;
        let half_cell = 1.0 / GUARD_STEPS as f64;
        let lo = (best_grid.0 - half_cell).max(T_FLOOR);
        let hi = (best_grid.0 + half_cell).min(1.0);
        let (t2, r2, e2) = golden_section_max(&f, lo, hi, T_TOL);
        evals += e2;
        if r2 > rate_star {
            t_star = t2;
            rate_star = r2;
        }
        if best_grid.1 > rate_star {
            t_star = best_grid.0;
            rate_star = best_grid.1;
        }
    }
    GoldenResult {
        t_star,
        rate_star,
        evaluations: evals,
        grid_fallback,
    }
}

/// Bisect a decreasing rate curve between a positive and a nonpositive
/// endpoint until both the parameter interval and the residual rate are
/// within tolerance.
fn bisect_root(
    f: &dyn Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    cfg: &ThresholdConfig,
) -> ThresholdResult {
    let mut iterations = 0;
    let mut mid = 0.5 * (lo + hi);
    let mut fm = f(mid);
    while iterations < 200 {
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
        fm = f(mid);
        iterations += 1;
        if hi - lo <= cfg.param_tol && fm.abs() <= cfg.rate_tol {
            break;
        }
    }
    ThresholdResult {
        value: mid,
        achieved_rate: fm,
        iterations,
        converged: hi - lo <= cfg.param_tol && fm.abs() <= cfg.rate_tol,
    }
}

/// Rate as a function of preparation noise for threshold searches: at
/// `T = 1` when unpurified, else maximized over `T` per probe.
fn rate_at_dv(
    attack: Attack,
    v: f64,
    eta: f64,
    eps: f64,
    chi: f64,
    purified: bool,
    dv: f64,
) -> Result<f64> {
    let rate_fixed_t = |t: f64| -> Result<f64> {
        let p = ProtocolParams {
            v,
            dv,
            t,
            chi,
            eta,
            eps,
        };
        match attack {
            Attack::Individual => {
                if eps > 0.0 && chi > 0.0 {
                    return Err(Error::MixedNoiseUnsupported { chi, eps });
                }
                if eps > 0.0 {
                    Ok(individual_rate_channel(&p)?.rate)
                } else {
                    Ok(individual_rate_detection(&p)?.rate)
                }
            }
            Attack::Collective => {
                // Cloner form is exact for any dV; it reduces to the direct
                // method on pure-loss channels. Trusted chi keeps the direct
                // route; untrusted channel noise folds chi via the cloner.
                if eps > 0.0 {
                    Ok(collective_rate(&p, HolevoMethod::Cloner)?.rate)
                } else {
                    Ok(collective_rate(&p, HolevoMethod::Direct)?.rate)
                }
            }
        }
    };
    if !purified {
        return rate_fixed_t(1.0);
    }
    rate_fixed_t(1.0)?; // surface parameter errors before optimizing
    Ok(maximize_rate_over_t(|t| rate_fixed_t(t).unwrap_or(f64::NEG_INFINITY)).rate_star)
}

/// Maximal tolerable preparation noise.
///
/// Bisection on `dV` of the unpurified (`T = 1`) or per-probe
/// `T`-optimized rate; reports [`Threshold::SecureThroughout`] when the
/// rate is still positive at the probe cap.
pub fn dv_max(
    attack: Attack,
    v: f64,
    eta: f64,
    eps: f64,
    chi: f64,
    purified: bool,
    cfg: &ThresholdConfig,
) -> Result<Threshold> {
    let f = |dv: f64| rate_at_dv(attack, v, eta, eps, chi, purified, dv);
    if f(0.0)? <= 0.0 {
        return Ok(Threshold::InsecureAtZero);
    }
    if f(cfg.dv_cap)? > 0.0 {
        return Ok(Threshold::SecureThroughout {
            probed_to: cfg.dv_cap,
        });
    }
    let g = |dv: f64| f(dv).unwrap_or(f64::NEG_INFINITY);
    Ok(Threshold::Root(bisect_root(&g, 0.0, cfg.dv_cap, cfg)))
}

/// Maximal tolerable channel excess noise at fixed preparation noise,
/// against collective attacks.
pub fn eps_max(v: f64, dv: f64, eta: f64, purified: bool, cfg: &ThresholdConfig) -> Result<Threshold> {
    let f = |eps: f64| rate_at_dv(Attack::Collective, v, eta, eps, 0.0, purified, dv);
    if f(0.0)? <= 0.0 {
        return Ok(Threshold::InsecureAtZero);
    }
    if f(cfg.eps_cap)? > 0.0 {
        return Ok(Threshold::SecureThroughout {
            probed_to: cfg.eps_cap,
        });
    }
    let g = |eps: f64| f(eps).unwrap_or(f64::NEG_INFINITY);
    Ok(Threshold::Root(bisect_root(&g, 0.0, cfg.eps_cap, cfg)))
}

/// One cell of the security-region surface.
#[derive(Debug, Clone, Copy)]
pub struct RegionPoint {
    pub eta: f64,
    pub eps: f64,
    pub dv_max: Threshold,
}

/// Purified collective `dV` thresholds over an `(η, ε)` grid.
///
/// Cells evaluate independently in parallel; output order is row-major in
/// the input grids regardless of scheduling.
pub fn security_region(
    v: f64,
    eta_grid: &[f64],
    eps_grid: &[f64],
    cfg: &ThresholdConfig,
) -> Result<Vec<RegionPoint>> {
    let cells: Vec<(f64, f64)> = eta_grid
        .iter()
        .flat_map(|&eta| eps_grid.iter().map(move |&eps| (eta, eps)))
        .collect();
    cells
        .into_par_iter()
        .map(|(eta, eps)| {
            Ok(RegionPoint {
                eta,
                eps,
                dv_max: dv_max(Attack::Collective, v, eta, eps, 0.0, true, cfg)?,
            })
        })
        .collect()
}

/// One cell of the maximal-rate surface.
#[derive(Debug, Clone, Copy)]
pub struct SurfacePoint {
    pub eps: f64,
    pub dv: f64,
    pub t_star: f64,
    /// Raw maximal rate, possibly negative.
    pub rate: f64,
    /// Rate floored at zero for plotting.
    pub rate_clipped: f64,
}

/// Per-point `T`-maximized collective rate over an `(ε, dV)` grid.
pub fn max_rate_surface(
    v: f64,
    eta: f64,
    eps_grid: &[f64],
    dv_grid: &[f64],
) -> Result<Vec<SurfacePoint>> {
    let cells: Vec<(f64, f64)> = eps_grid
        .iter()
        .flat_map(|&eps| dv_grid.iter().map(move |&dv| (eps, dv)))
        .collect();
    cells
        .into_par_iter()
        .map(|(eps, dv)| {
            let rate_fn = |t: f64| -> f64 {
                let p = ProtocolParams {
                    v,
                    dv,
                    t,
                    chi: 0.0,
                    eta,
                    eps,
                };
                let method = if eps > 0.0 {
                    HolevoMethod::Cloner
                } else {
                    HolevoMethod::Direct
                };
                collective_rate(&p, method)
                    .map(|r| r.rate)
                    .unwrap_or(f64::NEG_INFINITY)
            };
            // surface parameter errors eagerly
            let p = ProtocolParams {
                v,
                dv,
                t: 1.0,
                chi: 0.0,
                eta,
                eps,
            };
            p.validate()?;
            let opt = maximize_rate_over_t(rate_fn);
            Ok(SurfacePoint {
                eps,
                dv,
                t_star: opt.t_star,
                rate: opt.rate_star,
                rate_clipped: opt.rate_star.max(0.0),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::t_opt_analytic;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a}");
    }

    #[test]
    fn golden_matches_analytic_optimum() {
        let f = |t: f64| {
            individual_rate_channel(&ProtocolParams {
                v: 20.0,
                dv: 1.0,
                t,
                chi: 0.0,
                eta: 0.01,
                eps: 0.0,
            })
            .unwrap()
            .rate
        };
        let r = maximize_rate_over_t(f);
        close(r.t_star, 0.174677, 1e-4);
        assert!(!r.grid_fallback);
    }

    #[test]
    fn golden_picks_t1_for_pure_states() {
        let f = |t: f64| {
            individual_rate_detection(&ProtocolParams {
                v: 20.0,
                dv: 0.0,
                t,
                chi: 0.0,
                eta: 0.1,
                eps: 0.0,
            })
            .unwrap()
            .rate
        };
        let r = maximize_rate_over_t(f);
        assert!(r.t_star > 1.0 - 1e-4);
    }

    #[test]
    fn golden_dominates_grid() {
        let f = |t: f64| {
            individual_rate_channel(&ProtocolParams {
                v: 50.0,
                dv: 3.0,
                t,
                chi: 0.0,
                eta: 0.05,
                eps: 0.02,
            })
            .unwrap()
            .rate
        };
        let r = maximize_rate_over_t(f);
        for k in 0..=1000 {
            let t = (k as f64 / 1000.0).max(1e-9);
            assert!(r.rate_star >= f(t) - 1e-8, "beaten at T={t}");
        }
    }

    #[test]
    fn positive_collective_rate_at_dv6_with_purification() {
        // optimal purification keeps dv = 6 secure on the pure-loss channel
        let f = |t: f64| {
            collective_rate(
                &ProtocolParams {
                    v: 20.0,
                    dv: 6.0,
                    t,
                    chi: 0.0,
                    eta: 0.01,
                    eps: 0.0,
                },
                HolevoMethod::Direct,
            )
            .unwrap()
            .rate
        };
        assert!(maximize_rate_over_t(f).rate_star > 0.0);
    }

    #[test]
    fn dv_max_individual_matches_closed_form() {
        let cfg = ThresholdConfig::default();
        let th = dv_max(Attack::Individual, 20.0, 0.01, 0.0, 0.0, false, &cfg).unwrap();
        match th {
            Threshold::Root(r) => {
                close(r.value, 0.961449192, 2e-5);
                assert!(r.converged);
                assert!(r.achieved_rate.abs() <= cfg.rate_tol);
            }
            other => panic!("expected root, got {other:?}"),
        }
    }

    #[test]
    fn dv_max_collective_close_to_individual() {
        let cfg = ThresholdConfig::default();
        let c = dv_max(Attack::Collective, 20.0, 0.01, 0.0, 0.0, false, &cfg)
            .unwrap()
            .value();
        close(c, 0.946692, 1e-4);
        let i = dv_max(Attack::Individual, 20.0, 0.01, 0.0, 0.0, false, &cfg)
            .unwrap()
            .value();
        assert!((c - i).abs() / i < 0.05);
    }

    #[test]
    fn dv_max_purified_pure_loss_is_sentinel() {
        let cfg = ThresholdConfig::default();
        for attack in [Attack::Individual, Attack::Collective] {
            let th = dv_max(attack, 20.0, 0.01, 0.0, 0.0, true, &cfg).unwrap();
            assert!(
                matches!(th, Threshold::SecureThroughout { .. }),
                "{attack:?}: {th:?}"
            );
        }
    }

    #[test]
    fn eps_max_examples() {
        let cfg = ThresholdConfig::default();
        // dv = 0: purification cannot help, both agree
        let un = eps_max(10.0, 0.0, 0.01, false, &cfg).unwrap().value();
        let pu = eps_max(10.0, 0.0, 0.01, true, &cfg).unwrap().value();
        close(un, 0.10148, 2e-4);
        assert!((un - pu).abs() < 1e-4);
        // dv = 1: unpurified already insecure at eps=0, purified is not
        let un1 = eps_max(10.0, 1.0, 0.01, false, &cfg).unwrap();
        assert!(matches!(un1, Threshold::InsecureAtZero));
        let pu1 = eps_max(10.0, 1.0, 0.01, true, &cfg).unwrap().value();
        close(pu1, 0.0443, 2e-3);
    }

    #[test]
    fn security_region_monotone_in_eps() {
        let cfg = ThresholdConfig::default();
        let pts = security_region(100.0, &[0.05], &[0.02, 0.05, 0.08], &cfg).unwrap();
        let vals: Vec<f64> = pts.iter().map(|p| p.dv_max.value()).collect();
        assert!(vals[0] >= vals[1] && vals[1] >= vals[2], "{vals:?}");
        assert!(vals.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn max_rate_surface_shape() {
        let pts = max_rate_surface(10.0, 0.01, &[0.0, 0.05], &[0.0, 6.0]).unwrap();
        assert_eq!(pts.len(), 4);
        // eps = 0 column positive everywhere
        assert!(pts[0].rate > 0.0 && pts[1].rate > 0.0);
        close(pts[1].rate, 0.000718, 2e-4);
        // raw negative rates are preserved, clipped ones floored
        let bad = pts.iter().find(|p| p.eps == 0.05 && p.dv == 6.0).unwrap();
        assert!(bad.rate < 0.0);
        assert_eq!(bad.rate_clipped, 0.0);
        // (0,0) optimum is no attenuation
        assert!(pts[0].t_star > 1.0 - 1e-4);
    }
}
