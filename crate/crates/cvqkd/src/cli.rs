//! Command-line front end: single-point rates, thresholds, optimization,
//! sweeps, figure presets, and the validation suites.
//!
//! Exit codes: 0 on success, 1 when a validation suite fails, 2 on
//! configuration errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytic::{
    individual_rate_channel, individual_rate_detection, Attack, ProtocolParams,
};
use crate::collective::{collective_rate_with, HolevoMethod};
use crate::figures::figure_preset;
use crate::optimize::{dv_max, eps_max, maximize_rate_over_t, Threshold, ThresholdConfig};
use crate::recon::BetaTable;
use crate::sweep::{format_value, run_sweep, run_sweep_with_beta_table, SweepSpec};
use crate::validate::{run_all, run_suite, SuiteId, SuiteReport};
use crate::{Error, Result};

/// Key-rate bounds and security thresholds for coherent-state CV-QKD with
/// noisy state preparation.
#[derive(Debug, Parser)]
#[command(name = "cvqkd", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for grid evaluations (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output path (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AttackArg {
    Individual,
    Collective,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Direct,
    Purification,
    Cloner,
}

impl From<MethodArg> for HolevoMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Direct => HolevoMethod::Direct,
            MethodArg::Purification => HolevoMethod::Purification,
            MethodArg::Cloner => HolevoMethod::Cloner,
        }
    }
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Source variance V = 1 + modulation variance.
    #[arg(short = 'V', long)]
    v: f64,
    /// Preparation noise dV.
    #[arg(long, default_value_t = 0.0)]
    dv: f64,
    /// Purifying attenuation T.
    #[arg(short = 'T', long, default_value_t = 1.0)]
    t: f64,
    /// Trusted detection noise chi.
    #[arg(long, default_value_t = 0.0)]
    chi: f64,
    /// Channel transmittivity eta.
    #[arg(long)]
    eta: f64,
    /// Channel excess noise eps.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
}

impl ParamArgs {
    fn to_params(&self) -> ProtocolParams {
        ProtocolParams {
            v: self.v,
            dv: self.dv,
            t: self.t,
            chi: self.chi,
            eta: self.eta,
            eps: self.eps,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Key-rate lower bound at one parameter point.
    Rate {
        #[command(flatten)]
        params: ParamArgs,
        /// Attack model.
        #[arg(long, value_enum, default_value_t = AttackArg::Collective)]
        attack: AttackArg,
        /// Holevo construction for collective attacks.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Reconciliation efficiency discount on I_AB.
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Noise-coupling transmittance of the purification method.
        #[arg(long)]
        tn: Option<f64>,
    },
    /// Maximal tolerable noise (bisection threshold).
    Threshold {
        /// Which noise to push to the security boundary.
        #[arg(value_enum)]
        kind: ThresholdKind,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = AttackArg::Collective)]
        attack: AttackArg,
        /// Optimize the attenuation at every probe.
        #[arg(long)]
        purified: bool,
    },
    /// Attenuation maximizing the key rate at one parameter point.
    Optimize {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = AttackArg::Collective)]
        attack: AttackArg,
    },
    /// Run a sweep described by a JSON spec file.
    Sweep {
        /// Path to the spec JSON.
        #[arg(long)]
        spec: PathBuf,
        /// Override the per-axis step count of every axis.
        #[arg(long)]
        steps: Option<usize>,
        /// Project thresholds along a beta(SNR) CSV curve.
        #[arg(long)]
        beta_table: Option<PathBuf>,
    },
    /// Emit the data grid of a named figure preset.
    Figure {
        /// One of: fig2, fig3, fig4, fig5a, fig5b, fig6, fig7, fig8.
        name: String,
        /// Per-axis resolution (default 41).
        #[arg(long)]
        steps: Option<usize>,
        /// Project thresholds along a beta(SNR) CSV curve (fig7/fig8).
        #[arg(long)]
        beta_table: Option<PathBuf>,
        /// Print the preset's spec JSON instead of running it.
        #[arg(long)]
        print_spec: bool,
    },
    /// Cross-method validation suites.
    Validate {
        /// Suite name (all suites when omitted): analytic_vs_symplectic,
        /// direct_vs_purification, topt, series_fit, rms_deviation.
        suite: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ThresholdKind {
    Dv,
    Eps,
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version through this path
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidSpec(format!("thread pool: {e}")))?;
    let out = cli.out.clone();
    pool.install(|| dispatch(cli.command, out))
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn dispatch(cmd: Command, out: Option<PathBuf>) -> Result<i32> {
    match cmd {
        Command::Rate {
            params,
            attack,
            method,
            beta,
            tn,
        } => {
            let p = params.to_params();
            let r = match attack {
                AttackArg::Individual => {
                    if p.eps > 0.0 {
                        individual_rate_channel(&p)?
                    } else {
                        individual_rate_detection(&p)?
                    }
                }
                AttackArg::Collective => {
                    let method = method.map(HolevoMethod::from).unwrap_or(if p.eps > 0.0 {
                        HolevoMethod::Purification
                    } else {
                        HolevoMethod::Direct
                    });
                    collective_rate_with(&p, method, tn)?
                }
            };
            if !(0.0..=1.0).contains(&beta) {
                return Err(Error::InvalidParameter {
                    name: "beta",
                    value: beta,
                    constraint: "0 <= beta <= 1",
                });
            }
            let eff = beta * r.i_ab - r.eve_info;
            let mut w = open_out(&out)?;
            writeln!(w, "i_ab,eve_info,rate,beta,effective_rate")?;
            writeln!(
                w,
                "{},{},{},{},{}",
                format_value(Some(r.i_ab)),
                format_value(Some(r.eve_info)),
                format_value(Some(r.rate)),
                format_value(Some(beta)),
                format_value(Some(eff)),
            )?;
            Ok(0)
        }
        Command::Threshold {
            kind,
            params,
            attack,
            purified,
        } => {
            let p = params.to_params();
            let cfg = ThresholdConfig::default();
            let attack = match attack {
                AttackArg::Individual => Attack::Individual,
                AttackArg::Collective => Attack::Collective,
            };
            let th = match kind {
                ThresholdKind::Dv => dv_max(attack, p.v, p.eta, p.eps, p.chi, purified, &cfg)?,
                ThresholdKind::Eps => {
                    if attack == Attack::Individual {
                        return Err(Error::InvalidSpec(
                            "eps thresholds are computed against collective attacks".into(),
                        ));
                    }
                    eps_max(p.v, p.dv, p.eta, purified, &cfg)?
                }
            };
            let mut w = open_out(&out)?;
            writeln!(w, "value,achieved_rate,iterations,converged")?;
            match th {
                Threshold::Root(r) => writeln!(
                    w,
                    "{},{},{},{}",
                    format_value(Some(r.value)),
                    format_value(Some(r.achieved_rate)),
                    r.iterations,
                    r.converged
                )?,
                Threshold::SecureThroughout { probed_to } => writeln!(
                    w,
                    "inf,,{},true # secure up to probe cap {}",
                    0,
                    format_value(Some(probed_to))
                )?,
                Threshold::InsecureAtZero => writeln!(w, "0.00000000e0,,0,true")?,
            }
            Ok(0)
        }
        Command::Optimize { params, attack } => {
            let p = params.to_params();
            p.validate()?;
            let rate_fn = |t: f64| -> f64 {
                let pt = ProtocolParams { t, ..p };
                let r = match attack {
                    AttackArg::Individual => {
                        if pt.eps > 0.0 {
                            individual_rate_channel(&pt)
                        } else {
                            individual_rate_detection(&pt)
                        }
                    }
                    AttackArg::Collective => {
                        let method = if pt.eps > 0.0 {
                            HolevoMethod::Cloner
                        } else {
                            HolevoMethod::Direct
                        };
                        collective_rate_with(&pt, method, None)
                    }
                };
                r.map(|k| k.rate).unwrap_or(f64::NEG_INFINITY)
            };
            let opt = maximize_rate_over_t(rate_fn);
            let mut w = open_out(&out)?;
            writeln!(w, "t_star,rate_star,evaluations,grid_fallback")?;
            writeln!(
                w,
                "{},{},{},{}",
                format_value(Some(opt.t_star)),
                format_value(Some(opt.rate_star)),
                opt.evaluations,
                opt.grid_fallback
            )?;
            Ok(0)
        }
        Command::Sweep {
            spec,
            steps,
            beta_table,
        } => {
            let mut spec: SweepSpec = SweepSpec::from_json(&std::fs::read_to_string(spec)?)?;
            if let Some(n) = steps {
                for a in &mut spec.axes {
                    a.steps = n;
                }
            }
            emit_sweep(&spec, beta_table, out)
        }
        Command::Figure {
            name,
            steps,
            beta_table,
            print_spec,
        } => {
            let spec = figure_preset(&name, steps)?;
            if print_spec {
                let mut w = open_out(&out)?;
                writeln!(w, "{}", spec.to_json()?)?;
                return Ok(0);
            }
            emit_sweep(&spec, beta_table, out)
        }
        Command::Validate { suite } => {
            let reports: Vec<SuiteReport> = match suite {
                None => run_all()?,
                Some(name) => {
                    let id = SuiteId::from_name(&name).ok_or_else(|| {
                        Error::InvalidSpec(format!(
                            "unknown suite `{name}`; valid: {}",
                            SuiteId::ALL
                                .iter()
                                .map(|s| s.name())
                                .collect::<Vec<_>>()
                                .join(", ")
                        ))
                    })?;
                    vec![run_suite(id)?]
                }
            };
            let mut w = open_out(&out)?;
            let mut all_passed = true;
            for rep in &reports {
                for check in &rep.checks {
                    all_passed &= check.passed;
                    writeln!(
                        w,
                        "[{}] {}: {} -- {}",
                        if check.passed { "PASS" } else { "FAIL" },
                        rep.suite,
                        check.name,
                        check.details
                    )?;
                }
            }
            Ok(if all_passed { 0 } else { 1 })
        }
    }
}

fn emit_sweep(spec: &SweepSpec, beta_table: Option<PathBuf>, out: Option<PathBuf>) -> Result<i32> {
    let result = match beta_table {
        Some(path) => {
            let table = BetaTable::from_path(&path)?;
            run_sweep_with_beta_table(spec, &table)?
        }
        None => run_sweep(spec)?,
    };
    let target = out.or_else(|| spec.output.clone());
    let w = open_out(&target)?;
    result.write_csv(w)?;
    Ok(0)
}
