//! Command-line front end for spd-core.

pub mod config;
pub mod error;
pub mod grid;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use spd_core::{
    asym_density, density_oracle, run_suite, CheckId, ExponentSuite, GridSpec, OracleConfig, RegimeTag, ScalingTarget,
    SpdError, ThreeRegimeEnvelope,
};

pub use config::{parse_config, SchemaIssue};
pub use error::CliError;
use grid::{GridArg, RangeArg};
use output::{num, Csv};

#[derive(Debug, Parser)]
#[command(
    name = "spd",
    version,
    about = "Transition densities of spectrally positive Lévy processes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate φ, its derivatives, ψ, the Pruitt functions and Φ.
    Exponent(ExponentArgs),
    /// Transition density p(t, x) on an x-grid.
    Density(DensityArgs),
    /// Run the inequality certification suite.
    Check(CheckArgs),
    /// Empirical scaling indices of an exponent.
    Scaling(ScalingArgs),
}

#[derive(Debug, clap::Args)]
pub struct ExponentArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// a:b:n[,log]
    #[arg(long, allow_hyphen_values = true)]
    pub grid: GridArg,
    /// Comma-separated subset of phi,phi1,phi2,psi,K,h,Phi.
    #[arg(long, default_value = "phi,phi1,phi2")]
    pub what: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityMethod {
    Asym,
    Oracle,
    Envelope,
    All,
}

#[derive(Debug, clap::Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub t: f64,
    /// a:b:n[,log]
    #[arg(long = "x-grid", allow_hyphen_values = true)]
    pub x_grid: GridArg,
    #[arg(long, value_enum, default_value = "oracle")]
    pub method: DensityMethod,
    #[arg(long = "rel-tol", default_value_t = 1e-9)]
    pub rel_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// `all` or a comma-separated list of check ids.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Where to write the JSON array of reports.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// λ-range a:b of the probe grid.
    #[arg(long)]
    pub range: Option<RangeArg>,
    #[arg(long = "per-decade")]
    pub per_decade: Option<usize>,
}

#[derive(Debug, clap::Args)]
pub struct ScalingArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// phi, phi_dd, re_psi or Phi.
    #[arg(long, default_value = "Phi")]
    pub target: String,
    /// Probe range a:b; defaults to (x0 ∨ 1e-3, 1e3).
    #[arg(long)]
    pub range: Option<RangeArg>,
    #[arg(long = "per-decade", default_value_t = 64)]
    pub per_decade: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Caps the global thread pool at `SPD_THREADS` when set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SPD_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Schema(vec![SchemaIssue {
            path: "SPD_THREADS".into(),
            reason: format!("expected a positive integer, got `{v}`"),
        }])
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))
}

fn load_suite(path: &Path) -> Result<ExponentSuite, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let model = parse_config(&text).map_err(CliError::Schema)?;
    Ok(ExponentSuite::new(model)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Executes a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Exponent(a) => exponent(a),
        Command::Density(a) => density(a),
        Command::Check(a) => check(a),
        Command::Scaling(a) => scaling(a),
    }
}

const EXPONENT_FUNCTIONS: [&str; 7] = ["phi", "phi1", "phi2", "psi", "K", "h", "Phi"];

fn exponent(a: ExponentArgs) -> Result<i32, CliError> {
    let what: Vec<&str> = a.what.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let bad: Vec<SchemaIssue> = what
        .iter()
        .filter(|w| !EXPONENT_FUNCTIONS.contains(w))
        .map(|w| SchemaIssue {
            path: "what".into(),
            reason: format!(
                "unknown function `{w}` (expected one of {})",
                EXPONENT_FUNCTIONS.join(",")
            ),
        })
        .collect();
    if !bad.is_empty() || what.is_empty() {
        return Err(CliError::Schema(if bad.is_empty() {
            vec![SchemaIssue {
                path: "what".into(),
                reason: "empty function list".into(),
            }]
        } else {
            bad
        }));
    }
    let suite = load_suite(&a.config)?;
    let mut header = vec!["arg".to_string()];
    for w in &what {
        if *w == "psi" {
            header.extend(["psi_re".to_string(), "psi_im".to_string()]);
        } else {
            header.push(w.to_string());
        }
    }
    let rows: Vec<Vec<String>> = a
        .grid
        .points()
        .par_iter()
        .map(|&x| -> Result<Vec<String>, SpdError> {
            let mut row = vec![num(x)];
            for w in &what {
                match *w {
                    "phi" => row.push(num(suite.phi(x, 0)?)),
                    "phi1" => row.push(num(suite.phi(x, 1)?)),
                    "phi2" => row.push(num(suite.phi(x, 2)?)),
                    "psi" => {
                        let z = suite.char_exponent(x)?;
                        row.push(num(z.re));
                        row.push(num(z.im));
                    }
                    "K" => row.push(num(suite.pruitt_k(x)?)),
                    "h" => row.push(num(suite.pruitt_h(x)?)),
                    "Phi" => row.push(num(suite.big_phi(x)?)),
                    _ => unreachable!(),
                }
            }
            Ok(row)
        })
        .collect::<Result<_, _>>()?;
    let mut csv = Csv::new(&header);
    rows.into_iter().for_each(|r| csv.row(r));
    emit(a.out.as_deref(), &csv.finish())?;
    Ok(0)
}

struct DensityRow {
    x: f64,
    oracle: Option<spd_core::DensityEstimate>,
    asym: Option<(f64, f64, f64)>,
    envelope: Option<(Option<RegimeTag>, f64)>,
}

fn density(a: DensityArgs) -> Result<i32, CliError> {
    if !(a.t.is_finite() && a.t > 0.0) {
        return Err(CliError::Schema(vec![SchemaIssue {
            path: "t".into(),
            reason: format!("must be positive, got {}", a.t),
        }]));
    }
    if !(a.rel_tol > 0.0 && a.rel_tol < 1.0) {
        return Err(CliError::Schema(vec![SchemaIssue {
            path: "rel_tol".into(),
            reason: format!("must lie in (0, 1), got {}", a.rel_tol),
        }]));
    }
    let suite = load_suite(&a.config)?;
    let t = a.t;
    let m = a.method;
    let want_oracle = matches!(m, DensityMethod::Oracle | DensityMethod::All);
    let want_asym = matches!(m, DensityMethod::Asym | DensityMethod::All);
    let env = match m {
        DensityMethod::Envelope | DensityMethod::All => Some(ThreeRegimeEnvelope::new(&suite)?),
        _ => None,
    };
    let oracle = OracleConfig::with_rel_tol(a.rel_tol);
    let rows: Vec<DensityRow> = a
        .x_grid
        .points()
        .par_iter()
        .map(|&x| -> Result<DensityRow, SpdError> {
            let oracle = if want_oracle {
                Some(density_oracle(&suite, t, x, &oracle)?)
            } else {
                None
            };
            let asym = if want_asym {
                match asym_density(&suite, t, x) {
                    Ok(d) => Some((d.ln_value, d.error_indicator, d.contour_w.unwrap_or(f64::NAN))),
                    Err(SpdError::OutOfRange(_)) => None,
                    Err(e) => return Err(e),
                }
            } else {
                None
            };
            let envelope = match &env {
                None => None,
                Some(e) => match e.evaluate_ln(&suite, t, x) {
                    Ok((r, v)) => Some((Some(r.tag), v)),
                    Err(SpdError::HypothesisViolation(_)) => Some((None, f64::NAN)),
                    Err(e) => return Err(e),
                },
            };
            Ok(DensityRow {
                x,
                oracle,
                asym,
                envelope,
            })
        })
        .collect::<Result<_, _>>()?;
    let nan = f64::NAN;
    let regime_name = |r: Option<RegimeTag>| r.map_or("none", |r| r.name());
    let csv = match m {
        DensityMethod::Asym => {
            let mut csv = Csv::new(&["x", "p_asym", "hardness", "w"]);
            for r in rows {
                let (lp, hard, w) = r.asym.unwrap_or((nan, nan, nan));
                csv.row(vec![num(r.x), num(lp.exp()), num(hard), num(w)]);
            }
            csv
        }
        DensityMethod::Oracle => {
            let mut csv = Csv::new(&["x", "p_oracle", "err_bound", "contour_w", "nodes_used"]);
            for r in rows {
                let d = r.oracle.expect("oracle requested");
                csv.row(vec![
                    num(r.x),
                    num(d.value),
                    num(d.error_indicator),
                    num(d.contour_w.unwrap_or(nan)),
                    d.nodes_used.to_string(),
                ]);
            }
            csv
        }
        DensityMethod::Envelope => {
            let mut csv = Csv::new(&["x", "regime", "envelope_value"]);
            for r in rows {
                let (tag, lv) = r.envelope.expect("envelope requested");
                csv.row(vec![num(r.x), regime_name(tag).to_string(), num(lv.exp())]);
            }
            csv
        }
        DensityMethod::All => {
            let mut csv = Csv::new(&[
                "x",
                "p_oracle",
                "p_asym",
                "envelope_value",
                "regime",
                "ratio_oracle_env",
                "ratio_oracle_asym",
            ]);
            for r in rows {
                let d = r.oracle.expect("oracle requested");
                let la = r.asym.map_or(nan, |a| a.0);
                let (tag, le) = r.envelope.expect("envelope requested");
                csv.row(vec![
                    num(r.x),
                    num(d.value),
                    num(la.exp()),
                    num(le.exp()),
                    regime_name(tag).to_string(),
                    num((d.ln_value - le).exp()),
                    num((d.ln_value - la).exp()),
                ]);
            }
            csv
        }
    };
    emit(a.out.as_deref(), &csv.finish())?;
    Ok(0)
}

fn check(a: CheckArgs) -> Result<i32, CliError> {
    let subset: Option<Vec<CheckId>> = if a.suite.trim() == "all" {
        None
    } else {
        let mut ids = Vec::new();
        let mut issues = Vec::new();
        for s in a.suite.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match s.parse::<CheckId>() {
                Ok(id) => ids.push(id),
                Err(_) => issues.push(SchemaIssue {
                    path: "suite".into(),
                    reason: format!("unknown check `{s}`"),
                }),
            }
        }
        if !issues.is_empty() {
            return Err(CliError::Schema(issues));
        }
        Some(ids)
    };
    let suite = load_suite(&a.config)?;
    let mut spec = GridSpec::default();
    if let Some(RangeArg(lo, hi)) = a.range {
        spec.range = Some((lo, hi));
    }
    if let Some(n) = a.per_decade {
        spec.per_decade = n;
    }
    spec.validate()?;
    let outcome = run_suite(&suite, subset.as_deref(), &spec);
    let json = serde_json::to_string_pretty(&outcome.reports).expect("reports serialize") + "\n";
    match &a.report {
        Some(p) => {
            std::fs::write(p, &json).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            let s = &outcome.summary;
            println!(
                "total {} passed {} failed {} skipped {}",
                s.total, s.passed, s.failed, s.skipped
            );
            for r in outcome
                .reports
                .iter()
                .filter(|r| r.status == spd_core::CheckStatus::Failed)
            {
                println!("FAILED {}: {}", r.check_id, r.notes);
            }
        }
        None => print!("{json}"),
    }
    Ok(if outcome.summary.failed == 0 { 0 } else { 3 })
}

fn scaling(a: ScalingArgs) -> Result<i32, CliError> {
    let target = ScalingTarget::parse(&a.target).ok_or_else(|| {
        CliError::Schema(vec![SchemaIssue {
            path: "target".into(),
            reason: format!("unknown target `{}` (expected phi, phi_dd, re_psi or Phi)", a.target),
        }])
    })?;
    if a.per_decade == 0 {
        return Err(CliError::Schema(vec![SchemaIssue {
            path: "per_decade".into(),
            reason: "must be positive".into(),
        }]));
    }
    let suite = load_suite(&a.config)?;
    let range = match a.range {
        Some(RangeArg(lo, hi)) => (lo, hi),
        None => (suite.model().x0.max(1e-3), 1e3),
    };
    let report = suite.scaling_report_with_density(target, range, a.per_decade)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    emit(a.out.as_deref(), &json)?;
    Ok(0)
}
