//! Experiment harness for the dynamic-TDD network model.
//!
//! Subcommands: `coverage` (analytic and optionally simulated report),
//! `sweep` (parameter grid to CSV), `optimize` (closed-form and numerical
//! optimizers with their oracle cross-checks), `figures` (CSV data for the
//! reported experiments). Data goes to stdout or `--out`; diagnostics to
//! stderr. Exit codes: 2 config validation, 3 quadrature non-convergence,
//! 4 insufficient simulation samples.

mod config;
mod figures;
mod sweep;

use anyhow::anyhow;
use clap::{Parser, Subcommand};
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use tddnet_core::analytics::{self, AnalyticsError, CoverageReport};
use tddnet_core::optimizer::{self, SensingObjective};
use tddnet_core::params::{validate, LinkMode, Tier};
use tddnet_core::sim::{self, SimSettings};
use tddnet_core::specfn::SpecFnError;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "tddnet", version, about = "Dynamic-TDD heterogeneous network model: analytics, simulation, optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic coverage report, optionally cross-checked by simulation.
    Coverage {
        #[arg(long)]
        config: PathBuf,
        /// Also run the Monte Carlo estimate and report relative errors.
        #[arg(long)]
        simulate: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        iterations: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Validation-scale simulation (10000 iterations).
        #[arg(long)]
        full: bool,
    },
    /// Run a parameter sweep described by a JSON spec; emits CSV.
    Sweep {
        #[arg(long)]
        sweep: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        iterations: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        full: bool,
    },
    /// Closed-form or numerical optimization with oracle cross-checks.
    Optimize {
        /// One of: uldl, density, bias, bandwidth, sensing.
        target: String,
        #[arg(long)]
        config: PathBuf,
        /// Objective for `sensing`: dl-throughput (default) or
        /// ul-throughput.
        #[arg(long)]
        objective: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the reported figure data as CSVs plus a manifest.
    Figures {
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Validation-scale iteration counts (10000).
        #[arg(long)]
        full: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        iterations: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

/// Failure carrying the documented process exit code.
struct CliFailure {
    code: u8,
    message: String,
}

impl CliFailure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliFailure { code, message: message.into() }
    }
}

fn classify(err: anyhow::Error) -> CliFailure {
    // Quadrature non-convergence surfaces through the analytics error chain.
    for cause in err.chain() {
        if let Some(AnalyticsError::SpecFn(SpecFnError::NonConvergence { .. })) =
            cause.downcast_ref::<AnalyticsError>()
        {
            return CliFailure::new(3, format!("{err:#}"));
        }
        if cause.downcast_ref::<SpecFnError>().is_some() {
            return CliFailure::new(3, format!("{err:#}"));
        }
    }
    CliFailure::new(2, format!("{err:#}"))
}

fn emit(out: Option<&PathBuf>, data: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            writeln!(f, "{data}")?;
        }
        None => println!("{data}"),
    }
    Ok(())
}

fn sim_settings_from(
    seed: Option<u64>,
    iterations: Option<u64>,
    workers: Option<usize>,
    full: bool,
) -> SimSettings {
    SimSettings {
        iterations: iterations.unwrap_or(if full { 10_000 } else { 1000 }),
        window: 5000.0,
        seed: seed.unwrap_or(0),
        workers,
        toroidal: true,
    }
}

fn relative_errors(analytic: &CoverageReport, simulated: &CoverageReport) -> serde_json::Value {
    let field = |a: &Option<analytics::Estimate>, s: &Option<analytics::Estimate>| match (a, s) {
        (Some(a), Some(s)) if s.value > 0.0 => json!((a.value - s.value).abs() / s.value),
        _ => serde_json::Value::Null,
    };
    json!({
        "p_m_d": field(&analytic.p_m_d, &simulated.p_m_d),
        "p_m_u": field(&analytic.p_m_u, &simulated.p_m_u),
        "p_s_d": field(&analytic.p_s_d, &simulated.p_s_d),
        "p_s_u": field(&analytic.p_s_u, &simulated.p_s_u),
        "p_d2d": field(&analytic.p_d2d, &simulated.p_d2d),
        "overall_d": field(&analytic.overall_d, &simulated.overall_d),
        "overall_u": field(&analytic.overall_u, &simulated.overall_u),
    })
}

fn run() -> Result<(), CliFailure> {
    let cli = Cli::parse();
    match cli.command {
        Command::Coverage { config, simulate, seed, iterations, workers, out, full } => {
            let cfg = config::load_config(&config).map_err(classify)?;
            let outcome = validate(&cfg);
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if !outcome.is_ok() {
                return Err(CliFailure::new(
                    2,
                    format!("invalid configuration: {}", outcome.errors.join("; ")),
                ));
            }
            let analytic = analytics::coverage_overall(&cfg)
                .map_err(|e| classify(anyhow!(e)))?;
            let mut doc = json!({
                "schema_version": SCHEMA_VERSION,
                "analytic": analytic,
            });
            if simulate {
                let settings = sim_settings_from(seed, iterations, workers, full);
                let simulated = sim::estimate_coverage(&cfg, &settings);
                let insufficient = simulated
                    .warnings
                    .iter()
                    .any(|w| w.contains("insufficient") || w.contains("no effective samples"));
                doc["relative_error"] = relative_errors(&analytic, &simulated);
                doc["simulated"] = serde_json::to_value(&simulated).unwrap();
                doc["settings"] = serde_json::to_value(settings).unwrap();
                if insufficient {
                    let text = serde_json::to_string_pretty(&doc).unwrap();
                    emit(out.as_ref(), &text).map_err(classify)?;
                    return Err(CliFailure::new(4, "insufficient simulation samples"));
                }
            }
            let text = serde_json::to_string_pretty(&doc).unwrap();
            emit(out.as_ref(), &text).map_err(classify)?;
            Ok(())
        }
        Command::Sweep { sweep, config, seed, iterations, workers, out, full } => {
            let cfg = config::load_config(&config).map_err(classify)?;
            let outcome = validate(&cfg);
            if !outcome.is_ok() {
                return Err(CliFailure::new(
                    2,
                    format!("invalid configuration: {}", outcome.errors.join("; ")),
                ));
            }
            let text = std::fs::read_to_string(&sweep)
                .map_err(|e| CliFailure::new(2, format!("reading sweep spec: {e}")))?;
            let spec: sweep::SweepSpec = serde_json::from_str(&text)
                .map_err(|e| CliFailure::new(2, format!("parsing sweep spec: {e}")))?;
            let settings = sim_settings_from(seed, iterations, workers, full);
            let run = |w: Box<dyn Write>| sweep::run_sweep(&spec, &cfg, &settings, w);
            match &out {
                Some(path) => {
                    let f = std::fs::File::create(path)
                        .map_err(|e| CliFailure::new(2, format!("creating output: {e}")))?;
                    run(Box::new(f)).map_err(classify)?;
                }
                None => {
                    run(Box::new(std::io::stdout().lock())).map_err(classify)?;
                }
            }
            Ok(())
        }
        Command::Optimize { target, config, objective, out } => {
            let cfg = config::load_config(&config).map_err(classify)?;
            let outcome = validate(&cfg);
            if !outcome.is_ok() {
                return Err(CliFailure::new(
                    2,
                    format!("invalid configuration: {}", outcome.errors.join("; ")),
                ));
            }
            let to_json = |r: &optimizer::OptimizationResult| serde_json::to_value(r).unwrap();
            let result = match target.as_str() {
                "uldl" => {
                    let mut entries = serde_json::Map::new();
                    for (tag, tier, mode) in [
                        ("macro_dl", Tier::Macro, LinkMode::Dl),
                        ("macro_ul", Tier::Macro, LinkMode::Ul),
                        ("small_dl", Tier::Small, LinkMode::Dl),
                        ("small_ul", Tier::Small, LinkMode::Ul),
                    ] {
                        let r = optimizer::optimal_uldl_config(&cfg, tier, mode)
                            .map_err(|e| classify(anyhow!(e)))?;
                        entries.insert(tag.into(), to_json(&r));
                    }
                    serde_json::Value::Object(entries)
                }
                "density" => {
                    let dl = optimizer::optimal_density(&cfg, LinkMode::Dl)
                        .map_err(|e| classify(anyhow!(e)))?;
                    let ul = optimizer::optimal_density(&cfg, LinkMode::Ul)
                        .map_err(|e| classify(anyhow!(e)))?;
                    json!({"dl": to_json(&dl), "ul": to_json(&ul)})
                }
                "bias" => {
                    let dl = optimizer::optimal_bias(&cfg, LinkMode::Dl)
                        .map_err(|e| classify(anyhow!(e)))?;
                    let ul = optimizer::optimal_bias(&cfg, LinkMode::Ul)
                        .map_err(|e| classify(anyhow!(e)))?;
                    json!({"dl": to_json(&dl), "ul": to_json(&ul)})
                }
                "bandwidth" => {
                    let r = optimizer::optimal_bandwidth(&cfg)
                        .map_err(|e| classify(anyhow!(e)))?;
                    to_json(&r)
                }
                "sensing" => {
                    let obj = match objective.as_deref() {
                        None | Some("dl-throughput") => SensingObjective::DlThroughput,
                        Some("ul-throughput") => SensingObjective::UlThroughput,
                        Some(other) => {
                            return Err(CliFailure::new(
                                2,
                                format!("unknown sensing objective `{other}`"),
                            ))
                        }
                    };
                    let r = optimizer::optimal_sensing(&cfg, obj, 25)
                        .map_err(|e| classify(anyhow!(e)))?;
                    to_json(&r)
                }
                other => {
                    return Err(CliFailure::new(
                        2,
                        format!(
                            "unknown target `{other}`; expected uldl|density|bias|bandwidth|sensing"
                        ),
                    ))
                }
            };
            let doc = json!({"schema_version": SCHEMA_VERSION, "target": target, "result": result});
            emit(out.as_ref(), &serde_json::to_string_pretty(&doc).unwrap()).map_err(classify)?;
            Ok(())
        }
        Command::Figures { out, full, seed, iterations, workers } => {
            let fs = figures::FigureSettings {
                iterations: iterations.unwrap_or(if full { 10_000 } else { 1000 }),
                seed: seed.unwrap_or(0),
                workers,
            };
            let all_ok = figures::run_figures(&out, &fs).map_err(classify)?;
            if !all_ok {
                return Err(CliFailure::new(3, "one or more figures failed"));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
