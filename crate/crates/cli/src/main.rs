//! `smlab`: singular-metric analyses from a JSON configuration.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use smlab_core::analysis::{self, Outcome};
use smlab_core::config::AnalysisConfig;
use smlab_core::integrate::GbKind;
use smlab_core::{exec, json, selftest, Error};

#[derive(Parser)]
#[command(name = "smlab", version, about = "Intrinsic invariants and Gauss-Bonnet checks for singular metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args, Clone)]
struct Flags {
    /// Absolute tolerance on Gauss-Bonnet residuals
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Maximum quadrature refinement depth
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Jet order used for local expansions
    #[arg(long, global = true)]
    jet_order: Option<usize>,
    /// Gauss-Legendre points per tile axis
    #[arg(long, global = true)]
    gauss_order: Option<usize>,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Singular-set census: curves with A2/A3 tags and cross caps
    Classify { config: PathBuf },
    /// Trace the singular curves and export their samples
    Curve { config: PathBuf },
    /// Singular and product curvature along every curve
    Invariants { config: PathBuf },
    /// Cross-cap invariants and ray limits
    Crosscap { config: PathBuf },
    /// Gauss-Bonnet check of the given kind (gb1, euler, whitney)
    GaussBonnet {
        #[arg(value_parser = parse_kind)]
        kind: GbKind,
        config: PathBuf,
    },
    /// Run a built-in example end to end
    Gallery { name: String },
    /// Run the acceptance suite
    Selftest,
}

fn parse_kind(s: &str) -> Result<GbKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

fn load(path: &PathBuf, flags: &Flags) -> Result<AnalysisConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error("config", format!("cannot read {}: {e}", path.display())))?;
    let cfg = AnalysisConfig::from_json(&text)?;
    apply(cfg, flags)
}

fn apply(mut cfg: AnalysisConfig, flags: &Flags) -> Result<AnalysisConfig, Error> {
    if let Some(t) = flags.tol {
        cfg.tolerances.abs_tol = t;
    }
    if let Some(d) = flags.depth {
        cfg.options.depth = d;
    }
    if let Some(k) = flags.jet_order {
        cfg.jet_order = k;
    }
    if let Some(g) = flags.gauss_order {
        cfg.options.gauss_order = g;
    }
    cfg.validate()?;
    Ok(cfg)
}

struct Output {
    text: String,
    pass: bool,
}

fn json_output(o: Outcome) -> Output {
    Output {
        text: json::to_string(&o.value),
        pass: o.pass,
    }
}

fn no_csv(flags: &Flags, command: &str) -> Result<(), Error> {
    if flags.format == Some(Format::Csv) {
        return Err(config_error("format", format!("`{command}` writes JSON only")));
    }
    Ok(())
}

fn execute(cmd: &Command, flags: &Flags) -> Result<Output, Error> {
    match cmd {
        Command::Classify { config } => {
            no_csv(flags, "classify")?;
            Ok(json_output(analysis::classify(&load(config, flags)?)?))
        }
        Command::Curve { config } => {
            let cfg = load(config, flags)?;
            let curves = analysis::curves(&cfg)?;
            let pass = !curves.is_empty();
            let text = match flags.format.unwrap_or(Format::Csv) {
                Format::Csv => analysis::curves_csv(&curves),
                Format::Json => json::to_string(&json!({ "name": cfg.name, "curves": curves })),
            };
            Ok(Output { text, pass })
        }
        Command::Invariants { config } => {
            let (o, curves) = analysis::invariants(&load(config, flags)?)?;
            Ok(match flags.format.unwrap_or(Format::Json) {
                Format::Csv => Output {
                    text: analysis::curves_csv(&curves),
                    pass: o.pass,
                },
                Format::Json => json_output(o),
            })
        }
        Command::Crosscap { config } => {
            no_csv(flags, "crosscap")?;
            Ok(json_output(analysis::crosscap(&load(config, flags)?)?))
        }
        Command::GaussBonnet { kind, config } => {
            no_csv(flags, "gauss-bonnet")?;
            Ok(json_output(analysis::gauss_bonnet(&load(config, flags)?, *kind)?))
        }
        Command::Gallery { name } => {
            no_csv(flags, "gallery")?;
            let cfg = apply(analysis::gallery_config(name)?, flags)?;
            Ok(json_output(analysis::gallery_with(name, &cfg)?))
        }
        Command::Selftest => {
            no_csv(flags, "selftest")?;
            let mut results = Vec::new();
            for id in 1..=selftest::TITLES.len() {
                let c = selftest::run(id);
                eprintln!("{}", c.line());
                results.push(c);
            }
            let pass = results.iter().all(|c| c.pass);
            let value = json!({ "criteria": results, "pass": pass });
            Ok(Output {
                text: json::to_string(&value),
                pass,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = cli.flags.clone();
    let result = exec::with_threads(flags.threads, || execute(&cli.command, &flags));
    match result {
        Ok(out) => {
            if let Some(path) = &flags.out {
                if let Err(e) = std::fs::write(path, &out.text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            } else {
                print!("{}", out.text);
            }
            ExitCode::from(if out.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.module());
            ExitCode::from(if matches!(e, Error::Config { .. }) { 2 } else { 1 })
        }
    }
}
