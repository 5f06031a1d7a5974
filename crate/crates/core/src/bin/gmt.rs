//! `gmt`: calibrate, solve, reform, sweep and verify from the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gmt_core::calibration::{calibrate, CalibrationVariant};
use gmt_core::extensions::Selection;
use gmt_core::report::config::{parse_moments, parse_params};
use gmt_core::report::{
    calibration_text, load_moments, load_params, reform, solve_report, sweep, verify, ClosedForm, ParamsFile,
    Scenario, Variant, VerifyOptions, OUT_DIR_ENV,
};
use gmt_core::{Error, Result};

const DEFAULT_PARAMS: &str = include_str!("../../data/params.json");
const DEFAULT_RR_PARAMS: &str = include_str!("../../data/params_real_response.json");
const DEFAULT_MOMENTS: &str = include_str!("../../data/moments.json");

#[derive(Parser)]
#[command(name = "gmt", version, about = "Tax competition under a partial-coverage global minimum tax")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Baseline,
    Decentralised,
    RealResponse,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Baseline => Variant::Baseline,
            VariantArg::Decentralised => Variant::Decentralised,
            VariantArg::RealResponse => Variant::RealResponse,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectionArg {
    Commit,
    Split,
    All,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

#[derive(clap::Args)]
struct Common {
    /// Parameters file (JSON); defaults to the bundled calibration.
    #[arg(long, value_name = "FILE")]
    params: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "baseline")]
    variant: VariantArg,
    /// Equilibrium reported when several exist (decentralised variant).
    #[arg(long, value_enum, default_value = "commit")]
    selection: SelectionArg,
    /// Output directory; falls back to $GMT_OUT_DIR, else stdout only.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit (lambda, delta) to Regime-0 moments.
    Calibrate {
        /// Moments file (JSON); defaults to the bundled targets.
        #[arg(long, value_name = "FILE")]
        moments: Option<PathBuf>,
        /// `real-response` also fits baseline profits.
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Equilibrium at one GMT rate.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long = "tm", value_name = "RATE")]
        t_m: f64,
        #[arg(long, value_name = "RATE")]
        phi: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Gains from a GMT against the no-GMT status quo.
    Reform {
        #[command(flatten)]
        common: Common,
        #[arg(long = "tm", value_name = "RATE")]
        t_m: f64,
        /// Coverage; if it differs from the file's, the coverage change is also reported.
        #[arg(long, value_name = "RATE")]
        phi: Option<f64>,
        /// Compliance cost in bUSD netted off the gains.
        #[arg(long, value_name = "BUSD")]
        compliance_cost: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Equilibria along a grid of GMT rates, as CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        #[arg(long, default_value_t = 0.001)]
        step: f64,
        /// One or more coverage rates (comma separated); one file per rate.
        #[arg(long, value_name = "RATE", value_delimiter = ',')]
        phi: Vec<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Conformance of the closed forms against the oracle and finite differences.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn out_dir(flag: &Option<PathBuf>) -> Option<PathBuf> {
    flag.clone().or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
}

fn params_file(common: &Common) -> Result<ParamsFile> {
    match &common.params {
        Some(p) => load_params(p),
        None if matches!(common.variant, VariantArg::RealResponse) => parse_params(DEFAULT_RR_PARAMS),
        None => parse_params(DEFAULT_PARAMS),
    }
}

fn scenario(common: &Common) -> Result<Scenario> {
    let selection = match common.selection {
        SelectionArg::Commit => Selection::Commit,
        SelectionArg::Split => Selection::Split,
        SelectionArg::All => Selection::All,
    };
    Ok(Scenario::from_file(&params_file(common)?, common.variant.into(), selection))
}

/// Prints `body` and, when an output directory is set, also writes it there.
fn emit(body: &str, dir: Option<PathBuf>, name: &str) -> Result<()> {
    print!("{body}");
    if !body.ends_with('\n') {
        println!();
    }
    if let Some(dir) = dir {
        write(&dir, name, body)?;
    }
    Ok(())
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: dir.join(name),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join(name), body).map_err(io)?;
    Ok(())
}

fn ext(f: Format) -> &'static str {
    match f {
        Format::Json => "json",
        Format::Text => "txt",
        Format::Csv => "csv",
    }
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Calibrate {
            moments,
            variant,
            format,
            out,
        } => {
            let mut m = match &moments {
                Some(p) => load_moments(p)?,
                None => parse_moments(DEFAULT_MOMENTS)?,
            };
            match variant {
                Some(VariantArg::RealResponse) => m.variant = CalibrationVariant::RealResponse,
                Some(VariantArg::Baseline) => m.variant = CalibrationVariant::Baseline,
                Some(VariantArg::Decentralised) => {
                    // same Regime-0 moments, hence the same calibration
                    m.variant = CalibrationVariant::Baseline
                }
                None => {}
            }
            let r = calibrate(&m.targets, &m.fixed, m.variant)?;
            let body = match format {
                Format::Json => json(&r)?,
                _ => calibration_text(&r),
            };
            emit(&body, out_dir(&out), &format!("calibration.{}", ext(format)))?;
        }
        Command::Solve {
            common,
            t_m,
            phi,
            format,
        } => {
            let mut s = scenario(&common)?;
            if let Some(phi) = phi {
                s = s.with_coverage(phi)?;
            }
            let r = solve_report(&s, t_m)?;
            let body = match format {
                Format::Json => json(&r)?,
                _ => r.to_text(),
            };
            emit(&body, out_dir(&common.out), &format!("solve.{}", ext(format)))?;
        }
        Command::Reform {
            common,
            t_m,
            phi,
            compliance_cost,
            format,
        } => {
            let r = reform(&scenario(&common)?, t_m, phi, compliance_cost)?;
            let body = match format {
                Format::Json => r.to_json()? + "\n",
                _ => r.to_text(),
            };
            emit(&body, out_dir(&common.out), &format!("reform-{}.{}", r.scenario, ext(format)))?;
        }
        Command::Sweep {
            common,
            from,
            to,
            step,
            phi,
            format,
        } => {
            if format == Format::Text {
                return Err(Error::Domain("sweep writes csv or json".into()));
            }
            let base = scenario(&common)?;
            let phis = if phi.is_empty() { vec![base.params.coverage()] } else { phi };
            let dir = out_dir(&common.out);
            if dir.is_none() && phis.len() > 1 {
                return Err(Error::Domain("several coverage rates need --out (one file per rate)".into()));
            }
            for p in phis {
                let d = sweep(&base.with_coverage(p)?, from, to, step)?;
                let body = match format {
                    Format::Json => json(&d)?,
                    _ => d.to_csv_string()?,
                };
                let name = format!("sweep-phi{p:.3}.{}", ext(format));
                match &dir {
                    Some(dir) => {
                        write(dir, &name, &body)?;
                        eprintln!("wrote {}", dir.join(&name).display());
                    }
                    None => print!("{body}"),
                }
            }
        }
        Command::Verify {
            common,
            samples,
            seed,
            format,
        } => {
            let file = params_file(&common)?;
            let opts = VerifyOptions {
                sample_size: samples,
                seed,
                ..VerifyOptions::default()
            };
            let r = verify(&file.params, &opts, &ClosedForm)?;
            let body = match format {
                Format::Json => json(&r)?,
                _ => r.to_text(),
            };
            emit(&body, out_dir(&common.out), &format!("verify.{}", ext(format)))?;
            return Ok(r.passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
