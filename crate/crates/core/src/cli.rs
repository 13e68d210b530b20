//! Command-line driver.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::load_config;
use crate::eigen_analysis::{all_zones, analyze_zone_of, eigen_sweep, identify_zone, ZoneSpec};
use crate::error::Error;
use crate::export::write_atomic;
use crate::model::{Sweep, SystemConfig};
use crate::presets::{load_preset, preset_text, TableRow, TABLE1, TABLE2};
use crate::spectra::{pgm_bytes, spectrum_csv, sweep_spectrum};
use crate::transition::{
    find_transition, regime_map, MapAxis, ParamSelector, BISECTION_TOL, THRESHOLD,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hybrid-modes",
    version,
    about = "Transmission spectra and crossing analysis for coupled hybrid modes"
)]
struct Cli {
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Suppress informational messages on standard error.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// Configuration file, or the name of a bundled preset.
    #[arg(long, value_name = "PATH")]
    config: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// S21 over the field/frequency grid as CSV.
    Spectrum {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Also write a greyscale image of |1 + S21| in dB between FLOOR and CEIL.
        #[arg(long, value_name = "FLOOR,CEIL", allow_hyphen_values = true)]
        pgm: Option<String>,
        /// Image path; defaults to the CSV path with a .pgm extension.
        #[arg(long, value_name = "PATH")]
        pgm_out: Option<PathBuf>,
    },
    /// Tracked eigenvalue branches as CSV.
    Eigen {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Label every tunable/static crossing (or the ones given with --zone).
    Classify {
        #[command(flatten)]
        config: ConfigArg,
        /// Zone as TUNABLE-STATIC, e.g. M-P2. Repeatable.
        #[arg(long, value_name = "A-B")]
        zone: Vec<String>,
    },
    /// Bisect one coupling component for the attraction/repulsion boundary.
    Boundary {
        #[command(flatten)]
        config: ConfigArg,
        /// Coupling component as A-B:gamma or A-B:j.
        #[arg(long, value_name = "A-B:COMPONENT")]
        param: String,
        #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
        bracket: String,
        #[arg(long, value_name = "A-B")]
        zone: String,
    },
    /// Zone labels over a grid of two coupling components.
    Map {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_name = "A-B")]
        zone: String,
        /// A-B:COMPONENT=START,STOP,POINTS
        #[arg(long, value_name = "SPEC")]
        axis1: String,
        /// A-B:COMPONENT=START,STOP,POINTS
        #[arg(long, value_name = "SPEC")]
        axis2: String,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run the bundled table rows and check their labels.
    Reproduce {
        #[arg(value_enum)]
        table: Table,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Table {
    Table1,
    Table2,
}

enum Failure {
    Usage(String),
    Compute(Error),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Schema { .. }
            | Error::DuplicateMode(_)
            | Error::UnknownModeInCoupling(_)
            | Error::InvalidConfig(_)
            | Error::Parse(_)
            | Error::NoSolution { .. } => Failure::Usage(e.to_string()),
            other => Failure::Compute(other),
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

/// Runs the CLI with process stdout/stderr; returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_cli_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };

    // buffered so the work can run inside a sized pool
    let (mut out_buf, mut err_buf) = (Vec::new(), Vec::new());
    let result = match cli.threads {
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &mut out_buf, &mut err_buf)),
            Err(e) => Err(Failure::Usage(format!("cannot start {n} threads: {e}"))),
        },
        None => dispatch(&cli, &mut out_buf, &mut err_buf),
    };
    let _ = out.write_all(&out_buf).and_then(|_| out.flush());
    let _ = err.write_all(&err_buf);
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAIL
        }
        Err(Failure::Mismatch) => EXIT_FAIL,
    }
}

fn resolve_config(arg: &ConfigArg) -> std::result::Result<SystemConfig, Failure> {
    let path = Path::new(&arg.config);
    if path.is_file() {
        return load_config(path).map_err(|e| match e {
            Error::Io { .. } => Failure::Usage(e.to_string()),
            other => other.into(),
        });
    }
    let file_name = path
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or(&arg.config);
    if preset_text(file_name).is_some() {
        return load_preset(file_name).map_err(Failure::from);
    }
    Err(Failure::Usage(format!(
        "{}: no such file or bundled preset",
        arg.config
    )))
}

fn parse_pair(text: &str, what: &str) -> std::result::Result<(f64, f64), Failure> {
    let bad = || {
        Failure::Usage(format!(
            "{what} must be two comma-separated numbers, got {text:?}"
        ))
    };
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_zone(config: &SystemConfig, text: &str) -> std::result::Result<ZoneSpec, Failure> {
    let (a, b) = text
        .split_once('-')
        .ok_or_else(|| Failure::Usage(format!("zone must look like A-B, got {text:?}")))?;
    Ok(identify_zone(config, a, b)?)
}

fn parse_axis(text: &str) -> std::result::Result<MapAxis, Failure> {
    let bad = || {
        Failure::Usage(format!(
            "axis must look like A-B:gamma=START,STOP,POINTS, got {text:?}"
        ))
    };
    let (sel, range) = text.split_once('=').ok_or_else(bad)?;
    let selector: ParamSelector = sel.parse()?;
    let parts: Vec<&str> = range.split(',').map(str::trim).collect();
    let [start, stop, points] = parts.as_slice() else {
        return Err(bad());
    };
    let start: f64 = start.parse().map_err(|_| bad())?;
    let stop: f64 = stop.parse().map_err(|_| bad())?;
    let points: usize = points.parse().map_err(|_| bad())?;
    if points == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    Ok(MapAxis {
        selector,
        values: Sweep::new(start, stop, points),
    })
}

fn emit(
    out: &mut dyn Write,
    err: &mut dyn Write,
    quiet: bool,
    destination: Option<&Path>,
    text: &str,
) -> CliResult {
    match destination {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            if !quiet {
                let _ = writeln!(err, "wrote {}", path.display());
            }
        }
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Compute(Error::io("<stdout>", e)))?,
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut Vec<u8>, err: &mut Vec<u8>) -> CliResult {
    let quiet = cli.quiet;
    match &cli.command {
        Command::Spectrum {
            config,
            out: dest,
            pgm,
            pgm_out,
        } => {
            let cfg = resolve_config(config)?;
            let pgm = pgm.as_deref().map(|p| parse_pair(p, "--pgm")).transpose()?;
            let pgm_path = match (pgm, pgm_out, dest) {
                (None, Some(_), _) => {
                    return Err(Failure::Usage("--pgm-out needs --pgm FLOOR,CEIL".into()))
                }
                (None, None, _) => None,
                (Some(_), Some(p), _) => Some(p.clone()),
                (Some(_), None, Some(d)) => Some(d.with_extension("pgm")),
                (Some(_), None, None) => {
                    return Err(Failure::Usage(
                        "--pgm needs --out or --pgm-out for the image".into(),
                    ))
                }
            };
            if let Some((floor, ceil)) = pgm {
                if floor >= ceil {
                    return Err(Failure::Usage(format!(
                        "--pgm needs FLOOR < CEIL, got {floor},{ceil}"
                    )));
                }
            }
            let grid = sweep_spectrum(&cfg)?;
            // render everything before touching the filesystem
            let csv = spectrum_csv(&grid);
            let image = match pgm {
                Some((floor, ceil)) => Some(pgm_bytes(&grid, floor, ceil)?),
                None => None,
            };
            emit(out, err, quiet, dest.as_deref(), &csv)?;
            if let (Some(path), Some(bytes)) = (pgm_path, image) {
                write_atomic(&path, &bytes)?;
                if !quiet {
                    let _ = writeln!(err, "wrote {}", path.display());
                }
            }
            Ok(())
        }
        Command::Eigen { config, out: dest } => {
            let cfg = resolve_config(config)?;
            let branches = eigen_sweep(&cfg)?;
            emit(out, err, quiet, dest.as_deref(), &branches.to_csv())
        }
        Command::Classify { config, zone } => {
            let cfg = resolve_config(config)?;
            let zones = if zone.is_empty() {
                all_zones(&cfg)
            } else {
                zone.iter()
                    .map(|z| parse_zone(&cfg, z))
                    .collect::<std::result::Result<_, _>>()?
            };
            if zones.is_empty() {
                return Err(Failure::Usage(
                    "configuration has no tunable/static crossing in range".into(),
                ));
            }
            let mut text = String::new();
            for z in &zones {
                let report = analyze_zone_of(&cfg, z)?;
                text.push_str(&format!(
                    "{}: real={} imag={}\n",
                    z.label(),
                    report.real_class,
                    report.imag_class
                ));
            }
            emit(out, err, quiet, None, &text)
        }
        Command::Boundary {
            config,
            param,
            bracket,
            zone,
        } => {
            let cfg = resolve_config(config)?;
            let selector: ParamSelector = param.parse()?;
            let (lo, hi) = parse_pair(bracket, "--bracket")?;
            let zone = parse_zone(&cfg, zone)?;
            let t = find_transition(&cfg, &selector, lo, hi, &zone)?;
            let text = format!(
                "{} {}:{} critical={:.6} GHz bracket=[{:.6},{:.6}] tolerance={} threshold={}\n",
                zone.label(),
                param.split(':').next().unwrap_or(param),
                param.rsplit(':').next().unwrap_or(""),
                t.critical,
                t.lo,
                t.hi,
                BISECTION_TOL,
                THRESHOLD
            );
            emit(out, err, quiet, None, &text)
        }
        Command::Map {
            config,
            zone,
            axis1,
            axis2,
            out: dest,
        } => {
            let cfg = resolve_config(config)?;
            let zone = parse_zone(&cfg, zone)?;
            let map = regime_map(&cfg, parse_axis(axis1)?, parse_axis(axis2)?, &zone)?;
            emit(out, err, quiet, dest.as_deref(), &map.to_csv())
        }
        Command::Reproduce { table } => {
            let rows: &[TableRow] = match table {
                Table::Table1 => &TABLE1,
                Table::Table2 => &TABLE2,
            };
            let mut all_pass = true;
            let mut text = String::new();
            for row in rows {
                let report = row.run()?;
                let pass = row.matches(&report);
                all_pass &= pass;
                text.push_str(&format!(
                    "{} row {} {}-{}: real={} imag={} expected real={} imag={}\n",
                    if pass { "PASS" } else { "FAIL" },
                    row.row,
                    row.tunable,
                    row.fixed,
                    report.real_class,
                    report.imag_class,
                    row.expected.0,
                    row.expected.1
                ));
            }
            emit(out, err, quiet, None, &text)?;
            if all_pass {
                Ok(())
            } else {
                Err(Failure::Mismatch)
            }
        }
    }
}
