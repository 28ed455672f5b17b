//! Command-line front end. `dispatch` returns the process exit code:
//! 0 on success, 1 when a verdict fails, 2 on usage or input errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::composer::{psi_prime, CompositeTower, Specialization};
use crate::config::Config;
use crate::galois::{certify, frobenius_sample, Mode};
use crate::harness::{self, with_workers};
use crate::heights::{boxstats, exponent_report};
use crate::wreath::{invariants, Shape};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "wreathcount", version, about = "Iterated wreath-composite polynomials, Galois certification and field counts")]
pub struct Cli {
    /// flat key = value config file; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// worker threads (default: available parallelism)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ShapeArg {
    /// branching shape, e.g. 2,2
    #[arg(long)]
    pub shape: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Group order and Malle invariants of the iterated wreath product
    Invariants {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Box exponents A, B and the lower-bound exponents
    Exponents {
        #[command(flatten)]
        shape: ShapeArg,
    },
    /// Build the composite tower of a specialization
    Compose {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Certify the Galois group of a specialization
    Certify {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value = "exact")]
        mode: Mode,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Frobenius cycle types at good primes
    Frobenius {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 100)]
        primes_up_to: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Measured height constants over sampled box points
    Boxstats {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long = "Y", alias = "ygrid", value_delimiter = ',', required = true)]
        y: Vec<f64>,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Certified fraction of box points
    Density {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long, value_delimiter = ',', required = true)]
        ygrid: Vec<f64>,
        #[arg(long, default_value = "exact")]
        mode: Mode,
        #[arg(long)]
        out: Option<String>,
    },
    /// Count certified fields by discriminant
    Count {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long)]
        ymax: f64,
        #[arg(long, value_delimiter = ',')]
        xgrid: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<String>,
        /// also write the counted fields as JSON lines
        #[arg(long)]
        fields: Option<PathBuf>,
    },
    /// Slope fit of a count curve against the exponents
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        shape: ShapeArg,
    },
    /// Run the invariant battery at reduced sizes
    Selftest {
        #[arg(long)]
        quick: bool,
        /// corrupt the reference distribution table (checks that the battery can fail)
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verdict,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn dispatch<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(Failure::Verdict) => EXIT_VERDICT,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_USAGE
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => Config::from_file(p)?,
        None => Config::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn shape_of(arg: &ShapeArg, cfg: &Config) -> Result<Shape, Failure> {
    let s = arg
        .shape
        .as_ref()
        .or(cfg.shape.as_ref())
        .ok_or_else(|| Failure::Usage("--shape is required".into()))?;
    Ok(s.parse::<Shape>()?)
}

fn alpha_of(shape: &Shape, text: &str) -> Result<Specialization, Failure> {
    let values = text
        .split(',')
        .map(|v| v.trim().parse::<num_bigint::BigInt>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Specialization::new(shape, values)?)
}

fn json_out<T: Serialize>(value: &T, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value)?;
    writeln!(stdout, "{text}")?;
    Ok(())
}

/// Opens `--out`: `-` or absent means standard output.
fn with_sink(
    out: &Option<String>,
    cfg: &Config,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<(), Failure>,
) -> Result<(), Failure> {
    match out.as_ref().or(cfg.out.as_ref()).map(String::as_str) {
        None | Some("-") => f(stdout),
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ComposeJson {
    shape: String,
    alpha: Vec<String>,
    blocks: Vec<String>,
    lower: Vec<String>,
    upper: Vec<String>,
    psi_prime: crate::composer::PsiPrime,
}

fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), Failure> {
    let cfg = load_config(&cli)?;
    let workers = cfg.workers;
    match cli.command {
        Command::Invariants { shape, cap } => {
            let s = shape_of(&shape, &cfg)?;
            let inv = invariants(&s, cap.unwrap_or(cfg.enumeration_cap))?;
            json_out(&inv, stdout)
        }
        Command::Exponents { shape } => json_out(&exponent_report(&shape_of(&shape, &cfg)?), stdout),
        Command::Compose { shape, alpha } => {
            let s = shape_of(&shape, &cfg)?;
            let a = alpha_of(&s, &alpha)?;
            let t = CompositeTower::from_specialization(&a);
            let k = s.k();
            let doc = ComposeJson {
                shape: s.to_string(),
                alpha: a.values().iter().map(|v| v.to_string()).collect(),
                blocks: t.blocks().iter().map(|g| g.to_string()).collect(),
                lower: (1..=k).map(|j| t.lower(j).to_string()).collect(),
                upper: (0..=k).map(|j| t.upper(j).to_string()).collect(),
                psi_prime: psi_prime(&t),
            };
            json_out(&doc, stdout)
        }
        Command::Certify { shape, alpha, mode, samples, tau } => {
            let s = shape_of(&shape, &cfg)?;
            let a = alpha_of(&s, &alpha)?;
            let mut params = cfg.certify_params();
            if let Some(n) = samples {
                params.sample_primes = n;
            }
            if let Some(t) = tau {
                params.tau = t;
            }
            let r = certify(&CompositeTower::from_specialization(&a), mode, &params)?;
            json_out(&r, stdout)
        }
        Command::Frobenius { shape, alpha, primes_up_to, out } => {
            let s = shape_of(&shape, &cfg)?;
            let a = alpha_of(&s, &alpha)?;
            let primes: Vec<u64> = crate::algebra::primes_from(2).take_while(|&p| p <= primes_up_to).collect();
            let (records, _) = frobenius_sample(&CompositeTower::from_specialization(&a), &primes)?;
            with_sink(&out, &cfg, stdout, |w| {
                let mut csv = csv::Writer::from_writer(w);
                let mut header = vec!["p".to_string(), "leaf_type".to_string()];
                header.extend((1..s.k()).map(|j| format!("level_type_{j}")));
                csv.write_record(&header)?;
                for r in &records {
                    let mut row = vec![r.p.to_string(), r.leaf_type.to_string()];
                    row.extend(r.level_types.iter().map(|t| t.to_string()));
                    csv.write_record(&row)?;
                }
                csv.flush()?;
                Ok(())
            })
        }
        Command::Boxstats { shape, y, samples, out } => {
            let s = shape_of(&shape, &cfg)?;
            let rows = boxstats(&s, &y, samples, cfg.seed)?;
            with_sink(&out, &cfg, stdout, |w| {
                let mut csv = csv::Writer::from_writer(w);
                csv.write_record(["Y", "count", "measured_C1", "measured_C2"])?;
                for r in &rows {
                    csv.write_record([r.y.to_string(), r.count.clone(), format!("{:.9}", r.measured_c1), format!("{:.9}", r.measured_c2)])?;
                }
                csv.flush()?;
                Ok(())
            })
        }
        Command::Density { shape, ygrid, mode, out } => {
            let s = shape_of(&shape, &cfg)?;
            let params = cfg.density_params();
            let rows = with_workers(workers, || harness::run_density(&s, &ygrid, mode, &params))??;
            with_sink(&out, &cfg, stdout, |w| Ok(harness::write_density_csv(&rows, w)?))
        }
        Command::Count { shape, ymax, xgrid, out, fields } => {
            let s = shape_of(&shape, &cfg)?;
            let grid = xgrid.unwrap_or_else(harness::default_x_grid);
            let params = cfg.count_params();
            let curve = with_workers(workers, || harness::run_count(&s, ymax, &grid, &params))??;
            if let Some(path) = fields {
                let mut w = BufWriter::new(File::create(path)?);
                for f in &curve.fields {
                    writeln!(w, "{}", serde_json::to_string(f)?)?;
                }
                w.flush()?;
            }
            with_sink(&out, &cfg, stdout, |w| Ok(harness::write_count_csv(&curve.rows, w)?))
        }
        Command::Report { input, shape } => {
            let s = shape_of(&shape, &cfg)?;
            let rows = harness::read_count_csv(File::open(&input)?)?;
            let report = harness::run_slope_report(&rows, &s)?;
            json_out(&report, stdout)?;
            if report.verdict {
                Ok(())
            } else {
                Err(Failure::Verdict)
            }
        }
        Command::Selftest { quick, inject_fault } => {
            let (ok, text) = with_workers(workers, || {
                let mut buf = Vec::new();
                let ok = crate::selftest::run(quick, inject_fault, &cfg, &mut buf);
                (ok, buf)
            })?;
            stdout.write_all(&text)?;
            if ok {
                Ok(())
            } else {
                Err(Failure::Verdict)
            }
        }
    }
}

/// Entry point for the binary.
pub fn main_exit_code() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    dispatch(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
