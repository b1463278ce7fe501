//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{check_metric, lemmas, scan};
use crate::config::{Family, RunConfig};
use crate::error::{CliError, Result};
use crate::report::ResidualReport;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "biharm", version, about = "Verify biharmonic hypersurface and torse-forming identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Curvature symmetries, closed forms, θ-Einstein fit, torse-forming field.
    CheckMetric(CommonArgs),
    /// Find the constant heights where the normal biharmonicity residual vanishes.
    ScanHyperplane {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        c_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c_max: Option<f64>,
        #[arg(long)]
        c_samples: Option<usize>,
    },
    /// Torse-forming identities on random graphs and biharmonic hyperplanes.
    VerifyLemmas {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        immersions: Option<usize>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        family: Option<Family>,
    },
    /// Export a stored report as JSON or CSV.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Defaults to the input path with the format's extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<f64>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    /// Points per axis of the metric-check grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Half-width of the metric-check box.
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tier name (analytic, one-layer, nested, loose) or a number.
    #[arg(long)]
    pub tol_tier: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Admit v = 0 (Euclidean limit).
    #[arg(long)]
    pub flat_limit: bool,
    #[arg(long, hide = true, allow_hyphen_values = true)]
    pub corrupt_jet: Option<f64>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let set = |cfg: &mut RunConfig, k: &str, v: Option<String>| v.map_or(Ok(()), |v| cfg.set(k, &v));
        set(&mut cfg, "u", self.u.map(|x| x.to_string()))?;
        set(&mut cfg, "v", self.v.map(|x| x.to_string()))?;
        set(&mut cfg, "m", self.m.map(|x| x.to_string()))?;
        set(&mut cfg, "t_min", self.t_min.map(|x| x.to_string()))?;
        set(&mut cfg, "t_max", self.t_max.map(|x| x.to_string()))?;
        set(&mut cfg, "grid", self.grid.map(|x| x.to_string()))?;
        set(&mut cfg, "domain", self.domain.map(|x| x.to_string()))?;
        set(&mut cfg, "seed", self.seed.map(|x| x.to_string()))?;
        set(&mut cfg, "tol_tier", self.tol_tier.clone())?;
        set(&mut cfg, "out", self.out.as_ref().map(|p| p.display().to_string()))?;
        set(&mut cfg, "corrupt_jet", self.corrupt_jet.map(|x| x.to_string()))?;
        if self.flat_limit {
            cfg.flat_limit = true;
        }
        Ok(cfg)
    }
}

fn finish(report: &ResidualReport) -> Result<i32> {
    let path = Path::new(&report.metadata.config.out);
    report.write_json(path)?;
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(
        stdout,
        "{}: {} passed, {} failed -> {}",
        report.metadata.command,
        report.summary.passed,
        report.summary.failed,
        path.display()
    );
    for (id, c) in &report.summary.checks {
        if c.failed > 0 {
            let _ = writeln!(stdout, "  FAIL {id}: {} of {} (max residual {:e})", c.failed, c.passed + c.failed, c.max_residual);
        }
    }
    Ok(if report.all_passed() { EXIT_PASS } else { EXIT_FAIL })
}

fn export(input: &Path, format: Format, out: Option<PathBuf>) -> Result<i32> {
    let report = ResidualReport::read_json(input)?;
    if !report.is_consistent() {
        return Err(CliError::config(format!("{}: summary disagrees with records", input.display())));
    }
    let ext = match format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let out = out.unwrap_or_else(|| input.with_extension(ext));
    match format {
        Format::Json => report.write_json(&out)?,
        Format::Csv => report.write_csv_file(&out)?,
    }
    let _ = writeln!(std::io::stdout(), "{} records -> {}", report.records.len(), out.display());
    Ok(if report.all_passed() { EXIT_PASS } else { EXIT_FAIL })
}

pub fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::CheckMetric(common) => finish(&check_metric::run(&common.resolve()?)?),
        Command::ScanHyperplane {
            common,
            c_min,
            c_max,
            c_samples,
        } => {
            let mut cfg = common.resolve()?;
            if let Some(x) = c_min {
                cfg.c_min = x;
            }
            if let Some(x) = c_max {
                cfg.c_max = x;
            }
            if let Some(x) = c_samples {
                cfg.c_samples = x;
            }
            let report = scan::run(&cfg)?;
            if let Some(roots) = &report.roots {
                let _ = writeln!(std::io::stdout(), "roots: {:?} (expected {:?})", roots.found, roots.expected);
            }
            finish(&report)
        }
        Command::VerifyLemmas {
            common,
            immersions,
            points,
            family,
        } => {
            let mut cfg = common.resolve()?;
            if let Some(x) = immersions {
                cfg.immersions = x;
            }
            if let Some(x) = points {
                cfg.points = x;
            }
            if let Some(x) = family {
                cfg.family = x;
            }
            finish(&lemmas::run(&cfg)?)
        }
        Command::Report { input, format, out } => export(&input, format, out),
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}
