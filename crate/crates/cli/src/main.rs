//! `bscens`: fit and test Birnbaum-Saunders models on type-II censored data and
//! run Monte Carlo size and power studies.

mod data;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bs_censored::{fit_full, run_power_study, run_size_study, RejectionTable, StudyConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{FitReport, Format, TestReport};

/// Worker-count override for simulations; unset means all available cores.
const WORKERS_ENV: &str = "BSCENS_WORKERS";

#[derive(Parser)]
#[command(
    name = "bscens",
    version,
    about = "Birnbaum-Saunders inference under type-II censoring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum-likelihood fit of a dataset
    Fit {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Likelihood-ratio and gradient tests on alpha and/or beta
    Test {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        null_alpha: Option<f64>,
        #[arg(long)]
        null_beta: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Null rejection rates at the true parameter values
    SimulateSize {
        #[command(flatten)]
        study: StudyArgs,
        /// Which parameter(s) to test
        #[arg(long, value_enum, default_value_t = Hypothesis::Both)]
        hypothesis: Hypothesis,
    },
    /// Rejection rates with data drawn away from the null
    SimulatePower {
        #[command(flatten)]
        study: StudyArgs,
        #[arg(long)]
        null_alpha: Option<f64>,
        #[arg(long)]
        null_beta: Option<f64>,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Lifetimes, one per line (`#` comments allowed), or a JSON report from `fit`
    file: PathBuf,
    /// Units on test; the lifetimes given are the smallest failures. Defaults
    /// to the number of lifetimes (no censoring).
    #[arg(long)]
    total_units: Option<usize>,
}

#[derive(Args)]
struct StudyArgs {
    /// JSON study configuration; explicit flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Units on test per replication
    #[arg(long)]
    n: Option<usize>,
    /// Degree of censoring in [0, 1); m = round(n (1 - doc))
    #[arg(long)]
    doc: Option<f64>,
    /// True shape parameter
    #[arg(long)]
    alpha: Option<f64>,
    /// True scale parameter
    #[arg(long)]
    beta: Option<f64>,
    /// Comma-separated nominal levels
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<f64>>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output prefix; writes `<out>.csv` and `<out>.json`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Format for standard output
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Hypothesis {
    Alpha,
    Beta,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Fit { data, format } => {
            let sample = data::load(&data.file, data.total_units)?;
            let fit = fit_full(&sample, None)?;
            if !fit.converged {
                eprintln!(
                    "warning: optimizer stopped with gradient norm {:.3e}",
                    fit.grad_norm
                );
            }
            print!("{}", FitReport::new(&sample, &fit).render(format)?);
        }
        Command::Test {
            data,
            null_alpha,
            null_beta,
            format,
        } => {
            if null_alpha.is_none() && null_beta.is_none() {
                bail!("give at least one of --null-alpha and --null-beta");
            }
            let sample = data::load(&data.file, data.total_units)?;
            let fit = fit_full(&sample, None)?;
            let report = TestReport::new(&sample, &fit, null_alpha, null_beta)?;
            print!("{}", report.render(format)?);
        }
        Command::SimulateSize { study, hypothesis } => {
            let mut config = study.config()?;
            config.null_alpha = (hypothesis != Hypothesis::Beta).then_some(config.true_alpha);
            config.null_beta = (hypothesis != Hypothesis::Alpha).then_some(config.true_beta);
            let table = run_size_study(&config, workers()?)?;
            study.emit(&table)?;
        }
        Command::SimulatePower {
            study,
            null_alpha,
            null_beta,
        } => {
            let mut config = study.config()?;
            if null_alpha.is_some() || null_beta.is_some() {
                config.null_alpha = null_alpha;
                config.null_beta = null_beta;
            } else if study.config.is_none() {
                bail!("give at least one of --null-alpha and --null-beta");
            }
            let table = run_power_study(&config, workers()?)?;
            study.emit(&table)?;
        }
    }
    Ok(())
}

impl StudyArgs {
    fn config(&self) -> Result<StudyConfig> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("invalid study configuration {}", path.display()))?
            }
            None => {
                let Some(n) = self.n else {
                    bail!("--n is required without --config");
                };
                StudyConfig::size(n, 0.0, 0.5, 1.0, vec![0.10, 0.05], 10_000, 1)
            }
        };
        if let Some(n) = self.n {
            c.n = n;
        }
        if let Some(d) = self.doc {
            c.censoring_fraction = d;
        }
        if let Some(a) = self.alpha {
            c.true_alpha = a;
        }
        if let Some(b) = self.beta {
            c.true_beta = b;
        }
        if let Some(l) = &self.levels {
            c.nominal_levels = l.clone();
        }
        if let Some(r) = self.replications {
            c.replications = r;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        Ok(c)
    }

    fn emit(&self, table: &RejectionTable) -> Result<()> {
        if table.excluded > 0 {
            eprintln!(
                "warning: {} of {} replications excluded after failed fits",
                table.excluded, table.replications
            );
        }
        if let Some(out) = &self.out {
            write(&with_suffix(out, "csv"), &report::table_csv(table)?)?;
            write(&with_suffix(out, "json"), &report::json(table)?)?;
        }
        let text = match self.format {
            Format::Csv => report::table_csv(table)?,
            Format::Json => report::json(table)?,
            Format::Text => report::table_text(table)?,
        };
        print!("{text}");
        Ok(())
    }
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn workers() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Some(k)),
            _ => bail!("{WORKERS_ENV} must be a positive integer, got {v:?}"),
        },
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => bail!("{WORKERS_ENV}: {e}"),
    }
}
