use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use tandem_core::harness::{run_replication, sweep};
use tandem_core::oracle::{self, CheckStatus, IpaVariant};
use tandem_core::scenario::parse_config;
use tandem_core::{default_paper_config, Error, ExperimentConfig, Mode};

#[derive(Parser)]
#[command(name = "tandem", version, about = "Closed-loop regulation of two traffic lights in tandem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// `key = value` config file; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    replications: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one closed-loop replication and write its per-cycle series.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
        /// Replication index to run.
        #[arg(long, default_value_t = 0)]
        replication: u64,
    },
    /// Sweep the arrival spread in both modes and write summary statistics.
    Table1 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.10, 0.15, 0.20, 0.25, 0.30])]
        zeta_list: Vec<f64>,
        /// Also write every replication's series into this directory.
        #[arg(long)]
        series_dir: Option<PathBuf>,
    },
    /// Compare IPA Jacobians with finite differences; exits 1 on any failure.
    CheckGrad {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Number of random realizations in the stochastic suite.
        #[arg(long, default_value_t = 10)]
        realizations: usize,
        #[arg(long, value_enum, default_value_t = Variant::Standard, hide = true)]
        ipa_variant: Variant,
    },
    /// Print the effective configuration.
    PrintConfig {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Deterministic,
    Stochastic,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Standard,
    NoRelease,
}

enum Failure {
    Config(String),
    GradCheck(usize),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(Error::Config { .. }) => Failure::Config(format!("{e:#}")),
            _ => Failure::Runtime(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from(anyhow::Error::new(e))
    }
}

fn load(common: &Common) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => parse_config(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?,
        None => default_paper_config(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = common.mode {
        cfg.mode = mode;
    }
    if let Some(n) = common.replications {
        cfg.replications = n;
    }
    cfg.validate().map_err(|e| Failure::Config(e.to_string()))?;
    Ok(cfg)
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn echo_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".config");
    out.with_file_name(name)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { common, out, replication } => {
            let cfg = load(&common)?;
            let series = run_replication(&cfg, replication)?;
            write(&out, &series.to_csv())?;
            write(&echo_path(&out), &cfg.to_text())?;
        }
        Command::Table1 { common, out, zeta_list, series_dir } => {
            let cfg = load(&common)?;
            if let Some(z) = zeta_list.iter().find(|z| !(0.0..1.0).contains(*z)) {
                return Err(Failure::Config(format!("`--zeta-list` value {z} must lie in [0, 1)")));
            }
            if let Some(dir) = &series_dir {
                std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            }
            let mut files = Vec::new();
            let summary = sweep(&cfg, &zeta_list, |cell, series| {
                if series_dir.is_some() {
                    for (r, s) in series.iter().enumerate() {
                        files.push((format!("zeta{}_{}_rep{r}.csv", cell.alpha1.zeta, cell.mode), s.to_csv()));
                    }
                }
                Ok(())
            })?;
            if let Some(dir) = &series_dir {
                for (name, csv) in &files {
                    write(&dir.join(name), csv)?;
                }
            }
            write(&out, &summary.to_csv())?;
            write(&echo_path(&out), &cfg.to_text())?;
        }
        Command::CheckGrad { common, out, suite, realizations, ipa_variant } => {
            let cfg = load(&common)?;
            let mut cases = Vec::new();
            if matches!(suite, Suite::Deterministic | Suite::All) {
                cases.extend(oracle::deterministic_suite()?);
            }
            if matches!(suite, Suite::Stochastic | Suite::All) {
                cases.extend(oracle::stochastic_suite(&cfg, realizations)?);
            }
            let variant = match ipa_variant {
                Variant::Standard => IpaVariant::Standard,
                Variant::NoRelease => IpaVariant::WithoutReleaseTerm,
            };
            let reports = oracle::grad_check(&cases, variant)?;
            let csv = oracle::reports_to_csv(&reports);
            match &out {
                Some(path) => write(path, &csv)?,
                None => print!("{csv}"),
            }
            let count = |s: CheckStatus| reports.iter().filter(|r| r.status == s).count();
            let failed = count(CheckStatus::Fail);
            eprintln!(
                "{} entries: {} pass, {} fail, {} flagged",
                reports.len(),
                count(CheckStatus::Pass),
                failed,
                count(CheckStatus::Flagged)
            );
            if failed > 0 {
                return Err(Failure::GradCheck(failed));
            }
        }
        Command::PrintConfig { common } => {
            print!("{}", load(&common)?.to_text());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::GradCheck(n)) => {
            eprintln!("gradient check failed for {n} entries");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
