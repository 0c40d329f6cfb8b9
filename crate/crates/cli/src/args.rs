//! Command-line grammar.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use twopiece::Family;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "twopiece", version, about = "Objective Bayesian inference for two-piece SEPD and SGLD models")]
pub struct CliCommand {
    #[command(subcommand)]
    pub command: Command,
    /// Master seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Command {
    /// Divergences from each p to p − 1 and p + 1.
    KlTable(KlTableArgs),
    /// Loss-based prior over the tail parameter.
    PriorTable(PriorTableArgs),
    /// Draw variates from a two-piece distribution.
    Sample(SampleArgs),
    /// Fit an AR(1) or regression model to data.
    Fit(FitArgs),
    /// Rolling one-step-ahead forecasts and their scores.
    Forecast(ForecastArgs),
    /// Frequentist coverage of the credible interval for p.
    CoverageStudy(CoverageArgs),
    /// Simulate one dataset and run full inference on it.
    Demo(DemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Sepd,
    Sgld,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Sepd => Family::Sepd,
            FamilyArg::Sgld => Family::Sgld,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitModel {
    ArSepd,
    ArNormal,
    RegSgld,
    RegNormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoModel {
    ArSepd,
    RegSgld,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    None,
    StdDiff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Standardize {
    /// Each estimation window by its own statistics.
    Window,
    /// The whole series once, before forecasting.
    Full,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    Desk,
    Paper,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct KlTableArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Rows p = 2..=p-max.
    #[arg(long, default_value_t = 30)]
    pub p_max: u32,
    /// Append rows p = 60, 90, …, 180.
    #[arg(long)]
    pub extended: bool,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct PriorTableArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = twopiece::prior::DEFAULT_P_MAX)]
    pub p_max: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct McmcArgs {
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long)]
    pub p_max: Option<u32>,
    /// Keep proposal scales fixed during burn-in.
    #[arg(long)]
    pub no_adapt: bool,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct FitArgs {
    #[arg(long, value_enum)]
    pub model: FitModel,
    /// Series CSV (AR models) or response-then-covariates CSV (regression).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub header: bool,
    #[arg(long, value_enum, default_value_t = Transform::None)]
    pub transform: Transform,
    #[command(flatten)]
    pub mcmc: McmcArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ForecastArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub header: bool,
    #[arg(long, value_enum, default_value_t = Transform::None)]
    pub transform: Transform,
    /// TOML file with forecast settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Estimation window length.
    #[arg(long)]
    pub window: Option<usize>,
    /// Comma-separated models: ols-ar, bayes-normal-ar, sepd-ar.
    #[arg(long, value_delimiter = ',')]
    pub models: Option<Vec<String>>,
    #[arg(long)]
    pub refit_every: Option<usize>,
    #[arg(long)]
    pub max_draws: Option<usize>,
    #[arg(long, value_enum)]
    pub standardize: Option<Standardize>,
    #[command(flatten)]
    pub mcmc: McmcArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct CoverageArgs {
    /// TOML study description; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Profile::Desk)]
    pub profile: Profile,
    #[arg(long, value_enum)]
    pub model: Option<DemoModel>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[command(flatten)]
    pub mcmc: McmcArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct DemoArgs {
    #[arg(long, value_enum)]
    pub model: DemoModel,
    /// Sample size; defaults to 300.
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub mcmc: McmcArgs,
    #[arg(long)]
    pub out: PathBuf,
}

fn check_readable(path: &Path, flag: &str) -> Result<(), CliError> {
    match std::fs::metadata(path) {
        Ok(m) if m.is_file() => Ok(()),
        Ok(_) => Err(CliError::Usage(format!("{flag} {}: not a file", path.display()))),
        Err(e) => Err(CliError::Usage(format!("{flag} {}: {e}", path.display()))),
    }
}

/// Parses and validates a full argument list (program name first).
pub fn parse_args<I, T>(argv: I) -> Result<CliCommand, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cmd = CliCommand::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Help(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    })?;
    if cmd.threads == Some(0) {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    match &cmd.command {
        Command::Fit(a) => check_readable(&a.data, "--data")?,
        Command::Forecast(a) => {
            check_readable(&a.data, "--data")?;
            if let Some(c) = &a.config {
                check_readable(c, "--config")?;
            }
        }
        Command::CoverageStudy(a) => {
            if let Some(c) = &a.config {
                check_readable(c, "--config")?;
            }
        }
        _ => {}
    }
    Ok(cmd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let c = parse_args(["twopiece", "kl-table", "--family", "sepd", "--p-max", "30"]).unwrap();
        assert!(matches!(c.command, Command::KlTable(KlTableArgs { family: FamilyArg::Sepd, p_max: 30, .. })));

        let e = parse_args(["twopiece", "fit", "--model", "ar-sepd"]).unwrap_err();
        assert!(matches!(&e, CliError::Usage(m) if m.contains("--data")), "{e}");

        let c = parse_args(["twopiece", "sample", "--family", "sgld", "--alpha", "0.3", "--p", "3", "--n", "1000", "--seed", "7"]).unwrap();
        assert_eq!(c.seed, Some(7));
        match c.command {
            Command::Sample(s) => {
                assert_eq!((s.family, s.alpha, s.p, s.n), (FamilyArg::Sgld, 0.3, 3, 1000));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_args(["twopiece", "frobnicate"]), Err(CliError::Usage(_))));
        assert!(matches!(parse_args(["twopiece", "kl-table", "--family", "sepd", "--bogus"]), Err(CliError::Usage(_))));
        assert!(matches!(parse_args(["twopiece", "kl-table", "--family", "cauchy"]), Err(CliError::Usage(_))));
        let e = parse_args(["twopiece", "fit", "--model", "ar-sepd", "--data", "/no/such/file.csv", "--out", "x"]).unwrap_err();
        assert!(matches!(&e, CliError::Usage(m) if m.contains("/no/such/file.csv")));
        assert!(matches!(parse_args(["twopiece", "--help"]), Err(CliError::Help(_))));
        assert!(matches!(parse_args(["twopiece", "demo", "--model", "ar-sepd", "--out", "d", "--threads", "0"]), Err(CliError::Usage(_))));
    }

    #[test]
    fn seed_is_accepted_everywhere() {
        for sub in [
            vec!["kl-table", "--family", "sgld"],
            vec!["prior-table", "--family", "sepd"],
            vec!["demo", "--model", "reg-sgld", "--out", "d"],
            vec!["coverage-study", "--out", "d"],
        ] {
            let mut argv = vec!["twopiece"];
            argv.extend(sub);
            argv.extend(["--seed", "3"]);
            assert_eq!(parse_args(argv).unwrap().seed, Some(3));
        }
    }
}
