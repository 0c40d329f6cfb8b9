//! Subcommand implementations.

use std::fmt::Debug;
use std::io::Write;
use std::path::Path;

use log::info;
use serde::Deserialize;
use twopiece::experiments::{
    emit_kl_tables, run_coverage_study, run_inference_demo, standard_kl_rows, CoverageConfig, DemoSpec, StudyModel,
};
use twopiece::forecasting::{comparison_table, rolling_forecast, ForecastConfig, ForecastModel, ForecastRecord};
use twopiece::mcmc::{run_mwg, summarize, ArSepdModel, ErrorFamily, ModelSpec, MwgConfig, PosteriorSummary, RegSgldModel};
use twopiece::prior::build_tail_prior;
use twopiece::rng::{sample_two_piece, RngStream};
use twopiece::{Family, TwoPieceParams};

use crate::args::*;
use crate::io::*;
use crate::CliError;

pub const DEFAULT_SEED: u64 = 1;

/// Picks the first available of flag, config file and default, logging
/// where the value came from.
fn resolve<T: Debug>(name: &str, flag: Option<T>, file: Option<T>, default: T) -> T {
    let (v, src) = match (flag, file) {
        (Some(v), _) => (v, "command line"),
        (None, Some(v)) => (v, "config file"),
        (None, None) => (default, "default"),
    };
    info!("{name} = {v:?} ({src})");
    v
}

fn apply_mcmc(base: MwgConfig, a: &McmcArgs) -> MwgConfig {
    let mut c = base;
    c.n_iter = resolve("mcmc.n_iter", a.iterations, None, c.n_iter);
    c.n_burn = resolve("mcmc.n_burn", a.burn_in, None, c.n_burn);
    c.thin = resolve("mcmc.thin", a.thin, None, c.thin);
    c.p_max = resolve("mcmc.p_max", a.p_max, None, c.p_max);
    if a.no_adapt {
        c.adapt = false;
    }
    c
}

fn write_or_print(table: &Table, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => table.write(p),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write_to(&mut lock)?;
            lock.flush().map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn summary_table(s: &PosteriorSummary) -> Table {
    let mut t = Table::new(&["parameter", "mean", "median", "lower", "upper"]);
    for p in &s.params {
        t.push(vec![p.name.clone(), fmt_num(p.mean), fmt_num(p.median), fmt_num(p.lower), fmt_num(p.upper)]);
    }
    t
}

pub fn execute(cmd: &CliCommand) -> Result<(), CliError> {
    let seed = cmd.seed;
    match &cmd.command {
        Command::KlTable(a) => kl_table(a),
        Command::PriorTable(a) => prior_table(a),
        Command::Sample(a) => sample(a, seed.unwrap_or(DEFAULT_SEED)),
        Command::Fit(a) => fit(a, seed.unwrap_or(DEFAULT_SEED)),
        Command::Forecast(a) => forecast(a, seed),
        Command::CoverageStudy(a) => coverage(a, seed),
        Command::Demo(a) => demo(a, seed.unwrap_or(DEFAULT_SEED)),
    }
}

fn kl_table(a: &KlTableArgs) -> Result<(), CliError> {
    if a.p_max < 2 {
        return Err(CliError::Usage("--p-max must be at least 2".into()));
    }
    let mut ps: Vec<u32> = (2..=a.p_max).collect();
    if a.extended {
        let extra: Vec<u32> = standard_kl_rows().into_iter().filter(|&p| p > a.p_max.max(30)).collect();
        ps.extend(extra);
    }
    let rows = emit_kl_tables(a.family.into(), &ps)?;
    let mut t = Table::new(&["p", "kl_to_p_minus_1", "kl_to_p_plus_1"]);
    for r in rows {
        t.push(vec![r.p.to_string(), fmt_num(r.down), fmt_num(r.up)]);
    }
    write_or_print(&t, a.out.as_deref())
}

fn prior_table(a: &PriorTableArgs) -> Result<(), CliError> {
    let prior = build_tail_prior(a.family.into(), a.p_max)?;
    let mut t = Table::new(&["p", "argmin_pprime", "kl_min", "unnormalized_mass", "normalized_mass"]);
    for p in 1..=a.p_max {
        let i = (p - 1) as usize;
        t.push(vec![
            p.to_string(),
            prior.argmin_table()[i].to_string(),
            fmt_num(prior.kl_min()[i]),
            fmt_num(prior.unnormalized()[i]),
            fmt_num(prior.masses()[i]),
        ]);
    }
    write_or_print(&t, a.out.as_deref())
}

fn sample(a: &SampleArgs, seed: u64) -> Result<(), CliError> {
    let family: Family = a.family.into();
    let params = TwoPieceParams::new(a.alpha, a.p, a.mu, a.sigma)?;
    let mut stream = RngStream::new(seed);
    let mut t = Table::new(&["x"]);
    for _ in 0..a.n {
        t.push(vec![fmt_num(sample_two_piece(&mut stream, family, &params)?)]);
    }
    write_or_print(&t, a.out.as_deref())
}

fn series_transform(t: Transform) -> SeriesTransform {
    match t {
        Transform::None => SeriesTransform::None,
        Transform::StdDiff => SeriesTransform::StdDiff,
    }
}

fn fit(a: &FitArgs, seed: u64) -> Result<(), CliError> {
    let config = apply_mcmc(MwgConfig::default(), &a.mcmc);
    let spec = match a.model {
        FitModel::ArSepd | FitModel::ArNormal => {
            let s = read_series_csv(&a.data, a.header, series_transform(a.transform))?;
            let errors = if a.model == FitModel::ArSepd { ErrorFamily::Sepd } else { ErrorFamily::Normal };
            ModelSpec::ar(&ArSepdModel::new(s.values)?, errors)
        }
        FitModel::RegSgld | FitModel::RegNormal => {
            if a.transform != Transform::None {
                return Err(CliError::Usage("--transform applies only to AR models".into()));
            }
            let (y, x) = read_design_csv(&a.data, a.header)?;
            let errors = if a.model == FitModel::RegSgld { ErrorFamily::Sgld } else { ErrorFamily::Normal };
            ModelSpec::regression(&RegSgldModel::new(y, x)?, errors)
        }
    };
    let prior = match spec.errors().two_piece() {
        Some(f) => Some(build_tail_prior(f, config.p_max)?),
        None => None,
    };
    info!("fitting {:?} to {} observations", a.model, spec.n_obs());
    let chain = run_mwg(&spec, prior.as_ref(), &config, &mut RngStream::new(seed))?;
    let summary = summarize(&chain)?;
    chain_table(&chain).write(&a.out.join("chain.csv"))?;
    let mut meta = vec![
        ("model".to_string(), format!("{:?}", a.model)),
        ("data".to_string(), a.data.display().to_string()),
    ];
    meta.extend(chain_metadata(&chain));
    write_sidecar(&a.out.join("chain.meta"), &meta)?;
    summary_table(&summary).write(&a.out.join("summary.csv"))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ForecastFile {
    window: Option<usize>,
    models: Option<Vec<String>>,
    refit_every: Option<usize>,
    max_draws: Option<usize>,
    standardize: Option<Standardize>,
    seed: Option<u64>,
    mcmc: Option<MwgConfig>,
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn forecast(a: &ForecastArgs, seed: Option<u64>) -> Result<(), CliError> {
    let file: ForecastFile = match &a.config {
        Some(p) => read_toml(p)?,
        None => ForecastFile::default(),
    };
    let seed = resolve("seed", seed, file.seed, DEFAULT_SEED);
    let window = resolve("window", a.window, file.window, 120);
    let names = resolve(
        "models",
        a.models.clone(),
        file.models,
        ForecastModel::ALL.iter().map(|m| m.name().to_string()).collect(),
    );
    let models: Vec<ForecastModel> = names
        .iter()
        .map(|m| m.parse::<ForecastModel>())
        .collect::<Result<_, _>>()?;
    if models.is_empty() {
        return Err(CliError::Usage("--models is empty".into()));
    }
    let defaults = ForecastConfig::default();
    let standardize = resolve("standardize", a.standardize, file.standardize, Standardize::Window);
    let config = ForecastConfig {
        mcmc: apply_mcmc(file.mcmc.unwrap_or(defaults.mcmc), &a.mcmc),
        refit_every: resolve("refit_every", a.refit_every, file.refit_every, defaults.refit_every),
        window_standardize: standardize == Standardize::Window,
        max_draws: resolve("max_draws", a.max_draws.map(Some), file.max_draws.map(Some), defaults.max_draws),
    };
    config.mcmc.validate(None)?;

    let series = read_series_csv(&a.data, a.header, series_transform(a.transform))?;
    let mut values = series.values.clone();
    if standardize == Standardize::Full {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        if !(sd > 0.0 && sd.is_finite()) {
            return Err(CliError::Data("series has zero variance".into()));
        }
        values.iter_mut().for_each(|v| *v = (*v - mean) / sd);
    }
    let prior = if models.contains(&ForecastModel::SepdAr) {
        Some(build_tail_prior(Family::Sepd, config.mcmc.p_max)?)
    } else {
        None
    };
    let stream = RngStream::new(seed);

    let mut all: Vec<(ForecastModel, Vec<ForecastRecord>)> = Vec::new();
    for (i, &m) in models.iter().enumerate() {
        info!("forecasting with {m}");
        let recs = rolling_forecast(&values, window, m, &config, prior.as_ref(), &stream.derive(i as u64))?;
        let mut t = Table::new(&["t", "date", "point_forecast", "realized", "log_score", "log_score_underflow", "crps", "n_draws"]);
        for r in &recs {
            let date = series.dates.as_ref().map_or(String::new(), |d| d[r.t + 1].clone());
            t.push(vec![
                (r.t + 1).to_string(),
                date,
                fmt_num(r.point_forecast),
                fmt_num(r.realized),
                fmt_num(r.log_score),
                r.log_score_underflow.to_string(),
                fmt_num(r.crps),
                r.predictive_draws.len().to_string(),
            ]);
        }
        t.write(&a.out.join(format!("forecast_{m}.csv")))?;
        all.push((m, recs));
    }

    let base = all.iter().position(|(m, _)| *m == ForecastModel::OlsAr).unwrap_or(0);
    let others: Vec<(&str, &[ForecastRecord])> = all
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != base)
        .map(|(_, (m, r))| (m.name(), r.as_slice()))
        .collect();
    let rows = comparison_table((all[base].0.name(), &all[base].1), &others)?;
    let mut t = Table::new(&["model", "rmse", "log_score", "crps"]);
    for r in rows {
        t.push(vec![r.model, fmt_num(r.rmse), fmt_num(r.log_score), fmt_num(r.crps)]);
    }
    t.write(&a.out.join("comparison.csv"))?;
    write_sidecar(
        &a.out.join("forecast.meta"),
        &[
            ("seed".into(), seed.to_string()),
            ("window".into(), window.to_string()),
            ("models".into(), names.join(",")),
            ("baseline".into(), all[base].0.name().into()),
            ("standardize".into(), format!("{standardize:?}").to_lowercase()),
            ("refit_every".into(), config.refit_every.to_string()),
            ("max_draws".into(), config.max_draws.map_or("all".into(), |m| m.to_string())),
            ("n_iter".into(), config.mcmc.n_iter.to_string()),
            ("n_burn".into(), config.mcmc.n_burn.to_string()),
            ("p_max".into(), config.mcmc.p_max.to_string()),
        ],
    )
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoverageFile {
    model: Option<StudyModel>,
    p_values: Option<Vec<u32>>,
    alphas: Option<Vec<f64>>,
    sizes: Option<Vec<usize>>,
    replicates: Option<usize>,
    seed: Option<u64>,
    phi1: Option<f64>,
    beta: Option<[f64; 2]>,
    sigma: Option<f64>,
    mcmc: Option<MwgConfig>,
}

fn study_model(m: DemoModel) -> StudyModel {
    match m {
        DemoModel::ArSepd => StudyModel::ArSepd,
        DemoModel::RegSgld => StudyModel::RegSgld,
    }
}

fn coverage(a: &CoverageArgs, seed: Option<u64>) -> Result<(), CliError> {
    let file: CoverageFile = match &a.config {
        Some(p) => read_toml(p)?,
        None => CoverageFile::default(),
    };
    let model = resolve("model", a.model.map(study_model), file.model, StudyModel::ArSepd);
    let base = match a.profile {
        Profile::Desk => CoverageConfig::desk(model),
        Profile::Paper => CoverageConfig::paper(model),
    };
    let config = CoverageConfig {
        model,
        p_values: resolve("p_values", None, file.p_values, base.p_values),
        alphas: resolve("alphas", None, file.alphas, base.alphas),
        sizes: resolve("sizes", None, file.sizes, base.sizes),
        replicates: resolve("replicates", a.replicates, file.replicates, base.replicates),
        seed: resolve("seed", seed, file.seed, base.seed),
        phi1: resolve("phi1", None, file.phi1, base.phi1),
        beta: resolve("beta", None, file.beta, base.beta),
        sigma: resolve("sigma", None, file.sigma, base.sigma),
        mcmc: apply_mcmc(file.mcmc.unwrap_or(base.mcmc), &a.mcmc),
    };
    let cells = run_coverage_study(&config)?;
    let mut t = Table::new(&["p", "alpha", "n", "replicates", "coverage", "rel_rmse"]);
    for c in &cells {
        t.push(vec![
            c.p.to_string(),
            fmt_num(c.alpha),
            c.n.to_string(),
            c.replicates.to_string(),
            fmt_num(c.coverage),
            fmt_num(c.rel_rmse),
        ]);
    }
    t.write(&a.out.join("coverage.csv"))?;
    let list = |v: &[String]| v.join(",");
    write_sidecar(
        &a.out.join("coverage.meta"),
        &[
            ("model".into(), model.name().into()),
            ("seed".into(), config.seed.to_string()),
            ("p_values".into(), list(&config.p_values.iter().map(|p| p.to_string()).collect::<Vec<_>>())),
            ("alphas".into(), list(&config.alphas.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>())),
            ("sizes".into(), list(&config.sizes.iter().map(|n| n.to_string()).collect::<Vec<_>>())),
            ("replicates".into(), config.replicates.to_string()),
            ("n_iter".into(), config.mcmc.n_iter.to_string()),
            ("n_burn".into(), config.mcmc.n_burn.to_string()),
            ("p_max".into(), config.mcmc.p_max.to_string()),
        ],
    )
}

fn demo(a: &DemoArgs, seed: u64) -> Result<(), CliError> {
    let base = DemoSpec::default_for(study_model(a.model));
    let spec = DemoSpec {
        n: resolve("n", a.n, None, base.n),
        mcmc: apply_mcmc(base.mcmc.clone(), &a.mcmc),
        ..base
    };
    let result = run_inference_demo(&spec, seed)?;
    let mut t = Table::new(&["parameter", "true", "mean", "median", "lower", "upper", "covered"]);
    for (name, truth) in spec.truth() {
        let s = result
            .summary
            .get(&name)
            .ok_or_else(|| CliError::Numerical(format!("no summary for {name}")))?;
        t.push(vec![
            name,
            fmt_num(truth),
            fmt_num(s.mean),
            fmt_num(s.median),
            fmt_num(s.lower),
            fmt_num(s.upper),
            s.contains(truth).to_string(),
        ]);
    }
    t.write(&a.out.join("summary.csv"))?;
    chain_table(&result.chain).write(&a.out.join("chain.csv"))?;

    let y = result.data.response();
    let x = result.data.design();
    let mut header = vec!["y".to_string()];
    header.extend((0..x.ncols()).map(|j| format!("x{j}")));
    let mut d = Table::new(&header);
    for i in 0..y.len() {
        let mut row = vec![fmt_num(y[i])];
        row.extend((0..x.ncols()).map(|j| fmt_num(x[(i, j)])));
        d.push(row);
    }
    d.write(&a.out.join("data.csv"))?;

    let mut meta = vec![("model".to_string(), spec.model.name().to_string()), ("n".to_string(), spec.n.to_string())];
    meta.extend(spec.truth().into_iter().map(|(k, v)| (format!("true.{k}"), fmt_num(v))));
    meta.extend(chain_metadata(&result.chain));
    write_sidecar(&a.out.join("chain.meta"), &meta)
}
