//! Rolling-window one-step-ahead forecasts for AR(1) models and the scores
//! used to compare them.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{normal_log_pdf, sepd_log_norm, Family, StdTwoPiece, TwoPieceParams};
use crate::error::{Error, Result};
use crate::mcmc::{run_mwg, ArSepdModel, Chain, ErrorFamily, ModelSpec, MwgConfig};
use crate::prior::TailPrior;
use crate::rng::{sample_sepd, RngStream};
use crate::special::ln_gamma_unchecked;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ForecastModel {
    #[serde(rename = "ols-ar")]
    OlsAr,
    #[serde(rename = "bayes-normal-ar")]
    BayesNormalAr,
    #[serde(rename = "sepd-ar")]
    SepdAr,
}

impl ForecastModel {
    pub const ALL: [ForecastModel; 3] = [ForecastModel::OlsAr, ForecastModel::BayesNormalAr, ForecastModel::SepdAr];

    pub fn name(&self) -> &'static str {
        match self {
            ForecastModel::OlsAr => "ols-ar",
            ForecastModel::BayesNormalAr => "bayes-normal-ar",
            ForecastModel::SepdAr => "sepd-ar",
        }
    }
}

impl fmt::Display for ForecastModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ForecastModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ols-ar" | "ols" => Ok(ForecastModel::OlsAr),
            "bayes-normal-ar" | "normal-ar" | "bayes-normal" => Ok(ForecastModel::BayesNormalAr),
            "sepd-ar" | "sepd" => Ok(ForecastModel::SepdAr),
            other => Err(Error::Config(format!("unknown forecast model '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForecastConfig {
    pub mcmc: MwgConfig,
    /// Refit every `refit_every` steps; in between, the last posterior is
    /// reused with the newest observation.
    pub refit_every: usize,
    /// Standardize each estimation window by its own mean and standard
    /// deviation before fitting.
    pub window_standardize: bool,
    /// Cap on predictive draws per step. `None` keeps every retained draw.
    pub max_draws: Option<usize>,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        Self {
            mcmc: MwgConfig::with_iterations(20_000, 5_000),
            refit_every: 1,
            window_standardize: true,
            max_draws: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastRecord {
    /// Index of the last observation used; the forecast targets `t + 1`.
    pub t: usize,
    pub point_forecast: f64,
    pub predictive_draws: Vec<f64>,
    pub realized: f64,
    pub log_score: f64,
    /// Set when the predictive density underflowed at the realized value.
    pub log_score_underflow: bool,
    pub crps: f64,
}

/// Why a series index is being read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    /// Building the estimation window for the forecast made at `t`.
    Fit(usize),
    /// Reading the observation scored against the forecast made at `t`.
    Realized(usize),
}

/// Root mean squared difference between forecasts and outcomes.
pub fn rmse(forecasts: &[f64], realized: &[f64]) -> Result<f64> {
    if forecasts.len() != realized.len() {
        return Err(Error::Data(format!(
            "{} forecasts but {} realized values",
            forecasts.len(),
            realized.len()
        )));
    }
    if forecasts.is_empty() {
        return Err(Error::Data("rmse of an empty sample".into()));
    }
    let ss: f64 = forecasts.iter().zip(realized).map(|(f, y)| (f - y) * (f - y)).sum();
    Ok((ss / forecasts.len() as f64).sqrt())
}

/// Log of the average of `exp(log_densities)`, computed stably.
pub fn log_mean_exp(log_densities: &[f64]) -> f64 {
    let max = log_densities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if log_densities.is_empty() || max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let s: f64 = log_densities.iter().map(|l| (l - max).exp()).sum();
    max + (s / log_densities.len() as f64).ln()
}

/// Log score of a mixture predictive `mean_m f_m(y)`, given the component
/// log densities at the realized value.
pub fn log_score(component_log_densities: &[f64]) -> Result<f64> {
    if component_log_densities.is_empty() {
        return Err(Error::Data("log score needs at least one predictive component".into()));
    }
    Ok(log_mean_exp(component_log_densities))
}

/// Energy-form CRPS of the empirical predictive: mean |Y − y| − ½ mean |Y − Y′|
/// over all M² ordered pairs of draws.
pub fn crps_mc(draws: &[f64], realized: f64) -> Result<f64> {
    let m = draws.len();
    if m < 2 {
        return Err(Error::Data(format!("CRPS needs at least 2 draws, got {m}")));
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    // Both sums are taken relative to a reference term, so a point-mass
    // predictive gives exactly |y − c|.
    let d0 = (sorted[0] - realized).abs();
    let abs_dev = d0 + sorted.iter().map(|x| (x - realized).abs() - d0).sum::<f64>() / m as f64;
    // Σ_{i<j} (x_(j) − x_(i)) = Σ_k (2k − m + 1) x_(k), zero-based k.
    let pair_sum: f64 = sorted
        .iter()
        .enumerate()
        .map(|(k, x)| (2.0 * k as f64 - m as f64 + 1.0) * (x - sorted[0]))
        .sum();
    let mean_pair = 2.0 * pair_sum / (m as f64 * m as f64);
    Ok((abs_dev - 0.5 * mean_pair).max(0.0))
}

/// Direct O(M²) evaluation of the energy form; a cross-check for [`crps_mc`].
pub fn crps_pairwise(draws: &[f64], realized: f64) -> Result<f64> {
    let m = draws.len();
    if m < 2 {
        return Err(Error::Data(format!("CRPS needs at least 2 draws, got {m}")));
    }
    let abs_dev = draws.iter().map(|x| (x - realized).abs()).sum::<f64>() / m as f64;
    let mut pair = 0.0;
    for a in draws {
        for b in draws {
            pair += (a - b).abs();
        }
    }
    Ok(abs_dev - 0.5 * pair / (m * m) as f64)
}

/// First differences scaled to zero mean and unit sample standard deviation.
pub fn standardize_first_differences(series: &[f64]) -> Result<Vec<f64>> {
    if series.len() < 3 {
        return Err(Error::Data(format!("need at least 3 values, got {}", series.len())));
    }
    let diffs: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let (mean, sd) = mean_sd(&diffs);
    if !(sd > 0.0 && sd.is_finite()) {
        return Err(Error::Data("first differences have zero variance".into()));
    }
    Ok(diffs.iter().map(|d| (d - mean) / sd).collect())
}

/// Sample mean and (n − 1) standard deviation.
fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Mean of a two-piece SEPD(α, p, 0, σ) variable.
pub fn sepd_error_mean(alpha: f64, p: f64, sigma: f64) -> f64 {
    let log_m1 = sepd_log_norm(p) + (2.0 / p - 1.0) * p.ln() + ln_gamma_unchecked(2.0 / p);
    4.0 * sigma * log_m1.exp() * (1.0 - 2.0 * alpha)
}

/// A fitted one-step predictive in standardized units, reusable across
/// steps until the next refit.
enum Fitted {
    Gaussian { phi: f64, sd: f64 },
    Posterior { chain: Chain, rows: Vec<usize>, sepd: bool },
}

/// Affine map from fitted units back to data units.
#[derive(Clone, Copy)]
struct Affine {
    shift: f64,
    scale: f64,
}

impl Affine {
    fn fit(window: &[f64], enabled: bool) -> Self {
        if enabled {
            let (shift, scale) = mean_sd(window);
            if scale > 0.0 && scale.is_finite() {
                return Self { shift, scale };
            }
        }
        Self { shift: 0.0, scale: 1.0 }
    }
    fn to_fit(self, y: f64) -> f64 {
        (y - self.shift) / self.scale
    }
    fn to_data(self, z: f64) -> f64 {
        self.shift + self.scale * z
    }
}

fn fit_window(
    window: &[f64],
    model: ForecastModel,
    config: &ForecastConfig,
    tail_prior: Option<&TailPrior>,
    stream: &mut RngStream,
) -> Result<Fitted> {
    let ar = ArSepdModel::new(window.to_vec())?;
    match model {
        ForecastModel::OlsAr => {
            let (coef, sd) = ModelSpec::ar(&ar, ErrorFamily::Normal).least_squares()?;
            Ok(Fitted::Gaussian { phi: coef[0], sd })
        }
        ForecastModel::BayesNormalAr | ForecastModel::SepdAr => {
            let sepd = model == ForecastModel::SepdAr;
            let errors = if sepd { ErrorFamily::Sepd } else { ErrorFamily::Normal };
            let spec = ModelSpec::ar(&ar, errors);
            let chain = run_mwg(&spec, if sepd { tail_prior } else { None }, &config.mcmc, stream)?;
            let n = chain.len();
            let keep = config.max_draws.map_or(n, |m| m.clamp(1, n));
            let rows = (0..keep).map(|i| i * n / keep).collect();
            Ok(Fitted::Posterior { chain, rows, sepd })
        }
    }
}

/// Predictive draws, per-draw log densities at the realized value, and the
/// predictive mean, all in fitted units.
fn predict(fitted: &Fitted, last: f64, realized: f64, n_gauss: usize, stream: &mut RngStream) -> (Vec<f64>, Vec<f64>, f64) {
    match fitted {
        Fitted::Gaussian { phi, sd } => {
            let mean = phi * last;
            let draws = (0..n_gauss).map(|_| mean + sd * stream.normal()).collect();
            let ld = if *sd > 0.0 {
                normal_log_pdf(realized, mean, *sd)
            } else if realized == mean {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
            (draws, vec![ld], mean)
        }
        Fitted::Posterior { chain, rows, sepd } => {
            let phi = &chain.draws[0];
            let sigma = chain.column("sigma").expect("chain has sigma");
            let mut draws = Vec::with_capacity(rows.len());
            let mut lds = Vec::with_capacity(rows.len());
            let mut mean = 0.0;
            if *sepd {
                let alpha = chain.column("alpha").expect("chain has alpha");
                let p = chain.column("p").expect("chain has p");
                let mut cache: Option<(f64, f64, StdTwoPiece)> = None;
                for &i in rows {
                    let (a, pp, s) = (alpha[i], p[i], sigma[i]);
                    let centre = phi[i] * last;
                    let dens = match &cache {
                        Some((ca, cp, d)) if *ca == a && *cp == pp => d,
                        _ => {
                            let d = StdTwoPiece::new(Family::Sepd, a, pp).expect("valid posterior draw");
                            &cache.insert((a, pp, d)).2
                        }
                    };
                    lds.push(dens.log_pdf((realized - centre) / s) - s.ln());
                    let params = TwoPieceParams::new(a, pp as u32, centre, s).expect("valid posterior draw");
                    draws.push(sample_sepd(stream, &params));
                    mean += centre + sepd_error_mean(a, pp, s);
                }
            } else {
                for &i in rows {
                    let centre = phi[i] * last;
                    lds.push(normal_log_pdf(realized, centre, sigma[i]));
                    draws.push(centre + sigma[i] * stream.normal());
                    mean += centre;
                }
            }
            let m = rows.len() as f64;
            (draws, lds, mean / m)
        }
    }
}

/// Rolling one-step-ahead forecasts of `series` with estimation window
/// `window`. Produces one record per `t` in `window − 1 .. len − 1`
/// (zero-based), each fitted on `series[t + 1 − window ..= t]`.
pub fn rolling_forecast(
    series: &[f64],
    window: usize,
    model: ForecastModel,
    config: &ForecastConfig,
    tail_prior: Option<&TailPrior>,
    stream: &RngStream,
) -> Result<Vec<ForecastRecord>> {
    rolling_forecast_from(series.len(), &|i, _| series[i], window, model, config, tail_prior, stream)
}

/// [`rolling_forecast`] over an indexed source. Every read declares its
/// purpose so callers can audit that no record depends on the future.
#[allow(clippy::too_many_arguments)]
pub fn rolling_forecast_from(
    len: usize,
    source: &(dyn Fn(usize, Access) -> f64 + Sync),
    window: usize,
    model: ForecastModel,
    config: &ForecastConfig,
    tail_prior: Option<&TailPrior>,
    stream: &RngStream,
) -> Result<Vec<ForecastRecord>> {
    if window < 3 {
        return Err(Error::Config(format!("window must be at least 3, got {window}")));
    }
    if len <= window {
        return Err(Error::Data(format!("window {window} needs a series longer than {len}")));
    }
    if config.refit_every == 0 {
        return Err(Error::Config("refit_every must be at least 1".into()));
    }
    if model == ForecastModel::SepdAr && tail_prior.is_none() {
        return Err(Error::Config("the SEPD model needs a tail prior".into()));
    }
    let first = window - 1;
    let steps: Vec<usize> = (first..len - 1).collect();
    let groups: Vec<&[usize]> = steps.chunks(config.refit_every).collect();
    let n_gauss = config
        .max_draws
        .unwrap_or_else(|| (config.mcmc.n_iter - config.mcmc.n_burn).div_ceil(config.mcmc.thin.max(1)))
        .max(2);

    let per_group: Vec<Result<Vec<ForecastRecord>>> = groups
        .par_iter()
        .map(|group| {
            let t0 = group[0];
            let raw: Vec<f64> = (t0 + 1 - window..=t0).map(|i| source(i, Access::Fit(t0))).collect();
            let affine = Affine::fit(&raw, config.window_standardize);
            let scaled: Vec<f64> = raw.iter().map(|&y| affine.to_fit(y)).collect();
            let mut fit_stream = stream.derive(2 * t0 as u64);
            let fitted = fit_window(&scaled, model, config, tail_prior, &mut fit_stream)
                .map_err(|e| with_step(e, t0))?;
            group
                .iter()
                .map(|&t| {
                    let last = affine.to_fit(source(t, Access::Fit(t)));
                    let y_next = source(t + 1, Access::Realized(t));
                    let mut draw_stream = stream.derive(2 * t as u64 + 1);
                    let (draws_z, lds, mean_z) = predict(&fitted, last, affine.to_fit(y_next), n_gauss, &mut draw_stream);
                    let draws: Vec<f64> = draws_z.iter().map(|&z| affine.to_data(z)).collect();
                    let score = log_score(&lds)? - affine.scale.ln();
                    let crps = crps_mc(&draws, y_next)?;
                    Ok(ForecastRecord {
                        t,
                        point_forecast: affine.to_data(mean_z),
                        predictive_draws: draws,
                        realized: y_next,
                        log_score: score,
                        log_score_underflow: score == f64::NEG_INFINITY,
                        crps,
                    })
                })
                .collect()
        })
        .collect();

    let mut out = Vec::with_capacity(steps.len());
    for g in per_group {
        out.extend(g?);
    }
    Ok(out)
}

fn with_step(e: Error, t: usize) -> Error {
    match e {
        Error::Data(m) => Error::Data(format!("window ending at {t}: {m}")),
        Error::Numerical(m) => Error::Numerical(format!("window ending at {t}: {m}")),
        other => other,
    }
}

/// Averages over an evaluation period.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForecastScores {
    pub rmse: f64,
    pub mean_log_score: f64,
    pub mean_crps: f64,
}

pub fn score_records(records: &[ForecastRecord]) -> Result<ForecastScores> {
    let f: Vec<f64> = records.iter().map(|r| r.point_forecast).collect();
    let y: Vec<f64> = records.iter().map(|r| r.realized).collect();
    let n = records.len() as f64;
    Ok(ForecastScores {
        rmse: rmse(&f, &y)?,
        mean_log_score: records.iter().map(|r| r.log_score).sum::<f64>() / n,
        mean_crps: records.iter().map(|r| r.crps).sum::<f64>() / n,
    })
}

/// One row of a model comparison. The baseline row holds raw averages;
/// other rows hold the RMSE ratio, log-score difference and CRPS ratio
/// against the baseline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub model: String,
    pub rmse: f64,
    pub log_score: f64,
    pub crps: f64,
}

pub fn comparison_table(
    baseline: (&str, &[ForecastRecord]),
    others: &[(&str, &[ForecastRecord])],
) -> Result<Vec<ComparisonRow>> {
    let base = score_records(baseline.1)?;
    let mut rows = vec![ComparisonRow {
        model: baseline.0.to_string(),
        rmse: base.rmse,
        log_score: base.mean_log_score,
        crps: base.mean_crps,
    }];
    for (name, recs) in others {
        let aligned = recs.len() == baseline.1.len()
            && recs.iter().zip(baseline.1).all(|(a, b)| a.t == b.t && a.realized == b.realized);
        if !aligned {
            return Err(Error::Data(format!("model '{name}' is not evaluated on the baseline's period")));
        }
        let s = score_records(recs)?;
        rows.push(ComparisonRow {
            model: name.to_string(),
            rmse: s.rmse / base.rmse,
            log_score: s.mean_log_score - base.mean_log_score,
            crps: s.mean_crps / base.mean_crps,
        });
    }
    Ok(rows)
}
