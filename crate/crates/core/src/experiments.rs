//! Simulation studies: frequentist coverage of the credible interval for p,
//! single-dataset inference demos, and KL divergence tables.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{Family, TwoPieceParams};
use crate::divergence::kl_closed_form;
use crate::error::{Error, Result};
use crate::mcmc::summary::summarize_draws;
use crate::mcmc::{run_mwg, summarize, ArSepdModel, Chain, ErrorFamily, ModelSpec, MwgConfig, PosteriorSummary, RegSgldModel};
use crate::prior::{build_tail_prior, TailPrior};
use crate::rng::{mix_seed, RngStream};
use crate::simulate::{simulate_ar, simulate_regression};

/// The two simulation designs: AR(1) with SEPD errors and a simple linear
/// regression with SGLD errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StudyModel {
    #[serde(rename = "ar-sepd")]
    ArSepd,
    #[serde(rename = "reg-sgld")]
    RegSgld,
}

impl StudyModel {
    pub fn family(&self) -> Family {
        match self {
            StudyModel::ArSepd => Family::Sepd,
            StudyModel::RegSgld => Family::Sgld,
        }
    }
    pub fn name(&self) -> &'static str {
        match self {
            StudyModel::ArSepd => "ar-sepd",
            StudyModel::RegSgld => "reg-sgld",
        }
    }
}

impl fmt::Display for StudyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StudyModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ar-sepd" | "ar" => Ok(StudyModel::ArSepd),
            "reg-sgld" | "regression" | "reg" => Ok(StudyModel::RegSgld),
            other => Err(Error::Config(format!("unknown model '{other}' (expected ar-sepd or reg-sgld)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageConfig {
    pub model: StudyModel,
    pub p_values: Vec<u32>,
    pub alphas: Vec<f64>,
    /// Series lengths (AR) or numbers of observations (regression).
    pub sizes: Vec<usize>,
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_phi1")]
    pub phi1: f64,
    #[serde(default = "default_beta")]
    pub beta: [f64; 2],
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default)]
    pub mcmc: MwgConfig,
}

fn default_phi1() -> f64 {
    0.5
}
fn default_beta() -> [f64; 2] {
    [1.5, -1.0]
}
fn default_sigma() -> f64 {
    1.0
}

impl CoverageConfig {
    /// Small grid for routine checks: p ≤ 5, α = 1/2, 50 replicates,
    /// 4000 iterations.
    pub fn desk(model: StudyModel) -> Self {
        Self {
            model,
            p_values: (1..=5).collect(),
            alphas: vec![0.5],
            sizes: match model {
                StudyModel::ArSepd => vec![100, 250],
                StudyModel::RegSgld => vec![30, 100],
            },
            replicates: 50,
            seed: 20_240_101,
            phi1: default_phi1(),
            beta: default_beta(),
            sigma: default_sigma(),
            mcmc: MwgConfig::with_iterations(4_000, 1_000),
        }
    }

    /// Full grid: p ≤ 20, α ∈ {0.3, 0.5, 0.8}, 250 replicates.
    pub fn paper(model: StudyModel) -> Self {
        let (n_iter, n_burn) = match model {
            StudyModel::ArSepd => (20_000, 5_000),
            StudyModel::RegSgld => (10_000, 5_000),
        };
        Self {
            p_values: (1..=20).collect(),
            alphas: vec![0.3, 0.5, 0.8],
            replicates: 250,
            mcmc: MwgConfig::with_iterations(n_iter, n_burn),
            ..Self::desk(model)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.p_values.is_empty() || self.alphas.is_empty() || self.sizes.is_empty() {
            return Err(Error::Config("p_values, alphas and sizes must be non-empty".into()));
        }
        if let Some(p) = self.p_values.iter().find(|&&p| p == 0 || p > self.mcmc.p_max) {
            return Err(Error::Config(format!("true p={p} outside 1..={}", self.mcmc.p_max)));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(Error::Config(format!("alpha={a} outside (0, 1)")));
        }
        if let Some(n) = self.sizes.iter().find(|&&n| n < 3) {
            return Err(Error::Config(format!("sample size {n} is below 3")));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!("sigma={} must be positive", self.sigma)));
        }
        self.mcmc.validate(None)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCell {
    pub p: u32,
    pub alpha: f64,
    pub n: usize,
    pub replicates: usize,
    /// Fraction of replicates whose 95% interval for p contains the truth.
    pub coverage: f64,
    /// √MSE(posterior mean of p) / p.
    pub rel_rmse: f64,
}

/// Posterior summary of p for one simulated dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Produces a posterior summary of p for a model. The default runs the
/// sampler; tests substitute stubs.
pub trait TailEstimator: Sync {
    fn estimate(&self, model: &ModelSpec, tail_prior: &TailPrior, config: &MwgConfig, stream: &mut RngStream) -> Result<TailEstimate>;
}

pub struct McmcEstimator;

impl TailEstimator for McmcEstimator {
    fn estimate(&self, model: &ModelSpec, tail_prior: &TailPrior, config: &MwgConfig, stream: &mut RngStream) -> Result<TailEstimate> {
        let chain = run_mwg(model, Some(tail_prior), config, stream)?;
        let s = summarize_draws("p", chain.column("p").expect("two-piece chain has p"))?;
        Ok(TailEstimate {
            mean: s.mean,
            lower: s.lower,
            upper: s.upper,
        })
    }
}

/// Seed of one replicate; depends only on the cell and replicate index.
pub fn replicate_seed(master: u64, p: u32, alpha: f64, n: usize, rep: usize) -> u64 {
    mix_seed(&[master, p as u64, alpha.to_bits(), n as u64, rep as u64])
}

/// Simulates a dataset of the given design and wraps it for sampling.
pub fn simulate_model(
    model: StudyModel,
    errors: &TwoPieceParams,
    phi1: f64,
    beta: &[f64; 2],
    n: usize,
    stream: &mut RngStream,
) -> Result<ModelSpec> {
    match model {
        StudyModel::ArSepd => {
            let y = simulate_ar(stream, Family::Sepd, phi1, errors, n)?;
            Ok(ModelSpec::ar(&ArSepdModel::new(y)?, ErrorFamily::Sepd))
        }
        StudyModel::RegSgld => {
            let (y, x) = simulate_regression(stream, Family::Sgld, beta, errors, n)?;
            Ok(ModelSpec::regression(&RegSgldModel::new(y, x)?, ErrorFamily::Sgld))
        }
    }
}

pub fn run_coverage_study(config: &CoverageConfig) -> Result<Vec<CoverageCell>> {
    run_coverage_study_with(config, &McmcEstimator)
}

pub fn run_coverage_study_with(config: &CoverageConfig, estimator: &dyn TailEstimator) -> Result<Vec<CoverageCell>> {
    config.validate()?;
    let prior = build_tail_prior(config.model.family(), config.mcmc.p_max)?;
    let mut cells = Vec::new();
    for &n in &config.sizes {
        for &alpha in &config.alphas {
            for &p in &config.p_values {
                cells.push((p, alpha, n));
            }
        }
    }
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..config.replicates).map(move |r| (c, r)))
        .collect();
    let results: Vec<Result<TailEstimate>> = jobs
        .par_iter()
        .map(|&(c, rep)| {
            let (p, alpha, n) = cells[c];
            let mut stream = RngStream::new(replicate_seed(config.seed, p, alpha, n, rep));
            let errors = TwoPieceParams::new(alpha, p, 0.0, config.sigma)?;
            let model = simulate_model(config.model, &errors, config.phi1, &config.beta, n, &mut stream)?;
            let mut chain_stream = stream.derive(1);
            estimator.estimate(&model, &prior, &config.mcmc, &mut chain_stream)
        })
        .collect();

    let mut out = Vec::with_capacity(cells.len());
    for (c, &(p, alpha, n)) in cells.iter().enumerate() {
        let mut hits = 0usize;
        let mut sq = 0.0;
        for (rep, r) in results[c * config.replicates..(c + 1) * config.replicates].iter().enumerate() {
            let est = r.as_ref().map_err(|e| {
                Error::Numerical(format!("cell p={p} alpha={alpha} n={n} replicate {rep}: {e}"))
            })?;
            if est.lower <= p as f64 && p as f64 <= est.upper {
                hits += 1;
            }
            sq += (est.mean - p as f64).powi(2);
        }
        let reps = config.replicates as f64;
        out.push(CoverageCell {
            p,
            alpha,
            n,
            replicates: config.replicates,
            coverage: hits as f64 / reps,
            rel_rmse: (sq / reps).sqrt() / p as f64,
        });
    }
    Ok(out)
}

/// True parameters of an inference demo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoSpec {
    pub model: StudyModel,
    pub alpha: f64,
    pub p: u32,
    pub sigma: f64,
    /// φ₁ for the AR design; (β₀, β₁) for the regression design.
    pub coef: Vec<f64>,
    pub n: usize,
    pub mcmc: MwgConfig,
}

impl DemoSpec {
    /// AR(1) with φ₁ = −0.5 and SEPD(0.23, 9, 0, 1) errors, T = 300.
    pub fn ar_default() -> Self {
        Self {
            model: StudyModel::ArSepd,
            alpha: 0.23,
            p: 9,
            sigma: 1.0,
            coef: vec![-0.5],
            n: 300,
            mcmc: MwgConfig::with_iterations(20_000, 5_000),
        }
    }

    /// Regression with β = (−2.5, 3) and SGLD(0.13, 9, 0, 1) errors, n = 300.
    pub fn regression_default() -> Self {
        Self {
            model: StudyModel::RegSgld,
            alpha: 0.13,
            p: 9,
            sigma: 1.0,
            coef: vec![-2.5, 3.0],
            n: 300,
            mcmc: MwgConfig::with_iterations(30_000, 5_000),
        }
    }

    pub fn default_for(model: StudyModel) -> Self {
        match model {
            StudyModel::ArSepd => Self::ar_default(),
            StudyModel::RegSgld => Self::regression_default(),
        }
    }

    /// Names and true values of every sampled parameter.
    pub fn truth(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = match self.model {
            StudyModel::ArSepd => vec![("phi1".into(), self.coef[0])],
            StudyModel::RegSgld => self.coef.iter().enumerate().map(|(i, &b)| (format!("beta{i}"), b)).collect(),
        };
        out.push(("alpha".into(), self.alpha));
        out.push(("p".into(), self.p as f64));
        out.push(("sigma".into(), self.sigma));
        out
    }
}

#[derive(Debug, Clone)]
pub struct DemoResult {
    pub summary: PosteriorSummary,
    pub chain: Chain,
    pub data: ModelSpec,
}

/// Simulates one dataset and runs the full sampler on it.
pub fn run_inference_demo(spec: &DemoSpec, seed: u64) -> Result<DemoResult> {
    let expected = match spec.model {
        StudyModel::ArSepd => 1,
        StudyModel::RegSgld => 2,
    };
    if spec.coef.len() != expected {
        return Err(Error::Config(format!("{} needs {expected} coefficients, got {}", spec.model, spec.coef.len())));
    }
    let errors = TwoPieceParams::new(spec.alpha, spec.p, 0.0, spec.sigma)?;
    let prior = build_tail_prior(spec.model.family(), spec.mcmc.p_max)?;
    let mut stream = RngStream::new(seed);
    let beta = match spec.model {
        StudyModel::ArSepd => [0.0, 0.0],
        StudyModel::RegSgld => [spec.coef[0], spec.coef[1]],
    };
    let data = simulate_model(spec.model, &errors, spec.coef[0], &beta, spec.n, &mut stream)?;
    let chain = run_mwg(&data, Some(&prior), &spec.mcmc, &mut stream.derive(1))?;
    let summary = summarize(&chain)?;
    Ok(DemoResult { summary, chain, data })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KlRow {
    pub p: u32,
    /// D(f_p ‖ f_{p−1}).
    pub down: f64,
    /// D(f_p ‖ f_{p+1}).
    pub up: f64,
}

/// Divergences from each p to its two neighbours.
pub fn emit_kl_tables(family: Family, p_values: &[u32]) -> Result<Vec<KlRow>> {
    p_values
        .iter()
        .map(|&p| {
            if p < 2 {
                return Err(Error::Domain(format!("KL table rows need p >= 2, got {p}")));
            }
            Ok(KlRow {
                p,
                down: kl_closed_form(family, p, p - 1)?,
                up: kl_closed_form(family, p, p + 1)?,
            })
        })
        .collect()
}

/// Rows p = 2..30 followed by the extended rows 30, 60, …, 180.
pub fn standard_kl_rows() -> Vec<u32> {
    (2..=30).chain((1..=6).map(|k| 30 * k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct FullRange;
    impl TailEstimator for FullRange {
        fn estimate(&self, _: &ModelSpec, prior: &TailPrior, _: &MwgConfig, _: &mut RngStream) -> Result<TailEstimate> {
            Ok(TailEstimate {
                mean: 1.0,
                lower: 1.0,
                upper: prior.p_max() as f64,
            })
        }
    }

    /// Reports the variance of the simulated response as the "mean", which
    /// makes results depend on the replicate's data and seed.
    struct DataEcho;
    impl TailEstimator for DataEcho {
        fn estimate(&self, model: &ModelSpec, _: &TailPrior, _: &MwgConfig, stream: &mut RngStream) -> Result<TailEstimate> {
            let y = model.response();
            let m = y.iter().sum::<f64>() / y.len() as f64;
            let v = y.iter().map(|a| (a - m).powi(2)).sum::<f64>() / y.len() as f64;
            Ok(TailEstimate {
                mean: v + stream.uniform(),
                lower: 0.0,
                upper: v,
            })
        }
    }

    fn tiny(model: StudyModel) -> CoverageConfig {
        CoverageConfig {
            p_values: vec![1, 3],
            alphas: vec![0.3, 0.5],
            sizes: vec![20, 40],
            replicates: 4,
            ..CoverageConfig::desk(model)
        }
    }

    #[test]
    fn full_range_interval_covers_everything() {
        let cfg = CoverageConfig {
            replicates: 1,
            ..tiny(StudyModel::ArSepd)
        };
        let cells = run_coverage_study_with(&cfg, &FullRange).unwrap();
        assert_eq!(cells.len(), 8);
        assert!(cells.iter().all(|c| c.coverage == 1.0));
        let cells = run_coverage_study_with(&tiny(StudyModel::RegSgld), &FullRange).unwrap();
        assert!(cells.iter().all(|c| c.coverage == 1.0 && c.rel_rmse >= 0.0));
    }

    #[test]
    fn reproducible_and_cell_independent() {
        for model in [StudyModel::ArSepd, StudyModel::RegSgld] {
            let cfg = tiny(model);
            let a = run_coverage_study_with(&cfg, &DataEcho).unwrap();
            let b = run_coverage_study_with(&cfg, &DataEcho).unwrap();
            assert_eq!(a, b);
            let single = CoverageConfig {
                p_values: vec![3],
                alphas: vec![0.5],
                sizes: vec![40],
                ..cfg.clone()
            };
            let s = run_coverage_study_with(&single, &DataEcho).unwrap();
            let same = a.iter().find(|c| c.p == 3 && c.alpha == 0.5 && c.n == 40).unwrap();
            assert_eq!(&s[0], same);
        }
    }

    #[test]
    fn config_validation() {
        let base = CoverageConfig::desk(StudyModel::ArSepd);
        assert!(base.validate().is_ok());
        assert!(CoverageConfig { replicates: 0, ..base.clone() }.validate().is_err());
        assert!(CoverageConfig { p_values: vec![], ..base.clone() }.validate().is_err());
        assert!(CoverageConfig { alphas: vec![1.0], ..base.clone() }.validate().is_err());
        assert!(CoverageConfig { p_values: vec![101], ..base.clone() }.validate().is_err());
        assert!(CoverageConfig::paper(StudyModel::RegSgld).validate().is_ok());
    }

    #[test]
    fn kl_rows() {
        let rows = emit_kl_tables(Family::Sepd, &[15]).unwrap();
        assert!((rows[0].down - 8.1765e-4).abs() < 5e-9);
        assert!((rows[0].up - 8.4480e-4).abs() < 5e-9);
        let rows = emit_kl_tables(Family::Sgld, &[60]).unwrap();
        assert!((rows[0].down - 7.0814e-5).abs() < 5e-10);
        assert!((rows[0].up - 6.9252e-5).abs() < 5e-10);
        assert_eq!(rows[0].up, kl_closed_form(Family::Sgld, 60, 61).unwrap());
        assert!(emit_kl_tables(Family::Sepd, &[1]).is_err());
        let p = standard_kl_rows();
        assert_eq!(p.len(), 35);
        assert_eq!(&p[27..], &[29, 30, 30, 60, 90, 120, 150, 180]);
    }

    #[test]
    fn demo_is_deterministic() {
        let spec = DemoSpec {
            n: 60,
            mcmc: MwgConfig::with_iterations(1000, 200),
            ..DemoSpec::ar_default()
        };
        let a = run_inference_demo(&spec, 4).unwrap();
        let b = run_inference_demo(&spec, 4).unwrap();
        assert_eq!(a.chain, b.chain);
        assert_eq!(a.summary, b.summary);
        assert_eq!(spec.truth().len(), 4);
        let bad = DemoSpec { coef: vec![1.0, 2.0], ..spec };
        assert!(run_inference_demo(&bad, 4).is_err());
    }
}
