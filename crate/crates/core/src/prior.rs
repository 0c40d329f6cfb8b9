//! Loss-based prior on the integer tail parameter, and the Jeffreys-type
//! priors used for the remaining parameters.
//!
//! The mass of each `p` is `exp(min_{p′≠p} D_KL(f_p ‖ f_p′)) − 1`,
//! normalized over `1..=p_max`. Because the divergence is free of (α, μ, σ)
//! the prior is the same for every value of those parameters.

use serde::Serialize;

use crate::distributions::Family;
use crate::divergence::kl_closed_form;
use crate::error::{Error, Result};
use crate::special::digamma_unchecked;

pub const DEFAULT_P_MAX: u32 = 100;

/// Two candidate minimizers whose divergences differ by less than this are
/// treated as tied; the smaller `p′` wins.
const ARGMIN_TIE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailPrior {
    family: Family,
    p_max: u32,
    masses: Vec<f64>,
    argmin_table: Vec<u32>,
    kl_min: Vec<f64>,
    unnormalized: Vec<f64>,
}

impl TailPrior {
    pub fn family(&self) -> Family {
        self.family
    }
    pub fn p_max(&self) -> u32 {
        self.p_max
    }
    /// Normalized masses; index 0 holds p = 1.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }
    /// Minimizing p′ for each p; index 0 holds p = 1.
    pub fn argmin_table(&self) -> &[u32] {
        &self.argmin_table
    }
    pub fn kl_min(&self) -> &[f64] {
        &self.kl_min
    }
    pub fn unnormalized(&self) -> &[f64] {
        &self.unnormalized
    }

    /// π(p); zero outside `1..=p_max`.
    pub fn mass(&self, p: u32) -> f64 {
        if p == 0 || p > self.p_max {
            0.0
        } else {
            self.masses[(p - 1) as usize]
        }
    }

    pub fn log_mass(&self, p: u32) -> f64 {
        self.mass(p).ln()
    }
}

/// Normalizes nonnegative weights to a probability vector.
pub fn normalize(weights: &[f64]) -> Result<Vec<f64>> {
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::Numerical("prior weights must be finite and nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Numerical("prior weights sum to zero".into()));
    }
    Ok(weights.iter().map(|w| w / total).collect())
}

/// Builds the prior with the family's closed-form divergence.
pub fn build_tail_prior(family: Family, p_max: u32) -> Result<TailPrior> {
    build_tail_prior_with(family, p_max, |p, q| kl_closed_form(family, p, q))
}

/// Builds the prior from an arbitrary divergence backend, scanning every
/// `p′ ∈ 1..=p_max, p′ ≠ p` for the minimum.
pub fn build_tail_prior_with<F>(family: Family, p_max: u32, mut kl: F) -> Result<TailPrior>
where
    F: FnMut(u32, u32) -> Result<f64>,
{
    if p_max < 2 {
        return Err(Error::Config(format!("p_max must be at least 2, got {p_max}")));
    }
    let n = p_max as usize;
    let mut argmin_table = Vec::with_capacity(n);
    let mut kl_min = Vec::with_capacity(n);
    let mut unnormalized = Vec::with_capacity(n);
    for p in 1..=p_max {
        let mut best: Option<(u32, f64)> = None;
        for q in (1..=p_max).filter(|&q| q != p) {
            let d = kl(p, q)?;
            match best {
                Some((_, b)) if d >= b - ARGMIN_TIE_TOL => {}
                _ => best = Some((q, d)),
            }
        }
        let (q, d) = best.expect("p_max >= 2 leaves a candidate");
        argmin_table.push(q);
        kl_min.push(d);
        unnormalized.push(d.exp_m1());
    }
    let masses = normalize(&unnormalized)?;
    Ok(TailPrior {
        family,
        p_max,
        masses,
        argmin_table,
        kl_min,
        unnormalized,
    })
}

/// Unnormalized SGLD mass in its neighbour form,
/// `p/(2(2p+1)) · exp{2[ψ(2p) − ψ(p)]} − 1`.
pub fn sgld_neighbour_mass(p: u32) -> f64 {
    let p = p as f64;
    let log_term = (p / (2.0 * (2.0 * p + 1.0))).ln() + 2.0 * (digamma_unchecked(2.0 * p) - digamma_unchecked(p));
    log_term.exp_m1()
}

#[derive(Debug, Clone, Serialize)]
pub struct ProprietyReport {
    pub family: Family,
    pub p_limit: u32,
    /// Unnormalized masses for p = 1..=p_limit.
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// First p after which the terms decrease monotonically.
    pub monotone_from: Option<u32>,
    /// terms[p_limit] / terms[p_limit / 2].
    pub tail_ratio: f64,
    /// Least-squares slope of log(term) on log(p) over the last decade.
    pub log_log_slope: f64,
    /// |S(p_limit) − S(p_limit/2)|, a Cauchy-type increment of the partial sums.
    pub last_increment: f64,
    pub summable: bool,
}

pub const PROPRIETY_P_LIMIT: u32 = 10_000;

/// Checks numerically that the unnormalized prior is summable over all p.
///
/// Beyond the scanned `p_max` the minimizer is taken from the nearest
/// neighbours `{p − 1, p + 1}`, which is where `build_tail_prior` finds it.
pub fn tail_prior_propriety_check(family: Family) -> Result<ProprietyReport> {
    propriety_check_upto(family, PROPRIETY_P_LIMIT)
}

pub fn propriety_check_upto(family: Family, p_limit: u32) -> Result<ProprietyReport> {
    if p_limit < 20 {
        return Err(Error::Config("propriety check needs p_limit >= 20".into()));
    }
    let mut terms = Vec::with_capacity(p_limit as usize);
    for p in 1..=p_limit {
        let up = kl_closed_form(family, p, p + 1)?;
        let d = if p > 1 { up.min(kl_closed_form(family, p, p - 1)?) } else { up };
        terms.push(d.exp_m1());
    }
    let mut acc = 0.0;
    let partial_sums: Vec<f64> = terms
        .iter()
        .map(|t| {
            acc += t;
            acc
        })
        .collect();
    let monotone_from = (0..terms.len())
        .rev()
        .take_while(|&i| i == 0 || terms[i] < terms[i - 1])
        .last()
        .map(|i| i as u32 + 1);
    let last = terms.len() - 1;
    let half = (p_limit / 2) as usize - 1;
    let tail_ratio = terms[last] / terms[half];
    let start = (p_limit / 10) as usize;
    let (xs, ys): (Vec<f64>, Vec<f64>) = (start..terms.len())
        .map(|i| (((i + 1) as f64).ln(), terms[i].ln()))
        .unzip();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let log_log_slope = sxy / sxx;
    let last_increment = (partial_sums[last] - partial_sums[half]).abs();
    Ok(ProprietyReport {
        family,
        p_limit,
        terms,
        partial_sums,
        monotone_from,
        tail_ratio,
        log_log_slope,
        last_increment,
        summable: log_log_slope < -1.0 && tail_ratio < 1.0,
    })
}

/// Beta(1/2, 1/2) log-density; −∞ outside (0, 1).
pub fn log_alpha_prior(alpha: f64) -> f64 {
    if alpha > 0.0 && alpha < 1.0 {
        -std::f64::consts::PI.ln() - 0.5 * (alpha.ln() + (1.0 - alpha).ln())
    } else {
        f64::NEG_INFINITY
    }
}

/// Improper location-scale prior log π(μ, σ) = −log σ; −∞ for σ ≤ 0.
pub fn log_location_scale_prior(_mu: f64, sigma: f64) -> f64 {
    if sigma > 0.0 {
        -sigma.ln()
    } else {
        f64::NEG_INFINITY
    }
}
