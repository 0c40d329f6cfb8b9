//! Metropolis-within-Gibbs over (coefficients, α, σ, p).
//!
//! Each iteration visits, in order:
//! 1. coefficients: Gaussian random walk shaped by (XᵀX)⁻¹;
//! 2. α: Gaussian random walk on logit α;
//! 3. σ: Gaussian random walk on log σ;
//! 4. p: a ±1 move, uniform over the neighbours inside `1..=p_max`;
//! 5. (p, σ): the same ±1 move for p, with σ rescaled so the error variance
//!    is unchanged. Moves along the ridge where p and σ trade off.
//!
//! The target is likelihood × Zellner prior × Beta(½,½) × 1/σ × π(p).
//! Blocks 2, 4 and 5 are skipped for Gaussian errors. Proposal scales may be
//! tuned during burn-in and are frozen afterwards.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::model::ModelSpec;
use crate::distributions::base_log_second_moment;
use crate::error::{Error, Result};
use crate::prior::{log_alpha_prior, log_location_scale_prior, TailPrior};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    Coef,
    Alpha,
    Sigma,
    P,
    /// Joint ±1 move of p with σ rescaled to keep the error variance fixed.
    PSigma,
}

impl Block {
    pub const ALL: [Block; 5] = [Block::Coef, Block::Alpha, Block::Sigma, Block::P, Block::PSigma];

    pub fn name(&self) -> &'static str {
        match self {
            Block::Coef => "coef",
            Block::Alpha => "alpha",
            Block::Sigma => "sigma",
            Block::P => "p",
            Block::PSigma => "p_sigma",
        }
    }
}

/// Random-walk standard deviations on the transformed scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProposalScales {
    /// Multiplier of the (XᵀX)⁻¹-shaped coefficient step, in units of the
    /// least-squares residual standard deviation.
    pub coef: f64,
    pub logit_alpha: f64,
    pub log_sigma: f64,
}

impl Default for ProposalScales {
    fn default() -> Self {
        Self {
            coef: 0.1,
            logit_alpha: 0.1,
            log_sigma: 0.1,
        }
    }
}

/// Which blocks are updated; disabled blocks stay at their initial value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ActiveBlocks {
    pub coef: bool,
    pub alpha: bool,
    pub sigma: bool,
    pub p: bool,
    pub p_sigma: bool,
}

impl Default for ActiveBlocks {
    fn default() -> Self {
        Self {
            coef: true,
            alpha: true,
            sigma: true,
            p: true,
            p_sigma: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MwgConfig {
    pub n_iter: usize,
    pub n_burn: usize,
    pub p_max: u32,
    pub scales: ProposalScales,
    /// Tune scales toward 20–40% acceptance during burn-in.
    pub adapt: bool,
    /// Keep every `thin`-th post-burn-in draw.
    pub thin: usize,
    /// When false the likelihood is dropped and the chain targets the prior.
    pub use_likelihood: bool,
    pub blocks: ActiveBlocks,
    /// Overrides the default starting point.
    pub init: Option<State>,
}

impl Default for MwgConfig {
    fn default() -> Self {
        Self {
            n_iter: 20_000,
            n_burn: 5_000,
            p_max: crate::prior::DEFAULT_P_MAX,
            scales: ProposalScales::default(),
            adapt: true,
            thin: 1,
            use_likelihood: true,
            blocks: ActiveBlocks::default(),
            init: None,
        }
    }
}

impl MwgConfig {
    pub fn with_iterations(n_iter: usize, n_burn: usize) -> Self {
        Self {
            n_iter,
            n_burn,
            ..Self::default()
        }
    }

    pub fn validate(&self, tail_prior: Option<&TailPrior>) -> Result<()> {
        if self.n_iter == 0 || self.n_burn >= self.n_iter {
            return Err(Error::Config(format!(
                "need 0 <= n_burn < n_iter, got n_burn={} n_iter={}",
                self.n_burn, self.n_iter
            )));
        }
        if self.thin == 0 {
            return Err(Error::Config("thin must be at least 1".into()));
        }
        let s = &self.scales;
        if [s.coef, s.logit_alpha, s.log_sigma].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Config("proposal scales must be finite and nonnegative".into()));
        }
        if let Some(prior) = tail_prior {
            if prior.p_max() != self.p_max {
                return Err(Error::Config(format!(
                    "config p_max={} but tail prior has p_max={}",
                    self.p_max,
                    prior.p_max()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub coef: Vec<f64>,
    pub alpha: f64,
    pub sigma: f64,
    pub p: u32,
}

/// Retained draws, one column per parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chain {
    pub names: Vec<String>,
    pub draws: Vec<Vec<f64>>,
    /// Post-burn-in acceptance rate of each active block.
    pub acceptance: Vec<(Block, f64)>,
    pub final_scales: ProposalScales,
    pub seed: u64,
    pub config: MwgConfig,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.draws.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.draws[i].as_slice())
    }

    /// Parameter state of retained draw `i`.
    pub fn state(&self, i: usize, n_coef: usize) -> State {
        let get = |name: &str, default: f64| self.column(name).map_or(default, |c| c[i]);
        State {
            coef: (0..n_coef).map(|j| self.draws[j][i]).collect(),
            alpha: get("alpha", 0.5),
            sigma: get("sigma", f64::NAN),
            p: get("p", 2.0) as u32,
        }
    }
}

/// Log posterior kernel and block ratios for a model and its priors.
pub struct Posterior<'a> {
    model: &'a ModelSpec,
    tail_prior: Option<&'a TailPrior>,
    use_likelihood: bool,
}

impl<'a> Posterior<'a> {
    pub fn new(model: &'a ModelSpec, tail_prior: Option<&'a TailPrior>, use_likelihood: bool) -> Result<Self> {
        if model.errors().two_piece().is_some() {
            match tail_prior {
                None => return Err(Error::Config("two-piece errors need a tail prior".into())),
                Some(tp) if tp.family() != model.errors().two_piece().unwrap() => {
                    return Err(Error::Config(format!(
                        "tail prior built for {} but model errors are {:?}",
                        tp.family(),
                        model.errors()
                    )))
                }
                _ => {}
            }
        }
        Ok(Self {
            model,
            tail_prior,
            use_likelihood,
        })
    }

    fn two_piece(&self) -> bool {
        self.model.errors().two_piece().is_some()
    }

    pub fn loglik(&self, state: &State) -> f64 {
        if !self.use_likelihood {
            return 0.0;
        }
        let res = self.model.residuals(&state.coef);
        self.model.loglik_residuals(&res, state.alpha, state.p, state.sigma)
    }

    pub fn log_prior(&self, state: &State) -> f64 {
        let mut lp = self.model.log_coef_prior(&state.coef) + log_location_scale_prior(0.0, state.sigma);
        if self.two_piece() {
            lp += log_alpha_prior(state.alpha);
            lp += self.tail_prior.map_or(f64::NEG_INFINITY, |tp| tp.log_mass(state.p));
        }
        lp
    }

    /// Unnormalized log posterior.
    pub fn log_posterior(&self, state: &State) -> f64 {
        let lp = self.log_prior(state);
        if lp == f64::NEG_INFINITY {
            return lp;
        }
        lp + self.loglik(state)
    }

    /// Log Metropolis–Hastings ratio for moving `block` from `current` to
    /// `proposed`, including the Jacobian of the transformed random walk or
    /// the neighbour-count correction of the p move.
    pub fn block_log_ratio(&self, block: Block, current: &State, proposed: &State, p_max: u32) -> f64 {
        let target = self.log_posterior(proposed) - self.log_posterior(current);
        target + proposal_correction(block, current, proposed, p_max)
    }
}

fn proposal_correction(block: Block, current: &State, proposed: &State, p_max: u32) -> f64 {
    match block {
        Block::Coef => 0.0,
        Block::Alpha => {
            let (a, b) = (proposed.alpha, current.alpha);
            (a * (1.0 - a)).ln() - (b * (1.0 - b)).ln()
        }
        Block::Sigma => proposed.sigma.ln() - current.sigma.ln(),
        Block::P => (neighbour_count(current.p, p_max) as f64).ln() - (neighbour_count(proposed.p, p_max) as f64).ln(),
        Block::PSigma => {
            proposal_correction(Block::P, current, proposed, p_max) + proposal_correction(Block::Sigma, current, proposed, p_max)
        }
    }
}

/// Number of ±1 neighbours of `p` inside `1..=p_max`.
pub fn neighbour_count(p: u32, p_max: u32) -> u32 {
    u32::from(p > 1) + u32::from(p < p_max)
}

/// Proposes a ±1 move uniformly among the valid neighbours.
pub fn propose_neighbour(p: u32, p_max: u32, stream: &mut RngStream) -> u32 {
    let up_ok = p < p_max;
    let down_ok = p > 1;
    match (down_ok, up_ok) {
        (true, true) => {
            if stream.uniform() < 0.5 {
                p - 1
            } else {
                p + 1
            }
        }
        (true, false) => p - 1,
        (false, true) => p + 1,
        (false, false) => p,
    }
}

/// One Metropolis step on an integer target over `1..=p_max` with the ±1
/// neighbour proposal. Returns the new value and whether it was accepted.
pub fn discrete_neighbour_step<F: Fn(u32) -> f64>(p: u32, p_max: u32, log_target: F, stream: &mut RngStream) -> (u32, bool) {
    let q = propose_neighbour(p, p_max, stream);
    let log_ratio = log_target(q) - log_target(p) + (neighbour_count(p, p_max) as f64).ln()
        - (neighbour_count(q, p_max) as f64).ln();
    if stream.uniform().ln() < log_ratio {
        (q, true)
    } else {
        (p, false)
    }
}

fn logit(a: f64) -> f64 {
    (a / (1.0 - a)).ln()
}

fn inv_logit(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Default starting point: least-squares coefficients, residual standard
/// deviation, α = 1/2, p = 2.
pub fn initial_state(model: &ModelSpec, p_max: u32) -> Result<State> {
    let (coef, sd) = model.least_squares()?;
    let sigma = if sd > 0.0 && sd.is_finite() { sd } else { 1.0 };
    Ok(State {
        coef,
        alpha: 0.5,
        sigma,
        p: 2.min(p_max),
    })
}

const ADAPT_WINDOW: usize = 50;

struct Tally {
    proposed: usize,
    accepted: usize,
    window_proposed: usize,
    window_accepted: usize,
}

impl Tally {
    fn new() -> Self {
        Self {
            proposed: 0,
            accepted: 0,
            window_proposed: 0,
            window_accepted: 0,
        }
    }
    fn record(&mut self, accepted: bool, counted: bool) {
        self.window_proposed += 1;
        self.window_accepted += usize::from(accepted);
        if counted {
            self.proposed += 1;
            self.accepted += usize::from(accepted);
        }
    }
    fn window_rate(&mut self) -> f64 {
        let r = self.window_accepted as f64 / self.window_proposed.max(1) as f64;
        self.window_proposed = 0;
        self.window_accepted = 0;
        r
    }
    fn rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

fn tune(scale: &mut f64, rate: f64) {
    if rate < 0.2 {
        *scale *= 0.7;
    } else if rate > 0.4 {
        *scale *= 1.3;
    }
}

/// Runs the Metropolis-within-Gibbs sampler. `tail_prior` is required for
/// two-piece errors and ignored for Gaussian errors.
pub fn run_mwg(model: &ModelSpec, tail_prior: Option<&TailPrior>, config: &MwgConfig, stream: &mut RngStream) -> Result<Chain> {
    let two_piece = model.errors().two_piece().is_some();
    config.validate(if two_piece { tail_prior } else { None })?;
    let post = Posterior::new(model, tail_prior, config.use_likelihood)?;
    let seed = stream.seed();

    let mut state = match &config.init {
        Some(s) => s.clone(),
        None => initial_state(model, config.p_max)?,
    };
    if state.coef.len() != model.n_coef() {
        return Err(Error::Config("initial state has the wrong number of coefficients".into()));
    }
    let mut current_lp = post.log_posterior(&state);
    if !current_lp.is_finite() {
        return Err(Error::Numerical(format!("initial state has log posterior {current_lp}")));
    }

    let (_, ls_sd) = model.least_squares()?;
    let step_unit = if ls_sd > 0.0 && ls_sd.is_finite() { ls_sd } else { 1.0 };
    let coef_factor: DMatrix<f64> = model.coef_proposal_factor()? * step_unit;
    let k = model.n_coef();

    let blocks = ActiveBlocks {
        alpha: config.blocks.alpha && two_piece,
        p: config.blocks.p && two_piece,
        p_sigma: config.blocks.p_sigma && two_piece,
        ..config.blocks
    };
    let mut scales = config.scales;
    let mut tallies: Vec<Tally> = (0..Block::ALL.len()).map(|_| Tally::new()).collect();

    let mut names: Vec<String> = model.coef_names().to_vec();
    if two_piece {
        names.push("alpha".into());
        names.push("p".into());
    }
    names.push("sigma".into());
    let kept = (config.n_iter - config.n_burn).div_ceil(config.thin);
    let mut draws: Vec<Vec<f64>> = names.iter().map(|_| Vec::with_capacity(kept)).collect();

    for iter in 0..config.n_iter {
        let post_burn = iter >= config.n_burn;

        if blocks.coef {
            let z = DVector::from_fn(k, |_, _| stream.normal());
            let step = &coef_factor * z * scales.coef;
            let mut prop = state.clone();
            for (c, s) in prop.coef.iter_mut().zip(step.iter()) {
                *c += s;
            }
            let acc = mh_accept(&post, &mut state, &mut current_lp, prop, 0.0, stream);
            tallies[0].record(acc, post_burn);
        }
        if blocks.alpha {
            let mut prop = state.clone();
            prop.alpha = inv_logit(logit(state.alpha) + scales.logit_alpha * stream.normal());
            let corr = proposal_correction(Block::Alpha, &state, &prop, config.p_max);
            let acc = if prop.alpha > 0.0 && prop.alpha < 1.0 {
                mh_accept(&post, &mut state, &mut current_lp, prop, corr, stream)
            } else {
                false
            };
            tallies[1].record(acc, post_burn);
        }
        if blocks.sigma {
            let mut prop = state.clone();
            prop.sigma = state.sigma * (scales.log_sigma * stream.normal()).exp();
            let corr = proposal_correction(Block::Sigma, &state, &prop, config.p_max);
            let acc = mh_accept(&post, &mut state, &mut current_lp, prop, corr, stream);
            tallies[2].record(acc, post_burn);
        }
        if blocks.p {
            let mut prop = state.clone();
            prop.p = propose_neighbour(state.p, config.p_max, stream);
            let corr = proposal_correction(Block::P, &state, &prop, config.p_max);
            let acc = mh_accept(&post, &mut state, &mut current_lp, prop, corr, stream);
            tallies[3].record(acc, post_burn);
        }
        if blocks.p_sigma {
            let family = model.errors().two_piece().expect("two-piece errors");
            let mut prop = state.clone();
            prop.p = propose_neighbour(state.p, config.p_max, stream);
            let log_m2 = |p: u32| base_log_second_moment(family, p as f64);
            prop.sigma = state.sigma * (0.5 * (log_m2(state.p) - log_m2(prop.p))).exp();
            let corr = proposal_correction(Block::PSigma, &state, &prop, config.p_max);
            let acc = mh_accept(&post, &mut state, &mut current_lp, prop, corr, stream);
            tallies[4].record(acc, post_burn);
        }

        if !post_burn && config.adapt && (iter + 1) % ADAPT_WINDOW == 0 {
            tune(&mut scales.coef, tallies[0].window_rate());
            tune(&mut scales.logit_alpha, tallies[1].window_rate());
            tune(&mut scales.log_sigma, tallies[2].window_rate());
        }
        if iter + 1 == config.n_burn {
            tallies.iter_mut().for_each(|t| {
                t.window_rate();
            });
        }

        if post_burn && (iter - config.n_burn).is_multiple_of(config.thin) {
            let mut col = 0;
            for c in &state.coef {
                draws[col].push(*c);
                col += 1;
            }
            if two_piece {
                draws[col].push(state.alpha);
                draws[col + 1].push(state.p as f64);
                col += 2;
            }
            draws[col].push(state.sigma);
        }
    }

    let active = [blocks.coef, blocks.alpha, blocks.sigma, blocks.p, blocks.p_sigma];
    let acceptance = Block::ALL
        .iter()
        .zip(active)
        .zip(&tallies)
        .filter(|((_, on), _)| *on)
        .map(|((b, _), t)| (*b, t.rate()))
        .collect();

    Ok(Chain {
        names,
        draws,
        acceptance,
        final_scales: scales,
        seed,
        config: config.clone(),
    })
}

fn mh_accept(
    post: &Posterior<'_>,
    state: &mut State,
    current_lp: &mut f64,
    proposed: State,
    correction: f64,
    stream: &mut RngStream,
) -> bool {
    let prop_lp = post.log_posterior(&proposed);
    let log_ratio = prop_lp - *current_lp + correction;
    let u = stream.uniform();
    if prop_lp.is_finite() && u.ln() < log_ratio {
        *state = proposed;
        *current_lp = prop_lp;
        true
    } else {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Family;
    use crate::mcmc::model::{ArSepdModel, ErrorFamily};
    use crate::prior::build_tail_prior;

    fn toy_model() -> ModelSpec {
        let y = vec![0.2, -0.5, 0.9, 0.1, -1.3, 0.6, 0.4, -0.2, 1.5, -0.8];
        ModelSpec::ar(&ArSepdModel::new(y).unwrap(), ErrorFamily::Sepd)
    }

    #[test]
    fn config_errors_before_sampling() {
        let m = toy_model();
        let tp = build_tail_prior(Family::Sepd, 20).unwrap();
        let mut s = RngStream::new(1);
        let bad = MwgConfig { n_iter: 10, n_burn: 10, p_max: 20, ..Default::default() };
        assert!(matches!(run_mwg(&m, Some(&tp), &bad, &mut s), Err(Error::Config(_))));
        let mismatch = MwgConfig { p_max: 30, ..MwgConfig::with_iterations(10, 2) };
        assert!(matches!(run_mwg(&m, Some(&tp), &mismatch, &mut s), Err(Error::Config(_))));
        let wrong_family = build_tail_prior(Family::Sgld, 20).unwrap();
        let ok = MwgConfig { p_max: 20, ..MwgConfig::with_iterations(10, 2) };
        assert!(run_mwg(&m, Some(&wrong_family), &ok, &mut s).is_err());
        assert!(run_mwg(&m, None, &ok, &mut s).is_err());
    }

    #[test]
    fn zero_variance_proposals_freeze_the_chain() {
        let m = toy_model();
        let tp = build_tail_prior(Family::Sepd, 20).unwrap();
        let cfg = MwgConfig {
            p_max: 20,
            scales: ProposalScales { coef: 0.0, logit_alpha: 0.0, log_sigma: 0.0 },
            adapt: false,
            blocks: ActiveBlocks { p: false, p_sigma: false, ..Default::default() },
            ..MwgConfig::with_iterations(200, 50)
        };
        let chain = run_mwg(&m, Some(&tp), &cfg, &mut RngStream::new(9)).unwrap();
        let init = initial_state(&m, 20).unwrap();
        assert!(chain.column("phi1").unwrap().iter().all(|&v| v == init.coef[0]));
        assert!(chain.column("alpha").unwrap().iter().all(|&v| v == 0.5));
        assert!(chain.column("sigma").unwrap().iter().all(|&v| v == init.sigma));
        assert!(chain.column("p").unwrap().iter().all(|&v| v == 2.0));
        for (_, rate) in &chain.acceptance {
            assert_eq!(*rate, 1.0);
        }
    }

    #[test]
    fn block_ratio_equals_kernel_ratio() {
        let m = toy_model();
        let tp = build_tail_prior(Family::Sepd, 20).unwrap();
        let post = Posterior::new(&m, Some(&tp), true).unwrap();
        let cur = State { coef: vec![0.1], alpha: 0.4, sigma: 0.9, p: 1 };
        let kernel = |s: &State| {
            let res = m.residuals(&s.coef);
            m.loglik_residuals(&res, s.alpha, s.p, s.sigma)
                + tp.mass(s.p).ln()
                + (1.0 / (std::f64::consts::PI * (s.alpha * (1.0 - s.alpha)).sqrt())).ln()
                + (1.0 / s.sigma).ln()
                + m.log_coef_prior(&s.coef)
        };
        let cases = [
            (Block::Coef, State { coef: vec![-0.2], ..cur.clone() }, 0.0),
            (Block::Alpha, State { alpha: 0.55, ..cur.clone() }, (0.55f64 * 0.45).ln() - (0.4f64 * 0.6).ln()),
            (Block::Sigma, State { sigma: 1.3, ..cur.clone() }, 1.3f64.ln() - 0.9f64.ln()),
            // p = 1 has one neighbour, p = 2 has two
            (Block::P, State { p: 2, ..cur.clone() }, (1.0f64 / 2.0).ln()),
            (Block::PSigma, State { p: 2, sigma: 1.1, ..cur.clone() }, (1.0f64 / 2.0).ln() + 1.1f64.ln() - 0.9f64.ln()),
        ];
        for (block, prop, corr) in cases {
            let got = post.block_log_ratio(block, &cur, &prop, 20);
            let expected = kernel(&prop) - kernel(&cur) + corr;
            assert!((got - expected).abs() < 1e-10, "{block:?}: {got} vs {expected}");
        }
    }

    #[test]
    fn supports_are_respected_and_seeded_runs_repeat() {
        let m = toy_model();
        let tp = build_tail_prior(Family::Sepd, 6).unwrap();
        let cfg = MwgConfig {
            p_max: 6,
            scales: ProposalScales { coef: 1.0, logit_alpha: 3.0, log_sigma: 2.0 },
            ..MwgConfig::with_iterations(3000, 500)
        };
        let a = run_mwg(&m, Some(&tp), &cfg, &mut RngStream::new(11)).unwrap();
        let b = run_mwg(&m, Some(&tp), &cfg, &mut RngStream::new(11)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2500);
        assert!(a.column("p").unwrap().iter().all(|&p| (1.0..=6.0).contains(&p) && p.fract() == 0.0));
        assert!(a.column("alpha").unwrap().iter().all(|&x| x > 0.0 && x < 1.0));
        assert!(a.column("sigma").unwrap().iter().all(|&x| x > 0.0));
        for (_, r) in &a.acceptance {
            assert!((0.0..=1.0).contains(r));
        }
    }

    fn two_point_frequencies(p_max: u32, weights: &[f64], n: usize, seed: u64) -> Vec<f64> {
        let total: f64 = weights.iter().sum();
        let log_t = |p: u32| (weights[(p - 1) as usize] / total).ln();
        let mut s = RngStream::new(seed);
        let mut p = 1;
        let mut counts = vec![0usize; p_max as usize];
        for _ in 0..n {
            p = discrete_neighbour_step(p, p_max, log_t, &mut s).0;
            counts[(p - 1) as usize] += 1;
        }
        counts.iter().map(|&c| c as f64 / n as f64).collect()
    }

    #[test]
    fn discrete_step_detailed_balance_two_points() {
        // Exact two-state chain: P(1→2) = min(1, π₂/π₁), P(2→1) = min(1, π₁/π₂).
        let w = [0.3, 0.7];
        let n = 400_000;
        let freq = two_point_frequencies(2, &w, n, 3);
        let (a, b) = ((0.7f64 / 0.3).min(1.0), (0.3f64 / 0.7).min(1.0));
        let stationary = b / (a + b);
        assert!((stationary - 0.3).abs() < 1e-12);
        // lag-one autocorrelation 1 − a − b inflates the variance
        let rho = 1.0 - a - b;
        let se = (0.3 * 0.7 / n as f64 * (1.0 + rho) / (1.0 - rho)).sqrt();
        assert!((freq[0] - 0.3).abs() < 3.0 * se, "{freq:?}");
    }

    #[test]
    fn discrete_step_boundary_correction_three_points() {
        let w = [0.5, 0.2, 0.3];
        let freq = two_point_frequencies(3, &w, 600_000, 4);
        for (f, t) in freq.iter().zip(w) {
            assert!((f - t).abs() < 0.01, "{freq:?}");
        }
    }
}
