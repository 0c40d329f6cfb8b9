//! Seeded random streams and exact variate generators.
//!
//! The uniform source is xoshiro256++ seeded through SplitMix64, both with
//! their published constants. Gamma variates use Marsaglia–Tsang squeeze
//! rejection, boosted by `U^{1/a}` for shapes below one.

use rand::{Rng, RngCore, SeedableRng};
use rand_distr::{Open01, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::distributions::{sepd_log_norm, TwoPieceParams};
use crate::error::{Error, Result};
use crate::special::ln_gamma_unchecked;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a seed path, used to derive independent streams.
pub fn mix_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x6A09_E667_F3BC_C909, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// A single-owner deterministic random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: Xoshiro256PlusPlus,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    /// Stream for a sub-task, keyed by the parent seed and `index`.
    pub fn derive(&self, index: u64) -> Self {
        Self::new(mix_seed(&[self.seed, index]))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.sample(Open01)
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

/// Gamma(shape, 1) variate.
pub fn sample_gamma(stream: &mut RngStream, shape: f64) -> Result<f64> {
    if !(shape > 0.0 && shape.is_finite()) {
        return Err(Error::Domain(format!("gamma shape must be positive, got {shape}")));
    }
    if shape < 1.0 {
        let g = marsaglia_tsang(stream, shape + 1.0);
        let u = stream.uniform();
        // log-space keeps tiny shapes from underflowing to exactly zero too often
        return Ok((g.ln() + u.ln() / shape).exp().max(f64::MIN_POSITIVE));
    }
    Ok(marsaglia_tsang(stream, shape))
}

fn marsaglia_tsang(stream: &mut RngStream, shape: f64) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = stream.normal();
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = stream.uniform();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Beta(a, b) variate as X / (X + Y) with independent gamma draws.
pub fn sample_beta(stream: &mut RngStream, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("beta shapes must be positive, got ({a}, {b})")));
    }
    let x = sample_gamma(stream, a)?;
    let y = sample_gamma(stream, b)?;
    Ok(x / (x + y))
}

const LOGIT_FLOOR: f64 = 1e-300;

/// Type-III generalized logistic variate: logit of a Beta(p, p) draw.
pub fn sample_bb(stream: &mut RngStream, p: u32, mu: f64, sigma: f64) -> Result<f64> {
    if p < 1 || !(sigma > 0.0) {
        return Err(Error::InvalidParams(format!("p={p}, sigma={sigma}")));
    }
    let shape = p as f64;
    // T/(1 − T) = X/Y for T = X/(X + Y); the ratio form keeps T near 1 resolvable.
    let x = sample_gamma(stream, shape)?.max(LOGIT_FLOOR);
    let y = sample_gamma(stream, shape)?.max(LOGIT_FLOOR);
    Ok(mu + sigma * (x.ln() - y.ln()))
}

// sign(0) = 0; the zero-probability draw u == α is mapped to the mode.
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Standardized SEPD draw from a uniform `u` and Ga(1/p, 1) draws `w1`, `w2`.
pub fn sepd_transform(u: f64, w1: f64, w2: f64, alpha: f64, p: f64) -> f64 {
    // 2K(p)Γ(1 + 1/p) = p^{-1/p}
    let denom = 2.0 * (sepd_log_norm(p) + ln_gamma_unchecked(1.0 + 1.0 / p)).exp();
    let s = sign(u - alpha);
    if s == 0.0 {
        return 0.0;
    }
    alpha * w1.powf(1.0 / p) * (s - 1.0) / denom + (1.0 - alpha) * w2.powf(1.0 / p) * (s + 1.0) / denom
}

/// Standardized SGLD draw from a uniform `u` and type-III logistic draws.
pub fn sgld_transform(u: f64, w1: f64, w2: f64, alpha: f64) -> f64 {
    let s = sign(u - alpha);
    if s == 0.0 {
        return 0.0;
    }
    alpha * w1.abs() * (s - 1.0) + (1.0 - alpha) * w2.abs() * (s + 1.0)
}

pub fn sample_sepd(stream: &mut RngStream, params: &TwoPieceParams) -> f64 {
    let p = params.p() as f64;
    let u = stream.uniform();
    let w1 = sample_gamma(stream, 1.0 / p).expect("shape 1/p is positive");
    let w2 = sample_gamma(stream, 1.0 / p).expect("shape 1/p is positive");
    params.mu() + params.sigma() * sepd_transform(u, w1, w2, params.alpha(), p)
}

pub fn sample_sgld(stream: &mut RngStream, params: &TwoPieceParams) -> f64 {
    let u = stream.uniform();
    let w1 = sample_bb(stream, params.p(), 0.0, 1.0).expect("validated params");
    let w2 = sample_bb(stream, params.p(), 0.0, 1.0).expect("validated params");
    params.mu() + params.sigma() * sgld_transform(u, w1, w2, params.alpha())
}

/// Draws from the two-piece family named by `family`.
pub fn sample_two_piece(
    stream: &mut RngStream,
    family: crate::Family,
    params: &TwoPieceParams,
) -> Result<f64> {
    match family {
        crate::Family::Sepd => Ok(sample_sepd(stream, params)),
        crate::Family::Sgld => Ok(sample_sgld(stream, params)),
        crate::Family::BetaLogistic => sample_bb(stream, params.p(), params.mu(), params.sigma()),
    }
}
