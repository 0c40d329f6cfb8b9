//! Two-piece location-scale densities: the skewed exponential power (SEPD),
//! the skewed generalized logistic (SGLD), and the symmetric type-III
//! generalized logistic base used to build the latter.
//!
//! Every density is evaluated in log-space on the standardized residual
//! `z = (y − μ)/σ`; the location-scale form is `log f(z) − log σ`. The point
//! `y = μ` belongs to the left branch.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ln_beta_unchecked, ln_gamma_unchecked, trigamma_unchecked};

/// Skewness α, integer tail parameter p, location μ and common scale σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPieceParams {
    alpha: f64,
    p: u32,
    mu: f64,
    sigma: f64,
}

impl TwoPieceParams {
    pub fn new(alpha: f64, p: u32, mu: f64, sigma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParams(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if p < 1 {
            return Err(Error::InvalidParams("tail parameter p must be at least 1".into()));
        }
        if !mu.is_finite() {
            return Err(Error::InvalidParams(format!("mu must be finite, got {mu}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParams(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { alpha, p, mu, sigma })
    }

    /// Standard parameters (α = 1/2, μ = 0, σ = 1) for tail value `p`.
    pub fn standard(p: u32) -> Result<Self> {
        Self::new(0.5, p, 0.0, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn with_p(&self, p: u32) -> Result<Self> {
        Self::new(self.alpha, p, self.mu, self.sigma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Sepd,
    Sgld,
    /// Symmetric type-III generalized logistic (Beta(p, p) transform of the logistic).
    BetaLogistic,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Sepd => "sepd",
            Family::Sgld => "sgld",
            Family::BetaLogistic => "beta-logistic",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sepd" => Ok(Family::Sepd),
            "sgld" => Ok(Family::Sgld),
            "beta-logistic" | "bb" | "beta_logistic" => Ok(Family::BetaLogistic),
            other => Err(Error::InvalidParams(format!("unknown family '{other}'"))),
        }
    }
}

/// log K(p) for the SEPD, K(p) = 1 / (2 p^{1/p} Γ(1 + 1/p)).
pub fn sepd_log_norm(p: f64) -> f64 {
    -LN_2 - p.ln() / p - ln_gamma_unchecked(1.0 + 1.0 / p)
}

/// Log of the second moment of the symmetric base density with tail
/// parameter `p` (SEPD or SGLD).
pub fn base_log_second_moment(family: Family, p: f64) -> f64 {
    match family {
        Family::Sepd => 2.0 * p.ln() / p + ln_gamma_unchecked(3.0 / p) - ln_gamma_unchecked(1.0 / p),
        _ => (2.0 * trigamma_unchecked(p)).ln(),
    }
}

/// ln(1 + e^x) without overflow.
#[inline]
pub(crate) fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Standardized two-piece density with its per-parameter constants hoisted,
/// for repeated evaluation at a fixed (family, α, p). The tail parameter is
/// real here so numerical checks can probe non-integer values.
#[derive(Debug, Clone, Copy)]
pub struct StdTwoPiece {
    family: Family,
    p: f64,
    p_int: Option<i32>,
    inv_left: f64,
    inv_right: f64,
    log_norm: f64,
}

impl StdTwoPiece {
    pub fn new(family: Family, alpha: f64, p: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) || !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidParams(format!("alpha={alpha}, p={p}")));
        }
        let log_norm = match family {
            Family::Sepd => sepd_log_norm(p),
            Family::Sgld => -ln_beta_unchecked(p, p),
            Family::BetaLogistic => {
                return Err(Error::InvalidParams(
                    "the beta-logistic base is symmetric; use bb_log_pdf".into(),
                ))
            }
        };
        let p_int = (p.fract() == 0.0 && p <= 64.0).then_some(p as i32);
        Ok(Self {
            family,
            p,
            p_int,
            inv_left: 1.0 / (2.0 * alpha),
            inv_right: 1.0 / (2.0 * (1.0 - alpha)),
            log_norm,
        })
    }

    pub fn from_params(family: Family, params: &TwoPieceParams) -> Result<Self> {
        Self::new(family, params.alpha, params.p as f64)
    }

    /// log f(z) for the standardized residual z.
    #[inline]
    pub fn log_pdf(&self, z: f64) -> f64 {
        let w = if z <= 0.0 { z * self.inv_left } else { z * self.inv_right };
        match self.family {
            Family::Sepd => {
                let power = match self.p_int {
                    Some(k) => w.abs().powi(k),
                    None => w.abs().powf(self.p),
                };
                self.log_norm - power / self.p
            }
            _ => self.log_norm - self.p * w - 2.0 * self.p * softplus(-w),
        }
    }

    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }
}

/// Log-density of the SEPD at `y`.
pub fn sepd_log_pdf(y: f64, params: &TwoPieceParams) -> f64 {
    let d = StdTwoPiece::from_params(Family::Sepd, params).expect("validated params");
    d.log_pdf((y - params.mu) / params.sigma) - params.sigma.ln()
}

/// Log-density of the SGLD at `y`.
pub fn sgld_log_pdf(y: f64, params: &TwoPieceParams) -> f64 {
    let d = StdTwoPiece::from_params(Family::Sgld, params).expect("validated params");
    d.log_pdf((y - params.mu) / params.sigma) - params.sigma.ln()
}

/// Log-density of the type-III generalized logistic with Beta(p, p) shape.
pub fn bb_log_pdf(x: f64, p: u32, mu: f64, sigma: f64) -> Result<f64> {
    if p < 1 || !(sigma > 0.0) {
        return Err(Error::InvalidParams(format!("p={p}, sigma={sigma}")));
    }
    let p = p as f64;
    let z = -(x - mu) / sigma;
    Ok(p * z - 2.0 * p * softplus(z) - ln_beta_unchecked(p, p) - sigma.ln())
}

/// Dispatches to the family's two-piece log-density.
pub fn two_piece_log_pdf(y: f64, family: Family, params: &TwoPieceParams) -> Result<f64> {
    match family {
        Family::Sepd => Ok(sepd_log_pdf(y, params)),
        Family::Sgld => Ok(sgld_log_pdf(y, params)),
        Family::BetaLogistic => Err(Error::InvalidParams(
            "beta-logistic is not a two-piece family".into(),
        )),
    }
}

pub fn two_piece_pdf(y: f64, family: Family, params: &TwoPieceParams) -> Result<f64> {
    two_piece_log_pdf(y, family, params).map(f64::exp)
}

/// Gaussian log-density, used by the normal-error baseline.
#[inline]
pub fn normal_log_pdf(y: f64, mean: f64, sd: f64) -> f64 {
    let z = (y - mean) / sd;
    -0.5 * z * z - sd.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
}
