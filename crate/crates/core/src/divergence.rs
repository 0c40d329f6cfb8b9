//! Kullback–Leibler divergences between two members of the same two-piece
//! family that differ only in the tail parameter.
//!
//! The closed forms do not depend on (α, μ, σ): each half-line contributes
//! its share of the standardized divergence in proportion to its mass, so
//! only the symmetric base densities enter. `kl_numeric` integrates the
//! divergence directly and serves as an independent check.

use crate::distributions::{sepd_log_norm, Family, StdTwoPiece, TwoPieceParams};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::special::{digamma_unchecked, ln_beta_unchecked, ln_gamma_unchecked};

fn check_tail(p: u32, p_prime: u32) -> Result<()> {
    if p < 1 || p_prime < 1 {
        return Err(Error::Domain(format!("tail parameters must be >= 1, got ({p}, {p_prime})")));
    }
    Ok(())
}

/// D_KL(SEPD_p ‖ SEPD_p′).
pub fn kl_sepd(p: u32, p_prime: u32) -> Result<f64> {
    check_tail(p, p_prime)?;
    if p == p_prime {
        return Ok(0.0);
    }
    let (a, b) = (p as f64, p_prime as f64);
    let moment = ((b / a) * a.ln() - b.ln() + ln_gamma_unchecked((b + 1.0) / a) - ln_gamma_unchecked(1.0 / a)).exp();
    Ok(sepd_log_norm(a) - sepd_log_norm(b) - 1.0 / a + moment)
}

/// D_KL(SGLD_p ‖ SGLD_p′) = log[B(p′,p′)/B(p,p)] + 2(p − p′)[ψ(p) − ψ(2p)].
pub fn kl_sgld(p: u32, p_prime: u32) -> Result<f64> {
    check_tail(p, p_prime)?;
    if p == p_prime {
        return Ok(0.0);
    }
    let (a, b) = (p as f64, p_prime as f64);
    Ok(ln_beta_unchecked(b, b) - ln_beta_unchecked(a, a)
        + 2.0 * (a - b) * (digamma_unchecked(a) - digamma_unchecked(2.0 * a)))
}

/// Closed-form divergence for a two-piece family.
pub fn kl_closed_form(family: Family, p: u32, p_prime: u32) -> Result<f64> {
    match family {
        Family::Sepd => kl_sepd(p, p_prime),
        Family::Sgld => kl_sgld(p, p_prime),
        Family::BetaLogistic => Err(Error::InvalidParams(
            "closed-form divergence is defined for sepd and sgld".into(),
        )),
    }
}

/// Absolute tolerance of the numerical divergence.
pub const KL_NUMERIC_ABS_TOL: f64 = 1e-10;

/// D_KL by adaptive quadrature of f log(f / f′) over the real line, split at
/// the common mode. `params_p` and `params_pprime` must share α, μ and σ.
pub fn kl_numeric(family: Family, params_p: &TwoPieceParams, params_pprime: &TwoPieceParams) -> Result<f64> {
    if params_p.alpha() != params_pprime.alpha()
        || params_p.mu() != params_pprime.mu()
        || params_p.sigma() != params_pprime.sigma()
    {
        return Err(Error::InvalidParams(
            "divergence requires parameter sets differing only in p".into(),
        ));
    }
    let f = StdTwoPiece::from_params(family, params_p)?;
    let g = StdTwoPiece::from_params(family, params_pprime)?;
    let (mu, sigma) = (params_p.mu(), params_p.sigma());
    let log_sigma = sigma.ln();
    let integrand = |y: f64| {
        let z = (y - mu) / sigma;
        let lf = f.log_pdf(z) - log_sigma;
        if lf == f64::NEG_INFINITY {
            return 0.0;
        }
        let lg = g.log_pdf(z) - log_sigma;
        lf.exp() * (lf - lg)
    };
    let opts = QuadOptions {
        abs_tol: 0.5 * KL_NUMERIC_ABS_TOL,
        rel_tol: 1e-13,
        max_intervals: 20_000,
        scale: sigma,
    };
    let left = integrate(integrand, f64::NEG_INFINITY, mu, &opts)?;
    let right = integrate(integrand, mu, f64::INFINITY, &opts)?;
    Ok((left.value + right.value).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sepd_table_entries() {
        let close = |p, q, v: f64| assert!((kl_sepd(p, q).unwrap() - v).abs() < 1e-6, "({p},{q})");
        close(2, 1, 7.2093e-2);
        close(2, 3, 5.9144e-2);
        close(4, 3, 1.4752e-2);
        close(4, 5, 1.4759e-2);
        assert_eq!(kl_sepd(7, 7).unwrap(), 0.0);
    }

    #[test]
    fn sgld_table_entries() {
        assert!((kl_sgld(2, 1).unwrap() - 0.1251).abs() < 1e-4);
        assert!((kl_sgld(2, 3).unwrap() - 0.0572).abs() < 1e-4);
        assert!((kl_sgld(30, 31).unwrap() - 2.7623e-4).abs() < 1e-8);
        assert_eq!(kl_sgld(5, 5).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(kl_sepd(0, 2), Err(Error::Domain(_))));
        assert!(matches!(kl_sgld(3, 0), Err(Error::Domain(_))));
        assert!(kl_closed_form(Family::BetaLogistic, 2, 3).is_err());
    }

    #[test]
    fn nonnegative_up_to_200() {
        for p in 1..=200 {
            for q in 1..=200 {
                if p != q {
                    assert!(kl_sepd(p, q).unwrap() > 0.0, "sepd ({p},{q})");
                    assert!(kl_sgld(p, q).unwrap() > 0.0, "sgld ({p},{q})");
                }
            }
        }
    }

    #[test]
    fn numeric_matches_closed_form_spot_checks() {
        for fam in [Family::Sepd, Family::Sgld] {
            for (p, q) in [(1, 2), (3, 2), (4, 5), (10, 1), (1, 10), (25, 24)] {
                let a = TwoPieceParams::standard(p).unwrap();
                let b = TwoPieceParams::standard(q).unwrap();
                let num = kl_numeric(fam, &a, &b).unwrap();
                let exact = kl_closed_form(fam, p, q).unwrap();
                assert!((num - exact).abs() < 1e-8 * exact.max(1.0), "{fam} ({p},{q}): {num} vs {exact}");
            }
        }
    }

    #[test]
    fn numeric_identity_and_mismatch() {
        let a = TwoPieceParams::new(0.3, 4, 1.0, 2.0).unwrap();
        assert!(kl_numeric(Family::Sepd, &a, &a).unwrap() < 1e-10);
        let b = TwoPieceParams::new(0.4, 5, 1.0, 2.0).unwrap();
        assert!(kl_numeric(Family::Sepd, &a, &b).is_err());
    }
}
