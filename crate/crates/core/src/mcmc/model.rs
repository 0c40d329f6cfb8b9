//! Inference targets: an AR(1) series or a linear regression, each with a
//! Zellner g-prior on the coefficients and two-piece (or Gaussian) errors
//! centred at zero.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::distributions::{normal_log_pdf, Family, StdTwoPiece, TwoPieceParams};
use crate::error::{Error, Result};

/// Error distribution of a linear model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorFamily {
    Sepd,
    Sgld,
    Normal,
}

impl ErrorFamily {
    pub fn two_piece(&self) -> Option<Family> {
        match self {
            ErrorFamily::Sepd => Some(Family::Sepd),
            ErrorFamily::Sgld => Some(Family::Sgld),
            ErrorFamily::Normal => None,
        }
    }
}

impl From<Family> for ErrorFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Sepd => ErrorFamily::Sepd,
            _ => ErrorFamily::Sgld,
        }
    }
}

/// y_t = φ₁ y_{t−1} + ε_t, conditioning on the first observation.
#[derive(Debug, Clone, PartialEq)]
pub struct ArSepdModel {
    series: Vec<f64>,
}

impl ArSepdModel {
    pub fn new(series: Vec<f64>) -> Result<Self> {
        if series.len() < 3 {
            return Err(Error::Data(format!("AR(1) needs at least 3 observations, got {}", series.len())));
        }
        if let Some(i) = series.iter().position(|y| !y.is_finite()) {
            return Err(Error::Data(format!("series value {i} is not finite")));
        }
        if series[..series.len() - 1].iter().all(|&y| y == 0.0) {
            return Err(Error::Data("lagged series is identically zero".into()));
        }
        Ok(Self { series })
    }

    pub fn series(&self) -> &[f64] {
        &self.series
    }

    /// Prior variance of φ₁: T / Σ_{t<T} y_t².
    pub fn prior_variance(&self) -> f64 {
        let t = self.series.len();
        let ss: f64 = self.series[..t - 1].iter().map(|y| y * y).sum();
        t as f64 / ss
    }
}

/// y_i = x_iᵀβ + ε_i with an intercept column in X.
#[derive(Debug, Clone, PartialEq)]
pub struct RegSgldModel {
    y: Vec<f64>,
    x: DMatrix<f64>,
}

impl RegSgldModel {
    pub fn new(y: Vec<f64>, x: DMatrix<f64>) -> Result<Self> {
        let (n, k) = x.shape();
        if y.len() != n {
            return Err(Error::Data(format!("response has {} rows, design has {n}", y.len())));
        }
        if n <= k {
            return Err(Error::Data(format!("need more observations ({n}) than coefficients ({k})")));
        }
        if y.iter().chain(x.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite value in regression data".into()));
        }
        if (x.transpose() * &x).cholesky().is_none() {
            return Err(Error::Data("X'X is singular".into()));
        }
        Ok(Self { y, x })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }
    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }
}

/// Which model a [`ModelSpec`] came from; decides parameter names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Ar,
    Regression,
}

/// A linear model in regression form, ready for sampling.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    kind: ModelKind,
    errors: ErrorFamily,
    y: Vec<f64>,
    x: DMatrix<f64>,
    /// XᵀX / g: the precision of the Zellner prior.
    prior_precision: DMatrix<f64>,
    g: f64,
    coef_names: Vec<String>,
}

impl ModelSpec {
    pub fn ar(model: &ArSepdModel, errors: ErrorFamily) -> Self {
        let s = model.series();
        let t = s.len();
        let x = DMatrix::from_column_slice(t - 1, 1, &s[..t - 1]);
        Self::build(ModelKind::Ar, errors, s[1..].to_vec(), x, t as f64, vec!["phi1".into()])
    }

    pub fn regression(model: &RegSgldModel, errors: ErrorFamily) -> Self {
        let k = model.x.ncols();
        let names = (0..k).map(|j| format!("beta{j}")).collect();
        Self::build(ModelKind::Regression, errors, model.y.clone(), model.x.clone(), model.y.len() as f64, names)
    }

    fn build(kind: ModelKind, errors: ErrorFamily, y: Vec<f64>, x: DMatrix<f64>, g: f64, coef_names: Vec<String>) -> Self {
        let prior_precision = (x.transpose() * &x) / g;
        Self {
            kind,
            errors,
            y,
            x,
            prior_precision,
            g,
            coef_names,
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }
    pub fn errors(&self) -> ErrorFamily {
        self.errors
    }
    pub fn n_obs(&self) -> usize {
        self.y.len()
    }
    pub fn n_coef(&self) -> usize {
        self.x.ncols()
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn coef_names(&self) -> &[String] {
        &self.coef_names
    }
    pub fn response(&self) -> &[f64] {
        &self.y
    }
    pub fn design(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn residuals(&self, coef: &[f64]) -> Vec<f64> {
        let beta = DVector::from_column_slice(coef);
        let fitted = &self.x * beta;
        self.y.iter().zip(fitted.iter()).map(|(y, f)| y - f).collect()
    }

    /// Log-likelihood of residuals under the error family; −∞ for invalid
    /// parameters.
    pub fn loglik_residuals(&self, residuals: &[f64], alpha: f64, p: u32, sigma: f64) -> f64 {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return f64::NEG_INFINITY;
        }
        let n = residuals.len() as f64;
        match self.errors.two_piece() {
            None => residuals.iter().map(|&r| normal_log_pdf(r, 0.0, sigma)).sum(),
            Some(fam) => {
                let Ok(d) = StdTwoPiece::new(fam, alpha, p as f64) else {
                    return f64::NEG_INFINITY;
                };
                if p < 1 {
                    return f64::NEG_INFINITY;
                }
                let inv = 1.0 / sigma;
                residuals.iter().map(|&r| d.log_pdf(r * inv)).sum::<f64>() - n * sigma.ln()
            }
        }
    }

    /// Zellner prior log-density up to its constant: −βᵀ(XᵀX)β / (2g).
    pub fn log_coef_prior(&self, coef: &[f64]) -> f64 {
        let beta = DVector::from_column_slice(coef);
        -0.5 * (beta.transpose() * &self.prior_precision * &beta)[(0, 0)]
    }

    /// Ordinary least-squares coefficients and residual standard deviation.
    pub fn least_squares(&self) -> Result<(Vec<f64>, f64)> {
        let xtx = self.x.transpose() * &self.x;
        let chol = xtx
            .cholesky()
            .ok_or_else(|| Error::Numerical("X'X is not positive definite".into()))?;
        let xty = self.x.transpose() * DVector::from_column_slice(&self.y);
        let beta = chol.solve(&xty);
        let coef: Vec<f64> = beta.iter().copied().collect();
        let res = self.residuals(&coef);
        let dof = (self.y.len() - self.x.ncols()).max(1) as f64;
        let sd = (res.iter().map(|r| r * r).sum::<f64>() / dof).sqrt();
        Ok((coef, sd))
    }

    /// Cholesky factor of (XᵀX)⁻¹, used to shape the coefficient proposal.
    pub(crate) fn coef_proposal_factor(&self) -> Result<DMatrix<f64>> {
        let xtx = self.x.transpose() * &self.x;
        let inv = xtx
            .try_inverse()
            .ok_or_else(|| Error::Numerical("X'X is singular".into()))?;
        inv.cholesky()
            .map(|c| c.l())
            .ok_or_else(|| Error::Numerical("(X'X)^-1 is not positive definite".into()))
    }
}

/// Σ_{t=2}^{T} log SEPD(y_t − φ₁ y_{t−1}; α, p, 0, σ).
pub fn loglik_ar_sepd(model: &ArSepdModel, phi1: f64, params: &TwoPieceParams) -> f64 {
    let spec = ModelSpec::ar(model, ErrorFamily::Sepd);
    let res = spec.residuals(&[phi1]);
    spec.loglik_residuals(&res, params.alpha(), params.p(), params.sigma())
}

/// Σ_i log SGLD(y_i − x_iᵀβ; α, p, 0, σ).
pub fn loglik_reg_sgld(model: &RegSgldModel, beta: &[f64], params: &TwoPieceParams) -> Result<f64> {
    if beta.len() != model.x.ncols() {
        return Err(Error::InvalidParams(format!(
            "beta has {} entries, design has {} columns",
            beta.len(),
            model.x.ncols()
        )));
    }
    let spec = ModelSpec::regression(model, ErrorFamily::Sgld);
    let res = spec.residuals(beta);
    Ok(spec.loglik_residuals(&res, params.alpha(), params.p(), params.sigma()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sepd_log_norm, sepd_log_pdf, sgld_log_pdf};
    use crate::special::log_beta;

    #[test]
    fn ar_validation() {
        assert!(ArSepdModel::new(vec![1.0, 2.0]).is_err());
        assert!(ArSepdModel::new(vec![1.0, f64::NAN, 2.0]).is_err());
        assert!(ArSepdModel::new(vec![0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn ar_two_point_and_mode() {
        let prm = TwoPieceParams::new(0.3, 4, 0.0, 1.5).unwrap();
        let m = ArSepdModel::new(vec![0.8, -0.4, 0.1]).unwrap();
        let full = loglik_ar_sepd(&m, 0.5, &prm);
        let expected = sepd_log_pdf(-0.4 - 0.4, &prm) + sepd_log_pdf(0.1 + 0.2, &prm);
        assert!((full - expected).abs() < 1e-13);

        let phi = 0.5;
        let mut y = vec![2.0];
        for _ in 0..6 {
            y.push(phi * y.last().unwrap());
        }
        let m = ArSepdModel::new(y).unwrap();
        let v = loglik_ar_sepd(&m, phi, &prm);
        assert!((v - 6.0 * (sepd_log_norm(4.0) - 1.5f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn ar_matches_pdf_product() {
        let y = vec![0.3, -1.2, 0.5, 2.2, -0.7, 0.05, 1.1, -2.4, 0.9, 0.0];
        let m = ArSepdModel::new(y.clone()).unwrap();
        let prm = TwoPieceParams::new(0.7, 2, 0.0, 0.8).unwrap();
        let product: f64 = y.windows(2).map(|w| sepd_log_pdf(w[1] + 0.3 * w[0], &prm).exp()).product();
        let v = loglik_ar_sepd(&m, -0.3, &prm);
        assert!((v - product.ln()).abs() < 1e-12);
    }

    fn design(xs: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(xs.len(), 2, |i, j| if j == 0 { 1.0 } else { xs[i] })
    }

    #[test]
    fn regression_mode_and_product() {
        let prm = TwoPieceParams::new(0.4, 3, 0.0, 2.0).unwrap();
        // single observation at the mode, evaluated through the spec directly
        let spec = ModelSpec::regression(
            &RegSgldModel::new(vec![1.0, 2.0, 3.0], design(&[0.0, 1.0, 2.0])).unwrap(),
            ErrorFamily::Sgld,
        );
        let v = spec.loglik_residuals(&[0.0], 0.4, 3, 2.0);
        let expected = -2.0f64.ln() - log_beta(3.0, 3.0).unwrap() - 6.0 * std::f64::consts::LN_2;
        assert!((v - expected).abs() < 1e-13);

        let xs = [0.1, 0.5, 0.9, 0.3, 0.7, 0.2, 0.8, 0.4, 0.6, 1.0];
        let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| 1.0 - 2.0 * x + (i as f64 - 4.5) * 0.3).collect();
        let m = RegSgldModel::new(ys.clone(), design(&xs)).unwrap();
        let beta = [0.9, -1.8];
        let product: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| sgld_log_pdf(y - beta[0] - beta[1] * x, &prm).exp())
            .product();
        assert!((loglik_reg_sgld(&m, &beta, &prm).unwrap() - product.ln()).abs() < 1e-12);
        assert!(loglik_reg_sgld(&m, &[1.0], &prm).is_err());

        // permuting observations leaves the likelihood unchanged
        let mut idx: Vec<usize> = (0..xs.len()).collect();
        idx.reverse();
        idx.swap(2, 7);
        let xs2: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
        let ys2: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
        let m2 = RegSgldModel::new(ys2, design(&xs2)).unwrap();
        let a = loglik_reg_sgld(&m, &beta, &prm).unwrap();
        let b = loglik_reg_sgld(&m2, &beta, &prm).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn regression_validation() {
        assert!(RegSgldModel::new(vec![1.0, 2.0], design(&[0.0, 1.0])).is_err());
        assert!(RegSgldModel::new(vec![1.0, 2.0, 3.0], design(&[1.0, 1.0, 1.0])).is_err());
        assert!(RegSgldModel::new(vec![1.0, 2.0], design(&[0.0, 1.0, 2.0])).is_err());
    }

    #[test]
    fn zellner_prior_scaling() {
        let m = ArSepdModel::new(vec![1.0, 2.0, -1.0, 0.5]).unwrap();
        let spec = ModelSpec::ar(&m, ErrorFamily::Sepd);
        let var = m.prior_variance();
        assert!((var - 4.0 / 6.0).abs() < 1e-15);
        assert!((spec.log_coef_prior(&[0.7]) + 0.49 / (2.0 * var)).abs() < 1e-14);
    }

    #[test]
    fn least_squares_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 + 0.5 * x).collect();
        let m = RegSgldModel::new(ys, design(&xs)).unwrap();
        let (coef, sd) = ModelSpec::regression(&m, ErrorFamily::Sgld).least_squares().unwrap();
        assert!((coef[0] - 2.0).abs() < 1e-12 && (coef[1] - 0.5).abs() < 1e-12);
        assert!(sd < 1e-12);
    }
}
