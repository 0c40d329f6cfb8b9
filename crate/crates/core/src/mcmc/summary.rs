use serde::Serialize;

use super::sampler::Chain;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSummary {
    pub name: String,
    pub mean: f64,
    pub median: f64,
    pub lower: f64,
    pub upper: f64,
}

impl ParamSummary {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorSummary {
    pub params: Vec<ParamSummary>,
}

impl PosteriorSummary {
    pub fn get(&self, name: &str) -> Option<&ParamSummary> {
        self.params.iter().find(|p| p.name == name)
    }
}

/// Empirical quantile by inverting the empirical CDF: the ⌈n·q⌉-th order
/// statistic (1-based). `sorted` must be non-empty and ascending.
pub fn order_statistic_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let rank = ((n as f64 * q).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

/// Median with the midpoint convention for even counts.
pub fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn summarize_draws(name: &str, draws: &[f64]) -> Result<ParamSummary> {
    if draws.is_empty() {
        return Err(Error::Data(format!("no draws for {name}")));
    }
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(ParamSummary {
        name: name.to_string(),
        mean: draws.iter().sum::<f64>() / draws.len() as f64,
        median: median(&sorted),
        lower: order_statistic_quantile(&sorted, 0.025),
        upper: order_statistic_quantile(&sorted, 0.975),
    })
}

/// Mean, median and equal-tailed 95% interval of every parameter.
pub fn summarize(chain: &Chain) -> Result<PosteriorSummary> {
    if chain.is_empty() {
        return Err(Error::Data("cannot summarize an empty chain".into()));
    }
    let params = chain
        .names
        .iter()
        .zip(&chain.draws)
        .map(|(n, d)| summarize_draws(n, d))
        .collect::<Result<_>>()?;
    Ok(PosteriorSummary { params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_draws() {
        let s = summarize_draws("x", &[2.5; 17]).unwrap();
        assert_eq!((s.mean, s.median, s.lower, s.upper), (2.5, 2.5, 2.5, 2.5));
    }

    #[test]
    fn four_draws() {
        let s = summarize_draws("x", &[3.0, 1.0, 4.0, 2.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert_eq!(s.median, 2.5);
        assert_eq!((s.lower, s.upper), (1.0, 4.0));
    }

    #[test]
    fn empty_is_an_error() {
        assert!(summarize_draws("x", &[]).is_err());
    }

    proptest! {
        #[test]
        fn endpoints_are_order_statistics(xs in prop::collection::vec(-100.0f64..100.0, 1..300)) {
            let s = summarize_draws("x", &xs).unwrap();
            prop_assert!(xs.contains(&s.lower) && xs.contains(&s.upper));
            prop_assert!(s.lower <= s.median && s.median <= s.upper);
        }
    }
}
