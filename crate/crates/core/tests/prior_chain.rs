//! With the likelihood switched off and only the p block moving, the chain
//! must target the tail prior itself.

use twopiece::mcmc::{run_mwg, ActiveBlocks, ArSepdModel, ErrorFamily, ModelSpec, MwgConfig};
use twopiece::prior::build_tail_prior;
use twopiece::rng::RngStream;
use twopiece::Family;

fn prior_only_frequencies(family: Family, errors: ErrorFamily) {
    const P_MAX: u32 = 20;
    const BATCHES: usize = 100;
    let prior = build_tail_prior(family, P_MAX).unwrap();
    let series: Vec<f64> = (0..30).map(|t| (t as f64 * 0.7).sin()).collect();
    let model = ModelSpec::ar(&ArSepdModel::new(series).unwrap(), errors);
    let config = MwgConfig {
        n_iter: 1_001_000,
        n_burn: 1_000,
        p_max: P_MAX,
        use_likelihood: false,
        adapt: false,
        blocks: ActiveBlocks { coef: false, alpha: false, sigma: false, p: true, p_sigma: false },
        ..MwgConfig::default()
    };
    let chain = run_mwg(&model, Some(&prior), &config, &mut RngStream::new(99)).unwrap();
    let p = chain.column("p").unwrap();
    assert_eq!(p.len(), 1_000_000);
    let batch = p.len() / BATCHES;
    for k in 1..=P_MAX {
        let means: Vec<f64> = p
            .chunks(batch)
            .map(|c| c.iter().filter(|&&v| v == k as f64).count() as f64 / batch as f64)
            .collect();
        let freq = means.iter().sum::<f64>() / BATCHES as f64;
        let var = means.iter().map(|m| (m - freq).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
        let se = (var / BATCHES as f64).sqrt().max(1e-4);
        let want = prior.mass(k);
        assert!((freq - want).abs() <= 3.0 * se, "{family:?} p={k}: frequency {freq}, mass {want}, se {se}");
    }
}

#[test]
fn sepd_chain_targets_prior() {
    prior_only_frequencies(Family::Sepd, ErrorFamily::Sepd);
}

#[test]
fn sgld_chain_targets_prior() {
    prior_only_frequencies(Family::Sgld, ErrorFamily::Sgld);
}
