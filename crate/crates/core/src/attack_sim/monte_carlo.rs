use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::graph::{CompactGraph, Scratch};
use crate::net_model::Network;

/// Trials per independently seeded batch.
pub const BATCH_TRIALS: u64 = 8192;

/// Hit-rate estimate of a Bernoulli experiment with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloResult {
    pub trials: u64,
    pub hits: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub seed: u64,
}

impl MonteCarloResult {
    fn new(trials: u64, hits: u64, seed: u64) -> Self {
        let estimate = hits as f64 / trials as f64;
        let std_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
        MonteCarloResult {
            trials,
            hits,
            estimate,
            std_error,
            seed,
        }
    }

    /// Whether `value` is within `sigmas` standard errors of the estimate.
    pub fn agrees_with(&self, value: f64, sigmas: f64) -> bool {
        (self.estimate - value).abs() <= sigmas * self.std_error
    }
}

/// RNG for batch `batch` of a run seeded with `seed`: ChaCha8 keyed by the
/// seed, on stream number `batch`. Results do not depend on thread count.
pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Estimates the probability that independently compromised nodes (node `i`
/// with probability `p_i`) separate A from B.
pub fn simulate_uncorrelated(net: &Network, trials: u64, seed: u64) -> Result<MonteCarloResult> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let g = CompactGraph::new(net);
    let probs: Vec<f64> = g
        .ids()
        .iter()
        .map(|id| net.trust(id).expect("intermediate"))
        .collect();
    let batches = trials.div_ceil(BATCH_TRIALS);
    let hits = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = batch_rng(seed, b);
            let count = BATCH_TRIALS.min(trials - b * BATCH_TRIALS);
            if g.supports_masks() {
                (0..count)
                    .filter(|_| {
                        let mut removed = 0u64;
                        for (v, &p) in probs.iter().enumerate() {
                            if rng.gen::<f64>() < p {
                                removed |= 1 << v;
                            }
                        }
                        !g.connected_without(removed)
                    })
                    .count() as u64
            } else {
                let mut scratch = Scratch::default();
                let mut removed = vec![false; probs.len()];
                (0..count)
                    .filter(|_| {
                        for (flag, &p) in removed.iter_mut().zip(&probs) {
                            *flag = rng.gen::<f64>() < p;
                        }
                        !g.connected_avoiding(&removed, &mut scratch)
                    })
                    .count() as u64
            }
        })
        .sum();
    Ok(MonteCarloResult::new(trials, hits, seed))
}

/// One row of the Monte Carlo results table.
#[derive(Debug, Clone, PartialEq)]
pub struct McRow {
    pub scheme: String,
    pub n: Option<usize>,
    pub l: Option<usize>,
    pub p: f64,
    pub result: MonteCarloResult,
    pub exact: Option<f64>,
}

/// Writes `scheme,n,l,p,trials,estimate,std_error,exact`; unknown values are blank.
pub fn write_mc_csv<W: Write>(rows: &[McRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "scheme",
        "n",
        "l",
        "p",
        "trials",
        "estimate",
        "std_error",
        "exact",
    ])?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for row in rows {
        w.write_record([
            row.scheme.clone(),
            opt(row.n.map(|v| v.to_string())),
            opt(row.l.map(|v| v.to_string())),
            row.p.to_string(),
            row.result.trials.to_string(),
            row.result.estimate.to_string(),
            row.result.std_error.to_string(),
            opt(row.exact.map(|v| v.to_string())),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut_combinatorics::{exact_hack_probability, exact_hack_probability_weighted};
    use crate::net_model::{build_lscheme, build_mnop, mnop_node, LSchemeParams};

    #[test]
    fn two_single_node_paths() {
        let net = build_mnop(&[1, 1], 0.5).unwrap();
        let r = simulate_uncorrelated(&net, 1_000_000, 7).unwrap();
        assert!(r.agrees_with(0.25, 3.0), "{r:?}");
    }

    #[test]
    fn matches_enumeration() {
        let net = build_lscheme(&LSchemeParams::new(2, 2, 0.1).unwrap()).unwrap();
        let exact = exact_hack_probability(&net, 0.1).unwrap();
        let r = simulate_uncorrelated(&net, 200_000, 11).unwrap();
        assert!(r.agrees_with(exact, 3.0), "{r:?} vs {exact}");
    }

    #[test]
    fn heterogeneous_trust() {
        let net = build_mnop(&[2, 3], 0.05).unwrap();
        let net = net.with_trust(&mnop_node(1, 1), 0.4).unwrap();
        let net = net.with_trust(&mnop_node(2, 3), 0.3).unwrap();
        let exact = exact_hack_probability_weighted(&net).unwrap();
        let r = simulate_uncorrelated(&net, 200_000, 3).unwrap();
        assert!(r.agrees_with(exact, 3.0), "{r:?} vs {exact}");
    }

    #[test]
    fn fully_trusted_never_fails() {
        let net = build_lscheme(&LSchemeParams::new(3, 3, 0.0).unwrap()).unwrap();
        let r = simulate_uncorrelated(&net, 10_000, 1).unwrap();
        assert_eq!(r.hits, 0);
        assert_eq!(r.estimate, 0.0);
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let net = build_lscheme(&LSchemeParams::new(3, 2, 0.2).unwrap()).unwrap();
        let a = simulate_uncorrelated(&net, 50_000, 42).unwrap();
        let b = simulate_uncorrelated(&net, 50_000, 42).unwrap();
        let c = simulate_uncorrelated(&net, 50_000, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.hits, c.hits);
    }

    #[test]
    fn large_graphs_use_list_search() {
        let net = build_lscheme(&LSchemeParams::new(40, 2, 0.005).unwrap()).unwrap();
        let r = simulate_uncorrelated(&net, 20_000, 5).unwrap();
        // Upper bound alpha n p^2 / (1 - r) with r = n l p = 0.4 .
        assert!(r.estimate < 3.0 * 40.0 * 0.005f64.powi(2) / 0.6 + 4.0 * r.std_error);
        assert!(r.hits > 0);
    }

    #[test]
    fn zero_trials_rejected() {
        let net = build_mnop(&[1], 0.5).unwrap();
        assert!(simulate_uncorrelated(&net, 0, 1).is_err());
    }

    #[test]
    fn csv_blank_exact() {
        let net = build_mnop(&[1], 0.5).unwrap();
        let result = simulate_uncorrelated(&net, 10, 1).unwrap();
        let rows = [McRow {
            scheme: "mnop".into(),
            n: Some(1),
            l: None,
            p: 0.5,
            result,
            exact: None,
        }];
        let mut buf = Vec::new();
        write_mc_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("scheme,n,l,p,trials,estimate,std_error,exact")
        );
        assert!(lines.next().unwrap().starts_with("mnop,1,,0.5,10,"));
        assert!(text.trim_end().ends_with(','));
    }
}
