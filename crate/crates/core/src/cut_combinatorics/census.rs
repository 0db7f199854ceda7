use std::io::Write;

use rayon::prelude::*;

use crate::error::{check_probability, invalid, Error, Result};
use crate::graph::CompactGraph;
use crate::net_model::Network;

/// Largest intermediate node count accepted by exhaustive enumeration.
pub const ENUMERATION_CAP: usize = 30;

/// Masks per parallel work unit in a full census sweep.
const CHUNK: u64 = 1 << 18;

/// Number of `k`-subsets of the intermediates whose removal separates A from B,
/// for every `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutCensus {
    beta: Vec<u64>,
}

impl CutCensus {
    /// Intermediate node count `m`; `beta` has `m + 1` entries.
    pub fn node_count(&self) -> usize {
        self.beta.len() - 1
    }

    pub fn beta(&self) -> &[u64] {
        &self.beta
    }

    pub fn get(&self, k: usize) -> u64 {
        self.beta.get(k).copied().unwrap_or(0)
    }

    /// `P(H | exactly k nodes compromised)`.
    pub fn conditional(&self, k: usize) -> f64 {
        self.get(k) as f64 / binomial(self.node_count(), k) as f64
    }

    /// `sum_k beta[k] p^k (1-p)^(m-k)`.
    pub fn hack_probability(&self, p: f64) -> f64 {
        let m = self.node_count() as i32;
        self.beta
            .iter()
            .enumerate()
            .filter(|(_, &b)| b > 0)
            .map(|(k, &b)| b as f64 * p.powi(k as i32) * (1.0 - p).powi(m - k as i32))
            .sum()
    }

    /// Writes `k,beta` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "beta"])?;
        for (k, b) in self.beta.iter().enumerate() {
            w.write_record([k.to_string(), b.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn enumerable(net: &Network) -> Result<CompactGraph> {
    let m = net.intermediate_count();
    if m > ENUMERATION_CAP {
        return Err(Error::SizeCap {
            nodes: m,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(CompactGraph::new(net))
}

/// Counts the `k`-subsets of intermediates that disconnect A from B, checking
/// each subset by graph search. Subsets are visited in combinadic (colex)
/// order and split into rank ranges processed in parallel.
pub fn count_cuts_bruteforce(net: &Network, k: usize) -> Result<u64> {
    let g = enumerable(net)?;
    let m = g.len();
    if k > m {
        return Err(invalid(format!(
            "k = {k} exceeds the {m} intermediate nodes"
        )));
    }
    let total = binomial(m, k);
    let chunks = total.div_ceil(CHUNK).max(1);
    let count = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut mask = unrank_colex(start, k);
            let mut hits = 0u64;
            for rank in start..end {
                if !g.connected_without(mask) {
                    hits += 1;
                }
                if rank + 1 < end {
                    mask = next_same_popcount(mask);
                }
            }
            hits
        })
        .sum();
    Ok(count)
}

/// Full census over all `2^m` subsets, bucketed by size.
pub fn cut_census(net: &Network) -> Result<CutCensus> {
    let g = enumerable(net)?;
    let m = g.len();
    let total = 1u64 << m;
    let chunks = total.div_ceil(CHUNK);
    let beta = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut hist = vec![0u64; m + 1];
            let start = c * CHUNK;
            for mask in start..(start + CHUNK).min(total) {
                if !g.connected_without(mask) {
                    hist[mask.count_ones() as usize] += 1;
                }
            }
            hist
        })
        .reduce(
            || vec![0u64; m + 1],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(CutCensus { beta })
}

/// Exact `P(H)` for uniform node compromise probability `p`, from the census.
pub fn exact_hack_probability(net: &Network, p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(cut_census(net)?.hack_probability(p))
}

/// Exact `P(H)` using each node's own trust value, summing the weight of
/// every disconnecting subset.
pub fn exact_hack_probability_weighted(net: &Network) -> Result<f64> {
    let g = enumerable(net)?;
    let probs: Vec<f64> = g
        .ids()
        .iter()
        .map(|id| net.trust(id).expect("intermediate"))
        .collect();
    let m = g.len();
    let total = 1u64 << m;
    let chunks = total.div_ceil(CHUNK);
    Ok((0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let mut acc = 0.0;
            for mask in start..(start + CHUNK).min(total) {
                if !g.connected_without(mask) {
                    acc += (0..m)
                        .map(|v| {
                            if mask >> v & 1 == 1 {
                                probs[v]
                            } else {
                                1.0 - probs[v]
                            }
                        })
                        .product::<f64>();
                }
            }
            acc
        })
        .sum())
}

/// `C(n, k)` for the small arguments used by enumeration.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// The `rank`-th `k`-subset of the naturals in colex order, as a bitmask.
pub(crate) fn unrank_colex(mut rank: u64, k: usize) -> u64 {
    let mut mask = 0u64;
    for i in (1..=k).rev() {
        let mut c = i - 1;
        while binomial(c + 1, i) <= rank {
            c += 1;
        }
        rank -= binomial(c, i);
        mask |= 1 << c;
    }
    mask
}

/// Next larger integer with the same number of set bits (Gosper's hack).
#[inline]
pub(crate) fn next_same_popcount(x: u64) -> u64 {
    if x == 0 {
        return 0;
    }
    let c = x & x.wrapping_neg();
    let r = x + c;
    (((r ^ x) >> 2) / c) | r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut_combinatorics::count_min_cuts_dp;
    use crate::net_model::{build_lscheme, build_mnop, LSchemeParams};

    fn scheme(n: usize, l: usize) -> Network {
        build_lscheme(&LSchemeParams::new(n, l, 0.1).unwrap()).unwrap()
    }

    #[test]
    fn colex_unrank_matches_gosper() {
        for k in 1..=4 {
            let mut mask = (1u64 << k) - 1;
            for rank in 0..binomial(9, k) {
                assert_eq!(unrank_colex(rank, k), mask, "k={k} rank={rank}");
                mask = next_same_popcount(mask);
            }
        }
        assert_eq!(unrank_colex(0, 0), 0);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(30, 15), 155_117_520);
        assert_eq!(binomial(4, 5), 0);
        assert_eq!(binomial(0, 0), 1);
    }

    #[test]
    fn bruteforce_examples() {
        let net = scheme(2, 2);
        assert_eq!(
            count_cuts_bruteforce(&net, 2).unwrap(),
            count_min_cuts_dp(2, 2).unwrap() as u64
        );
        assert_eq!(count_cuts_bruteforce(&net, 0).unwrap(), 0);

        let path = build_mnop(&[6], 0.1).unwrap();
        for k in 1..=6 {
            assert_eq!(count_cuts_bruteforce(&path, k).unwrap(), binomial(6, k));
        }
    }

    #[test]
    fn size_cap_is_enforced() {
        let net = scheme(16, 2);
        assert_eq!(
            count_cuts_bruteforce(&net, 2),
            Err(Error::SizeCap {
                nodes: 32,
                cap: ENUMERATION_CAP
            })
        );
        assert!(cut_census(&net).is_err());
        assert!(count_cuts_bruteforce(&scheme(2, 2), 5).is_err());
    }

    #[test]
    fn census_agrees_with_per_k_counts() {
        let net = scheme(4, 3);
        let census = cut_census(&net).unwrap();
        for k in 0..=12 {
            assert_eq!(
                census.get(k),
                count_cuts_bruteforce(&net, k).unwrap(),
                "k = {k}"
            );
        }
        assert_eq!(census.get(12), 1);
        assert_eq!(census.get(2), 0);
    }

    #[test]
    fn exact_probability_examples() {
        let net = build_mnop(&[1, 1], 0.5).unwrap();
        approx::assert_relative_eq!(exact_hack_probability(&net, 0.5).unwrap(), 0.25);

        // l = 2, n = 2 by hand: beta = [0, 0, 4, 4, 1].
        let net = scheme(2, 2);
        let census = cut_census(&net).unwrap();
        assert_eq!(census.beta(), &[0, 0, 4, 4, 1]);
        let p: f64 = 0.1;
        let expected = 4.0 * p.powi(2) * 0.81 + 4.0 * p.powi(3) * 0.9 + p.powi(4);
        approx::assert_relative_eq!(
            exact_hack_probability(&net, p).unwrap(),
            expected,
            max_relative = 1e-14
        );

        assert_eq!(exact_hack_probability(&net, 0.0).unwrap(), 0.0);
        assert_eq!(exact_hack_probability(&net, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn weighted_matches_uniform() {
        let net = scheme(3, 3);
        approx::assert_relative_eq!(
            exact_hack_probability_weighted(&net).unwrap(),
            exact_hack_probability(&net, 0.1).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn census_csv() {
        let mut buf = Vec::new();
        cut_census(&scheme(1, 2))
            .unwrap()
            .write_csv(&mut buf)
            .unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,beta\n0,0\n1,0\n2,1\n");
    }
}
