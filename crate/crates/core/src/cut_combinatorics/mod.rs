//! Counting A-B vertex cuts of the interlinked l-scheme.
//!
//! `alpha(l)` gives the asymptotic number of minimal cuts per column, the DP
//! gives the exact minimal-cut count `c(l, n)`, and the brute-force census
//! gives `beta(k)`, the number of disconnecting `k`-subsets, from which the
//! exact compromise probability follows.

mod alpha;
mod census;
mod dp;

use crate::error::{invalid, Error, Result};
use crate::net_model::{build_lscheme, LSchemeParams};

pub use alpha::{alpha_closed, alpha_matrix};
pub use census::{
    binomial, count_cuts_bruteforce, cut_census, exact_hack_probability,
    exact_hack_probability_weighted, CutCensus, ENUMERATION_CAP,
};
pub use dp::count_min_cuts_dp;

/// Upper bound `alpha(l) n p^l / (1 - r)` on the l-scheme compromise
/// probability, valid when `n l p <= r < 1`.
pub fn hack_prob_upper_bound(n: usize, l: usize, p: f64, r: f64) -> Result<f64> {
    if n < 1 || l < 1 {
        return Err(invalid("bound needs n >= 1 and l >= 1"));
    }
    crate::error::check_probability("p", p)?;
    if !(0.0..1.0).contains(&r) {
        return Err(invalid(format!("r = {r} must lie in [0, 1)")));
    }
    let nlp = (n * l) as f64 * p;
    if nlp > r {
        return Err(Error::Precondition(format!(
            "n*l*p = {nlp} exceeds r = {r}"
        )));
    }
    Ok(alpha_closed(l)? * n as f64 * p.powi(l as i32) / (1.0 - r))
}

/// Outcome of checking the cut-growth inequalities on one l-scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaLemmaReport {
    pub n: usize,
    pub l: usize,
    pub census: CutCensus,
    /// `beta(k) <= beta(k-1) n l` for every `k - 1 >= l`.
    pub step_holds: bool,
    /// `beta(k) <= alpha(l) n (n l)^(k-l)` for every `k >= l`.
    pub bound_holds: bool,
    /// Largest `beta(k+1) / (beta(k) n l)` over `k >= l` with `beta(k) > 0`.
    pub max_ratio: f64,
    /// The `k` attaining `max_ratio` (first one on ties).
    pub max_ratio_k: usize,
    pub violations: Vec<String>,
}

impl BetaLemmaReport {
    pub fn passed(&self) -> bool {
        self.step_holds && self.bound_holds
    }

    /// `beta(l+1) / (beta(l) n l)`, the ratio expected to approach 1 as `n` grows.
    pub fn leading_ratio(&self) -> f64 {
        ratio(&self.census, self.l, self.n * self.l)
    }

    pub fn maximized_at_l(&self) -> bool {
        self.max_ratio_k == self.l
    }
}

fn ratio(census: &CutCensus, k: usize, nl: usize) -> f64 {
    census.get(k + 1) as f64 / (census.get(k) as f64 * nl as f64)
}

/// Runs the full census on the `(n, l)` scheme and checks both inequalities
/// for every `k`. Requires `n l < 30`.
pub fn verify_beta_lemma(n: usize, l: usize) -> Result<BetaLemmaReport> {
    if n < 1 || l < 1 {
        return Err(invalid("scheme needs n >= 1 and l >= 1"));
    }
    let nl = n * l;
    if nl >= ENUMERATION_CAP {
        return Err(Error::SizeCap {
            nodes: nl,
            cap: ENUMERATION_CAP - 1,
        });
    }
    let net = build_lscheme(&LSchemeParams::new(n, l, 0.0)?)?;
    let census = cut_census(&net)?;
    Ok(check_beta(n, l, census))
}

pub(crate) fn check_beta(n: usize, l: usize, census: CutCensus) -> BetaLemmaReport {
    let nl = n * l;
    let alpha = alpha_closed(l).expect("l >= 1");
    let mut violations = Vec::new();
    let mut step_holds = true;
    let mut bound_holds = true;
    for k in l..=nl {
        let b = census.get(k);
        if k > l {
            let prev = census.get(k - 1) as u128;
            if b as u128 > prev * nl as u128 {
                step_holds = false;
                violations.push(format!(
                    "beta({k}) = {b} > beta({}) * {nl} = {}",
                    k - 1,
                    prev * nl as u128
                ));
            }
        }
        let cap = alpha * n as f64 * (nl as f64).powi((k - l) as i32);
        if b as f64 > cap * (1.0 + 1e-12) {
            bound_holds = false;
            violations.push(format!("beta({k}) = {b} > alpha(l) n (nl)^(k-l) = {cap}"));
        }
    }
    let (max_ratio_k, max_ratio) = (l..nl)
        .filter(|&k| census.get(k) > 0)
        .map(|k| (k, ratio(&census, k, nl)))
        .fold((l, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
    BetaLemmaReport {
        n,
        l,
        census,
        step_holds,
        bound_holds,
        max_ratio: if max_ratio.is_finite() {
            max_ratio
        } else {
            0.0
        },
        max_ratio_k,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net_model::build_lscheme;
    use proptest::prelude::*;

    #[test]
    fn bound_examples() {
        let b = hack_prob_upper_bound(2, 2, 0.01, 0.1).unwrap();
        approx::assert_relative_eq!(b, 3.0 * 2.0 * 1e-4 / 0.9, max_relative = 1e-12);
        let net = build_lscheme(&LSchemeParams::new(2, 2, 0.01).unwrap()).unwrap();
        assert!(exact_hack_probability(&net, 0.01).unwrap() <= b);

        let b = hack_prob_upper_bound(30, 2, 1e-3, 0.06).unwrap();
        approx::assert_relative_eq!(b, 9.574468085106383e-5, max_relative = 1e-9);

        assert!(hack_prob_upper_bound(2, 2, 1e-12, 0.1).unwrap() < 1e-20);
    }

    #[test]
    fn bound_precondition_names_values() {
        let err = hack_prob_upper_bound(10, 2, 0.01, 0.1).unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Precondition(_)));
        assert!(msg.contains("0.2") && msg.contains("0.1"), "{msg}");
    }

    #[test]
    fn lemma_small_schemes() {
        for (n, l) in [(1, 1), (5, 1), (3, 2), (6, 2), (3, 3), (2, 4), (3, 5)] {
            let report = verify_beta_lemma(n, l).unwrap();
            assert!(report.passed(), "({n},{l}): {:?}", report.violations);
            assert!(
                report.maximized_at_l(),
                "({n},{l}) max at {}",
                report.max_ratio_k
            );
        }
    }

    #[test]
    fn single_row_is_binomial() {
        let report = verify_beta_lemma(7, 1).unwrap();
        for k in 0..=7 {
            let expected = if k == 0 { 0 } else { binomial(7, k) };
            assert_eq!(report.census.get(k), expected);
        }
    }

    #[test]
    fn lemma_refuses_large() {
        assert!(matches!(
            verify_beta_lemma(10, 3),
            Err(Error::SizeCap { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn census_structure(n in 1usize..=6, l in 1usize..=4) {
            let net = build_lscheme(&LSchemeParams::new(n, l, 0.0).unwrap()).unwrap();
            let census = cut_census(&net).unwrap();
            let m = n * l;
            for k in 0..l {
                prop_assert_eq!(census.get(k), 0);
            }
            prop_assert_eq!(census.get(m), 1);
            prop_assert_eq!(census.get(l) as u128, count_min_cuts_dp(n, l).unwrap());
            for k in 0..m {
                prop_assert!(census.get(k) <= binomial(m, k));
                // Each k-cut has m-k supersets of size k+1, each counted at most k+1 times.
                prop_assert!(census.get(k + 1) * (k as u64 + 1) >= census.get(k) * (m - k) as u64);
                prop_assert!(census.conditional(k + 1) >= census.conditional(k));
            }
        }
    }
}
