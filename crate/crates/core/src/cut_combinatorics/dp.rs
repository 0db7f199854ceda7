use crate::error::{invalid, Error, Result};
use crate::net_model::LSchemeParams;

/// Exact number `c(l, n)` of minimal (size-`l`) A-B cuts of the l-scheme.
///
/// A minimal cut takes exactly one node per row. Nodes in columns `c` and
/// `c'` of adjacent rows can sit in the same cut iff no interlinked column lies
/// strictly between them, so the count is a row-by-row transfer over columns:
/// each column `j` accepts predecessors from the window bounded by the nearest
/// interlinked columns on either side (or the scheme edge). Runs in `O(n l)`
/// using prefix sums.
pub fn count_min_cuts_dp(n: usize, l: usize) -> Result<u128> {
    if n < 1 || l < 1 {
        return Err(invalid("c(l, n) needs n >= 1 and l >= 1"));
    }
    if l == 1 {
        return Ok(n as u128);
    }
    let params = LSchemeParams::new(n, l, 0.0)?;
    let windows = compatible_windows(&params);

    let mut row = vec![1u128; n];
    let mut prefix = vec![0u128; n + 1];
    for _ in 2..=l {
        for (j, &v) in row.iter().enumerate() {
            prefix[j + 1] = prefix[j].checked_add(v).ok_or(Error::Overflow("c(l, n)"))?;
        }
        for (j, &(lo, hi)) in windows.iter().enumerate() {
            row[j] = prefix[hi + 1] - prefix[lo];
        }
    }
    row.iter()
        .try_fold(0u128, |acc, &v| acc.checked_add(v))
        .ok_or(Error::Overflow("c(l, n)"))
}

/// For every column (0-based), the inclusive range of columns of an adjacent
/// row that can complete a cut with it.
pub(crate) fn compatible_windows(params: &LSchemeParams) -> Vec<(usize, usize)> {
    let n = params.n;
    let linked: Vec<usize> = params.interlinked_columns().map(|j| j - 1).collect();
    (0..n)
        .map(|j| {
            let lo = linked.iter().rev().find(|&&c| c < j).copied().unwrap_or(0);
            let hi = linked.iter().find(|&&c| c > j).copied().unwrap_or(n - 1);
            (lo, hi)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut_combinatorics::alpha_closed;

    #[test]
    fn examples() {
        for n in 1..=20 {
            assert_eq!(count_min_cuts_dp(n, 1).unwrap(), n as u128);
        }
        assert_eq!(count_min_cuts_dp(2, 2).unwrap(), 4);
        assert_eq!(count_min_cuts_dp(3, 3).unwrap(), 17);
    }

    #[test]
    fn two_rows_is_three_per_column() {
        // Column pairs within distance one of each other.
        for n in 1..=50 {
            assert_eq!(count_min_cuts_dp(n, 2).unwrap(), 3 * n as u128 - 2);
        }
    }

    #[test]
    fn interior_window_widths() {
        let params = LSchemeParams::new(12, 4, 0.0).unwrap();
        let w = compatible_windows(&params);
        // Interlinked columns 3, 6, 9, 12 (1-based).
        assert_eq!(w[5], (2, 8));
        assert_eq!(w[6], (5, 8));
        assert_eq!(w[0], (0, 2));
        assert_eq!(w[11], (8, 11));
    }

    #[test]
    fn ratio_approaches_alpha() {
        for l in 2..=6 {
            let n = 4000;
            let c = count_min_cuts_dp(n, l).unwrap() as f64;
            let a = alpha_closed(l).unwrap();
            assert!(c <= a * n as f64);
            assert!(c / (a * n as f64) > 0.99, "l = {l}");
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(count_min_cuts_dp(1000, 40), Err(Error::Overflow("c(l, n)")));
    }
}
