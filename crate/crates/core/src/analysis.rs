//! Closed-form comparisons of the overlapping-path scheme against plain
//! disjoint paths, and the correction for the `1 - (1-p)^n ~ np` shortcut.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::cut_combinatorics::{alpha_closed, count_cuts_bruteforce, ENUMERATION_CAP};
use crate::error::{invalid, Error, Result};
use crate::net_model::build_single_link;

/// `mu (1 - e^(-1/mu))`, the limit of `1 + v_n(mu)`.
pub fn gamma(mu: f64) -> Result<f64> {
    if mu.is_nan() || mu < 1.0 || mu.is_infinite() {
        return Err(invalid(format!("gamma needs finite mu >= 1, got {mu}")));
    }
    Ok(-mu * (-1.0 / mu).exp_m1())
}

/// Relative error of `np` against `1 - (1-p)^n` with `p = 1/(mu n)`:
/// `mu (1 - (1 - 1/(mu n))^n) - 1`.
pub fn v_n(mu: f64, n: usize) -> Result<f64> {
    let mn = mu * n as f64;
    if n < 1 || mn.is_nan() || mn <= 1.0 || !mn.is_finite() {
        return Err(invalid(format!(
            "v_n needs mu * n > 1, got mu = {mu}, n = {n}"
        )));
    }
    let miss = -(n as f64 * (-1.0 / mn).ln_1p()).exp_m1();
    Ok(mu * miss - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// l-path overlapping scheme beats (l+1) disjoint paths.
    MopBetter,
    MnopBetter,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::MopBetter => "MOP-better",
            Verdict::MnopBetter => "MNOP-better",
        })
    }
}

/// Ratio of the l-scheme bound to the `(l+1)`-path disjoint scheme, which
/// uses the same number of links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaReport {
    pub n: usize,
    pub l: usize,
    pub p: f64,
    pub r: f64,
    /// `alpha(l) / ((1 - r) p n^l)`.
    pub eta: f64,
    /// `1 / (n p)`.
    pub mu: f64,
    /// `eta / gamma(mu)^(l+1)`.
    pub eta_corrected: f64,
    pub verdict: Verdict,
}

pub fn eta(n: usize, l: usize, p: f64, r: f64) -> Result<EtaReport> {
    if n < 1 || l < 1 {
        return Err(invalid("eta needs n >= 1 and l >= 1"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("p = {p} must lie in (0, 1]")));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(invalid(format!("r = {r} must lie in [0, 1)")));
    }
    let nlp = (n * l) as f64 * p;
    if nlp > r {
        return Err(Error::Precondition(format!(
            "n*l*p = {nlp} exceeds r = {r}"
        )));
    }
    let eta = eta_value(n, l, p, r)?;
    let mu = 1.0 / (n as f64 * p);
    let eta_corrected = eta / gamma(mu)?.powi(l as i32 + 1);
    let verdict = if eta_corrected < 1.0 {
        Verdict::MopBetter
    } else {
        Verdict::MnopBetter
    };
    Ok(EtaReport {
        n,
        l,
        p,
        r,
        eta,
        mu,
        eta_corrected,
        verdict,
    })
}

fn eta_value(n: usize, l: usize, p: f64, r: f64) -> Result<f64> {
    Ok(alpha_closed(l)? / ((1.0 - r) * p * (n as f64).powi(l as i32)))
}

fn eta_corrected_value(n: usize, l: usize, p: f64, r: f64) -> Result<f64> {
    Ok(eta_value(n, l, p, r)? / gamma(1.0 / (n as f64 * p))?.powi(l as i32 + 1))
}

/// Trust values for which the l-scheme bound applies and beats disjoint paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PRange {
    /// Where `eta = 1`: `alpha(l) / ((1 - r) n^l)`.
    pub p_min: f64,
    /// `r / (n l)`.
    pub p_max: f64,
    pub nonempty: bool,
    /// Where the corrected coefficient reaches 1, if inside `(0, p_max]`.
    pub p_min_corrected: Option<f64>,
}

impl PRange {
    pub fn nonempty_corrected(&self) -> bool {
        self.p_min_corrected.is_some_and(|p| p < self.p_max)
    }
}

pub fn p_range(n: usize, l: usize, r: f64) -> Result<PRange> {
    if l < 2 {
        return Err(invalid("an overlapping scheme needs l >= 2"));
    }
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid(format!("r = {r} must lie in (0, 1)")));
    }
    let p_min = alpha_closed(l)? / ((1.0 - r) * (n as f64).powi(l as i32));
    let p_max = r / (n * l) as f64;
    let nonempty = p_min < p_max;
    let p_min_corrected = if nonempty && eta_corrected_value(n, l, p_max, r)? < 1.0 {
        // The corrected coefficient is at least eta, so the root lies above p_min,
        // and it decreases in p on (0, p_max].
        let (mut lo, mut hi) = (p_min, p_max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if eta_corrected_value(n, l, mid, r)? < 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    } else {
        None
    };
    Ok(PRange {
        p_min,
        p_max,
        nonempty,
        p_min_corrected,
    })
}

/// Two-cut count of a two-row ladder with one rung in the middle column,
/// divided by the `n^2` two-cuts of the same rows without it.
pub fn single_link_factor(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid("single-link comparison needs n >= 2"));
    }
    if 2 * n >= ENUMERATION_CAP {
        return Err(Error::SizeCap {
            nodes: 2 * n,
            cap: ENUMERATION_CAP - 1,
        });
    }
    let net = build_single_link(n, 0.0)?;
    Ok(count_cuts_bruteforce(&net, 2)? as f64 / (n * n) as f64)
}

/// One `(n, l)` cell of the p-range figures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureCell {
    pub n: usize,
    pub l: usize,
    pub r: f64,
    pub range: PRange,
}

impl FigureCell {
    pub fn log10_p_min(&self) -> f64 {
        self.range.p_min.log10()
    }

    pub fn log10_p_max(&self) -> f64 {
        self.range.p_max.log10()
    }

    /// `log10 p_max - log10 p_min`; negative when the range is empty.
    pub fn log10_width(&self) -> f64 {
        self.log10_p_max() - self.log10_p_min()
    }
}

/// Grids over `n` in `ns` and `l` in `ls`, row-major in `n`.
pub fn figure_data(ns: &[usize], ls: &[usize], r: f64) -> Result<Vec<FigureCell>> {
    let cells: Vec<(usize, usize)> = ns
        .iter()
        .flat_map(|&n| ls.iter().map(move |&l| (n, l)))
        .collect();
    cells
        .into_par_iter()
        .map(|(n, l)| {
            Ok(FigureCell {
                n,
                l,
                r,
                range: p_range(n, l, r)?,
            })
        })
        .collect()
}

/// Writes `n,l,r,log10_p_min,log10_p_max,log10_width,nonempty,p_min_corrected`.
pub fn write_figure_csv<W: Write>(cells: &[FigureCell], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "l",
        "r",
        "log10_p_min",
        "log10_p_max",
        "log10_width",
        "nonempty",
        "p_min_corrected",
    ])?;
    for c in cells {
        w.write_record([
            c.n.to_string(),
            c.l.to_string(),
            c.r.to_string(),
            sig6(c.log10_p_min()),
            sig6(c.log10_p_max()),
            sig6(c.log10_width()),
            c.range.nonempty.to_string(),
            c.range.p_min_corrected.map(sig6).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Formats with six significant digits, dropping trailing zeros.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
