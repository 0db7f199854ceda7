//! Finite-resource adversary with the piecewise-linear compromise function
//! `f(x) = min(alpha * x, 1)`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::net_model::{NodeId, PathSystem};

/// Node count and grid resolution caps for the exhaustive grid search.
pub const GRID_NODE_CAP: usize = 8;
pub const GRID_STEP_CAP: usize = 20;

/// A resource allocation against the nodes of a path system.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceAttack {
    pub alpha_slope: f64,
    pub total_resources: f64,
    pub allocation: BTreeMap<NodeId, f64>,
}

impl ResourceAttack {
    pub fn compromise_probability(&self, id: &NodeId) -> f64 {
        let r = self.allocation.get(id).copied().unwrap_or(0.0);
        compromise(self.alpha_slope, r)
    }

    /// `prod_j (1 - prod_{i in path j} (1 - f(r_i)))`.
    pub fn hack_probability(&self, sys: &PathSystem) -> f64 {
        sys.paths()
            .iter()
            .map(|path| {
                1.0 - path
                    .iter()
                    .map(|id| 1.0 - self.compromise_probability(id))
                    .product::<f64>()
            })
            .product()
    }

    pub fn spent(&self) -> f64 {
        self.allocation.values().sum()
    }
}

fn compromise(alpha_slope: f64, r: f64) -> f64 {
    (alpha_slope * r).clamp(0.0, 1.0)
}

fn check_resources(alpha_slope: f64, resources: f64) -> Result<()> {
    if !(alpha_slope.is_finite() && alpha_slope >= 0.0) {
        return Err(invalid(format!(
            "slope {alpha_slope} must be finite and non-negative"
        )));
    }
    if !(resources.is_finite() && resources >= 0.0) {
        return Err(invalid(format!(
            "resources {resources} must be finite and non-negative"
        )));
    }
    Ok(())
}

/// Candidate maxima `P_k = 1 - (1 - alpha R / k)^k` of spreading all resources
/// evenly over `k` nodes of one path, for `k = 1..=n`.
pub fn single_path_extrema(n: usize, alpha_slope: f64, resources: f64) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(invalid("path needs at least one node"));
    }
    check_resources(alpha_slope, resources)?;
    let ar = alpha_slope * resources;
    if ar > 1.0 {
        return Err(Error::Precondition(format!(
            "alpha * R = {ar} > 1: compromise saturates and the linear regime does not apply"
        )));
    }
    Ok((1..=n)
        .map(|k| 1.0 - (1.0 - ar / k as f64).powi(k as i32))
        .collect())
}

/// The adversary optimum: `R / N` on the first node of each path, giving
/// `(alpha R / N)^N`.
pub fn correlated_optimal_attack(
    sys: &PathSystem,
    alpha_slope: f64,
    resources: f64,
) -> Result<(ResourceAttack, f64)> {
    if sys.is_empty() {
        return Err(invalid("path system is empty"));
    }
    check_resources(alpha_slope, resources)?;
    let paths = sys.len() as f64;
    if alpha_slope * resources > paths {
        return Err(Error::Precondition(format!(
            "alpha * R = {} exceeds the path count {}: equal shares would saturate",
            alpha_slope * resources,
            sys.len()
        )));
    }
    let share = resources / paths;
    let allocation = sys
        .paths()
        .iter()
        .map(|path| (path[0].clone(), share))
        .collect();
    let attack = ResourceAttack {
        alpha_slope,
        total_resources: resources,
        allocation,
    };
    let probability = (alpha_slope * share).powi(sys.len() as i32);
    Ok((attack, probability))
}

/// Best allocation found by the grid search; `allocation[j][i]` is the share
/// of node `i` on path `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub allocation: Vec<Vec<f64>>,
    pub probability: f64,
}

impl GridSearchResult {
    /// Number of paths with resources on exactly one node.
    pub fn single_node_paths(&self) -> usize {
        self.allocation
            .iter()
            .filter(|path| path.iter().filter(|&&r| r > 0.0).count() == 1)
            .count()
    }
}

/// Exhaustive search over every split of `R` into `grid_steps` equal units
/// across all nodes, scoring each with the exact path-system probability.
pub fn correlated_grid_oracle(
    path_lengths: &[usize],
    alpha_slope: f64,
    resources: f64,
    grid_steps: usize,
) -> Result<GridSearchResult> {
    let slopes: Vec<Vec<f64>> = path_lengths.iter().map(|&n| vec![alpha_slope; n]).collect();
    correlated_grid_oracle_with_slopes(&slopes, resources, grid_steps)
}

/// Grid search with a separate slope per node, `slopes[j][i]`.
pub fn correlated_grid_oracle_with_slopes(
    slopes: &[Vec<f64>],
    resources: f64,
    grid_steps: usize,
) -> Result<GridSearchResult> {
    if slopes.is_empty() || slopes.iter().any(Vec::is_empty) {
        return Err(invalid("every path needs at least one node"));
    }
    let flat: Vec<f64> = slopes.iter().flatten().copied().collect();
    for &a in &flat {
        check_resources(a, resources)?;
    }
    if flat.len() > GRID_NODE_CAP {
        return Err(Error::SizeCap {
            nodes: flat.len(),
            cap: GRID_NODE_CAP,
        });
    }
    if grid_steps == 0 || grid_steps > GRID_STEP_CAP {
        return Err(invalid(format!(
            "grid_steps must be in 1..={GRID_STEP_CAP}"
        )));
    }
    let unit = resources / grid_steps as f64;
    let lengths: Vec<usize> = slopes.iter().map(Vec::len).collect();
    let score = |units: &[usize]| -> f64 {
        let mut offset = 0;
        lengths
            .iter()
            .map(|&len| {
                let survive: f64 = (offset..offset + len)
                    .map(|v| 1.0 - compromise(flat[v], units[v] as f64 * unit))
                    .product();
                offset += len;
                1.0 - survive
            })
            .product()
    };

    let m = flat.len();
    let (units, probability) = (0..=grid_steps)
        .into_par_iter()
        .map(|first| {
            let mut units = vec![0usize; m];
            units[0] = first;
            let mut best = (units.clone(), f64::NEG_INFINITY);
            search(&mut units, 1, grid_steps - first, &score, &mut best);
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((Vec::new(), f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });

    let mut allocation = Vec::with_capacity(lengths.len());
    let mut offset = 0;
    for &len in &lengths {
        allocation.push(
            units[offset..offset + len]
                .iter()
                .map(|&u| u as f64 * unit)
                .collect(),
        );
        offset += len;
    }
    Ok(GridSearchResult {
        allocation,
        probability,
    })
}

fn search(
    units: &mut [usize],
    pos: usize,
    left: usize,
    score: &impl Fn(&[usize]) -> f64,
    best: &mut (Vec<usize>, f64),
) {
    if pos == units.len() {
        if left == 0 {
            let p = score(units);
            if p > best.1 {
                *best = (units.to_vec(), p);
            }
        }
        return;
    }
    if pos == units.len() - 1 {
        units[pos] = left;
        search(units, pos + 1, 0, score, best);
        units[pos] = 0;
        return;
    }
    for u in (0..=left).rev() {
        units[pos] = u;
        search(units, pos + 1, left - u, score, best);
    }
    units[pos] = 0;
}

/// Loss of the optimum when shares must be multiples of `R / grid_steps`:
/// `(alpha R / N)^N` minus the product at the most even grid split.
pub fn grid_resolution_gap(
    paths: usize,
    alpha_slope: f64,
    resources: f64,
    grid_steps: usize,
) -> f64 {
    let unit = resources / grid_steps as f64;
    let base = grid_steps / paths;
    let extra = grid_steps % paths;
    let gridded: f64 = (0..paths)
        .map(|j| {
            let units = base + usize::from(j < extra);
            compromise(alpha_slope, units as f64 * unit)
        })
        .product();
    (alpha_slope * resources / paths as f64).powi(paths as i32) - gridded
}

/// Probabilities of using one or two paths on the crossover example graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossover {
    /// `2 p`: the two-node shortest path.
    pub single: f64,
    /// `((n + 1) p)^2`: two disjoint paths of `n + 1` nodes.
    pub double: f64,
    /// 1 exactly when `p > 2 / (n + 1)^2`, else 2.
    pub best: usize,
    /// False when `(n + 1) p` is not small and the linearization is doubtful.
    pub in_regime: bool,
}

/// Below this value of `(n + 1) p` the linearized probabilities are trusted.
pub const CROSSOVER_REGIME: f64 = 0.1;

pub fn appendix1_crossover(n: usize, p: f64) -> Crossover {
    let np1 = (n + 1) as f64;
    let threshold = crossover_threshold(n);
    Crossover {
        single: 2.0 * p,
        double: (np1 * p).powi(2),
        best: if p > threshold { 1 } else { 2 },
        in_regime: np1 * p < CROSSOVER_REGIME,
    }
}

/// `2 / (n + 1)^2`, where one path and two paths are equally good.
pub fn crossover_threshold(n: usize) -> f64 {
    2.0 / ((n + 1) as f64).powi(2)
}
