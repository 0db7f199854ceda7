//! Vertex connectivity between the endpoints: Menger cut order, minimum-length
//! disjoint path systems, and the path-count choice for independent node failures.
//!
//! Routing several terminal pairs at once (k-DPP) is NP-complete and not
//! provided here.

mod flow;

use std::collections::BTreeMap;

use crate::error::{invalid, Error, Result};
use crate::net_model::{Network, NodeId, PathSystem};

pub use flow::FlowNetwork;

fn reject_direct_link(net: &Network) -> Result<()> {
    if net.has_edge(net.endpoint_a(), net.endpoint_b()) {
        Err(Error::DirectLink)
    } else {
        Ok(())
    }
}

/// Size of the smallest intermediate node set separating A from B, equal to
/// the maximum number of vertex-disjoint A-B paths.
pub fn min_vertex_cut_order(net: &Network) -> Result<usize> {
    reject_direct_link(net)?;
    Ok(FlowNetwork::new(net).max_flow(usize::MAX))
}

/// One minimum A-B vertex cut, sorted.
pub fn min_vertex_cut(net: &Network) -> Result<Vec<NodeId>> {
    reject_direct_link(net)?;
    let mut flow = FlowNetwork::new(net);
    flow.max_flow(usize::MAX);
    let mut cut = flow.cut_nodes();
    cut.sort();
    Ok(cut)
}

/// `count` vertex-disjoint A-B paths with the fewest intermediate nodes in total.
///
/// Paths are returned in lexicographic order of their node sequences.
pub fn find_disjoint_paths(net: &Network, count: usize) -> Result<PathSystem> {
    if count == 0 {
        return Err(invalid("path count must be positive"));
    }
    reject_direct_link(net)?;
    let mut flow = FlowNetwork::new(net);
    if !flow.min_cost_flow(count) {
        let cut_order = flow.max_flow(usize::MAX);
        return Err(Error::Infeasible {
            requested: count,
            cut_order,
        });
    }
    let mut paths = flow.flow_paths();
    paths.sort();
    PathSystem::new(net, paths)
}

/// Bound `(mean_len * p)^N` for one candidate path count.
#[derive(Debug, Clone, PartialEq)]
pub struct PathCountCandidate {
    pub count: usize,
    pub total_nodes: usize,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathCountChoice {
    pub best_count: usize,
    pub system: PathSystem,
    pub bound: f64,
    pub candidates: Vec<PathCountCandidate>,
}

/// Tries every path count `N` up to `max_paths` (and the cut order), taking the
/// shortest system for each and scoring it by `(mean_len * p)^N`. Ties go to
/// the smaller `N`.
pub fn optimize_path_count(net: &Network, p: f64, max_paths: usize) -> Result<PathCountChoice> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!(
            "p = {p} must lie strictly between 0 and 1"
        )));
    }
    if max_paths == 0 {
        return Err(invalid("max_paths must be at least 1"));
    }
    let cut_order = min_vertex_cut_order(net)?;
    if cut_order == 0 {
        return Err(Error::Infeasible {
            requested: 1,
            cut_order,
        });
    }
    let mut best: Option<(PathSystem, f64)> = None;
    let mut candidates = Vec::new();
    for count in 1..=max_paths.min(cut_order) {
        let system = find_disjoint_paths(net, count)?;
        let bound = (system.mean_length() * p).powi(count as i32);
        candidates.push(PathCountCandidate {
            count,
            total_nodes: system.total_nodes(),
            bound,
        });
        if best.as_ref().is_none_or(|(_, b)| bound < *b) {
            best = Some((system, bound));
        }
    }
    let (system, bound) = best.expect("at least one candidate");
    Ok(PathCountChoice {
        best_count: system.len(),
        system,
        bound,
        candidates,
    })
}

/// Exact compromise probability of a path system under independent node
/// failures: every path must contain at least one failed node.
pub fn path_system_hack_probability(
    sys: &PathSystem,
    trust: &BTreeMap<NodeId, f64>,
) -> Result<f64> {
    let mut total = 1.0;
    for path in sys.paths() {
        let mut survive = 1.0;
        for id in path {
            let p = *trust
                .get(id)
                .ok_or_else(|| Error::MissingTrust(id.to_string()))?;
            survive *= 1.0 - p;
        }
        total *= 1.0 - survive;
    }
    Ok(total)
}

/// The small-`p` estimate `prod_j (n_j p)` and its upper bound `(mean_len p)^N`.
pub fn linearized_hack_bound(sys: &PathSystem, p: f64) -> (f64, f64) {
    let product = sys.path_lengths().iter().map(|&n| n as f64 * p).product();
    let bound = (sys.mean_length() * p).powi(sys.len() as i32);
    (product, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net_model::{
        build_crossover_example, build_lscheme, build_mnop, lscheme_node, mnop_node, LSchemeParams,
    };

    fn ids(v: &[&str]) -> Vec<NodeId> {
        v.iter().map(|s| NodeId::from(*s)).collect()
    }

    #[test]
    fn cut_order_examples() {
        assert_eq!(
            min_vertex_cut_order(&build_mnop(&[2, 2], 0.1).unwrap()).unwrap(),
            2
        );
        assert_eq!(
            min_vertex_cut_order(&build_mnop(&[3, 3, 3], 0.1).unwrap()).unwrap(),
            3
        );
        let lscheme = build_lscheme(&LSchemeParams::new(6, 4, 0.1).unwrap()).unwrap();
        assert_eq!(min_vertex_cut_order(&lscheme).unwrap(), 4);
        let empty = Network::builder("A", "B").build().unwrap();
        assert_eq!(min_vertex_cut_order(&empty).unwrap(), 0);
    }

    #[test]
    fn direct_link_is_rejected() {
        let mut b = Network::builder("A", "B");
        b.edge("A", "B").unwrap();
        assert_eq!(
            min_vertex_cut_order(&b.build().unwrap()),
            Err(Error::DirectLink)
        );
    }

    #[test]
    fn disjoint_paths_examples() {
        let net = build_mnop(&[2, 3], 0.1).unwrap();
        let sys = find_disjoint_paths(&net, 2).unwrap();
        assert_eq!(sys.total_nodes(), 5);
        assert_eq!(
            sys.paths(),
            &[
                vec![mnop_node(1, 1), mnop_node(1, 2)],
                (1..=3).map(|k| mnop_node(2, k)).collect()
            ]
        );

        let net = build_crossover_example(10, 0.01).unwrap();
        let sys = find_disjoint_paths(&net, 1).unwrap();
        assert_eq!(sys.paths(), &[ids(&["1", "2"])]);

        let net = build_lscheme(&LSchemeParams::new(4, 3, 0.1).unwrap()).unwrap();
        let sys = find_disjoint_paths(&net, 3).unwrap();
        assert_eq!(sys.total_nodes(), 12);
        for (i, path) in sys.paths().iter().enumerate() {
            let row: Vec<NodeId> = (1..=4).map(|j| lscheme_node(i + 1, j)).collect();
            assert_eq!(path, &row);
        }
    }

    #[test]
    fn too_many_paths_reports_cut_order() {
        let net = build_mnop(&[2, 2], 0.1).unwrap();
        assert_eq!(
            find_disjoint_paths(&net, 3),
            Err(Error::Infeasible {
                requested: 3,
                cut_order: 2
            })
        );
    }

    #[test]
    fn path_count_choice_on_crossover_graph() {
        let net = build_crossover_example(10, 0.001).unwrap();
        let choice = optimize_path_count(&net, 0.001, 10).unwrap();
        assert_eq!(choice.best_count, 2);
        approx::assert_relative_eq!(choice.bound, 1.21e-4, max_relative = 1e-12);
        approx::assert_relative_eq!(choice.candidates[0].bound, 0.002, max_relative = 1e-12);

        let choice = optimize_path_count(&net, 0.05, 10).unwrap();
        assert_eq!(choice.best_count, 1);
        approx::assert_relative_eq!(choice.bound, 0.1, max_relative = 1e-12);
        approx::assert_relative_eq!(choice.candidates[1].bound, 0.3025, max_relative = 1e-12);
    }

    #[test]
    fn path_count_choice_on_mnop() {
        let net = build_mnop(&[2, 2], 0.01).unwrap();
        let choice = optimize_path_count(&net, 0.01, 2).unwrap();
        assert_eq!(choice.best_count, 2);
        approx::assert_relative_eq!(choice.bound, 4e-4, max_relative = 1e-12);

        let choice = optimize_path_count(&net, 0.01, 1).unwrap();
        assert_eq!(choice.best_count, 1);
        assert_eq!(choice.system.total_nodes(), 2);
    }

    #[test]
    fn path_count_needs_connected_endpoints() {
        let net = Network::builder("A", "B").build().unwrap();
        assert!(matches!(
            optimize_path_count(&net, 0.1, 3),
            Err(Error::Infeasible { .. })
        ));
        let net = build_mnop(&[1], 0.1).unwrap();
        assert!(optimize_path_count(&net, 0.0, 3).is_err());
    }

    #[test]
    fn product_formula_examples() {
        let net = build_mnop(&[1], 0.3).unwrap();
        let sys = find_disjoint_paths(&net, 1).unwrap();
        approx::assert_relative_eq!(
            path_system_hack_probability(&sys, net.trust_map()).unwrap(),
            0.3,
            max_relative = 1e-15
        );

        let net = build_mnop(&[2, 2], 0.5).unwrap();
        let sys = find_disjoint_paths(&net, 2).unwrap();
        assert_eq!(
            path_system_hack_probability(&sys, net.trust_map()).unwrap(),
            0.5625
        );

        let net = net.with_uniform_trust(0.0).unwrap();
        assert_eq!(
            path_system_hack_probability(&sys, net.trust_map()).unwrap(),
            0.0
        );
    }

    #[test]
    fn missing_trust_is_named() {
        let net = build_mnop(&[2], 0.5).unwrap();
        let sys = find_disjoint_paths(&net, 1).unwrap();
        let mut trust = net.trust_map().clone();
        trust.remove(&mnop_node(1, 2));
        assert_eq!(
            path_system_hack_probability(&sys, &trust),
            Err(Error::MissingTrust("p1_2".into()))
        );
    }
}
