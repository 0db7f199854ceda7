//! Topology generators for disjoint-path (MNOP) and interlinked l-scheme (MOP) networks.

use crate::error::{check_probability, invalid, Result};

use super::network::{Network, NodeId};

pub const ENDPOINT_A: &str = "A";
pub const ENDPOINT_B: &str = "B";

/// Parameters of an l-scheme: `l` rows of `n` intermediate nodes each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LSchemeParams {
    pub n: usize,
    pub l: usize,
    pub uniform_p: f64,
}

impl LSchemeParams {
    pub fn new(n: usize, l: usize, uniform_p: f64) -> Result<Self> {
        if n < 1 {
            return Err(invalid("l-scheme needs n >= 1 intermediate nodes per path"));
        }
        if l < 1 {
            return Err(invalid("l-scheme needs l >= 1 paths"));
        }
        check_probability("p", uniform_p)?;
        Ok(LSchemeParams { n, l, uniform_p })
    }

    /// Whether column `j` (1-based) carries vertical interlinks.
    /// Interlinks sit in every (l-1)-th column; l = 1 has none.
    pub fn is_interlinked_column(&self, j: usize) -> bool {
        self.l >= 2 && j.is_multiple_of(self.l - 1)
    }

    pub fn interlinked_columns(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.n).filter(|&j| self.is_interlinked_column(j))
    }

    /// Number of interlink edges, `(l-1)` per interlinked column.
    pub fn interlink_count(&self) -> usize {
        self.interlinked_columns().count() * self.l.saturating_sub(1)
    }
}

/// Node id of `g_ij`, row `i` and column `j`, both 1-based.
pub fn lscheme_node(i: usize, j: usize) -> NodeId {
    NodeId::new(format!("g{i}_{j}"))
}

/// Node id of position `k` on MNOP path `j`, both 1-based.
pub fn mnop_node(j: usize, k: usize) -> NodeId {
    NodeId::new(format!("p{j}_{k}"))
}

/// Vertex-disjoint A-B paths, path `j` carrying `path_lengths[j]` intermediates.
pub fn build_mnop(path_lengths: &[usize], uniform_p: f64) -> Result<Network> {
    if path_lengths.is_empty() {
        return Err(invalid("MNOP network needs at least one path"));
    }
    if let Some(j) = path_lengths.iter().position(|&len| len < 1) {
        return Err(invalid(format!(
            "path {} has length 0; lengths must be >= 1",
            j + 1
        )));
    }
    check_probability("p", uniform_p)?;

    let mut b = Network::builder(ENDPOINT_A, ENDPOINT_B);
    for (j, &len) in path_lengths.iter().enumerate() {
        let ids: Vec<NodeId> = (1..=len).map(|k| mnop_node(j + 1, k)).collect();
        for id in &ids {
            b.node(id.clone(), uniform_p)?;
        }
        chain(&mut b, &ids)?;
    }
    b.build()
}

/// The interlinked l-scheme: `l` horizontal paths of `n` nodes plus vertical
/// edges `g_ij - g_(i+1)j` in every column `j` divisible by `l - 1`.
pub fn build_lscheme(params: &LSchemeParams) -> Result<Network> {
    let LSchemeParams { n, l, uniform_p } =
        LSchemeParams::new(params.n, params.l, params.uniform_p)?;
    let mut b = Network::builder(ENDPOINT_A, ENDPOINT_B);
    for i in 1..=l {
        let row: Vec<NodeId> = (1..=n).map(|j| lscheme_node(i, j)).collect();
        for id in &row {
            b.node(id.clone(), uniform_p)?;
        }
        chain(&mut b, &row)?;
    }
    for j in params.interlinked_columns() {
        for i in 1..l {
            b.edge(lscheme_node(i, j), lscheme_node(i + 1, j))?;
        }
    }
    b.build()
}

/// Two disjoint paths of `n` nodes joined by a single interlink at column `ceil(n/2)`.
pub fn build_single_link(n: usize, uniform_p: f64) -> Result<Network> {
    if n < 2 {
        return Err(invalid("single-link network needs n >= 2"));
    }
    check_probability("p", uniform_p)?;
    let mut b = Network::builder(ENDPOINT_A, ENDPOINT_B);
    for i in 1..=2 {
        let row: Vec<NodeId> = (1..=n).map(|j| lscheme_node(i, j)).collect();
        for id in &row {
            b.node(id.clone(), uniform_p)?;
        }
        chain(&mut b, &row)?;
    }
    let mid = n.div_ceil(2);
    b.edge(lscheme_node(1, mid), lscheme_node(2, mid))?;
    b.build()
}

/// Network where a single short path beats two long disjoint ones.
///
/// Shortest route is `A-1-2-B`. Two more chains of `n` nodes run from `A` to
/// node `2` (`x1..xn`) and from node `1` to `B` (`y1..yn`), so the only two
/// disjoint paths are `A-x..-2-B` and `A-1-y..-B`, each with `n + 1` nodes.
pub fn build_crossover_example(n: usize, uniform_p: f64) -> Result<Network> {
    if n < 1 {
        return Err(invalid("crossover example needs n >= 1"));
    }
    check_probability("p", uniform_p)?;
    let mut b = Network::builder(ENDPOINT_A, ENDPOINT_B);
    b.node("1", uniform_p)?.node("2", uniform_p)?;
    let xs: Vec<NodeId> = (1..=n).map(|k| NodeId::new(format!("x{k}"))).collect();
    let ys: Vec<NodeId> = (1..=n).map(|k| NodeId::new(format!("y{k}"))).collect();
    for id in xs.iter().chain(&ys) {
        b.node(id.clone(), uniform_p)?;
    }
    b.edge(ENDPOINT_A, "1")?
        .edge("1", "2")?
        .edge("2", ENDPOINT_B)?;

    b.edge(ENDPOINT_A, xs[0].clone())?;
    for w in xs.windows(2) {
        b.edge(w[0].clone(), w[1].clone())?;
    }
    b.edge(xs[n - 1].clone(), "2")?;

    b.edge("1", ys[0].clone())?;
    for w in ys.windows(2) {
        b.edge(w[0].clone(), w[1].clone())?;
    }
    b.edge(ys[n - 1].clone(), ENDPOINT_B)?;
    b.build()
}

fn chain(b: &mut super::network::NetworkBuilder, ids: &[NodeId]) -> Result<()> {
    b.edge(ENDPOINT_A, ids[0].clone())?;
    for w in ids.windows(2) {
        b.edge(w[0].clone(), w[1].clone())?;
    }
    b.edge(ids[ids.len() - 1].clone(), ENDPOINT_B)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scheme(n: usize, l: usize) -> Network {
        build_lscheme(&LSchemeParams::new(n, l, 0.1).unwrap()).unwrap()
    }

    #[test]
    fn mnop_counts() {
        let net = build_mnop(&[2, 2], 0.1).unwrap();
        assert_eq!(net.intermediate_count(), 4);
        assert_eq!(net.edge_count(), 6);

        let net = build_mnop(&[1], 0.0).unwrap();
        assert_eq!(net.intermediate_count(), 1);
        assert_eq!(net.edge_count(), 2);
        assert!(net.has_edge(&"A".into(), &mnop_node(1, 1)));

        let net = build_mnop(&[3, 3, 3], 0.01).unwrap();
        assert_eq!(net.intermediate_count(), 9);
        assert_eq!(net.edge_count(), 12);
    }

    #[test]
    fn mnop_rejects_bad_lengths() {
        assert!(matches!(
            build_mnop(&[], 0.1),
            Err(crate::Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_mnop(&[2, 0], 0.1),
            Err(crate::Error::InvalidArgument(_))
        ));
        assert!(build_mnop(&[2], 1.5).is_err());
    }

    #[test]
    fn lscheme_counts() {
        let net = scheme(4, 2);
        assert_eq!(net.node_count(), 10);
        assert_eq!(net.edge_count(), 14);

        let net = scheme(6, 4);
        assert_eq!(net.node_count(), 26);
        assert_eq!(net.edge_count(), 34);
        assert!(net.has_edge(&lscheme_node(1, 3), &lscheme_node(2, 3)));
        assert!(net.has_edge(&lscheme_node(3, 6), &lscheme_node(4, 6)));
        assert!(!net.has_edge(&lscheme_node(1, 2), &lscheme_node(2, 2)));

        let net = scheme(3, 1);
        assert_eq!(net.node_count(), 5);
        assert_eq!(net.edge_count(), 4);
    }

    #[test]
    fn lscheme_rejects_zero_sizes() {
        assert!(LSchemeParams::new(0, 2, 0.1).is_err());
        assert!(LSchemeParams::new(2, 0, 0.1).is_err());
    }

    #[test]
    fn lscheme_degrees_and_interlinks() {
        for l in 1..=6 {
            for n in 1..=12 {
                let params = LSchemeParams::new(n, l, 0.0).unwrap();
                let net = build_lscheme(&params).unwrap();
                assert_eq!(net.degree(net.endpoint_a()), l);
                assert_eq!(net.degree(net.endpoint_b()), l);
                for id in net.intermediates() {
                    assert!((2..=4).contains(&net.degree(id)), "{id} in ({n},{l})");
                }
                let interlinks = net.edge_count() - l * (n + 1);
                assert_eq!(interlinks, params.interlink_count());
                if l >= 2 {
                    assert_eq!(interlinks, (l - 1) * (n / (l - 1)));
                }
                assert!(interlinks <= n);
            }
        }
    }

    #[test]
    fn crossover_example_shape() {
        let net = build_crossover_example(3, 0.01).unwrap();
        assert_eq!(net.intermediate_count(), 8);
        assert_eq!(net.edge_count(), 3 + 4 + 4);
        assert_eq!(net.degree(&"1".into()), 3);
        assert_eq!(net.degree(&"2".into()), 3);
    }

    #[test]
    fn single_link_has_one_interlink() {
        let net = build_single_link(10, 0.0).unwrap();
        assert_eq!(net.edge_count(), 2 * 11 + 1);
        assert!(net.has_edge(&lscheme_node(1, 5), &lscheme_node(2, 5)));
    }
}
