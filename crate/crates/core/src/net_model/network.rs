use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{check_probability, invalid, Error, Result};

/// Identifier of a network node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

/// Undirected trusted-node network with two communicating endpoints.
///
/// Every intermediate (non-endpoint) node carries the probability that it is
/// compromised during a protocol run. Values are immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    endpoint_a: NodeId,
    endpoint_b: NodeId,
    adjacency: BTreeMap<NodeId, BTreeSet<NodeId>>,
    trust: BTreeMap<NodeId, f64>,
}

impl Network {
    pub fn builder(endpoint_a: impl Into<NodeId>, endpoint_b: impl Into<NodeId>) -> NetworkBuilder {
        NetworkBuilder::new(endpoint_a.into(), endpoint_b.into())
    }

    pub fn endpoint_a(&self) -> &NodeId {
        &self.endpoint_a
    }

    pub fn endpoint_b(&self) -> &NodeId {
        &self.endpoint_b
    }

    pub fn is_endpoint(&self, id: &NodeId) -> bool {
        *id == self.endpoint_a || *id == self.endpoint_b
    }

    /// All nodes in sorted order, endpoints included.
    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> {
        self.adjacency.keys()
    }

    /// Non-endpoint nodes in sorted order.
    pub fn intermediates(&self) -> impl Iterator<Item = &NodeId> {
        self.trust.keys()
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn intermediate_count(&self) -> usize {
        self.trust.len()
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.adjacency.contains_key(id)
    }

    pub fn neighbors(&self, id: &NodeId) -> impl Iterator<Item = &NodeId> {
        self.adjacency.get(id).into_iter().flatten()
    }

    pub fn degree(&self, id: &NodeId) -> usize {
        self.adjacency.get(id).map_or(0, BTreeSet::len)
    }

    pub fn has_edge(&self, u: &NodeId, v: &NodeId) -> bool {
        self.adjacency.get(u).is_some_and(|adj| adj.contains(v))
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId)> {
        self.adjacency
            .iter()
            .flat_map(|(u, adj)| adj.range(u..).filter(move |v| *v != u).map(move |v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn trust(&self, id: &NodeId) -> Option<f64> {
        self.trust.get(id).copied()
    }

    pub fn trust_map(&self) -> &BTreeMap<NodeId, f64> {
        &self.trust
    }

    /// A copy of this network with every intermediate node set to `p`.
    pub fn with_uniform_trust(&self, p: f64) -> Result<Network> {
        check_probability("p", p)?;
        let mut out = self.clone();
        out.trust.values_mut().for_each(|t| *t = p);
        Ok(out)
    }

    /// A copy with the trust of a single node replaced.
    pub fn with_trust(&self, id: &NodeId, p: f64) -> Result<Network> {
        check_probability("trust", p)?;
        let mut out = self.clone();
        match out.trust.get_mut(id) {
            Some(t) => *t = p,
            None if self.is_endpoint(id) => {
                return Err(invalid(format!(
                    "endpoint `{id}` cannot carry a trust value"
                )))
            }
            None => return Err(Error::UnknownNode(id.to_string())),
        }
        Ok(out)
    }

    /// Largest compromise probability over intermediates; the uniform
    /// worst-case reduction of heterogeneous trust.
    pub fn max_trust(&self) -> f64 {
        self.trust.values().copied().fold(0.0, f64::max)
    }

    /// The common trust value if all intermediates share one.
    pub fn uniform_trust(&self) -> Option<f64> {
        let mut values = self.trust.values();
        let first = *values.next()?;
        values.all(|&p| p == first).then_some(first)
    }
}

/// Incremental constructor that validates the [`Network`] invariants.
#[derive(Debug, Clone)]
pub struct NetworkBuilder {
    endpoint_a: NodeId,
    endpoint_b: NodeId,
    adjacency: BTreeMap<NodeId, BTreeSet<NodeId>>,
    trust: BTreeMap<NodeId, f64>,
}

impl NetworkBuilder {
    fn new(endpoint_a: NodeId, endpoint_b: NodeId) -> Self {
        let mut adjacency = BTreeMap::new();
        adjacency.insert(endpoint_a.clone(), BTreeSet::new());
        adjacency.insert(endpoint_b.clone(), BTreeSet::new());
        NetworkBuilder {
            endpoint_a,
            endpoint_b,
            adjacency,
            trust: BTreeMap::new(),
        }
    }

    /// Adds an intermediate node. Fails on duplicates, endpoints and invalid trust.
    pub fn node(&mut self, id: impl Into<NodeId>, trust: f64) -> Result<&mut Self> {
        let id = id.into();
        if id == self.endpoint_a || id == self.endpoint_b {
            return Err(invalid(format!(
                "endpoint `{id}` declared as an intermediate node"
            )));
        }
        if self.trust.contains_key(&id) {
            return Err(invalid(format!("duplicate node `{id}`")));
        }
        check_probability(&format!("trust of `{id}`"), trust)?;
        self.adjacency.insert(id.clone(), BTreeSet::new());
        self.trust.insert(id, trust);
        Ok(self)
    }

    /// Adds an undirected edge between two declared nodes.
    pub fn edge(&mut self, u: impl Into<NodeId>, v: impl Into<NodeId>) -> Result<&mut Self> {
        let (u, v) = (u.into(), v.into());
        for id in [&u, &v] {
            if !self.adjacency.contains_key(id) {
                return Err(Error::UnknownNode(id.to_string()));
            }
        }
        if u == v {
            return Err(invalid(format!("self-loop on `{u}`")));
        }
        if !self
            .adjacency
            .get_mut(&u)
            .expect("checked")
            .insert(v.clone())
        {
            return Err(invalid(format!("duplicate edge `{u}`-`{v}`")));
        }
        self.adjacency.get_mut(&v).expect("checked").insert(u);
        Ok(self)
    }

    pub fn build(self) -> Result<Network> {
        if self.endpoint_a == self.endpoint_b {
            return Err(invalid("endpoints must be distinct"));
        }
        Ok(Network {
            endpoint_a: self.endpoint_a,
            endpoint_b: self.endpoint_b,
            adjacency: self.adjacency,
            trust: self.trust,
        })
    }
}

/// A family of vertex-disjoint A-B paths, each listed by its intermediate nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSystem {
    paths: Vec<Vec<NodeId>>,
}

impl PathSystem {
    /// Validates disjointness and that every hop is an edge of `net`.
    pub fn new(net: &Network, paths: Vec<Vec<NodeId>>) -> Result<PathSystem> {
        let mut seen = BTreeSet::new();
        for (j, path) in paths.iter().enumerate() {
            if path.is_empty() {
                return Err(invalid(format!("path {j} has no intermediate nodes")));
            }
            for id in path {
                if !net.contains(id) {
                    return Err(Error::UnknownNode(id.to_string()));
                }
                if net.is_endpoint(id) {
                    return Err(invalid(format!(
                        "path {j} lists endpoint `{id}` as intermediate"
                    )));
                }
                if !seen.insert(id) {
                    return Err(invalid(format!(
                        "node `{id}` appears on more than one path"
                    )));
                }
            }
            let hops = std::iter::once(net.endpoint_a())
                .chain(path.iter())
                .chain(std::iter::once(net.endpoint_b()));
            let hops: Vec<_> = hops.collect();
            for pair in hops.windows(2) {
                if !net.has_edge(pair[0], pair[1]) {
                    return Err(invalid(format!(
                        "path {j} uses missing edge `{}`-`{}`",
                        pair[0], pair[1]
                    )));
                }
            }
        }
        Ok(PathSystem { paths })
    }

    pub fn paths(&self) -> &[Vec<NodeId>] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn path_lengths(&self) -> Vec<usize> {
        self.paths.iter().map(Vec::len).collect()
    }

    pub fn total_nodes(&self) -> usize {
        self.paths.iter().map(Vec::len).sum()
    }

    pub fn mean_length(&self) -> f64 {
        self.total_nodes() as f64 / self.len() as f64
    }

    /// True when the paths pass through every intermediate node of `net`.
    pub fn spans(&self, net: &Network) -> bool {
        self.total_nodes() == net.intermediate_count()
    }
}
