//! Dense, index-based view of a [`Network`] for hot connectivity loops.

use crate::net_model::{Network, NodeId};

/// Intermediates are indexed `0..m` in sorted id order; endpoints are kept
/// implicit through `from_a` / `to_b` incidence.
#[derive(Debug, Clone)]
pub struct CompactGraph {
    ids: Vec<NodeId>,
    adj: Vec<Vec<usize>>,
    from_a: Vec<usize>,
    to_b: Vec<usize>,
    direct: bool,
    masks: Option<MaskAdjacency>,
}

/// Bitmask adjacency, available when there are at most 64 intermediates.
#[derive(Debug, Clone)]
struct MaskAdjacency {
    adj: Vec<u64>,
    from_a: u64,
    to_b: u64,
}

impl CompactGraph {
    pub fn new(net: &Network) -> Self {
        let ids: Vec<NodeId> = net.intermediates().cloned().collect();
        let index = |id: &NodeId| ids.binary_search(id).ok();
        let mut adj = vec![Vec::new(); ids.len()];
        for (v, id) in ids.iter().enumerate() {
            adj[v] = net.neighbors(id).filter_map(index).collect();
        }
        let from_a: Vec<usize> = net.neighbors(net.endpoint_a()).filter_map(index).collect();
        let to_b: Vec<usize> = net.neighbors(net.endpoint_b()).filter_map(index).collect();
        let direct = net.has_edge(net.endpoint_a(), net.endpoint_b());
        let masks = (ids.len() <= 64).then(|| {
            let set = |vs: &[usize]| vs.iter().fold(0u64, |m, &v| m | 1 << v);
            MaskAdjacency {
                adj: adj.iter().map(|vs| set(vs)).collect(),
                from_a: set(&from_a),
                to_b: set(&to_b),
            }
        });
        CompactGraph {
            ids,
            adj,
            from_a,
            to_b,
            direct,
            masks,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, v: usize) -> &NodeId {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn index_of(&self, id: &NodeId) -> Option<usize> {
        self.ids.binary_search(id).ok()
    }

    /// Mask with one bit per intermediate; requires `len() <= 64`.
    pub fn full_mask(&self) -> u64 {
        match self.len() {
            64 => u64::MAX,
            m => (1u64 << m) - 1,
        }
    }

    pub fn supports_masks(&self) -> bool {
        self.masks.is_some()
    }

    /// Whether A still reaches B when the nodes in `removed` are deleted.
    ///
    /// # Panics
    /// If the graph has more than 64 intermediates.
    #[inline]
    pub fn connected_without(&self, removed: u64) -> bool {
        if self.direct {
            return true;
        }
        let m = self
            .masks
            .as_ref()
            .expect("mask connectivity needs <= 64 intermediates");
        let alive = !removed;
        let mut reach = m.from_a & alive;
        if reach & m.to_b != 0 {
            return true;
        }
        let mut frontier = reach;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = m.adj[v] & alive & !reach;
            if fresh & m.to_b != 0 {
                return true;
            }
            reach |= fresh;
            frontier |= fresh;
        }
        false
    }

    /// Same as [`connected_without`](Self::connected_without) for any graph size;
    /// `removed[v]` marks deleted intermediates. `scratch` is reused between calls.
    pub fn connected_avoiding(&self, removed: &[bool], scratch: &mut Scratch) -> bool {
        if self.direct {
            return true;
        }
        scratch.reset(self.len());
        for &v in &self.from_a {
            if !removed[v] && scratch.visit(v) {
                scratch.stack.push(v);
            }
        }
        while let Some(v) = scratch.stack.pop() {
            if self.to_b_contains(v) {
                return true;
            }
            for &w in &self.adj[v] {
                if !removed[w] && scratch.visit(w) {
                    scratch.stack.push(w);
                }
            }
        }
        false
    }

    fn to_b_contains(&self, v: usize) -> bool {
        match &self.masks {
            Some(m) => m.to_b >> v & 1 == 1,
            None => self.to_b.contains(&v),
        }
    }
}

/// Reusable visited buffer for [`CompactGraph::connected_avoiding`].
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    stamp: Vec<u32>,
    epoch: u32,
    stack: Vec<usize>,
}

impl Scratch {
    fn reset(&mut self, n: usize) {
        if self.stamp.len() != n || self.epoch == u32::MAX {
            self.stamp = vec![0; n];
            self.epoch = 0;
        }
        self.epoch += 1;
        self.stack.clear();
    }

    fn visit(&mut self, v: usize) -> bool {
        if self.stamp[v] == self.epoch {
            false
        } else {
            self.stamp[v] = self.epoch;
            true
        }
    }
}
