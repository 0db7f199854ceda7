use std::collections::VecDeque;

use crate::net_model::{Network, NodeId};

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    capacity: i32,
    cap: i32,
    cost: i64,
    /// Index of the paired residual arc in `arcs`.
    rev: usize,
    forward: bool,
}

/// Directed network built by splitting every intermediate node `v` into a
/// unit-capacity arc `v_in -> v_out`. Each undirected edge `{u, v}` becomes the
/// two uncapacitated arcs `u_out -> v_in` and `v_out -> u_in`; endpoints are not
/// split. Only split arcs can saturate, so every minimum cut is a node set.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    ids: Vec<NodeId>,
    /// `(in, out)` vertex of every node in `ids`.
    split: Vec<(usize, usize)>,
    graph: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
    source: usize,
    sink: usize,
}

impl FlowNetwork {
    pub fn new(net: &Network) -> Self {
        let ids: Vec<NodeId> = net.nodes().cloned().collect();
        let mut split = Vec::with_capacity(ids.len());
        let mut vertices = 0;
        for id in &ids {
            if net.is_endpoint(id) {
                split.push((vertices, vertices));
                vertices += 1;
            } else {
                split.push((vertices, vertices + 1));
                vertices += 2;
            }
        }
        let index = |id: &NodeId| ids.binary_search(id).expect("node of this network");
        let unbounded = i32::try_from(vertices).unwrap_or(i32::MAX);
        let mut fnet = FlowNetwork {
            source: split[index(net.endpoint_a())].1,
            sink: split[index(net.endpoint_b())].0,
            graph: vec![Vec::new(); vertices],
            arcs: Vec::new(),
            split: split.clone(),
            ids: ids.clone(),
        };
        for (k, id) in ids.iter().enumerate() {
            let (vin, vout) = split[k];
            if !net.is_endpoint(id) {
                fnet.add_arc(vin, vout, 1, 1);
            }
            for w in net.neighbors(id) {
                let (win, _) = split[index(w)];
                fnet.add_arc(vout, win, unbounded, 0);
            }
        }
        fnet
    }

    fn add_arc(&mut self, from: usize, to: usize, capacity: i32, cost: i64) {
        let a = self.arcs.len();
        self.arcs.push(Arc {
            to,
            capacity,
            cap: capacity,
            cost,
            rev: a + 1,
            forward: true,
        });
        self.arcs.push(Arc {
            to: from,
            capacity: 0,
            cap: 0,
            cost: -cost,
            rev: a,
            forward: false,
        });
        self.graph[from].push(a);
        self.graph[to].push(a + 1);
    }

    /// Number of forward arcs: `2 * |edges| + |intermediates|`.
    ///
    /// Split arcs have capacity 1, edge arcs are effectively unbounded.
    pub fn arc_count(&self) -> usize {
        self.arcs.iter().filter(|a| a.forward).count()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.len()
    }

    fn reset(&mut self) {
        for a in self.arcs.iter_mut() {
            a.cap = a.capacity;
        }
    }

    /// Maximum A-B flow by BFS augmenting paths, capped at `limit` units.
    pub fn max_flow(&mut self, limit: usize) -> usize {
        self.reset();
        let mut flow = 0;
        while flow < limit {
            let Some(pred) = self.bfs_residual() else {
                break;
            };
            self.augment(&pred);
            flow += 1;
        }
        flow
    }

    fn bfs_residual(&self) -> Option<Vec<Option<usize>>> {
        let mut pred: Vec<Option<usize>> = vec![None; self.vertex_count()];
        let mut seen = vec![false; self.vertex_count()];
        seen[self.source] = true;
        let mut queue = VecDeque::from([self.source]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.graph[u] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    pred[arc.to] = Some(a);
                    if arc.to == self.sink {
                        return Some(pred);
                    }
                    queue.push_back(arc.to);
                }
            }
        }
        None
    }

    fn augment(&mut self, pred: &[Option<usize>]) {
        let mut v = self.sink;
        while v != self.source {
            let a = pred[v].expect("augmenting path is connected");
            self.arcs[a].cap -= 1;
            let rev = self.arcs[a].rev;
            self.arcs[rev].cap += 1;
            v = self.arcs[rev].to;
        }
    }

    /// Intermediates whose split arc crosses the residual cut after `max_flow`.
    pub fn cut_nodes(&self) -> Vec<NodeId> {
        let mut seen = vec![false; self.vertex_count()];
        seen[self.source] = true;
        let mut stack = vec![self.source];
        while let Some(u) = stack.pop() {
            for &a in &self.graph[u] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        self.ids
            .iter()
            .zip(&self.split)
            .filter(|(_, &(vin, vout))| vin != vout && seen[vin] && !seen[vout])
            .map(|(id, _)| id.clone())
            .collect()
    }

    /// Routes `count` units at minimum total cost (one per intermediate used)
    /// by successive shortest paths. Returns false if fewer units fit.
    pub fn min_cost_flow(&mut self, count: usize) -> bool {
        self.reset();
        for _ in 0..count {
            match self.bellman_ford() {
                Some(pred) => self.augment(&pred),
                None => return false,
            }
        }
        true
    }

    fn bellman_ford(&self) -> Option<Vec<Option<usize>>> {
        let n = self.vertex_count();
        let mut dist = vec![i64::MAX; n];
        let mut pred: Vec<Option<usize>> = vec![None; n];
        dist[self.source] = 0;
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                if dist[u] == i64::MAX {
                    continue;
                }
                for &a in &self.graph[u] {
                    let arc = &self.arcs[a];
                    if arc.cap > 0 && dist[u] + arc.cost < dist[arc.to] {
                        dist[arc.to] = dist[u] + arc.cost;
                        pred[arc.to] = Some(a);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        (dist[self.sink] != i64::MAX).then_some(pred)
    }

    /// Decomposes the current flow into A-B paths of intermediate node ids.
    pub fn flow_paths(&self) -> Vec<Vec<NodeId>> {
        let owner: Vec<Option<usize>> = {
            let mut owner = vec![None; self.vertex_count()];
            for (k, &(vin, vout)) in self.split.iter().enumerate() {
                owner[vin] = Some(k);
                owner[vout] = Some(k);
            }
            owner
        };
        let mut used = vec![false; self.arcs.len()];
        let mut paths = Vec::new();
        loop {
            let mut path = Vec::new();
            let mut u = self.source;
            while u != self.sink {
                let next = self.graph[u].iter().copied().find(|&a| {
                    let arc = &self.arcs[a];
                    arc.forward && arc.cap < arc.capacity && !used[a]
                });
                let Some(a) = next else { break };
                used[a] = true;
                u = self.arcs[a].to;
                let k = owner[u].expect("vertex has an owner");
                let (vin, vout) = self.split[k];
                if u == vin && vin != vout {
                    path.push(self.ids[k].clone());
                }
            }
            if u != self.sink {
                break;
            }
            paths.push(path);
        }
        paths
    }
}
