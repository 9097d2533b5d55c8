//! Directed, message-count weighted communication graphs.

mod export;
mod window;

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};

pub use export::{to_dot, to_edge_csv};
pub use window::{day_index, window_series, WindowConfig, WindowMode, WindowedGraph};

use crate::ingest::{ActorId, MessageSet, TeamRoster};

/// Half-open time interval `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl Interval {
    pub fn new(start: DateTime<Utc>, end: DateTime<Utc>) -> Self {
        debug_assert!(start <= end);
        Interval { start, end }
    }

    /// Covers every message of the set.
    pub fn covering(ms: &MessageSet) -> Option<Self> {
        ms.span()
            .map(|(lo, hi)| Interval::new(lo, hi + chrono::Duration::seconds(1)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommGraph {
    nodes: BTreeSet<ActorId>,
    edges: BTreeMap<(ActorId, ActorId), u64>,
    interval: Option<Interval>,
}

impl CommGraph {
    pub fn new() -> Self {
        CommGraph {
            nodes: BTreeSet::new(),
            edges: BTreeMap::new(),
            interval: None,
        }
    }

    pub fn with_interval(interval: Interval) -> Self {
        CommGraph {
            interval: Some(interval),
            ..CommGraph::new()
        }
    }

    pub fn add_node(&mut self, a: ActorId) {
        self.nodes.insert(a);
    }

    /// Adds `weight` messages from `src` to `dst`. Self-loops and zero
    /// weights are ignored.
    pub fn add_edge(&mut self, src: ActorId, dst: ActorId, weight: u64) {
        if src == dst || weight == 0 {
            return;
        }
        self.nodes.insert(src.clone());
        self.nodes.insert(dst.clone());
        *self.edges.entry((src, dst)).or_insert(0) += weight;
    }

    pub fn nodes(&self) -> &BTreeSet<ActorId> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeMap<(ActorId, ActorId), u64> {
        &self.edges
    }

    pub fn interval(&self) -> Option<Interval> {
        self.interval
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, src: &ActorId, dst: &ActorId) -> u64 {
        self.edges.get(&(src.clone(), dst.clone())).copied().unwrap_or(0)
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Node list (sorted) with index-based adjacency. Symmetrized lists
    /// treat every directed edge as an undirected tie.
    pub fn adjacency(&self, directed: bool) -> (Vec<ActorId>, Vec<Vec<usize>>) {
        let nodes: Vec<ActorId> = self.nodes.iter().cloned().collect();
        let index: BTreeMap<&ActorId, usize> = nodes.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nodes.len()];
        for (src, dst) in self.edges.keys() {
            let (s, d) = (index[src], index[dst]);
            adj[s].insert(d);
            if !directed {
                adj[d].insert(s);
            }
        }
        (nodes, adj.into_iter().map(|s| s.into_iter().collect()).collect())
    }

    /// Unordered pair → w(u→v) + w(v→u), keyed with the smaller id first.
    pub fn symmetrized_weights(&self) -> BTreeMap<(ActorId, ActorId), u64> {
        let mut out = BTreeMap::new();
        for ((s, d), w) in &self.edges {
            let key = if s < d {
                (s.clone(), d.clone())
            } else {
                (d.clone(), s.clone())
            };
            *out.entry(key).or_insert(0) += w;
        }
        out
    }
}

impl Default for CommGraph {
    fn default() -> Self {
        Self::new()
    }
}

/// Builds the communication graph of messages in `interval`.
///
/// Each message contributes weight 1 to every sender→recipient edge. With a
/// team filter, only messages tagged with that team count, nodes are the
/// roster members (isolated members included) and edges to non-members are
/// dropped.
pub fn build_graph(ms: &MessageSet, interval: Interval, team: Option<&TeamRoster>) -> CommGraph {
    let mut g = CommGraph::with_interval(interval);
    if let Some(r) = team {
        for m in &r.members {
            g.add_node(m.clone());
        }
    }
    for m in ms.in_range(interval.start, interval.end) {
        match team {
            Some(r) => {
                if m.team.as_ref() != Some(&r.team) || !r.contains(&m.sender) {
                    continue;
                }
                for rc in m.recipients.iter().filter(|a| r.contains(a)) {
                    g.add_edge(m.sender.clone(), rc.clone(), 1);
                }
            }
            None => {
                g.add_node(m.sender.clone());
                for rc in &m.recipients {
                    g.add_edge(m.sender.clone(), rc.clone(), 1);
                }
            }
        }
    }
    g
}

/// Distinct directed edges over n(n−1); 0 when n < 2.
pub fn density(g: &CommGraph) -> f64 {
    let n = g.node_count();
    if n < 2 {
        return 0.0;
    }
    g.edge_count() as f64 / (n * (n - 1)) as f64
}

/// Keeps edges whose symmetrized weight w(u→v) + w(v→u) reaches `threshold`.
/// Nodes are kept.
pub fn strong_tie_filter(g: &CommGraph, threshold: f64) -> CommGraph {
    let sym = g.symmetrized_weights();
    let mut out = CommGraph {
        nodes: g.nodes.clone(),
        edges: BTreeMap::new(),
        interval: g.interval,
    };
    for ((s, d), w) in &g.edges {
        let key = if s < d {
            (s.clone(), d.clone())
        } else {
            (d.clone(), s.clone())
        };
        if sym[&key] as f64 >= threshold {
            out.edges.insert((s.clone(), d.clone()), *w);
        }
    }
    out
}

/// Mean symmetrized weight over connected pairs; `None` for an edgeless graph.
pub fn mean_symmetrized_weight(g: &CommGraph) -> Option<f64> {
    let sym = g.symmetrized_weights();
    if sym.is_empty() {
        return None;
    }
    Some(sym.values().sum::<u64>() as f64 / sym.len() as f64)
}
