//! Betweenness (Freeman 1977, Brandes accumulation), degree, and group
//! centralization.

use std::collections::{BTreeMap, VecDeque};

use crate::graph::CommGraph;
use crate::ingest::ActorId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScoreKind {
    Betweenness {
        normalized: bool,
        directed: bool,
    },
    /// Symmetrized degree: number of distinct neighbors.
    Degree,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActorScores {
    pub kind: ScoreKind,
    pub scores: BTreeMap<ActorId, f64>,
}

impl ActorScores {
    pub fn get(&self, a: &ActorId) -> f64 {
        self.scores.get(a).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Number of node pairs a betweenness score is normalized by.
fn pair_count(n: usize, directed: bool) -> f64 {
    let pairs = ((n - 1) * (n - 2)) as f64;
    if directed {
        pairs
    } else {
        pairs / 2.0
    }
}

/// Betweenness centrality on the unweighted graph.
///
/// Undirected mode symmetrizes every edge and counts each unordered pair
/// once, so a path a–b–c gives b a raw score of 1. Normalization divides by
/// the number of pairs not involving the node. Graphs with fewer than three
/// nodes score zero everywhere.
pub fn betweenness(g: &CommGraph, normalized: bool, directed: bool) -> ActorScores {
    let (nodes, adj) = g.adjacency(directed);
    let raw = brandes(&adj);
    let n = nodes.len();
    let scale = match (normalized, n >= 3) {
        (true, true) => 1.0 / pair_count(n, directed),
        _ => 1.0,
    };
    // Brandes over all sources visits each unordered pair from both ends.
    let halve = if directed { 1.0 } else { 0.5 };
    let scores = nodes
        .into_iter()
        .zip(raw)
        .map(|(a, b)| (a, if n < 3 { 0.0 } else { b * halve * scale }))
        .collect();
    ActorScores {
        kind: ScoreKind::Betweenness { normalized, directed },
        scores,
    }
}

/// Brandes dependency accumulation over ordered source/target pairs.
pub(crate) fn brandes(adj: &[Vec<usize>]) -> Vec<f64> {
    let n = adj.len();
    let mut bc = vec![0.0; n];
    let mut stack = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0.0f64; n];
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        stack.clear();
        for v in 0..n {
            preds[v].clear();
            sigma[v] = 0.0;
            dist[v] = -1;
            delta[v] = 0.0;
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &adj[v] {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    bc
}

/// Symmetrized degree of every node.
pub fn degree(g: &CommGraph) -> ActorScores {
    let (nodes, adj) = g.adjacency(false);
    let scores = nodes
        .into_iter()
        .zip(adj)
        .map(|(a, nbrs)| (a, nbrs.len() as f64))
        .collect();
    ActorScores {
        kind: ScoreKind::Degree,
        scores,
    }
}

/// Freeman group centralization: Σ (max − score) over the largest value that
/// sum can take on `n` nodes. Betweenness is compared in normalized form
/// (bound n−1); degree uses raw counts (bound (n−1)(n−2)). Actors missing
/// from `scores` count as zero. Zero for n < 3.
pub fn centralization(scores: &ActorScores, n: usize) -> f64 {
    if n < 3 {
        return 0.0;
    }
    let (values, bound): (Vec<f64>, f64) = match scores.kind {
        ScoreKind::Betweenness { normalized, directed } => {
            let scale = if normalized { 1.0 } else { 1.0 / pair_count(n, directed) };
            (scores.scores.values().map(|v| v * scale).collect(), (n - 1) as f64)
        }
        ScoreKind::Degree => (scores.scores.values().copied().collect(), ((n - 1) * (n - 2)) as f64),
    };
    let missing = n.saturating_sub(values.len());
    let max = values.iter().copied().fold(0.0f64, f64::max);
    let spread: f64 = values.iter().map(|v| max - v).sum::<f64>() + missing as f64 * max;
    (spread / bound).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> ActorId {
        ActorId::from(s)
    }

    fn graph(edges: &[(&str, &str)]) -> CommGraph {
        let mut g = CommGraph::new();
        for (s, d) in edges {
            g.add_edge(a(s), a(d), 1);
        }
        g
    }

    fn star(n: usize) -> CommGraph {
        let mut g = CommGraph::new();
        for i in 1..n {
            g.add_edge(a("center"), a(&format!("leaf{i}")), 1);
        }
        g
    }

    #[test]
    fn path_middle_node() {
        let bc = betweenness(&graph(&[("a", "b"), ("b", "c")]), false, false);
        assert_eq!(bc.get(&a("b")), 1.0);
        assert_eq!(bc.get(&a("a")), 0.0);
        assert_eq!(bc.get(&a("c")), 0.0);
    }

    #[test]
    fn star_center_normalized_is_one() {
        let bc = betweenness(&star(5), true, false);
        assert!((bc.get(&a("center")) - 1.0).abs() < 1e-12);
        assert_eq!(bc.get(&a("leaf1")), 0.0);
    }

    #[test]
    fn directed_mode_respects_direction() {
        // a→b→c: b lies on the single ordered pair (a,c)
        let g = graph(&[("a", "b"), ("b", "c")]);
        let bc = betweenness(&g, true, true);
        assert!((bc.get(&a("b")) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tiny_graphs_are_zero() {
        let bc = betweenness(&graph(&[("a", "b")]), true, false);
        assert!(bc.scores.values().all(|&v| v == 0.0));
    }

    #[test]
    fn degrees() {
        let g = star(5);
        let d = degree(&g);
        assert_eq!(d.get(&a("center")), 4.0);
        let mut h = g.clone();
        h.add_node(a("isolated"));
        assert_eq!(degree(&h).get(&a("isolated")), 0.0);
    }

    #[test]
    fn star_centralizations_are_one() {
        let g = star(6);
        assert!((centralization(&degree(&g), 6) - 1.0).abs() < 1e-12);
        assert!((centralization(&betweenness(&g, true, false), 6) - 1.0).abs() < 1e-12);
        assert!((centralization(&betweenness(&g, false, false), 6) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_scores_give_zero() {
        let ring = graph(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]);
        assert_eq!(centralization(&degree(&ring), 4), 0.0);
        assert_eq!(centralization(&betweenness(&ring, true, false), 4), 0.0);
    }
}
