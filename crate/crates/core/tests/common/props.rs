//! Randomized property checks shared by the property tests and the
//! acceptance runner. Each suite runs a deterministic proptest runner and
//! reports the first failure as a string.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use coinmirror::graph::{density, strong_tie_filter, CommGraph};
use coinmirror::ingest::ActorId;
use coinmirror::metrics::{
    betweenness, centralization, contribution_index, count_handovers, degree, leaders_from_surface, sentiment_score,
    weighted_ci_variance, LeaderSeries, SentimentLexicon, TemporalSurface, Traffic,
};
use coinmirror::stats::{pearson, two_tailed_p};

pub type Suite = (&'static str, fn(u32) -> Result<(), String>);

pub const SUITES: &[Suite] = &[
    ("betweenness matches shortest-path enumeration", betweenness_oracle),
    ("contribution index range and edge values", contribution_index_range),
    ("awvci non-negative, zero iff constant CI", awvci_properties),
    (
        "centralization bounds, regular graphs, stars",
        centralization_properties,
    ),
    ("density bounds and monotonicity", density_properties),
    ("handovers bounded by defined days", handover_bound),
    ("leader choice invariant under scaling", argmax_scaling),
    ("strong-tie filter idempotent", strong_tie_idempotent),
    ("pearson symmetric and affine invariant", pearson_properties),
    ("p-value monotone in |r| and n", p_value_monotone),
    ("sentiment bounds and emotionality", sentiment_bounds),
];

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

pub fn node(i: usize) -> ActorId {
    ActorId::normalize(&format!("v{i}@x.edu"))
}

/// Node count and a weight per ordered pair (0 = no edge).
#[derive(Clone, Debug)]
pub struct SmallGraph {
    pub n: usize,
    pub weights: Vec<Vec<u64>>,
}

impl SmallGraph {
    pub fn graph(&self) -> CommGraph {
        let mut g = CommGraph::new();
        for i in 0..self.n {
            g.add_node(node(i));
        }
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.weights[i][j] > 0 {
                    g.add_edge(node(i), node(j), self.weights[i][j]);
                }
            }
        }
        g
    }

    pub fn linked(&self, i: usize, j: usize, directed: bool) -> bool {
        self.weights[i][j] > 0 || (!directed && self.weights[j][i] > 0)
    }
}

pub fn small_graph(max_n: usize) -> impl Strategy<Value = SmallGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let cell = prop_oneof![3 => Just(0u64), 2 => 1u64..4];
        proptest::collection::vec(proptest::collection::vec(cell, n), n).prop_map(move |mut weights| {
            for (i, row) in weights.iter_mut().enumerate() {
                row[i] = 0;
            }
            SmallGraph { n, weights }
        })
    })
}

/// Every simple path from `s` to `t`, as node lists.
fn all_simple_paths(g: &SmallGraph, s: usize, t: usize, directed: bool) -> Vec<Vec<usize>> {
    fn walk(g: &SmallGraph, t: usize, directed: bool, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let here = *path.last().expect("path starts nonempty");
        if here == t {
            out.push(path.clone());
            return;
        }
        for next in 0..g.n {
            if g.linked(here, next, directed) && !path.contains(&next) {
                path.push(next);
                walk(g, t, directed, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(g, t, directed, &mut vec![s], &mut out);
    out
}

/// Betweenness by listing every shortest path between every pair.
pub fn enumerated_betweenness(g: &SmallGraph, normalized: bool, directed: bool) -> Vec<f64> {
    let mut bc = vec![0.0; g.n];
    for s in 0..g.n {
        for t in 0..g.n {
            if s == t || (!directed && t < s) {
                continue;
            }
            let paths = all_simple_paths(g, s, t, directed);
            let Some(shortest) = paths.iter().map(Vec::len).min() else {
                continue;
            };
            let geodesics: Vec<&Vec<usize>> = paths.iter().filter(|p| p.len() == shortest).collect();
            for (v, score) in bc.iter_mut().enumerate() {
                let through = geodesics.iter().filter(|p| p[1..p.len() - 1].contains(&v)).count();
                *score += through as f64 / geodesics.len() as f64;
            }
        }
    }
    if normalized && g.n >= 3 {
        let pairs = ((g.n - 1) * (g.n - 2)) as f64;
        let pairs = if directed { pairs } else { pairs / 2.0 };
        for v in &mut bc {
            *v /= pairs;
        }
    }
    if g.n < 3 {
        bc.iter_mut().for_each(|v| *v = 0.0);
    }
    bc
}

fn betweenness_oracle(cases: u32) -> Result<(), String> {
    check(
        cases,
        (small_graph(7), any::<bool>(), any::<bool>()),
        |(sg, normalized, directed)| {
            let got = betweenness(&sg.graph(), normalized, directed);
            let want = enumerated_betweenness(&sg, normalized, directed);
            for (i, w) in want.iter().enumerate() {
                let v = got.get(&node(i));
                prop_assert!((v - w).abs() <= 1e-12, "node {i}: {v} vs {w} in {sg:?}");
            }
            Ok(())
        },
    )
}

fn contribution_index_range(cases: u32) -> Result<(), String> {
    check(cases, (0u64..10_000, 0u64..10_000), |(s, r)| {
        if s + r == 0 {
            prop_assert!(contribution_index(s, r).is_err());
            return Ok(());
        }
        let ci = contribution_index(s, r).unwrap();
        prop_assert!((-1.0..=1.0).contains(&ci));
        prop_assert_eq!(ci, -contribution_index(r, s).unwrap());
        if r == 0 {
            prop_assert_eq!(ci, 1.0);
        }
        if s == 0 {
            prop_assert_eq!(ci, -1.0);
        }
        if s == r {
            prop_assert_eq!(ci, 0.0);
        }
        Ok(())
    })
}

fn traffic_map(counts: &[(u64, u64)]) -> BTreeMap<ActorId, Traffic> {
    counts
        .iter()
        .enumerate()
        .map(|(i, &(sent, received))| (node(i), Traffic { sent, received }))
        .collect()
}

fn awvci_properties(cases: u32) -> Result<(), String> {
    let counts = proptest::collection::vec((0u64..30, 0u64..30), 1..9);
    check(cases, counts, |counts| {
        let active: Vec<(u64, u64)> = counts.iter().copied().filter(|(s, r)| s + r > 0).collect();
        let result = weighted_ci_variance(&traffic_map(&counts));
        if active.is_empty() {
            prop_assert!(result.is_err());
            return Ok(());
        }
        let v = result.unwrap();
        prop_assert!(v >= 0.0);

        // mean-deviation form as an independent evaluation
        let total: f64 = active.iter().map(|(s, r)| (s + r) as f64).sum();
        let cis: Vec<(f64, f64)> = active
            .iter()
            .map(|&(s, r)| ((s + r) as f64 / total, (s as f64 - r as f64) / (s + r) as f64))
            .collect();
        let mean: f64 = cis.iter().map(|(w, c)| w * c).sum();
        let direct: f64 = cis.iter().map(|(w, c)| w * (c - mean).powi(2)).sum();
        prop_assert!((v - direct).abs() < 1e-12, "{v} vs {direct}");

        // equal CI compared exactly as fractions
        let (s0, r0) = active[0];
        let constant = active.iter().all(|&(s, r)| s * (s0 + r0) == s0 * (s + r));
        prop_assert_eq!(v == 0.0, constant, "v = {}", v);
        Ok(())
    })
}

fn star(n: usize) -> CommGraph {
    let mut g = CommGraph::new();
    for i in 1..n {
        g.add_edge(node(0), node(i), 1);
    }
    g
}

fn cycle(n: usize) -> CommGraph {
    let mut g = CommGraph::new();
    for i in 0..n {
        g.add_edge(node(i), node((i + 1) % n), 1);
    }
    g
}

fn complete(n: usize) -> CommGraph {
    let mut g = CommGraph::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                g.add_edge(node(i), node(j), 1);
            }
        }
    }
    g
}

fn centralization_properties(cases: u32) -> Result<(), String> {
    for n in 3..=12 {
        let s = star(n);
        let (dc, bc) = (
            centralization(&degree(&s), n),
            centralization(&betweenness(&s, true, false), n),
        );
        if (dc - 1.0).abs() > 1e-12 || (bc - 1.0).abs() > 1e-12 {
            return Err(format!("star of {n}: degree {dc}, betweenness {bc}"));
        }
        for (name, g) in [("cycle", cycle(n)), ("complete", complete(n))] {
            let (dc, bc) = (
                centralization(&degree(&g), n),
                centralization(&betweenness(&g, true, false), n),
            );
            if dc.abs() > 1e-12 || bc.abs() > 1e-12 {
                return Err(format!("{name} of {n}: degree {dc}, betweenness {bc}"));
            }
        }
    }
    check(cases, small_graph(7), |sg| {
        let g = sg.graph();
        let n = sg.n;
        let dc = centralization(&degree(&g), n);
        let bc = centralization(&betweenness(&g, true, false), n);
        prop_assert!((0.0..=1.0).contains(&dc) && (0.0..=1.0).contains(&bc));
        if n >= 3 {
            let deg: Vec<f64> = (0..n)
                .map(|i| (0..n).filter(|&j| j != i && sg.linked(i, j, false)).count() as f64)
                .collect();
            let max = deg.iter().copied().fold(0.0, f64::max);
            let direct = deg.iter().map(|d| max - d).sum::<f64>() / ((n - 1) * (n - 2)) as f64;
            prop_assert!((dc - direct).abs() < 1e-12, "degree {dc} vs {direct}");

            let nb = enumerated_betweenness(&sg, true, false);
            let max = nb.iter().copied().fold(0.0, f64::max);
            let direct = nb.iter().map(|b| max - b).sum::<f64>() / (n - 1) as f64;
            prop_assert!((bc - direct).abs() < 1e-12, "betweenness {bc} vs {direct}");
        } else {
            prop_assert_eq!((dc, bc), (0.0, 0.0));
        }
        Ok(())
    })
}

fn density_properties(cases: u32) -> Result<(), String> {
    check(cases, (small_graph(6), 0usize..6, 0usize..6), |(sg, a, b)| {
        let g = sg.graph();
        let d = density(&g);
        prop_assert!((0.0..=1.0).contains(&d));
        let edges = (0..sg.n)
            .flat_map(|i| (0..sg.n).map(move |j| (i, j)))
            .filter(|&(i, j)| sg.weights[i][j] > 0)
            .count();
        let want = if sg.n < 2 {
            0.0
        } else {
            edges as f64 / (sg.n * (sg.n - 1)) as f64
        };
        prop_assert_eq!(d, want);
        if a < sg.n && b < sg.n && a != b {
            let mut more = g.clone();
            more.add_edge(node(a), node(b), 1);
            prop_assert!(density(&more) >= d);
        }
        Ok(())
    })
}

fn series(leaders: &[Option<u8>]) -> LeaderSeries {
    LeaderSeries {
        days: (0..leaders.len() as u32).collect(),
        leaders: leaders.iter().map(|l| l.map(|i| node(i as usize))).collect(),
    }
}

fn handover_bound(cases: u32) -> Result<(), String> {
    let leaders = proptest::collection::vec(proptest::option::of(0u8..4), 0..40);
    check(cases, leaders, |leaders| {
        let s = series(&leaders);
        let h = count_handovers(&s);
        prop_assert!(h as usize <= s.defined_days().saturating_sub(1));
        let constant: Vec<Option<u8>> = leaders.iter().map(|l| l.map(|_| 0)).collect();
        prop_assert_eq!(count_handovers(&series(&constant)), 0);
        Ok(())
    })
}

fn argmax_scaling(cases: u32) -> Result<(), String> {
    let surface = (1usize..6, 1usize..20)
        .prop_flat_map(|(actors, days)| proptest::collection::vec(proptest::collection::vec(0u8..4, days), actors));
    check(cases, (surface, 0.001f64..1000.0), |(grid, c)| {
        let actors: Vec<ActorId> = (0..grid.len()).map(node).collect();
        let days: Vec<u32> = (0..grid[0].len() as u32).collect();
        let values: Vec<Vec<f64>> = grid
            .iter()
            .map(|row| row.iter().map(|&v| f64::from(v) / 3.0 * 0.01).collect())
            .collect();
        let scaled: Vec<Vec<f64>> = values.iter().map(|row| row.iter().map(|v| v * c).collect()).collect();
        let base = leaders_from_surface(&TemporalSurface {
            actors: actors.clone(),
            days: days.clone(),
            values,
        });
        let again = leaders_from_surface(&TemporalSurface {
            actors,
            days,
            values: scaled,
        });
        prop_assert_eq!(base, again);
        Ok(())
    })
}

fn strong_tie_idempotent(cases: u32) -> Result<(), String> {
    check(cases, (small_graph(7), 1u32..8), |(sg, t)| {
        let g = sg.graph();
        let once = strong_tie_filter(&g, f64::from(t));
        prop_assert_eq!(&strong_tie_filter(&once, f64::from(t)), &once);
        prop_assert_eq!(&strong_tie_filter(&g, 1.0), &g);
        let kept: BTreeSet<ActorId> = once.nodes().clone();
        prop_assert_eq!(&kept, g.nodes());
        Ok(())
    })
}

fn pearson_properties(cases: u32) -> Result<(), String> {
    let data = (3usize..20).prop_flat_map(|n| {
        (
            proptest::collection::vec(-100.0f64..100.0, n),
            proptest::collection::vec(-100.0f64..100.0, n),
            0.1f64..10.0,
            -50.0f64..50.0,
        )
    });
    check(cases, data, |(xs, ys, a, b)| {
        let r = pearson(&xs, &ys).map_err(|e| TestCaseError::reject(e.to_string()))?;
        prop_assert!((-1.0..=1.0).contains(&r));
        prop_assert!((pearson(&ys, &xs).unwrap() - r).abs() < 1e-12);
        let up: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
        let down: Vec<f64> = xs.iter().map(|x| -a * x + b).collect();
        prop_assert!((pearson(&up, &ys).unwrap() - r).abs() < 1e-9);
        prop_assert!((pearson(&down, &ys).unwrap() + r).abs() < 1e-9);
        prop_assert!((pearson(&xs, &xs).unwrap() - 1.0).abs() < 1e-12);
        Ok(())
    })
}

fn p_value_monotone(cases: u32) -> Result<(), String> {
    check(cases, (0.0f64..0.999, 0.0f64..0.999, 3usize..200), |(r1, r2, n)| {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let (p_lo, p_hi) = (two_tailed_p(lo, n).unwrap(), two_tailed_p(hi, n).unwrap());
        prop_assert!((0.0..=1.0).contains(&p_lo) && (0.0..=1.0).contains(&p_hi));
        prop_assert!(p_hi <= p_lo + 1e-12, "p({hi}) = {p_hi} > p({lo}) = {p_lo}");
        prop_assert!(two_tailed_p(-hi, n).unwrap() == p_hi);
        if hi > 0.0 {
            prop_assert!(two_tailed_p(hi, n + 1).unwrap() <= p_hi + 1e-12);
        }
        Ok(())
    })
}

fn sentiment_bounds(cases: u32) -> Result<(), String> {
    let lex = SentimentLexicon::new(
        ["great", "good", "nice"].map(String::from),
        ["bad", "awful"].map(String::from),
    )
    .expect("lexicon");
    const VOCAB: [&str; 12] = [
        "great", "good", "nice", "bad", "awful", "the", "team", "Great", "report", "> bad", "\n-- \n", "9",
    ];
    let words = proptest::collection::vec(proptest::sample::select(&VOCAB[..]), 0..60);
    check(cases, words, |words| {
        let s = sentiment_score(&words.join(" "), &lex);
        prop_assert!((0.0..=100.0).contains(&s.pos) && (0.0..=100.0).contains(&s.neg));
        prop_assert!(s.pos + s.neg <= 100.0 + 1e-9);
        prop_assert_eq!(s.emotionality(), s.pos + s.neg);
        Ok(())
    })
}
