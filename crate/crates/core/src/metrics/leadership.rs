//! Rotating leadership: who holds the top betweenness in each window, and
//! how often that role changes hands.

use crate::graph::WindowedGraph;
use crate::ingest::{ActorId, TeamRoster};

use super::centrality::betweenness;

/// Actors × windows matrix of normalized betweenness.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalSurface {
    pub actors: Vec<ActorId>,
    pub days: Vec<u32>,
    /// `values[actor][day]`.
    pub values: Vec<Vec<f64>>,
}

impl TemporalSurface {
    pub fn value(&self, actor: usize, day: usize) -> f64 {
        self.values[actor][day]
    }

    pub fn is_well_formed(&self) -> bool {
        self.values.len() == self.actors.len() && self.values.iter().all(|row| row.len() == self.days.len())
    }
}

/// Normalized betweenness of each roster member in every window, actors in
/// id order.
pub fn temporal_surface(windows: &[WindowedGraph], roster: &TeamRoster, directed: bool) -> TemporalSurface {
    let actors: Vec<ActorId> = roster.members.iter().cloned().collect();
    let mut values = vec![Vec::with_capacity(windows.len()); actors.len()];
    for w in windows {
        let bc = betweenness(&w.graph, true, directed);
        for (row, a) in values.iter_mut().zip(&actors) {
            row.push(bc.get(a).clamp(0.0, 1.0));
        }
    }
    TemporalSurface {
        actors,
        days: windows.iter().map(|w| w.day_index).collect(),
        values,
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LeaderSeries {
    pub days: Vec<u32>,
    pub leaders: Vec<Option<ActorId>>,
}

impl LeaderSeries {
    pub fn defined_days(&self) -> usize {
        self.leaders.iter().filter(|l| l.is_some()).count()
    }
}

pub fn leadership_series(windows: &[WindowedGraph], roster: &TeamRoster, directed: bool) -> LeaderSeries {
    leaders_from_surface(&temporal_surface(windows, roster, directed))
}

/// Relative tolerance under which two scores count as tied.
const TIE_TOLERANCE: f64 = 1e-9;

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs())
}

/// Per window, the member with maximal betweenness. Ties keep the previous
/// leader when it is among the tied, else go to the smallest actor id. A
/// window where nobody has positive betweenness has no leader.
pub fn leaders_from_surface(surface: &TemporalSurface) -> LeaderSeries {
    let mut leaders = Vec::with_capacity(surface.days.len());
    let mut previous: Option<usize> = None;
    for day in 0..surface.days.len() {
        let max = (0..surface.actors.len())
            .map(|a| surface.value(a, day))
            .fold(0.0f64, f64::max);
        let leader = if max > 0.0 {
            let is_top = |a: usize| tied(surface.value(a, day), max);
            match previous.filter(|&p| is_top(p)) {
                Some(p) => Some(p),
                // actors are sorted, so the first tied index is the smallest id
                None => (0..surface.actors.len()).find(|&a| is_top(a)),
            }
        } else {
            None
        };
        if leader.is_some() {
            previous = leader;
        }
        leaders.push(leader.map(|a| surface.actors[a].clone()));
    }
    LeaderSeries {
        days: surface.days.clone(),
        leaders,
    }
}

/// Changes of leader between adjacent windows that both have one. A
/// leaderless window breaks the chain rather than bridging it.
pub fn count_handovers(series: &LeaderSeries) -> u64 {
    series
        .leaders
        .windows(2)
        .filter(|pair| matches!(pair, [Some(a), Some(b)] if a != b))
        .count() as u64
}
