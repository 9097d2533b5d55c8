use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ingest::{ActorId, Message, TeamRoster};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Traffic {
    pub sent: u64,
    pub received: u64,
}

impl Traffic {
    pub fn total(&self) -> u64 {
        self.sent + self.received
    }

    pub fn contribution_index(&self) -> Result<f64> {
        contribution_index(self.sent, self.received)
    }
}

/// (sent − received) / (sent + received): +1 only sends, 0 balanced, −1 only receives.
pub fn contribution_index(sent: u64, received: u64) -> Result<f64> {
    let total = sent + received;
    if total == 0 {
        return Err(Error::ZeroTraffic);
    }
    Ok((sent as f64 - received as f64) / total as f64)
}

/// Per-actor message counts: one "sent" per message, one "received" per
/// delivery.
pub fn traffic<'a>(messages: impl IntoIterator<Item = &'a Message>) -> BTreeMap<ActorId, Traffic> {
    let mut out: BTreeMap<ActorId, Traffic> = BTreeMap::new();
    for m in messages {
        out.entry(m.sender.clone()).or_default().sent += 1;
        for r in &m.recipients {
            out.entry(r.clone()).or_default().received += 1;
        }
    }
    out
}

/// Traffic of roster members over the team's tagged messages.
pub fn member_traffic<'a>(
    messages: impl IntoIterator<Item = &'a Message>,
    roster: &TeamRoster,
) -> BTreeMap<ActorId, Traffic> {
    let team = messages.into_iter().filter(|m| m.team.as_ref() == Some(&roster.team));
    traffic(team).into_iter().filter(|(a, _)| roster.contains(a)).collect()
}

/// Traffic-weighted variance of members' contribution indices.
///
/// Weights are each member's share of total traffic. The variance is
/// evaluated in pairwise form, ½ Σᵢ Σⱼ wᵢ wⱼ (CIᵢ − CIⱼ)², which is exactly
/// zero when all indices coincide.
pub fn weighted_ci_variance(traffic: &BTreeMap<ActorId, Traffic>) -> Result<f64> {
    let active: Vec<(f64, f64)> = traffic
        .values()
        .filter(|t| t.total() > 0)
        .map(|t| Ok((t.total() as f64, t.contribution_index()?)))
        .collect::<Result<_>>()?;
    let total: f64 = active.iter().map(|(w, _)| w).sum();
    if total == 0.0 {
        return Err(Error::NoTeamTraffic);
    }
    let mut acc = 0.0;
    for (i, (wi, ci)) in active.iter().enumerate() {
        for (wj, cj) in &active[i + 1..] {
            let d = ci - cj;
            acc += (wi / total) * (wj / total) * d * d;
        }
    }
    Ok(acc)
}

/// Average weighted variance in contribution index for a team, counted over
/// its tagged messages for the whole course.
pub fn awvci<'a>(messages: impl IntoIterator<Item = &'a Message>, roster: &TeamRoster) -> Result<f64> {
    weighted_ci_variance(&member_traffic(messages, roster))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contribution_edge_values() {
        assert_eq!(contribution_index(10, 0).unwrap(), 1.0);
        assert_eq!(contribution_index(5, 5).unwrap(), 0.0);
        assert_eq!(contribution_index(0, 7).unwrap(), -1.0);
        assert!(matches!(contribution_index(0, 0), Err(Error::ZeroTraffic)));
    }

    fn counts(pairs: &[(u64, u64)]) -> BTreeMap<ActorId, Traffic> {
        pairs
            .iter()
            .enumerate()
            .map(|(i, &(sent, received))| (ActorId::from(format!("m{i}").as_str()), Traffic { sent, received }))
            .collect()
    }

    #[test]
    fn constant_ci_gives_zero() {
        assert_eq!(weighted_ci_variance(&counts(&[(2, 1), (4, 2), (20, 10)])).unwrap(), 0.0);
    }

    #[test]
    fn opposite_ci_equal_traffic_gives_one() {
        assert_eq!(weighted_ci_variance(&counts(&[(5, 0), (0, 5)])).unwrap(), 1.0);
    }

    #[test]
    fn silent_members_ignored_and_no_traffic_errors() {
        let with_silent = counts(&[(5, 0), (0, 5), (0, 0)]);
        assert_eq!(weighted_ci_variance(&with_silent).unwrap(), 1.0);
        assert!(matches!(
            weighted_ci_variance(&counts(&[(0, 0)])),
            Err(Error::NoTeamTraffic)
        ));
    }
}
