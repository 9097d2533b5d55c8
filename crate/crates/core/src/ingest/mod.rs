//! Email archives and rosters into a normalized, team-tagged message set.

mod mbox;
mod message_csv;
pub mod mime;
mod roster;
mod types;

use std::collections::BTreeSet;
use std::path::Path;

pub use mbox::{parse_date, parse_mbox, parse_mbox_bytes};
pub use message_csv::{parse_message_csv, read_message_csv, write_message_csv, MESSAGE_COLUMNS};
pub use roster::{load_rosters, read_rosters, validate_overlaps, AliasMap, Ratings, TeamRoster};
pub use types::{ActorId, Message, MessageSet, TeamId, Warnings};

use crate::error::Result;

/// Picks the parser from the file extension: `.csv` is the message CSV,
/// anything else is treated as mbox.
pub fn parse_messages(path: impl AsRef<Path>) -> Result<MessageSet> {
    let path = path.as_ref();
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        parse_message_csv(path)
    } else {
        parse_mbox(path)
    }
}

/// Maps every address to its canonical actor, drops observation-channel
/// (dummy collector) addresses from recipient lists, and removes self-loops.
///
/// A message whose only recipient was its own sender is dropped and counted
/// under `self_loop_removed`.
pub fn canonicalize_actors(ms: &MessageSet, aliases: &AliasMap, dummies: &BTreeSet<ActorId>) -> Result<MessageSet> {
    let dummies: BTreeSet<ActorId> = dummies
        .iter()
        .map(|d| aliases.resolve(&ActorId::normalize(d.as_str())))
        .collect();
    let canon = |a: &ActorId| aliases.resolve(&ActorId::normalize(a.as_str()));

    let mut warnings = ms.warnings().clone();
    let mut out = Vec::with_capacity(ms.len());
    for m in ms.messages() {
        let sender = canon(&m.sender);
        let mut recipients: Vec<ActorId> = Vec::with_capacity(m.recipients.len());
        let mut had_self = false;
        for r in m.recipients.iter().map(canon) {
            if dummies.contains(&r) {
                continue;
            }
            if r == sender {
                had_self = true;
                continue;
            }
            if !recipients.contains(&r) {
                recipients.push(r);
            }
        }
        if had_self && recipients.is_empty() {
            log::warn!("dropping self-addressed message {}", m.id);
            warnings.bump("self_loop_removed");
            continue;
        }
        out.push(Message {
            sender,
            recipients,
            ..m.clone()
        });
    }
    Ok(MessageSet::new(out, warnings))
}

/// Tags each message with the team whose members it connects.
///
/// A team qualifies when it contains the sender and at least one recipient.
/// Among qualifying teams the one with the most participants of the message
/// wins; ties go to the smallest team id. Messages with no qualifying team
/// keep `team = None`.
pub fn assign_teams(ms: &MessageSet, rosters: &[TeamRoster]) -> MessageSet {
    let tagged = ms
        .messages()
        .iter()
        .map(|m| Message {
            team: team_for(m, rosters),
            ..m.clone()
        })
        .collect();
    MessageSet::new(tagged, ms.warnings().clone())
}

fn team_for(m: &Message, rosters: &[TeamRoster]) -> Option<TeamId> {
    let mut best: Option<(usize, &TeamId)> = None;
    for r in rosters {
        if !r.contains(&m.sender) {
            continue;
        }
        let in_team = m.recipients.iter().filter(|a| r.contains(a)).count();
        if in_team == 0 {
            continue;
        }
        let participants = in_team + 1;
        best = match best {
            Some((n, id)) if n > participants || (n == participants && id <= &r.team) => Some((n, id)),
            _ => Some((participants, &r.team)),
        };
    }
    best.map(|(_, id)| id.clone())
}
