use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

/// Canonical actor identifier: a lowercase, trimmed address with any
/// display name removed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActorId(String);

impl ActorId {
    /// Normalizes a raw address string (`"Alice <A@X.EDU>"`, `" a@x.edu "`,
    /// `mailto:a@x.edu`) to canonical form. Normalizing a canonical id
    /// returns it unchanged.
    pub fn normalize(raw: &str) -> ActorId {
        let mut s = raw.trim();
        if let Some(open) = s.rfind('<') {
            if let Some(close) = s[open..].find('>') {
                s = &s[open + 1..open + close];
            }
        }
        let s = s.trim().trim_matches('"').trim();
        let s = s
            .strip_prefix("mailto:")
            .or_else(|| s.strip_prefix("MAILTO:"))
            .unwrap_or(s);
        ActorId(s.trim().to_lowercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for ActorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ActorId {
    fn from(raw: &str) -> Self {
        ActorId::normalize(raw)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TeamId(String);

impl TeamId {
    pub fn new(id: impl Into<String>) -> Self {
        TeamId(id.into().trim().to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TeamId {
    fn from(s: &str) -> Self {
        TeamId::new(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub id: String,
    pub sender: ActorId,
    /// To and Cc merged, deduplicated, in header order.
    pub recipients: Vec<ActorId>,
    pub timestamp: DateTime<Utc>,
    pub subject: String,
    pub body: String,
    /// Message ids from References and In-Reply-To.
    pub reply_parents: Vec<String>,
    pub team: Option<TeamId>,
}

/// Named counters for recoverable input problems.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Warnings(BTreeMap<String, u64>);

impl Warnings {
    pub fn bump(&mut self, key: &str) {
        *self.0.entry(key.to_string()).or_insert(0) += 1;
    }

    pub fn get(&self, key: &str) -> u64 {
        self.0.get(key).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn merge(&mut self, other: &Warnings) {
        for (k, v) in &other.0 {
            *self.0.entry(k.clone()).or_insert(0) += v;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// A time-ordered, id-unique set of messages. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct MessageSet {
    messages: Vec<Message>,
    actors: BTreeSet<ActorId>,
    span: Option<(DateTime<Utc>, DateTime<Utc>)>,
    warnings: Warnings,
}

impl MessageSet {
    /// Builds a set from messages in input order. Later duplicates of a
    /// message id are dropped and counted under `duplicate_message_id`.
    pub fn new(messages: Vec<Message>, mut warnings: Warnings) -> Self {
        let mut seen = HashSet::with_capacity(messages.len());
        let mut kept = Vec::with_capacity(messages.len());
        for m in messages {
            if seen.insert(m.id.clone()) {
                kept.push(m);
            } else {
                log::warn!("duplicate message id {}, keeping first occurrence", m.id);
                warnings.bump("duplicate_message_id");
            }
        }
        kept.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.id.cmp(&b.id)));

        let mut actors = BTreeSet::new();
        for m in &kept {
            actors.insert(m.sender.clone());
            actors.extend(m.recipients.iter().cloned());
        }
        let span = match (kept.first(), kept.last()) {
            (Some(first), Some(last)) => Some((first.timestamp, last.timestamp)),
            _ => None,
        };
        MessageSet {
            messages: kept,
            actors,
            span,
            warnings,
        }
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn actors(&self) -> &BTreeSet<ActorId> {
        &self.actors
    }

    pub fn span(&self) -> Option<(DateTime<Utc>, DateTime<Utc>)> {
        self.span
    }

    pub fn warnings(&self) -> &Warnings {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// Messages with `start <= timestamp < end`.
    pub fn in_range(&self, start: DateTime<Utc>, end: DateTime<Utc>) -> &[Message] {
        let lo = self.messages.partition_point(|m| m.timestamp < start);
        let hi = self.messages.partition_point(|m| m.timestamp < end);
        &self.messages[lo..hi.max(lo)]
    }

    pub fn team_messages<'a>(&'a self, team: &'a TeamId) -> impl Iterator<Item = &'a Message> + 'a {
        self.messages.iter().filter(move |m| m.team.as_ref() == Some(team))
    }

    pub fn into_parts(self) -> (Vec<Message>, Warnings) {
        (self.messages, self.warnings)
    }
}
