use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::types::{ActorId, TeamId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ratings {
    /// 1 is best, 5 is worst.
    pub creativity: f64,
    pub presentation: Option<f64>,
    pub content: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TeamRoster {
    pub team: TeamId,
    pub members: BTreeSet<ActorId>,
    /// Members allowed to appear on other rosters too (instructors, mentors).
    pub shared: BTreeSet<ActorId>,
    pub ratings: Ratings,
}

impl TeamRoster {
    pub fn new(team: impl Into<TeamId>, members: impl IntoIterator<Item = ActorId>, creativity: f64) -> Self {
        TeamRoster {
            team: team.into(),
            members: members.into_iter().collect(),
            shared: BTreeSet::new(),
            ratings: Ratings {
                creativity,
                presentation: None,
                content: None,
            },
        }
    }

    pub fn contains(&self, actor: &ActorId) -> bool {
        self.members.contains(actor)
    }

    /// Applies an alias map to member ids.
    pub fn canonicalize(&self, aliases: &AliasMap) -> TeamRoster {
        TeamRoster {
            team: self.team.clone(),
            members: self.members.iter().map(|a| aliases.resolve(a)).collect(),
            shared: self.shared.iter().map(|a| aliases.resolve(a)).collect(),
            ratings: self.ratings,
        }
    }
}

impl From<String> for TeamId {
    fn from(s: String) -> Self {
        TeamId::new(s)
    }
}

/// Raw address → canonical actor. Targets are never themselves remapped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AliasMap {
    map: BTreeMap<ActorId, ActorId>,
}

impl AliasMap {
    pub fn new(pairs: impl IntoIterator<Item = (ActorId, ActorId)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (raw, canonical) in pairs {
            if raw != canonical {
                map.insert(raw, canonical);
            }
        }
        let am = AliasMap { map };
        am.check_chains()?;
        Ok(am)
    }

    fn check_chains(&self) -> Result<()> {
        for (raw, target) in &self.map {
            if let Some(next) = self.map.get(target) {
                return Err(Error::AliasChain {
                    raw: raw.to_string(),
                    via: target.to_string(),
                    target: next.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn resolve(&self, actor: &ActorId) -> ActorId {
        self.map.get(actor).cloned().unwrap_or_else(|| actor.clone())
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(&text)
    }

    /// `raw<TAB>canonical` per line; blank lines and `#` comments ignored.
    pub fn parse_tsv(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let Some((raw, canonical)) = line.split_once('\t') else {
                return Err(Error::Config(format!(
                    "alias line {}: expected raw<TAB>canonical",
                    n + 1
                )));
            };
            pairs.push((ActorId::normalize(raw), ActorId::normalize(canonical)));
        }
        Self::new(pairs)
    }
}

#[derive(Debug, Deserialize)]
struct RosterRow {
    team: String,
    member: String,
    creativity: f64,
    #[serde(default, deserialize_with = "empty_as_none")]
    presentation: Option<f64>,
    #[serde(default, deserialize_with = "empty_as_none")]
    content: Option<f64>,
    #[serde(default)]
    shared: Option<String>,
}

fn empty_as_none<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    let s: Option<String> = Option::deserialize(d)?;
    match s.as_deref().map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => v.parse().map(Some).map_err(serde::de::Error::custom),
    }
}

pub fn load_rosters(path: impl AsRef<Path>) -> Result<Vec<TeamRoster>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_rosters(file)
}

/// Reads `team,member,creativity,presentation,content[,shared]`. Ratings
/// repeat on each member row and must agree. Teams keep file order.
pub fn read_rosters<R: Read>(input: R) -> Result<Vec<TeamRoster>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let headers = rdr.headers()?.clone();
    for col in ["team", "member", "creativity", "presentation", "content"] {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::MissingColumn(col.to_string()));
        }
    }

    let mut rosters: Vec<TeamRoster> = Vec::new();
    for (n, row) in rdr.deserialize::<RosterRow>().enumerate() {
        let row = row.map_err(|e| Error::Config(format!("roster row {}: {e}", n + 2)))?;
        let ratings = Ratings {
            creativity: row.creativity,
            presentation: row.presentation,
            content: row.content,
        };
        for v in [Some(ratings.creativity), ratings.presentation, ratings.content]
            .into_iter()
            .flatten()
        {
            if !(1.0..=5.0).contains(&v) {
                return Err(Error::Config(format!("roster row {}: rating {v} outside [1,5]", n + 2)));
            }
        }
        let team = TeamId::new(row.team);
        let member = ActorId::normalize(&row.member);
        if member.is_empty() {
            return Err(Error::Config(format!("roster row {}: empty member", n + 2)));
        }
        let shared = matches!(
            row.shared.as_deref().map(str::to_ascii_lowercase).as_deref(),
            Some("1" | "true" | "yes" | "shared")
        );
        let roster = match rosters.iter_mut().find(|r| r.team == team) {
            Some(r) => {
                if r.ratings != ratings {
                    return Err(Error::Config(format!(
                        "roster row {}: ratings for team {team} disagree with earlier rows",
                        n + 2
                    )));
                }
                r
            }
            None => {
                rosters.push(TeamRoster {
                    team: team.clone(),
                    members: BTreeSet::new(),
                    shared: BTreeSet::new(),
                    ratings,
                });
                rosters.last_mut().unwrap()
            }
        };
        if shared {
            roster.shared.insert(member.clone());
        }
        roster.members.insert(member);
    }
    validate_overlaps(&rosters)?;
    Ok(rosters)
}

/// Members on more than one roster must be flagged shared everywhere.
pub fn validate_overlaps(rosters: &[TeamRoster]) -> Result<()> {
    let mut seen: BTreeMap<&ActorId, &TeamRoster> = BTreeMap::new();
    for r in rosters {
        for m in &r.members {
            if let Some(prev) = seen.insert(m, r) {
                if !(prev.shared.contains(m) && r.shared.contains(m)) {
                    return Err(Error::Config(format!(
                        "{m} is on teams {} and {} but is not flagged shared",
                        prev.team, r.team
                    )));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alias_chain_rejected() {
        let err = AliasMap::parse_tsv("a@g.com\tb@g.com\nb@g.com\tc@x.edu\n").unwrap_err();
        assert!(matches!(err, Error::AliasChain { .. }));
        assert!(err.is_config());
    }

    #[test]
    fn alias_resolution_normalizes() {
        let am = AliasMap::parse_tsv("# personal\nAlice <A@Gmail.com>\ta@x.edu\n").unwrap();
        assert_eq!(am.resolve(&"a@gmail.com".into()).as_str(), "a@x.edu");
        assert_eq!(am.resolve(&"z@x.edu".into()).as_str(), "z@x.edu");
    }

    #[test]
    fn rosters_group_and_validate() {
        let csv = "team,member,creativity,presentation,content,shared\n\
                   1,a@x,2.4,2,3,\n1,b@x,2.4,2,3,\n2,c@x,1.4,,,\n2,m@x,1.4,,,yes\n1,m@x,2.4,2,3,yes\n";
        let rs = read_rosters(csv.as_bytes()).unwrap();
        assert_eq!(rs.len(), 2);
        assert_eq!(rs[0].team.as_str(), "1");
        assert_eq!(rs[0].members.len(), 3);
        assert_eq!(rs[1].ratings.presentation, None);
        assert!(rs[1].shared.contains(&"m@x".into()));
    }

    #[test]
    fn inconsistent_ratings_rejected() {
        let csv = "team,member,creativity,presentation,content\n1,a@x,2,2,2\n1,b@x,3,2,2\n";
        assert!(read_rosters(csv.as_bytes()).unwrap_err().is_config());
    }

    #[test]
    fn out_of_range_rating_rejected() {
        let csv = "team,member,creativity,presentation,content\n1,a@x,6,2,2\n";
        assert!(read_rosters(csv.as_bytes()).is_err());
    }

    #[test]
    fn unflagged_overlap_rejected() {
        let csv = "team,member,creativity,presentation,content\n1,a@x,2,2,2\n2,a@x,3,3,3\n";
        let err = read_rosters(csv.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("not flagged shared"));
    }

    #[test]
    fn missing_roster_column() {
        let csv = "team,member,creativity,content\n";
        assert_eq!(
            read_rosters(csv.as_bytes()).unwrap_err().to_string(),
            "missing column: presentation"
        );
    }
}
