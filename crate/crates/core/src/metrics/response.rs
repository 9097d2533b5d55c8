use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::ingest::{Message, MessageSet, TeamId};

/// Default non-response cutoff: 14 days.
pub const DEFAULT_CUTOFF_MINUTES: f64 = 20160.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResponseStats {
    pub mean_minutes: f64,
    pub pairs: usize,
}

/// Lowercased subject with leading `Re:`/`Fw:`/`Fwd:` prefixes removed.
pub fn normalize_subject(subject: &str) -> String {
    let mut s = subject.trim().to_lowercase();
    loop {
        let stripped = ["re:", "fwd:", "fw:"]
            .iter()
            .find_map(|p| s.strip_prefix(p))
            .map(|rest| rest.trim_start().to_string());
        match stripped {
            Some(rest) => s = rest,
            None => return s,
        }
    }
}

/// Average latency between a team message and its earliest reply by
/// someone else.
///
/// Replies are found through `reply_parents`; a message without reply
/// headers falls back to matching an earlier message with the same
/// normalized subject that it was addressed on. Latencies above
/// `cutoff_minutes` are treated as non-responses.
pub fn response_times(ms: &MessageSet, team: &TeamId, cutoff_minutes: f64) -> Result<ResponseStats> {
    let team_msgs: Vec<&Message> = ms.team_messages(team).collect();
    let by_id: HashMap<&str, usize> = team_msgs.iter().enumerate().map(|(i, m)| (m.id.as_str(), i)).collect();
    let mut by_subject: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, m) in team_msgs.iter().enumerate() {
        by_subject.entry(normalize_subject(&m.subject)).or_default().push(i);
    }

    // original index → earliest reply index
    let mut earliest: BTreeMap<usize, usize> = BTreeMap::new();
    let mut offer = |orig: usize, reply: usize| {
        let better = match earliest.get(&orig) {
            Some(&cur) => {
                let (c, r) = (team_msgs[cur], team_msgs[reply]);
                (r.timestamp, &r.id) < (c.timestamp, &c.id)
            }
            None => true,
        };
        if better {
            earliest.insert(orig, reply);
        }
    };

    for (ri, r) in team_msgs.iter().enumerate() {
        if r.reply_parents.is_empty() {
            let Some(candidates) = by_subject.get(&normalize_subject(&r.subject)) else {
                continue;
            };
            for &mi in candidates {
                let m = team_msgs[mi];
                if mi != ri && m.timestamp <= r.timestamp && m.sender != r.sender && m.recipients.contains(&r.sender) {
                    offer(mi, ri);
                }
            }
        } else {
            for pid in &r.reply_parents {
                let Some(&mi) = by_id.get(pid.as_str()) else {
                    continue;
                };
                let m = team_msgs[mi];
                if mi != ri && m.timestamp <= r.timestamp && m.sender != r.sender {
                    offer(mi, ri);
                }
            }
        }
    }

    let latencies: Vec<f64> = earliest
        .iter()
        .map(|(&mi, &ri)| (team_msgs[ri].timestamp - team_msgs[mi].timestamp).num_seconds() as f64 / 60.0)
        .filter(|&l| l <= cutoff_minutes)
        .collect();
    if latencies.is_empty() {
        return Err(Error::NoReplies);
    }
    Ok(ResponseStats {
        mean_minutes: latencies.iter().sum::<f64>() / latencies.len() as f64,
        pairs: latencies.len(),
    })
}
