//! Bag-of-words mood scoring: lexicon hits per hundred tokens.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::ingest::{Message, MessageSet, TeamId};

const BUNDLED_POSITIVE: &str = include_str!("../../lexicon/positive.txt");
const BUNDLED_NEGATIVE: &str = include_str!("../../lexicon/negative.txt");

#[derive(Clone, Debug, PartialEq)]
pub struct SentimentLexicon {
    positive: HashSet<String>,
    negative: HashSet<String>,
}

impl SentimentLexicon {
    pub fn new(positive: impl IntoIterator<Item = String>, negative: impl IntoIterator<Item = String>) -> Result<Self> {
        let positive: HashSet<String> = positive.into_iter().map(|w| w.to_lowercase()).collect();
        let negative: HashSet<String> = negative.into_iter().map(|w| w.to_lowercase()).collect();
        if positive.is_empty() || negative.is_empty() {
            return Err(Error::Config("sentiment lexicon word lists must be nonempty".into()));
        }
        let mut overlap: Vec<&String> = positive.intersection(&negative).collect();
        if !overlap.is_empty() {
            overlap.sort();
            return Err(Error::Config(format!(
                "sentiment lexicon lists overlap: {}",
                overlap
                    .iter()
                    .take(5)
                    .map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
        Ok(SentimentLexicon { positive, negative })
    }

    /// The word lists shipped with the crate.
    pub fn bundled() -> Self {
        Self::new(parse_word_list(BUNDLED_POSITIVE), parse_word_list(BUNDLED_NEGATIVE))
            .expect("bundled lexicon is valid")
    }

    pub fn load(positive: impl AsRef<Path>, negative: impl AsRef<Path>) -> Result<Self> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
        Self::new(
            parse_word_list(&read(positive.as_ref())?),
            parse_word_list(&read(negative.as_ref())?),
        )
    }

    pub fn is_positive(&self, word: &str) -> bool {
        self.positive.contains(word)
    }

    pub fn is_negative(&self, word: &str) -> bool {
        self.negative.contains(word)
    }

    pub fn positive_words(&self) -> impl Iterator<Item = &str> {
        self.positive.iter().map(String::as_str)
    }

    pub fn negative_words(&self) -> impl Iterator<Item = &str> {
        self.negative.iter().map(String::as_str)
    }
}

/// One word per line; `#` starts a comment; blank lines skipped.
pub fn parse_word_list(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SentimentScore {
    /// Positive hits per 100 tokens.
    pub pos: f64,
    /// Negative hits per 100 tokens.
    pub neg: f64,
}

impl SentimentScore {
    pub fn emotionality(&self) -> f64 {
        self.pos + self.neg
    }
}

/// Drops quoted reply lines (leading `>`) and everything after a `-- `
/// signature delimiter.
pub fn strip_quotes_and_signature(body: &str) -> String {
    let mut out = String::with_capacity(body.len());
    for line in body.lines() {
        if line.trim_end() == "--" {
            break;
        }
        if line.trim_start().starts_with('>') {
            continue;
        }
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Lowercased runs of alphabetic characters.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

pub fn sentiment_score(text: &str, lex: &SentimentLexicon) -> SentimentScore {
    let cleaned = strip_quotes_and_signature(text);
    let (mut tokens, mut pos, mut neg) = (0usize, 0usize, 0usize);
    for t in tokenize(&cleaned) {
        tokens += 1;
        if lex.is_positive(&t) {
            pos += 1;
        } else if lex.is_negative(&t) {
            neg += 1;
        }
    }
    if tokens == 0 {
        return SentimentScore::default();
    }
    SentimentScore {
        pos: 100.0 * pos as f64 / tokens as f64,
        neg: 100.0 * neg as f64 / tokens as f64,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TeamSentiment {
    pub pos: f64,
    pub neg: f64,
    pub emotionality: f64,
    pub messages: usize,
}

fn average<'a>(messages: impl Iterator<Item = &'a Message>, lex: &SentimentLexicon) -> Option<TeamSentiment> {
    let (mut pos, mut neg, mut n) = (0.0, 0.0, 0usize);
    for m in messages {
        let s = sentiment_score(&m.body, lex);
        pos += s.pos;
        neg += s.neg;
        n += 1;
    }
    if n == 0 {
        return None;
    }
    let (pos, neg) = (pos / n as f64, neg / n as f64);
    Some(TeamSentiment {
        pos,
        neg,
        emotionality: pos + neg,
        messages: n,
    })
}

/// Per-message scores of the team's tagged messages, averaged with equal
/// weight per message.
pub fn team_sentiment(ms: &MessageSet, team: &TeamId, lex: &SentimentLexicon) -> Result<TeamSentiment> {
    average(ms.team_messages(team), lex).ok_or_else(|| Error::NoMessages(team.to_string()))
}

/// Mean message sentiment per UTC day, for all messages or one team.
pub fn daily_sentiment(
    ms: &MessageSet,
    team: Option<&TeamId>,
    lex: &SentimentLexicon,
) -> BTreeMap<NaiveDate, TeamSentiment> {
    let mut by_day: BTreeMap<NaiveDate, Vec<&Message>> = BTreeMap::new();
    for m in ms.messages() {
        if team.is_none_or(|t| m.team.as_ref() == Some(t)) {
            by_day.entry(m.timestamp.date_naive()).or_default().push(m);
        }
    }
    by_day
        .into_iter()
        .filter_map(|(d, msgs)| average(msgs.into_iter(), lex).map(|s| (d, s)))
        .collect()
}
