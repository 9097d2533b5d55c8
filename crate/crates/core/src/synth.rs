//! Deterministic synthetic course corpora with a ground-truth manifest.
//!
//! Each team gets a scripted leader schedule: the current leader broadcasts
//! to every member each day and answers the threads members open with it,
//! with scripted reply latencies. Message bodies carry exact counts of
//! lexicon words. Around this the generator adds the mess real archives
//! have: aliases, display names, time zones, transfer encodings, HTML,
//! attachments, duplicates, undated mail, a course collector address,
//! instructor announcements, cross-team mail and an outside mentor.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use base64::engine::general_purpose::STANDARD;
use base64::Engine as _;
use chrono::{DateTime, Duration, FixedOffset, NaiveDate, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::SentimentLexicon;
use crate::report::write_file;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub teams: usize,
    pub days: u32,
    pub start: NaiveDate,
    pub min_members: usize,
    pub max_members: usize,
    /// Window lookback the schedule is built for; segments last at least
    /// this many days.
    pub lookback_days: u32,
    /// Handovers per team, cycled over the teams. Empty means team `i`
    /// gets `i % 6`, capped by what the course length allows.
    pub handovers: Vec<u32>,
    /// Chance that a non-leader member opens a thread with the leader on a
    /// given day.
    pub thread_rate: f64,
    /// Range of per-team mean reply latency, minutes.
    pub latency_minutes: (f64, f64),
    /// Range of per-team positive and negative word rates, percent.
    pub positive_rate: (f64, f64),
    pub negative_rate: (f64, f64),
    pub noise: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 2006,
            teams: 10,
            days: 42,
            start: NaiveDate::from_ymd_opt(2006, 1, 9).expect("valid date"),
            min_members: 4,
            max_members: 7,
            lookback_days: 7,
            handovers: Vec::new(),
            thread_rate: 0.35,
            latency_minutes: (20.0, 180.0),
            positive_rate: (0.5, 3.0),
            negative_rate: (0.2, 1.5),
            noise: true,
        }
    }
}

pub const DUMMY_ADDRESS: &str = "dummy@course.org";
pub const INSTRUCTOR: &str = "instructor@course.example";
pub const MENTOR: &str = "mentor@industry.example";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeCount {
    pub src: String,
    pub dst: String,
    pub count: u64,
}

/// What the analysis should find for one team.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeamTruth {
    pub team: String,
    pub creativity: f64,
    pub members: Vec<String>,
    /// `(first day, leader)` per segment.
    pub schedule: Vec<(u32, String)>,
    pub handovers: u32,
    /// Leader of each day's window.
    pub daily_leaders: Vec<String>,
    /// Messages tagged with the team.
    pub messages: u64,
    pub edges: Vec<EdgeCount>,
    pub replies: u64,
    pub mean_latency_minutes: f64,
    pub pos_sent: f64,
    pub neg_sent: f64,
    pub awvci: f64,
    pub group_dc: f64,
    pub msg_recvd: u64,
    pub num_actors: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseTruth {
    pub duplicates: u64,
    pub missing_date: u64,
    pub missing_message_id: u64,
    pub self_loops: u64,
    pub no_timezone: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub config: SynthConfig,
    pub dummy_address: String,
    /// Messages a parser should keep (after removing duplicates and undated
    /// mail, before self-loop removal).
    pub parsed_messages: u64,
    /// Messages left after canonicalization.
    pub messages: u64,
    pub noise: NoiseTruth,
    pub teams: Vec<TeamTruth>,
}

impl GroundTruth {
    pub fn team(&self, id: &str) -> Option<&TeamTruth> {
        self.teams.iter().find(|t| t.team == id)
    }
}

#[derive(Clone, Debug)]
pub struct SynthCorpus {
    pub mbox: String,
    pub rosters_csv: String,
    pub aliases_tsv: String,
    pub truth: GroundTruth,
}

impl SynthCorpus {
    /// Writes `course.mbox`, `rosters.csv`, `aliases.tsv`, `truth.json` and
    /// a ready-to-run `config.toml`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let config = format!(
            "messages = \"course.mbox\"\n\
             rosters = \"rosters.csv\"\n\
             aliases = \"aliases.tsv\"\n\
             dummy_addresses = [\"{DUMMY_ADDRESS}\"]\n\
             output_dir = \"out\"\n\
             \n\
             [window]\n\
             step_days = 1\n\
             lookback_days = {}\n\
             mode = \"sliding\"\n",
            self.truth.config.lookback_days
        );
        let truth = serde_json::to_string_pretty(&self.truth)? + "\n";
        let mut out = Vec::new();
        for (name, text) in [
            ("course.mbox", self.mbox.as_str()),
            ("rosters.csv", &self.rosters_csv),
            ("aliases.tsv", &self.aliases_tsv),
            ("truth.json", &truth),
            ("config.toml", &config),
        ] {
            let p = dir.join(name);
            write_file(&p, text)?;
            out.push(p);
        }
        Ok(out)
    }
}

const FIRST_NAMES: [&str; 24] = [
    "ana", "ben", "carla", "dev", "elif", "femi", "gus", "hana", "ivan", "jun", "kofi", "lena", "marc", "nia", "omar",
    "pia", "quinn", "rosa", "sami", "tara", "uma", "viktor", "wen", "yusuf",
];
const LAST_NAMES: [&str; 12] = [
    "lopez", "meyer", "okafor", "tanaka", "rossi", "novak", "silva", "haddad", "berg", "kim", "dubois", "patel",
];
const FILLER: [&str; 48] = [
    "the",
    "we",
    "prototype",
    "meeting",
    "schedule",
    "design",
    "team",
    "data",
    "model",
    "report",
    "draft",
    "section",
    "tomorrow",
    "budget",
    "interview",
    "customer",
    "slides",
    "agenda",
    "market",
    "survey",
    "deadline",
    "notes",
    "sketch",
    "figure",
    "table",
    "version",
    "plan",
    "task",
    "week",
    "our",
    "will",
    "send",
    "call",
    "room",
    "pages",
    "chapter",
    "user",
    "sample",
    "café",
    "naïve",
    "monday",
    "friday",
    "study",
    "method",
    "topic",
    "list",
    "file",
    "link",
];
const TOPICS: [&str; 6] = ["prototype", "survey", "slides", "budget", "interviews", "poster"];
const OFFSETS_MIN: [i32; 7] = [-480, -300, -240, 0, 60, 120, 330];

#[derive(Clone, Copy, Debug, PartialEq)]
enum Encoding {
    Plain,
    QuotedPrintable,
    Base64,
    Html,
    Alternative,
    WithAttachment,
    Latin1,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum DateStyle {
    Offset(i32),
    NoZone,
    Missing,
}

#[derive(Clone, Debug)]
struct Draft {
    ts: DateTime<Utc>,
    from: String,
    to: Vec<String>,
    cc: Vec<String>,
    subject: String,
    encode_subject: bool,
    body: String,
    extra_html: String,
    id: Option<String>,
    parent: Option<String>,
    encoding: Encoding,
    date: DateStyle,
}

struct Member {
    canonical: String,
    display: String,
    alias: Option<String>,
}

#[derive(Default)]
struct Tally {
    messages: u64,
    edges: BTreeMap<(String, String), u64>,
    latencies: Vec<i64>,
    pos: Vec<f64>,
    neg: Vec<f64>,
    sent: BTreeMap<String, u64>,
    received: BTreeMap<String, u64>,
    msg_recvd: u64,
    actors: BTreeSet<String>,
}

struct Words {
    pos: Vec<String>,
    neg: Vec<String>,
    filler: Vec<&'static str>,
}

impl Words {
    fn new() -> Self {
        let lex = SentimentLexicon::bundled();
        let mut pos: Vec<String> = lex.positive_words().map(str::to_string).collect();
        let mut neg: Vec<String> = lex.negative_words().map(str::to_string).collect();
        pos.sort();
        neg.sort();
        let filler = FILLER
            .iter()
            .copied()
            .filter(|w| !lex.is_positive(w) && !lex.is_negative(w))
            .collect();
        Words { pos, neg, filler }
    }

    /// `n` words with exactly `p` positive and `q` negative ones, wrapped
    /// into short lines.
    fn text(&self, rng: &mut ChaCha8Rng, n: usize, p: usize, q: usize) -> String {
        let mut words: Vec<&str> = Vec::with_capacity(n);
        for _ in 0..p {
            words.push(self.pos.choose(rng).expect("lexicon not empty"));
        }
        for _ in 0..q {
            words.push(self.neg.choose(rng).expect("lexicon not empty"));
        }
        while words.len() < n {
            words.push(self.filler.choose(rng).expect("filler not empty"));
        }
        words.shuffle(rng);
        let mut out = String::new();
        for (i, chunk) in words.chunks(9).enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&chunk.join(" "));
            out.push('.');
        }
        out
    }
}

struct Sampled {
    text: String,
    pos: f64,
    neg: f64,
}

struct TeamScript {
    id: String,
    members: Vec<Member>,
    creativity: f64,
    schedule: Vec<(u32, usize)>,
    latency_mean: f64,
    pos_rate: f64,
    neg_rate: f64,
    mentor: bool,
}

impl TeamScript {
    fn leader_on(&self, day: u32) -> usize {
        self.schedule
            .iter()
            .rev()
            .find(|(start, _)| *start <= day)
            .map_or(self.schedule[0].1, |s| s.1)
    }
}

struct Generator<'a> {
    cfg: &'a SynthConfig,
    rng: ChaCha8Rng,
    words: Words,
    drafts: Vec<Draft>,
    next_id: u64,
    noise: NoiseTruth,
}

impl Generator<'_> {
    fn message_id(&mut self) -> String {
        self.next_id += 1;
        format!("{}.{}@synth.example", self.next_id, self.cfg.seed)
    }

    fn sample_body(&mut self, pos_rate: f64, neg_rate: f64) -> Sampled {
        let n = self.rng.gen_range(20..=60usize);
        let draw = |rng: &mut ChaCha8Rng, rate: f64| -> usize {
            let expect = rate / 100.0 * n as f64;
            (expect.floor() as usize + usize::from(rng.gen_bool(expect.fract()))).min(n)
        };
        let p = draw(&mut self.rng, pos_rate);
        let q = draw(&mut self.rng, neg_rate).min(n - p);
        Sampled {
            text: self.words.text(&mut self.rng, n, p, q),
            pos: 100.0 * p as f64 / n as f64,
            neg: 100.0 * q as f64 / n as f64,
        }
    }

    fn pick_encoding(&mut self) -> Encoding {
        if !self.cfg.noise {
            return Encoding::Plain;
        }
        match self.rng.gen_range(0..100) {
            0..=59 => Encoding::Plain,
            60..=69 => Encoding::QuotedPrintable,
            70..=77 => Encoding::Base64,
            78..=83 => Encoding::Html,
            84..=89 => Encoding::Alternative,
            90..=94 => Encoding::WithAttachment,
            _ => Encoding::Latin1,
        }
    }

    fn pick_date(&mut self) -> DateStyle {
        if self.cfg.noise && self.rng.gen_bool(0.03) {
            self.noise.no_timezone += 1;
            return DateStyle::NoZone;
        }
        DateStyle::Offset(if self.cfg.noise {
            *OFFSETS_MIN.choose(&mut self.rng).expect("offsets")
        } else {
            0
        })
    }

    /// Body as sent: scored text, then optionally a quoted block and a
    /// signature that the scorer must ignore.
    fn dress(&mut self, text: &str, quoted: Option<&str>, sender: &Member, encoding: Encoding) -> String {
        let mut body = text.to_string();
        let plain_like = !matches!(encoding, Encoding::Html | Encoding::Alternative);
        if plain_like {
            if let Some(q) = quoted {
                body.push_str("\n\n");
                for line in q.lines() {
                    body.push_str("> ");
                    body.push_str(line);
                    body.push('\n');
                }
            }
            if self.cfg.noise && self.rng.gen_bool(0.3) {
                let _ = write!(body, "\n-- \n{}\nexcellent wonderful terrible\n", sender.display);
            }
        }
        body
    }

    fn sender_header(&mut self, m: &Member) -> String {
        if !self.cfg.noise {
            return m.canonical.clone();
        }
        match (&m.alias, self.rng.gen_range(0..10)) {
            (Some(a), 0..=2) => format!("{} <{a}>", m.display),
            (_, 3) => m.canonical.to_uppercase(),
            (_, 4) => format!("\"{}\" <mailto:{}>", m.display, m.canonical),
            _ => format!("{} <{}>", m.display, m.canonical),
        }
    }

    fn recipient_header(&mut self, m: &Member) -> String {
        if !self.cfg.noise {
            return m.canonical.clone();
        }
        match (&m.alias, self.rng.gen_range(0..10)) {
            (Some(a), 0..=1) => a.clone(),
            (_, 2) => {
                let mut parts = m.display.split(' ');
                let first = parts.next().unwrap_or("");
                let last = parts.next().unwrap_or("");
                format!("\"{last}, {first}\" <{}>", m.canonical)
            }
            _ => m.canonical.clone(),
        }
    }
}

fn title(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_uppercase().collect::<String>() + c.as_str())
        .unwrap_or_default()
}

fn schedule(rng: &mut ChaCha8Rng, days: u32, k: u32, lookback: u32, members: usize) -> Vec<(u32, usize)> {
    let segments = k as usize + 1;
    let mut lengths = vec![lookback; segments];
    for _ in 0..days - lookback * segments as u32 {
        let i = rng.gen_range(0..segments);
        lengths[i] += 1;
    }
    let mut out = Vec::with_capacity(segments);
    let mut start = 0;
    let mut prev: Option<usize> = None;
    for len in lengths {
        let leader = loop {
            let c = rng.gen_range(0..members);
            if Some(c) != prev {
                break c;
            }
        };
        out.push((start, leader));
        prev = Some(leader);
        start += len;
    }
    out
}

/// Builds a corpus from `cfg`. The same config always yields the same
/// bytes.
pub fn generate(cfg: &SynthConfig) -> Result<SynthCorpus> {
    if cfg.teams == 0 || cfg.days == 0 {
        return Err(Error::Invalid("need at least one team and one day".into()));
    }
    if cfg.min_members < 4 || cfg.max_members < cfg.min_members {
        return Err(Error::Invalid("team size range must start at 4 or more".into()));
    }
    if cfg.lookback_days == 0 {
        return Err(Error::Invalid("lookback must be at least one day".into()));
    }
    let max_k = (cfg.days / cfg.lookback_days).saturating_sub(1);
    if let Some(k) = cfg.handovers.iter().find(|&&k| k > max_k) {
        return Err(Error::Invalid(format!(
            "{k} handovers need {} days at a {}-day lookback, have {}",
            (k + 1) * cfg.lookback_days,
            cfg.lookback_days,
            cfg.days
        )));
    }
    if !(0.0..=1.0).contains(&cfg.thread_rate) {
        return Err(Error::Invalid("thread_rate must be within [0, 1]".into()));
    }
    let (lat_lo, lat_hi) = cfg.latency_minutes;
    if !(lat_lo > 0.0 && lat_hi >= lat_lo && lat_hi * 1.5 <= 480.0) {
        return Err(Error::Invalid("latency range must lie within (0, 320] minutes".into()));
    }

    let mut g = Generator {
        cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        words: Words::new(),
        drafts: Vec::new(),
        next_id: 0,
        noise: NoiseTruth::default(),
    };

    let mut names: Vec<(&str, &str)> = FIRST_NAMES
        .iter()
        .flat_map(|f| LAST_NAMES.iter().map(move |l| (*f, *l)))
        .collect();
    names.shuffle(&mut g.rng);
    let mut names = names.into_iter();

    let mut teams = Vec::with_capacity(cfg.teams);
    for t in 0..cfg.teams {
        let id = format!("{}", t + 1);
        let size = g.rng.gen_range(cfg.min_members..=cfg.max_members);
        let members: Vec<Member> = (0..size)
            .map(|i| {
                let (first, last) = names.next().unwrap_or(("member", "extra"));
                Member {
                    canonical: format!("{first}.{last}.t{id}@course.example"),
                    display: format!("{} {}", title(first), title(last)),
                    alias: (cfg.noise && i % 3 == 0).then(|| format!("{first}{last}{id}@mail.example")),
                }
            })
            .collect();
        let k = if cfg.handovers.is_empty() {
            (t as u32 % 6).min(max_k)
        } else {
            cfg.handovers[t % cfg.handovers.len()]
        };
        let sched = schedule(&mut g.rng, cfg.days, k, cfg.lookback_days, size);
        let creativity = (g.rng.gen_range(10..=50) as f64) / 10.0;
        teams.push(TeamScript {
            id,
            members,
            creativity,
            schedule: sched,
            latency_mean: g.rng.gen_range(lat_lo..=lat_hi),
            pos_rate: g.rng.gen_range(cfg.positive_rate.0..=cfg.positive_rate.1),
            neg_rate: g.rng.gen_range(cfg.negative_rate.0..=cfg.negative_rate.1),
            mentor: cfg.noise && t % 4 == 1,
        });
    }

    let mut tallies: Vec<Tally> = (0..teams.len()).map(|_| Tally::default()).collect();
    let start = Utc.from_utc_datetime(&cfg.start.and_hms_opt(0, 0, 0).expect("midnight"));
    let dummy = DUMMY_ADDRESS.to_string();

    for day in 0..cfg.days {
        let midnight = start + Duration::days(day as i64);
        for (ti, team) in teams.iter().enumerate() {
            let leader = team.leader_on(day);
            let tally = &mut tallies[ti];

            // daily broadcast
            let ts = midnight + Duration::minutes(7 * 60) + Duration::seconds(g.rng.gen_range(0..3600));
            let s = g.sample_body(team.pos_rate, team.neg_rate);
            let enc = g.pick_encoding();
            let body = g.dress(&s.text, None, &team.members[leader], enc);
            let from = g.sender_header(&team.members[leader]);
            let mut to = Vec::new();
            for (i, m) in team.members.iter().enumerate() {
                if i != leader {
                    to.push(g.recipient_header(m));
                    *tally
                        .edges
                        .entry((team.members[leader].canonical.clone(), m.canonical.clone()))
                        .or_default() += 1;
                    *tally.received.entry(m.canonical.clone()).or_default() += 1;
                    tally.actors.insert(m.canonical.clone());
                }
            }
            tally.actors.insert(team.members[leader].canonical.clone());
            *tally.sent.entry(team.members[leader].canonical.clone()).or_default() += 1;
            tally.msg_recvd += (team.members.len() - 1) as u64;
            tally.messages += 1;
            tally.pos.push(s.pos);
            tally.neg.push(s.neg);
            let id = if cfg.noise && g.rng.gen_bool(0.05) {
                g.noise.missing_message_id += 1;
                None
            } else {
                Some(g.message_id())
            };
            let date = g.pick_date();
            g.drafts.push(Draft {
                ts,
                from,
                to,
                cc: vec![dummy.clone()],
                subject: format!("Team {} plan for day {}", team.id, day + 1),
                encode_subject: false,
                body,
                extra_html: String::new(),
                id,
                parent: None,
                encoding: enc,
                date,
            });

            // member threads with the leader
            let mut openers: Vec<usize> = (0..team.members.len())
                .filter(|&i| i != leader && g.rng.gen_bool(cfg.thread_rate))
                .collect();
            if day == 0 && openers.is_empty() {
                openers.push((leader + 1) % team.members.len());
            }
            for (n, &who) in openers.iter().enumerate() {
                let asker = &team.members[who];
                let lead = &team.members[leader];
                let opened = midnight + Duration::minutes(8 * 60) + Duration::seconds(g.rng.gen_range(0..4 * 3600));
                let s = g.sample_body(team.pos_rate, team.neg_rate);
                let enc = g.pick_encoding();
                let body = g.dress(&s.text, None, asker, enc);
                let subject = format!(
                    "Question {}-{}-{} on the {}",
                    team.id,
                    day + 1,
                    n + 1,
                    TOPICS[(day as usize + n) % TOPICS.len()]
                );
                let from = g.sender_header(asker);
                let to = vec![g.recipient_header(lead)];
                let mut cc = vec![dummy.clone()];
                if team.mentor && g.rng.gen_bool(0.2) {
                    cc.push(format!("Dr. Mentor <{MENTOR}>"));
                    tally.actors.insert(MENTOR.to_string());
                }
                tally.actors.insert(asker.canonical.clone());
                tally.actors.insert(lead.canonical.clone());
                *tally
                    .edges
                    .entry((asker.canonical.clone(), lead.canonical.clone()))
                    .or_default() += 1;
                *tally.sent.entry(asker.canonical.clone()).or_default() += 1;
                *tally.received.entry(lead.canonical.clone()).or_default() += 1;
                tally.msg_recvd += 1;
                tally.messages += 1;
                tally.pos.push(s.pos);
                tally.neg.push(s.neg);
                let open_id = g.message_id();
                let date = g.pick_date();
                let encode_subject = cfg.noise && g.rng.gen_bool(0.1);
                g.drafts.push(Draft {
                    ts: opened,
                    from,
                    to,
                    cc,
                    subject: subject.clone(),
                    encode_subject,
                    body,
                    extra_html: String::new(),
                    id: Some(open_id.clone()),
                    parent: None,
                    encoding: enc,
                    date,
                });

                // the leader answers
                let lo = (team.latency_mean * 30.0).round() as i64;
                let hi = (team.latency_mean * 90.0).round() as i64;
                let latency = g.rng.gen_range(lo..=hi);
                tally.latencies.push(latency);
                let r = g.sample_body(team.pos_rate, team.neg_rate);
                let enc = g.pick_encoding();
                let body = g.dress(&r.text, Some(&s.text), lead, enc);
                let headerless = cfg.noise && g.rng.gen_bool(0.1);
                let from = g.sender_header(lead);
                let to = vec![g.recipient_header(asker)];
                *tally
                    .edges
                    .entry((lead.canonical.clone(), asker.canonical.clone()))
                    .or_default() += 1;
                *tally.sent.entry(lead.canonical.clone()).or_default() += 1;
                *tally.received.entry(asker.canonical.clone()).or_default() += 1;
                tally.msg_recvd += 1;
                tally.messages += 1;
                tally.pos.push(r.pos);
                tally.neg.push(r.neg);
                let reply_id = g.message_id();
                let date = g.pick_date();
                g.drafts.push(Draft {
                    ts: opened + Duration::seconds(latency),
                    from,
                    to,
                    cc: vec![dummy.clone()],
                    subject: format!("Re: {subject}"),
                    encode_subject: false,
                    body,
                    extra_html: String::new(),
                    id: Some(reply_id),
                    parent: (!headerless).then_some(open_id),
                    encoding: enc,
                    date,
                });
            }
        }

        // weekly instructor announcement to everyone
        if day % 7 == 0 {
            let mut to = Vec::new();
            for (ti, team) in teams.iter().enumerate() {
                for m in &team.members {
                    to.push(m.canonical.clone());
                }
                tallies[ti].msg_recvd += team.members.len() as u64;
            }
            let s = g.sample_body(1.5, 0.5);
            let date = g.pick_date();
            let id = g.message_id();
            g.drafts.push(Draft {
                ts: midnight + Duration::minutes(6 * 60 + 30),
                from: format!("Course Instructor <{INSTRUCTOR}>"),
                to,
                cc: vec![dummy.clone()],
                subject: format!("Week {} announcements", day / 7 + 1),
                encode_subject: false,
                body: s.text,
                extra_html: String::new(),
                id: Some(id),
                parent: None,
                encoding: Encoding::Plain,
                date,
            });
        }

        // cross-team note
        if teams.len() > 1 && g.rng.gen_bool(0.5) {
            let a = g.rng.gen_range(0..teams.len());
            let b = (a + g.rng.gen_range(1..teams.len())) % teams.len();
            let from_m = g.rng.gen_range(0..teams[a].members.len());
            let to_m = g.rng.gen_range(0..teams[b].members.len());
            tallies[b].msg_recvd += 1;
            let s = g.sample_body(1.0, 1.0);
            let from = g.sender_header(&teams[a].members[from_m]);
            let to = vec![g.recipient_header(&teams[b].members[to_m])];
            let date = g.pick_date();
            let id = g.message_id();
            g.drafts.push(Draft {
                ts: midnight + Duration::minutes(19 * 60) + Duration::seconds(g.rng.gen_range(0..1800)),
                from,
                to,
                cc: vec![dummy.clone()],
                subject: format!("Cross-team note {}", day + 1),
                encode_subject: false,
                body: s.text,
                extra_html: String::new(),
                id: Some(id),
                parent: None,
                encoding: Encoding::Plain,
                date,
            });
        }

        if cfg.noise {
            // a note to self through an alias; removed as a self-loop
            let t = g.rng.gen_range(0..teams.len());
            if let Some(m) = teams[t].members.iter().find(|m| m.alias.is_some()) {
                if g.rng.gen_bool(0.2) {
                    g.noise.self_loops += 1;
                    let id = g.message_id();
                    g.drafts.push(Draft {
                        ts: midnight + Duration::minutes(21 * 60),
                        from: m.canonical.clone(),
                        to: vec![m.alias.clone().expect("alias checked")],
                        cc: vec![dummy.clone()],
                        subject: format!("Reminder to self {}", day + 1),
                        encode_subject: false,
                        body: "remember the slides".into(),
                        extra_html: String::new(),
                        id: Some(id),
                        parent: None,
                        encoding: Encoding::Plain,
                        date: DateStyle::Offset(0),
                    });
                }
            }
            // undated mail; dropped by the parser
            if g.rng.gen_bool(0.1) {
                g.noise.missing_date += 1;
                let t = g.rng.gen_range(0..teams.len());
                let id = g.message_id();
                g.drafts.push(Draft {
                    ts: midnight + Duration::minutes(22 * 60),
                    from: teams[t].members[0].canonical.clone(),
                    to: vec![teams[t].members[1].canonical.clone()],
                    cc: Vec::new(),
                    subject: format!("Undated {}", day + 1),
                    encode_subject: false,
                    body: "great great great".into(),
                    extra_html: String::new(),
                    id: Some(id),
                    parent: None,
                    encoding: Encoding::Plain,
                    date: DateStyle::Missing,
                });
            }
        }
    }

    // multipart/alternative HTML halves carry extra words the reader must
    // not see, since the plain half wins
    for d in g.drafts.iter_mut().filter(|d| d.encoding == Encoding::Alternative) {
        d.extra_html = " wonderful".into();
    }

    let mut drafts = std::mem::take(&mut g.drafts);
    drafts.sort_by_key(|d| d.ts);

    let mut mbox = String::new();
    let mut parsed = 0u64;
    for d in &drafts {
        let rendered = render(d, &mut g.rng);
        mbox.push_str(&rendered);
        if d.date != DateStyle::Missing {
            parsed += 1;
        }
        if cfg.noise && d.id.is_some() && d.date != DateStyle::Missing && g.rng.gen_bool(0.02) {
            g.noise.duplicates += 1;
            if d.date == DateStyle::NoZone {
                g.noise.no_timezone += 1;
            }
            mbox.push_str(&rendered);
        }
    }

    let mut rosters_csv = String::from("team,member,creativity,presentation,content\n");
    let mut aliases_tsv = String::from("# raw address\tcanonical address\n");
    let mut truths = Vec::new();
    for (team, tally) in teams.iter().zip(tallies) {
        for m in &team.members {
            let _ = writeln!(rosters_csv, "{},{},{:.1},,", team.id, m.canonical, team.creativity);
            if let Some(a) = &m.alias {
                let _ = writeln!(aliases_tsv, "{a}\t{}", m.canonical);
            }
        }
        truths.push(team_truth(team, tally, cfg.days, cfg.lookback_days));
    }

    Ok(SynthCorpus {
        mbox,
        rosters_csv,
        aliases_tsv,
        truth: GroundTruth {
            config: cfg.clone(),
            dummy_address: DUMMY_ADDRESS.into(),
            parsed_messages: parsed,
            messages: parsed - g.noise.self_loops,
            noise: g.noise,
            teams: truths,
        },
    })
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn team_truth(team: &TeamScript, tally: Tally, days: u32, lookback: u32) -> TeamTruth {
    let leader_name = |i: usize| team.members[i].canonical.clone();

    // traffic-weighted variance around the weighted mean index
    let members: Vec<&str> = team.members.iter().map(|m| m.canonical.as_str()).collect();
    let counts: Vec<(f64, f64)> = members
        .iter()
        .map(|m| {
            let s = *tally.sent.get(*m).unwrap_or(&0) as f64;
            let r = *tally.received.get(*m).unwrap_or(&0) as f64;
            (s, r)
        })
        .filter(|(s, r)| s + r > 0.0)
        .collect();
    let total: f64 = counts.iter().map(|(s, r)| s + r).sum();
    let weighted_mean: f64 = counts.iter().map(|(s, r)| (s - r) / total).sum();
    let awvci = counts
        .iter()
        .map(|(s, r)| {
            let ci = (s - r) / (s + r);
            (s + r) / total * (ci - weighted_mean).powi(2)
        })
        .sum();

    // degree centralization over undirected neighbour sets
    let mut neighbours: BTreeMap<&str, BTreeSet<&str>> = members.iter().map(|m| (*m, BTreeSet::new())).collect();
    for (a, b) in tally.edges.keys() {
        neighbours.get_mut(a.as_str()).expect("member").insert(b.as_str());
        neighbours.get_mut(b.as_str()).expect("member").insert(a.as_str());
    }
    let n = members.len() as f64;
    let degrees: Vec<f64> = neighbours.values().map(|s| s.len() as f64).collect();
    let max = degrees.iter().copied().fold(0.0, f64::max);
    let group_dc = degrees.iter().map(|d| max - d).sum::<f64>() / ((n - 1.0) * (n - 2.0));

    TeamTruth {
        team: team.id.clone(),
        creativity: team.creativity,
        members: members.iter().map(|s| s.to_string()).collect(),
        schedule: team.schedule.iter().map(|&(d, i)| (d, leader_name(i))).collect(),
        handovers: team.schedule.len() as u32 - 1,
        daily_leaders: daily_leaders(team, days, lookback)
            .into_iter()
            .map(leader_name)
            .collect(),
        messages: tally.messages,
        edges: tally
            .edges
            .into_iter()
            .map(|((src, dst), count)| EdgeCount { src, dst, count })
            .collect(),
        replies: tally.latencies.len() as u64,
        mean_latency_minutes: tally.latencies.iter().sum::<i64>() as f64 / 60.0 / tally.latencies.len().max(1) as f64,
        pos_sent: mean(&tally.pos),
        neg_sent: mean(&tally.neg),
        awvci,
        group_dc,
        msg_recvd: tally.msg_recvd,
        num_actors: tally.actors.len() as u64,
    }
}

/// Window leader per day under the generator's traffic pattern: after a
/// change the outgoing and incoming leaders tie until the outgoing one's
/// broadcasts leave the window, and ties stay with the incumbent.
fn daily_leaders(team: &TeamScript, days: u32, lookback: u32) -> Vec<usize> {
    let mut out = Vec::with_capacity(days as usize);
    let mut current = team.schedule[0].1;
    for d in 0..days {
        let oldest = team.leader_on(d.saturating_sub(lookback - 1));
        let newest = team.leader_on(d);
        if oldest == newest {
            current = newest;
        }
        out.push(current);
    }
    out
}

fn qp_encode(bytes: &[u8]) -> String {
    let mut out = String::new();
    for line in bytes.split(|&b| b == b'\n') {
        let mut cur = String::new();
        for (i, &b) in line.iter().enumerate() {
            let last = i + 1 == line.len();
            let piece = match b {
                b' ' | b'\t' if last => format!("={b:02X}"),
                b'=' => "=3D".to_string(),
                33..=126 | b' ' | b'\t' => (b as char).to_string(),
                _ => format!("={b:02X}"),
            };
            if cur.len() + piece.len() > 75 {
                out.push_str(&cur);
                out.push_str("=\n");
                cur.clear();
            }
            cur.push_str(&piece);
        }
        out.push_str(&cur);
        out.push('\n');
    }
    out
}

fn base64_lines(bytes: &[u8]) -> String {
    let enc = STANDARD.encode(bytes);
    let mut out = String::new();
    for chunk in enc.as_bytes().chunks(76) {
        out.push_str(std::str::from_utf8(chunk).expect("base64 is ascii"));
        out.push('\n');
    }
    out
}

fn html_of(text: &str) -> String {
    let mut out = String::from("<html><head><style>p { color: navy }</style></head><body>\n");
    for line in text.lines() {
        let escaped = line.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
        let _ = writeln!(out, "<p>{escaped}</p>");
    }
    out.push_str("</body></html>\n");
    out
}

fn fold_list(name: &str, items: &[String]) -> String {
    let mut out = format!("{name}: ");
    let mut width = out.len();
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
            if width + it.len() > 70 {
                out.push_str("\n\t");
                width = 1;
            } else {
                out.push(' ');
                width += 2;
            }
        }
        out.push_str(it);
        width += it.len();
    }
    out.push('\n');
    out
}

fn render(d: &Draft, rng: &mut ChaCha8Rng) -> String {
    let mut h = String::new();
    let _ = writeln!(h, "From: {}", d.from);
    h.push_str(&fold_list("To", &d.to));
    if !d.cc.is_empty() {
        h.push_str(&fold_list("Cc", &d.cc));
    }
    if d.encode_subject {
        let _ = writeln!(h, "Subject: =?UTF-8?B?{}?=", STANDARD.encode(d.subject.as_bytes()));
    } else {
        let _ = writeln!(h, "Subject: {}", d.subject);
    }
    match d.date {
        DateStyle::Offset(min) => {
            let tz = FixedOffset::east_opt(min * 60).expect("offset in range");
            let _ = writeln!(
                h,
                "Date: {}",
                d.ts.with_timezone(&tz).format("%a, %d %b %Y %H:%M:%S %z")
            );
        }
        DateStyle::NoZone => {
            let _ = writeln!(h, "Date: {}", d.ts.format("%a, %d %b %Y %H:%M:%S"));
        }
        DateStyle::Missing => {}
    }
    if let Some(id) = &d.id {
        let _ = writeln!(h, "Message-ID: <{id}>");
    }
    if let Some(p) = &d.parent {
        let _ = writeln!(h, "In-Reply-To: <{p}>");
        let _ = writeln!(h, "References: <{p}>");
    }
    h.push_str("MIME-Version: 1.0\n");

    let body = match d.encoding {
        Encoding::Plain => {
            h.push_str("Content-Type: text/plain; charset=utf-8\nContent-Transfer-Encoding: 8bit\n");
            format!("{}\n", d.body)
        }
        Encoding::QuotedPrintable => {
            h.push_str("Content-Type: text/plain; charset=utf-8\nContent-Transfer-Encoding: quoted-printable\n");
            qp_encode(d.body.as_bytes())
        }
        Encoding::Latin1 => {
            let (bytes, _, _) = encoding_rs::WINDOWS_1252.encode(&d.body);
            h.push_str(
                "Content-Type: text/plain; charset=\"ISO-8859-1\"\nContent-Transfer-Encoding: quoted-printable\n",
            );
            qp_encode(&bytes)
        }
        Encoding::Base64 => {
            h.push_str("Content-Type: text/plain; charset=UTF-8\nContent-Transfer-Encoding: base64\n");
            base64_lines(d.body.as_bytes())
        }
        Encoding::Html => {
            h.push_str("Content-Type: text/html; charset=utf-8\nContent-Transfer-Encoding: 8bit\n");
            html_of(&d.body)
        }
        Encoding::Alternative => {
            let b = format!("alt-{}", rng.gen::<u32>());
            let _ = writeln!(h, "Content-Type: multipart/alternative; boundary=\"{b}\"");
            format!(
                "This is a multi-part message in MIME format.\n--{b}\nContent-Type: text/plain; charset=utf-8\n\n{}\n--{b}\nContent-Type: text/html; charset=utf-8\nContent-Transfer-Encoding: base64\n\n{}--{b}--\n",
                d.body,
                base64_lines(html_of(&format!("{}{}", d.body, d.extra_html)).as_bytes())
            )
        }
        Encoding::WithAttachment => {
            let b = format!("mix-{}", rng.gen::<u32>());
            let _ = writeln!(h, "Content-Type: multipart/mixed; boundary={b}");
            let blob: Vec<u8> = (0..96).map(|_| rng.gen()).collect();
            format!(
                "--{b}\nContent-Type: text/plain; charset=utf-8\n\n{}\n--{b}\nContent-Type: text/plain; name=\"minutes.txt\"\nContent-Disposition: attachment; filename=\"minutes.txt\"\n\nexcellent superb awful\n--{b}\nContent-Type: application/octet-stream\nContent-Disposition: attachment; filename=\"sketch.bin\"\nContent-Transfer-Encoding: base64\n\n{}--{b}--\n",
                d.body,
                base64_lines(&blob)
            )
        }
    };

    let envelope = crate::ingest::ActorId::normalize(&d.from);
    let stamp = d.ts.format("%a %b %e %H:%M:%S %Y");
    let mut out = format!("From {envelope} {stamp}\n{h}\n");
    for line in body.lines() {
        let unquoted = line.trim_start_matches('>');
        if unquoted.starts_with("From ") {
            out.push('>');
        }
        out.push_str(line);
        out.push('\n');
    }
    out.push('\n');
    out
}
