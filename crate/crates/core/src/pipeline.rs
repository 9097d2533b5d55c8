//! End-to-end run: ingest, canonicalize, per-team metrics, correlation and
//! report files.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use crate::config::{MessagesFormat, RunConfig};
use crate::error::{Error, Result};
use crate::graph::{build_graph, day_index, to_dot, to_edge_csv, Interval};
use crate::ingest::{
    assign_teams, canonicalize_actors, parse_mbox, parse_message_csv, read_rosters, validate_overlaps, ActorId,
    AliasMap, MessageSet, TeamRoster,
};
use crate::metrics::{
    daily_sentiment, member_traffic, team_analysis, MetricsConfig, SentimentLexicon, TeamAnalysis, TeamMetricsRow,
};
use crate::report::{
    contribution_scatter_csv, emit_run_report, leaders_csv, line_chart_svg, surface_csv, write_file, RunManifest,
    TeamNote, TimeSeries,
};
use crate::stats::{correlation_matrix, CorrelationTable};

/// Canonicalized, team-tagged messages with their rosters and lexicon.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub messages: MessageSet,
    pub rosters: Vec<TeamRoster>,
    pub lexicon: SentimentLexicon,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub rows: Vec<TeamMetricsRow>,
    pub analyses: Vec<TeamAnalysis>,
    pub correlations: Option<CorrelationTable>,
    pub manifest: RunManifest,
    pub files: Vec<PathBuf>,
}

pub fn load_corpus(cfg: &RunConfig) -> Result<Corpus> {
    let raw = match cfg.format() {
        MessagesFormat::Mbox => parse_mbox(&cfg.messages),
        MessagesFormat::Csv => parse_message_csv(&cfg.messages),
    }
    .map_err(|e| e.in_stage("ingest"))?;
    log::info!(
        "read {} messages ({} skipped or repaired)",
        raw.len(),
        raw.warnings().total()
    );

    let aliases = match &cfg.aliases {
        Some(p) => AliasMap::load(p).map_err(|e| e.in_stage("ingest"))?,
        None => AliasMap::default(),
    };
    let rosters_file = std::fs::File::open(&cfg.rosters).map_err(|e| Error::io(&cfg.rosters, e).in_stage("ingest"))?;
    let rosters: Vec<TeamRoster> = read_rosters(rosters_file)
        .map_err(|e| e.in_stage("ingest"))?
        .iter()
        .map(|r| r.canonicalize(&aliases))
        .collect();
    validate_overlaps(&rosters).map_err(|e| e.in_stage("ingest"))?;

    let lexicon = match (&cfg.positive_lexicon, &cfg.negative_lexicon) {
        (Some(p), Some(n)) => SentimentLexicon::load(p, n).map_err(|e| e.in_stage("ingest"))?,
        _ => SentimentLexicon::bundled(),
    };

    let dummies: BTreeSet<ActorId> = cfg.dummy_addresses.iter().map(|d| ActorId::normalize(d)).collect();
    let canonical = canonicalize_actors(&raw, &aliases, &dummies).map_err(|e| e.in_stage("canonicalize"))?;
    if canonical.is_empty() {
        return Err(Error::Invalid("no usable messages".into()).in_stage("ingest"));
    }
    let messages = assign_teams(&canonical, &rosters);
    Ok(Corpus {
        messages,
        rosters,
        lexicon,
    })
}

/// Analyzes every team, spreading teams over the available cores. Results
/// come back in roster order regardless of scheduling.
pub fn analyze_teams(corpus: &Corpus, cfg: &MetricsConfig) -> Result<Vec<TeamAnalysis>> {
    cfg.window.validate()?;
    let n = corpus.rosters.len();
    let workers = std::thread::available_parallelism()
        .map_or(1, |p| p.get())
        .clamp(1, n.max(1));
    let mut slots: Vec<Option<Result<TeamAnalysis>>> = (0..n).map(|_| None).collect();
    std::thread::scope(|s| {
        for (w, chunk) in slots.chunks_mut(n.div_ceil(workers).max(1)).enumerate() {
            let start = w * n.div_ceil(workers).max(1);
            s.spawn(move || {
                for (k, slot) in chunk.iter_mut().enumerate() {
                    let roster = &corpus.rosters[start + k];
                    *slot = Some(team_analysis(&corpus.messages, roster, cfg, &corpus.lexicon));
                }
            });
        }
    });
    slots
        .into_iter()
        .zip(&corpus.rosters)
        .map(|(r, roster)| {
            r.expect("every slot filled")
                .map_err(|e| Error::Invalid(format!("team {}: {e}", roster.team)).in_stage("metrics"))
        })
        .collect()
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let corpus = load_corpus(cfg)?;
    let analyses = analyze_teams(&corpus, &cfg.metrics_config())?;
    let rows: Vec<TeamMetricsRow> = analyses.iter().map(|a| a.row.clone()).collect();

    let columns: Vec<&str> = cfg.correlation_columns.iter().map(String::as_str).collect();
    let mut manifest = RunManifest::new(serde_json::to_value(cfg)?);
    let correlations = match correlation_matrix(&rows, &columns) {
        Ok(t) => Some(t),
        Err(e) => {
            log::warn!("correlations not computed: {e}");
            manifest.correlation_error = Some(e.to_string());
            None
        }
    };

    manifest.add_input("messages", &cfg.messages)?;
    manifest.add_input("rosters", &cfg.rosters)?;
    for (role, p) in [
        ("aliases", &cfg.aliases),
        ("positive_lexicon", &cfg.positive_lexicon),
        ("negative_lexicon", &cfg.negative_lexicon),
    ] {
        if let Some(p) = p {
            manifest.add_input(role, p)?;
        }
    }
    manifest.messages = corpus.messages.len() as u64;
    manifest.actors = corpus.messages.actors().len() as u64;
    manifest.warnings = corpus.messages.warnings().clone();
    manifest.correlation_columns = cfg.correlation_columns.clone();
    manifest.teams = analyses
        .iter()
        .map(|a| TeamNote {
            team: a.row.team.clone(),
            messages: corpus.messages.team_messages(&a.row.team).count() as u64,
            missing: a.missing.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        })
        .collect();

    let extra = write_extras(&cfg.output_dir, &corpus, &analyses, cfg).map_err(|e| e.in_stage("report"))?;
    manifest.outputs = extra
        .iter()
        .filter_map(|p| p.strip_prefix(&cfg.output_dir).ok())
        .map(|p| p.to_string_lossy().replace('\\', "/"))
        .collect();
    let mut files =
        emit_run_report(&cfg.output_dir, &rows, correlations.as_ref(), &manifest).map_err(|e| e.in_stage("report"))?;
    files.extend(extra);
    Ok(RunOutcome {
        rows,
        analyses,
        correlations,
        manifest,
        files,
    })
}

fn write_extras(out: &Path, corpus: &Corpus, analyses: &[TeamAnalysis], cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let mut put = |rel: String, text: String| -> Result<()> {
        let path = out.join(rel);
        write_file(&path, &text)?;
        files.push(path);
        Ok(())
    };
    for a in analyses {
        put(
            format!("surfaces/team_{}.csv", file_safe(a.row.team.as_str())),
            surface_csv(&a.surface),
        )?;
    }
    put(
        "leaders.csv".into(),
        leaders_csv(analyses.iter().map(|a| (&a.row.team, &a.leaders))),
    )?;
    let traffic: Vec<_> = corpus
        .rosters
        .iter()
        .map(|r| (&r.team, member_traffic(corpus.messages.messages(), r)))
        .collect();
    put(
        "contribution.csv".into(),
        contribution_scatter_csv(traffic.iter().map(|(t, m)| (*t, m))),
    )?;

    let Some(origin) = cfg.window.resolve_origin(&corpus.messages) else {
        return Ok(files);
    };
    let last_day = corpus
        .messages
        .span()
        .map_or(0, |(_, last)| day_index(last, origin).max(0)) as usize;

    let mut volume = Vec::new();
    for r in &corpus.rosters {
        let mut counts = vec![0.0; last_day + 1];
        for m in corpus.messages.team_messages(&r.team) {
            let d = day_index(m.timestamp, origin);
            if d >= 0 && (d as usize) <= last_day {
                counts[d as usize] += 1.0;
            }
        }
        volume.push(TimeSeries::new(
            format!("team {}", r.team),
            counts.into_iter().enumerate().map(|(d, c)| (d as f64, c)).collect(),
        ));
    }
    let leadership: Vec<TimeSeries> = analyses
        .iter()
        .map(|a| {
            let points = a
                .surface
                .days
                .iter()
                .enumerate()
                .map(|(k, &d)| {
                    let top = (0..a.surface.actors.len())
                        .map(|i| a.surface.value(i, k))
                        .fold(0.0, f64::max);
                    (d as f64, top)
                })
                .collect();
            TimeSeries::new(format!("team {}", a.row.team), points)
        })
        .collect();
    let daily = daily_sentiment(&corpus.messages, None, &corpus.lexicon);
    let by_day = |f: fn(&crate::metrics::TeamSentiment) -> f64| -> Vec<(f64, f64)> {
        daily
            .iter()
            .map(|(date, s)| ((*date - origin).num_days() as f64, f(s)))
            .collect()
    };
    let sentiment = vec![
        TimeSeries::new("positive", by_day(|s| s.pos)),
        TimeSeries::new("negative", by_day(|s| s.neg)),
    ];

    for (name, title, y, series) in [
        ("volume.svg", "Team messages per day", "messages", volume),
        (
            "leadership.svg",
            "Top member betweenness per window",
            "betweenness",
            leadership,
        ),
        (
            "sentiment.svg",
            "Sentiment over the course",
            "words per 100 tokens",
            sentiment,
        ),
    ] {
        let series: Vec<TimeSeries> = series.into_iter().filter(|s| s.points.len() >= 2).collect();
        if series.is_empty() {
            log::info!("skipping {name}: fewer than 2 days of data");
            continue;
        }
        put(format!("charts/{name}"), line_chart_svg(title, "day", y, &series)?)?;
    }
    Ok(files)
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes the whole-course graph and each team's graph as edge CSV and DOT.
pub fn export_graphs(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let corpus = load_corpus(cfg)?;
    let full = Interval::covering(&corpus.messages).ok_or_else(|| Error::Invalid("no messages".into()))?;
    let mut graphs = BTreeMap::new();
    graphs.insert("course".to_string(), build_graph(&corpus.messages, full, None));
    for r in &corpus.rosters {
        graphs.insert(
            format!("team_{}", file_safe(r.team.as_str())),
            build_graph(&corpus.messages, full, Some(r)),
        );
    }
    let mut files = Vec::new();
    for (name, g) in &graphs {
        for (ext, text) in [("csv", to_edge_csv(g)), ("dot", to_dot(g, name))] {
            let path = out_dir.join(format!("{name}.{ext}"));
            write_file(&path, &text).map_err(|e| e.in_stage("report"))?;
            files.push(path);
        }
    }
    Ok(files)
}
