use chrono::{DateTime, Duration, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use super::{build_graph, CommGraph, Interval};
use crate::error::{Error, Result};
use crate::ingest::{MessageSet, TeamRoster};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowMode {
    /// The last `lookback_days` days up to and including the window day.
    #[default]
    Sliding,
    /// Everything from the origin up to and including the window day.
    Cumulative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowConfig {
    pub step_days: u32,
    pub lookback_days: u32,
    pub mode: WindowMode,
    /// Day 0. Defaults to the UTC date of the first message.
    pub origin: Option<NaiveDate>,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            step_days: 1,
            lookback_days: 7,
            mode: WindowMode::Sliding,
            origin: None,
        }
    }
}

impl WindowConfig {
    pub fn validate(&self) -> Result<()> {
        if self.step_days < 1 {
            return Err(Error::Config("window step must be at least 1 day".into()));
        }
        if self.lookback_days < self.step_days {
            return Err(Error::Config(format!(
                "window lookback ({} days) must be at least the step ({} days)",
                self.lookback_days, self.step_days
            )));
        }
        Ok(())
    }

    pub fn resolve_origin(&self, ms: &MessageSet) -> Option<NaiveDate> {
        self.origin.or_else(|| ms.span().map(|(first, _)| first.date_naive()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowedGraph {
    /// Window number; the window closes at the end of day `day_index * step`.
    pub day_index: u32,
    pub graph: CommGraph,
    /// Messages whose day falls in this window's step, so that the counts
    /// of all windows add up to the message total.
    pub new_messages: usize,
}

/// Days since `origin`, with day boundaries at UTC midnight.
pub fn day_index(ts: DateTime<Utc>, origin: NaiveDate) -> i64 {
    (ts.date_naive() - origin).num_days()
}

fn day_start(origin: NaiveDate, day: i64) -> DateTime<Utc> {
    (origin + Duration::days(day))
        .and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc()
}

/// One graph per window from day 0 through the last day of the span.
///
/// The window for day `d` covers days `(d − lookback, d]`, clipped at the
/// origin; cumulative mode covers `[0, d]`.
pub fn window_series(ms: &MessageSet, cfg: &WindowConfig, team: Option<&TeamRoster>) -> Result<Vec<WindowedGraph>> {
    cfg.validate()?;
    let (Some(origin), Some((_, last))) = (cfg.resolve_origin(ms), ms.span()) else {
        return Err(Error::Invalid("window series over an empty message set".into()));
    };
    let last_day = day_index(last, origin);
    if last_day < 0 {
        return Ok(Vec::new());
    }
    let step = i64::from(cfg.step_days);
    let lookback = i64::from(cfg.lookback_days);
    let windows = (last_day + step - 1) / step + 1;

    let counts = |m: &crate::ingest::Message| match team {
        Some(r) => m.team.as_ref() == Some(&r.team),
        None => true,
    };

    let mut out = Vec::with_capacity(windows as usize);
    for i in 0..windows {
        let end_day = i * step;
        let end = day_start(origin, end_day + 1);
        let start = match cfg.mode {
            WindowMode::Sliding => day_start(origin, (end_day - lookback + 1).max(0)),
            WindowMode::Cumulative => day_start(origin, 0),
        };
        let graph = build_graph(ms, Interval::new(start, end), team);
        let fresh_start = day_start(origin, (end_day - step + 1).max(0));
        let new_messages = ms.in_range(fresh_start, end).iter().filter(|m| counts(m)).count();
        out.push(WindowedGraph {
            day_index: i as u32,
            graph,
            new_messages,
        });
    }
    Ok(out)
}
