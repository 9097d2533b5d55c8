use std::fmt::Write as _;
use std::io::Read;

use crate::error::{Error, Result};
use crate::ingest::{ActorId, TeamId};
use crate::metrics::{TeamMetricsRow, TemporalSurface, METRIC_COLUMNS};
use crate::stats::{CorrelationCell, CorrelationTable};

pub(crate) fn fixed6(v: f64) -> String {
    format!("{v:.6}")
}

fn opt6(v: Option<f64>) -> String {
    v.map(fixed6).unwrap_or_default()
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// `actor,day_0,day_1,...` with one row per actor.
pub fn surface_csv(surface: &TemporalSurface) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["actor".to_string()];
    header.extend(surface.days.iter().map(|d| format!("day_{d}")));
    w.write_record(&header).expect("in-memory write");
    for (actor, row) in surface.actors.iter().zip(&surface.values) {
        let mut rec = vec![actor.to_string()];
        rec.extend(row.iter().map(|&v| fixed6(v)));
        w.write_record(&rec).expect("in-memory write");
    }
    csv_string(w)
}

pub fn read_surface_csv<R: Read>(input: R) -> Result<TemporalSurface> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.get(0) != Some("actor") {
        return Err(Error::MissingColumn("actor".into()));
    }
    let days = headers
        .iter()
        .skip(1)
        .map(|h| {
            h.strip_prefix("day_")
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| Error::Invalid(format!("bad surface column {h:?}")))
        })
        .collect::<Result<Vec<u32>>>()?;
    let mut actors = Vec::new();
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        actors.push(ActorId::normalize(&rec[0]));
        values.push(
            rec.iter()
                .skip(1)
                .map(|v| v.parse::<f64>().map_err(|e| Error::Invalid(format!("{v:?}: {e}"))))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    Ok(TemporalSurface { actors, days, values })
}

pub fn team_metrics_csv(rows: &[TeamMetricsRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["team"];
    header.extend(METRIC_COLUMNS);
    w.write_record(&header).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.team.to_string(),
            fixed6(r.creativity),
            r.bc_oscillations.to_string(),
            opt6(r.art_norm_min),
            opt6(r.pos_sent),
            opt6(r.awvci),
            fixed6(r.gbc_strong_tie),
            fixed6(r.group_dc),
            r.msg_recvd.to_string(),
            r.num_actors.to_string(),
        ])
        .expect("in-memory write");
    }
    csv_string(w)
}

/// Reads rows with the team-metrics header. Lines starting with `#` are
/// comments; empty cells in optional columns are missing values.
pub fn read_team_metrics_csv<R: Read>(input: R) -> Result<Vec<TeamMetricsRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let team_idx = col("team")?;
    let idx: Vec<usize> = METRIC_COLUMNS.iter().map(|c| col(c)).collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let cell = |k: usize| -> Result<Option<f64>> {
            let raw = rec.get(idx[k]).unwrap_or("");
            if raw.is_empty() {
                return Ok(None);
            }
            raw.parse::<f64>().map(Some).map_err(|_| {
                Error::Invalid(format!(
                    "row {}: column {}: not a number: {raw:?}",
                    line + 2,
                    METRIC_COLUMNS[k]
                ))
            })
        };
        let required = |k: usize| -> Result<f64> {
            cell(k)?
                .ok_or_else(|| Error::Invalid(format!("row {}: column {} is required", line + 2, METRIC_COLUMNS[k])))
        };
        let count = |k: usize| -> Result<u64> {
            let v = required(k)?;
            if v < 0.0 || v.fract() != 0.0 {
                return Err(Error::Invalid(format!(
                    "row {}: column {} must be a non-negative integer",
                    line + 2,
                    METRIC_COLUMNS[k]
                )));
            }
            Ok(v as u64)
        };
        rows.push(TeamMetricsRow {
            team: TeamId::new(rec.get(team_idx).unwrap_or("")),
            creativity: required(0)?,
            bc_oscillations: count(1)?,
            art_norm_min: cell(2)?,
            pos_sent: cell(3)?,
            awvci: cell(4)?,
            gbc_strong_tie: required(5)?,
            group_dc: required(6)?,
            msg_recvd: count(7)?,
            num_actors: count(8)?,
        });
    }
    Ok(rows)
}

/// `column_a,column_b,r,p,n,stars`, one line per unordered pair.
pub fn correlations_csv(table: &CorrelationTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["column_a", "column_b", "r", "p", "n", "stars"])
        .expect("in-memory write");
    for (a, b, c) in table.pairs() {
        w.write_record([
            a.to_string(),
            b.to_string(),
            opt6(c.r),
            opt6(c.p),
            c.n.to_string(),
            c.stars().to_string(),
        ])
        .expect("in-memory write");
    }
    csv_string(w)
}

/// Parsed `correlations.csv` line.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationRecord {
    pub a: String,
    pub b: String,
    pub cell: CorrelationCell,
}

pub fn read_correlations_csv<R: Read>(input: R) -> Result<Vec<CorrelationRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<Option<f64>> {
            match rec.get(i).unwrap_or("") {
                "" => Ok(None),
                s => s
                    .parse()
                    .map(Some)
                    .map_err(|_| Error::Invalid(format!("not a number: {s:?}"))),
            }
        };
        out.push(CorrelationRecord {
            a: rec[0].to_string(),
            b: rec[1].to_string(),
            cell: CorrelationCell {
                r: num(2)?,
                p: num(3)?,
                n: rec[4]
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad n {:?}", &rec[4])))?,
            },
        });
    }
    Ok(out)
}

/// Three decimals without the leading zero: `-.830`, `.003`.
pub fn spss_decimal(v: f64) -> String {
    let s = format!("{v:.3}");
    if let Some(rest) = s.strip_prefix("0.") {
        format!(".{rest}")
    } else if let Some(rest) = s.strip_prefix("-0.") {
        format!("-.{rest}")
    } else {
        s
    }
}

/// Aligned text table: one block per row column with Pearson r (starred),
/// two-tailed p and N; upper triangle only.
pub fn correlations_text(table: &CorrelationTable) -> String {
    let k = table.columns.len();
    if k < 2 {
        return String::new();
    }
    const LABELS: [&str; 3] = ["Pearson Correlation", "Sig. (2-tailed)", "N"];
    let name_w = table.columns[..k - 1].iter().map(|c| c.len()).max().unwrap_or(0);
    let label_w = LABELS.iter().map(|l| l.len()).max().unwrap_or(0);
    let col_w: Vec<usize> = table.columns[1..].iter().map(|c| c.len().max(8)).collect();

    let mut out = String::new();
    let _ = write!(out, "{:name_w$}  {:label_w$}", "", "");
    for (c, w) in table.columns[1..].iter().zip(&col_w) {
        let _ = write!(out, "  {c:>w$}");
    }
    out.push('\n');
    for i in 0..k - 1 {
        for (li, label) in LABELS.iter().enumerate() {
            let name = if li == 0 { table.columns[i].as_str() } else { "" };
            let _ = write!(out, "{name:name_w$}  {label:label_w$}");
            for (j, w) in (1..k).zip(&col_w) {
                let text = if j <= i {
                    String::new()
                } else {
                    let c = &table.cells[&(i, j)];
                    match li {
                        0 => {
                            c.r.map_or("n/a".into(), |r| format!("{}{}", spss_decimal(r), c.stars()))
                        }
                        1 => c.p.map_or("n/a".into(), spss_decimal),
                        _ => c.n.to_string(),
                    }
                };
                let _ = write!(out, "  {text:>w$}");
            }
            // trailing blanks from empty lower-triangle cells
            while out.ends_with(' ') {
                out.pop();
            }
            out.push('\n');
        }
    }
    out.push_str("**. Correlation is significant at the 0.01 level (2-tailed).\n");
    out.push_str("*. Correlation is significant at the 0.05 level (2-tailed).\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surface_shapes() {
        let s = TemporalSurface {
            actors: vec!["a@x".into(), "b@x".into()],
            days: vec![0, 1, 2],
            values: vec![vec![0.0, 0.5, 1.0], vec![0.25, 0.0, 0.0]],
        };
        let text = surface_csv(&s);
        assert_eq!(text.lines().count(), 3);
        assert_eq!(text.lines().next(), Some("actor,day_0,day_1,day_2"));
        assert_eq!(text.lines().nth(1), Some("a@x,0.000000,0.500000,1.000000"));
        assert_eq!(read_surface_csv(text.as_bytes()).unwrap(), s);

        let empty = TemporalSurface {
            actors: vec![],
            days: vec![],
            values: vec![],
        };
        assert_eq!(surface_csv(&empty), "actor\n");
    }

    #[test]
    fn spss_formatting() {
        assert_eq!(spss_decimal(-0.8303), "-.830");
        assert_eq!(spss_decimal(0.00049), ".000");
        assert_eq!(spss_decimal(0.93), ".930");
        assert_eq!(spss_decimal(1.0), "1.000");
    }

    #[test]
    fn metrics_csv_round_trip_with_missing() {
        let rows = vec![TeamMetricsRow {
            team: "7".into(),
            creativity: 2.2,
            bc_oscillations: 23,
            art_norm_min: None,
            pos_sent: Some(2.193),
            awvci: Some(0.058),
            gbc_strong_tie: 0.525,
            group_dc: 0.956,
            msg_recvd: 3804,
            num_actors: 64,
        }];
        let text = team_metrics_csv(&rows);
        assert_eq!(
            text,
            "team,creativity,bc_oscillations,art_norm_min,pos_sent,awvci,gbc_strong_tie,group_dc,msg_recvd,num_actors\n\
             7,2.200000,23,,2.193000,0.058000,0.525000,0.956000,3804,64\n"
        );
        assert_eq!(read_team_metrics_csv(text.as_bytes()).unwrap(), rows);
    }

    #[test]
    fn metrics_csv_errors() {
        let err = read_team_metrics_csv("team,creativity\n1,2\n".as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "missing column: bc_oscillations");
        let bad = format!("team,{}\n1,2,1.5,,,,0,0,1,1\n", METRIC_COLUMNS.join(","));
        assert!(read_team_metrics_csv(bad.as_bytes()).is_err());
    }
}
