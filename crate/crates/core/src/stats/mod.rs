//! Pearson correlation with two-tailed Student-t significance.

pub mod special;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::metrics::TeamMetricsRow;

/// Sample Pearson product-moment correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::TooFewSamples { need: 3, got: n });
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Two-tailed p-value of a correlation coefficient from `n` samples, via
/// t = r·√((n−2)/(1−r²)) on n−2 degrees of freedom.
///
/// The t tail reduces to p = I_{1−r²}((n−2)/2, ½).
pub fn two_tailed_p(r: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::TooFewSamples { need: 3, got: n });
    }
    if r.abs() >= 1.0 {
        return Ok(0.0);
    }
    let df = (n - 2) as f64;
    let x = 1.0 - r * r;
    Ok(special::incomplete_beta(x, df / 2.0, 0.5).clamp(0.0, 1.0))
}

/// Student-t two-tailed p for a t statistic; used to cross-check
/// [`two_tailed_p`] through the t route.
pub fn t_two_tailed(t: f64, df: f64) -> f64 {
    special::incomplete_beta(df / (df + t * t), df / 2.0, 0.5)
}

/// `**` below 0.01, `*` below 0.05.
pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationCell {
    /// `None` when the pair cannot be correlated (constant column, too few
    /// complete rows).
    pub r: Option<f64>,
    /// `None` on the diagonal and for uncorrelatable pairs.
    pub p: Option<f64>,
    pub n: usize,
}

impl CorrelationCell {
    pub fn stars(&self) -> &'static str {
        self.p.map_or("", stars)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationTable {
    pub columns: Vec<String>,
    /// Upper triangle, keyed by column indices `(i, j)` with `i < j`.
    pub cells: BTreeMap<(usize, usize), CorrelationCell>,
    /// Rows the table was computed from.
    pub rows: usize,
}

impl CorrelationTable {
    fn index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cell for a pair of columns in either order. A column with itself is
    /// r = 1 with no p-value.
    pub fn get(&self, a: &str, b: &str) -> Option<CorrelationCell> {
        let (i, j) = (self.index(a)?, self.index(b)?);
        if i == j {
            return Some(CorrelationCell {
                r: Some(1.0),
                p: None,
                n: self.rows,
            });
        }
        self.cells.get(&(i.min(j), i.max(j))).cloned()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str, &CorrelationCell)> {
        self.cells
            .iter()
            .map(|(&(i, j), c)| (self.columns[i].as_str(), self.columns[j].as_str(), c))
    }
}

/// Correlates every unordered pair of the named columns. Rows missing a
/// value for either column are left out of that pair only.
pub fn correlation_matrix(rows: &[TeamMetricsRow], columns: &[&str]) -> Result<CorrelationTable> {
    if columns.len() < 2 {
        return Err(Error::Invalid("need ≥ 2 columns".into()));
    }
    if let Some(bad) = columns.iter().find(|c| !TeamMetricsRow::is_column(c)) {
        return Err(Error::MissingColumn(bad.to_string()));
    }
    if rows.len() < 3 {
        return Err(Error::TooFewSamples {
            need: 3,
            got: rows.len(),
        });
    }
    let mut cells = BTreeMap::new();
    for i in 0..columns.len() {
        for j in i + 1..columns.len() {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter_map(|r| Some((r.get(columns[i])?, r.get(columns[j])?)))
                .unzip();
            let n = xs.len();
            let r = pearson(&xs, &ys).ok();
            let p = r.and_then(|r| two_tailed_p(r, n).ok());
            cells.insert((i, j), CorrelationCell { r, p, n });
        }
    }
    Ok(CorrelationTable {
        columns: columns.iter().map(|s| s.to_string()).collect(),
        cells,
        rows: rows.len(),
    })
}
