//! False-positive rates and precision of a tracking report against
//! ground-truth labels.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EvolutionStatus, TrackingReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthLabel {
    pub warning_id: String,
    pub true_status: EvolutionStatus,
}

/// Reads the `warning_id,true_status` table. Ids must be unique.
pub fn parse_labels(bytes: &[u8]) -> Result<Vec<GroundTruthLabel>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| Error::SchemaViolation(format!("labels header: {e}")))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["warning_id", "true_status"] {
        return Err(Error::SchemaViolation(format!(
            "labels header must be warning_id,true_status, got {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec =
            rec.map_err(|e| Error::SchemaViolation(format!("labels row {}: {e}", row + 1)))?;
        let (Some(id), Some(status)) = (rec.get(0), rec.get(1)) else {
            return Err(Error::SchemaViolation(format!(
                "labels row {}: two columns expected",
                row + 1
            )));
        };
        let true_status: EvolutionStatus = status.parse().map_err(|_| {
            Error::SchemaViolation(format!("labels row {}: unknown status {status:?}", row + 1))
        })?;
        if !seen.insert(id.to_string()) {
            return Err(Error::SchemaViolation(format!("duplicate label for {id}")));
        }
        out.push(GroundTruthLabel {
            warning_id: id.to_string(),
            true_status,
        });
    }
    Ok(out)
}

pub fn write_labels(labels: &[GroundTruthLabel]) -> String {
    let mut out = String::from("warning_id,true_status\n");
    for l in labels {
        let _ = writeln!(out, "{},{}", l.warning_id, l.true_status.as_str());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryMetrics {
    pub fp_count: u64,
    pub total_count: u64,
    pub fp_rate: f64,
}

impl CategoryMetrics {
    pub fn new(fp_count: u64, total_count: u64) -> Self {
        assert!(fp_count <= total_count, "fp_count exceeds total_count");
        let fp_rate = if total_count == 0 {
            0.0
        } else {
            fp_count as f64 / total_count as f64
        };
        CategoryMetrics {
            fp_count,
            total_count,
            fp_rate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub resolved: CategoryMetrics,
    pub newly_introduced: CategoryMetrics,
    pub precision: f64,
}

impl MetricsReport {
    pub fn from_counts(fp_resolved: u64, total_resolved: u64, fp_new: u64, total_new: u64) -> Self {
        let resolved = CategoryMetrics::new(fp_resolved, total_resolved);
        let newly_introduced = CategoryMetrics::new(fp_new, total_new);
        let total = total_resolved + total_new;
        let precision = if total == 0 {
            1.0
        } else {
            1.0 - (fp_resolved + fp_new) as f64 / total as f64
        };
        MetricsReport {
            resolved,
            newly_introduced,
            precision,
        }
    }

    /// Sums the counts of several reports (e.g. per project or per commit
    /// pair) and recomputes the rates.
    pub fn aggregate<'a>(parts: impl IntoIterator<Item = &'a MetricsReport>) -> Self {
        let (mut a, mut b, mut c, mut d) = (0, 0, 0, 0);
        for p in parts {
            a += p.resolved.fp_count;
            b += p.resolved.total_count;
            c += p.newly_introduced.fp_count;
            d += p.newly_introduced.total_count;
        }
        Self::from_counts(a, b, c, d)
    }

    pub fn fp_count(&self) -> u64 {
        self.resolved.fp_count + self.newly_introduced.fp_count
    }

    pub fn total_count(&self) -> u64 {
        self.resolved.total_count + self.newly_introduced.total_count
    }

    /// False-positive rate over resolved and newly introduced decisions.
    pub fn fp_rate(&self) -> f64 {
        1.0 - self.precision
    }
}

pub fn compute_metrics(
    report: &TrackingReport,
    labels: &[GroundTruthLabel],
) -> Result<MetricsReport> {
    let statuses = report.statuses();
    let mut truth = std::collections::HashMap::new();
    for l in labels {
        if !statuses.contains_key(l.warning_id.as_str()) {
            return Err(Error::UnknownWarningId(l.warning_id.clone()));
        }
        truth.insert(l.warning_id.as_str(), l.true_status);
    }
    let true_of = |id: &str| {
        truth
            .get(id)
            .copied()
            .unwrap_or(EvolutionStatus::Persistent)
    };
    let fp_res = report
        .resolved
        .iter()
        .filter(|id| true_of(id) != EvolutionStatus::Resolved)
        .count() as u64;
    let fp_new = report
        .newly_introduced
        .iter()
        .filter(|id| true_of(id) != EvolutionStatus::NewlyIntroduced)
        .count() as u64;
    Ok(MetricsReport::from_counts(
        fp_res,
        report.resolved.len() as u64,
        fp_new,
        report.newly_introduced.len() as u64,
    ))
}

/// Improved minus baseline, per category and overall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub soa: MetricsReport,
    pub improved: MetricsReport,
    pub resolved_fp_rate_delta: f64,
    pub newly_introduced_fp_rate_delta: f64,
    pub fp_count_delta: i64,
    pub fp_rate_delta: f64,
    pub precision_delta: f64,
}

pub fn compare_approaches(soa: &MetricsReport, improved: &MetricsReport) -> Comparison {
    Comparison {
        soa: *soa,
        improved: *improved,
        resolved_fp_rate_delta: improved.resolved.fp_rate - soa.resolved.fp_rate,
        newly_introduced_fp_rate_delta: improved.newly_introduced.fp_rate
            - soa.newly_introduced.fp_rate,
        fp_count_delta: improved.fp_count() as i64 - soa.fp_count() as i64,
        fp_rate_delta: improved.fp_rate() - soa.fp_rate(),
        precision_delta: improved.precision - soa.precision,
    }
}

fn pct(x: f64) -> String {
    format!("{:.1}%", x * 100.0)
}

fn cell(c: &CategoryMetrics) -> String {
    format!("{}/{} ({})", c.fp_count, c.total_count, pct(c.fp_rate))
}

/// Plain-text table with one column per named metrics report.
pub fn render_table(columns: &[(&str, &MetricsReport)]) -> String {
    let mut rows: Vec<Vec<String>> = vec![std::iter::once("".to_string())
        .chain(columns.iter().map(|(n, _)| format!("FP ({n})")))
        .collect()];
    let mut row = |label: &str, f: &dyn Fn(&MetricsReport) -> String| {
        rows.push(
            std::iter::once(label.to_string())
                .chain(columns.iter().map(|(_, m)| f(m)))
                .collect(),
        );
    };
    row("Resolved", &|m| cell(&m.resolved));
    row("Newly introduced", &|m| cell(&m.newly_introduced));
    row("Total", &|m| {
        format!(
            "{}/{} ({})",
            m.fp_count(),
            m.total_count(),
            pct(m.fp_rate())
        )
    });
    row("Precision", &|m| pct(m.precision));
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in &rows {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (v, w))| {
                if i == 0 {
                    format!("{v:<w$}")
                } else {
                    format!("{v:>w$}")
                }
            })
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}
