//! Comparison table output: 14 statistic rows, one column per metric.

use std::io::Write;
use std::path::Path;

use iutq_core::evaluation::{ConfusionCounts, Statistic, StatsReport, TableReport};
use serde::Serialize;

use crate::error::{IoError, IoResult};
use crate::format::opt_sig6;

fn cell(stat: Statistic, v: Option<f64>) -> String {
    match (stat.is_count(), v) {
        (true, Some(v)) => format!("{}", v as u64),
        _ => opt_sig6(v),
    }
}

fn mark(best: bool, worst: bool) -> &'static str {
    match (best, worst) {
        (true, true) => "best;worst",
        (true, false) => "best",
        (false, true) => "worst",
        (false, false) => "",
    }
}

/// Comma-separated table. Each metric column is followed by a `<metric>_mark`
/// column holding `best`, `worst`, both, or nothing.
pub fn write_report_csv<W: Write>(writer: W, report: &TableReport, origin: &Path) -> IoResult<()> {
    let mut out = csv::Writer::from_writer(writer);
    let mut header = vec!["statistic".to_string()];
    for c in &report.columns {
        header.push(c.metric.clone());
        header.push(format!("{}_mark", c.metric));
    }
    out.write_record(&header).map_err(|e| IoError::csv(origin, e))?;
    for stat in Statistic::ALL {
        let mut row = vec![stat.label().to_string()];
        for (i, c) in report.columns.iter().enumerate() {
            let a = report.annotation(stat, i);
            row.push(cell(stat, c.value(stat)));
            row.push(mark(a.best, a.worst).to_string());
        }
        out.write_record(&row).map_err(|e| IoError::csv(origin, e))?;
    }
    out.flush().map_err(|e| IoError::file(origin, e))
}

#[derive(Debug, Serialize)]
struct ReportDocument<'a> {
    metrics: Vec<&'a str>,
    rows: Vec<ReportRow>,
    mcc_raw: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct ReportRow {
    statistic: &'static str,
    higher_is_better: bool,
    values: Vec<Option<f64>>,
    best: Vec<bool>,
    worst: Vec<bool>,
}

/// The same table as one JSON document.
pub fn write_report_json<W: Write>(mut writer: W, report: &TableReport, origin: &Path) -> IoResult<()> {
    let rows = Statistic::ALL
        .iter()
        .map(|&stat| {
            let cols = 0..report.columns.len();
            ReportRow {
                statistic: stat.label(),
                higher_is_better: stat.higher_is_better(),
                values: report.columns.iter().map(|c| c.value(stat)).collect(),
                best: cols.clone().map(|i| report.annotation(stat, i).best).collect(),
                worst: cols.map(|i| report.annotation(stat, i).worst).collect(),
            }
        })
        .collect();
    let doc = ReportDocument {
        metrics: report.columns.iter().map(|c| c.metric.as_str()).collect(),
        rows,
        mcc_raw: report.columns.iter().map(|c| c.stats.mcc_raw).collect(),
    };
    serde_json::to_writer_pretty(&mut writer, &doc).map_err(|e| IoError::format(origin, e.to_string()))?;
    writer.write_all(b"\n").map_err(|e| IoError::file(origin, e))
}

/// One sweep setting with its counts and statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub metric: String,
    /// Threshold value or penalty name.
    pub setting: String,
    pub counts: ConfusionCounts,
    pub stats: StatsReport,
}

pub fn write_sweep_csv<W: Write>(writer: W, rows: &[SweepRow], origin: &Path) -> IoResult<()> {
    let mut out = csv::Writer::from_writer(writer);
    let mut header = vec!["metric", "setting"];
    header.extend(Statistic::ALL.iter().map(|s| s.label()));
    out.write_record(&header).map_err(|e| IoError::csv(origin, e))?;
    for r in rows {
        let mut record = vec![r.metric.clone(), r.setting.clone()];
        let c = &r.counts;
        record.extend([c.tp, c.tn, c.fp, c.fn_].map(|v| v.to_string()));
        record.extend(Statistic::ALL[4..].iter().map(|s| opt_sig6(r.stats.get(*s))));
        out.write_record(&record).map_err(|e| IoError::csv(origin, e))?;
    }
    out.flush().map_err(|e| IoError::file(origin, e))
}

/// Compact fixed-width rendering for terminals, three decimals.
pub fn render_table(report: &TableReport) -> String {
    let width = report.columns.iter().map(|c| c.metric.len()).max().unwrap_or(0).max(9) + 2;
    let mut s = format!("{:<5}", "");
    for c in &report.columns {
        s.push_str(&format!("{:>width$}", c.metric));
    }
    s.push('\n');
    for stat in Statistic::ALL {
        s.push_str(&format!("{:<5}", stat.label()));
        for (i, c) in report.columns.iter().enumerate() {
            let a = report.annotation(stat, i);
            let v = match c.value(stat) {
                Some(v) if stat.is_count() => format!("{}", v as u64),
                Some(v) => format!("{v:.3}"),
                None => "-".into(),
            };
            let m = if a.best {
                "*"
            } else if a.worst {
                "_"
            } else {
                " "
            };
            s.push_str(&format!("{:>w$}{m}", v, w = width - 1));
        }
        s.push('\n');
    }
    s
}
