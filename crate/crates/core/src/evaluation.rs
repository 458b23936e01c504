//! Binary classification quality of criticality flags against labels.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    pub const fn new(tp: u64, tn: u64, fp: u64, fn_: u64) -> Self {
        ConfusionCounts { tp, tn, fp, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn record(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (false, false) => self.tn += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
        }
    }
}

/// Labeled keys that have no prediction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingPredictions<K> {
    pub keys: Vec<K>,
}

impl<K: fmt::Debug> fmt::Display for MissingPredictions<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} labeled keys have no prediction", self.keys.len())?;
        for k in self.keys.iter().take(20) {
            write!(f, "\n  {k:?}")?;
        }
        if self.keys.len() > 20 {
            write!(f, "\n  ...")?;
        }
        Ok(())
    }
}

impl<K: fmt::Debug> core::error::Error for MissingPredictions<K> {}

/// 2x2 counts over the labeled keys. Predictions without a label are ignored.
pub fn confusion<K: Ord + Clone>(
    flags: &BTreeMap<K, bool>,
    labels: &BTreeMap<K, bool>,
) -> core::result::Result<ConfusionCounts, MissingPredictions<K>> {
    let mut counts = ConfusionCounts::default();
    let mut missing = Vec::new();
    for (key, &actual) in labels {
        match flags.get(key) {
            Some(&predicted) => counts.record(predicted, actual),
            None => missing.push(key.clone()),
        }
    }
    if missing.is_empty() {
        Ok(counts)
    } else {
        Err(MissingPredictions { keys: missing })
    }
}

/// The statistic rows of the comparison table, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Statistic {
    Tp,
    Tn,
    Fp,
    Fn,
    Acc,
    Mr,
    Tpr,
    Fpr,
    Tnr,
    Fnr,
    Pre,
    Cok,
    F1s,
    Mcc,
}

impl Statistic {
    pub const ALL: [Statistic; 14] = [
        Statistic::Tp,
        Statistic::Tn,
        Statistic::Fp,
        Statistic::Fn,
        Statistic::Acc,
        Statistic::Mr,
        Statistic::Tpr,
        Statistic::Fpr,
        Statistic::Tnr,
        Statistic::Fnr,
        Statistic::Pre,
        Statistic::Cok,
        Statistic::F1s,
        Statistic::Mcc,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Statistic::Tp => "TP",
            Statistic::Tn => "TN",
            Statistic::Fp => "FP",
            Statistic::Fn => "FN",
            Statistic::Acc => "ACC",
            Statistic::Mr => "MR",
            Statistic::Tpr => "TPR",
            Statistic::Fpr => "FPR",
            Statistic::Tnr => "TNR",
            Statistic::Fnr => "FNR",
            Statistic::Pre => "PRE",
            Statistic::Cok => "CoK",
            Statistic::F1s => "F1S",
            Statistic::Mcc => "MCC",
        }
    }

    pub fn higher_is_better(&self) -> bool {
        !matches!(self, Statistic::Fp | Statistic::Fn | Statistic::Mr | Statistic::Fpr | Statistic::Fnr)
    }

    pub fn is_count(&self) -> bool {
        matches!(self, Statistic::Tp | Statistic::Tn | Statistic::Fp | Statistic::Fn)
    }
}

/// Derived rates. `None` marks a zero denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StatsReport {
    pub acc: f64,
    pub mr: f64,
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub tnr: Option<f64>,
    pub fnr: Option<f64>,
    pub pre: Option<f64>,
    /// Cohen's kappa, in `[-1, 1]`.
    pub cok: Option<f64>,
    pub f1s: Option<f64>,
    /// Raw Matthews correlation, 0 when its denominator vanishes.
    pub mcc_raw: f64,
    /// `(mcc_raw + 1) / 2`, in `[0, 1]` with 0.5 for chance level.
    pub mcc_normalized: f64,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn statistics(c: &ConfusionCounts) -> Result<StatsReport> {
    let n = c.total();
    if n == 0 {
        return Err(Error::EmptyCounts);
    }
    let (tp, tn, fp, fn_) = (c.tp as f64, c.tn as f64, c.fp as f64, c.fn_ as f64);
    let total = n as f64;
    let acc = (tp + tn) / total;
    // chance agreement from the marginals
    let p_e = ((tp + fp) * (tp + fn_) + (fn_ + tn) * (fp + tn)) / (total * total);
    let cok = (p_e < 1.0).then(|| (acc - p_e) / (1.0 - p_e));
    let mcc_den = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
    let mcc_raw = if mcc_den > 0.0 { (tp * tn - fp * fn_) / math::sqrt(mcc_den) } else { 0.0 };
    Ok(StatsReport {
        acc,
        mr: 1.0 - acc,
        tpr: ratio(c.tp, c.tp + c.fn_),
        fpr: ratio(c.fp, c.fp + c.tn),
        tnr: ratio(c.tn, c.tn + c.fp),
        fnr: ratio(c.fn_, c.fn_ + c.tp),
        pre: ratio(c.tp, c.tp + c.fp),
        cok,
        f1s: ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_),
        mcc_raw,
        mcc_normalized: (mcc_raw + 1.0) / 2.0,
    })
}

impl StatsReport {
    /// Derived value of a table row; counts are not held here.
    pub fn get(&self, stat: Statistic) -> Option<f64> {
        match stat {
            Statistic::Acc => Some(self.acc),
            Statistic::Mr => Some(self.mr),
            Statistic::Tpr => self.tpr,
            Statistic::Fpr => self.fpr,
            Statistic::Tnr => self.tnr,
            Statistic::Fnr => self.fnr,
            Statistic::Pre => self.pre,
            Statistic::Cok => self.cok,
            Statistic::F1s => self.f1s,
            Statistic::Mcc => Some(self.mcc_normalized),
            Statistic::Tp | Statistic::Tn | Statistic::Fp | Statistic::Fn => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Annotation {
    pub best: bool,
    pub worst: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReportColumn {
    pub metric: String,
    pub counts: ConfusionCounts,
    pub stats: StatsReport,
}

impl ReportColumn {
    pub fn value(&self, stat: Statistic) -> Option<f64> {
        match stat {
            Statistic::Tp => Some(self.counts.tp as f64),
            Statistic::Tn => Some(self.counts.tn as f64),
            Statistic::Fp => Some(self.counts.fp as f64),
            Statistic::Fn => Some(self.counts.fn_ as f64),
            other => self.stats.get(other),
        }
    }
}

/// One column per metric plus best/worst marks per row. Ties are marked on
/// every tied column; undefined cells are never marked.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TableReport {
    pub columns: Vec<ReportColumn>,
    /// `annotations[row][column]`, rows in [`Statistic::ALL`] order.
    pub annotations: Vec<Vec<Annotation>>,
}

impl TableReport {
    pub fn from_counts(columns: impl IntoIterator<Item = (String, ConfusionCounts)>) -> Result<Self> {
        let columns = columns
            .into_iter()
            .map(|(metric, counts)| Ok(ReportColumn { metric, stats: statistics(&counts)?, counts }))
            .collect::<Result<Vec<_>>>()?;
        let annotations = Statistic::ALL.iter().map(|s| annotate(&columns, *s)).collect();
        Ok(TableReport { columns, annotations })
    }

    pub fn annotation(&self, stat: Statistic, column: usize) -> Annotation {
        let row = Statistic::ALL.iter().position(|s| *s == stat).unwrap_or(0);
        self.annotations[row][column]
    }
}

fn annotate(columns: &[ReportColumn], stat: Statistic) -> Vec<Annotation> {
    let values: Vec<Option<f64>> = columns.iter().map(|c| c.value(stat)).collect();
    let defined = values.iter().flatten();
    let hi = defined.clone().copied().reduce(f64::max);
    let lo = defined.copied().reduce(f64::min);
    let (best, worst) = if stat.higher_is_better() { (hi, lo) } else { (lo, hi) };
    values
        .iter()
        .map(|v| match v {
            Some(v) => Annotation { best: Some(*v) == best, worst: Some(*v) == worst },
            None => Annotation::default(),
        })
        .collect()
}

/// Labels and per-metric flags in, annotated table out.
pub fn table_report<K: Ord + Clone>(
    flags: &[(String, BTreeMap<K, bool>)],
    labels: &BTreeMap<K, bool>,
) -> core::result::Result<TableReport, ReportError<K>> {
    if flags.is_empty() {
        return Err(ReportError::NoMetrics);
    }
    let mut counts = Vec::with_capacity(flags.len());
    for (metric, f) in flags {
        let c = confusion(f, labels).map_err(|m| ReportError::MissingPredictions(metric.clone(), m))?;
        counts.push((metric.clone(), c));
    }
    TableReport::from_counts(counts).map_err(ReportError::Stats)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReportError<K> {
    NoMetrics,
    MissingPredictions(String, MissingPredictions<K>),
    Stats(Error),
}

impl<K: fmt::Debug> fmt::Display for ReportError<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportError::NoMetrics => f.write_str("no metrics to report"),
            ReportError::MissingPredictions(metric, m) => write!(f, "metric {metric}: {m}"),
            ReportError::Stats(e) => e.fmt(f),
        }
    }
}

impl<K: fmt::Debug> core::error::Error for ReportError<K> {}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn close(a: Option<f64>, b: f64) -> bool {
        a.is_some_and(|a| (a - b).abs() <= 1e-3)
    }

    #[test]
    fn confusion_examples() {
        let labels: BTreeMap<u32, bool> = (0..100).map(|k| (k, k < 10)).collect();
        assert_eq!(confusion(&labels, &labels).unwrap(), ConfusionCounts::new(10, 90, 0, 0));
        let inverted: BTreeMap<u32, bool> = labels.iter().map(|(k, v)| (*k, !v)).collect();
        let c = confusion(&inverted, &labels).unwrap();
        assert_eq!((c.tp, c.tn), (0, 0));
        let labels: BTreeMap<u32, bool> = (0..29569).map(|k| (k, k < 4263)).collect();
        let none: BTreeMap<u32, bool> = labels.keys().map(|k| (*k, false)).collect();
        assert_eq!(confusion(&none, &labels).unwrap(), ConfusionCounts::new(0, 25306, 0, 4263));
    }

    #[test]
    fn unlabeled_flags_ignored_and_missing_listed() {
        let labels: BTreeMap<u32, bool> = [(1, true), (2, false), (3, true)].into_iter().collect();
        let flags: BTreeMap<u32, bool> = [(1, true), (2, true), (9, true)].into_iter().collect();
        let err = confusion(&flags, &labels).unwrap_err();
        assert_eq!(err.keys, vec![3]);
        let flags: BTreeMap<u32, bool> = [(1, true), (2, true), (3, false), (9, true)].into_iter().collect();
        assert_eq!(confusion(&flags, &labels).unwrap(), ConfusionCounts::new(1, 0, 1, 1));
    }

    #[test]
    fn table_column_rho2() {
        let s = statistics(&ConfusionCounts::new(2149, 21475, 3831, 2114)).unwrap();
        assert!(close(Some(s.acc), 0.799));
        assert!(close(s.tpr, 0.504));
        assert!(close(s.pre, 0.359));
        assert!(close(s.cok, 0.302));
        assert!(close(s.f1s, 0.419));
        assert!(close(Some(s.mcc_normalized), 0.654));
        assert!((s.mcc_raw - 0.308).abs() < 1e-3);
    }

    #[test]
    fn table_column_ttc() {
        let s = statistics(&ConfusionCounts::new(605, 23626, 1680, 3658)).unwrap();
        assert!(close(Some(s.acc), 0.819));
        assert!(close(s.tpr, 0.142));
        assert!(close(s.fpr, 0.066));
    }

    #[test]
    fn perfect_classifier() {
        let s = statistics(&ConfusionCounts::new(7, 93, 0, 0)).unwrap();
        assert_eq!(s.acc, 1.0);
        assert_eq!(s.cok, Some(1.0));
        assert_eq!(s.f1s, Some(1.0));
        assert_eq!(s.mcc_normalized, 1.0);
    }

    #[test]
    fn degenerate_counts() {
        assert_eq!(statistics(&ConfusionCounts::default()), Err(Error::EmptyCounts));
        // all-negative predictor on all-negative data
        let s = statistics(&ConfusionCounts::new(0, 50, 0, 0)).unwrap();
        assert_eq!(s.tpr, None);
        assert_eq!(s.pre, None);
        assert_eq!(s.fnr, None);
        assert_eq!(s.f1s, None);
        assert_eq!(s.cok, None);
        assert_eq!(s.mcc_normalized, 0.5);
        // single-class predictor on mixed data
        let s = statistics(&ConfusionCounts::new(0, 80, 0, 20)).unwrap();
        assert_eq!(s.mcc_normalized, 0.5);
        assert_eq!(s.pre, None);
        assert_eq!(s.cok, Some(0.0));
    }

    #[test]
    fn annotations_mark_ties() {
        let c = ConfusionCounts::new(10, 80, 5, 5);
        let r = TableReport::from_counts([("a".to_string(), c), ("b".to_string(), c)]).unwrap();
        for (row, stat) in Statistic::ALL.iter().enumerate() {
            assert_eq!(r.annotations[row], vec![Annotation { best: true, worst: true }; 2], "{stat:?}");
        }
        let r = TableReport::from_counts([
            ("a".to_string(), ConfusionCounts::new(10, 80, 5, 5)),
            ("b".to_string(), ConfusionCounts::new(5, 80, 5, 10)),
        ])
        .unwrap();
        assert_eq!(r.annotation(Statistic::Fn, 0), Annotation { best: true, worst: false });
        assert_eq!(r.annotation(Statistic::Fn, 1), Annotation { best: false, worst: true });
        assert_eq!(r.annotation(Statistic::Tn, 1), Annotation { best: true, worst: true });
    }

    #[test]
    fn report_errors() {
        let labels: BTreeMap<u32, bool> = [(1, true)].into_iter().collect();
        assert!(matches!(table_report::<u32>(&[], &labels), Err(ReportError::NoMetrics)));
        let flags = vec![("m".to_string(), BTreeMap::new())];
        assert!(matches!(table_report(&flags, &labels), Err(ReportError::MissingPredictions(..))));
    }
}
