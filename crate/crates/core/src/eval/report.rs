use std::fmt::Write;

use crate::eval::Polarity;
use crate::metric::MetricId;

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationRow {
    pub metric: MetricId,
    pub srcc: f64,
    pub krcc: f64,
    pub plcc: f64,
    /// Records that contributed a score.
    pub n: usize,
    /// Records that were logged and left out.
    pub skipped: usize,
    /// Total wall time spent inside the metric.
    pub seconds: f64,
}

/// Per-metric agreement with subjective scores, sorted by metric name.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationReport {
    pub rows: Vec<CorrelationRow>,
    pub polarity: Polarity,
}

impl CorrelationReport {
    pub fn row(&self, metric: MetricId) -> Option<&CorrelationRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }

    /// `metric,srcc,krcc,plcc,n,seconds`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,srcc,krcc,plcc,n,seconds\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.metric, r.srcc, r.krcc, r.plcc, r.n, r.seconds
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:<10} {:>7} {:>7} {:>7} {:>6} {:>7} {:>9}\n",
            "metric", "SRCC", "KRCC", "PLCC", "n", "skipped", "seconds"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<10} {:>7.4} {:>7.4} {:>7.4} {:>6} {:>7} {:>9.3}",
                r.metric.name(),
                r.srcc,
                r.krcc,
                r.plcc,
                r.n,
                r.skipped,
                r.seconds
            );
        }
        let _ = writeln!(out, "subjective scores: {}", self.polarity);
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub metric: MetricId,
    pub seconds_mean: f64,
    pub seconds_median: f64,
    pub seconds_min: f64,
    pub repetitions: usize,
    pub pairs: usize,
    /// Absent when the scores admit no rank correlation.
    pub srcc: Option<f64>,
}

/// Per-pair timings joined with SRCC, sorted by metric name.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, metric: MetricId) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }

    /// `metric,seconds_median,srcc`; an undefined SRCC is an empty field.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,seconds_median,srcc\n");
        for r in &self.rows {
            let srcc = r.srcc.map(|s| s.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{}", r.metric, r.seconds_median, srcc);
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:<10} {:>12} {:>12} {:>12} {:>5} {:>7}\n",
            "metric", "median [ms]", "mean [ms]", "min [ms]", "reps", "SRCC"
        );
        for r in &self.rows {
            let srcc = r
                .srcc
                .map(|s| format!("{s:.4}"))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:<10} {:>12.3} {:>12.3} {:>12.3} {:>5} {:>7}",
                r.metric.name(),
                r.seconds_median * 1e3,
                r.seconds_mean * 1e3,
                r.seconds_min * 1e3,
                r.repetitions,
                srcc
            );
        }
        out
    }
}
