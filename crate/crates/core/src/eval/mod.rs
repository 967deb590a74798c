//! Correlation of metric scores with subjective ratings, and timing.

mod correlation;
mod manifest;
mod report;

pub use correlation::{krcc, plcc, rank, srcc, srcc_closed_form, srcc_ranked};
pub use manifest::{DatasetManifest, ManifestRecord, Polarity};
pub use report::{BenchReport, BenchRow, CorrelationReport, CorrelationRow};

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{IqaError, Result};
use crate::image::{load_image, Image};
use crate::metric::{MetricContext, MetricId};

/// Largest fraction of records that may be skipped before a run is rejected.
pub const MAX_SKIP_FRACTION: f64 = 0.10;

struct Loaded {
    index: usize,
    reference: Option<Image>,
    distorted: Image,
}

fn load_record(index: usize, manifest: &DatasetManifest) -> Result<Loaded> {
    let record = &manifest.records[index];
    let reference = record.reference.as_ref().map(load_image).transpose()?;
    Ok(Loaded {
        index,
        reference,
        distorted: load_image(&record.dist)?,
    })
}

fn check_metrics(metrics: &[MetricId]) -> Result<Vec<MetricId>> {
    if metrics.is_empty() {
        return Err(IqaError::InvalidArgument("the metric list is empty".into()));
    }
    let mut unique = metrics.to_vec();
    unique.sort_by_key(|m| m.name());
    unique.dedup();
    Ok(unique)
}

fn check_skips(what: &str, skipped: usize, total: usize) -> Result<()> {
    if skipped as f64 > MAX_SKIP_FRACTION * total as f64 {
        return Err(IqaError::DataIntegrity(format!(
            "{what}: {skipped} of {total} records skipped (limit {:.0}%)",
            MAX_SKIP_FRACTION * 100.0
        )));
    }
    Ok(())
}

/// Oriented correlations between metric scores and subjective scores.
///
/// Both axes are flipped to higher-is-better first, so a metric that agrees
/// with the observers gets positive coefficients regardless of conventions.
fn correlate(
    metric: MetricId,
    scores: &[f64],
    subjective: &[f64],
    polarity: Polarity,
) -> Result<(f64, f64, f64)> {
    let s = if metric.higher_is_better() { 1.0 } else { -1.0 };
    let x: Vec<f64> = scores.iter().map(|v| s * v).collect();
    let y: Vec<f64> = subjective.iter().map(|v| polarity.sign() * v).collect();
    Ok((srcc(&x, &y)?, krcc(&x, &y)?, plcc(&x, &y)?))
}

struct Observation {
    score: Result<f64>,
    seconds: f64,
}

/// Scores every record with every metric and correlates against the
/// subjective scores.
///
/// Records are scored on a pool of `jobs` threads; the result does not depend
/// on `jobs` apart from the timing columns. A record whose images fail to
/// load, or on which a metric fails, is logged and counted as skipped for
/// that metric. More than [`MAX_SKIP_FRACTION`] skipped records is an error.
pub fn evaluate(
    manifest: &DatasetManifest,
    metrics: &[MetricId],
    ctx: &MetricContext,
    jobs: usize,
) -> Result<CorrelationReport> {
    let metrics = check_metrics(metrics)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| IqaError::InvalidArgument(format!("thread pool: {e}")))?;

    let per_record: Vec<Option<Vec<Observation>>> = pool.install(|| {
        (0..manifest.len())
            .into_par_iter()
            .map(|i| {
                let loaded = match load_record(i, manifest) {
                    Ok(l) => l,
                    Err(e) => {
                        log::warn!("skipping record {}: {e}", i + 1);
                        return None;
                    }
                };
                let row = metrics
                    .iter()
                    .map(|m| {
                        let start = Instant::now();
                        let score = m.compute(loaded.reference.as_ref(), &loaded.distorted, ctx);
                        Observation {
                            score,
                            seconds: start.elapsed().as_secs_f64(),
                        }
                    })
                    .collect();
                Some(row)
            })
            .collect()
    });

    let load_failures = per_record.iter().filter(|r| r.is_none()).count();
    check_skips("image loading", load_failures, manifest.len())?;

    let mut rows = Vec::with_capacity(metrics.len());
    for (k, &metric) in metrics.iter().enumerate() {
        let mut scores = Vec::new();
        let mut subjective = Vec::new();
        let mut seconds = 0.0;
        let mut skipped = load_failures;
        for (i, row) in per_record.iter().enumerate() {
            let Some(row) = row else { continue };
            let obs = &row[k];
            seconds += obs.seconds;
            match &obs.score {
                Ok(v) if v.is_finite() => {
                    scores.push(*v);
                    subjective.push(manifest.records[i].score);
                }
                Ok(v) => {
                    log::warn!("{metric}: record {} gave non-finite score {v}", i + 1);
                    skipped += 1;
                }
                Err(e) => {
                    log::warn!("{metric}: record {} skipped: {e}", i + 1);
                    skipped += 1;
                }
            }
        }
        check_skips(metric.name(), skipped, manifest.len())?;
        let (srcc, krcc, plcc) = correlate(metric, &scores, &subjective, manifest.polarity)?;
        log::info!(
            "{metric}: srcc={srcc:.4} n={} skipped={skipped}",
            scores.len()
        );
        rows.push(CorrelationRow {
            metric,
            srcc,
            krcc,
            plcc,
            n: scores.len(),
            skipped,
            seconds,
        });
    }
    Ok(CorrelationReport {
        rows,
        polarity: manifest.polarity,
    })
}

/// Times each metric over the manifest's image pairs.
///
/// All images are decoded up front. For every metric the whole set of pairs
/// is scored `warmup` times untimed and then `repetitions` times on the
/// calling thread with a monotonic clock; each timed pass yields one
/// per-pair time. SRCC comes from the scores of the first timed pass.
pub fn bench(
    manifest: &DatasetManifest,
    metrics: &[MetricId],
    ctx: &MetricContext,
    repetitions: usize,
    warmup: usize,
) -> Result<BenchReport> {
    if repetitions < 3 {
        return Err(IqaError::InvalidArgument(format!(
            "bench needs at least 3 repetitions, got {repetitions}"
        )));
    }
    let metrics = check_metrics(metrics)?;
    let mut loaded = Vec::with_capacity(manifest.len());
    for i in 0..manifest.len() {
        match load_record(i, manifest) {
            Ok(l) => loaded.push(l),
            Err(e) => log::warn!("skipping record {}: {e}", i + 1),
        }
    }
    check_skips(
        "image loading",
        manifest.len() - loaded.len(),
        manifest.len(),
    )?;

    let mut rows = Vec::with_capacity(metrics.len());
    for &metric in &metrics {
        let pass = || -> Result<Vec<f64>> {
            loaded
                .iter()
                .map(|l| metric.compute(l.reference.as_ref(), &l.distorted, ctx))
                .collect()
        };
        for _ in 0..warmup {
            pass()?;
        }
        let mut times = Vec::with_capacity(repetitions);
        let mut scores = Vec::new();
        for rep in 0..repetitions {
            let start = Instant::now();
            let s = std::hint::black_box(pass()?);
            times.push(start.elapsed().as_secs_f64() / loaded.len() as f64);
            if rep == 0 {
                scores = s;
            }
        }
        let subjective: Vec<f64> = loaded
            .iter()
            .map(|l| manifest.records[l.index].score)
            .collect();
        let srcc = match correlate(metric, &scores, &subjective, manifest.polarity) {
            Ok((s, _, _)) => Some(s),
            Err(e) => {
                log::warn!("{metric}: no SRCC: {e}");
                None
            }
        };
        let seconds_mean = times.iter().sum::<f64>() / times.len() as f64;
        let seconds_min = times.iter().copied().fold(f64::INFINITY, f64::min);
        rows.push(BenchRow {
            metric,
            seconds_mean,
            seconds_median: crate::stats::median(&mut times),
            seconds_min,
            repetitions,
            pairs: loaded.len(),
            srcc,
        });
    }
    Ok(BenchReport { rows })
}
