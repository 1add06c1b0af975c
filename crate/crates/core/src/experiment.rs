//! Batch experiments: many synthetic paths, a gap cut into each, filled by
//! bridge and by straight line, scored by path length or radius of gyration.
//!
//! Replicates run in parallel. Replicate `r` of grid value `j` of model group
//! `i` draws its path from `derive_seed(master_seed, &[i, j, r])` and its
//! bridge fill from a child of that seed, so reports do not depend on
//! scheduling.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::SearchConfig;
use crate::gapfill::{
    estimate_gap_length, estimate_gap_rog, estimate_gap_sigma, fill_bridge, fill_linear,
};
use crate::generators::ModelSpec;
use crate::metrics::{gap_metrics_with, LengthBasis};
use crate::seed::derive_seed;
use crate::stats::{mean, Summary};
use crate::trajectory::{excise_gap, splice_fill, Source};

pub const ARTIFACT: &str = "bbgap";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Score by estimated / true gap path length.
    PathLength,
    /// Score by RoG(filled) / RoG(original).
    Rog,
}

/// One model swept over a single parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelGrid {
    pub model: String,
    /// Swept parameter name.
    pub param: String,
    pub values: Vec<f64>,
    /// Parameters held fixed across the sweep.
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
}

impl ModelGrid {
    pub fn new(model: &str, param: &str, values: &[f64]) -> Self {
        Self {
            model: model.into(),
            param: param.into(),
            values: values.to_vec(),
            fixed: BTreeMap::new(),
        }
    }

    pub fn specs(&self) -> Result<Vec<ModelSpec>> {
        if self.values.is_empty() {
            return Err(Error::Config(format!(
                "empty parameter grid for {}",
                self.model
            )));
        }
        self.values
            .iter()
            .map(|&v| {
                let mut params: Vec<(String, f64)> =
                    self.fixed.iter().map(|(k, v)| (k.clone(), *v)).collect();
                params.push((self.param.clone(), v));
                ModelSpec::from_params(&self.model, &params)
            })
            .collect()
    }
}

/// Points `start .. start + count` are deleted; both neighbours stay as anchors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapSpec {
    pub start: usize,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub records: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub models: Vec<ModelGrid>,
    /// Points per generated path (steps + 1).
    pub points: usize,
    pub gap: GapSpec,
    pub replicates: usize,
    pub master_seed: u64,
    /// Bridge draws averaged per replicate in the RoG experiment.
    #[serde(default = "one")]
    pub realisations: usize,
    #[serde(default)]
    pub length_basis: LengthBasis,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub outputs: OutputPaths,
}

impl ExperimentConfig {
    /// 200-point paths with the middle 100 points removed.
    pub fn path_length_default() -> Self {
        Self {
            kind: ExperimentKind::PathLength,
            models: vec![
                ModelGrid::new("discrete-bm", "sigma", &[0.01, 0.1, 1.0, 10.0]),
                ModelGrid::new("angular-rw", "sigma", &[0.1, 0.5, 1.0, 5.0]),
                ModelGrid::new("internal-state", "s", &[0.0, 0.33, 0.66, 1.0]),
                ModelGrid::new("run-tumble", "l", &[0.1, 0.5, 1.0, 3.0]),
            ],
            points: 200,
            gap: GapSpec {
                start: 50,
                count: 100,
            },
            replicates: 1000,
            master_seed: 20_240_101,
            realisations: 1,
            length_basis: LengthBasis::GapSegment,
            search: SearchConfig::default(),
            outputs: OutputPaths::default(),
        }
    }

    /// 1000-point paths; everything after the first point of the first half is removed.
    pub fn rog_default() -> Self {
        Self {
            kind: ExperimentKind::Rog,
            models: vec![
                ModelGrid::new("fixed-velocity", "v", &[1.0]),
                ModelGrid::new("angular-rw", "sigma", &[0.1]),
                ModelGrid::new("run-tumble", "l", &[1.0]),
            ],
            points: 1000,
            gap: GapSpec {
                start: 1,
                count: 499,
            },
            replicates: 1000,
            master_seed: 20_240_102,
            realisations: 1,
            length_basis: LengthBasis::GapSegment,
            search: SearchConfig::default(),
            outputs: OutputPaths::default(),
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "path-length" => Ok(Self::path_length_default()),
            "rog" => Ok(Self::rog_default()),
            other => Err(Error::Config(format!(
                "unknown experiment preset {other:?} (expected path-length or rog)"
            ))),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be >= 1".into()));
        }
        if self.realisations == 0 {
            return Err(Error::Config("realisations must be >= 1".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Config("no models configured".into()));
        }
        if self.gap.start < 1 || self.gap.start + self.gap.count + 1 > self.points {
            return Err(Error::Config(format!(
                "gap {}+{} does not leave both anchors inside {} points",
                self.gap.start, self.gap.count, self.points
            )));
        }
        self.search.validate()?;
        for grid in &self.models {
            grid.specs().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// Records the run will produce.
    pub fn record_count(&self) -> usize {
        let choices: usize = self.models.iter().map(|m| m.values.len()).sum();
        choices * self.replicates * 2
    }
}

/// One (replicate, method) outcome.
///
/// `reference` and `estimate` are the true and estimated gap lengths in the
/// path-length experiment, and RoG of the original and filled paths in the
/// RoG experiment; `ratio` is `estimate / reference`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub model: String,
    pub params: String,
    pub replicate: usize,
    pub seed: u64,
    pub method: Source,
    pub sigma_hat: f64,
    pub sigma_clamped: bool,
    pub reference: f64,
    pub estimate: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    /// Ratio rounded to one decimal place.
    pub value: f64,
    pub count: usize,
}

/// Aggregate over all replicates of one (model, parameters, method).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub model: String,
    pub params: String,
    pub method: Source,
    pub replicates: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_rog_before: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_rog_after: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_true_length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_estimated_length: Option<f64>,
    pub mean_sigma_hat: f64,
    pub mean_error: f64,
    pub std_dev: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub outliers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Vec<HistogramBin>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub artifact: String,
    pub version: String,
    pub kind: ExperimentKind,
    pub master_seed: u64,
    pub record_count: usize,
    pub config: ExperimentConfig,
    pub rows: Vec<SummaryRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<Record>,
    pub summary: ReportSummary,
}

struct Job {
    group: usize,
    choice: usize,
    spec: ModelSpec,
}

fn run_replicate(cfg: &ExperimentConfig, job: &Job, replicate: usize) -> Result<[Record; 2]> {
    let seed = derive_seed(
        cfg.master_seed,
        &[job.group as u64, job.choice as u64, replicate as u64],
    );
    let original = crate::generators::generate(&job.spec, cfg.points - 1, seed)?;
    let gapped = excise_gap(&original, cfg.gap.start, cfg.gap.count)?;
    let sigma = estimate_gap_sigma(&gapped, &cfg.search)?;
    let fill_seed = derive_seed(seed, &[1]);

    let bridge = splice_fill(
        &gapped,
        &fill_bridge(&gapped, sigma.sigma_m, fill_seed)?,
        Source::Bridge,
    )?;
    let linear = splice_fill(&gapped, &fill_linear(&gapped), Source::Linear)?;

    let scores = match cfg.kind {
        ExperimentKind::PathLength => {
            let closed = estimate_gap_length(&gapped, sigma.sigma_m);
            let b = gap_metrics_with(
                &original,
                &gapped,
                bridge.trajectory(),
                Some(closed),
                cfg.length_basis,
            )?;
            let l = gap_metrics_with(
                &original,
                &gapped,
                linear.trajectory(),
                None,
                cfg.length_basis,
            )?;
            [
                (b.true_segment_length, b.estimated_length, b.length_ratio),
                (l.true_segment_length, l.estimated_length, l.length_ratio),
            ]
        }
        ExperimentKind::Rog => {
            let mut b = gap_metrics_with(
                &original,
                &gapped,
                bridge.trajectory(),
                None,
                cfg.length_basis,
            )?;
            if cfg.realisations > 1 {
                b.rog_after =
                    estimate_gap_rog(&gapped, sigma.sigma_m, cfg.realisations, fill_seed)?.mean;
                b.rog_error = b.rog_after / b.rog_before;
            }
            let l = gap_metrics_with(
                &original,
                &gapped,
                linear.trajectory(),
                None,
                cfg.length_basis,
            )?;
            [
                (b.rog_before, b.rog_after, b.rog_error),
                (l.rog_before, l.rog_after, l.rog_error),
            ]
        }
    };
    let record = |method: Source, (reference, estimate, ratio): (f64, f64, f64)| Record {
        model: job.spec.name().to_string(),
        params: job.spec.param_string(),
        replicate,
        seed,
        method,
        sigma_hat: sigma.sigma_m,
        sigma_clamped: sigma.clamped,
        reference,
        estimate,
        ratio,
    };
    Ok([
        record(Source::Bridge, scores[0]),
        record(Source::Linear, scores[1]),
    ])
}

fn histogram(values: &[f64]) -> Vec<HistogramBin> {
    let mut bins: BTreeMap<i64, usize> = BTreeMap::new();
    for v in values {
        *bins.entry((v * 10.0).round() as i64).or_default() += 1;
    }
    bins.into_iter()
        .map(|(k, count)| HistogramBin {
            value: k as f64 / 10.0,
            count,
        })
        .collect()
}

fn summarise(kind: ExperimentKind, records: &[Record]) -> SummaryRow {
    let first = &records[0];
    let ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
    let reference = mean(&records.iter().map(|r| r.reference).collect::<Vec<_>>());
    let estimate = mean(&records.iter().map(|r| r.estimate).collect::<Vec<_>>());
    let s = Summary::of(&ratios).expect("at least one replicate");
    let rog = kind == ExperimentKind::Rog;
    SummaryRow {
        model: first.model.clone(),
        params: first.params.clone(),
        method: first.method,
        replicates: records.len(),
        mean_rog_before: rog.then_some(reference),
        mean_rog_after: rog.then_some(estimate),
        mean_true_length: (!rog).then_some(reference),
        mean_estimated_length: (!rog).then_some(estimate),
        mean_sigma_hat: mean(&records.iter().map(|r| r.sigma_hat).collect::<Vec<_>>()),
        mean_error: s.mean,
        std_dev: s.std_dev,
        min: s.min,
        q1: s.q1,
        median: s.median,
        q3: s.q3,
        max: s.max,
        outliers: s.outliers,
        histogram: rog.then(|| histogram(&ratios)),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut jobs = Vec::new();
    for (group, grid) in cfg.models.iter().enumerate() {
        for (choice, spec) in grid.specs()?.into_iter().enumerate() {
            jobs.push(Job {
                group,
                choice,
                spec,
            });
        }
    }

    let per_job: Vec<Vec<[Record; 2]>> = jobs
        .iter()
        .map(|job| {
            (0..cfg.replicates)
                .into_par_iter()
                .map(|r| run_replicate(cfg, job, r))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(cfg.record_count());
    let mut rows = Vec::with_capacity(jobs.len() * 2);
    for reps in per_job {
        let (bridge, linear): (Vec<Record>, Vec<Record>) =
            reps.into_iter().map(|[b, l]| (b, l)).unzip();
        rows.push(summarise(cfg.kind, &bridge));
        rows.push(summarise(cfg.kind, &linear));
        for (b, l) in bridge.into_iter().zip(linear) {
            records.push(b);
            records.push(l);
        }
    }

    let summary = ReportSummary {
        artifact: ARTIFACT.into(),
        version: VERSION.into(),
        kind: cfg.kind,
        master_seed: cfg.master_seed,
        record_count: records.len(),
        config: cfg.clone(),
        rows,
    };
    Ok(ExperimentReport { records, summary })
}

impl ExperimentReport {
    pub fn rows_for<'a>(
        &'a self,
        model: &'a str,
        method: Source,
    ) -> impl Iterator<Item = &'a SummaryRow> + 'a {
        self.summary
            .rows
            .iter()
            .filter(move |r| r.model == model && r.method == method)
    }

    pub fn write_records<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_summary<W: Write>(&self, mut writer: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut writer, &self.summary)?;
        writer.write_all(b"\n")?;
        Ok(())
    }

    pub fn write_files(&self, records: &Path, summary: &Path) -> Result<()> {
        self.write_records(BufWriter::new(File::create(records)?))?;
        let mut w = BufWriter::new(File::create(summary)?);
        self.write_summary(&mut w)?;
        w.flush()?;
        Ok(())
    }
}
