//! Path length, radius of gyration, and the error ratios used to score a fill.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::NeumaierSum;
use crate::trajectory::{GappedTrajectory, Point2, Trajectory};

/// Sum of consecutive Euclidean distances.
pub fn path_length(traj: &Trajectory) -> f64 {
    polyline_length(traj.points().iter().map(|p| p.pos()))
}

fn polyline_length(positions: impl Iterator<Item = Point2>) -> f64 {
    let mut sum = NeumaierSum::default();
    let mut prev: Option<Point2> = None;
    for p in positions {
        if let Some(q) = prev {
            sum.add(p.distance(q));
        }
        prev = Some(p);
    }
    sum.total()
}

pub fn centroid(traj: &Trajectory) -> Point2 {
    let (mut sx, mut sy) = (NeumaierSum::default(), NeumaierSum::default());
    for p in traj.points() {
        sx.add(p.x);
        sy.add(p.y);
    }
    let n = traj.len() as f64;
    Point2::new(sx.total() / n, sy.total() / n)
}

/// Root-mean-square distance to the centroid, uniformly weighted over all points.
pub fn radius_of_gyration(traj: &Trajectory) -> f64 {
    let c = centroid(traj);
    let mut sum = NeumaierSum::default();
    for p in traj.points() {
        sum.add((p.pos() - c).norm_sq());
    }
    (sum.total() / traj.len() as f64).sqrt()
}

/// What an estimated path length is compared against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthBasis {
    /// The deleted stretch, anchor to anchor.
    #[default]
    GapSegment,
    /// The whole trajectory, with observed pieces counted exactly.
    WholePath,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapMetrics {
    pub true_segment_length: f64,
    pub estimated_length: f64,
    pub length_ratio: f64,
    pub rog_before: f64,
    pub rog_after: f64,
    /// `rog_after / rog_before`.
    pub rog_error: f64,
}

fn ratio(est: f64, truth: f64) -> f64 {
    if truth == 0.0 && est == 0.0 {
        1.0
    } else {
        est / truth
    }
}

/// Scores `filled` against the complete `original`.
///
/// `estimated_length` replaces the measured length of the filled gap segment
/// (e.g. with a closed-form expectation). Lengths run from the left to the
/// right anchor inclusive.
pub fn gap_metrics(
    original: &Trajectory,
    gapped: &GappedTrajectory,
    filled: &Trajectory,
    estimated_length: Option<f64>,
) -> Result<GapMetrics> {
    gap_metrics_with(
        original,
        gapped,
        filled,
        estimated_length,
        LengthBasis::GapSegment,
    )
}

pub fn gap_metrics_with(
    original: &Trajectory,
    gapped: &GappedTrajectory,
    filled: &Trajectory,
    estimated_length: Option<f64>,
    basis: LengthBasis,
) -> Result<GapMetrics> {
    if original.len() != filled.len() || original.times().zip(filled.times()).any(|(a, b)| a != b) {
        return Err(Error::TimeMismatch(
            "original and filled trajectories have different timestamps".into(),
        ));
    }
    let left = gapped.before().len() - 1;
    let right = left + gapped.segment_count();
    if right >= original.len() || original.points()[left].t != gapped.left_anchor().t {
        return Err(Error::TimeMismatch(
            "gap anchors do not line up with the original trajectory".into(),
        ));
    }
    let segment =
        |t: &Trajectory| polyline_length(t.points()[left..=right].iter().map(|p| p.pos()));
    let true_gap = segment(original);
    let est_gap = estimated_length.unwrap_or_else(|| segment(filled));

    let (true_segment_length, estimated_length) = match basis {
        LengthBasis::GapSegment => (true_gap, est_gap),
        LengthBasis::WholePath => {
            let observed = path_length(gapped.before()) + path_length(gapped.after());
            (observed + true_gap, observed + est_gap)
        }
    };
    let rog_before = radius_of_gyration(original);
    let rog_after = radius_of_gyration(filled);
    Ok(GapMetrics {
        true_segment_length,
        estimated_length,
        length_ratio: ratio(estimated_length, true_segment_length),
        rog_before,
        rog_after,
        rog_error: ratio(rog_after, rog_before),
    })
}
