//! Time-stamped planar trajectories, gap excision and splicing.
//!
//! A [`Trajectory`] is an immutable, validated sequence of [`TimedPoint`]s
//! with strictly increasing timestamps. A [`GappedTrajectory`] is the same
//! path with a contiguous run of points removed; the last point before and
//! the first point after the hole are the gap's anchors.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A position (or displacement) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Point at fraction `frac` of the way from `self` to `other`.
    pub fn lerp(self, other: Point2, frac: f64) -> Point2 {
        self + (other - self) * frac
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

/// A location observed at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimedPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

impl TimedPoint {
    pub const fn new(t: f64, x: f64, y: f64) -> Self {
        Self { t, x, y }
    }

    pub fn at(t: f64, pos: Point2) -> Self {
        Self::new(t, pos.x, pos.y)
    }

    pub fn pos(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

fn validate(points: &[TimedPoint]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Empty);
    }
    for (index, p) in points.iter().enumerate() {
        if !(p.t.is_finite() && p.x.is_finite() && p.y.is_finite()) {
            return Err(Error::NonFinite { index });
        }
    }
    for (i, w) in points.windows(2).enumerate() {
        if w[1].t <= w[0].t {
            return Err(Error::NonMonotonicTime {
                index: i + 1,
                prev: w[0].t,
                next: w[1].t,
            });
        }
    }
    Ok(())
}

/// A non-empty path with strictly increasing timestamps and finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    points: Vec<TimedPoint>,
}

impl Trajectory {
    pub fn new(points: Vec<TimedPoint>) -> Result<Self> {
        validate(&points)?;
        Ok(Self { points })
    }

    /// Builds a trajectory from `(t, x, y)` rows, preserving their order.
    pub fn from_rows<I>(rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64, f64)>,
    {
        Self::new(
            rows.into_iter()
                .map(|(t, x, y)| TimedPoint::new(t, x, y))
                .collect(),
        )
    }

    /// Unit-spaced trajectory `t = 0, 1, 2, ...` through the given positions.
    pub fn from_positions<I>(positions: I) -> Result<Self>
    where
        I: IntoIterator<Item = Point2>,
    {
        Self::new(
            positions
                .into_iter()
                .enumerate()
                .map(|(i, p)| TimedPoint::at(i as f64, p))
                .collect(),
        )
    }

    pub fn points(&self) -> &[TimedPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> &TimedPoint {
        &self.points[0]
    }

    pub fn last(&self) -> &TimedPoint {
        &self.points[self.points.len() - 1]
    }

    pub fn positions(&self) -> impl Iterator<Item = Point2> + '_ {
        self.points.iter().map(TimedPoint::pos)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.t)
    }

    /// Sub-trajectory `points[start..end]`.
    pub fn slice(&self, start: usize, end: usize) -> Result<Trajectory> {
        if start >= end || end > self.len() {
            return Err(Error::OutOfRange(format!(
                "slice {start}..{end} of a {}-point trajectory",
                self.len()
            )));
        }
        Ok(Trajectory {
            points: self.points[start..end].to_vec(),
        })
    }

    pub fn into_points(self) -> Vec<TimedPoint> {
        self.points
    }
}

/// Validates `rows` as a trajectory.
pub fn build_trajectory(rows: &[(f64, f64, f64)]) -> Result<Trajectory> {
    Trajectory::from_rows(rows.iter().copied())
}

/// Observed data on both sides of one contiguous run of missing points.
#[derive(Debug, Clone, PartialEq)]
pub struct GappedTrajectory {
    before: Trajectory,
    after: Trajectory,
    missing_times: Vec<f64>,
}

impl GappedTrajectory {
    pub fn new(before: Trajectory, after: Trajectory, missing_times: Vec<f64>) -> Result<Self> {
        let (lo, hi) = (before.last().t, after.first().t);
        if lo >= hi {
            return Err(Error::OutOfRange(format!(
                "left anchor t={lo} is not before right anchor t={hi}"
            )));
        }
        let mut prev = lo;
        for &t in &missing_times {
            if !(t > prev && t < hi) {
                return Err(Error::OutOfRange(format!(
                    "missing time {t} is not strictly increasing inside ({lo}, {hi})"
                )));
            }
            prev = t;
        }
        Ok(Self {
            before,
            after,
            missing_times,
        })
    }

    pub fn before(&self) -> &Trajectory {
        &self.before
    }

    pub fn after(&self) -> &Trajectory {
        &self.after
    }

    pub fn missing_times(&self) -> &[f64] {
        &self.missing_times
    }

    pub fn left_anchor(&self) -> &TimedPoint {
        self.before.last()
    }

    pub fn right_anchor(&self) -> &TimedPoint {
        self.after.first()
    }

    /// Time between the anchors.
    pub fn duration(&self) -> f64 {
        self.right_anchor().t - self.left_anchor().t
    }

    /// Displacement from the left to the right anchor.
    pub fn displacement(&self) -> Point2 {
        self.right_anchor().pos() - self.left_anchor().pos()
    }

    /// Number of straight segments a one-point-per-missing-time fill produces.
    pub fn segment_count(&self) -> usize {
        self.missing_times.len() + 1
    }

    /// The observed pieces, in time order.
    pub fn observed_segments(&self) -> [&Trajectory; 2] {
        [&self.before, &self.after]
    }

    /// Observed points only (the gap closed up).
    pub fn observed(&self) -> Trajectory {
        let mut points = self.before.points.clone();
        points.extend_from_slice(&self.after.points);
        Trajectory { points }
    }
}

/// Removes `count` points starting at `from_index`, keeping both anchors.
pub fn excise_gap(traj: &Trajectory, from_index: usize, count: usize) -> Result<GappedTrajectory> {
    let len = traj.len();
    if from_index < 1 || from_index + count > len.saturating_sub(1) {
        return Err(Error::OutOfRange(format!(
            "removing {count} points from index {from_index} of a {len}-point trajectory would drop an anchor"
        )));
    }
    let pts = traj.points();
    let before = Trajectory {
        points: pts[..from_index].to_vec(),
    };
    let after = Trajectory {
        points: pts[from_index + count..].to_vec(),
    };
    let missing_times = pts[from_index..from_index + count]
        .iter()
        .map(|p| p.t)
        .collect();
    Ok(GappedTrajectory {
        before,
        after,
        missing_times,
    })
}

/// Where a point of a filled trajectory came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Observed,
    Bridge,
    Linear,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Observed => "observed",
            Source::Bridge => "bridge",
            Source::Linear => "linear",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "observed" => Ok(Source::Observed),
            "bridge" => Ok(Source::Bridge),
            "linear" => Ok(Source::Linear),
            other => Err(Error::Parse(format!(
                "unknown source {other:?} (expected observed, bridge or linear)"
            ))),
        }
    }
}

/// A trajectory whose points carry provenance labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FilledTrajectory {
    trajectory: Trajectory,
    sources: Vec<Source>,
}

impl FilledTrajectory {
    pub fn new(trajectory: Trajectory, sources: Vec<Source>) -> Result<Self> {
        if sources.len() != trajectory.len() {
            return Err(Error::Parse(format!(
                "{} provenance labels for {} points",
                sources.len(),
                trajectory.len()
            )));
        }
        Ok(Self {
            trajectory,
            sources,
        })
    }

    /// Every point labelled as observed.
    pub fn observed(trajectory: Trajectory) -> Self {
        let sources = vec![Source::Observed; trajectory.len()];
        Self {
            trajectory,
            sources,
        }
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    pub fn sources(&self) -> &[Source] {
        &self.sources
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TimedPoint, Source)> {
        self.trajectory
            .points()
            .iter()
            .zip(self.sources.iter().copied())
    }

    pub fn into_trajectory(self) -> Trajectory {
        self.trajectory
    }
}

/// Merges `fill` into the hole of `gapped`, labelling filled points `source`.
pub fn splice_fill(
    gapped: &GappedTrajectory,
    fill: &[TimedPoint],
    source: Source,
) -> Result<FilledTrajectory> {
    if fill.len() != gapped.missing_times.len() {
        return Err(Error::TimeMismatch(format!(
            "{} fill points for {} missing times",
            fill.len(),
            gapped.missing_times.len()
        )));
    }
    for (p, &t) in fill.iter().zip(&gapped.missing_times) {
        if p.t != t {
            return Err(Error::TimeMismatch(format!(
                "fill point at t={} where t={t} is missing",
                p.t
            )));
        }
        if !p.pos().is_finite() {
            return Err(Error::Domain(format!("non-finite fill point at t={t}")));
        }
    }
    let n = gapped.before.len() + fill.len() + gapped.after.len();
    let mut points = Vec::with_capacity(n);
    let mut sources = Vec::with_capacity(n);
    points.extend_from_slice(&gapped.before.points);
    sources.resize(gapped.before.len(), Source::Observed);
    points.extend_from_slice(fill);
    sources.resize(sources.len() + fill.len(), source);
    points.extend_from_slice(&gapped.after.points);
    sources.resize(n, Source::Observed);
    Ok(FilledTrajectory {
        trajectory: Trajectory { points },
        sources,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_path(n: usize) -> Trajectory {
        Trajectory::from_positions((0..n).map(|i| Point2::new(i as f64, (i * i % 7) as f64)))
            .unwrap()
    }

    #[test]
    fn single_point_is_valid() {
        let t = build_trajectory(&[(0.0, 0.0, 0.0)]).unwrap();
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn duplicate_timestamp_rejected() {
        let err = build_trajectory(&[(0.0, 0.0, 0.0), (1.0, 1.0, 0.0), (1.0, 2.0, 0.0)]);
        assert!(matches!(err, Err(Error::NonMonotonicTime { index: 2, .. })));
    }

    #[test]
    fn non_finite_rejected() {
        let err = build_trajectory(&[(0.0, 0.0, 0.0), (1.0, f64::NAN, 0.0)]);
        assert!(matches!(err, Err(Error::NonFinite { index: 1 })));
        let err = build_trajectory(&[(f64::INFINITY, 0.0, 0.0)]);
        assert!(matches!(err, Err(Error::NonFinite { index: 0 })));
        assert!(matches!(build_trajectory(&[]), Err(Error::Empty)));
    }

    #[test]
    fn excise_middle_hundred() {
        let traj = unit_path(200);
        let g = excise_gap(&traj, 50, 100).unwrap();
        assert_eq!(g.before().len(), 50);
        assert_eq!(g.after().len(), 50);
        let expected: Vec<f64> = (50..150).map(|i| i as f64).collect();
        assert_eq!(g.missing_times(), expected.as_slice());
        assert_eq!(g.left_anchor().t, 49.0);
        assert_eq!(g.right_anchor().t, 150.0);
        assert_eq!(g.segment_count(), 101);
    }

    #[test]
    fn excise_first_half_keeps_origin() {
        let traj = unit_path(1000);
        let g = excise_gap(&traj, 1, 499).unwrap();
        assert_eq!(g.before().len(), 1);
        assert_eq!(g.before().first().t, 0.0);
        assert_eq!(g.after().first().t, 500.0);
        assert_eq!(g.after().len(), 500);
    }

    #[test]
    fn excise_zero_count_is_noop() {
        let traj = unit_path(10);
        let g = excise_gap(&traj, 4, 0).unwrap();
        assert!(g.missing_times().is_empty());
        assert_eq!(g.observed(), traj);
        let back = splice_fill(&g, &[], Source::Linear).unwrap();
        assert_eq!(back.trajectory(), &traj);
    }

    #[test]
    fn excise_rejects_anchor_removal() {
        let traj = unit_path(10);
        assert!(matches!(excise_gap(&traj, 0, 3), Err(Error::OutOfRange(_))));
        assert!(matches!(excise_gap(&traj, 5, 5), Err(Error::OutOfRange(_))));
        assert!(excise_gap(&traj, 5, 4).is_ok());
    }

    #[test]
    fn splice_rejects_wrong_time() {
        let traj = unit_path(6);
        let g = excise_gap(&traj, 2, 2).unwrap();
        let fill = [
            TimedPoint::new(2.0, 0.0, 0.0),
            TimedPoint::new(3.5, 0.0, 0.0),
        ];
        assert!(matches!(
            splice_fill(&g, &fill, Source::Bridge),
            Err(Error::TimeMismatch(_))
        ));
        assert!(matches!(
            splice_fill(&g, &fill[..1], Source::Bridge),
            Err(Error::TimeMismatch(_))
        ));
    }

    #[test]
    fn splice_labels_provenance() {
        let traj = unit_path(6);
        let g = excise_gap(&traj, 2, 2).unwrap();
        let removed = &traj.points()[2..4];
        let filled = splice_fill(&g, removed, Source::Bridge).unwrap();
        assert_eq!(filled.trajectory(), &traj);
        use Source::*;
        assert_eq!(
            filled.sources(),
            &[Observed, Observed, Bridge, Bridge, Observed, Observed]
        );
    }

    #[test]
    fn gapped_constructor_checks_window() {
        let before = Trajectory::from_rows([(0.0, 0.0, 0.0)]).unwrap();
        let after = Trajectory::from_rows([(5.0, 1.0, 0.0)]).unwrap();
        assert!(GappedTrajectory::new(before.clone(), after.clone(), vec![1.0, 2.0]).is_ok());
        assert!(GappedTrajectory::new(before.clone(), after.clone(), vec![2.0, 1.0]).is_err());
        assert!(GappedTrajectory::new(before.clone(), after.clone(), vec![5.0]).is_err());
        assert!(GappedTrajectory::new(after, before, vec![]).is_err());
    }
}
