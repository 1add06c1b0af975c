//! Filling a gap: estimate `σ_m` from the observed data, then bridge or
//! straight-line interpolation, with closed-form length and Monte-Carlo RoG
//! estimates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bridge::{expected_path_length, sample_bridge, BridgeParams};
use crate::error::{Error, Result};
use crate::estimator::{estimate_sigma_pooled, SearchConfig, SigmaEstimate};
use crate::metrics::radius_of_gyration;
use crate::seed::{derive_seed, rng_from_seed};
use crate::stats::{mean, sample_std};
use crate::trajectory::{splice_fill, FilledTrajectory, GappedTrajectory, Source, TimedPoint};

/// Default number of bridge draws behind a Monte-Carlo RoG estimate.
pub const DEFAULT_REALISATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum FillMethod {
    Linear,
    Bridge {
        realisations: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma_override: Option<f64>,
    },
}

impl FillMethod {
    pub fn bridge() -> Self {
        FillMethod::Bridge {
            realisations: DEFAULT_REALISATIONS,
            sigma_override: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let FillMethod::Bridge {
            realisations,
            sigma_override,
        } = *self
        {
            if realisations == 0 {
                return Err(Error::Config("realisations must be >= 1".into()));
            }
            if let Some(s) = sigma_override {
                if !(s.is_finite() && s >= 0.0) {
                    return Err(Error::Config(format!(
                        "sigma must be finite and >= 0, got {s}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn source(&self) -> Source {
        match self {
            FillMethod::Linear => Source::Linear,
            FillMethod::Bridge { .. } => Source::Bridge,
        }
    }
}

/// Constant-velocity points on the chord between the anchors.
pub fn fill_linear(gapped: &GappedTrajectory) -> Vec<TimedPoint> {
    let (l, r) = (gapped.left_anchor(), gapped.right_anchor());
    let span = gapped.duration();
    gapped
        .missing_times()
        .iter()
        .map(|&t| TimedPoint::at(t, l.pos().lerp(r.pos(), (t - l.t) / span)))
        .collect()
}

fn bridge_for(gapped: &GappedTrajectory, sigma_m: f64) -> Result<(BridgeParams, Vec<f64>)> {
    let l = gapped.left_anchor();
    let params = BridgeParams::new(
        l.pos(),
        gapped.right_anchor().pos(),
        gapped.duration(),
        sigma_m,
    )?;
    let times = gapped.missing_times().iter().map(|&t| t - l.t).collect();
    Ok((params, times))
}

/// One bridge realisation between the anchors at the missing times.
pub fn fill_bridge(gapped: &GappedTrajectory, sigma_m: f64, seed: u64) -> Result<Vec<TimedPoint>> {
    let (params, rel) = bridge_for(gapped, sigma_m)?;
    let pts = sample_bridge(&params, &rel, &mut rng_from_seed(seed))?;
    Ok(gapped
        .missing_times()
        .iter()
        .zip(pts)
        .map(|(&t, p)| TimedPoint::at(t, p))
        .collect())
}

/// Closed-form expected length of the gap, one bridge point per missing time.
pub fn estimate_gap_length(gapped: &GappedTrajectory, sigma_m: f64) -> f64 {
    expected_path_length(
        sigma_m,
        gapped.duration(),
        gapped.displacement(),
        gapped.segment_count() as u64,
    )
}

/// `σ_m` from the observed points on both sides; no triple straddles the gap.
pub fn estimate_gap_sigma(
    gapped: &GappedTrajectory,
    search: &SearchConfig,
) -> Result<SigmaEstimate> {
    estimate_sigma_pooled(gapped.observed_segments(), search)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RogEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub realisations: usize,
}

/// Seed of the `i`-th realisation drawn under `seed`.
pub fn realisation_seed(seed: u64, i: usize) -> u64 {
    derive_seed(seed, &[i as u64])
}

/// Mean RoG of the spliced path over `m` independent bridge fills.
///
/// Realisation `i` uses [`realisation_seed`]`(seed, i)`; draws run in
/// parallel and are summed in index order.
pub fn estimate_gap_rog(
    gapped: &GappedTrajectory,
    sigma_m: f64,
    m: usize,
    seed: u64,
) -> Result<RogEstimate> {
    if m == 0 {
        return Err(Error::Config("need at least one realisation".into()));
    }
    let values = (0..m)
        .into_par_iter()
        .map(|i| {
            let fill = fill_bridge(gapped, sigma_m, realisation_seed(seed, i))?;
            Ok(radius_of_gyration(
                splice_fill(gapped, &fill, Source::Bridge)?.trajectory(),
            ))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(RogEstimate {
        mean: mean(&values),
        std_error: sample_std(&values) / (m as f64).sqrt(),
        realisations: m,
    })
}

/// Everything the fill pipeline reports about one gap.
#[derive(Debug, Clone, PartialEq)]
pub struct FillOutcome {
    pub filled: FilledTrajectory,
    /// `None` for linear fills and when `σ_m` was given.
    pub sigma_estimate: Option<SigmaEstimate>,
    /// `σ_m` used for the bridge; 0 for linear fills.
    pub sigma_m: f64,
    pub estimated_length: f64,
    pub displacement: f64,
    pub rog: RogEstimate,
}

/// Estimates `σ_m` if needed and fills the gap.
///
/// The returned trajectory holds realisation 0; the RoG estimate averages
/// all realisations.
pub fn fill_gap(
    gapped: &GappedTrajectory,
    method: &FillMethod,
    search: &SearchConfig,
    seed: u64,
) -> Result<FillOutcome> {
    method.validate()?;
    let displacement = gapped.displacement().norm();
    match *method {
        FillMethod::Linear => {
            let filled = splice_fill(gapped, &fill_linear(gapped), Source::Linear)?;
            let rog = radius_of_gyration(filled.trajectory());
            Ok(FillOutcome {
                filled,
                sigma_estimate: None,
                sigma_m: 0.0,
                estimated_length: displacement,
                displacement,
                rog: RogEstimate {
                    mean: rog,
                    std_error: 0.0,
                    realisations: 1,
                },
            })
        }
        FillMethod::Bridge {
            realisations,
            sigma_override,
        } => {
            let (sigma_m, sigma_estimate) = match sigma_override {
                Some(s) => (s, None),
                None => {
                    let est = estimate_gap_sigma(gapped, search)?;
                    (est.sigma_m, Some(est))
                }
            };
            let fill = fill_bridge(gapped, sigma_m, realisation_seed(seed, 0))?;
            Ok(FillOutcome {
                filled: splice_fill(gapped, &fill, Source::Bridge)?,
                sigma_estimate,
                sigma_m,
                estimated_length: estimate_gap_length(gapped, sigma_m),
                displacement,
                rog: estimate_gap_rog(gapped, sigma_m, realisations, seed)?,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{excise_gap, Point2, Trajectory};

    fn straight_gap() -> GappedTrajectory {
        let t =
            Trajectory::from_positions((0..6).map(|i| Point2::new(2.0 * i as f64, 0.0))).unwrap();
        excise_gap(&t, 1, 4).unwrap()
    }

    #[test]
    fn linear_fill_points() {
        let fill = fill_linear(&straight_gap());
        let xs: Vec<f64> = fill.iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![2.0, 4.0, 6.0, 8.0]);
        assert!(fill.iter().all(|p| p.y == 0.0));
    }

    #[test]
    fn linear_fill_degenerate_cases() {
        let t = Trajectory::from_positions((0..3).map(|i| Point2::new(i as f64, 0.0))).unwrap();
        let g = excise_gap(&t, 1, 0).unwrap();
        assert!(fill_linear(&g).is_empty());
        let same = Trajectory::from_positions(vec![
            Point2::new(1.0, 1.0),
            Point2::new(5.0, 5.0),
            Point2::new(1.0, 1.0),
        ])
        .unwrap();
        let g = excise_gap(&same, 1, 1).unwrap();
        assert_eq!(fill_linear(&g)[0].pos(), Point2::new(1.0, 1.0));
    }

    #[test]
    fn tiny_sigma_bridge_is_linear() {
        let g = straight_gap();
        let lin = fill_linear(&g);
        let br = fill_bridge(&g, 1e-12, 4).unwrap();
        for (a, b) in lin.iter().zip(&br) {
            assert_eq!(a.t, b.t);
            assert!(a.pos().distance(b.pos()) < 1e-6);
        }
        assert_eq!(
            fill_bridge(&g, 2.0, 4).unwrap(),
            fill_bridge(&g, 2.0, 4).unwrap()
        );
    }

    #[test]
    fn gap_length_cases() {
        let t =
            Trajectory::from_positions((0..3).map(|i| Point2::new(3.0 * i as f64, 4.0 * i as f64)))
                .unwrap();
        let g = excise_gap(&t, 1, 0).unwrap();
        assert_eq!(estimate_gap_length(&g, 5.0), 5.0);
        assert!((estimate_gap_length(&straight_gap(), 1e-9) - 10.0).abs() < 1e-9);
        let round = Trajectory::from_positions((0..103).map(|_| Point2::ORIGIN)).unwrap();
        let g = excise_gap(&round, 1, 100).unwrap();
        assert!((estimate_gap_length(&g, 1.0) - 125.956_511_942_132_05).abs() < 1e-9);
        assert!(estimate_gap_length(&straight_gap(), 3.0) >= 10.0);
    }

    #[test]
    fn single_realisation_rog() {
        let g = straight_gap();
        let one = estimate_gap_rog(&g, 1.5, 1, 77).unwrap();
        let fill = fill_bridge(&g, 1.5, realisation_seed(77, 0)).unwrap();
        let direct =
            radius_of_gyration(splice_fill(&g, &fill, Source::Bridge).unwrap().trajectory());
        assert_eq!(one.mean, direct);
        let lin = radius_of_gyration(
            splice_fill(&g, &fill_linear(&g), Source::Linear)
                .unwrap()
                .trajectory(),
        );
        assert!((estimate_gap_rog(&g, 0.0, 7, 3).unwrap().mean - lin).abs() < 1e-14 * lin);
        assert!(estimate_gap_rog(&g, 1.0, 0, 3).is_err());
    }

    #[test]
    fn fill_gap_reports() {
        let g = straight_gap();
        let lin = fill_gap(&g, &FillMethod::Linear, &SearchConfig::default(), 0).unwrap();
        assert_eq!(lin.estimated_length, lin.displacement);
        assert!(lin.filled.sources()[1..5]
            .iter()
            .all(|s| *s == Source::Linear));
        let method = FillMethod::Bridge {
            realisations: 10,
            sigma_override: Some(0.5),
        };
        let br = fill_gap(&g, &method, &SearchConfig::default(), 9).unwrap();
        assert!(br.sigma_estimate.is_none());
        assert_eq!(br.sigma_m, 0.5);
        assert!(br.estimated_length >= br.displacement);
        assert_eq!(br.rog.realisations, 10);
        let bad = FillMethod::Bridge {
            realisations: 0,
            sigma_override: None,
        };
        assert!(fill_gap(&g, &bad, &SearchConfig::default(), 9).is_err());
    }
}
