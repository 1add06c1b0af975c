//! The planar Brownian bridge: marginal law, endpoint-exact sampling and the
//! closed-form expected length of its discretisation.
//!
//! A bridge from `start` to `end` over `[0, T]` with diffusion coefficient
//! `σ_m` has marginal `Z_t ~ N₂(start + (t/T)·d, σ_m²·t(T−t)/T · I₂)` where
//! `d = end − start`. Sampling walks forward through the requested times,
//! drawing each point from its law conditioned on the previous point and on
//! the fixed end point.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::special::{rice_mean, RiceParams};
use crate::trajectory::Point2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeParams {
    start: Point2,
    end: Point2,
    duration: f64,
    sigma_m: f64,
}

impl BridgeParams {
    pub fn new(start: Point2, end: Point2, duration: f64, sigma_m: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) {
            return Err(Error::Domain("bridge end points must be finite".into()));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::Domain(format!(
                "bridge duration must be positive, got {duration}"
            )));
        }
        if !(sigma_m.is_finite() && sigma_m >= 0.0) {
            return Err(Error::Domain(format!(
                "diffusion coefficient must be >= 0, got {sigma_m}"
            )));
        }
        Ok(Self {
            start,
            end,
            duration,
            sigma_m,
        })
    }

    pub fn start(&self) -> Point2 {
        self.start
    }

    pub fn end(&self) -> Point2 {
        self.end
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn sigma_m(&self) -> f64 {
        self.sigma_m
    }

    pub fn displacement(&self) -> Point2 {
        self.end - self.start
    }

    fn chord(&self, t: f64) -> Point2 {
        self.start.lerp(self.end, t / self.duration)
    }
}

/// Mean and per-coordinate variance of the bridge at time `t ∈ [0, T]`.
pub fn bridge_marginal(p: &BridgeParams, t: f64) -> Result<(Point2, f64)> {
    if !(0.0..=p.duration).contains(&t) {
        return Err(Error::Domain(format!(
            "time {t} outside the bridge interval [0, {}]",
            p.duration
        )));
    }
    let var = p.sigma_m * p.sigma_m * t * (p.duration - t) / p.duration;
    Ok((p.chord(t), var))
}

/// One joint realisation of the bridge at `times` (strictly increasing, inside `(0, T)`).
///
/// Each point consumes two standard normals from `rng`, x first. With
/// `σ_m = 0` the points lie on the chord and no randomness is consumed.
pub fn sample_bridge<R: Rng + ?Sized>(
    p: &BridgeParams,
    times: &[f64],
    rng: &mut R,
) -> Result<Vec<Point2>> {
    let mut prev_t = 0.0;
    for &t in times {
        if !(t > prev_t && t < p.duration) {
            return Err(Error::Domain(format!(
                "sample time {t} is not strictly increasing inside (0, {})",
                p.duration
            )));
        }
        prev_t = t;
    }
    if p.sigma_m == 0.0 {
        return Ok(times.iter().map(|&t| p.chord(t)).collect());
    }

    let sigma2 = p.sigma_m * p.sigma_m;
    let mut out = Vec::with_capacity(times.len());
    let mut z = p.start;
    let mut t0 = 0.0;
    for &t in times {
        let step = t - t0;
        let remaining = p.duration - t0;
        let mean = z + (p.end - z) * (step / remaining);
        let sd = (sigma2 * step * (remaining - step) / remaining).sqrt();
        let nx: f64 = rng.sample(StandardNormal);
        let ny: f64 = rng.sample(StandardNormal);
        z = mean + Point2::new(nx, ny) * sd;
        out.push(z);
        t0 = t;
    }
    Ok(out)
}

/// Expected length of the bridge discretised into `segments` equal time steps.
///
/// For `segments ≥ 2` this is the Rice mean with `A = ‖d‖` and
/// `B = σ_m²·T·(segments − 1)`; with one segment, or no diffusion, it is `‖d‖`.
///
/// # Panics
/// If `sigma_m < 0`, `duration <= 0` or `segments == 0`.
pub fn expected_path_length(sigma_m: f64, duration: f64, d: Point2, segments: u64) -> f64 {
    assert!(sigma_m >= 0.0, "sigma_m must be non-negative");
    assert!(duration > 0.0, "duration must be positive");
    assert!(segments >= 1, "need at least one segment");
    let a = d.norm();
    let b = sigma_m * sigma_m * duration * (segments - 1) as f64;
    if segments == 1 || b == 0.0 {
        return a;
    }
    match RiceParams::new(a, b) {
        Ok(params) => rice_mean(params),
        Err(_) => f64::INFINITY,
    }
}
