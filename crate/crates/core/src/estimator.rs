//! Maximum-likelihood estimation of the diffusion coefficient.
//!
//! Points `z_{2k}` and `z_{2k+2}` span an independent bridge and the point
//! between them is treated as one draw from that bridge. With
//! `a_k = τ_k(T_k − τ_k)/T_k` and `r_k` the midpoint's distance from its
//! chord position, the log-likelihood is
//!
//! ```text
//! ℓ(σ) = Σ_k [ −ln 2π − ln(σ² a_k) − r_k² / (2σ² a_k) ]
//! ```
//!
//! which has its single maximum at `σ̂² = Σ r_k²/a_k / (2N)`. The search
//! routine finds it by ternary search on `ln σ`; the closed form is kept as
//! an independent check.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{TimedPoint, Trajectory};

/// Triples whose `a_k` falls at or below this are skipped.
pub const MIN_TRIPLE_WEIGHT: f64 = 1e-12;

/// Three consecutive observations: the outer pair anchors a bridge, the middle is its draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeTriple {
    pub left: TimedPoint,
    pub mid: TimedPoint,
    pub right: TimedPoint,
}

impl BridgeTriple {
    /// `T_k`
    pub fn duration(&self) -> f64 {
        self.right.t - self.left.t
    }

    /// `τ_k`
    pub fn offset(&self) -> f64 {
        self.mid.t - self.left.t
    }

    /// `a_k = τ_k(T_k − τ_k)/T_k`, the midpoint variance per unit `σ²`.
    pub fn weight(&self) -> f64 {
        let (big_t, tau) = (self.duration(), self.offset());
        tau * (big_t - tau) / big_t
    }

    /// `r_k`, distance of the midpoint from the chord at its time.
    pub fn residual(&self) -> f64 {
        let d = self.right.pos() - self.left.pos();
        let expected = self.left.pos() + d * (self.offset() / self.duration());
        (self.mid.pos() - expected).norm()
    }
}

/// Triples extracted from one or more trajectories.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TripleSet {
    pub triples: Vec<BridgeTriple>,
    /// Triples dropped because `a_k <= MIN_TRIPLE_WEIGHT`.
    pub skipped: usize,
}

impl TripleSet {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    fn push_from(&mut self, traj: &Trajectory) {
        let pts = traj.points();
        // An even point count leaves the last point without a partner.
        for start in (0..pts.len().saturating_sub(2)).step_by(2) {
            let triple = BridgeTriple {
                left: pts[start],
                mid: pts[start + 1],
                right: pts[start + 2],
            };
            if triple.weight() > MIN_TRIPLE_WEIGHT {
                self.triples.push(triple);
            } else {
                self.skipped += 1;
            }
        }
    }
}

/// Triples `(z₀,z₁,z₂), (z₂,z₃,z₄), …` of a single trajectory.
pub fn extract_triples(traj: &Trajectory) -> Result<TripleSet> {
    if traj.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: traj.len(),
        });
    }
    let mut set = TripleSet::default();
    set.push_from(traj);
    Ok(set)
}

/// Triples pooled over several observed segments; segments shorter than three points contribute none.
pub fn extract_triples_pooled<'a, I>(segments: I) -> TripleSet
where
    I: IntoIterator<Item = &'a Trajectory>,
{
    let mut set = TripleSet::default();
    for seg in segments {
        set.push_from(seg);
    }
    set
}

/// Sufficient statistics of the likelihood.
#[derive(Debug, Clone, Copy)]
struct Summary {
    n: f64,
    sum_ln_weight: f64,
    /// `Σ r_k² / a_k`
    scatter: f64,
}

impl Summary {
    fn of(triples: &[BridgeTriple]) -> Self {
        let mut s = Summary {
            n: triples.len() as f64,
            sum_ln_weight: 0.0,
            scatter: 0.0,
        };
        for tr in triples {
            let a = tr.weight();
            let r = tr.residual();
            s.sum_ln_weight += a.ln();
            s.scatter += r * r / a;
        }
        s
    }

    fn log_likelihood(&self, sigma: f64) -> f64 {
        let s2 = sigma * sigma;
        -self.n * (2.0 * PI).ln()
            - self.n * s2.ln()
            - self.sum_ln_weight
            - self.scatter / (2.0 * s2)
    }

    /// `ℓ(e^u)/N` without the `u`-independent terms.
    fn profile(&self, u: f64) -> f64 {
        -2.0 * u - self.scatter / (2.0 * self.n) * (-2.0 * u).exp()
    }
}

/// Log-likelihood of `sigma_m` given the triples.
pub fn log_likelihood(sigma_m: f64, triples: &[BridgeTriple]) -> Result<f64> {
    if !(sigma_m > 0.0 && sigma_m.is_finite()) {
        return Err(Error::Domain(format!(
            "sigma_m must be positive and finite, got {sigma_m}"
        )));
    }
    if triples.is_empty() {
        return Err(Error::Domain(
            "log-likelihood of an empty triple set".into(),
        ));
    }
    Ok(Summary::of(triples).log_likelihood(sigma_m))
}

/// Analytic maximiser `σ̂ = √(Σ r_k²/a_k / (2N))`.
pub fn closed_form_sigma(triples: &[BridgeTriple]) -> Result<f64> {
    if triples.is_empty() {
        return Err(Error::TooFewPoints { needed: 3, got: 0 });
    }
    let s = Summary::of(triples);
    if s.scatter == 0.0 {
        return Err(Error::Degenerate);
    }
    Ok((s.scatter / (2.0 * s.n)).sqrt())
}

/// Search interval and stopping rule for [`estimate_sigma`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Stop once the bracket's relative width drops below this.
    pub rel_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            sigma_min: 1e-6,
            sigma_max: 1e4,
            rel_tol: 1e-9,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_min > 0.0 && self.sigma_min < self.sigma_max && self.sigma_max.is_finite())
        {
            return Err(Error::Config(format!(
                "search interval [{}, {}] must satisfy 0 < min < max < inf",
                self.sigma_min, self.sigma_max
            )));
        }
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaEstimate {
    pub sigma_m: f64,
    pub log_likelihood_at_max: f64,
    pub n_triples: usize,
    pub skipped: usize,
    /// The maximum sits on a boundary of the search interval.
    pub clamped: bool,
}

/// Ternary search for the maximum of `f` on `[lo, hi]`.
///
/// Returns the final bracket. `f` must be unimodal on the interval.
pub fn ternary_search_max<F>(f: F, mut lo: f64, mut hi: f64, width_tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    while hi - lo > width_tol {
        let third = (hi - lo) / 3.0;
        let m1 = lo + third;
        let m2 = hi - third;
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    (lo, hi)
}

/// Estimates `σ_m` from the triples by ternary search on `ln σ_m`.
pub fn estimate_sigma_from_triples(
    set: &TripleSet,
    search: &SearchConfig,
) -> Result<SigmaEstimate> {
    search.validate()?;
    if set.is_empty() {
        return Err(Error::TooFewPoints { needed: 3, got: 0 });
    }
    let summary = Summary::of(&set.triples);
    let (ln_min, ln_max) = (search.sigma_min.ln(), search.sigma_max.ln());
    let (lo, hi) = ternary_search_max(
        |u| summary.profile(u),
        ln_min,
        ln_max,
        search.rel_tol.ln_1p(),
    );

    let (sigma_m, clamped) = if lo == ln_min {
        (search.sigma_min, true)
    } else if hi == ln_max {
        (search.sigma_max, true)
    } else {
        (((lo + hi) / 2.0).exp(), false)
    };
    Ok(SigmaEstimate {
        sigma_m,
        log_likelihood_at_max: summary.log_likelihood(sigma_m),
        n_triples: set.len(),
        skipped: set.skipped,
        clamped,
    })
}

/// Estimates `σ_m` from one trajectory.
pub fn estimate_sigma(traj: &Trajectory, search: &SearchConfig) -> Result<SigmaEstimate> {
    let set = extract_triples(traj)?;
    estimate_sigma_from_triples(&set, search)
}

/// Estimates `σ_m` from every triple available in the given segments.
pub fn estimate_sigma_pooled<'a, I>(segments: I, search: &SearchConfig) -> Result<SigmaEstimate>
where
    I: IntoIterator<Item = &'a Trajectory>,
{
    let set = extract_triples_pooled(segments);
    estimate_sigma_from_triples(&set, search)
}
