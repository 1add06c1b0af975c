//! Synthetic movement processes used to produce test trajectories.
//!
//! All generators start at the origin and produce `steps + 1` points at unit
//! times `0..=steps`. Given the same `(spec, steps, seed)` the output is
//! identical.

use std::f64::consts::TAU;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{rng_from_seed, SimRng};
use crate::trajectory::{Point2, Trajectory};

/// Names accepted by [`ModelSpec::from_params`].
pub const MODEL_NAMES: [&str; 5] = [
    "discrete-bm",
    "fixed-velocity",
    "angular-rw",
    "internal-state",
    "run-tumble",
];

/// Transition probabilities of the internal-state walk on a four-neighbour grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InternalStateTable {
    /// Moving: keep heading.
    pub p_continue: f64,
    pub p_left: f64,
    pub p_right: f64,
    /// Moving: turn around.
    pub p_reverse: f64,
    /// Moving: become stationary (no displacement this step).
    pub p_stop: f64,
    /// Stationary: stay put.
    pub p_remain: f64,
    /// Stationary: start moving in a uniformly chosen grid direction.
    pub p_start: f64,
}

impl Default for InternalStateTable {
    fn default() -> Self {
        default_internal_state_table()
    }
}

pub fn default_internal_state_table() -> InternalStateTable {
    InternalStateTable {
        p_continue: 0.85,
        p_left: 0.06,
        p_right: 0.06,
        p_reverse: 0.01,
        p_stop: 0.02,
        p_remain: 0.95,
        p_start: 0.05,
    }
}

impl InternalStateTable {
    pub fn moving(&self) -> [f64; 5] {
        [
            self.p_continue,
            self.p_left,
            self.p_right,
            self.p_reverse,
            self.p_stop,
        ]
    }

    pub fn stationary(&self) -> [f64; 2] {
        [self.p_remain, self.p_start]
    }

    /// Checks the row sums and the no-handedness / rare-reversal ordering.
    pub fn validate(&self) -> Result<()> {
        let moving = self.moving();
        let stationary = self.stationary();
        if moving
            .iter()
            .chain(&stationary)
            .any(|p| p.is_nan() || *p < 0.0)
        {
            return Err(Error::InvalidSpec(
                "transition probabilities must be >= 0".into(),
            ));
        }
        for (name, sum) in [
            ("moving", moving.iter().sum::<f64>()),
            ("stationary", stationary.iter().sum::<f64>()),
        ] {
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidSpec(format!(
                    "{name} transition probabilities sum to {sum}, not 1"
                )));
            }
        }
        if self.p_left != self.p_right {
            return Err(Error::InvalidSpec(
                "left and right turns must be equally likely".into(),
            ));
        }
        if !(self.p_reverse < self.p_left && self.p_left < self.p_continue) {
            return Err(Error::InvalidSpec(
                "need P(reverse) < P(turn) < P(continue)".into(),
            ));
        }
        Ok(())
    }

    /// `(1 − s)·self + s·uniform`, row by row.
    pub fn mixed(&self, s: f64) -> ([f64; 5], [f64; 2]) {
        let moving = self.moving().map(|p| (1.0 - s) * p + s / 5.0);
        let stationary = self.stationary().map(|p| (1.0 - s) * p + s / 2.0);
        (moving, stationary)
    }
}

fn default_target_x() -> f64 {
    10.0
}
fn one() -> f64 {
    1.0
}

/// One of the five generating processes with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Gaussian steps of per-coordinate std `sigma`, pinned to end at the target.
    #[serde(rename = "discrete-bm")]
    DiscreteBm {
        sigma: f64,
        #[serde(default = "default_target_x")]
        target_x: f64,
        #[serde(default)]
        target_y: f64,
    },
    /// Steps of length `v` in uniformly random directions.
    FixedVelocity {
        #[serde(default = "one")]
        v: f64,
    },
    /// Steps of length `v`; the heading takes Gaussian increments of std `sigma`.
    #[serde(rename = "angular-rw")]
    AngularRw {
        sigma: f64,
        #[serde(default = "one")]
        v: f64,
    },
    /// Grid walk with moving/stationary states; `s` mixes the table towards uniform.
    InternalState {
        #[serde(default)]
        s: f64,
        #[serde(default = "one")]
        step: f64,
        #[serde(default)]
        table: InternalStateTable,
    },
    /// Straight runs of speed `v`, re-oriented with probability `1 − e^{−l}` each step.
    RunTumble {
        l: f64,
        #[serde(default = "one")]
        v: f64,
    },
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "{name} must be finite and >= 0, got {v}"
        )))
    }
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::DiscreteBm { .. } => MODEL_NAMES[0],
            ModelSpec::FixedVelocity { .. } => MODEL_NAMES[1],
            ModelSpec::AngularRw { .. } => MODEL_NAMES[2],
            ModelSpec::InternalState { .. } => MODEL_NAMES[3],
            ModelSpec::RunTumble { .. } => MODEL_NAMES[4],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpec::DiscreteBm {
                sigma,
                target_x,
                target_y,
            } => {
                non_negative("sigma", sigma)?;
                if !(target_x.is_finite() && target_y.is_finite()) {
                    return Err(Error::InvalidSpec("target must be finite".into()));
                }
            }
            ModelSpec::FixedVelocity { v } => non_negative("v", v)?,
            ModelSpec::AngularRw { sigma, v } => {
                non_negative("sigma", sigma)?;
                non_negative("v", v)?;
            }
            ModelSpec::InternalState { s, step, table } => {
                if !(0.0..=1.0).contains(&s) {
                    return Err(Error::InvalidSpec(format!("S must lie in [0, 1], got {s}")));
                }
                non_negative("step", step)?;
                table.validate()?;
            }
            ModelSpec::RunTumble { l, v } => {
                if !(l.is_finite() && l > 0.0) {
                    return Err(Error::InvalidSpec(format!("l must be > 0, got {l}")));
                }
                non_negative("v", v)?;
            }
        }
        Ok(())
    }

    /// Builds a spec from a model name and `key=value` parameters.
    pub fn from_params(name: &str, params: &[(String, f64)]) -> Result<Self> {
        let get = |key: &str| params.iter().rev().find(|(k, _)| k == key).map(|(_, v)| *v);
        let allowed: &[&str] = match name {
            "discrete-bm" => &["sigma", "target_x", "target_y"],
            "fixed-velocity" => &["v"],
            "angular-rw" => &["sigma", "v"],
            "internal-state" => &["s", "step"],
            "run-tumble" => &["l", "v"],
            other => {
                return Err(Error::InvalidSpec(format!(
                    "unknown model {other:?}; valid models: {}",
                    MODEL_NAMES.join(", ")
                )))
            }
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidSpec(format!(
                "model {name} has no parameter {k:?}; expected {}",
                allowed.join(", ")
            )));
        }
        let required = |key: &str| {
            get(key).ok_or_else(|| {
                Error::InvalidSpec(format!("model {name} needs --param {key}=<value>"))
            })
        };
        let spec = match name {
            "discrete-bm" => ModelSpec::DiscreteBm {
                sigma: required("sigma")?,
                target_x: get("target_x").unwrap_or(default_target_x()),
                target_y: get("target_y").unwrap_or(0.0),
            },
            "fixed-velocity" => ModelSpec::FixedVelocity {
                v: get("v").unwrap_or(1.0),
            },
            "angular-rw" => ModelSpec::AngularRw {
                sigma: required("sigma")?,
                v: get("v").unwrap_or(1.0),
            },
            "internal-state" => ModelSpec::InternalState {
                s: get("s").unwrap_or(0.0),
                step: get("step").unwrap_or(1.0),
                table: default_internal_state_table(),
            },
            _ => ModelSpec::RunTumble {
                l: required("l")?,
                v: get("v").unwrap_or(1.0),
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Compact `key=value` rendering of the parameters, for reports.
    pub fn param_string(&self) -> String {
        match *self {
            ModelSpec::DiscreteBm {
                sigma,
                target_x,
                target_y,
            } => format!("sigma={sigma};target_x={target_x};target_y={target_y}"),
            ModelSpec::FixedVelocity { v } => format!("v={v}"),
            ModelSpec::AngularRw { sigma, v } => format!("sigma={sigma};v={v}"),
            ModelSpec::InternalState { s, step, .. } => format!("s={s};step={step}"),
            ModelSpec::RunTumble { l, v } => format!("l={l};v={v}"),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.param_string())
    }
}

/// Generates a trajectory of `steps + 1` points from the seeded stream.
pub fn generate(spec: &ModelSpec, steps: usize, seed: u64) -> Result<Trajectory> {
    generate_with_rng(spec, steps, &mut rng_from_seed(seed))
}

pub fn generate_with_rng(spec: &ModelSpec, steps: usize, rng: &mut SimRng) -> Result<Trajectory> {
    spec.validate()?;
    if steps == 0 {
        return Err(Error::InvalidSpec("steps must be >= 1".into()));
    }
    let positions = match *spec {
        ModelSpec::DiscreteBm {
            sigma,
            target_x,
            target_y,
        } => discrete_bm(sigma, Point2::new(target_x, target_y), steps, rng),
        ModelSpec::FixedVelocity { v } => fixed_velocity(v, steps, rng),
        ModelSpec::AngularRw { sigma, v } => angular_rw(sigma, v, steps, rng),
        ModelSpec::InternalState { s, step, table } => internal_state(&table, s, step, steps, rng),
        ModelSpec::RunTumble { l, v } => run_tumble(l, v, steps, rng),
    };
    Trajectory::from_positions(positions)
}

fn heading(theta: f64) -> Point2 {
    let (s, c) = theta.sin_cos();
    Point2::new(c, s)
}

fn walk(steps: impl Iterator<Item = Point2>, n: usize) -> Vec<Point2> {
    let mut out = Vec::with_capacity(n + 1);
    let mut z = Point2::ORIGIN;
    out.push(z);
    for s in steps {
        z = z + s;
        out.push(z);
    }
    out
}

fn discrete_bm(sigma: f64, target: Point2, steps: usize, rng: &mut SimRng) -> Vec<Point2> {
    let free = walk(
        (0..steps).map(|_| {
            let nx: f64 = rng.sample(StandardNormal);
            let ny: f64 = rng.sample(StandardNormal);
            Point2::new(nx, ny) * sigma
        }),
        steps,
    );
    let end = free[steps];
    free.iter()
        .enumerate()
        .map(|(k, w)| {
            let frac = k as f64 / steps as f64;
            (*w - end * frac) + target * frac
        })
        .collect()
}

fn fixed_velocity(v: f64, steps: usize, rng: &mut SimRng) -> Vec<Point2> {
    walk(
        (0..steps).map(|_| heading(rng.random::<f64>() * TAU) * v),
        steps,
    )
}

fn angular_rw(sigma: f64, v: f64, steps: usize, rng: &mut SimRng) -> Vec<Point2> {
    let mut theta = rng.random::<f64>() * TAU;
    walk(
        (0..steps).map(|_| {
            let inc: f64 = rng.sample(StandardNormal);
            theta += sigma * inc;
            heading(theta) * v
        }),
        steps,
    )
}

fn run_tumble(l: f64, v: f64, steps: usize, rng: &mut SimRng) -> Vec<Point2> {
    let p_tumble = -(-l).exp_m1();
    let mut theta = rng.random::<f64>() * TAU;
    walk(
        (0..steps).map(|_| {
            if rng.random::<f64>() < p_tumble {
                theta = rng.random::<f64>() * TAU;
            }
            heading(theta) * v
        }),
        steps,
    )
}

const GRID: [Point2; 4] = [
    Point2::new(1.0, 0.0),
    Point2::new(0.0, 1.0),
    Point2::new(-1.0, 0.0),
    Point2::new(0.0, -1.0),
];

fn categorical<const N: usize>(probs: &[f64; N], rng: &mut SimRng) -> usize {
    let u = rng.random::<f64>();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    N - 1
}

fn internal_state(
    table: &InternalStateTable,
    s: f64,
    step: f64,
    steps: usize,
    rng: &mut SimRng,
) -> Vec<Point2> {
    let (moving_p, stationary_p) = table.mixed(s);
    let mut moving = true;
    let mut dir = rng.random_range(0..4usize);
    walk(
        (0..steps).map(|_| {
            if moving {
                match categorical(&moving_p, rng) {
                    0 => {}
                    1 => dir = (dir + 1) % 4,
                    2 => dir = (dir + 3) % 4,
                    3 => dir = (dir + 2) % 4,
                    _ => {
                        moving = false;
                        return Point2::ORIGIN;
                    }
                }
            } else {
                if categorical(&stationary_p, rng) == 0 {
                    return Point2::ORIGIN;
                }
                moving = true;
                dir = rng.random_range(0..4usize);
            }
            GRID[dir] * step
        }),
        steps,
    )
}
