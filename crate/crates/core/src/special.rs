//! Modified Bessel functions I₀ and I₁, the Laguerre function L½, and the
//! Rice and Rayleigh means built on them.
//!
//! Bessel values are computed exponentially scaled (`e^{-|x|} I_k(x)`) so
//! that L½ and the Rice mean never overflow: for `x ≤ 0`,
//!
//! ```text
//! L½(x) = e^{x/2} [(1 - x) I₀(-x/2) - x I₁(-x/2)]
//!       = (1 - x) Ĩ₀(y) + 2y Ĩ₁(y),   y = -x/2,  Ĩ_k(y) = e^{-y} I_k(y)
//! ```
//!
//! and both terms are non-negative, so there is no cancellation.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Above this `|x|` the asymptotic expansion replaces the power series.
/// Both branches agree to a few ulps here; the series is still well inside
/// its comfortable range and the asymptotic series' smallest term is ~e^{-40}.
const SERIES_LIMIT: f64 = 20.0;

/// `A²/B` beyond which the Rice mean is returned as `A + B/(2A)`; the next
/// term of the expansion is below `1e-20` relative there.
pub const RICE_ASYMPTOTIC_RATIO: f64 = 1e10;

fn series_scaled(order: u32, x: f64) -> f64 {
    // Σ (x/2)^{2k+ν} / (k! (k+ν)!), all terms positive for x ≥ 0.
    let half = 0.5 * x;
    let q = half * half;
    let mut term = if order == 0 { 1.0 } else { half };
    let mut sum = term;
    let nu = order as f64;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + nu));
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    sum * (-x).exp()
}

fn asymptotic_scaled(order: u32, x: f64) -> f64 {
    // e^{-x} I_ν(x) ~ (2πx)^{-1/2} Σ_k (-1)^k a_k(ν) / x^k,
    // a_k(ν) = Π_{j=1..k} (4ν² - (2j-1)²) / (k! 8^k).
    let mu = 4.0 * (order as f64).powi(2);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        let odd = 2.0 * k - 1.0;
        let next = -term * (mu - odd * odd) / (k * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= sum.abs() * 1e-17 {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

fn scaled_nonneg(order: u32, x: f64) -> f64 {
    if x <= SERIES_LIMIT {
        series_scaled(order, x)
    } else {
        asymptotic_scaled(order, x)
    }
}

/// `e^{-|x|} I₀(x)`.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    scaled_nonneg(0, x.abs())
}

/// `e^{-|x|} I₁(x)`.
pub fn bessel_i1_scaled(x: f64) -> f64 {
    let v = scaled_nonneg(1, x.abs());
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Modified Bessel function of the first kind, order 0 or 1.
pub fn bessel_i(order: u32, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!(
            "bessel_i argument {x} is not finite"
        )));
    }
    let scaled = match order {
        0 => bessel_i0_scaled(x),
        1 => bessel_i1_scaled(x),
        _ => {
            return Err(Error::Domain(format!(
                "bessel_i supports orders 0 and 1, not {order}"
            )))
        }
    };
    if scaled == 0.0 {
        return Ok(0.0);
    }
    let value = scaled.signum() * (x.abs() + scaled.abs().ln()).exp();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow(format!("I_{order}({x})")))
    }
}

/// The Laguerre function L½ on the non-positive half-line.
pub fn laguerre_half(x: f64) -> Result<f64> {
    if x.is_nan() || x > 0.0 {
        return Err(Error::Domain(format!(
            "laguerre_half is defined here for x <= 0, got {x}"
        )));
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let y = -0.5 * x;
    Ok((1.0 - x) * bessel_i0_scaled(y) + 2.0 * y * bessel_i1_scaled(y))
}

/// Parameters of a Rice distribution: `‖Z‖` for `Z ~ N₂(μ, B·I)` with `A = ‖μ‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiceParams {
    a: f64,
    b: f64,
}

impl RiceParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::Domain(format!(
                "Rice A must be finite and >= 0, got {a}"
            )));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::Domain(format!(
                "Rice B must be finite and > 0, got {b}"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// `E[R]` for `R ~ Rice(A, B)`: `√B · √(π/2) · L½(-A²/(2B))`.
pub fn rice_mean(p: RiceParams) -> f64 {
    let RiceParams { a, b } = p;
    let ratio = a * a / b;
    if ratio > RICE_ASYMPTOTIC_RATIO {
        return a + b / (2.0 * a);
    }
    let l = laguerre_half(-0.5 * ratio).expect("argument is non-positive");
    b.sqrt() * FRAC_PI_2.sqrt() * l
}

/// Mean of a Rayleigh distribution with per-coordinate standard deviation `sigma`.
pub fn rayleigh_mean(sigma: f64) -> f64 {
    FRAC_PI_2.sqrt() * sigma
}
