//! Reference computations that share no code with the library.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn gl_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    rule.iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Adaptive bisection with a 20-point Gauss–Legendre panel.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let rule = gauss_legendre(20);
    fn go(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        rule: &[(f64, f64)],
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (gl_panel(f, a, m, rule), gl_panel(f, m, b, rule));
        let err = (l + r - whole).abs();
        if depth > 30 || err <= tol || err <= 4.0 * f64::EPSILON * (l + r).abs() {
            l + r
        } else {
            go(f, a, m, l, 0.5 * tol, rule, depth + 1) + go(f, m, b, r, 0.5 * tol, rule, depth + 1)
        }
    }
    go(f, a, b, gl_panel(f, a, b, &rule), tol, &rule, 0)
}

/// Complete elliptic integral of the second kind, parameter `m = k²`, by the AGM.
pub fn ellip_e(m: f64) -> f64 {
    if m >= 1.0 {
        return 1.0;
    }
    let (mut a, mut b) = (1.0, (1.0 - m).sqrt());
    let mut c = m.sqrt();
    let mut sum = 0.5 * c * c;
    let mut pow = 0.5;
    for _ in 0..64 {
        if c.abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        pow *= 2.0;
        sum += pow * c * c;
    }
    PI / (2.0 * a) * (1.0 - sum)
}

/// `E‖μ + √B·N₂(0, I)‖` with `‖μ‖ = A`, by integrating the planar Gaussian.
///
/// Polar coordinates around the origin of the noise; the angular integral of
/// `‖μ + r·u(θ)‖` is `(2/π)(A + r)·E(4Ar/(A + r)²)`, leaving a radial
/// integral that is split where `r = A` (the kink of the angular integrand).
pub fn rice_mean_quadrature(a: f64, b: f64) -> f64 {
    let s = b.sqrt();
    let radial = |rho: f64| {
        let r = s * rho;
        let ang = if a + r == 0.0 {
            0.0
        } else {
            (2.0 / PI) * (a + r) * ellip_e(4.0 * a * r / ((a + r) * (a + r)))
        };
        ang * rho * (-0.5 * rho * rho).exp()
    };
    let top = 40.0;
    let kink = (a / s).min(top);
    let scale = a + s;
    let mut total = 0.0;
    if kink > 0.0 {
        total += integrate(&radial, 0.0, kink, 1e-14 * scale);
    }
    if kink < top {
        total += integrate(&radial, kink, top, 1e-14 * scale);
    }
    total
}

/// Welch statistic for two samples.
pub fn welch_t(x: &[f64], y: &[f64]) -> f64 {
    let m = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let var = |v: &[f64], mu: f64| {
        v.iter().map(|a| (a - mu).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)
    };
    let (mx, my) = (m(x), m(y));
    (mx - my) / (var(x, mx) / x.len() as f64 + var(y, my) / y.len() as f64).sqrt()
}

/// Sample mean and its standard error.
pub fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mu = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|a| (a - mu).powi(2)).sum::<f64>() / (n - 1.0);
    (mu, (var / n).sqrt())
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(x: &[f64], y: &[f64]) -> f64 {
    let mut a = x.to_vec();
    let mut b = y.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}
