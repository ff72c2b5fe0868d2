//! Exact and fixed-rule integrals of radial power kernels over grid cells.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Points of the fixed polar rule used for 2-D cell integrals.
pub const POLAR_RULE_POINTS: usize = 32;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn polar_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(POLAR_RULE_POINTS))
}

/// `∫_u^v |t|^e dt` for `e > -1`.
pub fn power_integral_1d(u: f64, v: f64, e: f64) -> f64 {
    let anti = |t: f64| t.signum() * t.abs().powf(e + 1.0) / (e + 1.0);
    anti(v) - anti(u)
}

/// `∫ |y|^e dy` over the cell `[-hx/2, hx/2] × [-hy/2, hy/2]` intersected
/// with the disk `|y| < clip`, by the fixed polar rule. Requires `e > -2`.
pub fn power_integral_cell_2d(hx: f64, hy: f64, e: f64, clip: f64) -> f64 {
    let (nodes, weights) = polar_rule();
    let corner = (hy / hx).atan();
    let radial = |reach: f64| reach.min(clip).powf(e + 2.0) / (e + 2.0);
    let mut total = 0.0;
    // [0, corner]: the ray leaves through the side x = hx/2
    let half = 0.5 * corner;
    for (t, w) in nodes.iter().zip(weights) {
        let theta = half * (t + 1.0);
        total += w * half * radial(0.5 * hx / theta.cos());
    }
    // [corner, π/2]: through the side y = hy/2
    let half = 0.5 * (0.5 * PI - corner);
    for (t, w) in nodes.iter().zip(weights) {
        let theta = corner + half * (t + 1.0);
        total += w * half * radial(0.5 * hy / theta.sin());
    }
    4.0 * total
}

/// `∫ |y|^e dy` over the grid cell centred at the singularity, optionally
/// clipped to `|y| < clip`.
pub fn singular_cell_integral(dim: usize, spacing: (f64, f64), e: f64, clip: f64) -> f64 {
    if dim == 1 {
        let a = (0.5 * spacing.0).min(clip);
        power_integral_1d(-a, a, e)
    } else {
        power_integral_cell_2d(spacing.0, spacing.1, e, clip)
    }
}
