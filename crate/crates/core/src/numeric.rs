//! Small numerical helpers shared by the models.

use num_complex::Complex64;
use std::f64::consts::PI;

pub const TWO_PI: f64 = 2.0 * PI;

/// Wraps an angle into (-π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TWO_PI);
    if y > PI {
        y - TWO_PI
    } else {
        y
    }
}

/// `exp(z) - 1` without cancellation for small |z|.
pub fn expm1(z: Complex64) -> Complex64 {
    let half = (0.5 * z.im).sin();
    Complex64::new(
        z.re.exp_m1() * z.im.cos() - 2.0 * half * half,
        z.re.exp() * z.im.sin(),
    )
}

/// `∫_a^b e^{cτ} dτ`, stable as `c → 0`.
pub fn exp_integral(c: Complex64, a: f64, b: f64) -> Complex64 {
    let len = b - a;
    let x = c * len;
    let start = (c * a).exp();
    if x.norm() < 1e-8 {
        // series of (e^x - 1)/x
        start * len * (1.0 + x / 2.0 + x * x / 6.0)
    } else {
        start * expm1(x) / c
    }
}

/// Pairwise summation; the reduction order depends only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_complex(values: &[Complex64]) -> Complex64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_complex(&values[..mid]) + pairwise_sum_complex(&values[mid..])
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
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

// P_n(x) and P_n'(x) by the three-term recurrence
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}
