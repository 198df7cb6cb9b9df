#![allow(dead_code)]

use num_complex::Complex64;

/// Adaptive Simpson with Richardson correction; deliberately unrelated to the library's Gauss rules.
pub fn simpson<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64) -> Complex64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
    refine(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Complex64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
    let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Real-valued convenience wrapper, split into `pieces` panels to keep recursion shallow.
pub fn simpson_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, pieces: usize) -> f64 {
    let g = |x: f64| Complex64::new(f(x), 0.0);
    panels(&g, a, b, tol, pieces).re
}

pub fn panels<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64, pieces: usize) -> Complex64 {
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|k| simpson(f, a + k as f64 * h, a + (k + 1) as f64 * h, tol / pieces as f64))
        .sum()
}

/// Roots of a cubic with three real roots, by trigonometric form.
pub fn real_cubic_roots(a: f64, b: f64, c: f64, d: f64) -> [f64; 3] {
    let p = (3.0 * a * c - b * b) / (3.0 * a * a);
    let q = (2.0 * b * b * b - 9.0 * a * b * c + 27.0 * a * a * d) / (27.0 * a * a * a);
    let r = 2.0 * (-p / 3.0).sqrt();
    let phi = (3.0 * q / (p * r)).clamp(-1.0, 1.0).acos() / 3.0;
    let shift = b / (3.0 * a);
    let mut roots = [0.0; 3];
    for (k, root) in roots.iter_mut().enumerate() {
        *root = r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift;
    }
    roots.sort_by(f64::total_cmp);
    roots
}
