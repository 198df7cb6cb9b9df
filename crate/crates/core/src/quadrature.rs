//! Adaptive Gauss–Kronrod (7, 15) quadrature.

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for nodes XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for [`integrate_complex`] and [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_depth: u32,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-14, rel: 1e-12, max_depth: 50 }
    }
}

fn kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, &x) in XGK[..7].iter().enumerate() {
        let pair = f(c - h * x) + f(c + h * x);
        kron += pair * WGK[i];
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

/// Integrates a complex-valued function over [a, b].
pub fn integrate_complex<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: Tolerance) -> Complex64 {
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    let (whole, err) = kronrod(&f, a, b);
    let target = tol.abs.max(tol.rel * whole.norm());
    refine(&f, a, b, whole, err, target, tol.max_depth)
}

fn refine<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    estimate: Complex64,
    err: f64,
    target: f64,
    depth: u32,
) -> Complex64 {
    if err <= target || depth == 0 {
        return estimate;
    }
    let m = 0.5 * (a + b);
    let (left, el) = kronrod(f, a, m);
    let (right, er) = kronrod(f, m, b);
    if el + er <= target {
        return left + right;
    }
    refine(f, a, m, left, el, 0.5 * target, depth - 1) + refine(f, m, b, right, er, 0.5 * target, depth - 1)
}

/// Real-valued wrapper around [`integrate_complex`].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> f64 {
    integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, tol).re
}
