//! Symmetric tridiagonal eigenproblems: implicit QL and Sturm-sequence bisection.

use crate::error::{invalid, ModelError, Result};

const MAX_QL_ITERATIONS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

/// Ascending eigenvalues with unit eigenvectors stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(invalid("diag", "matrix must be non-empty"));
        }
        if off.len() + 1 != diag.len() {
            return Err(invalid("off", "needs exactly one fewer entry than the diagonal"));
        }
        if diag.iter().chain(&off).any(|x| !x.is_finite()) {
            return Err(invalid("diag", "entries must be finite"));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Full decomposition; memory grows as `n²`.
    pub fn eigensystem(&self) -> Result<Eigensystem> {
        let n = self.len();
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        let mut d = self.diag.clone();
        ql_implicit(&mut d, &self.off, Some(&mut z))?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
        let values = order.iter().map(|&k| d[k]).collect();
        // z is row-major with eigenvectors in columns
        let vectors = order.iter().map(|&k| (0..n).map(|i| z[i * n + k]).collect()).collect();
        Ok(Eigensystem { values, vectors })
    }

    /// Ascending eigenvalues without vectors.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut d = self.diag.clone();
        ql_implicit(&mut d, &self.off, None)?;
        d.sort_by(f64::total_cmp);
        Ok(d)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let b2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { b2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (zero-based) by bisection.
    pub fn kth_eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.len() {
            return Err(ModelError::ModeTruncation { requested: k + 1, available: self.len() });
        }
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale.min(mid.abs().max(f64::EPSILON * scale)) {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Eigenvalues with indices in `range`, ascending.
    pub fn eigenvalue_window(&self, range: std::ops::Range<usize>) -> Result<Vec<f64>> {
        range.map(|k| self.kth_eigenvalue(k)).collect()
    }
}

fn ql_implicit(d: &mut [f64], off: &[f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(ModelError::EigenConvergence { index: l });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn chain(n: usize) -> SymTridiagonal {
        let mut diag = vec![2.0; n];
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        SymTridiagonal::new(diag, vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn two_by_two() {
        let m = SymTridiagonal::new(vec![2.0, 2.0], vec![1.0]).unwrap();
        let es = m.eigensystem().unwrap();
        assert!((es.values[0] - 1.0).abs() < 1e-14);
        assert!((es.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn residuals_and_orthogonality() {
        let m = SymTridiagonal::new(
            (0..12).map(|i| (i as f64 * 0.7).sin() + 3.0).collect(),
            (0..11).map(|i| 0.5 + (i as f64 * 1.3).cos() * 0.4).collect(),
        )
        .unwrap();
        let es = m.eigensystem().unwrap();
        for (lambda, v) in es.values.iter().zip(&es.vectors) {
            let av = m.apply(v);
            for (a, x) in av.iter().zip(v) {
                assert!((a - lambda * x).abs() < 1e-12);
            }
        }
        for a in 0..12 {
            for b in 0..12 {
                let dot: f64 = es.vectors[a].iter().zip(&es.vectors[b]).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chain_spectrum_is_sine_squared() {
        let n = 40;
        let m = chain(n);
        let values = m.eigenvalues().unwrap();
        for (j, v) in values.iter().enumerate() {
            let exact = 4.0 * (j as f64 * PI / (2.0 * n as f64)).sin().powi(2);
            assert!((v - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn bisection_agrees_with_ql() {
        let m = chain(57);
        let values = m.eigenvalues().unwrap();
        assert_eq!(m.count_below(values[10] + 1e-9), 11);
        for k in [0, 1, 5, 28, 56] {
            assert!((m.kth_eigenvalue(k).unwrap() - values[k]).abs() < 1e-13);
        }
        assert!(m.kth_eigenvalue(57).is_err());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(SymTridiagonal::new(vec![], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![f64::NAN], vec![]).is_err());
    }
}
