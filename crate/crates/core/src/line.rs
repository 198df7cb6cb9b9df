//! Discretized lossless transmission line: free–free LC chain and its normal modes.

use crate::error::{require_positive, invalid, ModelError, Result};
use crate::tridiag::SymTridiagonal;
use std::f64::consts::PI;

/// Above this node count [`diagonalize`] refuses to build the dense mode matrix.
pub const MAX_DENSE_NODES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineParams {
    pub nodes: usize,
    /// Inductance per length (H/m).
    pub l: f64,
    /// Capacitance per length (F/m).
    pub c: f64,
    /// Line length (m).
    pub length: f64,
}

impl LineParams {
    pub fn new(nodes: usize, l: f64, c: f64, length: f64) -> Result<Self> {
        if nodes < 2 {
            return Err(invalid("nodes", format!("need at least 2, got {nodes}")));
        }
        require_positive("l_h_per_m", l)?;
        require_positive("c_f_per_m", c)?;
        require_positive("length_m", length)?;
        Ok(Self { nodes, l, c, length })
    }

    /// Line with characteristic impedance `z0` and phase velocity `v`.
    pub fn from_impedance(nodes: usize, z0: f64, v: f64, length: f64) -> Result<Self> {
        require_positive("z0_ohm", z0)?;
        require_positive("v_m_s", v)?;
        Self::new(nodes, z0 / v, 1.0 / (z0 * v), length)
    }

    pub fn dx(&self) -> f64 {
        self.length / self.nodes as f64
    }

    pub fn velocity(&self) -> f64 {
        1.0 / (self.l * self.c).sqrt()
    }

    pub fn impedance(&self) -> f64 {
        (self.l / self.c).sqrt()
    }

    /// Propagation delay `L_c/v`.
    pub fn delay(&self) -> f64 {
        self.length / self.velocity()
    }

    /// Continuum mode spacing `πv/L_c`.
    pub fn omega_c(&self) -> f64 {
        PI * self.velocity() / self.length
    }

    /// Converts a dimensionless eigenvalue to `ω = v√c/Δx`.
    pub fn frequency(&self, eigenvalue: f64) -> f64 {
        self.velocity() * eigenvalue.max(0.0).sqrt() / self.dx()
    }

    /// Smallest node count whose top mode reaches `factor · omega`.
    pub fn nodes_for_band(z0: f64, v: f64, length: f64, omega: f64, factor: f64) -> Result<usize> {
        require_positive("omega_r_rad_s", omega)?;
        require_positive("band_factor", factor)?;
        let probe = Self::from_impedance(2, z0, v, length)?;
        let target = factor * omega;
        // ω_top = 2(v/Δx) sin((N-1)π/2N) ≈ 2vN/L_c
        let mut n = ((target * length / (2.0 * v)).ceil() as usize).max(2);
        let top = |n: usize| {
            let p = LineParams { nodes: n, ..probe };
            p.frequency(4.0 * ((n - 1) as f64 * PI / (2.0 * n as f64)).sin().powi(2))
        };
        while top(n) < target {
            n += 1;
        }
        Ok(n)
    }
}

/// Quadratic-form matrix of `Σ(φ_m - φ_{m-1})²`: diagonal `[1, 2, …, 2, 1]`, off-diagonal `-1`.
pub fn build_inverse_inductance_matrix(params: &LineParams) -> SymTridiagonal {
    let n = params.nodes;
    let mut diag = vec![2.0; n];
    diag[0] = 1.0;
    diag[n - 1] = 1.0;
    SymTridiagonal::new(diag, vec![-1.0; n - 1]).expect("chain matrix is well formed")
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineEigensystem {
    /// Dimensionless `c_j`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthogonal mode matrix; row `j` is mode `j` over nodes `m = 1..N`.
    pub modes: Vec<Vec<f64>>,
    pub frequencies: Vec<f64>,
}

impl LineEigensystem {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Component of mode `j` at the resonator end.
    pub fn end_component(&self, j: usize) -> f64 {
        *self.modes[j].last().expect("modes are non-empty")
    }

    /// Largest `|OᵀO - 𝕀|` entry.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a..n {
                let dot: f64 = (0..n).map(|j| self.modes[j][a] * self.modes[j][b]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - want).abs());
            }
        }
        worst
    }
}

/// Full eigendecomposition with the first nonzero component of every mode positive.
pub fn diagonalize(params: &LineParams) -> Result<LineEigensystem> {
    if params.nodes > MAX_DENSE_NODES {
        return Err(invalid(
            "nodes",
            format!("dense mode matrix limited to {MAX_DENSE_NODES} nodes; use mode_frequencies"),
        ));
    }
    let es = build_inverse_inductance_matrix(params).eigensystem()?;
    let mut eigenvalues = es.values;
    // the DC mode is exactly null; roundoff may leave a tiny residue of either sign
    if eigenvalues[0].abs() < 1e-13 {
        eigenvalues[0] = 0.0;
    }
    let modes = es
        .vectors
        .into_iter()
        .map(|mut v| {
            let lead = v.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
            if lead < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    let frequencies = eigenvalues.iter().map(|&c| params.frequency(c)).collect();
    Ok(LineEigensystem { eigenvalues, modes, frequencies })
}

/// All mode frequencies without eigenvectors.
pub fn mode_frequencies(params: &LineParams) -> Result<Vec<f64>> {
    let mut values = build_inverse_inductance_matrix(params).eigenvalues()?;
    if values[0].abs() < 1e-13 {
        values[0] = 0.0;
    }
    Ok(values.into_iter().map(|c| params.frequency(c)).collect())
}

/// Frequencies of modes `range` by Sturm bisection; cost is independent of the window's position.
pub fn mode_frequency_window(params: &LineParams, range: std::ops::Range<usize>) -> Result<Vec<f64>> {
    if range.end > params.nodes {
        return Err(ModelError::ModeTruncation { requested: range.end, available: params.nodes });
    }
    let matrix = build_inverse_inductance_matrix(params);
    Ok(matrix.eigenvalue_window(range)?.into_iter().map(|c| params.frequency(c)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumReport {
    /// Largest `|√c_j - jπ/N| / (jπ/N)` over `1 ≤ j ≤ N/4`.
    pub dispersion_deviation: f64,
    /// Per-mode deviation of `√c_j` from `jπ/N`, indexed from `j = 1`.
    pub dispersion_by_mode: Vec<f64>,
    /// Largest deviation of mode `j ≤ N/4` from `√(2/N) cos(jπ(m - ½)/N)`.
    pub shape_deviation: Vec<f64>,
    /// Sign of each mode at the resonator end.
    pub end_signs: Vec<i8>,
    pub parity_alternates: bool,
    /// Spectrum rises linearly at low `j` and flattens towards the band edge.
    pub tapers: bool,
}

pub fn continuum_check(eig: &LineEigensystem) -> ContinuumReport {
    let n = eig.len();
    let nf = n as f64;
    let low = (n / 4).max(1).min(n - 1);
    let dispersion_by_mode: Vec<f64> = (1..=low)
        .map(|j| {
            let k = j as f64 * PI / nf;
            (eig.eigenvalues[j].sqrt() - k).abs() / k
        })
        .collect();
    let dispersion_deviation = dispersion_by_mode.iter().copied().fold(0.0, f64::max);
    let norm = (2.0 / nf).sqrt();
    let shape_deviation = (1..=low)
        .map(|j| {
            eig.modes[j]
                .iter()
                .enumerate()
                .map(|(i, &o)| {
                    let m = i as f64 + 1.0;
                    (o - norm * (j as f64 * PI * (m - 0.5) / nf).cos()).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let end_signs: Vec<i8> = (0..n).map(|j| if eig.end_component(j) >= 0.0 { 1 } else { -1 }).collect();
    let parity_alternates = end_signs.iter().enumerate().all(|(j, &s)| s == if j % 2 == 0 { 1 } else { -1 });
    let roots: Vec<f64> = eig.eigenvalues.iter().map(|c| c.sqrt()).collect();
    let steps: Vec<f64> = roots.windows(2).map(|w| w[1] - w[0]).collect();
    let tapers = steps.len() >= 2
        && steps.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9))
        && steps[steps.len() - 1] < 0.5 * steps[0];
    ContinuumReport { dispersion_deviation, dispersion_by_mode, shape_deviation, end_signs, parity_alternates, tapers }
}
