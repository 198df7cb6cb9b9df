//! Photon content of a short Gaussian pulse with carrier-envelope offset phase.

use crate::error::{invalid, require_positive, ModelError, Result};
use crate::numeric::erf;
use crate::quantum::HBAR;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Below this `z` the carrier vanishes and `F` diverges.
pub const MIN_Z: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPulseSpec {
    pub omega_p: f64,
    pub bandwidth: f64,
    pub theta: f64,
    pub energy: Option<f64>,
}

impl GaussianPulseSpec {
    pub fn new(omega_p: f64, bandwidth: f64, theta: f64) -> Result<Self> {
        require_positive("omega_p_rad_s", omega_p)?;
        require_positive("bandwidth_rad_s", bandwidth)?;
        if !theta.is_finite() {
            return Err(invalid("theta_rad", "must be finite"));
        }
        Ok(Self { omega_p, bandwidth, theta, energy: None })
    }

    pub fn with_energy(self, energy: f64) -> Result<Self> {
        if !(energy.is_finite() && energy >= 0.0) {
            return Err(invalid("energy_j", format!("must be finite and ≥ 0, got {energy}")));
        }
        Ok(Self { energy: Some(energy), ..self })
    }

    /// `ω_p / (W√2)`.
    pub fn z(&self) -> f64 {
        self.omega_p / (self.bandwidth * std::f64::consts::SQRT_2)
    }

    fn overlap(&self) -> f64 {
        let z = self.z();
        (-z * z).exp()
    }
}

/// Which closed form to use for the energy–photon relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhotonFormula {
    /// Energy term `(1 + cos 2θ) e^{-z²}/(z√π)`, which follows from integrating `ω|C(ω)|²`.
    #[default]
    Corrected,
    /// Energy term `(2cos θ + 1) e^{-z²}/(z√π)`, kept for comparison.
    Published,
}

/// `c_n = √(2π) W (1 + cos 2θ e^{-z²})`.
pub fn normalization_constant(spec: &GaussianPulseSpec) -> f64 {
    (2.0 * PI).sqrt() * spec.bandwidth * (1.0 + (2.0 * spec.theta).cos() * spec.overlap())
}

/// Continuum density `|C(ω)|²/δω`, integrating to one over `ω > 0`.
pub fn spectral_density(spec: &GaussianPulseSpec, omega: f64) -> f64 {
    amplitude_profile(spec, omega).norm_sqr() / normalization_constant(spec)
}

fn amplitude_profile(spec: &GaussianPulseSpec, omega: f64) -> Complex64 {
    let w4 = 4.0 * spec.bandwidth * spec.bandwidth;
    let lower = (-(omega - spec.omega_p).powi(2) / w4).exp();
    let upper = (-(omega + spec.omega_p).powi(2) / w4).exp();
    Complex64::from_polar(lower, spec.theta) + Complex64::from_polar(upper, -spec.theta)
}

/// Cell-centred grid `ω_i = (i - ½)δω` reaching `ω_p + span·W`.
pub fn midpoint_grid(spec: &GaussianPulseSpec, delta_omega: f64, span: f64) -> Result<Vec<f64>> {
    require_positive("delta_omega_rad_s", delta_omega)?;
    require_positive("span", span)?;
    let top = spec.omega_p + span * spec.bandwidth;
    let n = (top / delta_omega).ceil() as usize;
    Ok((1..=n).map(|i| (i as f64 - 0.5) * delta_omega).collect())
}

/// Discrete mode weights `C_i = √δω [e^{iθ}g(ω_i-ω_p) + e^{-iθ}g(ω_i+ω_p)]/√c_n`.
pub fn mode_weights(spec: &GaussianPulseSpec, grid: &[f64], delta_omega: f64) -> Result<Vec<Complex64>> {
    require_positive("delta_omega_rad_s", delta_omega)?;
    let limit = spec.bandwidth / 10.0;
    if delta_omega > limit {
        return Err(ModelError::FrequencyGridTooCoarse { delta: delta_omega, limit });
    }
    if grid.iter().any(|&w| !(w > 0.0)) {
        return Err(invalid("omega_grid", "frequencies must be strictly positive"));
    }
    for pair in grid.windows(2) {
        if ((pair[1] - pair[0]) - delta_omega).abs() > 1e-9 * delta_omega {
            return Err(invalid("omega_grid", "spacing must be uniform and equal to delta_omega"));
        }
    }
    let scale = (delta_omega / normalization_constant(spec)).sqrt();
    Ok(grid.iter().map(|&w| amplitude_profile(spec, w) * scale).collect())
}

fn energy_ratio(spec: &GaussianPulseSpec, formula: PhotonFormula) -> Result<f64> {
    let z = spec.z();
    if z < MIN_Z {
        return Err(ModelError::DivergentLimit { z });
    }
    let overlap = spec.overlap();
    let weight = match formula {
        PhotonFormula::Corrected => 1.0 + (2.0 * spec.theta).cos(),
        PhotonFormula::Published => 2.0 * spec.theta.cos() + 1.0,
    };
    let numerator = erf(z) + weight * overlap / (z * PI.sqrt());
    let denominator = 1.0 + (2.0 * spec.theta).cos() * overlap;
    Ok(numerator / denominator)
}

/// `⟨E⟩` of a pulse carrying `photons` on average.
pub fn mean_energy(spec: &GaussianPulseSpec, photons: f64, formula: PhotonFormula) -> Result<f64> {
    if !(photons >= 0.0) {
        return Err(invalid("photons", format!("must be ≥ 0, got {photons}")));
    }
    Ok(photons * HBAR * spec.omega_p * energy_ratio(spec, formula)?)
}

/// `F(θ, z)` with `N = (Ē/ħω_p) F`.
pub fn reciprocal_factor(spec: &GaussianPulseSpec, formula: PhotonFormula) -> Result<f64> {
    Ok(1.0 / energy_ratio(spec, formula)?)
}

/// Mean photon number of a pulse of energy `energy`.
pub fn photon_count(spec: &GaussianPulseSpec, energy: f64, formula: PhotonFormula) -> Result<f64> {
    if !(energy >= 0.0) {
        return Err(invalid("energy_j", format!("must be ≥ 0, got {energy}")));
    }
    Ok(energy / (HBAR * spec.omega_p) * reciprocal_factor(spec, formula)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_limits() {
        let wide = GaussianPulseSpec::new(1e12, 1e10, 0.0).unwrap();
        let bare = (2.0 * PI).sqrt() * 1e10;
        assert!((normalization_constant(&wide) - bare).abs() < 1e-14 * bare);
        // ω_p → 0 leaves full overlap
        let dc = GaussianPulseSpec { omega_p: 0.0, ..wide };
        assert!((normalization_constant(&dc) - 2.0 * bare).abs() < 1e-14 * bare);
    }

    #[test]
    fn narrow_band_factor_is_one() {
        for theta in [0.0, 0.7, PI / 2.0, 2.0] {
            let spec = GaussianPulseSpec::new(10.0 * 2f64.sqrt(), 1.0, theta).unwrap();
            for formula in [PhotonFormula::Corrected, PhotonFormula::Published] {
                assert_eq!(reciprocal_factor(&spec, formula).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn zero_photons_zero_energy() {
        let spec = GaussianPulseSpec::new(1.414e10, 1e10, 0.0).unwrap();
        assert_eq!(mean_energy(&spec, 0.0, PhotonFormula::Corrected).unwrap(), 0.0);
    }

    #[test]
    fn published_theta_zero_coefficient() {
        let spec = GaussianPulseSpec::new(2f64.sqrt(), 1.0, 0.0).unwrap();
        let z = 1.0f64;
        let expected = ((-z * z).exp() + 1.0) / (erf(z) + 3.0 / (z * PI.sqrt()) * (-z * z).exp());
        let got = reciprocal_factor(&spec, PhotonFormula::Published).unwrap();
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn vanishing_carrier_is_rejected() {
        let spec = GaussianPulseSpec::new(1e-3, 1e4, 0.0).unwrap();
        assert!(matches!(reciprocal_factor(&spec, PhotonFormula::Corrected), Err(ModelError::DivergentLimit { .. })));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let spec = GaussianPulseSpec::new(1e10, 1e9, 0.0).unwrap();
        let grid = midpoint_grid(&spec, 2e8, 8.0).unwrap();
        assert!(matches!(mode_weights(&spec, &grid, 2e8), Err(ModelError::FrequencyGridTooCoarse { .. })));
    }

    #[test]
    fn round_trip_energy() {
        let spec = GaussianPulseSpec::new(1.414e10, 1e10, 0.0).unwrap();
        let energy = 3.2e-22;
        let n = photon_count(&spec, energy, PhotonFormula::Corrected).unwrap();
        let back = mean_energy(&spec, n, PhotonFormula::Corrected).unwrap();
        assert!((back - energy).abs() < 1e-14 * energy);
    }
}
