//! Coherent-state (first-moment) dynamics of the line modes and the resonator.

use crate::classical::{FillState, ResonatorParams};
use crate::error::{invalid, require_positive, ModelError, Result};
use crate::line::{mode_frequencies, mode_frequency_window, LineParams};
use crate::numeric::{pairwise_sum, pairwise_sum_complex};
use crate::pulse::{ComplexFrequency, Pulse};
use crate::tridiag::SymTridiagonal;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::ops::Range;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Line modes `j ≥ 1` kept in a calculation, with their frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub indices: Vec<usize>,
    pub frequencies: Vec<f64>,
    pub omega_c: f64,
    pub omega_top: f64,
    pub z0: f64,
    pub delay: f64,
    available: usize,
}

impl ModeSet {
    /// Modes `1..=m`.
    pub fn leading(line: &LineParams, m: usize) -> Result<Self> {
        Self::window(line, 1..m + 1)
    }

    /// Every non-DC mode of the line.
    pub fn full(line: &LineParams) -> Result<Self> {
        let freqs = mode_frequencies(line)?;
        let omega_top = *freqs.last().expect("line has nodes");
        Ok(Self::assemble(line, (1..line.nodes).collect(), freqs[1..].to_vec(), omega_top))
    }

    /// Modes with indices in `range`; `range.start` must be at least 1.
    pub fn window(line: &LineParams, range: Range<usize>) -> Result<Self> {
        if range.start == 0 {
            return Err(invalid("modes", "the DC mode j = 0 carries no coupling"));
        }
        if range.end > line.nodes {
            return Err(ModelError::ModeTruncation { requested: range.end - 1, available: line.nodes - 1 });
        }
        let freqs = mode_frequency_window(line, range.clone())?;
        let omega_top = mode_frequency_window(line, line.nodes - 1..line.nodes)?[0];
        Ok(Self::assemble(line, range.collect(), freqs, omega_top))
    }

    /// `2·half_width + 1` modes centred on the one nearest `omega`.
    pub fn around(line: &LineParams, omega: f64, half_width: usize) -> Result<Self> {
        require_positive("omega_rad_s", omega)?;
        let matrix = crate::line::build_inverse_inductance_matrix(line);
        let target = (omega * line.dx() / line.velocity()).powi(2);
        let nearest = nearest_index(&matrix, line, target, omega)?;
        let lo = nearest.saturating_sub(half_width).max(1);
        let hi = (nearest + half_width + 1).min(line.nodes);
        Self::window(line, lo..hi)
    }

    fn assemble(line: &LineParams, indices: Vec<usize>, frequencies: Vec<f64>, omega_top: f64) -> Self {
        Self {
            indices,
            frequencies,
            omega_c: line.omega_c(),
            omega_top,
            z0: line.impedance(),
            delay: line.delay(),
            available: line.nodes - 1,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Highest mode index the parent line supports.
    pub fn available(&self) -> usize {
        self.available
    }
}

fn nearest_index(matrix: &SymTridiagonal, line: &LineParams, target: f64, omega: f64) -> Result<usize> {
    let n = line.nodes;
    let below = matrix.count_below(target);
    let mut best = None;
    for j in [below.saturating_sub(1), below.min(n - 1)] {
        if j == 0 {
            continue;
        }
        let w = line.frequency(matrix.kth_eigenvalue(j)?);
        if best.is_none_or(|(_, d)| (w - omega).abs() < d) {
            best = Some((j, (w - omega).abs()));
        }
    }
    best.map(|(j, _)| j).ok_or(ModelError::BandEdge { omega_r: omega, omega_top: line.frequency(matrix.kth_eigenvalue(n - 1)?) })
}

/// Coherent amplitudes `α_j(t)` of the driven input-line modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes {
    pub indices: Vec<usize>,
    pub alphas: Vec<Complex64>,
    pub time: f64,
}

impl ModeAmplitudes {
    /// Mean photon number carried by the line.
    pub fn total_photons(&self) -> f64 {
        pairwise_sum(&self.alphas.iter().map(|a| a.norm_sqr()).collect::<Vec<_>>())
    }

    /// Free evolution `α_j ← α_j e^{-iω_j(t - t₀)}`.
    pub fn evolve_to(&self, modes: &ModeSet, t: f64) -> Self {
        let dt = t - self.time;
        let alphas = self
            .alphas
            .iter()
            .zip(&modes.frequencies)
            .map(|(a, &w)| a * Complex64::new(0.0, -w * dt).exp())
            .collect();
        Self { indices: self.indices.clone(), alphas, time: t }
    }
}

/// `α_j(t) = i√(Z₀ω_c/(πħω_j)) e^{-iω_j t} ∫_{τ≤t} e^{iω_jτ} I(τ) dτ`, with `τ` in source time.
pub fn drive_line_modes(modes: &ModeSet, pulse: &Pulse, t: f64) -> Result<ModeAmplitudes> {
    let (start, end) = pulse.support();
    let upper = t.min(end);
    let alphas = modes
        .frequencies
        .iter()
        .map(|&w| {
            if upper <= start {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let s = ComplexFrequency::oscillatory(w);
            let integral = pulse.source_transform(s, start, upper)?;
            let scale = (modes.z0 * modes.omega_c / (PI * HBAR * w)).sqrt();
            Ok(Complex64::i() * scale * Complex64::new(0.0, -w * t).exp() * integral)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeAmplitudes { indices: modes.indices.clone(), alphas, time: t })
}

/// Resonator–mode couplings `f_j = -i(-1)^j √(Z₀ω_rω_c/(2πω_jL₀))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSet {
    pub modes: ModeSet,
    pub couplings: Vec<Complex64>,
}

pub fn coupling_coefficients(modes: &ModeSet, params: &ResonatorParams) -> CouplingSet {
    let wr = params.omega_r();
    let couplings = modes
        .indices
        .iter()
        .zip(&modes.frequencies)
        .map(|(&j, &w)| {
            let parity = if j % 2 == 0 { 1.0 } else { -1.0 };
            let magnitude = (params.z0 * wr * modes.omega_c / (2.0 * PI * w * params.l0)).sqrt();
            Complex64::new(0.0, -parity * magnitude)
        })
        .collect();
    CouplingSet { modes: modes.clone(), couplings }
}

/// How the golden-rule delta function is spread over discrete modes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Regularization {
    /// `1/Δω` density of states at the mode nearest `ω_r`.
    #[default]
    NearestMode,
    /// Lorentzian of half-width `factor · ω_c`.
    Lorentzian { factor: f64 },
    /// Normalized Gaussian of standard deviation `width` (rad/s).
    Gaussian { width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaEstimate {
    pub finite_sum: f64,
    /// Continuum limit `Z₀/L₀`.
    pub continuum: f64,
}

impl KappaEstimate {
    pub fn relative_error(&self) -> f64 {
        (self.finite_sum - self.continuum).abs() / self.continuum
    }
}

/// Golden-rule loss rate `2πΣ|f_j|²δ(ω_r - ω_j)` over the coupling set.
pub fn markov_kappa(
    couplings: &CouplingSet,
    params: &ResonatorParams,
    regularization: Regularization,
) -> Result<KappaEstimate> {
    let wr = params.omega_r();
    let modes = &couplings.modes;
    if wr > 0.5 * modes.omega_top {
        return Err(ModelError::BandEdge { omega_r: wr, omega_top: modes.omega_top });
    }
    let finite_sum = match regularization {
        Regularization::NearestMode => {
            let k = nearest_in_set(&modes.frequencies, wr);
            if k == 0 || k + 1 >= modes.len() {
                return Err(ModelError::BandEdge { omega_r: wr, omega_top: modes.omega_top });
            }
            let spacing = 0.5 * (modes.frequencies[k + 1] - modes.frequencies[k - 1]);
            2.0 * PI * couplings.couplings[k].norm_sqr() / spacing
        }
        Regularization::Lorentzian { factor } => {
            require_positive("lorentzian_factor", factor)?;
            let eta = factor * modes.omega_c;
            let terms: Vec<f64> = couplings
                .couplings
                .iter()
                .zip(&modes.frequencies)
                .map(|(f, &w)| 2.0 * f.norm_sqr() * eta / ((wr - w).powi(2) + eta * eta))
                .collect();
            pairwise_sum(&terms)
        }
        Regularization::Gaussian { width } => {
            require_positive("gaussian_width", width)?;
            let norm = (2.0 * PI).sqrt() / width;
            let terms: Vec<f64> = couplings
                .couplings
                .iter()
                .zip(&modes.frequencies)
                .map(|(f, &w)| norm * f.norm_sqr() * (-0.5 * ((wr - w) / width).powi(2)).exp())
                .collect();
            pairwise_sum(&terms)
        }
    };
    Ok(KappaEstimate { finite_sum, continuum: params.kappa() })
}

fn nearest_in_set(freqs: &[f64], omega: f64) -> usize {
    freqs
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - omega).abs().total_cmp(&(b.1 - omega).abs()))
        .map(|(k, _)| k)
        .unwrap_or(0)
}

/// Memory integral `∫ Σ|f_j|² e^{-i(ω_j-ω_r)(t-τ)} g(τ) dτ` for a Gaussian envelope
/// `g` of duration `sigma` centred on `t`, normalized by `g(t) = 1`.
/// Tends to `κ` when the modes are dense on the scale `1/sigma`.
pub fn markov_memory_integral(couplings: &CouplingSet, params: &ResonatorParams, sigma: f64) -> Result<Complex64> {
    require_positive("sigma_s", sigma)?;
    let wr = params.omega_r();
    let terms: Vec<Complex64> = couplings
        .couplings
        .iter()
        .zip(&couplings.modes.frequencies)
        .map(|(f, &w)| {
            let detuning = w - wr;
            Complex64::new(f.norm_sqr() * (2.0 * PI).sqrt() * sigma * (-0.5 * (detuning * sigma).powi(2)).exp(), 0.0)
        })
        .collect();
    Ok(pairwise_sum_complex(&terms))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorAmplitude {
    pub alpha: Complex64,
    pub time: f64,
}

impl ResonatorAmplitude {
    pub fn photon_number(&self) -> f64 {
        photon_number(self.alpha)
    }
}

/// `κ√(2L₀/ħω_r)`, converting a pulse transform into a resonator amplitude.
fn drive_scale(params: &ResonatorParams) -> f64 {
    params.kappa() * (2.0 * params.l0 / (HBAR * params.omega_r())).sqrt()
}

/// `α_r(t) = e^{-s₀t}[α_r(0⁻) - κ√(2L₀/ħω_r) Ĩ[t]]` for `t ≥ 0`.
pub fn resonator_amplitude(
    params: &ResonatorParams,
    alpha_before: Complex64,
    pulse: &Pulse,
    t: f64,
) -> Result<ResonatorAmplitude> {
    if !(t >= 0.0) {
        return Err(invalid("t_s", format!("resonator amplitude needs t ≥ 0, got {t}")));
    }
    let s0 = params.pole();
    let transform = pulse.windowed_transform(s0, t)?;
    let alpha = (-s0.0 * t).exp() * (alpha_before - drive_scale(params) * transform);
    Ok(ResonatorAmplitude { alpha, time: t })
}

/// Amplitude `α_r(0⁻)` that `pulse` depletes exactly by `t_w`.
pub fn photon_matching(params: &ResonatorParams, pulse: &Pulse) -> Result<Complex64> {
    Ok(drive_scale(params) * pulse.laplace_at(params.pole())?)
}

/// Pulse transform `Ĩ_in[s₀]` needed to deplete `alpha_before`.
pub fn required_transform(params: &ResonatorParams, alpha_before: Complex64) -> Complex64 {
    alpha_before / drive_scale(params)
}

/// `⟨V_r⟩ = √(2ħω_r/C) Im α_r`.
pub fn expected_voltage(alpha: Complex64, params: &ResonatorParams) -> f64 {
    voltage_scale(params) * alpha.im
}

pub fn photon_number(alpha: Complex64) -> f64 {
    alpha.norm_sqr()
}

fn voltage_scale(params: &ResonatorParams) -> f64 {
    (2.0 * HBAR * params.omega_r() / params.effective_capacitance()).sqrt()
}

/// Classical fill equivalent to amplitude `alpha_fill` at `t_fill`.
pub fn fill_from_alpha(params: &ResonatorParams, alpha_fill: Complex64, t_fill: f64) -> Result<FillState> {
    let phase = if alpha_fill == Complex64::new(0.0, 0.0) { 0.0 } else { PI - alpha_fill.arg() };
    FillState::new(voltage_scale(params) * alpha_fill.norm(), phase, t_fill)
}

/// Amplitude at `t_fill` equivalent to a classical fill.
pub fn alpha_from_fill(params: &ResonatorParams, fill: &FillState) -> Complex64 {
    Complex64::from_polar(fill.amplitude / voltage_scale(params), PI - fill.phase)
}

/// Passive decay from `t_fill` to the pulse arrival: `α(0⁻) = α(t_fill) e^{s₀t_fill}`.
pub fn alpha_at_arrival(params: &ResonatorParams, alpha_fill: Complex64, t_fill: f64) -> Complex64 {
    alpha_fill * (params.pole().0 * t_fill).exp()
}
