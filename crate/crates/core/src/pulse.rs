//! Finite-support drive pulses and their complex-frequency transforms.
//!
//! Time origin: `t = 0` is the instant the pulse front reaches the resonator.
//! The source emits on `[-delay, -delay + t_w]`, where `delay = L_c / v`, so the
//! current incident on the resonator is `I(t - delay)` and is non-zero only on
//! `[0, t_w]`.

use crate::error::{invalid, require_positive, ModelError, Result};
use crate::numeric::{exp_integral, gauss_legendre, TWO_PI};
use num_complex::Complex64;

/// Minimum samples per carrier period accepted for tabulated transforms.
pub const MIN_SAMPLES_PER_PERIOD: f64 = 8.0;
/// Quadrature density used for tabulated transforms.
pub const QUADRATURE_POINTS_PER_PERIOD: f64 = 20.0;
const MIN_NODES_PER_INTERVAL: usize = 8;

/// A complex frequency `s`; the resonator pole is `s₀ = κ/2 + iω_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexFrequency(pub Complex64);

impl ComplexFrequency {
    /// Decay-convention pole `κ/2 + iω`.
    pub fn resonator(kappa: f64, omega: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite() && omega.is_finite()) {
            return Err(invalid("kappa", format!("need finite κ ≥ 0, got {kappa}")));
        }
        Ok(Self(Complex64::new(0.5 * kappa, omega)))
    }

    /// Purely oscillatory `iω`.
    pub fn oscillatory(omega: f64) -> Self {
        Self(Complex64::new(0.0, omega))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Waveform {
    /// `A sin(ω t + θ)` in source time, on a window of width `width`.
    Sinusoid { amplitude: f64, omega: f64, phase: f64, width: f64 },
    /// Uniform samples starting at the emission instant, linearly interpolated.
    Tabulated { dt: f64, samples: Vec<f64> },
}

/// Drive current waveform emitted by the source.
#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    waveform: Waveform,
    delay: f64,
    zero_dc: bool,
}

impl Pulse {
    pub fn sinusoid(amplitude: f64, omega: f64, phase: f64, width: f64, delay: f64) -> Result<Self> {
        require_positive("t_w_s", width)?;
        if !amplitude.is_finite() || !omega.is_finite() || !phase.is_finite() {
            return Err(invalid("amplitude_a", "sinusoid parameters must be finite"));
        }
        check_delay(delay)?;
        Ok(Self {
            waveform: Waveform::Sinusoid { amplitude, omega, phase, width },
            delay,
            zero_dc: false,
        })
    }

    pub fn tabulated(dt: f64, samples: Vec<f64>, delay: f64) -> Result<Self> {
        require_positive("dt_s", dt)?;
        if samples.len() < 2 {
            return Err(invalid("samples", "need at least two samples"));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(invalid("samples", "samples must be finite"));
        }
        check_delay(delay)?;
        Ok(Self { waveform: Waveform::Tabulated { dt, samples }, delay, zero_dc: false })
    }

    /// Identically zero pulse of the given width.
    pub fn zero(width: f64, delay: f64) -> Result<Self> {
        Self::sinusoid(0.0, 0.0, 0.0, width, delay)
    }

    pub fn waveform(&self) -> &Waveform {
        &self.waveform
    }

    /// Pulse width `t_w`.
    pub fn width(&self) -> f64 {
        match &self.waveform {
            Waveform::Sinusoid { width, .. } => *width,
            Waveform::Tabulated { dt, samples } => dt * (samples.len() - 1) as f64,
        }
    }

    /// Propagation delay `L_c / v`.
    pub fn delay(&self) -> f64 {
        self.delay
    }

    /// Emission window in source time.
    pub fn support(&self) -> (f64, f64) {
        (-self.delay, -self.delay + self.width())
    }

    pub fn is_zero_dc(&self) -> bool {
        self.zero_dc
    }

    /// Returns the pulse with every current multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let waveform = match &self.waveform {
            Waveform::Sinusoid { amplitude, omega, phase, width } => Waveform::Sinusoid {
                amplitude: amplitude * factor,
                omega: *omega,
                phase: *phase,
                width: *width,
            },
            Waveform::Tabulated { dt, samples } => Waveform::Tabulated {
                dt: *dt,
                samples: samples.iter().map(|s| s * factor).collect(),
            },
        };
        Self { waveform, delay: self.delay, zero_dc: self.zero_dc }
    }

    /// Same waveform re-timed with a different propagation delay.
    pub fn with_delay(&self, delay: f64) -> Result<Self> {
        check_delay(delay)?;
        Ok(Self { waveform: self.waveform.clone(), delay, zero_dc: self.zero_dc })
    }

    /// Samples the waveform on its own window with step `dt`.
    pub fn to_tabulated(&self, dt: f64) -> Result<Self> {
        require_positive("dt_s", dt)?;
        let n = (self.width() / dt).round() as usize;
        if n < 1 || ((n as f64) * dt - self.width()).abs() > 1e-9 * self.width() {
            return Err(invalid("dt_s", "width must be an integer number of samples"));
        }
        let start = -self.delay;
        let samples = (0..=n).map(|k| self.eval(start + k as f64 * dt)).collect();
        Ok(Self { waveform: Waveform::Tabulated { dt, samples }, delay: self.delay, zero_dc: self.zero_dc })
    }

    /// Net transferred charge `∫ I dt`.
    pub fn net_charge(&self) -> f64 {
        self.local_integral(Complex64::new(0.0, 0.0), 0.0, self.width())
            .map(|c| c.re)
            .unwrap_or(f64::NAN)
    }

    fn peak_current(&self) -> f64 {
        match &self.waveform {
            Waveform::Sinusoid { amplitude, .. } => amplitude.abs(),
            Waveform::Tabulated { samples, .. } => samples.iter().fold(0.0, |m, s| m.max(s.abs())),
        }
    }

    /// Marks the pulse as DC-free after checking `|∫I dt| ≤ rel_tol · max|I| · t_w`.
    pub fn require_zero_dc(mut self, rel_tol: f64) -> Result<Self> {
        let charge = self.net_charge();
        let tolerance = rel_tol * self.peak_current() * self.width();
        if charge.abs() > tolerance {
            return Err(ModelError::NonZeroDc { charge, tolerance });
        }
        self.zero_dc = true;
        Ok(self)
    }

    /// Source current `I(t)`; exactly zero outside the emission window.
    pub fn eval(&self, t: f64) -> f64 {
        let u = t + self.delay;
        if !(0.0..=self.width()).contains(&u) {
            return 0.0;
        }
        match &self.waveform {
            Waveform::Sinusoid { amplitude, omega, phase, .. } => amplitude * (omega * t + phase).sin(),
            Waveform::Tabulated { dt, samples } => interpolate(samples, *dt, u),
        }
    }

    /// Current arriving at the resonator, `I(t - delay)`.
    pub fn incident(&self, t: f64) -> f64 {
        self.eval(t - self.delay)
    }

    /// `∫_{u0}^{u1} e^{s u} I(u - delay) du` in the resonator frame, clipped to `[0, t_w]`.
    fn local_integral(&self, s: Complex64, u0: f64, u1: f64) -> Result<Complex64> {
        let a = u0.max(0.0);
        let b = u1.min(self.width());
        if b <= a {
            return Ok(Complex64::new(0.0, 0.0));
        }
        match &self.waveform {
            Waveform::Sinusoid { amplitude, omega, phase, .. } => {
                if *amplitude == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                // sin(ωu + φ) = (e^{i(ωu+φ)} - e^{-i(ωu+φ)}) / 2i
                let phi = phase - omega * self.delay;
                let up = Complex64::from_polar(1.0, phi) * exp_integral(s + Complex64::new(0.0, *omega), a, b);
                let down = Complex64::from_polar(1.0, -phi) * exp_integral(s - Complex64::new(0.0, *omega), a, b);
                Ok((up - down) / Complex64::new(0.0, 2.0) * *amplitude)
            }
            Waveform::Tabulated { dt, samples } => tabulated_integral(samples, *dt, s, a, b),
        }
    }

    /// Windowed transform `Ĩ[t] = ∫₀ᵗ e^{s₀τ} I(τ - delay) dτ`; constant for `t ≥ t_w`.
    pub fn windowed_transform(&self, s0: ComplexFrequency, t: f64) -> Result<Complex64> {
        self.local_integral(s0.0, 0.0, t)
    }

    /// Finite-support Laplace transform `Ĩ_in[s₀] = Ĩ[t_w]`.
    pub fn laplace_at(&self, s0: ComplexFrequency) -> Result<Complex64> {
        self.windowed_transform(s0, self.width())
    }

    /// `∫_{a}^{b} e^{sτ} I(τ) dτ` in source time.
    pub fn source_transform(&self, s: ComplexFrequency, a: f64, b: f64) -> Result<Complex64> {
        let shift = (-s.0 * self.delay).exp();
        Ok(shift * self.local_integral(s.0, a + self.delay, b + self.delay)?)
    }
}

fn check_delay(delay: f64) -> Result<()> {
    if delay.is_finite() && delay >= 0.0 {
        Ok(())
    } else {
        Err(invalid("delay_s", format!("must be finite and non-negative, got {delay}")))
    }
}

fn interpolate(samples: &[f64], dt: f64, u: f64) -> f64 {
    let x = u / dt;
    let k = (x.floor() as usize).min(samples.len() - 2);
    let frac = x - k as f64;
    samples[k] + (samples[k + 1] - samples[k]) * frac
}

fn tabulated_integral(samples: &[f64], dt: f64, s: Complex64, a: f64, b: f64) -> Result<Complex64> {
    let carrier = s.im.abs();
    let mut nodes_per_interval = MIN_NODES_PER_INTERVAL;
    if carrier > 0.0 {
        let period = TWO_PI / carrier;
        let samples_per_period = period / dt;
        if samples_per_period < MIN_SAMPLES_PER_PERIOD {
            return Err(ModelError::QuadratureResolution {
                samples_per_period,
                required: MIN_SAMPLES_PER_PERIOD,
            });
        }
        let needed = (QUADRATURE_POINTS_PER_PERIOD * dt / period).ceil() as usize;
        nodes_per_interval = nodes_per_interval.max(needed);
    }
    let (x, w) = gauss_legendre(nodes_per_interval);
    let first = (a / dt).floor() as usize;
    let last = ((b / dt).ceil() as usize).min(samples.len() - 1);
    let mut total = Complex64::new(0.0, 0.0);
    for k in first..last {
        let lo = (k as f64 * dt).max(a);
        let hi = ((k + 1) as f64 * dt).min(b);
        if hi <= lo {
            continue;
        }
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let slope = (samples[k + 1] - samples[k]) / dt;
        let mut part = Complex64::new(0.0, 0.0);
        for (xi, wi) in x.iter().zip(&w) {
            let u = mid + half * xi;
            let current = samples[k] + slope * (u - k as f64 * dt);
            part += (s * u).exp() * (current * wi);
        }
        total += part * half;
    }
    Ok(total)
}
