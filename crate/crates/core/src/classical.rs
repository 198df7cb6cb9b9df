//! Classical transient dynamics of the pulse-driven, damped series-LC resonator.
//!
//! The analytic path keeps the high-Q poles at `-κ/2 ± iω_r`; [`ode_oracle`]
//! integrates the full second-order equation and serves as the reference.

use crate::error::{invalid, require_positive, ModelError, Result};
use crate::numeric::{wrap_phase, TWO_PI};
use crate::ode::{Dopri5, StepControl};
use crate::pulse::{ComplexFrequency, Pulse, Waveform};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Upper bound on κ/ω_r for the high-Q analytic solution.
pub const HIGH_Q_LIMIT: f64 = 0.01;
/// Oracle output grids must resolve at least this many points per period.
pub const ORACLE_POINTS_PER_PERIOD: f64 = 40.0;

/// Measured qubit state; shifts the resonator by `±χ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QubitState {
    Excited,
    Ground,
    #[default]
    Unmeasured,
}

impl QubitState {
    pub fn sign(self) -> f64 {
        match self {
            QubitState::Excited => 1.0,
            QubitState::Ground => -1.0,
            QubitState::Unmeasured => 0.0,
        }
    }
}

/// Series-LC readout resonator coupled to a feedline of impedance `Z₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorParams {
    pub l0: f64,
    pub c0: f64,
    pub z0: f64,
    pub qubit: QubitState,
    pub chi: f64,
}

impl ResonatorParams {
    pub fn new(l0: f64, c0: f64, z0: f64) -> Result<Self> {
        require_positive("l0_h", l0)?;
        require_positive("c0_f", c0)?;
        require_positive("z0_ohm", z0)?;
        Ok(Self { l0, c0, z0, qubit: QubitState::Unmeasured, chi: 0.0 })
    }

    /// Builds `L₀ = Z₀/κ` and `C₀ = 1/(ω²L₀)` from a bare frequency and loss rate.
    pub fn from_frequency(omega: f64, kappa: f64, z0: f64) -> Result<Self> {
        require_positive("omega_r_rad_s", omega)?;
        require_positive("kappa_rad_s", kappa)?;
        let l0 = z0 / kappa;
        Self::new(l0, 1.0 / (omega * omega * l0), z0)
    }

    pub fn with_qubit(self, qubit: QubitState, chi: f64) -> Result<Self> {
        if !chi.is_finite() {
            return Err(invalid("chi_rad_s", "must be finite"));
        }
        let out = Self { qubit, chi, ..self };
        if out.omega_r() <= 0.0 {
            return Err(invalid("chi_rad_s", "shifted frequency must stay positive"));
        }
        Ok(out)
    }

    /// `1/√(L₀C₀)` before the dispersive shift.
    pub fn bare_omega(&self) -> f64 {
        1.0 / (self.l0 * self.c0).sqrt()
    }

    /// Qubit-conditioned resonance `ω_r`.
    pub fn omega_r(&self) -> f64 {
        self.bare_omega() + self.qubit.sign() * self.chi
    }

    /// Loss rate into the feedline, `κ = Z₀/L₀`.
    pub fn kappa(&self) -> f64 {
        self.z0 / self.l0
    }

    /// Capacitance of the equivalent LC that resonates at the shifted `ω_r`.
    pub fn effective_capacitance(&self) -> f64 {
        let w = self.omega_r();
        1.0 / (self.l0 * w * w)
    }

    pub fn pole(&self) -> ComplexFrequency {
        ComplexFrequency(Complex64::new(0.5 * self.kappa(), self.omega_r()))
    }

    pub fn period(&self) -> f64 {
        TWO_PI / self.omega_r()
    }

    pub fn ensure_high_q(&self) -> Result<()> {
        let ratio = self.kappa() / self.omega_r();
        if ratio < HIGH_Q_LIMIT {
            Ok(())
        } else {
            Err(invalid("kappa", format!("κ/ω_r = {ratio:e} is not below {HIGH_Q_LIMIT}")))
        }
    }
}

/// Resonator field left by the measurement tone at `t_fill < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FillState {
    pub amplitude: f64,
    pub phase: f64,
    pub time: f64,
}

impl FillState {
    pub fn new(amplitude: f64, phase: f64, time: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude >= 0.0) {
            return Err(invalid("v_fill_v", format!("must be finite and ≥ 0, got {amplitude}")));
        }
        if !phase.is_finite() {
            return Err(invalid("theta_fill_rad", "must be finite"));
        }
        if !(time.is_finite() && time < 0.0) {
            return Err(invalid("t_fill_s", format!("must precede the pulse arrival (< 0), got {time}")));
        }
        Ok(Self { amplitude, phase, time })
    }

    pub fn empty(time: f64) -> Result<Self> {
        Self::new(0.0, 0.0, time)
    }

    /// Envelope of the undisturbed decay at `t = 0`.
    pub fn envelope_at_arrival(&self, params: &ResonatorParams) -> f64 {
        self.amplitude * (0.5 * params.kappa() * self.time).exp()
    }
}

/// Pulse transform required to cancel a given fill.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingSolution {
    pub required_magnitude: f64,
    pub required_phase: f64,
    pub branch_index: i64,
}

impl MatchingSolution {
    pub fn target(&self) -> Complex64 {
        Complex64::from_polar(self.required_magnitude, self.required_phase)
    }
}

/// Undriven decay `V_fill e^{-κ(t-t_fill)/2} sin(ω_r(t-t_fill) + θ_fill)`.
pub fn natural_voltage(params: &ResonatorParams, fill: &FillState, t: f64) -> Result<f64> {
    if t < fill.time {
        return Err(ModelError::BeforeFill { t, t_fill: fill.time });
    }
    let dt = t - fill.time;
    Ok(fill.amplitude * (-0.5 * params.kappa() * dt).exp() * (params.omega_r() * dt + fill.phase).sin())
}

/// `e^{-s₀t} Ĩ[t]`, the driven phasor in the lab frame.
fn driven_phasor(params: &ResonatorParams, pulse: &Pulse, t: f64) -> Result<Complex64> {
    if t <= 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let s0 = params.pole();
    Ok((-s0.0 * t).exp() * pulse.windowed_transform(s0, t)?)
}

/// Driven response `-2ω_rZ₀ Im(e^{-s₀t} Ĩ[t])`; zero before arrival.
pub fn driven_voltage(params: &ResonatorParams, pulse: &Pulse, t: f64) -> Result<f64> {
    Ok(-2.0 * params.omega_r() * params.z0 * driven_phasor(params, pulse, t)?.im)
}

/// Resonator voltage `V_nat + V_dr`.
pub fn transient_voltage(params: &ResonatorParams, fill: &FillState, pulse: &Pulse, t: f64) -> Result<f64> {
    Ok(natural_voltage(params, fill, t)? + driven_voltage(params, pulse, t)?)
}

/// Slowly varying complex amplitude `P` with `V_r = Im(e^{iω_r t} P)`; `|P|` is the envelope.
pub fn envelope_phasor(params: &ResonatorParams, fill: &FillState, pulse: &Pulse, t: f64) -> Result<Complex64> {
    if t < fill.time {
        return Err(ModelError::BeforeFill { t, t_fill: fill.time });
    }
    let w = params.omega_r();
    let kappa = params.kappa();
    let natural = Complex64::from_polar(
        fill.amplitude * (-0.5 * kappa * (t - fill.time)).exp(),
        fill.phase - w * fill.time,
    );
    let driven = if t > 0.0 {
        let s0 = params.pole();
        pulse.windowed_transform(s0, t)?.conj() * (2.0 * w * params.z0 * (-0.5 * kappa * t).exp())
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok(natural + driven)
}

/// Voltage envelope `|P(t)|`.
pub fn envelope(params: &ResonatorParams, fill: &FillState, pulse: &Pulse, t: f64) -> Result<f64> {
    Ok(envelope_phasor(params, fill, pulse, t)?.norm())
}

/// Amplitude and phase `Ĩ_in[s₀]` must have to cancel `fill` after the pulse.
pub fn matching_conditions(params: &ResonatorParams, fill: &FillState, branch: i64) -> MatchingSolution {
    let w = params.omega_r();
    let required_magnitude = (0.5 * params.kappa() * fill.time).exp() * fill.amplitude / (2.0 * w * params.z0);
    let raw = (2 * branch - 1) as f64 * PI + w * fill.time - fill.phase;
    MatchingSolution { required_magnitude, required_phase: wrap_phase(raw), branch_index: branch }
}

/// Designs a resonant sinusoid of width `width` whose transform meets the matching
/// conditions for `fill`.
pub fn design_matched_pulse(
    params: &ResonatorParams,
    fill: &FillState,
    width: f64,
    delay: f64,
    branch: i64,
) -> Result<Pulse> {
    require_positive("t_w_s", width)?;
    let w = params.omega_r();
    if fill.amplitude == 0.0 {
        return Pulse::sinusoid(0.0, w, 0.0, width, delay);
    }
    let s0 = params.pole();
    let target = matching_conditions(params, fill, branch).target();
    // transform is linear in (A cos θ_p, A sin θ_p) through the sine and cosine members
    let sine = Pulse::sinusoid(1.0, w, 0.0, width, delay)?.laplace_at(s0)?;
    let cosine = Pulse::sinusoid(1.0, w, 0.5 * PI, width, delay)?.laplace_at(s0)?;
    let magnitude = sine.norm().max(cosine.norm());
    let det = sine.re * cosine.im - cosine.re * sine.im;
    if magnitude < 1e-15 * width || det.abs() < 1e-12 * sine.norm() * cosine.norm() {
        return Err(ModelError::SingularFamily { magnitude });
    }
    let x = (target.re * cosine.im - cosine.re * target.im) / det;
    let y = (sine.re * target.im - target.re * sine.im) / det;
    Pulse::sinusoid(x.hypot(y), w, y.atan2(x), width, delay)
}

/// Which closed form to use for the reflected signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormula {
    /// Resonator term decays as `e^{-κΔt/2}` and follows `cos(ω_r t - arg Ĩ + θ_r)`,
    /// consistent with differentiating the transient solution.
    #[default]
    Decaying,
    /// Alternative form with `e^{+κΔt/2}` and `cos(ω_r t + arg Ĩ + θ_r)`, kept for comparison.
    Verbatim,
}

/// Outgoing voltage `Z₀(I_in - C₀V̇_r)` on the output feedline.
pub fn output_signal(
    params: &ResonatorParams,
    fill: &FillState,
    pulse: &Pulse,
    t: f64,
    formula: OutputFormula,
) -> Result<f64> {
    if t < fill.time {
        return Err(ModelError::BeforeFill { t, t_fill: fill.time });
    }
    let w = params.omega_r();
    let kappa = params.kappa();
    let theta_r = (kappa / (2.0 * w)).asin();
    let dt = t - fill.time;
    let (growth, arg_sign) = match formula {
        OutputFormula::Decaying => (-1.0, -1.0),
        OutputFormula::Verbatim => (1.0, 1.0),
    };
    let natural = fill.amplitude * (growth * 0.5 * kappa * dt).exp() * (w * dt + fill.phase + theta_r).cos();
    let driven = if t > 0.0 {
        let transform = pulse.windowed_transform(params.pole(), t)?;
        2.0 * params.z0 * w * transform.norm() * (-0.5 * kappa * t).exp()
            * (w * t + arg_sign * transform.arg() + theta_r).cos()
    } else {
        0.0
    };
    Ok(params.z0 * pulse.incident(t) - kappa / w * (natural + driven))
}

/// Passive time for the envelope to fall to `fraction` of its value.
pub fn passive_reset_time(params: &ResonatorParams, fraction: f64) -> f64 {
    2.0 * (1.0 / fraction).ln() / params.kappa()
}

/// Time from pulse emission to the end of depletion, `L_c/v + t_w`.
pub fn active_reset_time(pulse: &Pulse) -> f64 {
    pulse.delay() + pulse.width()
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub rtol: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { rtol: 1e-10 }
    }
}

/// Sampled solution of the full oscillator equation.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeTrajectory {
    pub times: Vec<f64>,
    pub voltage: Vec<f64>,
    pub rate: Vec<f64>,
    pub steps: usize,
}

impl OdeTrajectory {
    /// Instantaneous envelope `√(V² + ((V̇ + κV/2)/ω_r)²)` of the free oscillation.
    pub fn envelope(&self, params: &ResonatorParams) -> Vec<f64> {
        let (w, k) = (params.omega_r(), params.kappa());
        self.voltage
            .iter()
            .zip(&self.rate)
            .map(|(&v, &rate)| v.hypot((rate + 0.5 * k * v) / w))
            .collect()
    }

    /// Outgoing voltage `Z₀(I_in - C₀V̇_r)` along the trajectory.
    pub fn output_signal(&self, params: &ResonatorParams, pulse: &Pulse) -> Vec<f64> {
        let c = params.effective_capacitance();
        self.times
            .iter()
            .zip(&self.rate)
            .map(|(&t, &rate)| params.z0 * (pulse.incident(t) - c * rate))
            .collect()
    }
}

/// Integrates `V̈ = -ω_r²V - κV̇ + 2ω_r²Z₀ I(t - L_c/v)` from `t_fill`.
pub fn ode_oracle(params: &ResonatorParams, fill: &FillState, pulse: &Pulse, grid: &[f64]) -> Result<OdeTrajectory> {
    ode_oracle_with(params, fill, pulse, grid, OracleOptions::default())
}

pub fn ode_oracle_with(
    params: &ResonatorParams,
    fill: &FillState,
    pulse: &Pulse,
    grid: &[f64],
    options: OracleOptions,
) -> Result<OdeTrajectory> {
    let w = params.omega_r();
    let kappa = params.kappa();
    let period = TWO_PI / w;
    let max_dt = period / ORACLE_POINTS_PER_PERIOD;
    for pair in grid.windows(2) {
        let dt = pair[1] - pair[0];
        if dt < 0.0 {
            return Err(invalid("grid", "times must be non-decreasing"));
        }
        if dt > max_dt * (1.0 + 1e-9) {
            return Err(ModelError::GridTooCoarse { dt, max_dt });
        }
    }
    if let Some(&first) = grid.first() {
        if first < fill.time {
            return Err(ModelError::BeforeFill { t: first, t_fill: fill.time });
        }
    }

    let (s, c) = fill.phase.sin_cos();
    let y0 = [fill.amplitude * s, fill.amplitude * (w * c - 0.5 * kappa * s)];
    let peak = match pulse.waveform() {
        Waveform::Sinusoid { amplitude, .. } => amplitude.abs(),
        Waveform::Tabulated { samples, .. } => samples.iter().fold(0.0f64, |m, x| m.max(x.abs())),
    };
    let scale = fill.amplitude.max(2.0 * w * params.z0 * peak * pulse.width()).max(f64::MIN_POSITIVE);
    let control = StepControl {
        rtol: options.rtol,
        atol: [options.rtol * scale, options.rtol * scale * w],
        min_step: period * 1e-12,
        max_steps: 500_000_000,
    };
    let drive = 2.0 * w * w * params.z0;
    let rhs = |t: f64, y: &[f64; 2]| [y[1], -w * w * y[0] - kappa * y[1] + drive * pulse.incident(t)];
    let mut solver = Dopri5::new(rhs, fill.time, y0, period / 100.0, control);

    let mut breaks = vec![0.0, pulse.width()];
    if let Waveform::Tabulated { dt, samples } = pulse.waveform() {
        breaks.extend((1..samples.len() - 1).map(|k| k as f64 * dt));
    }
    breaks.retain(|&b| b > fill.time);
    breaks.sort_by(|a, b| a.total_cmp(b));
    let mut next_break = 0;

    let mut trajectory = OdeTrajectory {
        times: Vec::with_capacity(grid.len()),
        voltage: Vec::with_capacity(grid.len()),
        rate: Vec::with_capacity(grid.len()),
        steps: 0,
    };
    for &t in grid {
        while next_break < breaks.len() && breaks[next_break] <= t {
            solver.advance_to(breaks[next_break])?;
            solver.restart();
            next_break += 1;
        }
        solver.advance_to(t)?;
        let y = solver.state();
        trajectory.times.push(t);
        trajectory.voltage.push(y[0]);
        trajectory.rate.push(y[1]);
    }
    trajectory.steps = solver.steps_taken();
    Ok(trajectory)
}

/// Uniform grid on `[start, end]` with at least the oracle's resolution.
pub fn oracle_grid(params: &ResonatorParams, start: f64, end: f64) -> Vec<f64> {
    let max_dt = params.period() / ORACLE_POINTS_PER_PERIOD;
    let n = ((end - start) / max_dt).ceil().max(1.0) as usize;
    let dt = (end - start) / n as f64;
    (0..=n).map(|k| start + k as f64 * dt).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const OMEGA: f64 = TWO_PI * 10e9;

    fn params() -> ResonatorParams {
        ResonatorParams::from_frequency(OMEGA, OMEGA * 1e-4, 50.0).unwrap()
    }

    #[test]
    fn derived_accessors() {
        let p = params();
        assert!((p.omega_r() - OMEGA).abs() < 1e-6 * OMEGA);
        assert!((p.kappa() - OMEGA * 1e-4).abs() < 1e-9 * OMEGA);
        let shifted = p.with_qubit(QubitState::Ground, 1e7).unwrap();
        assert!((shifted.omega_r() - (p.omega_r() - 1e7)).abs() < 1e-3);
        assert!((shifted.effective_capacitance() * shifted.l0 * shifted.omega_r().powi(2) - 1.0).abs() < 1e-12);
        assert!(p.ensure_high_q().is_ok());
        let low_q = ResonatorParams::from_frequency(OMEGA, OMEGA * 0.02, 50.0).unwrap();
        assert!(low_q.ensure_high_q().is_err());
    }

    #[test]
    fn natural_voltage_examples() {
        let p = params();
        let empty = FillState::empty(-10e-9).unwrap();
        assert_eq!(natural_voltage(&p, &empty, 1e-9).unwrap(), 0.0);

        let fill = FillState::new(2e-3, PI / 2.0, -10e-9).unwrap();
        assert!((natural_voltage(&p, &fill, fill.time).unwrap() - 2e-3).abs() < 1e-18);

        // after 2/κ the envelope is V e^{-1}
        let t = fill.time + 2.0 / p.kappa();
        let env = envelope(&p, &fill, &Pulse::zero(1e-9, 0.0).unwrap(), t).unwrap();
        assert!((env - 2e-3 * (-1.0f64).exp()).abs() < 1e-15);
        assert!(matches!(natural_voltage(&p, &fill, -11e-9), Err(ModelError::BeforeFill { .. })));
    }

    #[test]
    fn zero_pulse_leaves_pure_decay() {
        let p = params();
        let fill = FillState::new(1e-3, 0.4, -5e-9).unwrap();
        let zero = Pulse::zero(2e-9, 1e-9).unwrap();
        for k in 0..50 {
            let t = -4e-9 + k as f64 * 0.37e-9;
            assert_eq!(driven_voltage(&p, &zero, t).unwrap(), 0.0);
            assert_eq!(transient_voltage(&p, &fill, &zero, t).unwrap(), natural_voltage(&p, &fill, t).unwrap());
        }
    }

    #[test]
    fn driven_closed_form_after_pulse() {
        let p = params();
        let pulse = Pulse::sinusoid(0.01, OMEGA, 0.3, 3e-9, 0.0).unwrap();
        let transform = pulse.laplace_at(p.pole()).unwrap();
        for t in [3e-9, 5.5e-9, 40e-9] {
            let expected = 2.0 * OMEGA * p.z0 * (-0.5 * p.kappa() * t).exp() * transform.norm()
                * (p.omega_r() * t - transform.arg()).sin();
            let got = driven_voltage(&p, &pulse, t).unwrap();
            assert!((got - expected).abs() < 1e-9 * expected.abs().max(1e-3), "{got} vs {expected}");
        }
    }

    #[test]
    fn envelope_bounds_voltage() {
        let p = params();
        let fill = FillState::new(1e-3, 1.0, -5e-9).unwrap();
        let pulse = Pulse::sinusoid(1e-5, OMEGA, 0.2, 2e-9, 1e-9).unwrap();
        for k in 0..200 {
            let t = -5e-9 + k as f64 * 0.05e-9;
            let v = transient_voltage(&p, &fill, &pulse, t).unwrap();
            let phasor = envelope_phasor(&p, &fill, &pulse, t).unwrap();
            let rebuilt = (Complex64::new(0.0, p.omega_r() * t).exp() * phasor).im;
            assert!((v - rebuilt).abs() < 1e-12 * phasor.norm().max(1e-9));
        }
    }

    #[test]
    fn matching_examples() {
        let p = params();
        let empty = FillState::empty(-50e-9).unwrap();
        assert_eq!(matching_conditions(&p, &empty, 1).required_magnitude, 0.0);

        let fill = FillState::new(1e-3, 0.7, -50e-9).unwrap();
        let shifted = FillState { phase: fill.phase + TWO_PI, ..fill };
        let a = matching_conditions(&p, &fill, 1);
        let b = matching_conditions(&p, &shifted, 1);
        assert!((a.required_phase - b.required_phase).abs() < 1e-9);
        assert!(a.required_phase > -PI && a.required_phase <= PI);
        assert!(a.required_magnitude < fill.amplitude / (2.0 * p.omega_r() * p.z0));
        // branch index only shifts by whole turns
        let c = matching_conditions(&p, &fill, -3);
        assert!((wrap_phase(a.required_phase - c.required_phase)).abs() < 1e-9);
        assert_eq!(c.branch_index, -3);
    }

    #[test]
    fn designed_pulse_round_trips_targets() {
        let p = params();
        let fill = FillState::new(3e-3, 2.1, -20e-9).unwrap();
        let pulse = design_matched_pulse(&p, &fill, 7.3 * p.period(), 1.5e-9, 1).unwrap();
        let got = pulse.laplace_at(p.pole()).unwrap();
        let want = matching_conditions(&p, &fill, 1);
        assert!((got.norm() - want.required_magnitude).abs() < 1e-10 * want.required_magnitude);
        assert!(wrap_phase(got.arg() - want.required_phase).abs() < 1e-10);
    }

    #[test]
    fn empty_fill_designs_zero_pulse() {
        let p = params();
        let fill = FillState::empty(-20e-9).unwrap();
        let pulse = design_matched_pulse(&p, &fill, 1e-9, 0.0, 1).unwrap();
        assert!(matches!(pulse.waveform(), Waveform::Sinusoid { amplitude, .. } if *amplitude == 0.0));
    }

    #[test]
    fn matched_pulse_depletes_analytically() {
        let p = params();
        let fill = FillState::new(1e-3, 0.0, -50e-9).unwrap();
        let tw = 10e-9;
        let pulse = design_matched_pulse(&p, &fill, tw, 1.59e-9, 1).unwrap();
        let before = fill.envelope_at_arrival(&p);
        let v = transient_voltage(&p, &fill, &pulse, 1.5 * tw).unwrap();
        assert!(v.abs() < 1e-6 * before);
        assert!(envelope(&p, &fill, &pulse, tw).unwrap() < 1e-10 * before);
    }

    #[test]
    fn output_signal_zero_without_excitation() {
        let p = params();
        let fill = FillState::empty(-5e-9).unwrap();
        let pulse = Pulse::zero(1e-9, 0.0).unwrap();
        for formula in [OutputFormula::Decaying, OutputFormula::Verbatim] {
            assert_eq!(output_signal(&p, &fill, &pulse, 0.5e-9, formula).unwrap(), 0.0);
        }
    }

    #[test]
    fn reset_times() {
        let p = params();
        let t = passive_reset_time(&p, 0.01);
        assert!((t * p.kappa() - 2.0 * 100f64.ln()).abs() < 1e-12);
        let pulse = Pulse::zero(10e-9, 1.5e-9).unwrap();
        assert!((active_reset_time(&pulse) - 11.5e-9).abs() < 1e-20);
    }

    // exact free solution with the damped frequency and the same initial data
    fn damped_solution(p: &ResonatorParams, fill: &FillState, t: f64) -> f64 {
        let (w, k) = (p.omega_r(), p.kappa());
        let wd = (w * w - 0.25 * k * k).sqrt();
        let v0 = fill.amplitude * fill.phase.sin();
        let vd0 = fill.amplitude * (w * fill.phase.cos() - 0.5 * k * fill.phase.sin());
        let dt = t - fill.time;
        (-0.5 * k * dt).exp() * (v0 * (wd * dt).cos() + (vd0 + 0.5 * k * v0) / wd * (wd * dt).sin())
    }

    #[test]
    fn oracle_rejects_coarse_grid() {
        let p = params();
        let fill = FillState::new(1e-3, 0.0, -1e-9).unwrap();
        let pulse = Pulse::zero(1e-9, 0.0).unwrap();
        let grid = [0.0, p.period() / 10.0];
        assert!(matches!(ode_oracle(&p, &fill, &pulse, &grid), Err(ModelError::GridTooCoarse { .. })));
    }

    #[test]
    fn oracle_follows_closed_form_over_short_window() {
        let p = params();
        let fill = FillState::new(1e-3, 0.3, -2e-9).unwrap();
        let pulse = Pulse::zero(1e-9, 0.0).unwrap();
        let grid = oracle_grid(&p, fill.time, 2e-9);
        let traj = ode_oracle(&p, &fill, &pulse, &grid).unwrap();
        for (t, v) in traj.times.iter().zip(&traj.voltage) {
            let exact = damped_solution(&p, &fill, *t);
            assert!((v - exact).abs() < 1e-8 * fill.amplitude);
        }
    }
}
