//! Invariant suite behind the `verify` subcommand.

use crate::config::Config;
use crate::CliError;
use depletion::classical::{
    active_reset_time, design_matched_pulse, envelope, ode_oracle, oracle_grid, passive_reset_time, transient_voltage,
};
use depletion::line::{continuum_check, diagonalize};
use depletion::photons::{mean_energy, midpoint_grid, mode_weights, photon_count, reciprocal_factor};
use depletion::quantum::{
    alpha_at_arrival, alpha_from_fill, coupling_coefficients, expected_voltage, markov_kappa, resonator_amplitude,
};
use depletion::{
    FillState, GaussianPulseSpec, LineParams, ModeSet, ModelError, PhotonFormula, Pulse, Regularization, ResonatorParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Below,
    Above,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Below => "<",
            Relation::Above => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub threshold: f64,
    pub relation: Relation,
}

impl Check {
    pub fn below(name: &'static str, measured: f64, threshold: f64) -> Self {
        Self { name, measured, threshold, relation: Relation::Below }
    }

    pub fn above(name: &'static str, measured: f64, threshold: f64) -> Self {
        Self { name, measured, threshold, relation: Relation::Above }
    }

    pub fn pass(&self) -> bool {
        match self.relation {
            Relation::Below => self.measured < self.threshold,
            Relation::Above => self.measured > self.threshold,
        }
    }
}

/// Largest `|⟨V_r⟩ - V_r|` over a random scenario, relative to the peak classical voltage.
pub fn correspondence_residual(params: &ResonatorParams, rng: &mut ChaCha8Rng) -> Result<f64, ModelError> {
    let w = params.omega_r();
    let delay = rng.gen_range(0.0..2e-9);
    let fill = FillState::new(rng.gen_range(1e-6..1e-2), rng.gen_range(-PI..PI), -delay - rng.gen_range(0.1e-9..100e-9))?;
    let width = rng.gen_range(1e-9..20e-9);
    let pulse = Pulse::sinusoid(
        rng.gen_range(0.0..1e-3),
        w * rng.gen_range(0.99..1.01),
        rng.gen_range(-PI..PI),
        width,
        delay,
    )?;
    let a0 = alpha_at_arrival(params, alpha_from_fill(params, &fill), fill.time);
    let (mut worst, mut peak) = (0.0f64, 0.0f64);
    let end = width + 10e-9;
    for k in 0..=2000 {
        let t = end * k as f64 / 2000.0;
        let q = expected_voltage(resonator_amplitude(params, a0, &pulse, t)?.alpha, params);
        let c = transient_voltage(params, &fill, &pulse, t)?;
        worst = worst.max((q - c).abs());
        peak = peak.max(c.abs());
    }
    Ok(worst / peak.max(f64::MIN_POSITIVE))
}

/// Post-pulse envelope relative to the pre-pulse envelope, analytically and under the ODE oracle.
pub fn depletion_ratios(params: &ResonatorParams, rng: &mut ChaCha8Rng) -> Result<(f64, f64), ModelError> {
    let delay = 100.0 / params.omega_r();
    let fill = FillState::new(rng.gen_range(1e-5..1e-2), rng.gen_range(-PI..PI), -delay - rng.gen_range(1e-9..50e-9))?;
    let width = rng.gen_range(2e-9..20e-9);
    let pulse = design_matched_pulse(params, &fill, width, delay, 1)?;
    let before = fill.envelope_at_arrival(params);
    let analytic = envelope(params, &fill, &pulse, width)? / before;
    let grid = oracle_grid(params, width, width + 0.5e-9);
    let traj = ode_oracle(params, &fill, &pulse, &grid)?;
    let oracle = traj.envelope(params).into_iter().fold(0.0, f64::max) / before;
    Ok((analytic, oracle))
}

/// Largest analytic-vs-oracle voltage gap over `[0, 10 ns]` for a matched pulse, relative to the peak.
pub fn oracle_gap(params: &ResonatorParams) -> Result<f64, ModelError> {
    let fill = FillState::new(1e-3, 0.0, -20e-9)?;
    let pulse = design_matched_pulse(params, &fill, 10e-9, 100.0 / params.omega_r(), 1)?;
    let grid = oracle_grid(params, 0.0, 10e-9);
    let traj = ode_oracle(params, &fill, &pulse, &grid)?;
    let (mut worst, mut peak) = (0.0f64, 0.0f64);
    for (t, v) in traj.times.iter().zip(&traj.voltage) {
        let a = transient_voltage(params, &fill, &pulse, *t)?;
        worst = worst.max((v - a).abs());
        peak = peak.max(a.abs());
    }
    Ok(worst / peak)
}

/// Relative error of the nearest-mode golden-rule rate on a line with `ω_c = ω_r/spacing` and top mode `band·ω_r`.
pub fn loss_rate_error(params: &ResonatorParams, velocity: f64, spacing: f64, band: f64) -> Result<f64, ModelError> {
    let w = params.omega_r();
    let length = PI * velocity * spacing / w;
    let nodes = LineParams::nodes_for_band(params.z0, velocity, length, w, band)?;
    let line = LineParams::from_impedance(nodes, params.z0, velocity, length)?;
    let couplings = coupling_coefficients(&ModeSet::around(&line, w, 3)?, params);
    Ok(markov_kappa(&couplings, params, Regularization::NearestMode)?.relative_error())
}

pub fn run_suite(config: &Config, params: &ResonatorParams, seed: u64) -> Result<Vec<Check>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let mut worst = 0.0f64;
    for _ in 0..50 {
        worst = worst.max(correspondence_residual(params, &mut rng)?);
    }
    checks.push(Check::below("classical_quantum_correspondence", worst, 1e-6));

    let (mut analytic, mut oracle) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let (a, o) = depletion_ratios(params, &mut rng)?;
        analytic = analytic.max(a);
        oracle = oracle.max(o);
    }
    checks.push(Check::below("depletion_analytic", analytic, 1e-5));
    checks.push(Check::below("depletion_oracle", oracle, 1e-4));

    let gap = oracle_gap(params)?;
    checks.push(Check::below("oracle_equivalence", gap, 1e-4));
    let lossy = ResonatorParams::from_frequency(params.omega_r(), 1e-2 * params.omega_r(), params.z0)?;
    checks.push(Check::above("oracle_gap_growth_at_low_q", oracle_gap(&lossy)? / gap, 1.0));

    let v = config.line.velocity_m_s;
    checks.push(Check::below("loss_rate_sum", loss_rate_error(params, v, 100.0, 20.0)?, 1e-2));
    checks.push(Check::below("loss_rate_sum_refined", loss_rate_error(params, v, 400.0, 80.0)?, 1e-3));

    let es = diagonalize(&LineParams::new(21, 1.0, 1.0, 1.0)?)?;
    let report = continuum_check(&es);
    checks.push(Check::below("dc_mode_eigenvalue", es.eigenvalues[0].abs(), 1e-12));
    let closed_form = es
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(j, c)| (c - 4.0 * (j as f64 * PI / 42.0).sin().powi(2)).abs())
        .fold(0.0, f64::max);
    checks.push(Check::below("chain_dispersion_closed_form", closed_form, 1e-10));
    checks.push(Check::below("mode_orthogonality", es.orthogonality_error(), 1e-12));
    checks.push(Check::below("end_parity_mismatch", if report.parity_alternates { 0.0 } else { 1.0 }, 0.5));
    checks.push(Check::below("continuum_dispersion_j1", report.dispersion_by_mode[0], 0.02));

    let (spec, _) = config.photon_spec()?;
    let delta = config.photon.delta_omega_rad_s.unwrap_or(spec.bandwidth / 100.0);
    let weights = mode_weights(&spec, &midpoint_grid(&spec, delta, config.photon.span)?, delta)?;
    let total: f64 = weights.iter().map(|c| c.norm_sqr()).sum();
    checks.push(Check::below("weight_normalization", (total - 1.0).abs(), 1e-6));
    let mut narrow = 0.0f64;
    for theta in [0.0, PI / 4.0, PI / 2.0, 2.0] {
        let s = GaussianPulseSpec::new(10.0 * 2f64.sqrt(), 1.0, theta)?;
        narrow = narrow.max((reciprocal_factor(&s, PhotonFormula::Corrected)? - 1.0).abs());
    }
    checks.push(Check::below("narrow_band_factor", narrow, 1e-20));
    let mut round_trip = 0.0f64;
    for z in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let s = GaussianPulseSpec::new(z * 2f64.sqrt() * 1e10, 1e10, 0.0)?;
        let n = photon_count(&s, 1e-21, PhotonFormula::Corrected)?;
        round_trip = round_trip.max((mean_energy(&s, n, PhotonFormula::Corrected)? / 1e-21 - 1.0).abs());
    }
    checks.push(Check::below("energy_round_trip", round_trip, 1e-10));

    let delay = config.delay(params)?;
    let pulse = Pulse::zero(config.pulse.width_s, delay)?;
    let speedup = passive_reset_time(params, 0.01) / active_reset_time(&pulse);
    checks.push(Check::above("speedup_over_passive_reset", speedup, 100.0));
    Ok(checks)
}
