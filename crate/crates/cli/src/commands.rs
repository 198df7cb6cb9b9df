//! Subcommand implementations.

use crate::config::{Config, Scenario, Series};
use crate::output::{num, write_text, write_toml, CsvTable};
use crate::verify;
use crate::CliError;
use depletion::classical::{
    active_reset_time, driven_voltage, envelope, matching_conditions, natural_voltage, ode_oracle, output_signal,
    passive_reset_time, design_matched_pulse, ORACLE_POINTS_PER_PERIOD,
};
use depletion::line::{continuum_check, diagonalize, LineParams};
use depletion::photons::{
    midpoint_grid, mode_weights, normalization_constant, photon_count, reciprocal_factor,
};
use depletion::quantum::{
    alpha_at_arrival, alpha_from_fill, coupling_coefficients, drive_line_modes, expected_voltage, markov_kappa,
    photon_number, resonator_amplitude,
};
use depletion::{FillState, ModeSet, PhotonFormula, Regularization, ResonatorParams};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SimulateClassical,
    MatchPulse,
    Eigenmodes,
    Quantum,
    PhotonNumber,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SimulateClassical => "simulate-classical",
            Command::MatchPulse => "match-pulse",
            Command::Eigenmodes => "eigenmodes",
            Command::Quantum => "quantum",
            Command::PhotonNumber => "photon-number",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub modes: Option<usize>,
}

/// Human-readable result lines; `failed` marks an invariant failure.
#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub failed: bool,
}

impl Report {
    fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    run: RunInfo,
    derived: Derived,
    config: &'a Config,
}

#[derive(Serialize)]
struct RunInfo {
    command: &'static str,
    version: &'static str,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    modes: Option<usize>,
    files: Vec<String>,
}

#[derive(Serialize)]
struct Derived {
    omega_r_rad_s: f64,
    kappa_rad_s: f64,
    l0_h: f64,
    c0_f: f64,
    c_eff_f: f64,
    z0_ohm: f64,
    delay_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    line_nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_c_rad_s: Option<f64>,
}

pub fn run(command: Command, config: &Config, opts: &RunOptions) -> Result<Report, CliError> {
    std::fs::create_dir_all(&opts.out_dir)?;
    let mut report = Report::default();
    let files = match command {
        Command::SimulateClassical => simulate_classical(&config.scenario()?, opts, &mut report)?,
        Command::MatchPulse => match_pulse(config, opts, &mut report)?,
        Command::Eigenmodes => eigenmodes(config, opts, &mut report)?,
        Command::Quantum => quantum(config, opts, &mut report)?,
        Command::PhotonNumber => photon_number_cmd(config, opts, &mut report)?,
        Command::Verify => verify_cmd(config, opts, &mut report)?,
    };
    let params = config.resonator_params()?;
    let line = config.line_params(&params, None)?;
    let manifest = Manifest {
        run: RunInfo {
            command: command.name(),
            version: env!("CARGO_PKG_VERSION"),
            seed: opts.seed,
            modes: opts.modes,
            files: files.iter().map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned()).collect(),
        },
        derived: Derived {
            omega_r_rad_s: params.omega_r(),
            kappa_rad_s: params.kappa(),
            l0_h: params.l0,
            c0_f: params.c0,
            c_eff_f: params.effective_capacitance(),
            z0_ohm: params.z0,
            delay_s: config.delay(&params)?,
            line_nodes: line.map(|l| l.nodes),
            omega_c_rad_s: line.map(|l| l.omega_c()),
        },
        config,
    };
    write_toml(&opts.out_dir, "manifest.toml", &manifest)?;
    Ok(report)
}

#[derive(Serialize)]
struct ClassicalSummary {
    pre_pulse_envelope_v: f64,
    post_pulse_envelope_v: f64,
    depletion_residual: f64,
    final_transform_arg_rad: f64,
    passive_reset_s: f64,
    active_reset_s: f64,
    speedup: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_max_relative_residual: Option<f64>,
}

/// Oracle samples on `grid`, integrating on a refinement that meets the oracle's resolution.
fn oracle_on(scenario: &Scenario) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let grid = &scenario.grid;
    let params = &scenario.params;
    let step = if grid.len() > 1 { grid[1] - grid[0] } else { 0.0 };
    let limit = params.period() / ORACLE_POINTS_PER_PERIOD;
    let factor = ((step / limit).ceil() as usize).max(1);
    let fine: Vec<f64> = (0..(grid.len() - 1) * factor + 1).map(|k| grid[0] + k as f64 * step / factor as f64).collect();
    let traj = ode_oracle(params, &scenario.fill, &scenario.pulse, &fine)?;
    let output = traj.output_signal(params, &scenario.pulse);
    let pick = |v: &[f64]| v.iter().step_by(factor).copied().collect::<Vec<_>>();
    Ok((pick(&traj.voltage), pick(&output)))
}

fn simulate_classical(scenario: &Scenario, opts: &RunOptions, report: &mut Report) -> Result<Vec<PathBuf>, CliError> {
    let params = &scenario.params;
    let (fill, pulse) = (&scenario.fill, &scenario.pulse);
    let s0 = params.pole();
    let mut header = vec!["t_s", "i_in_a"];
    if scenario.wants(Series::Voltage) {
        header.extend(["v_nat_v", "v_dr_v", "v_r_v"]);
    }
    if scenario.wants(Series::Envelope) {
        header.push("envelope_v");
    }
    if scenario.wants(Series::Transform) {
        header.extend(["transform_re_as", "transform_im_as", "transform_arg_rad"]);
    }
    if scenario.wants(Series::Output) {
        header.push("output_v");
    }
    let oracle = if scenario.wants(Series::Oracle) {
        header.extend(["oracle_v_r_v", "oracle_output_v"]);
        Some(oracle_on(scenario)?)
    } else {
        None
    };
    let mut table = CsvTable::create(&opts.out_dir, "classical.csv", &header)?;
    let mut worst_oracle = 0.0f64;
    let mut peak = 0.0f64;
    for (k, &t) in scenario.grid.iter().enumerate() {
        let mut row = vec![num(t), num(pulse.incident(t))];
        let v_nat = natural_voltage(params, fill, t)?;
        let v_dr = driven_voltage(params, pulse, t)?;
        peak = peak.max((v_nat + v_dr).abs());
        if scenario.wants(Series::Voltage) {
            row.extend([num(v_nat), num(v_dr), num(v_nat + v_dr)]);
        }
        if scenario.wants(Series::Envelope) {
            row.push(num(envelope(params, fill, pulse, t)?));
        }
        if scenario.wants(Series::Transform) {
            let tr = if t > 0.0 { pulse.windowed_transform(s0, t)? } else { Complex64::new(0.0, 0.0) };
            row.extend([num(tr.re), num(tr.im), num(tr.arg())]);
        }
        if scenario.wants(Series::Output) {
            row.push(num(output_signal(params, fill, pulse, t, scenario.output_formula)?));
        }
        if let Some((v, out)) = &oracle {
            worst_oracle = worst_oracle.max((v[k] - v_nat - v_dr).abs());
            row.extend([num(v[k]), num(out[k])]);
        }
        table.row(&row)?;
    }
    let csv = table.finish()?;

    let before = fill.envelope_at_arrival(params);
    let after = envelope(params, fill, pulse, pulse.width())?;
    let passive = passive_reset_time(params, 0.01);
    let active = active_reset_time(pulse);
    let summary = ClassicalSummary {
        pre_pulse_envelope_v: before,
        post_pulse_envelope_v: after,
        depletion_residual: if before > 0.0 { after / before } else { 0.0 },
        final_transform_arg_rad: pulse.laplace_at(s0)?.arg(),
        passive_reset_s: passive,
        active_reset_s: active,
        speedup: passive / active,
        oracle_max_relative_residual: oracle.as_ref().map(|_| worst_oracle / peak.max(f64::MIN_POSITIVE)),
    };
    let summary_path = write_toml(&opts.out_dir, "classical_summary.toml", &summary)?;
    report.say(format!("depletion residual {}", num(summary.depletion_residual)));
    report.say(format!("speedup over passive reset {}", num(summary.speedup)));
    if let Some(r) = summary.oracle_max_relative_residual {
        report.say(format!("oracle max relative residual {}", num(r)));
    }
    Ok(vec![csv, summary_path])
}

#[derive(Serialize)]
struct MatchingReport {
    required_magnitude_as: f64,
    required_phase_rad: f64,
    branch: i64,
    amplitude_a: f64,
    phase_rad: f64,
    width_s: f64,
    delay_s: f64,
    achieved_magnitude_as: f64,
    achieved_phase_rad: f64,
}

fn match_pulse(config: &Config, opts: &RunOptions, report: &mut Report) -> Result<Vec<PathBuf>, CliError> {
    let params = config.resonator_params()?;
    let delay = config.delay(&params)?;
    let f = &config.fill;
    let fill = FillState::new(f.v_fill_v, f.theta_fill_rad, f.t_fill_s)?;
    let branch = config.pulse.branch;
    let pulse = design_matched_pulse(&params, &fill, config.pulse.width_s, delay, branch)?;
    let solution = matching_conditions(&params, &fill, branch);
    let achieved = pulse.laplace_at(params.pole())?;
    let (amplitude, phase) = match pulse.waveform() {
        depletion::Waveform::Sinusoid { amplitude, phase, .. } => (*amplitude, *phase),
        depletion::Waveform::Tabulated { .. } => unreachable!("designed pulses are sinusoids"),
    };
    let matching = MatchingReport {
        required_magnitude_as: solution.required_magnitude,
        required_phase_rad: solution.required_phase,
        branch,
        amplitude_a: amplitude,
        phase_rad: phase,
        width_s: pulse.width(),
        delay_s: delay,
        achieved_magnitude_as: achieved.norm(),
        achieved_phase_rad: achieved.arg(),
    };
    let mut designed = config.clone();
    designed.fill.mode = crate::config::FillMode::Explicit;
    designed.line.delay_s = Some(delay);
    designed.pulse.kind = crate::config::PulseKind::Sinusoid;
    designed.pulse.amplitude_a = amplitude;
    designed.pulse.phase_rad = phase;
    designed.pulse.omega_rad_s = Some(params.omega_r());
    designed.pulse.dt_s = None;
    designed.pulse.samples_a.clear();
    let a = write_toml(&opts.out_dir, "matching.toml", &matching)?;
    let b = write_text(&opts.out_dir, "designed.toml", &designed.to_toml())?;
    report.say(format!("amplitude {} A, phase {} rad", num(amplitude), num(phase)));
    report.say(format!(
        "required |Ĩ| {} A·s at {} rad (branch {branch})",
        num(solution.required_magnitude),
        num(solution.required_phase)
    ));
    Ok(vec![a, b])
}

#[derive(Serialize)]
struct ContinuumSummary {
    nodes: usize,
    dc_eigenvalue: f64,
    orthogonality_error: f64,
    dispersion_deviation: f64,
    dispersion_by_mode: Vec<f64>,
    shape_deviation: Vec<f64>,
    parity_alternates: bool,
    tapers: bool,
}

fn eigenmodes(config: &Config, opts: &RunOptions, report: &mut Report) -> Result<Vec<PathBuf>, CliError> {
    let nodes = opts.modes.unwrap_or(config.eigenmodes.nodes);
    let params = config.resonator_params()?;
    let line = match config.line_params(&params, Some(nodes))? {
        Some(line) => line,
        None => LineParams::new(nodes, 1.0, 1.0, 1.0)?,
    };
    let es = diagonalize(&line)?;
    let check = continuum_check(&es);
    let nf = nodes as f64;
    let mut values = CsvTable::create(
        &opts.out_dir,
        "eigenvalues.csv",
        &["j", "c_j", "sqrt_c_j", "continuum_sqrt_c_j", "omega_j_rad_s", "end_component", "end_sign"],
    )?;
    for j in 0..nodes {
        values.row(&[
            j.to_string(),
            num(es.eigenvalues[j]),
            num(es.eigenvalues[j].sqrt()),
            num(j as f64 * PI / nf),
            num(es.frequencies[j]),
            num(es.end_component(j)),
            check.end_signs[j].to_string(),
        ])?;
    }
    let mut vectors = CsvTable::create(&opts.out_dir, "modes.csv", &["j", "m", "o_jm"])?;
    for (j, mode) in es.modes.iter().enumerate() {
        for (m, o) in mode.iter().enumerate() {
            vectors.row(&[j.to_string(), (m + 1).to_string(), num(*o)])?;
        }
    }
    let summary = ContinuumSummary {
        nodes,
        dc_eigenvalue: es.eigenvalues[0],
        orthogonality_error: es.orthogonality_error(),
        dispersion_deviation: check.dispersion_deviation,
        dispersion_by_mode: check.dispersion_by_mode.clone(),
        shape_deviation: check.shape_deviation.clone(),
        parity_alternates: check.parity_alternates,
        tapers: check.tapers,
    };
    report.say(format!("{nodes} nodes, max √c_j deviation from jπ/N {}", num(check.dispersion_deviation)));
    report.say(format!("end parity alternates: {}, spectrum tapers: {}", check.parity_alternates, check.tapers));
    Ok(vec![values.finish()?, vectors.finish()?, write_toml(&opts.out_dir, "continuum.toml", &summary)?])
}

#[derive(Serialize)]
struct QuantumSummary {
    max_residual_v: f64,
    peak_classical_v: f64,
    relative_residual: f64,
    final_photons: f64,
    initial_photons: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<KappaSummary>,
}

#[derive(Serialize)]
struct KappaSummary {
    nodes: usize,
    modes: usize,
    omega_c_rad_s: f64,
    finite_sum_rad_s: f64,
    continuum_rad_s: f64,
    relative_error: f64,
}

fn quantum(config: &Config, opts: &RunOptions, report: &mut Report) -> Result<Vec<PathBuf>, CliError> {
    let scenario = config.scenario()?;
    let params = &scenario.params;
    let (fill, pulse) = (&scenario.fill, &scenario.pulse);
    let alpha_fill = alpha_from_fill(params, fill);
    let a0 = alpha_at_arrival(params, alpha_fill, fill.time);
    let mut table = CsvTable::create(
        &opts.out_dir,
        "quantum.csv",
        &["t_s", "alpha_re", "alpha_im", "n_photons", "v_expected_v", "v_classical_v", "residual_v"],
    )?;
    let mut worst = 0.0f64;
    let mut peak = 0.0f64;
    let mut last = Complex64::new(0.0, 0.0);
    for &t in &scenario.grid {
        let alpha = if t < 0.0 {
            alpha_fill * (-params.pole().0 * (t - fill.time)).exp()
        } else {
            resonator_amplitude(params, a0, pulse, t)?.alpha
        };
        let quantum_v = expected_voltage(alpha, params);
        let classical = natural_voltage(params, fill, t)? + driven_voltage(params, pulse, t)?;
        worst = worst.max((quantum_v - classical).abs());
        peak = peak.max(classical.abs());
        last = alpha;
        table.row(&[
            num(t),
            num(alpha.re),
            num(alpha.im),
            num(photon_number(alpha)),
            num(quantum_v),
            num(classical),
            num(quantum_v - classical),
        ])?;
    }
    let mut files = vec![table.finish()?];

    let kappa = match scenario.line {
        Some(line) => {
            let half = opts.modes.unwrap_or(64) / 2;
            let modes = ModeSet::around(&line, params.omega_r(), half.max(1))?;
            let couplings = coupling_coefficients(&modes, params);
            let est = markov_kappa(&couplings, params, Regularization::NearestMode)?;
            let amps = drive_line_modes(&modes, pulse, pulse.support().1)?;
            let mut lm = CsvTable::create(&opts.out_dir, "line_modes.csv", &["j", "omega_j_rad_s", "f_j_im_rad_s", "alpha_abs"])?;
            for k in 0..modes.len() {
                lm.row(&[
                    modes.indices[k].to_string(),
                    num(modes.frequencies[k]),
                    num(couplings.couplings[k].im),
                    num(amps.alphas[k].norm()),
                ])?;
            }
            files.push(lm.finish()?);
            Some(KappaSummary {
                nodes: line.nodes,
                modes: modes.len(),
                omega_c_rad_s: line.omega_c(),
                finite_sum_rad_s: est.finite_sum,
                continuum_rad_s: est.continuum,
                relative_error: est.relative_error(),
            })
        }
        None => None,
    };
    let summary = QuantumSummary {
        max_residual_v: worst,
        peak_classical_v: peak,
        relative_residual: worst / peak.max(f64::MIN_POSITIVE),
        final_photons: photon_number(last),
        initial_photons: photon_number(alpha_fill),
        kappa,
    };
    report.say(format!("classical correspondence residual {}", num(summary.relative_residual)));
    if let Some(k) = &summary.kappa {
        report.say(format!("golden-rule κ {} vs Z0/L0 {} (relative {})", num(k.finite_sum_rad_s), num(k.continuum_rad_s), num(k.relative_error)));
    }
    files.push(write_toml(&opts.out_dir, "quantum_summary.toml", &summary)?);
    Ok(files)
}

#[derive(Serialize)]
struct PhotonSummary {
    z: f64,
    formula: &'static str,
    reciprocal_factor: f64,
    photons: f64,
    reciprocal_factor_corrected: f64,
    reciprocal_factor_published: f64,
    photons_corrected: f64,
    photons_published: f64,
    normalization_constant: f64,
    weight_sum: f64,
}

fn photon_number_cmd(config: &Config, opts: &RunOptions, report: &mut Report) -> Result<Vec<PathBuf>, CliError> {
    let (spec, formula) = config.photon_spec()?;
    let energy = spec.energy.unwrap_or(0.0);
    let delta = config.photon.delta_omega_rad_s.unwrap_or(spec.bandwidth / 100.0);
    let grid = midpoint_grid(&spec, delta, config.photon.span)?;
    let weights = mode_weights(&spec, &grid, delta)?;
    let mut table = CsvTable::create(&opts.out_dir, "weights.csv", &["omega_rad_s", "c_re", "c_im", "c_abs2"])?;
    for (w, c) in grid.iter().zip(&weights) {
        table.row(&[num(*w), num(c.re), num(c.im), num(c.norm_sqr())])?;
    }
    let mut curve = CsvTable::create(&opts.out_dir, "factor_curve.csv", &["z", "theta_rad", "f_corrected", "f_published"])?;
    for theta in [0.0, PI / 4.0, PI / 2.0] {
        for k in 0..=96 {
            let z = 0.2 + 0.05 * k as f64;
            let s = depletion::GaussianPulseSpec::new(z * 2f64.sqrt(), 1.0, theta)?;
            curve.row(&[
                num(z),
                num(theta),
                num(reciprocal_factor(&s, PhotonFormula::Corrected)?),
                num(reciprocal_factor(&s, PhotonFormula::Published)?),
            ])?;
        }
    }
    let summary = PhotonSummary {
        z: spec.z(),
        formula: match formula {
            PhotonFormula::Corrected => "corrected",
            PhotonFormula::Published => "published",
        },
        reciprocal_factor: reciprocal_factor(&spec, formula)?,
        photons: photon_count(&spec, energy, formula)?,
        reciprocal_factor_corrected: reciprocal_factor(&spec, PhotonFormula::Corrected)?,
        reciprocal_factor_published: reciprocal_factor(&spec, PhotonFormula::Published)?,
        photons_corrected: photon_count(&spec, energy, PhotonFormula::Corrected)?,
        photons_published: photon_count(&spec, energy, PhotonFormula::Published)?,
        normalization_constant: normalization_constant(&spec),
        weight_sum: weights.iter().map(|c| c.norm_sqr()).sum(),
    };
    report.say(format!("z {}  F {}  N {}", num(summary.z), num(summary.reciprocal_factor), num(summary.photons)));
    Ok(vec![table.finish()?, curve.finish()?, write_toml(&opts.out_dir, "photon.toml", &summary)?])
}

fn verify_cmd(config: &Config, opts: &RunOptions, report: &mut Report) -> Result<Vec<PathBuf>, CliError> {
    let params: ResonatorParams = config.resonator_params()?;
    let checks = verify::run_suite(config, &params, opts.seed)?;
    let mut table = CsvTable::create(&opts.out_dir, "verify.csv", &["check", "measured", "threshold", "relation", "pass"])?;
    for c in &checks {
        table.row(&[c.name.to_string(), num(c.measured), num(c.threshold), c.relation.symbol().to_string(), c.pass().to_string()])?;
        report.say(format!(
            "{} {:<32} {} {} {}",
            if c.pass() { "PASS" } else { "FAIL" },
            c.name,
            num(c.measured),
            c.relation.symbol(),
            num(c.threshold)
        ));
    }
    report.failed = checks.iter().any(|c| !c.pass());
    Ok(vec![table.finish()?])
}
