//! Scenario files: TOML with SI quantities and unit-suffixed keys.

use depletion::classical::{design_matched_pulse, matching_conditions};
use depletion::numeric::TWO_PI;
use depletion::quantum::{fill_from_alpha, photon_matching};
use depletion::{
    FillState, GaussianPulseSpec, LineParams, MatchingSolution, ModelError, OutputFormula, PhotonFormula, Pulse,
    QubitState, ResonatorParams,
};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// A configuration problem, naming the offending key.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("config error in `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

fn from_model(section: &str, err: ModelError) -> ConfigError {
    match err {
        ModelError::InvalidParameter { field, reason } => ConfigError::new(format!("{section}.{field}"), reason),
        other => ConfigError::new(section, other.to_string()),
    }
}

const DEFAULT_OMEGA: f64 = TWO_PI * 10e9;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub resonator: ResonatorConfig,
    pub line: LineConfig,
    pub fill: FillConfig,
    pub pulse: PulseConfig,
    pub grid: GridConfig,
    pub outputs: OutputConfig,
    pub photon: PhotonConfig,
    pub eigenmodes: EigenmodeConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitStateConfig {
    Excited,
    Ground,
    #[default]
    Unmeasured,
}

impl From<QubitStateConfig> for QubitState {
    fn from(q: QubitStateConfig) -> Self {
        match q {
            QubitStateConfig::Excited => QubitState::Excited,
            QubitStateConfig::Ground => QubitState::Ground,
            QubitStateConfig::Unmeasured => QubitState::Unmeasured,
        }
    }
}

/// Either `omega_r_rad_s` with `kappa_rad_s`, or `l0_h` with `c0_f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResonatorConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_r_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l0_h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0_f: Option<f64>,
    pub z0_ohm: f64,
    pub qubit_state: QubitStateConfig,
    pub chi_rad_s: f64,
}

impl Default for ResonatorConfig {
    fn default() -> Self {
        Self {
            omega_r_rad_s: Some(DEFAULT_OMEGA),
            kappa_rad_s: Some(DEFAULT_OMEGA * 1e-4),
            l0_h: None,
            c0_f: None,
            z0_ohm: 50.0,
            qubit_state: QubitStateConfig::Unmeasured,
            chi_rad_s: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LineConfig {
    pub velocity_m_s: f64,
    /// Propagation delay `L_c/v`; defaults to `100/ω_r`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay_s: Option<f64>,
    /// Node count; chosen from `band_factor` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    pub band_factor: f64,
}

impl Default for LineConfig {
    fn default() -> Self {
        Self { velocity_m_s: 2e8, delay_s: None, nodes: None, band_factor: 20.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillMode {
    #[default]
    Explicit,
    /// Fill that the configured pulse depletes exactly, times `scale`.
    Matched,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FillConfig {
    pub mode: FillMode,
    pub v_fill_v: f64,
    pub theta_fill_rad: f64,
    pub t_fill_s: f64,
    pub scale: f64,
}

impl Default for FillConfig {
    fn default() -> Self {
        Self { mode: FillMode::Explicit, v_fill_v: 1e-3, theta_fill_rad: 0.0, t_fill_s: -20e-9, scale: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseKind {
    Sinusoid,
    Tabulated,
    /// Resonant sinusoid solved from the matching conditions.
    #[default]
    Design,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseConfig {
    pub kind: PulseKind,
    pub amplitude_a: f64,
    /// Carrier; defaults to `ω_r`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_rad_s: Option<f64>,
    pub phase_rad: f64,
    pub width_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt_s: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub samples_a: Vec<f64>,
    pub branch: i64,
    pub zero_dc: bool,
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self {
            kind: PulseKind::Design,
            amplitude_a: 0.0,
            omega_rad_s: None,
            phase_rad: 0.0,
            width_s: 10e-9,
            dt_s: None,
            samples_a: Vec::new(),
            branch: 1,
            zero_dc: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub t_min_s: f64,
    pub t_max_s: f64,
    /// Defaults to a fortieth of the resonator period.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt_s: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { t_min_s: -2e-9, t_max_s: 20e-9, dt_s: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    Voltage,
    Envelope,
    Transform,
    Output,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormulaConfig {
    #[default]
    Decaying,
    Verbatim,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub series: Vec<Series>,
    pub output_formula: OutputFormulaConfig,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            series: vec![Series::Voltage, Series::Envelope, Series::Transform, Series::Output, Series::Oracle],
            output_formula: OutputFormulaConfig::Decaying,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonFormulaConfig {
    #[default]
    Corrected,
    Published,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhotonConfig {
    pub omega_p_rad_s: f64,
    pub bandwidth_rad_s: f64,
    pub theta_rad: f64,
    pub energy_j: f64,
    pub formula: PhotonFormulaConfig,
    /// Weight grid spacing; defaults to `W/100`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_omega_rad_s: Option<f64>,
    /// Weight grid reaches `ω_p + span·W`.
    pub span: f64,
}

impl Default for PhotonConfig {
    fn default() -> Self {
        Self {
            omega_p_rad_s: 1.414e10,
            bandwidth_rad_s: 1e10,
            theta_rad: 0.0,
            energy_j: 1e-21,
            formula: PhotonFormulaConfig::Corrected,
            delta_omega_rad_s: None,
            span: 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigenmodeConfig {
    pub nodes: usize,
}

impl Default for EigenmodeConfig {
    fn default() -> Self {
        Self { nodes: 21 }
    }
}

/// Validated time-domain scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: ResonatorParams,
    /// Absent when the pulse source sits at the resonator (zero delay).
    pub line: Option<LineParams>,
    pub fill: FillState,
    pub pulse: Pulse,
    pub matching: Option<MatchingSolution>,
    pub grid: Vec<f64>,
    pub series: Vec<Series>,
    pub output_formula: OutputFormula,
}

impl Scenario {
    pub fn wants(&self, series: Series) -> bool {
        self.series.contains(&series)
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("<file>", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let field = message
                .split('`')
                .nth(1)
                .map(str::to_string)
                .unwrap_or_else(|| "<document>".to_string());
            ConfigError::new(field, message)
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn resonator_params(&self) -> Result<ResonatorParams, ConfigError> {
        let r = &self.resonator;
        let base = match (r.omega_r_rad_s, r.kappa_rad_s, r.l0_h, r.c0_f) {
            (Some(w), Some(k), None, None) => ResonatorParams::from_frequency(w, k, r.z0_ohm),
            (None, None, Some(l), Some(c)) => ResonatorParams::new(l, c, r.z0_ohm),
            _ => {
                return Err(ConfigError::new(
                    "resonator",
                    "give either omega_r_rad_s with kappa_rad_s, or l0_h with c0_f",
                ))
            }
        }
        .map_err(|e| from_model("resonator", e))?;
        let params = base.with_qubit(r.qubit_state.into(), r.chi_rad_s).map_err(|e| from_model("resonator", e))?;
        params.ensure_high_q().map_err(|e| from_model("resonator", e))?;
        Ok(params)
    }

    pub fn delay(&self, params: &ResonatorParams) -> Result<f64, ConfigError> {
        let delay = self.line.delay_s.unwrap_or(100.0 / params.omega_r());
        if !(delay.is_finite() && delay >= 0.0) {
            return Err(ConfigError::new("line.delay_s", format!("must be finite and ≥ 0, got {delay}")));
        }
        Ok(delay)
    }

    /// Feedline matching the resonator's `Z₀`; `nodes_override` replaces the configured count.
    pub fn line_params(&self, params: &ResonatorParams, nodes_override: Option<usize>) -> Result<Option<LineParams>, ConfigError> {
        let delay = self.delay(params)?;
        if delay == 0.0 {
            return Ok(None);
        }
        let v = self.line.velocity_m_s;
        if !(v.is_finite() && v > 0.0) {
            return Err(ConfigError::new("line.velocity_m_s", "must be positive"));
        }
        let length = v * delay;
        let nodes = match nodes_override.or(self.line.nodes) {
            Some(n) => n,
            None => LineParams::nodes_for_band(params.z0, v, length, params.omega_r(), self.line.band_factor)
                .map_err(|e| from_model("line", e))?,
        };
        LineParams::from_impedance(nodes, params.z0, v, length).map(Some).map_err(|e| from_model("line", e))
    }

    fn explicit_pulse(&self, params: &ResonatorParams, delay: f64) -> Result<Pulse, ConfigError> {
        let p = &self.pulse;
        let pulse = match p.kind {
            PulseKind::Sinusoid => Pulse::sinusoid(
                p.amplitude_a,
                p.omega_rad_s.unwrap_or(params.omega_r()),
                p.phase_rad,
                p.width_s,
                delay,
            ),
            PulseKind::Tabulated => {
                let dt = p.dt_s.ok_or_else(|| ConfigError::new("pulse.dt_s", "required for tabulated pulses"))?;
                Pulse::tabulated(dt, p.samples_a.clone(), delay)
            }
            PulseKind::Zero => Pulse::zero(p.width_s, delay),
            PulseKind::Design => unreachable!("designed pulses depend on the fill"),
        }
        .map_err(|e| from_model("pulse", e))?;
        if p.zero_dc {
            return pulse.require_zero_dc(1e-9).map_err(|e| from_model("pulse", e));
        }
        Ok(pulse)
    }

    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        let params = self.resonator_params()?;
        let delay = self.delay(&params)?;
        let line = self.line_params(&params, None)?;
        let f = &self.fill;
        let (fill, pulse, matching) = match (f.mode, self.pulse.kind) {
            (FillMode::Matched, PulseKind::Design) => {
                return Err(ConfigError::new("fill.mode", "a matched fill needs an explicit pulse, not a designed one"))
            }
            (FillMode::Explicit, PulseKind::Design) => {
                let fill = FillState::new(f.v_fill_v, f.theta_fill_rad, f.t_fill_s).map_err(|e| from_model("fill", e))?;
                let pulse = design_matched_pulse(&params, &fill, self.pulse.width_s, delay, self.pulse.branch)
                    .map_err(|e| from_model("pulse", e))?;
                let matching = matching_conditions(&params, &fill, self.pulse.branch);
                (fill, pulse, Some(matching))
            }
            (FillMode::Explicit, _) => {
                let fill = FillState::new(f.v_fill_v, f.theta_fill_rad, f.t_fill_s).map_err(|e| from_model("fill", e))?;
                (fill, self.explicit_pulse(&params, delay)?, None)
            }
            (FillMode::Matched, _) => {
                let pulse = self.explicit_pulse(&params, delay)?;
                if !(f.t_fill_s < 0.0) {
                    return Err(ConfigError::new("fill.t_fill_s", "must be negative"));
                }
                if !(f.scale.is_finite() && f.scale >= 0.0) {
                    return Err(ConfigError::new("fill.scale", "must be finite and ≥ 0"));
                }
                let a0 = photon_matching(&params, &pulse).map_err(|e| from_model("pulse", e))?;
                let alpha_fill = a0 * (-params.pole().0 * f.t_fill_s).exp() * f.scale;
                let fill = fill_from_alpha(&params, alpha_fill, f.t_fill_s).map_err(|e| from_model("fill", e))?;
                (fill, pulse, None)
            }
        };
        if fill.time > -delay {
            return Err(ConfigError::new(
                "fill.t_fill_s",
                format!("measurement must end before the pulse is emitted at {:e} s", -delay),
            ));
        }
        let grid = self.time_grid(&params, &fill, &pulse)?;
        let output_formula = match self.outputs.output_formula {
            OutputFormulaConfig::Decaying => OutputFormula::Decaying,
            OutputFormulaConfig::Verbatim => OutputFormula::Verbatim,
        };
        Ok(Scenario { params, line, fill, pulse, matching, grid, series: self.outputs.series.clone(), output_formula })
    }

    fn time_grid(&self, params: &ResonatorParams, fill: &FillState, pulse: &Pulse) -> Result<Vec<f64>, ConfigError> {
        let g = &self.grid;
        let max_dt = params.period() / 20.0;
        let dt = g.dt_s.unwrap_or(params.period() / 40.0);
        if !(dt > 0.0 && dt <= max_dt) {
            return Err(ConfigError::new("grid.dt_s", format!("must lie in (0, {max_dt:e}] (a twentieth of the period)")));
        }
        if !(g.t_max_s > pulse.width()) {
            return Err(ConfigError::new("grid.t_max_s", "must exceed the pulse width"));
        }
        if !(g.t_min_s >= fill.time && g.t_min_s < g.t_max_s) {
            return Err(ConfigError::new("grid.t_min_s", "must lie in [t_fill, t_max)"));
        }
        let n = ((g.t_max_s - g.t_min_s) / dt).round() as usize;
        Ok((0..=n).map(|k| g.t_min_s + k as f64 * dt).filter(|&t| t <= g.t_max_s + 0.5 * dt).collect())
    }

    pub fn photon_spec(&self) -> Result<(GaussianPulseSpec, PhotonFormula), ConfigError> {
        let p = &self.photon;
        let spec = GaussianPulseSpec::new(p.omega_p_rad_s, p.bandwidth_rad_s, p.theta_rad)
            .and_then(|s| s.with_energy(p.energy_j))
            .map_err(|e| from_model("photon", e))?;
        let formula = match p.formula {
            PhotonFormulaConfig::Corrected => PhotonFormula::Corrected,
            PhotonFormulaConfig::Published => PhotonFormula::Published,
        };
        Ok((spec, formula))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_default_scenario() {
        let config = Config::parse("").unwrap();
        assert_eq!(config, Config::default());
        let scenario = config.scenario().unwrap();
        assert!(scenario.matching.is_some());
        assert!((scenario.pulse.delay() - 100.0 / DEFAULT_OMEGA).abs() < 1e-24);
    }

    #[test]
    fn unknown_key_names_field() {
        let err = Config::parse("[resonator]\nomega_rad_s = 1.0\n").unwrap_err();
        assert_eq!(err.field, "omega_rad_s");
    }

    #[test]
    fn conflicting_resonator_keys() {
        let err = Config::parse("[resonator]\nl0_h = 1e-6\n").unwrap().scenario().unwrap_err();
        assert_eq!(err.field, "resonator");
    }

    #[test]
    fn coarse_grid_rejected() {
        let err = Config::parse("[grid]\ndt_s = 1e-11\n").unwrap().scenario().unwrap_err();
        assert_eq!(err.field, "grid.dt_s");
    }

    #[test]
    fn low_q_rejected() {
        let err = Config::parse("[resonator]\nomega_r_rad_s = 1e10\nkappa_rad_s = 1e9\n").unwrap().scenario().unwrap_err();
        assert!(err.field.starts_with("resonator"));
    }

    #[test]
    fn serialization_round_trips() {
        let mut config = Config::default();
        config.pulse.kind = PulseKind::Tabulated;
        config.pulse.dt_s = Some(1.25e-12);
        config.pulse.samples_a = vec![0.0, 0.1, -0.3333333333333333, 0.0];
        let back = Config::parse(&config.to_toml()).unwrap();
        assert_eq!(back, config);
    }
}
