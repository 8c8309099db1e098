//! JSON experiment configuration. Every field is optional; unset fields take
//! the reference deployment values. Powers are given in dBm and converted to
//! watts here, once.

use std::path::Path;

use pass_core::optimizer::ConstraintMode;
use pass_core::{
    GeometryParams, PowerModel, PowerModelKind, PsoConfig, SdpConfig, SystemGeometry,
    TransmitBudget,
};
use serde::{Deserialize, Serialize};

use crate::error::LabError;
use crate::method::Method;

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub geometry: GeometryConfig,
    pub power_model: PowerModelChoice,
    pub waveform: WaveformConfig,
    pub scenes: SceneConfig,
    pub methods: Vec<String>,
    pub stage2: Stage2Config,
    pub pso: PsoSettings,
    pub sdp: SdpSettings,
    pub upa: UpaSettings,
    pub robustness: RobustnessConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            geometry: GeometryConfig::default(),
            power_model: PowerModelChoice::Equal,
            waveform: WaveformConfig::default(),
            scenes: SceneConfig::default(),
            methods: vec!["pass-pso".into(), "pass-fixed".into(), "mimo-2x2".into()],
            stage2: Stage2Config::default(),
            pso: PsoSettings::default(),
            sdp: SdpSettings::default(),
            upa: UpaSettings::default(),
            robustness: RobustnessConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub carrier_frequency_hz: f64,
    pub n_waveguides: usize,
    pub n_pas_per_waveguide: usize,
    pub waveguide_length_m: f64,
    pub min_pa_spacing_m: f64,
    pub slot_spacing_m: f64,
    /// Defaults to `5n − 0.5` for waveguide `n = 1..N`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tx_y_m: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tx_z_m: Option<Vec<f64>>,
    /// Defaults to `5n + 0.5`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rx_y_m: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rx_z_m: Option<Vec<f64>>,
    pub height_m: f64,
    pub refractive_index_tx: f64,
    pub refractive_index_rx: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        let p = GeometryParams::default();
        Self {
            carrier_frequency_hz: p.carrier_frequency,
            n_waveguides: p.n_waveguides,
            n_pas_per_waveguide: p.n_pas_per_waveguide,
            waveguide_length_m: p.waveguide_length,
            min_pa_spacing_m: p.min_pa_spacing,
            slot_spacing_m: p.slot_spacing,
            tx_y_m: None,
            tx_z_m: None,
            rx_y_m: None,
            rx_z_m: None,
            height_m: 3.0,
            refractive_index_tx: p.refractive_index_tx,
            refractive_index_rx: p.refractive_index_rx,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerModelChoice {
    Equal,
    Proportional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveformConfig {
    pub transmit_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub snapshots: u32,
}

impl Default for WaveformConfig {
    fn default() -> Self {
        Self {
            transmit_power_dbm: 20.0,
            noise_power_dbm: -80.0,
            snapshots: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneConfig {
    pub n_scenes: usize,
    pub n_targets: usize,
    /// Square region `[lo, hi]²`, m.
    pub region_m: [f64; 2],
    pub min_separation_m: f64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            n_scenes: 200,
            n_targets: 2,
            region_m: [0.0, 30.0],
            min_separation_m: 1.0,
        }
    }
}

/// Which methods run the covariance stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Stage2Config {
    pub pass_pso: bool,
    pub pass_fixed: bool,
    pub mimo: bool,
}

impl Default for Stage2Config {
    fn default() -> Self {
        Self {
            pass_pso: true,
            pass_fixed: false,
            mimo: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoSettings {
    pub n_particles: usize,
    pub max_iterations: usize,
    pub inertia: f64,
    pub cognitive_coeff: f64,
    pub social_coeff: f64,
    pub velocity_clamp: f64,
    pub stall_tolerance: f64,
    pub stall_iterations: usize,
    pub constraint_mode: ConstraintChoice,
    pub seed_uniform_layout: bool,
}

impl Default for PsoSettings {
    fn default() -> Self {
        let d = PsoConfig::default();
        Self {
            n_particles: d.n_particles,
            max_iterations: 50,
            inertia: d.inertia,
            cognitive_coeff: d.cognitive_coeff,
            social_coeff: d.social_coeff,
            velocity_clamp: d.velocity_clamp,
            stall_tolerance: d.stall_tolerance,
            stall_iterations: d.stall_iterations,
            constraint_mode: ConstraintChoice::Repair,
            seed_uniform_layout: d.seed_uniform_layout,
        }
    }
}

impl PsoSettings {
    pub fn to_core(&self, seed: u64) -> PsoConfig {
        PsoConfig {
            n_particles: self.n_particles,
            max_iterations: self.max_iterations,
            inertia: self.inertia,
            cognitive_coeff: self.cognitive_coeff,
            social_coeff: self.social_coeff,
            velocity_clamp: self.velocity_clamp,
            seed,
            stall_tolerance: self.stall_tolerance,
            stall_iterations: self.stall_iterations,
            constraint_mode: match self.constraint_mode {
                ConstraintChoice::Repair => ConstraintMode::Repair,
                ConstraintChoice::Indicator => ConstraintMode::Indicator,
            },
            seed_uniform_layout: self.seed_uniform_layout,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintChoice {
    Repair,
    Indicator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SdpSettings {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub barrier_growth: f64,
    pub rank_tolerance: f64,
}

impl Default for SdpSettings {
    fn default() -> Self {
        let d = SdpConfig::default();
        Self {
            tolerance: d.tolerance,
            max_iterations: d.max_iterations,
            barrier_growth: d.barrier_growth,
            rank_tolerance: d.rank_tolerance,
        }
    }
}

impl SdpSettings {
    pub fn to_core(&self) -> SdpConfig {
        SdpConfig {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            barrier_growth: self.barrier_growth,
            rank_tolerance: self.rank_tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UpaSettings {
    pub n_x: usize,
    pub n_y: usize,
    pub center_m: [f64; 3],
}

impl Default for UpaSettings {
    fn default() -> Self {
        Self {
            n_x: 10,
            n_y: 10,
            center_m: [15.0, 15.0, 3.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobustnessConfig {
    pub targets_m: Vec<[f64; 2]>,
    pub offsets_m: Vec<f64>,
    pub axes: Vec<AxisChoice>,
    pub stage2: Stage2Config,
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        Self {
            targets_m: vec![[5.0, 7.5], [25.0, 12.5]],
            offsets_m: (0..=8).map(|i| -2.0 + 0.5 * i as f64).collect(),
            axes: vec![AxisChoice::X, AxisChoice::Y],
            stage2: Stage2Config {
                pass_pso: true,
                pass_fixed: false,
                mimo: true,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisChoice {
    X,
    Y,
}

impl AxisChoice {
    pub fn to_core(self) -> pass_core::Axis {
        match self {
            AxisChoice::X => pass_core::Axis::X,
            AxisChoice::Y => pass_core::Axis::Y,
        }
    }
}

/// Everything an experiment needs, in SI units and core types.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub geometry: SystemGeometry,
    pub power_model: PowerModel,
    pub budget: TransmitBudget,
    pub methods: Vec<Method>,
    pub sdp: SdpConfig,
}

fn invalid(path: &str, msg: impl std::fmt::Display) -> LabError {
    LabError::Config(format!("{path}: {msg}"))
}

fn positive(path: &str, v: f64) -> Result<(), LabError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(path, format!("must be finite and > 0, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            LabError::Config(format!("{path}: {}", e.into_inner()))
        })
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn geometry_params(&self) -> Result<GeometryParams, LabError> {
        let g = &self.geometry;
        let n = g.n_waveguides;
        let pick = |v: &Option<Vec<f64>>, path: &str, f: &dyn Fn(usize) -> f64| match v {
            Some(v) if v.len() != n => Err(invalid(
                path,
                format!("has {} entries, expected {n}", v.len()),
            )),
            Some(v) => Ok(v.clone()),
            None => Ok((1..=n).map(f).collect()),
        };
        let params = GeometryParams {
            carrier_frequency: g.carrier_frequency_hz,
            n_waveguides: n,
            n_pas_per_waveguide: g.n_pas_per_waveguide,
            waveguide_length: g.waveguide_length_m,
            min_pa_spacing: g.min_pa_spacing_m,
            slot_spacing: g.slot_spacing_m,
            tx_y: pick(&g.tx_y_m, "geometry.tx_y_m", &|i| 5.0 * i as f64 - 0.5)?,
            tx_z: pick(&g.tx_z_m, "geometry.tx_z_m", &|_| g.height_m)?,
            rx_y: pick(&g.rx_y_m, "geometry.rx_y_m", &|i| 5.0 * i as f64 + 0.5)?,
            rx_z: pick(&g.rx_z_m, "geometry.rx_z_m", &|_| g.height_m)?,
            refractive_index_tx: g.refractive_index_tx,
            refractive_index_rx: g.refractive_index_rx,
            noise_power: dbm_to_watts(self.waveform.noise_power_dbm),
        };
        Ok(params)
    }

    pub fn resolve(&self) -> Result<Resolved, LabError> {
        if self.geometry.n_waveguides == 0 {
            return Err(invalid("geometry.n_waveguides", "must be >= 1"));
        }
        if self.geometry.n_pas_per_waveguide == 0 {
            return Err(invalid("geometry.n_pas_per_waveguide", "must be >= 1"));
        }
        for (path, v) in [
            (
                "geometry.carrier_frequency_hz",
                self.geometry.carrier_frequency_hz,
            ),
            (
                "geometry.waveguide_length_m",
                self.geometry.waveguide_length_m,
            ),
            ("geometry.slot_spacing_m", self.geometry.slot_spacing_m),
            (
                "geometry.refractive_index_tx",
                self.geometry.refractive_index_tx,
            ),
            (
                "geometry.refractive_index_rx",
                self.geometry.refractive_index_rx,
            ),
        ] {
            positive(path, v)?;
        }
        for (path, v) in [
            (
                "waveform.transmit_power_dbm",
                self.waveform.transmit_power_dbm,
            ),
            ("waveform.noise_power_dbm", self.waveform.noise_power_dbm),
        ] {
            if !v.is_finite() {
                return Err(invalid(path, "must be finite"));
            }
        }
        if self.waveform.snapshots == 0 {
            return Err(invalid("waveform.snapshots", "must be >= 1"));
        }
        let s = &self.scenes;
        if s.n_targets == 0 {
            return Err(invalid("scenes.n_targets", "must be >= 1"));
        }
        if !(s.region_m[0].is_finite()
            && s.region_m[1].is_finite()
            && s.region_m[0] < s.region_m[1])
        {
            return Err(invalid("scenes.region_m", "must be [lo, hi] with lo < hi"));
        }
        if s.min_separation_m.is_nan() || s.min_separation_m < 0.0 {
            return Err(invalid("scenes.min_separation_m", "must be >= 0"));
        }
        let side = s.region_m[1] - s.region_m[0];
        if s.n_targets > 1
            && s.min_separation_m * s.min_separation_m * (s.n_targets as f64) > side * side / 4.0
        {
            return Err(invalid(
                "scenes.min_separation_m",
                "too large to place the targets",
            ));
        }
        if self.upa.n_x == 0 || self.upa.n_y == 0 {
            return Err(invalid("upa", "n_x and n_y must be >= 1"));
        }
        if self.robustness.targets_m.is_empty() {
            return Err(invalid("robustness.targets_m", "needs at least one target"));
        }
        self.pso
            .to_core(0)
            .validate()
            .map_err(|e| invalid("pso", e))?;
        let sdp = self.sdp.to_core();
        sdp.validate().map_err(|e| invalid("sdp", e))?;

        let methods = self
            .methods
            .iter()
            .enumerate()
            .map(|(i, m)| {
                m.parse::<Method>()
                    .map_err(|e| invalid(&format!("methods[{i}]"), e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let geometry =
            SystemGeometry::new(self.geometry_params()?).map_err(|e| invalid("geometry", e))?;
        let kind = match self.power_model {
            PowerModelChoice::Equal => PowerModelKind::EqualPower,
            PowerModelChoice::Proportional => PowerModelKind::ProportionalPower,
        };
        let power_model = PowerModel::new(kind, self.geometry.n_pas_per_waveguide)
            .map_err(|e| invalid("power_model", e))?;
        Ok(Resolved {
            geometry,
            power_model,
            budget: TransmitBudget {
                power_budget: dbm_to_watts(self.waveform.transmit_power_dbm),
                snapshots: self.waveform.snapshots,
            },
            methods,
            sdp,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_boundary_values() {
        assert!((dbm_to_watts(20.0) - 0.1).abs() < 1e-15);
        assert!((dbm_to_watts(-80.0) - 1e-11).abs() < 1e-25);
    }

    #[test]
    fn defaults_resolve_to_the_reference_deployment() {
        let r = ExperimentConfig::default().resolve().unwrap();
        assert_eq!(r.geometry, SystemGeometry::reference());
        assert_eq!(r.budget.snapshots, 256);
        assert_eq!(r.methods.len(), 3);
    }

    #[test]
    fn empty_document_is_the_default() {
        assert_eq!(
            ExperimentConfig::from_json("{}").unwrap(),
            ExperimentConfig::default()
        );
    }

    #[test]
    fn unknown_keys_report_their_path() {
        let err = ExperimentConfig::from_json(r#"{"geometry": {"n_waveguide": 3}}"#).unwrap_err();
        assert!(err.to_string().contains("geometry"), "{err}");
        let err = ExperimentConfig::from_json(r#"{"pso": {"inertia": "high"}}"#).unwrap_err();
        assert!(err.to_string().contains("pso.inertia"), "{err}");
    }

    #[test]
    fn semantic_errors_report_their_path() {
        let mut c = ExperimentConfig::default();
        c.geometry.slot_spacing_m = 0.07;
        assert!(c.resolve().unwrap_err().to_string().contains("geometry"));
        let c = ExperimentConfig {
            methods: vec!["mimo-big".into()],
            ..Default::default()
        };
        assert!(c.resolve().unwrap_err().to_string().contains("methods[0]"));
    }
}
