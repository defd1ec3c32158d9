//! TOML scenario files.
//!
//! ```toml
//! carrier_hz = 2.6e9
//! case = 1
//! precoder = "dft"   # or "hadamard"
//! seed = 0
//!
//! [wideband]
//! bandwidth_hz = 100e6
//! subcarriers = 100
//!
//! [area]
//! x0 = 0.0
//! x1 = 10.0
//! y0 = 0.0
//! y1 = 20.0
//! resolution = 0.1
//!
//! [[ap]]
//! center = [5.0, 10.0]
//! k = 8
//! # spacing defaults to half a wavelength at the carrier
//!
//! [[reflector]]
//! x = 0.0
//! material = "concrete"
//!
//! # extra materials; the built-in ones are concrete, metal, free_space
//! [[material]]
//! name = "glass"
//! eps_r_real = 6.0
//! eps_r_imag = -0.05   # signed: ε_r = eps_r_real + j·eps_r_imag
//! mu_r = 1.0
//! sigma = 0.0
//! ```

use std::borrow::Cow;
use std::fs;
use std::path::Path;

use broadbeam_core::beamforming::{dbf_weights, slot_precoder, OstbcMatrix, PrecoderKind};
use broadbeam_core::channel::{subcarrier_plan, SubcarrierPlan};
use broadbeam_core::em::Material;
use broadbeam_core::geometry::{AccessPoint, Point2, Reflector};
use broadbeam_core::pg::{BeamformerSet, CaseConfig, CaseId};
use broadbeam_core::scenario::{Environment, Scenario, ServiceArea, CARRIER_HZ};
use broadbeam_core::{wavelength, Complex64};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{key}: {reason}")]
    Invalid { key: String, reason: String },
    #[error("unknown preset '{0}' (expected case1, case2, case3 or case4)")]
    UnknownPreset(String),
}

fn invalid(key: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PrecoderName {
    #[default]
    Dft,
    Hadamard,
}

impl From<PrecoderName> for PrecoderKind {
    fn from(p: PrecoderName) -> Self {
        match p {
            PrecoderName::Dft => PrecoderKind::Dft,
            PrecoderName::Hadamard => PrecoderKind::Hadamard,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WidebandConfig {
    pub bandwidth_hz: f64,
    pub subcarriers: usize,
}

impl Default for WidebandConfig {
    fn default() -> Self {
        WidebandConfig {
            bandwidth_hz: 100e6,
            subcarriers: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AreaConfig {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub resolution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApConfig {
    pub center: [f64; 2],
    pub k: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spacing: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReflectorConfig {
    pub x: f64,
    pub material: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub name: String,
    pub eps_r_real: f64,
    pub eps_r_imag: f64,
    pub mu_r: f64,
    pub sigma: f64,
}

impl From<&MaterialConfig> for Material {
    fn from(m: &MaterialConfig) -> Self {
        Material {
            name: Cow::Owned(m.name.clone()),
            rel_permittivity: Complex64::new(m.eps_r_real, m.eps_r_imag),
            rel_permeability: m.mu_r,
            conductivity: m.sigma,
        }
    }
}

/// A scenario file as written on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "default_carrier")]
    pub carrier_hz: f64,
    pub case: u8,
    #[serde(default)]
    pub precoder: PrecoderName,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub wideband: WidebandConfig,
    pub area: AreaConfig,
    pub ap: Vec<ApConfig>,
    #[serde(default)]
    pub reflector: Vec<ReflectorConfig>,
    #[serde(default)]
    pub material: Vec<MaterialConfig>,
}

fn default_carrier() -> f64 {
    CARRIER_HZ
}

/// A validated scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedScenario {
    pub case: CaseId,
    pub precoder: PrecoderKind,
    pub seed: u64,
    pub wideband: WidebandConfig,
    pub scenario: Scenario,
    /// Built-in materials plus the file's own.
    pub materials: Vec<Material>,
}

const PRESET_CASE1: &str = include_str!("../presets/case1.toml");
const PRESET_CASE2: &str = include_str!("../presets/case2.toml");
const PRESET_CASE3: &str = include_str!("../presets/case3.toml");
const PRESET_CASE4: &str = include_str!("../presets/case4.toml");

pub const PRESET_NAMES: [&str; 4] = ["case1", "case2", "case3", "case4"];

/// Source text of a built-in preset.
pub fn preset_source(name: &str) -> Result<&'static str, ConfigError> {
    match name {
        "case1" => Ok(PRESET_CASE1),
        "case2" => Ok(PRESET_CASE2),
        "case3" => Ok(PRESET_CASE3),
        "case4" => Ok(PRESET_CASE4),
        _ => Err(ConfigError::UnknownPreset(name.to_string())),
    }
}

pub fn load_preset(name: &str) -> Result<LoadedScenario, ConfigError> {
    parse_scenario(preset_source(name)?, &format!("preset {name}"))
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<LoadedScenario, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text, &path.display().to_string())
}

/// Parses scenario text; `origin` names the source in error messages.
pub fn parse_scenario(text: &str, origin: &str) -> Result<LoadedScenario, ConfigError> {
    let de = toml::Deserializer::new(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        let inner = e.into_inner();
        ConfigError::Parse {
            path: origin.to_string(),
            message: if key == "." {
                inner.message().to_string()
            } else {
                format!("{key}: {}", inner.message())
            },
        }
    })?;
    file.validate()
}

impl ScenarioFile {
    pub fn validate(&self) -> Result<LoadedScenario, ConfigError> {
        let case = CaseId::from_number(self.case)
            .ok_or_else(|| invalid("case", "must be 1, 2, 3 or 4"))?;
        if !(self.carrier_hz.is_finite() && self.carrier_hz > 0.0) {
            return Err(invalid("carrier_hz", "must be a positive frequency"));
        }
        let wb = &self.wideband;
        if wb.subcarriers == 0 {
            return Err(invalid("wideband.subcarriers", "must be at least 1"));
        }
        if !(wb.bandwidth_hz.is_finite()
            && wb.bandwidth_hz >= 0.0
            && wb.bandwidth_hz < 2.0 * self.carrier_hz)
        {
            return Err(invalid(
                "wideband.bandwidth_hz",
                "must be in [0, 2·carrier_hz)",
            ));
        }

        let mut materials: Vec<Material> = Material::registry().to_vec();
        for (i, m) in self.material.iter().enumerate() {
            let mat = Material::from(m);
            mat.validate()
                .map_err(|e| invalid(format!("material[{i}]"), e.to_string()))?;
            if materials.iter().any(|x| x.name == mat.name) {
                return Err(invalid(
                    format!("material[{i}].name"),
                    format!("duplicate material '{}'", m.name),
                ));
            }
            materials.push(mat);
        }

        let area = ServiceArea {
            x0: self.area.x0,
            x1: self.area.x1,
            y0: self.area.y0,
            y1: self.area.y1,
            resolution: self.area.resolution,
        };
        area.validate()
            .map_err(|e| invalid("area", e.to_string()))?;

        if self.ap.is_empty() {
            return Err(invalid("ap", "at least one access point is required"));
        }
        let half_wave = wavelength(self.carrier_hz) / 2.0;
        let mut aps = Vec::with_capacity(self.ap.len());
        for (i, a) in self.ap.iter().enumerate() {
            if a.k < 1 {
                return Err(invalid(
                    format!("ap[{i}].k"),
                    format!("must be >= 1, got {}", a.k),
                ));
            }
            if case != CaseId::CollocatedOstbc && !(a.k as u64).is_power_of_two() {
                return Err(invalid(
                    format!("ap[{i}].k"),
                    format!("broad-beam weights need a power of two, got {}", a.k),
                ));
            }
            let spacing = a.spacing.unwrap_or(half_wave);
            if !(spacing.is_finite() && spacing > 0.0) {
                return Err(invalid(format!("ap[{i}].spacing"), "must be > 0"));
            }
            if !a.center.iter().all(|v| v.is_finite()) {
                return Err(invalid(format!("ap[{i}].center"), "must be finite"));
            }
            aps.push(AccessPoint::new(
                Point2::new(a.center[0], a.center[1]),
                a.k as usize,
                spacing,
            ));
        }

        let mut reflectors = Vec::with_capacity(self.reflector.len());
        for (j, r) in self.reflector.iter().enumerate() {
            let material = materials
                .iter()
                .find(|m| m.name == r.material.as_str())
                .cloned()
                .ok_or_else(|| {
                    invalid(
                        format!("reflector[{j}].material"),
                        format!("unknown material '{}'", r.material),
                    )
                })?;
            if !r.x.is_finite() {
                return Err(invalid(format!("reflector[{j}].x"), "must be finite"));
            }
            reflectors.push(Reflector::new(r.x, material));
        }

        let scenario = Scenario {
            carrier_hz: self.carrier_hz,
            aps,
            reflectors,
            area,
        };
        scenario
            .validate()
            .map_err(|e| invalid("scenario", e.to_string()))?;
        let loaded = LoadedScenario {
            case,
            precoder: self.precoder.into(),
            seed: self.seed,
            wideband: self.wideband.clone(),
            scenario,
            materials,
        };
        // surface beamformer mismatches (e.g. case 2 with several APs) now
        loaded
            .case_config(case)
            .map_err(|e| invalid("case", e.to_string()))?;
        Ok(loaded)
    }
}

impl LoadedScenario {
    pub fn material(&self, name: &str) -> Option<&Material> {
        self.materials.iter().find(|m| m.name == name)
    }

    pub fn subcarriers(&self) -> broadbeam_core::Result<SubcarrierPlan> {
        subcarrier_plan(
            self.scenario.carrier_hz,
            self.wideband.bandwidth_hz,
            self.wideband.subcarriers,
        )
    }

    /// Same scenario with the reflectors of `env` at the area edges.
    pub fn with_environment(&self, env: Environment) -> LoadedScenario {
        let mut s = self.clone();
        s.scenario = s.scenario.with_environment(env);
        s
    }

    pub fn with_resolution(&self, resolution: f64) -> LoadedScenario {
        let mut s = self.clone();
        s.scenario.area.resolution = resolution;
        s
    }

    /// Beamformers for `case` on this scenario: broad-beam weights per AP,
    /// the OSTBC code or a square slot precoder.
    pub fn case_config(&self, case: CaseId) -> broadbeam_core::Result<CaseConfig> {
        let s = &self.scenario;
        let weights = || {
            s.aps
                .iter()
                .map(|ap| dbf_weights(ap.num_dualpol))
                .collect::<broadbeam_core::Result<Vec<_>>>()
        };
        let set = match case {
            CaseId::CollocatedDbf | CaseId::DistributedDbf => {
                BeamformerSet::Simultaneous(weights()?)
            }
            CaseId::CollocatedOstbc => {
                let k = s.aps.first().map_or(0, |ap| ap.num_dualpol);
                BeamformerSet::Ostbc(match self.precoder {
                    PrecoderKind::Dft => OstbcMatrix::dft(k),
                    PrecoderKind::Hadamard => OstbcMatrix::hadamard(k)?,
                })
            }
            CaseId::DistributedPrecoded => {
                let l = s.aps.len();
                BeamformerSet::SlotPrecoded {
                    base: weights()?,
                    precoder: slot_precoder(l, l, self.precoder)?,
                }
            }
        };
        CaseConfig::new(case, s.clone(), set)
    }
}

/// Label for the reflectors of a scenario.
pub fn environment_label(scenario: &Scenario) -> String {
    match scenario.reflectors.first() {
        None => Environment::Los.name().to_string(),
        Some(first)
            if scenario
                .reflectors
                .iter()
                .all(|r| r.material.name == first.material.name) =>
        {
            first.material.name.to_string()
        }
        Some(_) => "mixed".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_reference_scenarios() {
        for (name, case) in PRESET_NAMES.iter().zip(CaseId::ALL) {
            let p = load_preset(name).unwrap();
            assert_eq!(p.case, case);
            let reference =
                CaseConfig::reference(case, Environment::Concrete, PrecoderKind::Dft).unwrap();
            assert_eq!(p.case_config(case).unwrap(), reference, "{name}");
        }
    }

    #[test]
    fn spacing_defaults_to_half_wavelength() {
        let p = load_preset("case3").unwrap();
        let half = wavelength(CARRIER_HZ) / 2.0;
        assert!(p.scenario.aps.iter().all(|ap| ap.spacing == half));
        let centers: Vec<_> = p
            .scenario
            .aps
            .iter()
            .map(|ap| (ap.center.x, ap.center.y))
            .collect();
        assert_eq!(centers, [(5.0, 4.0), (5.0, 8.0), (5.0, 12.0), (5.0, 16.0)]);
    }
}
