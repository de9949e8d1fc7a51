use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name under which the shipped default plant definition is addressable.
pub const BGLP_DEFAULT: &str = "bglp_default";

const BGLP_DEFAULT_TOML: &str = include_str!("../../configs/bglp_default.toml");

/// Name of the infinite material source feeding the first actuator.
pub const SOURCE: &str = "source";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BufferSpec {
    pub name: String,
    /// Liters.
    pub capacity: f64,
    /// Fill fraction at the start of an episode.
    pub initial_fill: f64,
    /// Lower safe-band threshold as a fraction of capacity.
    pub lower: f64,
    /// Upper safe-band threshold as a fraction of capacity.
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorSpec {
    pub name: String,
    pub class: String,
    /// Liters per second at full command.
    pub flow_max: f64,
    /// kW drawn at the smallest non-zero command.
    pub power_idle: f64,
    /// kW drawn at full command.
    pub power_max: f64,
    pub source: String,
    pub sink: String,
}

/// How the level penalties react to a buffer leaving its safe band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PenaltyShape {
    /// Predecessor penalized only when running empty, successor only when running full.
    OneSided,
    /// Both adjacent buffers penalized on either side of their safe band.
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityWeights {
    pub alpha_l: f64,
    pub alpha_d: f64,
    pub alpha_p: f64,
    pub penalty: PenaltyShape,
}

impl Default for UtilityWeights {
    fn default() -> Self {
        Self { alpha_l: 1.0, alpha_d: 0.5, alpha_p: 1.0, penalty: PenaltyShape::TwoSided }
    }
}

impl UtilityWeights {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("alpha_l", self.alpha_l), ("alpha_d", self.alpha_d), ("alpha_p", self.alpha_p)] {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::config(format!("{name} must be > 0, got {w}")));
            }
        }
        // keeps 1 / (1 - alpha_d * V_D) finite for V_D in [0, 1]
        if self.alpha_d >= 1.0 {
            return Err(Error::config(format!("alpha_d must be < 1, got {}", self.alpha_d)));
        }
        Ok(())
    }
}

/// Plant definition: a chain `source -> actuator -> buffer -> actuator -> ... -> buffer`,
/// with the demand sink drawing from the final buffer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantConfig {
    pub name: String,
    /// Integration step in seconds.
    pub dt: f64,
    /// Liters per second drawn from the final buffer.
    pub demand_rate: f64,
    pub weights: UtilityWeights,
    pub buffers: Vec<BufferSpec>,
    pub actuators: Vec<ActuatorSpec>,
}

impl PlantConfig {
    pub fn bglp_default() -> Self {
        Self::from_toml(BGLP_DEFAULT_TOML).expect("shipped plant definition is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let mut cfg: PlantConfig = toml::from_str(text)?;
        cfg.normalize()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    /// Resolves a built-in plant name or a path (relative paths against `base`).
    pub fn resolve(reference: &str, base: Option<&Path>) -> Result<Self> {
        if reference == BGLP_DEFAULT {
            return Ok(Self::bglp_default());
        }
        let path = Path::new(reference);
        let path = match base {
            Some(b) if path.is_relative() => b.join(path),
            _ => path.to_path_buf(),
        };
        Self::load(&path)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Validates the topology and reorders buffers along the chain.
    pub fn normalize(&mut self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::config(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.demand_rate.is_finite() && self.demand_rate > 0.0) {
            return Err(Error::config(format!("demand_rate must be > 0, got {}", self.demand_rate)));
        }
        self.weights.validate()?;
        if self.actuators.is_empty() {
            return Err(Error::config("plant needs at least one actuator"));
        }
        if self.buffers.len() != self.actuators.len() {
            return Err(Error::config(format!(
                "chain needs one buffer per actuator: {} buffers, {} actuators",
                self.buffers.len(),
                self.actuators.len()
            )));
        }
        let mut by_name: HashMap<&str, &BufferSpec> = HashMap::new();
        for b in &self.buffers {
            if b.name == SOURCE || by_name.insert(&b.name, b).is_some() {
                return Err(Error::config(format!("duplicate or reserved buffer name {:?}", b.name)));
            }
            if !(b.capacity.is_finite() && b.capacity > 0.0) {
                return Err(Error::config(format!("buffer {} capacity must be > 0", b.name)));
            }
            if !(0.0..=1.0).contains(&b.initial_fill) {
                return Err(Error::config(format!("buffer {} initial_fill outside [0, 1]", b.name)));
            }
            if !(0.0 < b.lower && b.lower < b.upper && b.upper < 1.0) {
                return Err(Error::config(format!("buffer {} thresholds need 0 < lower < upper < 1", b.name)));
            }
        }
        let mut ordered = Vec::with_capacity(self.buffers.len());
        let mut upstream = SOURCE;
        for a in &self.actuators {
            if !(a.flow_max.is_finite() && a.flow_max > 0.0) {
                return Err(Error::config(format!("actuator {} flow_max must be > 0", a.name)));
            }
            if !(0.0 <= a.power_idle && a.power_idle <= a.power_max && a.power_max.is_finite()) {
                return Err(Error::config(format!("actuator {} needs 0 <= power_idle <= power_max", a.name)));
            }
            if a.source != upstream {
                return Err(Error::config(format!(
                    "actuator {} draws from {:?} but the chain continues from {upstream:?}",
                    a.name, a.source
                )));
            }
            let sink = by_name
                .get(a.sink.as_str())
                .ok_or_else(|| Error::config(format!("actuator {} feeds unknown buffer {:?}", a.name, a.sink)))?;
            if ordered.iter().any(|b: &BufferSpec| b.name == sink.name) {
                return Err(Error::config(format!("buffer {} is fed twice", sink.name)));
            }
            ordered.push((*sink).clone());
            upstream = &a.sink;
        }
        self.buffers = ordered;
        Ok(())
    }
}
