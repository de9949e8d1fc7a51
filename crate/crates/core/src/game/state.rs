use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalized observation of a player, each component a fill level in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidValue("state vector must have dimension >= 1".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
            return Err(Error::InvalidValue(format!("state component {v} outside [0, 1]")));
        }
        Ok(Self(values))
    }

    /// Builds a state from raw ratios, clamping round-off excursions into `[0, 1]`.
    /// Non-finite components are still rejected.
    pub fn clamped(values: Vec<f64>) -> Result<Self> {
        Self::new(values.into_iter().map(|v| if v.is_finite() { v.clamp(0.0, 1.0) } else { v }).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Normalized actuator command in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ActionValue(f64);

impl ActionValue {
    pub const ZERO: ActionValue = ActionValue(0.0);

    /// Clamps `value` into `[0, 1]`. NaN and infinities are rejected.
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidValue(format!("non-finite action {value}")));
        }
        Ok(Self(value.clamp(0.0, 1.0)))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<ActionValue> for f64 {
    fn from(a: ActionValue) -> f64 {
        a.0
    }
}
