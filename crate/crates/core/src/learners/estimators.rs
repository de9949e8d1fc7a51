//! Gradient estimates from a cell's sampled `(action, utility)` history.
//!
//! The learner never sees its utility function, only utility values at the actions it
//! tried, so gradients are Newton divided differences over the stacked samples.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::game::{ActionValue, CellIndex, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientVariant {
    /// First divided difference of the two latest samples.
    Basic,
    /// First divided difference smoothed by an exponential moving average.
    Momentum,
    /// Top-order divided difference over the whole stack.
    Polynomial,
}

/// Secant slope between two consecutive samples, or the plain utility difference when
/// the two actions coincide within `epsilon_eq`.
pub fn gradient_basic(prev: Sample, curr: Sample, epsilon_eq: f64) -> f64 {
    let da = curr.action - prev.action;
    let du = curr.utility - prev.utility;
    if da.abs() > epsilon_eq {
        du / da
    } else {
        du
    }
}

/// Highest-order Newton divided difference `u[x_0, ..., x_n]`.
///
/// Nodes must be pairwise distinct. Panics if the slices differ in length or are empty.
pub fn divided_difference(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "node and value counts differ");
    assert!(!xs.is_empty(), "need at least one node");
    let mut table = ys.to_vec();
    let n = xs.len();
    for order in 1..n {
        for i in (order..n).rev() {
            table[i] = (table[i] - table[i - 1]) / (xs[i] - xs[i - order]);
        }
    }
    table[n - 1]
}

/// Divided-difference gradient over a full sample stack (oldest first).
///
/// Samples whose actions repeat within `epsilon_eq` are collapsed onto the most recent
/// one. With fewer than two distinct actions left, falls back to the utility difference
/// of the last two raw samples.
pub fn gradient_polynomial(stack: &[Sample], epsilon_eq: f64) -> f64 {
    if stack.len() < 2 {
        return 0.0;
    }
    let mut kept: Vec<Sample> = Vec::with_capacity(stack.len());
    for s in stack.iter().rev() {
        if kept.iter().all(|k| (k.action - s.action).abs() > epsilon_eq) {
            kept.push(*s);
        }
    }
    if kept.len() < 2 {
        let n = stack.len();
        return stack[n - 1].utility - stack[n - 2].utility;
    }
    kept.reverse();
    let xs: Vec<f64> = kept.iter().map(|s| s.action).collect();
    let ys: Vec<f64> = kept.iter().map(|s| s.utility).collect();
    divided_difference(&xs, &ys)
}

/// Bounds a raw gradient to `[-limit, limit]`; NaN maps to zero.
pub fn clamp_gradient(g: f64, limit: f64) -> f64 {
    if g.is_nan() {
        0.0
    } else {
        g.clamp(-limit, limit)
    }
}

/// Per-cell exponential smoothing `g_p = beta g_{p-1} + (1 - beta) g`.
#[derive(Debug, Clone)]
pub struct MomentumState {
    beta: f64,
    prev: Vec<f64>,
}

impl MomentumState {
    pub fn new(beta: f64, cells: usize) -> Self {
        Self { beta, prev: vec![0.0; cells] }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn previous(&self, cell: CellIndex) -> f64 {
        self.prev[cell.0]
    }

    pub fn update(&mut self, cell: CellIndex, raw: f64) -> f64 {
        let g = self.beta * self.prev[cell.0] + (1.0 - self.beta) * raw;
        self.prev[cell.0] = g;
        g
    }
}

/// `clamp(a + alpha * grad + noise, 0, 1)`.
pub fn gradient_action_update(a_curr: f64, grad: f64, alpha: f64, noise: f64) -> Result<ActionValue> {
    ActionValue::new(a_curr + alpha * grad + noise)
}
