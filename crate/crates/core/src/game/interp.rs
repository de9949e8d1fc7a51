//! Global inverse-squared-distance interpolation over a performance map.

use super::maps::PerformanceMap;
use super::state::{ActionValue, StateVector};
use crate::error::{Error, Result};

fn squared_distances(map: &dyn PerformanceMap, state: &StateVector) -> Result<Vec<f64>> {
    let dim = map.grid().dim();
    if state.dim() != dim {
        return Err(Error::config(format!("state dimension {} does not match map dimension {dim}", state.dim())));
    }
    if map.visited_count() == 0 {
        return Err(Error::PolicyNotReady);
    }
    let x = state.values();
    Ok(map
        .visited_positions()
        .chunks_exact(dim)
        .map(|p| p.iter().zip(x).map(|(p, x)| (x - p) * (x - p)).sum())
        .collect())
}

/// Normalized weights `w_k / sum_m w_m` with `w_k = 1 / (D_k^2 + gamma)`, in the
/// map's visited-cell order.
///
/// With `gamma == 0` and the state sitting exactly on a visited support vector the
/// weight collapses onto that cell.
pub fn interpolation_weights(map: &dyn PerformanceMap, state: &StateVector, gamma: f64) -> Result<Vec<f64>> {
    check_gamma(gamma)?;
    let d2 = squared_distances(map, state)?;
    if gamma == 0.0 {
        if let Some(hit) = d2.iter().position(|&d| d == 0.0) {
            let mut w = vec![0.0; d2.len()];
            w[hit] = 1.0;
            return Ok(w);
        }
    }
    let raw: Vec<f64> = d2.iter().map(|d| 1.0 / (d + gamma)).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::config(format!("interpolation smoothing must be finite and >= 0, got {gamma}")));
    }
    Ok(())
}

/// Exploitation action: weighted mean of the visited cells' representative actions,
/// clamped into `[0, 1]`.
pub fn interpolate_action(map: &dyn PerformanceMap, state: &StateVector, gamma: f64) -> Result<ActionValue> {
    check_gamma(gamma)?;
    let dim = map.grid().dim();
    if state.dim() != dim {
        return Err(Error::config(format!("state dimension {} does not match map dimension {dim}", state.dim())));
    }
    if map.visited_count() == 0 {
        return Err(Error::PolicyNotReady);
    }
    let x = state.values();
    let actions = map.visited_actions();
    let mut num = 0.0;
    let mut den = 0.0;
    for (p, &a) in map.visited_positions().chunks_exact(dim).zip(actions) {
        let d2: f64 = p.iter().zip(x).map(|(p, x)| (x - p) * (x - p)).sum();
        if d2 == 0.0 && gamma == 0.0 {
            return ActionValue::new(a);
        }
        let w = 1.0 / (d2 + gamma);
        num += w * a;
        den += w;
    }
    ActionValue::new(num / den)
}
