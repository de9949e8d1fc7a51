use super::config::{BufferSpec, UtilityWeights};
use crate::error::{Error, Result};

/// Inputs of one player's utility at one control step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityTerms {
    /// Penalty on the predecessor buffer level.
    pub l_pre: f64,
    /// Penalty on the successor buffer level (ignored for the last player).
    pub l_succ: f64,
    /// Fulfilled demand fraction (used by the last player only).
    pub v_d: f64,
    /// Mean power draw in kW.
    pub power: f64,
    pub is_last: bool,
}

/// `1/(1 + a_l L_pre) + [i != N] 1/(1 + a_l L_succ) + [i = N] 1/(1 - a_d V_D) + 1/(1 + a_p P)`.
pub fn utility(terms: &UtilityTerms, weights: &UtilityWeights) -> Result<f64> {
    let UtilityWeights { alpha_l, alpha_d, alpha_p, .. } = *weights;
    let mut u = 1.0 / (1.0 + alpha_l * terms.l_pre) + 1.0 / (1.0 + alpha_p * terms.power);
    if terms.is_last {
        let denom = 1.0 - alpha_d * terms.v_d;
        if denom <= 0.0 {
            return Err(Error::config(format!("alpha_d * V_D = {} must stay below 1", alpha_d * terms.v_d)));
        }
        u += 1.0 / denom;
    } else {
        u += 1.0 / (1.0 + alpha_l * terms.l_succ);
    }
    Ok(u)
}

/// Global objective: the sum of all player utilities.
pub fn potential_value(utilities: &[f64]) -> f64 {
    utilities.iter().sum()
}

/// 0 at or above the lower threshold, rising linearly to 1 at an empty buffer.
pub(crate) fn emptying_penalty(level: f64, spec: &BufferSpec) -> f64 {
    let lo = spec.lower * spec.capacity;
    ((lo - level) / lo).max(0.0)
}

/// 0 at or below the upper threshold, rising linearly to 1 at a full buffer.
pub(crate) fn filling_penalty(level: f64, spec: &BufferSpec) -> f64 {
    let hi = spec.upper * spec.capacity;
    ((level - hi) / (spec.capacity - hi)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::PenaltyShape;

    fn w() -> UtilityWeights {
        UtilityWeights { alpha_l: 1.0, alpha_d: 0.5, alpha_p: 1.0, penalty: PenaltyShape::OneSided }
    }

    #[test]
    fn zero_penalty_intermediate_player() {
        let t = UtilityTerms { l_pre: 0.0, l_succ: 0.0, v_d: 0.0, power: 0.0, is_last: false };
        assert_eq!(utility(&t, &w()).unwrap(), 3.0);
    }

    #[test]
    fn last_player_with_full_demand() {
        let t = UtilityTerms { l_pre: 0.0, l_succ: 0.7, v_d: 1.0, power: 0.0, is_last: true };
        assert_eq!(utility(&t, &w()).unwrap(), 4.0);
    }

    #[test]
    fn demand_term_singularity_is_rejected() {
        let weights = UtilityWeights { alpha_d: 1.0, ..w() };
        let t = UtilityTerms { l_pre: 0.0, l_succ: 0.0, v_d: 1.0, power: 0.0, is_last: true };
        assert!(utility(&t, &weights).is_err());
    }

    #[test]
    fn potential_sums() {
        assert!((potential_value(&[2.58; 5]) - 12.9).abs() < 1e-12);
        assert_eq!(potential_value(&[0.0; 3]), 0.0);
        assert_eq!(potential_value(&[1.25]), 1.25);
    }

    #[test]
    fn penalties_are_piecewise_linear() {
        let b = BufferSpec { name: "b".into(), capacity: 10.0, initial_fill: 0.5, lower: 0.25, upper: 0.75 };
        assert_eq!(emptying_penalty(0.0, &b), 1.0);
        assert_eq!(emptying_penalty(2.5, &b), 0.0);
        assert_eq!(emptying_penalty(1.25, &b), 0.5);
        assert_eq!(filling_penalty(10.0, &b), 1.0);
        assert_eq!(filling_penalty(7.5, &b), 0.0);
        assert_eq!(filling_penalty(8.75, &b), 0.5);
    }
}
