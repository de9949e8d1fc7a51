use serde::Serialize;

use super::config::{PenaltyShape, PlantConfig};
use super::utility::{emptying_penalty, filling_penalty, utility, UtilityTerms};
use crate::error::{Error, Result};
use crate::game::{ActionValue, StateVector};

/// Aggregate result of advancing the plant over one control period.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepOutcome {
    /// Seconds simulated.
    pub duration: f64,
    /// Liters moved by each actuator.
    pub transported: Vec<f64>,
    /// Mean kW drawn by each actuator.
    pub power: Vec<f64>,
    /// Liters lost above capacity, per buffer.
    pub overflow: Vec<f64>,
    pub demand_requested: f64,
    pub demand_drawn: f64,
    /// Liters taken from the infinite source.
    pub source_inflow: f64,
}

impl StepOutcome {
    /// Fulfilled demand fraction `V_D` in `[0, 1]`.
    pub fn demand_fulfilled(&self) -> f64 {
        if self.demand_requested > 0.0 {
            (self.demand_drawn / self.demand_requested).clamp(0.0, 1.0)
        } else {
            1.0
        }
    }

    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }

    pub fn total_overflow(&self) -> f64 {
        self.overflow.iter().sum()
    }

    pub fn shortfall(&self) -> f64 {
        (self.demand_requested - self.demand_drawn).max(0.0)
    }
}

/// Buffer levels of a running plant. Actuator `i` moves material from buffer `i - 1`
/// (the infinite source for `i = 0`) into buffer `i`; demand is drawn from the last buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Plant {
    config: PlantConfig,
    levels: Vec<f64>,
}

impl Plant {
    pub fn new(mut config: PlantConfig) -> Result<Self> {
        config.normalize()?;
        let levels = config.buffers.iter().map(|b| b.initial_fill * b.capacity).collect();
        Ok(Self { config, levels })
    }

    pub fn config(&self) -> &PlantConfig {
        &self.config
    }

    pub fn players(&self) -> usize {
        self.config.actuators.len()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn set_levels(&mut self, levels: &[f64]) -> Result<()> {
        if levels.len() != self.levels.len() {
            return Err(Error::Dimension { expected: self.levels.len(), got: levels.len() });
        }
        for (l, b) in levels.iter().zip(&self.config.buffers) {
            if !(0.0..=b.capacity).contains(l) {
                return Err(Error::InvalidValue(format!("level {l} outside [0, {}] for {}", b.capacity, b.name)));
            }
        }
        self.levels.copy_from_slice(levels);
        Ok(())
    }

    pub fn reset(&mut self) {
        for (l, b) in self.levels.iter_mut().zip(&self.config.buffers) {
            *l = b.initial_fill * b.capacity;
        }
    }

    /// One integration step of length `dt` (seconds).
    pub fn step(&mut self, actions: &[ActionValue], dt: f64) -> Result<StepOutcome> {
        let n = self.players();
        if actions.len() != n {
            return Err(Error::config(format!("expected {n} actions, got {}", actions.len())));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidValue(format!("dt must be > 0, got {dt}")));
        }
        let mut out = StepOutcome {
            duration: dt,
            transported: vec![0.0; n],
            power: vec![0.0; n],
            overflow: vec![0.0; n],
            demand_requested: self.config.demand_rate * dt,
            demand_drawn: 0.0,
            source_inflow: 0.0,
        };
        for (i, (act, a)) in self.config.actuators.iter().zip(actions).enumerate() {
            let a = a.get();
            let commanded = a * act.flow_max * dt;
            let moved = if i == 0 { commanded } else { commanded.min(self.levels[i - 1]) };
            if i == 0 {
                out.source_inflow = moved;
            } else {
                self.levels[i - 1] -= moved;
            }
            let cap = self.config.buffers[i].capacity;
            self.levels[i] += moved;
            if self.levels[i] > cap {
                out.overflow[i] = self.levels[i] - cap;
                self.levels[i] = cap;
            }
            out.transported[i] = moved;
            out.power[i] = if a > 0.0 { act.power_idle + a * (act.power_max - act.power_idle) } else { 0.0 };
        }
        let last = n - 1;
        let drawn = out.demand_requested.min(self.levels[last]);
        self.levels[last] -= drawn;
        out.demand_drawn = drawn;
        Ok(out)
    }

    /// Holds `actions` for `duration` seconds, integrating with the configured `dt`.
    /// Power is averaged over the period; volumes are summed.
    pub fn advance(&mut self, actions: &[ActionValue], duration: f64) -> Result<StepOutcome> {
        let dt = self.config.dt;
        let steps = (duration / dt).round();
        if steps < 1.0 || (steps * dt - duration).abs() > 1e-9 * duration.max(1.0) {
            return Err(Error::config(format!("control period {duration} s is not a multiple of dt {dt} s")));
        }
        let steps = steps as usize;
        let mut total = self.step(actions, dt)?;
        for _ in 1..steps {
            let o = self.step(actions, dt)?;
            total.duration += o.duration;
            total.demand_requested += o.demand_requested;
            total.demand_drawn += o.demand_drawn;
            total.source_inflow += o.source_inflow;
            for i in 0..total.transported.len() {
                total.transported[i] += o.transported[i];
                total.power[i] += o.power[i];
                total.overflow[i] += o.overflow[i];
            }
        }
        total.power.iter_mut().for_each(|p| *p /= steps as f64);
        Ok(total)
    }

    /// Normalized `(predecessor, successor)` fill levels of player `i`; the infinite
    /// source reads as full.
    pub fn observe_state(&self, player: usize) -> StateVector {
        let b = &self.config.buffers;
        let pred = if player == 0 { 1.0 } else { self.levels[player - 1] / b[player - 1].capacity };
        let succ = self.levels[player] / b[player].capacity;
        StateVector::clamped(vec![pred, succ]).expect("levels are finite")
    }

    /// Utility inputs of player `i` after a step, using the post-step levels.
    pub fn utility_terms(&self, player: usize, outcome: &StepOutcome) -> UtilityTerms {
        let b = &self.config.buffers;
        let two_sided = self.config.weights.penalty == PenaltyShape::TwoSided;
        let l_pre = if player == 0 {
            0.0
        } else {
            let (level, spec) = (self.levels[player - 1], &b[player - 1]);
            emptying_penalty(level, spec) + if two_sided { filling_penalty(level, spec) } else { 0.0 }
        };
        let (level, spec) = (self.levels[player], &b[player]);
        let l_succ = filling_penalty(level, spec) + if two_sided { emptying_penalty(level, spec) } else { 0.0 };
        UtilityTerms {
            l_pre,
            l_succ,
            v_d: outcome.demand_fulfilled(),
            power: outcome.power[player],
            is_last: player + 1 == self.players(),
        }
    }

    pub fn utilities(&self, outcome: &StepOutcome) -> Result<Vec<f64>> {
        (0..self.players()).map(|i| utility(&self.utility_terms(i, outcome), &self.config.weights)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acts(v: &[f64]) -> Vec<ActionValue> {
        v.iter().map(|&x| ActionValue::new(x).unwrap()).collect()
    }

    fn plant() -> Plant {
        Plant::new(PlantConfig::bglp_default()).unwrap()
    }

    #[test]
    fn linear_flow_into_empty_sink() {
        let mut cfg = PlantConfig::bglp_default();
        cfg.actuators[0].flow_max = 0.05;
        let mut p = Plant::new(cfg).unwrap();
        p.set_levels(&[0.0, 0.0, 0.0, 0.0, 5.0]).unwrap();
        let o = p.step(&acts(&[1.0, 0.0, 0.0, 0.0, 0.0]), 10.0).unwrap();
        assert!((o.transported[0] - 0.5).abs() < 1e-12);
        assert!((p.levels()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn full_sink_overflows() {
        let mut p = plant();
        let mut lv: Vec<f64> = p.config().buffers.iter().map(|b| b.capacity * 0.5).collect();
        lv[0] = p.config().buffers[0].capacity;
        p.set_levels(&lv).unwrap();
        let o = p.step(&acts(&[0.5, 0.0, 0.0, 0.0, 0.0]), 10.0).unwrap();
        let q = 0.5 * p.config().actuators[0].flow_max * 10.0;
        assert!((o.overflow[0] - q).abs() < 1e-12);
        assert_eq!(p.levels()[0], p.config().buffers[0].capacity);
    }

    #[test]
    fn idle_plant_only_serves_demand() {
        let mut p = plant();
        let before = p.levels().to_vec();
        let o = p.step(&acts(&[0.0; 5]), 10.0).unwrap();
        assert_eq!(o.total_power(), 0.0);
        assert_eq!(&p.levels()[..4], &before[..4]);
        assert!((before[4] - p.levels()[4] - o.demand_drawn).abs() < 1e-12);
        assert_eq!(o.demand_fulfilled(), 1.0);
    }

    #[test]
    fn starved_demand_is_partial() {
        let mut p = plant();
        p.set_levels(&[0.0, 0.0, 0.0, 0.0, 0.55]).unwrap();
        let o = p.step(&acts(&[0.0; 5]), 10.0).unwrap();
        assert!((o.demand_fulfilled() - 0.5).abs() < 1e-12);
        assert!((o.shortfall() - 0.55).abs() < 1e-12);
    }

    #[test]
    fn action_count_mismatch() {
        assert!(matches!(plant().step(&acts(&[0.1]), 10.0), Err(Error::Config(_))));
    }

    #[test]
    fn observe_normalizes() {
        let mut p = plant();
        let caps: Vec<f64> = p.config().buffers.iter().map(|b| b.capacity).collect();
        p.set_levels(&[caps[0] / 2.0, caps[1] / 2.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.observe_state(1).values(), &[0.5, 0.5]);
        assert_eq!(p.observe_state(3).values(), &[0.0, 0.0]);
        assert_eq!(p.observe_state(0).values()[0], 1.0);
        p.set_levels(&caps).unwrap();
        assert_eq!(p.observe_state(2).values(), &[1.0, 1.0]);
    }

    #[test]
    fn advance_matches_repeated_steps() {
        let mut cfg = PlantConfig::bglp_default();
        cfg.dt = 2.0;
        let mut a = Plant::new(cfg.clone()).unwrap();
        let mut b = Plant::new(cfg).unwrap();
        let actions = acts(&[0.3, 0.6, 0.2, 0.9, 0.4]);
        let agg = a.advance(&actions, 10.0).unwrap();
        let mut moved = 0.0;
        for _ in 0..5 {
            moved += b.step(&actions, 2.0).unwrap().transported[3];
        }
        assert_eq!(a.levels(), b.levels());
        assert!((agg.transported[3] - moved).abs() < 1e-12);
        assert!(a.advance(&actions, 3.0).is_err());
    }
}
