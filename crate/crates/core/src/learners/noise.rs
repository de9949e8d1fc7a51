use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::ActionValue;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuParams {
    pub theta: f64,
    pub mu: f64,
    pub sigma: f64,
    pub clip: f64,
}

impl Default for OuParams {
    fn default() -> Self {
        Self { theta: 0.15, mu: 0.0, sigma: 0.2, clip: 0.3 }
    }
}

/// Discrete Ornstein-Uhlenbeck process `x <- x + theta (mu - x) + sigma g`,
/// clipped to `[-clip, clip]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OuNoise {
    x: f64,
    params: OuParams,
}

impl OuNoise {
    pub fn new(params: OuParams) -> Result<Self> {
        Self::with_state(params, 0.0)
    }

    pub fn with_state(params: OuParams, x: f64) -> Result<Self> {
        let OuParams { theta, mu, sigma, clip } = params;
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::config(format!("OU theta must be > 0, got {theta}")));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::config(format!("OU sigma must be >= 0, got {sigma}")));
        }
        if !(clip.is_finite() && clip > 0.0) || !mu.is_finite() || !x.is_finite() {
            return Err(Error::config("OU clip must be > 0 and mu, x finite"));
        }
        Ok(Self { x: x.clamp(-clip, clip), params })
    }

    pub fn value(&self) -> f64 {
        self.x
    }

    pub fn params(&self) -> &OuParams {
        &self.params
    }

    pub fn reset(&mut self) {
        self.x = 0.0;
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        let p = &self.params;
        let g: f64 = rng.sample(StandardNormal);
        self.x = (self.x + p.theta * (p.mu - self.x) + p.sigma * g).clamp(-p.clip, p.clip);
        self.x
    }
}

/// Uniform random action, the best-response exploration rule.
pub fn explore_random<R: Rng + ?Sized>(rng: &mut R) -> ActionValue {
    ActionValue::new(rng.random::<f64>()).expect("uniform sample is finite")
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn drift_only_without_diffusion() {
        let p = OuParams { theta: 0.15, mu: 0.0, sigma: 0.0, clip: 0.3 };
        let mut n = OuNoise::with_state(p, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((n.step(&mut rng) - 0.17).abs() < 1e-15);
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let p = OuParams { sigma: 0.0, ..OuParams::default() };
        let mut n = OuNoise::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(n.step(&mut rng), 0.0);
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(OuNoise::new(OuParams { theta: 0.0, ..OuParams::default() }).is_err());
        assert!(OuNoise::new(OuParams { sigma: -1.0, ..OuParams::default() }).is_err());
    }

    #[test]
    fn random_exploration_is_seeded_and_in_range() {
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let x = explore_random(&mut a);
            assert_eq!(x, explore_random(&mut b));
            assert!((0.0..=1.0).contains(&x.get()));
        }
    }

    #[test]
    fn random_exploration_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mean = (0..100_000).map(|_| explore_random(&mut rng).get()).sum::<f64>() / 1e5;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }
}
