use crate::math::{exp, tanh};
use crate::sim::{Action, MAX_ANGULAR_VEL, MAX_LINEAR_VEL};

pub const LOG_STD_MIN: f64 = -5.0;
pub const LOG_STD_MAX: f64 = 2.0;
pub const LOG_STD_INIT: f64 = -0.5;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// State-independent diagonal Gaussian over the two raw action dimensions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianPolicyHead {
    pub log_std: [f64; 2],
}

impl Default for GaussianPolicyHead {
    fn default() -> Self {
        Self {
            log_std: [LOG_STD_INIT; 2],
        }
    }
}

impl GaussianPolicyHead {
    pub fn clamp(&mut self) {
        for l in &mut self.log_std {
            *l = l.clamp(LOG_STD_MIN, LOG_STD_MAX);
        }
    }

    pub fn std(&self) -> [f64; 2] {
        self.log_std.map(exp)
    }

    /// Differential entropy of the raw-space Gaussian.
    pub fn entropy(&self) -> f64 {
        self.log_std.iter().map(|l| l + 0.5 + HALF_LN_2PI).sum()
    }
}

/// Log-density of `action_raw` under `N(mean, diag(exp(log_std))²)`.
pub fn gaussian_log_prob(head: &GaussianPolicyHead, mean: &[f64], action_raw: &[f64]) -> f64 {
    mean.iter()
        .zip(action_raw)
        .zip(&head.log_std)
        .map(|((m, a), ls)| {
            let z = (a - m) / exp(*ls);
            -0.5 * z * z - ls - HALF_LN_2PI
        })
        .sum()
}

/// Maps a raw sample onto the actuator ranges:
/// `v = 0.155·(tanh(a₀)+1)`, `ω = 1.9·tanh(a₁)`.
pub fn squash_action(raw: &[f64; 2]) -> Action {
    Action::new(
        0.5 * MAX_LINEAR_VEL * (tanh(raw[0]) + 1.0),
        MAX_ANGULAR_VEL * tanh(raw[1]),
    )
}
