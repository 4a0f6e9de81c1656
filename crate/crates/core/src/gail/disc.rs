use super::obs::{mask_for_discriminator, network_input, JointObservation, JOINT_OBS_DIM};
use crate::math::{ln_1p, sigmoid, softplus};
use crate::neural::{Adam, AdamConfig, Mlp};
use crate::rng::SimRng;
use crate::sim::{Action, MAX_ANGULAR_VEL, MAX_LINEAR_VEL};
use alloc::vec;
use alloc::vec::Vec;

pub const DISC_INPUT_DIM: usize = JOINT_OBS_DIM + 2;
pub const DISC_HIDDEN: [usize; 2] = [32, 32];
/// D is kept inside `[floor, 1 - floor]` before the log in the reward.
pub const DISC_PROB_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscConfig {
    pub lr: f64,
    pub updates_per_round: usize,
    pub batch_size: usize,
}

impl Default for DiscConfig {
    fn default() -> Self {
        Self { lr: 3e-4, updates_per_round: 4, batch_size: 256 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscSample {
    pub joint: JointObservation,
    pub action: Action,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscStats {
    pub loss: f64,
    pub accuracy: f64,
}

/// Scores how expert-like a (swarm features, action) pair is. The logit is
/// `ln D - ln(1 - D)` with `D` the probability of the expert class.
#[derive(Clone, Debug, PartialEq)]
pub struct Discriminator {
    pub net: Mlp,
}

impl Discriminator {
    pub fn init(rng: &mut SimRng) -> Self {
        let sizes = [DISC_INPUT_DIM, DISC_HIDDEN[0], DISC_HIDDEN[1], 1];
        Self { net: Mlp::orthogonal(&sizes, 1.0, 1.0, rng).expect("static sizes") }
    }

    pub fn input(sample: &DiscSample) -> [f64; DISC_INPUT_DIM] {
        let obs = network_input(&mask_for_discriminator(sample.joint.as_array()));
        let mut x = [0.0; DISC_INPUT_DIM];
        x[..JOINT_OBS_DIM].copy_from_slice(&obs);
        x[JOINT_OBS_DIM] = sample.action.linear / MAX_LINEAR_VEL;
        x[JOINT_OBS_DIM + 1] = sample.action.angular / MAX_ANGULAR_VEL;
        x
    }

    pub fn logit(&self, sample: &DiscSample) -> f64 {
        self.net.forward(&Self::input(sample)).expect("disc input dim")[0]
    }

    pub fn probability(&self, sample: &DiscSample) -> f64 {
        sigmoid(self.logit(sample))
    }

    pub fn reward(&self, sample: &DiscSample) -> f64 {
        gail_reward_from_logit(self.logit(sample))
    }

    /// Mean binary cross-entropy (expert = 1, generated = 0) and accuracy.
    pub fn evaluate(&self, demo: &[DiscSample], generated: &[DiscSample]) -> DiscStats {
        let mut loss = 0.0;
        let mut correct = 0.0;
        for s in demo {
            let l = self.logit(s);
            loss += softplus(-l);
            correct += score(l > 0.0, l == 0.0);
        }
        for s in generated {
            let l = self.logit(s);
            loss += softplus(l);
            correct += score(l < 0.0, l == 0.0);
        }
        let n = (demo.len() + generated.len()).max(1) as f64;
        DiscStats { loss: loss / n, accuracy: correct / n }
    }

    /// Loss gradient over a balanced batch, as the mean of both class terms.
    pub fn gradient(&self, demo: &[&DiscSample], generated: &[&DiscSample]) -> Vec<f64> {
        let mut grads = vec![0.0; self.net.n_params()];
        let n = (demo.len() + generated.len()).max(1) as f64;
        for (batch, label) in [(demo, 1.0), (generated, 0.0)] {
            for s in batch {
                let cache = self.net.forward_cached(&Self::input(s)).expect("disc input dim");
                let g = (sigmoid(cache.output()[0]) - label) / n;
                self.net.backward_into(&cache, &[g], &mut grads).expect("disc output dim");
            }
        }
        grads
    }
}

fn score(correct: bool, tie: bool) -> f64 {
    if tie {
        0.5
    } else if correct {
        1.0
    } else {
        0.0
    }
}

/// `-ln(1 - D)` with `D = sigmoid(logit)` clamped away from 0 and 1.
pub fn gail_reward_from_logit(logit: f64) -> f64 {
    let d = sigmoid(logit).clamp(DISC_PROB_FLOOR, 1.0 - DISC_PROB_FLOOR);
    -ln_1p(-d)
}

/// Runs the configured number of Adam steps on balanced batches drawn with
/// replacement from both sets, then reports loss and accuracy over the full
/// sets.
pub fn discriminator_update(
    disc: &mut Discriminator,
    adam: &mut Adam,
    demo: &[DiscSample],
    generated: &[DiscSample],
    cfg: &DiscConfig,
    rng: &mut SimRng,
) -> DiscStats {
    if demo.is_empty() || generated.is_empty() {
        return disc.evaluate(demo, generated);
    }
    for _ in 0..cfg.updates_per_round {
        let d: Vec<&DiscSample> = (0..cfg.batch_size).map(|_| &demo[rng.index(demo.len())]).collect();
        let g: Vec<&DiscSample> = (0..cfg.batch_size).map(|_| &generated[rng.index(generated.len())]).collect();
        let grads = disc.gradient(&d, &g);
        adam.step(disc.net.params_mut(), &grads);
    }
    disc.evaluate(demo, generated)
}

/// Adam sized for `disc` with the configured learning rate.
pub fn disc_optimizer(disc: &Discriminator, cfg: &DiscConfig) -> Adam {
    Adam::new(disc.net.n_params(), AdamConfig::with_lr(cfg.lr))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reward_matches_closed_form() {
        for l in [-3.0, -0.5, 0.0, 0.7, 4.0] {
            let d = 1.0 / (1.0 + crate::math::exp(-l));
            assert!((gail_reward_from_logit(l) + crate::math::ln(1.0 - d)).abs() < 1e-12);
        }
        assert!((gail_reward_from_logit(0.0) - core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn reward_is_clamped() {
        let top = -crate::math::ln(DISC_PROB_FLOOR);
        assert!((gail_reward_from_logit(1e3) - top).abs() < 1e-9);
        assert!(gail_reward_from_logit(-1e3) > 0.0);
        assert!(gail_reward_from_logit(-1e3) < 2e-6);
    }
}
