use super::obs::{mask_for_policy, network_input, JointObservation, JOINT_OBS_DIM};
use crate::neural::{gaussian_log_prob, squash_action, GaussianPolicyHead, Mlp, ShapeError};
use crate::rng::SimRng;
use crate::sim::Action;

pub const POLICY_HIDDEN: [usize; 2] = [64, 64];
pub const VALUE_HIDDEN: [usize; 2] = [64, 64];

/// Decentralized Gaussian policy. It only ever sees the policy-masked joint
/// observation.
#[derive(Clone, Debug, PartialEq)]
pub struct Policy {
    pub mean: Mlp,
    pub head: GaussianPolicyHead,
}

impl Policy {
    pub fn init(rng: &mut SimRng) -> Self {
        let sizes = [JOINT_OBS_DIM, POLICY_HIDDEN[0], POLICY_HIDDEN[1], 2];
        Self {
            mean: Mlp::orthogonal(&sizes, 1.0, 0.01, rng).expect("static sizes"),
            head: GaussianPolicyHead::default(),
        }
    }

    pub fn from_parts(mean: Mlp, head: GaussianPolicyHead) -> Result<Self, ShapeError> {
        if mean.input_dim() != JOINT_OBS_DIM {
            return Err(ShapeError::Input { expected: JOINT_OBS_DIM, got: mean.input_dim() });
        }
        if mean.output_dim() != 2 {
            return Err(ShapeError::OutputGrad { expected: 2, got: mean.output_dim() });
        }
        Ok(Self { mean, head })
    }

    pub fn input(joint: &JointObservation) -> [f64; JOINT_OBS_DIM] {
        network_input(&mask_for_policy(joint.as_array()))
    }

    /// Raw-space mean action.
    pub fn mean_action(&self, joint: &JointObservation) -> [f64; 2] {
        let out = self.mean.forward(&Self::input(joint)).expect("policy input dim");
        [out[0], out[1]]
    }

    /// Samples a raw action; returns it with its log-probability.
    pub fn sample(&self, joint: &JointObservation, rng: &mut SimRng) -> ([f64; 2], f64) {
        let mu = self.mean_action(joint);
        let std = self.head.std();
        let raw = [mu[0] + std[0] * rng.normal(), mu[1] + std[1] * rng.normal()];
        (raw, gaussian_log_prob(&self.head, &mu, &raw))
    }

    /// Squashed mean action.
    pub fn act_deterministic(&self, joint: &JointObservation) -> Action {
        squash_action(&self.mean_action(joint))
    }

    pub fn log_prob(&self, joint: &JointObservation, raw: &[f64; 2]) -> f64 {
        gaussian_log_prob(&self.head, &self.mean_action(joint), raw)
    }
}

/// Critic with the policy's architecture. It is only used during training,
/// so it sees the full joint observation.
pub fn value_network(rng: &mut SimRng) -> Mlp {
    Mlp::orthogonal(&[JOINT_OBS_DIM, VALUE_HIDDEN[0], VALUE_HIDDEN[1], 1], 1.0, 1.0, rng).expect("static sizes")
}

pub fn value_estimate(value: &Mlp, joint: &JointObservation) -> f64 {
    value.forward(&network_input(joint.as_array())).expect("value input dim")[0]
}
