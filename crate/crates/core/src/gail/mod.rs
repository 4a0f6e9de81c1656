//! Adversarial imitation for the swarm.
//!
//! One shared policy is queried once per robot per control step on that
//! robot's local observation; the discriminator sees only the swarm-level
//! features and the action. Both consume the same 33-value joint observation
//! with the block they must not see zeroed.

mod disc;
mod obs;
mod policy;
mod ppo;
mod rollout;
mod train;

pub use disc::{
    disc_optimizer, discriminator_update, gail_reward_from_logit, DiscConfig, DiscSample, DiscStats, Discriminator, DISC_INPUT_DIM,
    DISC_PROB_FLOOR,
};
pub use obs::{
    mask_for_discriminator, mask_for_policy, network_input, JointObservation, FEATURE_BLOCK, JOINT_OBS_DIM, LOCAL_BLOCK,
    OBS_SCALE,
};
pub use policy::{value_estimate, value_network, Policy, POLICY_HIDDEN, VALUE_HIDDEN};
pub use ppo::{clipped_surrogate, gae, ppo_update, PpoConfig, PpoOptimizers, PpoStats};
pub use rollout::{collect_rollout, evaluate_policy, ActionMode, Rollout, TransitionRecord};
pub use train::{
    checkpoint_thresholds, train, CollectingSink, GailConfig, RewardSource, RoundMetrics, Snapshot, TrainError,
    TrainSink, TrainSummary,
};
