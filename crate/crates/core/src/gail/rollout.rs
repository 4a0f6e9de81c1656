use super::obs::JointObservation;
use super::policy::{value_estimate, Policy};
use crate::episode::{Episode, TrajectoryRecorder};
use crate::missions::MissionSpec;
use crate::neural::{squash_action, Mlp};
use crate::sim::{Action, SpawnError};
use crate::trajectory::{Trajectory, TrajectorySource};
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionMode {
    /// Sample from the Gaussian; used while training.
    Stochastic,
    /// Squashed mean action; used for evaluation.
    Deterministic,
}

/// One robot's view of one control step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitionRecord {
    pub joint: JointObservation,
    pub raw_action: [f64; 2],
    pub action: Action,
    /// Reward the learner is trained on. Starts as the mission reward and is
    /// overwritten by the imitation reward when there is one.
    pub reward: f64,
    pub true_reward: f64,
    pub value: f64,
    pub log_prob: f64,
    pub done: bool,
    pub robot: usize,
}

#[derive(Clone, Debug)]
pub struct Rollout {
    /// One stream per robot, in time order.
    pub streams: Vec<Vec<TransitionRecord>>,
    pub trajectory: Trajectory,
    pub true_return: f64,
    /// Swarm average speed after each step, averaged over the episode.
    pub mean_speed: f64,
}

impl Rollout {
    pub fn transitions(&self) -> impl Iterator<Item = &TransitionRecord> + '_ {
        self.streams.iter().flatten()
    }
}

/// Runs one episode with every robot querying the same policy on its own
/// joint observation.
pub fn collect_rollout(
    policy: &Policy,
    value: Option<&Mlp>,
    mission: &MissionSpec,
    seed: u64,
    mode: ActionMode,
    source: TrajectorySource,
) -> Result<Rollout, SpawnError> {
    let mut ep = Episode::new(mission.clone(), seed)?;
    let n = ep.world().robots.len();
    let mut rec = TrajectoryRecorder::new(mission, seed, source);
    let mut streams: Vec<Vec<TransitionRecord>> = (0..n).map(|_| Vec::with_capacity(mission.episode_steps)).collect();
    let mut actions = Vec::with_capacity(n);
    let mut speed_sum = 0.0;
    while !ep.is_done() {
        let obs = ep.local_observations();
        let features = ep.features().to_array();
        actions.clear();
        let start = streams[0].len();
        for (i, o) in obs.iter().enumerate() {
            let joint = JointObservation::new(&o.to_array(), &features);
            let (raw, log_prob) = match mode {
                ActionMode::Stochastic => policy.sample(&joint, &mut ep.rng),
                ActionMode::Deterministic => {
                    let mu = policy.mean_action(&joint);
                    (mu, policy.log_prob(&joint, &mu))
                }
            };
            let action = squash_action(&raw);
            actions.push(action);
            streams[i].push(TransitionRecord {
                joint,
                raw_action: raw,
                action,
                reward: 0.0,
                true_reward: 0.0,
                value: value.map_or(0.0, |v| value_estimate(v, &joint)),
                log_prob,
                done: false,
                robot: i,
            });
        }
        rec.record(&ep, &obs, &actions, None);
        let out = ep.step(&actions);
        speed_sum += ep.features().avg_speed;
        for s in &mut streams {
            let t = &mut s[start];
            t.reward = out.reward;
            t.true_reward = out.reward;
            t.done = out.done;
        }
    }
    Ok(Rollout {
        streams,
        trajectory: rec.finish(),
        true_return: ep.total_reward(),
        mean_speed: speed_sum / mission.episode_steps.max(1) as f64,
    })
}

/// Deterministic returns of `policy` on each seed.
pub fn evaluate_policy(policy: &Policy, mission: &MissionSpec, seeds: &[u64]) -> Result<Vec<f64>, SpawnError> {
    seeds
        .iter()
        .map(|&s| {
            collect_rollout(policy, None, mission, s, ActionMode::Deterministic, TrajectorySource::GailPolicy)
                .map(|r| r.true_return)
        })
        .collect()
}
