use super::disc::{disc_optimizer, discriminator_update, DiscConfig, DiscSample, Discriminator};
use super::obs::JointObservation;
use super::policy::{value_network, Policy};
use super::ppo::{ppo_update, PpoConfig, PpoOptimizers, PpoStats};
use super::rollout::{collect_rollout, ActionMode, Rollout};
use crate::missions::MissionSpec;
use crate::neural::Mlp;
use crate::rng::SimRng;
use crate::sim::SpawnError;
use crate::trajectory::{DemoSet, TrajectorySource, Violation};
use crate::N_ROBOTS;
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GailConfig {
    /// Robot transitions over the whole run: one per robot per control step,
    /// so an episode costs `episode_steps * N_ROBOTS`.
    pub total_env_steps: u64,
    pub episodes_per_round: usize,
    pub checkpoints: usize,
    pub seed: u64,
    pub ppo: PpoConfig,
    pub disc: DiscConfig,
}

impl Default for GailConfig {
    fn default() -> Self {
        Self {
            total_env_steps: 153_000,
            episodes_per_round: 3,
            checkpoints: 100,
            seed: 0,
            ppo: PpoConfig::default(),
            disc: DiscConfig::default(),
        }
    }
}

/// Where the learner's reward comes from.
#[derive(Clone, Copy, Debug)]
pub enum RewardSource<'a> {
    /// Adversarial imitation of the given demonstrations.
    Imitation(&'a DemoSet),
    /// Plain PPO on the mission reward.
    Mission,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundMetrics {
    pub round: usize,
    pub env_steps: u64,
    pub disc_loss: Option<f64>,
    pub disc_acc: Option<f64>,
    pub mean_gail_reward: Option<f64>,
    pub mean_true_return: f64,
    pub ppo: PpoStats,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub policy: Policy,
    pub value: Mlp,
    pub discriminator: Option<Discriminator>,
}

/// Receives progress while [`train`] runs.
pub trait TrainSink {
    fn on_round(&mut self, _metrics: &RoundMetrics) {}
    /// `index` runs from 0 to `checkpoints - 1`.
    fn on_checkpoint(&mut self, _index: usize, _env_steps: u64, _snapshot: &Snapshot) {}
}

impl TrainSink for () {}

/// Keeps everything in memory.
#[derive(Clone, Debug, Default)]
pub struct CollectingSink {
    pub rounds: Vec<RoundMetrics>,
    pub checkpoints: Vec<(usize, u64, Snapshot)>,
}

impl TrainSink for CollectingSink {
    fn on_round(&mut self, m: &RoundMetrics) {
        self.rounds.push(*m);
    }
    fn on_checkpoint(&mut self, index: usize, env_steps: u64, s: &Snapshot) {
        self.checkpoints.push((index, env_steps, s.clone()));
    }
}

#[derive(Clone, Debug)]
pub struct TrainSummary {
    pub rounds: usize,
    pub env_steps: u64,
    pub checkpoints: usize,
    pub snapshot: Snapshot,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrainError {
    #[error("no demonstrations")]
    NoDemos,
    #[error("demonstrations are for `{found}`, training `{expected}`")]
    MissionMismatch { expected: String, found: String },
    #[error("invalid demonstration: {0}")]
    InvalidDemo(Violation),
    #[error("invalid configuration: {0}")]
    Config(&'static str),
    #[error(transparent)]
    Spawn(#[from] SpawnError),
}

/// Transition counts at which checkpoints `0..count` are taken:
/// `ceil(k * total / count)` for `k = 1..=count`.
pub fn checkpoint_thresholds(total: u64, count: usize) -> Vec<u64> {
    let c = count as u64;
    (1..=c).map(|k| (k * total).div_ceil(c)).collect()
}

fn demo_samples(demos: &DemoSet, mission: &MissionSpec) -> Result<Vec<DiscSample>, TrainError> {
    if demos.rollouts.is_empty() {
        return Err(TrainError::NoDemos);
    }
    if demos.mission != mission.name() {
        return Err(TrainError::MissionMismatch { expected: mission.name().into(), found: demos.mission.clone() });
    }
    let mut out = Vec::new();
    for (i, t) in demos.rollouts.iter().enumerate() {
        if let Some(v) = t.violations(i).into_iter().next() {
            return Err(TrainError::InvalidDemo(v));
        }
        if t.meta.mission != mission.name() {
            return Err(TrainError::InvalidDemo(Violation::MissionMismatch { rollout: i }));
        }
        out.extend(t.samples().map(|(f, r)| DiscSample { joint: JointObservation::new(&r.obs, f), action: r.action }));
    }
    Ok(out)
}

/// Trains a policy for `mission`. Exactly `cfg.checkpoints` snapshots are
/// handed to the sink, the last one after the final round.
pub fn train(
    cfg: &GailConfig,
    mission: &MissionSpec,
    source: RewardSource<'_>,
    sink: &mut dyn TrainSink,
) -> Result<TrainSummary, TrainError> {
    if cfg.episodes_per_round == 0 || cfg.checkpoints == 0 || cfg.total_env_steps == 0 {
        return Err(TrainError::Config("episodes per round, checkpoints and step budget must be positive"));
    }
    let demos = match source {
        RewardSource::Imitation(d) => Some(demo_samples(d, mission)?),
        RewardSource::Mission => None,
    };
    let mut rng = SimRng::seed_from(cfg.seed);
    let mut init_rng = rng.fork();
    let mut policy = Policy::init(&mut init_rng);
    let mut value = value_network(&mut init_rng);
    let mut disc = demos.as_ref().map(|_| Discriminator::init(&mut init_rng));
    let mut ppo_opt = PpoOptimizers::new(&policy, &value, &cfg.ppo);
    let mut disc_opt = disc.as_ref().map(|d| disc_optimizer(d, &cfg.disc));
    let mut update_rng = rng.fork();

    let ep_steps = (mission.episode_steps * N_ROBOTS) as u64;
    let thresholds = checkpoint_thresholds(cfg.total_env_steps, cfg.checkpoints);
    let mut next_ckpt = 0usize;
    let mut env_steps = 0u64;
    let mut round = 0usize;
    // whole episodes only, never past the budget
    loop {
        let remaining = cfg.total_env_steps - env_steps;
        let n_eps = ((remaining / ep_steps) as usize).min(cfg.episodes_per_round);
        if n_eps == 0 {
            break;
        }
        let mut rollouts: Vec<Rollout> = Vec::with_capacity(n_eps);
        for _ in 0..n_eps {
            let seed = rng.next_u64();
            rollouts.push(collect_rollout(
                &policy,
                Some(&value),
                mission,
                seed,
                ActionMode::Stochastic,
                TrajectorySource::GailPolicy,
            )?);
        }
        env_steps += n_eps as u64 * ep_steps;
        let mean_true_return = rollouts.iter().map(|r| r.true_return).sum::<f64>() / n_eps as f64;

        let (mut disc_loss, mut disc_acc, mut mean_gail_reward) = (None, None, None);
        if let (Some(demo), Some(d), Some(opt)) = (demos.as_ref(), disc.as_mut(), disc_opt.as_mut()) {
            let generated: Vec<DiscSample> = rollouts
                .iter()
                .flat_map(|r| r.transitions())
                .map(|t| DiscSample { joint: t.joint, action: t.action })
                .collect();
            let stats = discriminator_update(d, opt, demo, &generated, &cfg.disc, &mut update_rng);
            disc_loss = Some(stats.loss);
            disc_acc = Some(stats.accuracy);
            let mut total = 0.0;
            let mut count = 0usize;
            for r in &mut rollouts {
                for t in r.streams.iter_mut().flatten() {
                    t.reward = d.reward(&DiscSample { joint: t.joint, action: t.action });
                    total += t.reward;
                    count += 1;
                }
            }
            mean_gail_reward = Some(total / count.max(1) as f64);
        }

        let streams: Vec<_> = rollouts.into_iter().flat_map(|r| r.streams).collect();
        let ppo = ppo_update(&mut policy, &mut value, &mut ppo_opt, &streams, &cfg.ppo, &mut update_rng);
        sink.on_round(&RoundMetrics {
            round,
            env_steps,
            disc_loss,
            disc_acc,
            mean_gail_reward,
            mean_true_return,
            ppo,
        });
        round += 1;

        if next_ckpt < thresholds.len() && thresholds[next_ckpt] <= env_steps {
            let snap = Snapshot { policy: policy.clone(), value: value.clone(), discriminator: disc.clone() };
            while next_ckpt < thresholds.len() && thresholds[next_ckpt] <= env_steps {
                sink.on_checkpoint(next_ckpt, env_steps, &snap);
                next_ckpt += 1;
            }
        }
    }
    // a budget that is not a whole number of episodes leaves the last
    // thresholds unreached; they all get the final policy
    if next_ckpt < thresholds.len() {
        let snap = Snapshot { policy: policy.clone(), value: value.clone(), discriminator: disc.clone() };
        while next_ckpt < thresholds.len() {
            sink.on_checkpoint(next_ckpt, env_steps, &snap);
            next_ckpt += 1;
        }
    }
    Ok(TrainSummary {
        rounds: round,
        env_steps,
        checkpoints: next_ckpt,
        snapshot: Snapshot { policy, value, discriminator: disc },
    })
}
