//! One mission episode: world, feature accumulator, foraging bookkeeping and
//! rewards, advanced one control step at a time.

use crate::behaviors::{Operator, OperatorError, ScheduledCommand};
use crate::features::{FeatureAccumulator, SwarmFeatures};
use crate::missions::{reward, scripted_demonstration, ForagingEvents, ForagingState, MissionSpec};
use crate::rng::SimRng;
use crate::sim::{sense, spawn_world, Action, LocalObservation, SpawnError, WorldState};
use crate::trajectory::{RobotRecord, StepRecord, Trajectory, TrajectoryMeta, TrajectorySource};
use crate::N_ROBOTS;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub events: ForagingEvents,
    pub done: bool,
}

#[derive(Clone, Debug)]
pub struct Episode {
    mission: MissionSpec,
    world: WorldState,
    acc: FeatureAccumulator,
    foraging: ForagingState,
    features: SwarmFeatures,
    step: usize,
    total_reward: f64,
    /// Randomness for whoever picks the actions (behaviors or a policy).
    pub rng: SimRng,
}

impl Episode {
    pub fn new(mission: MissionSpec, seed: u64) -> Result<Self, SpawnError> {
        let mut world = spawn_world(mission.arena.clone(), N_ROBOTS, seed)?;
        let rng = world.rng.fork();
        let mut acc = FeatureAccumulator::new();
        let features = acc.update(&world);
        let foraging = ForagingState::new(&world);
        Ok(Self {
            mission,
            world,
            acc,
            foraging,
            features,
            step: 0,
            total_reward: 0.0,
            rng,
        })
    }

    pub fn mission(&self) -> &MissionSpec {
        &self.mission
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    /// Features of the current (pre-action) world.
    pub fn features(&self) -> &SwarmFeatures {
        &self.features
    }

    pub fn foraging(&self) -> &ForagingState {
        &self.foraging
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    pub fn is_done(&self) -> bool {
        self.step >= self.mission.episode_steps
    }

    /// Undiscounted sum of rewards so far.
    pub fn total_reward(&self) -> f64 {
        self.total_reward
    }

    pub fn local_observations(&self) -> Vec<LocalObservation> {
        (0..self.world.robots.len()).map(|i| sense(&self.world, i)).collect()
    }

    /// Applies all actions simultaneously; the reward is computed from the
    /// features of the resulting world.
    pub fn step(&mut self, actions: &[Action]) -> StepOutcome {
        self.world.step(actions);
        self.features = self.acc.update(&self.world);
        let events = self.foraging.update(&self.world);
        let r = reward(&self.mission, &self.features, events);
        self.total_reward += r;
        self.step += 1;
        StepOutcome {
            reward: r,
            events,
            done: self.is_done(),
        }
    }
}

/// Builds a [`Trajectory`] step by step.
#[derive(Clone, Debug)]
pub struct TrajectoryRecorder {
    trajectory: Trajectory,
}

impl TrajectoryRecorder {
    pub fn new(mission: &MissionSpec, seed: u64, source: TrajectorySource) -> Self {
        Self {
            trajectory: Trajectory {
                meta: TrajectoryMeta {
                    mission: mission.name().to_string(),
                    seed,
                    source,
                    control_hz: 1,
                    n_robots: N_ROBOTS,
                    steps: mission.episode_steps,
                    created: String::new(),
                    arena_hash: mission.arena.digest(),
                },
                records: Vec::with_capacity(mission.episode_steps),
                schedule: Vec::new(),
            },
        }
    }

    /// Records the pre-step state of `episode` together with the actions about
    /// to be applied.
    pub fn record(&mut self, episode: &Episode, obs: &[LocalObservation], actions: &[Action], labels: Option<&[&str]>) {
        let robots = obs
            .iter()
            .zip(actions)
            .enumerate()
            .map(|(i, (o, a))| RobotRecord {
                obs: o.to_array(),
                action: *a,
                behavior: labels.map(|l| l[i].to_string()),
            })
            .collect();
        self.trajectory.records.push(StepRecord {
            sim_time: episode.world().sim_time,
            features: episode.features().to_array(),
            robots,
        });
    }

    pub fn len(&self) -> usize {
        self.trajectory.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectory.records.is_empty()
    }

    pub fn push_command(&mut self, cmd: ScheduledCommand) {
        self.trajectory.schedule.push(cmd);
    }

    pub fn set_created(&mut self, created: String) {
        self.trajectory.meta.created = created;
    }

    pub fn finish(self) -> Trajectory {
        self.trajectory
    }
}

#[derive(Clone, Debug)]
pub struct OperatorRun {
    pub trajectory: Trajectory,
    pub episode_return: f64,
    pub rewards: Vec<f64>,
    /// Swarm average speed after each step, averaged over the episode.
    pub mean_speed: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EpisodeError {
    #[error(transparent)]
    Spawn(#[from] SpawnError),
    #[error("command at step {step}: {source}")]
    Command { step: usize, source: OperatorError },
}

/// Runs a full episode driven by operator commands. `schedule = None` uses the
/// mission's scripted demonstration strategy.
pub fn run_operator_episode(
    mission: &MissionSpec,
    seed: u64,
    schedule: Option<&[ScheduledCommand]>,
    source: TrajectorySource,
) -> Result<OperatorRun, EpisodeError> {
    let mut ep = Episode::new(mission.clone(), seed)?;
    let commands: Vec<ScheduledCommand> = match schedule {
        Some(s) => s.to_vec(),
        None => scripted_demonstration(mission, ep.world()),
    };
    let mut op = Operator::new(ep.world().robots.len());
    let mut rec = TrajectoryRecorder::new(mission, seed, source);
    let mut rewards = Vec::with_capacity(mission.episode_steps);
    let mut speed_sum = 0.0;
    while !ep.is_done() {
        let step = ep.step_index();
        for c in commands.iter().filter(|c| c.step == step) {
            op.apply(&c.command, ep.world())
                .map_err(|source| EpisodeError::Command { step, source })?;
        }
        let obs = ep.local_observations();
        let mut rng = core::mem::replace(&mut ep.rng, SimRng::seed_from(0));
        let actions = op.actions(ep.world(), &mut rng);
        ep.rng = rng;
        let labels = op.labels();
        rec.record(&ep, &obs, &actions, Some(&labels));
        rewards.push(ep.step(&actions).reward);
        speed_sum += ep.features().avg_speed;
    }
    for c in commands {
        rec.push_command(c);
    }
    Ok(OperatorRun {
        trajectory: rec.finish(),
        episode_return: ep.total_reward(),
        rewards,
        mean_speed: speed_sum / mission.episode_steps.max(1) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::missions::MissionKind;
    use crate::EPISODE_STEPS;

    #[test]
    fn standing_still_scripted_returns_zero() {
        let m = MissionSpec::new(MissionKind::StandingStill);
        for seed in 0..5 {
            let run = run_operator_episode(&m, seed, None, TrajectorySource::Scripted).unwrap();
            assert_eq!(run.episode_return, 0.0);
            assert_eq!(run.trajectory.records.len(), EPISODE_STEPS);
            assert!(run.trajectory.is_valid());
        }
    }

    #[test]
    fn controlled_speed_actions_respect_cap() {
        let m = MissionSpec::new(MissionKind::ControlledSpeed);
        let run = run_operator_episode(&m, 3, None, TrajectorySource::Scripted).unwrap();
        for r in &run.trajectory.records {
            for rr in &r.robots {
                assert!(rr.action.linear <= 0.1);
            }
        }
    }

    #[test]
    fn replaying_the_schedule_reproduces_features() {
        let m = MissionSpec::new(MissionKind::Foraging);
        let a = run_operator_episode(&m, 9, None, TrajectorySource::Scripted).unwrap();
        let b = run_operator_episode(&m, 9, Some(&a.trajectory.schedule), TrajectorySource::Human).unwrap();
        assert_eq!(a.trajectory.records, b.trajectory.records);
    }

    #[test]
    fn time_advances_one_second_per_record() {
        let m = MissionSpec::new(MissionKind::FullSpeed);
        let run = run_operator_episode(&m, 1, None, TrajectorySource::Scripted).unwrap();
        for (t, r) in run.trajectory.records.iter().enumerate() {
            assert_eq!(r.sim_time, t as f64);
        }
    }
}
