//! The experimental protocol as library calls: demonstrations, imitation or
//! PPO training with checkpointing, and evaluation. The CLI is a thin layer
//! over these.

use crate::formats::{self, EvalRow, FormatError, MetricsWriter};
use std::path::{Path, PathBuf};
use swarmgail_core::behaviors::ScheduledCommand;
use swarmgail_core::episode::{run_operator_episode, EpisodeError};
use swarmgail_core::gail::{self, GailConfig, Policy, RewardSource, RoundMetrics, Snapshot, TrainError, TrainSink};
use swarmgail_core::missions::MissionSpec;
use swarmgail_core::sim::SpawnError;
use swarmgail_core::trajectory::{validate_demoset, DemoSet, Trajectory, TrajectorySource, ValidationReport, DEMO_ROLLOUTS};

/// Fixed sub-directories of an output root.
pub const DEMOS_DIR: &str = "demos";
pub const CKPTS_DIR: &str = "ckpts";
pub const EVALS_DIR: &str = "evals";
pub const METRICS_FILE: &str = "metrics.csv";
/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "SWARMGAIL_OUT";
pub const DEFAULT_OUT: &str = "runs";

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Episode(#[from] EpisodeError),
    #[error(transparent)]
    Spawn(#[from] SpawnError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error("demonstration set failed validation:\n{0}")]
    Validation(ValidationReport),
    #[error("invalid demonstration file: {0}")]
    InvalidFile(#[source] FormatError),
    #[error("{0}")]
    Usage(String),
}

/// Output root: an explicit path, else `$SWARMGAIL_OUT`, else `./runs`.
pub fn output_root(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub fn demo_dir(root: &Path, mission: &MissionSpec) -> PathBuf {
    root.join(DEMOS_DIR).join(mission.name())
}

pub fn ckpt_name(index: usize) -> String {
    format!("ckpt_{index:03}")
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn finish(mut rollouts: Vec<Trajectory>, mission: &MissionSpec) -> Result<DemoSet, PipelineError> {
    let created = timestamp();
    for t in &mut rollouts {
        t.meta.created = created.clone();
    }
    let set = DemoSet { mission: mission.name().into(), rollouts };
    let report = validate_demoset(&set);
    if report.is_ok() {
        Ok(set)
    } else {
        Err(PipelineError::Validation(report))
    }
}

/// Five rollouts of an operator schedule (or the mission's scripted strategy
/// when `schedule` is `None`) on seeds `seed..seed + 5`.
pub fn operator_demos(
    mission: &MissionSpec,
    seed: u64,
    schedule: Option<&[ScheduledCommand]>,
    source: TrajectorySource,
) -> Result<(DemoSet, Vec<f64>), PipelineError> {
    let mut rollouts = Vec::with_capacity(DEMO_ROLLOUTS);
    let mut returns = Vec::with_capacity(DEMO_ROLLOUTS);
    for k in 0..DEMO_ROLLOUTS as u64 {
        let run = run_operator_episode(mission, seed + k, schedule, source)?;
        returns.push(run.episode_return);
        rollouts.push(run.trajectory);
    }
    Ok((finish(rollouts, mission)?, returns))
}

/// Five deterministic rollouts of a trained policy, usable as demonstrations.
pub fn policy_demos(
    mission: &MissionSpec,
    policy: &Policy,
    seed: u64,
    source: TrajectorySource,
) -> Result<(DemoSet, Vec<f64>), PipelineError> {
    let mut rollouts = Vec::with_capacity(DEMO_ROLLOUTS);
    let mut returns = Vec::with_capacity(DEMO_ROLLOUTS);
    for k in 0..DEMO_ROLLOUTS as u64 {
        let r = gail::collect_rollout(policy, None, mission, seed + k, gail::ActionMode::Deterministic, source)?;
        returns.push(r.true_return);
        rollouts.push(r.trajectory);
    }
    Ok((finish(rollouts, mission)?, returns))
}

/// Writes checkpoints and metrics into a run directory as training goes.
struct DirSink<'a, 'b> {
    dir: &'a Path,
    metrics: MetricsWriter,
    error: Option<FormatError>,
    log: Option<&'b mut dyn FnMut(&RoundMetrics)>,
}

impl TrainSink for DirSink<'_, '_> {
    fn on_round(&mut self, m: &RoundMetrics) {
        if let Err(e) = self.metrics.write(m) {
            self.error.get_or_insert(e);
        }
        if let Some(log) = self.log.as_mut() {
            log(m);
        }
    }

    fn on_checkpoint(&mut self, index: usize, env_steps: u64, s: &Snapshot) {
        if let Err(e) = formats::save_checkpoint(s, env_steps, &self.dir.join(ckpt_name(index))) {
            self.error.get_or_insert(e);
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrainReport {
    pub run_dir: PathBuf,
    pub checkpoints: Vec<PathBuf>,
    pub rounds: usize,
    pub env_steps: u64,
    pub final_snapshot: Snapshot,
}

impl TrainReport {
    pub fn final_checkpoint(&self) -> Option<&Path> {
        self.checkpoints.last().map(PathBuf::as_path)
    }
}

/// Trains into `run_dir`: `ckpt_000 ... ckpt_NNN` plus `metrics.csv`.
/// `demos = None` trains PPO on the mission reward.
pub fn train_run(
    mission: &MissionSpec,
    demos: Option<&DemoSet>,
    cfg: &GailConfig,
    run_dir: &Path,
    log: Option<&mut dyn FnMut(&RoundMetrics)>,
) -> Result<TrainReport, PipelineError> {
    if let Some(d) = demos {
        let report = validate_demoset(d);
        if !report.is_ok() {
            return Err(PipelineError::Validation(report));
        }
    }
    std::fs::create_dir_all(run_dir).map_err(|e| FormatError::io(run_dir, e))?;
    let mut sink = DirSink { dir: run_dir, metrics: MetricsWriter::create(&run_dir.join(METRICS_FILE))?, error: None, log };
    let source = match demos {
        Some(d) => RewardSource::Imitation(d),
        None => RewardSource::Mission,
    };
    let summary = gail::train(cfg, mission, source, &mut sink)?;
    if let Some(e) = sink.error {
        return Err(e.into());
    }
    Ok(TrainReport {
        run_dir: run_dir.to_path_buf(),
        checkpoints: (0..summary.checkpoints).map(|k| run_dir.join(ckpt_name(k))).collect(),
        rounds: summary.rounds,
        env_steps: summary.env_steps,
        final_snapshot: summary.snapshot,
    })
}

/// What gets evaluated.
#[derive(Clone, Debug)]
pub enum EvalSubject {
    Policy { label: String, policy: Box<Policy> },
    /// The mission's scripted demonstrator, for baseline rows.
    Scripted,
}

impl EvalSubject {
    pub fn label(&self) -> &str {
        match self {
            EvalSubject::Policy { label, .. } => label,
            EvalSubject::Scripted => "scripted",
        }
    }
}

/// Runs `episodes` seeded episodes (`seed..seed + episodes`), the policy
/// acting through its deterministic mean.
pub fn evaluate(mission: &MissionSpec, subject: &EvalSubject, episodes: usize, seed: u64) -> Result<Vec<EvalRow>, PipelineError> {
    (0..episodes)
        .map(|k| {
            let s = seed + k as u64;
            let (ret, speed) = match subject {
                EvalSubject::Policy { policy, .. } => {
                    let r = gail::collect_rollout(
                        policy,
                        None,
                        mission,
                        s,
                        gail::ActionMode::Deterministic,
                        TrajectorySource::GailPolicy,
                    )?;
                    (r.true_return, r.mean_speed)
                }
                EvalSubject::Scripted => {
                    let r = run_operator_episode(mission, s, None, TrajectorySource::Scripted)?;
                    (r.episode_return, r.mean_speed)
                }
            };
            Ok(EvalRow {
                mission: mission.name().into(),
                policy: subject.label().into(),
                episode: k,
                seed: s,
                episode_return: ret,
                mean_speed: speed,
            })
        })
        .collect()
}

pub fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}
