//! Demonstration and rollout records, and demo-set validation.

use crate::behaviors::ScheduledCommand;
use crate::features::FEATURE_DIM;
use crate::sim::{Action, LOCAL_OBS_DIM};
use crate::{EPISODE_STEPS, N_ROBOTS};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Number of rollouts in a demonstration set.
pub const DEMO_ROLLOUTS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrajectorySource {
    Human,
    Scripted,
    PpoPolicy,
    GailPolicy,
}

impl TrajectorySource {
    pub fn as_str(self) -> &'static str {
        match self {
            TrajectorySource::Human => "human",
            TrajectorySource::Scripted => "scripted",
            TrajectorySource::PpoPolicy => "ppo_policy",
            TrajectorySource::GailPolicy => "gail_policy",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "human" => TrajectorySource::Human,
            "scripted" => TrajectorySource::Scripted,
            "ppo_policy" => TrajectorySource::PpoPolicy,
            "gail_policy" => TrajectorySource::GailPolicy,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryMeta {
    pub mission: String,
    pub seed: u64,
    pub source: TrajectorySource,
    pub control_hz: u32,
    pub n_robots: usize,
    pub steps: usize,
    /// Free-form creation timestamp, filled in by whoever writes the file.
    pub created: String,
    /// Digest of the canonical arena text.
    pub arena_hash: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RobotRecord {
    pub obs: [f64; LOCAL_OBS_DIM],
    pub action: Action,
    pub behavior: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub sim_time: f64,
    pub features: [f64; FEATURE_DIM],
    pub robots: Vec<RobotRecord>,
}

/// One episode of swarm features with per-robot observations and actions.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub meta: TrajectoryMeta,
    pub records: Vec<StepRecord>,
    /// Operator commands that produced the episode, if it was scripted or
    /// recorded from a human.
    pub schedule: Vec<ScheduledCommand>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    RolloutCount { expected: usize, got: usize },
    MissionMismatch { rollout: usize },
    ArenaMismatch { rollout: usize },
    RecordCount { rollout: usize, expected: usize, got: usize },
    RobotCount { rollout: usize, step: usize },
    NonFinite { rollout: usize, step: usize },
    Header { rollout: usize, field: &'static str },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RolloutCount { expected, got } => write!(f, "expected {expected} rollouts, found {got}"),
            Violation::MissionMismatch { rollout } => write!(f, "rollout {rollout}: mission mismatch"),
            Violation::ArenaMismatch { rollout } => write!(f, "rollout {rollout}: arena hash mismatch"),
            Violation::RecordCount { rollout, expected, got } => {
                write!(f, "rollout {rollout}: record count mismatch (expected {expected}, found {got})")
            }
            Violation::RobotCount { rollout, step } => write!(f, "rollout {rollout}, step {step}: wrong robot count"),
            Violation::NonFinite { rollout, step } => write!(f, "rollout {rollout}, step {step}: non-finite value"),
            Violation::Header { rollout, field } => write!(f, "rollout {rollout}: header field `{field}` is invalid"),
        }
    }
}

impl Trajectory {
    /// Per-trajectory invariants, reported as `rollout` index `idx`.
    pub fn violations(&self, idx: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        let m = &self.meta;
        if m.control_hz != 1 {
            out.push(Violation::Header { rollout: idx, field: "control_hz" });
        }
        if m.n_robots != N_ROBOTS {
            out.push(Violation::Header { rollout: idx, field: "n_robots" });
        }
        if m.steps != EPISODE_STEPS {
            out.push(Violation::Header { rollout: idx, field: "steps" });
        }
        if self.records.len() != EPISODE_STEPS {
            out.push(Violation::RecordCount {
                rollout: idx,
                expected: EPISODE_STEPS,
                got: self.records.len(),
            });
        }
        for (step, r) in self.records.iter().enumerate() {
            if r.robots.len() != m.n_robots {
                out.push(Violation::RobotCount { rollout: idx, step });
            }
            if !record_is_finite(r) {
                out.push(Violation::NonFinite { rollout: idx, step });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.violations(0).is_empty()
    }

    /// Per-robot `(obs, action)` pairs together with the step's features.
    pub fn samples(&self) -> impl Iterator<Item = (&[f64; FEATURE_DIM], &RobotRecord)> + '_ {
        self.records.iter().flat_map(|r| r.robots.iter().map(move |rr| (&r.features, rr)))
    }
}

fn record_is_finite(r: &StepRecord) -> bool {
    r.sim_time.is_finite()
        && r.features.iter().all(|v| v.is_finite())
        && r.robots.iter().all(|rr| {
            rr.obs.iter().all(|v| v.is_finite()) && rr.action.linear.is_finite() && rr.action.angular.is_finite()
        })
}

/// The expert data for one imitation run.
#[derive(Clone, Debug, PartialEq)]
pub struct DemoSet {
    pub mission: String,
    pub rollouts: Vec<Trajectory>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_demoset(d: &DemoSet) -> ValidationReport {
    let mut violations = Vec::new();
    if d.rollouts.len() != DEMO_ROLLOUTS {
        violations.push(Violation::RolloutCount {
            expected: DEMO_ROLLOUTS,
            got: d.rollouts.len(),
        });
    }
    let arena = d.rollouts.first().map(|t| t.meta.arena_hash.as_str());
    for (i, t) in d.rollouts.iter().enumerate() {
        if t.meta.mission != d.mission {
            violations.push(Violation::MissionMismatch { rollout: i });
        }
        if Some(t.meta.arena_hash.as_str()) != arena {
            violations.push(Violation::ArenaMismatch { rollout: i });
        }
        violations.extend(t.violations(i));
    }
    ValidationReport { violations }
}
