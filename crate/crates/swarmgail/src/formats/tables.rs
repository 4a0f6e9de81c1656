//! CSV outputs: per-round training metrics and evaluation results.

use super::FormatError;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::path::Path;
use swarmgail_core::gail::RoundMetrics;

#[derive(Serialize)]
struct MetricsRow {
    round: usize,
    env_steps: u64,
    disc_loss: Option<f64>,
    disc_acc: Option<f64>,
    mean_gail_reward: Option<f64>,
    mean_true_return: f64,
}

/// Appends one row per training round; columns `round, env_steps, disc_loss,
/// disc_acc, mean_gail_reward, mean_true_return`. Discriminator columns are
/// empty for runs on the mission reward.
pub struct MetricsWriter {
    inner: csv::Writer<File>,
}

impl MetricsWriter {
    pub fn create(path: &Path) -> Result<Self, FormatError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| FormatError::io(dir, e))?;
        }
        Ok(Self { inner: csv::Writer::from_path(path)? })
    }

    pub fn write(&mut self, m: &RoundMetrics) -> Result<(), FormatError> {
        self.inner.serialize(MetricsRow {
            round: m.round,
            env_steps: m.env_steps,
            disc_loss: m.disc_loss,
            disc_acc: m.disc_acc,
            mean_gail_reward: m.mean_gail_reward,
            mean_true_return: m.mean_true_return,
        })?;
        self.inner.flush().map_err(|e| FormatError::Io { path: "metrics".into(), source: e })
    }
}

pub fn write_metrics(path: &Path, rows: &[RoundMetrics]) -> Result<(), FormatError> {
    let mut w = MetricsWriter::create(path)?;
    rows.iter().try_for_each(|m| w.write(m))
}

/// One evaluated episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub mission: String,
    pub policy: String,
    pub episode: usize,
    pub seed: u64,
    pub episode_return: f64,
    pub mean_speed: f64,
}

pub fn write_results(path: &Path, rows: &[EvalRow]) -> Result<(), FormatError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| FormatError::io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| FormatError::io(path, e))
}

pub fn read_results(path: &Path) -> Result<Vec<EvalRow>, FormatError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<EvalRow>, _>>()?)
}
