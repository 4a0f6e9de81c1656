//! Trajectory files. A fixed header, the operator schedule (if any), then
//! one line per control step:
//!
//! ```text
//! swarmgail-trajectory 1
//! mission foraging
//! seed 3
//! source scripted
//! control_hz 1
//! n_robots 3
//! steps 51
//! created 2026-10-15T09:30:00Z
//! arena_hash 5f1c...
//! command 0 assign 0,1,2 random
//! record <sim_time> <23 features> robot <10 obs> <v> <w> <label> robot ...
//! ```
//!
//! The observation block is `speed, lidar×5, black, white, gray, bumper`.
//! A missing behavior label is written as `-`.

use super::schedule::{parse_command, write_command};
use super::{float, read_file, write_file, FormatError};
use std::fmt::Write;
use std::path::{Path, PathBuf};
use swarmgail_core::behaviors::ScheduledCommand;
use swarmgail_core::features::FEATURE_DIM;
use swarmgail_core::sim::{Action, LOCAL_OBS_DIM};
use swarmgail_core::trajectory::{DemoSet, RobotRecord, StepRecord, Trajectory, TrajectoryMeta, TrajectorySource};

pub const TRAJECTORY_EXTENSION: &str = "traj";
const MAGIC: &str = "swarmgail-trajectory 1";

fn check_token(what: &str, s: &str) -> Result<(), FormatError> {
    if s.is_empty() || s.split_whitespace().count() != 1 || s.contains('\n') {
        return Err(FormatError::Invalid(format!("{what} `{s}` must be a single non-empty word")));
    }
    Ok(())
}

pub fn write_trajectory(t: &Trajectory) -> Result<String, FormatError> {
    let m = &t.meta;
    check_token("mission", &m.mission)?;
    check_token("arena hash", &m.arena_hash)?;
    if m.created.contains('\n') {
        return Err(FormatError::Invalid("created timestamp spans lines".into()));
    }
    let mut out = String::with_capacity(64 * 1024);
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "mission {}", m.mission);
    let _ = writeln!(out, "seed {}", m.seed);
    let _ = writeln!(out, "source {}", m.source.as_str());
    let _ = writeln!(out, "control_hz {}", m.control_hz);
    let _ = writeln!(out, "n_robots {}", m.n_robots);
    let _ = writeln!(out, "steps {}", m.steps);
    let _ = writeln!(out, "created {}", m.created.trim());
    let _ = writeln!(out, "arena_hash {}", m.arena_hash);
    for c in &t.schedule {
        let _ = writeln!(out, "command {} {}", c.step, write_command(&c.command));
    }
    for r in &t.records {
        if !r.sim_time.is_finite() {
            return Err(FormatError::Invalid("non-finite sim_time".into()));
        }
        let _ = write!(out, "record {}", r.sim_time);
        for v in &r.features {
            let _ = write!(out, " {v}");
        }
        for rr in &r.robots {
            out.push_str(" robot");
            for v in rr.obs.iter().chain([&rr.action.linear, &rr.action.angular]) {
                if !v.is_finite() {
                    return Err(FormatError::Invalid("non-finite value in record".into()));
                }
                let _ = write!(out, " {v}");
            }
            match &rr.behavior {
                Some(l) => {
                    check_token("behavior label", l)?;
                    if l == "-" {
                        return Err(FormatError::Invalid("behavior label `-` is reserved".into()));
                    }
                    let _ = write!(out, " {l}");
                }
                None => out.push_str(" -"),
            }
        }
        if r.features.iter().any(|v| !v.is_finite()) {
            return Err(FormatError::Invalid("non-finite feature".into()));
        }
        out.push('\n');
    }
    Ok(out)
}

fn header_value<'a>(line: &'a str, key: &str, n: usize) -> Result<&'a str, FormatError> {
    match line.split_once(' ') {
        Some((k, v)) if k == key => Ok(v.trim()),
        None if line == key => Ok(""),
        _ => Err(FormatError::parse(n, format!("expected `{key}`"))),
    }
}

fn int<T: std::str::FromStr>(s: &str, n: usize) -> Result<T, FormatError> {
    s.parse().map_err(|_| FormatError::parse(n, format!("bad integer `{s}`")))
}

fn parse_record(line: &str, n: usize) -> Result<StepRecord, FormatError> {
    let mut toks = line.split_whitespace();
    toks.next(); // "record"
    let sim_time = float(toks.next().ok_or_else(|| FormatError::parse(n, "missing sim_time"))?, n)?;
    let mut features = [0.0; FEATURE_DIM];
    for f in &mut features {
        let tok = toks.next().ok_or_else(|| FormatError::parse(n, "too few features"))?;
        if tok == "robot" {
            return Err(FormatError::parse(n, "too few features"));
        }
        *f = float(tok, n)?;
    }
    let mut robots = Vec::new();
    while let Some(tok) = toks.next() {
        if tok != "robot" {
            return Err(FormatError::parse(n, format!("expected `robot`, found `{tok}`")));
        }
        let mut vals = [0.0; LOCAL_OBS_DIM + 2];
        for v in &mut vals {
            let tok = toks.next().ok_or_else(|| FormatError::parse(n, "robot block too short"))?;
            *v = float(tok, n)?;
        }
        let label = toks.next().ok_or_else(|| FormatError::parse(n, "missing behavior label"))?;
        let mut obs = [0.0; LOCAL_OBS_DIM];
        obs.copy_from_slice(&vals[..LOCAL_OBS_DIM]);
        robots.push(RobotRecord {
            obs,
            action: Action::new(vals[LOCAL_OBS_DIM], vals[LOCAL_OBS_DIM + 1]),
            behavior: (label != "-").then(|| label.to_string()),
        });
    }
    Ok(StepRecord { sim_time, features, robots })
}

/// Parses a trajectory file and checks the per-trajectory invariants.
pub fn parse_trajectory(text: &str) -> Result<Trajectory, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    let mut next = |key: &str| -> Result<(usize, String), FormatError> {
        let (n, l) = lines.next().ok_or_else(|| FormatError::parse(0, format!("missing `{key}`")))?;
        Ok((n, header_value(l, key, n)?.to_string()))
    };
    let (_, magic) = next("swarmgail-trajectory")?;
    if magic != "1" {
        return Err(FormatError::parse(1, "unsupported trajectory version"));
    }
    let (_, mission) = next("mission")?;
    let (n, seed) = next("seed")?;
    let seed = int(&seed, n)?;
    let (n, source) = next("source")?;
    let source = TrajectorySource::parse(&source).ok_or_else(|| FormatError::parse(n, "unknown source"))?;
    let (n, hz) = next("control_hz")?;
    let control_hz = int(&hz, n)?;
    let (n, nr) = next("n_robots")?;
    let n_robots = int(&nr, n)?;
    let (n, st) = next("steps")?;
    let steps = int(&st, n)?;
    let (_, created) = next("created")?;
    let (_, arena_hash) = next("arena_hash")?;
    drop(next);

    let mut schedule = Vec::new();
    let mut records = Vec::new();
    for (n, line) in text.lines().enumerate().skip(9).map(|(i, l)| (i + 1, l.trim())) {
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("command ") {
            if !records.is_empty() {
                return Err(FormatError::parse(n, "command after records"));
            }
            let (step, cmd) = rest.split_once(' ').ok_or_else(|| FormatError::parse(n, "command needs a step"))?;
            schedule.push(ScheduledCommand { step: int(step, n)?, command: parse_command(cmd, n)? });
        } else if line.starts_with("record ") || line == "record" {
            let r = parse_record(line, n)?;
            if r.robots.len() != n_robots {
                return Err(FormatError::parse(n, format!("expected {n_robots} robots, found {}", r.robots.len())));
            }
            records.push(r);
        } else {
            return Err(FormatError::parse(n, "expected `command` or `record`"));
        }
    }
    if records.len() != steps {
        return Err(FormatError::RecordCount { expected: steps, found: records.len() });
    }
    let t = Trajectory {
        meta: TrajectoryMeta { mission, seed, source, control_hz, n_robots, steps, created, arena_hash },
        records,
        schedule,
    };
    if let Some(v) = t.violations(0).into_iter().next() {
        return Err(FormatError::Invalid(v.to_string()));
    }
    Ok(t)
}

pub fn save_trajectory(t: &Trajectory, path: &Path) -> Result<(), FormatError> {
    write_file(path, &write_trajectory(t)?)
}

pub fn load_trajectory(path: &Path) -> Result<Trajectory, FormatError> {
    parse_trajectory(&read_file(path)?).map_err(|e| match e {
        FormatError::Parse { line, msg } => FormatError::Parse { line, msg: format!("{}: {msg}", path.display()) },
        e => e,
    })
}

/// Writes `rollout_0.traj`, `rollout_1.traj`, ... into `dir`.
pub fn save_demoset(d: &DemoSet, dir: &Path) -> Result<Vec<PathBuf>, FormatError> {
    d.rollouts
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let p = dir.join(format!("rollout_{k}.{TRAJECTORY_EXTENSION}"));
            save_trajectory(t, &p).map(|_| p)
        })
        .collect()
}

/// Loads every `.traj` file in `dir`, in file-name order.
pub fn load_demoset(dir: &Path) -> Result<DemoSet, FormatError> {
    let entries = std::fs::read_dir(dir).map_err(|e| FormatError::io(dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == TRAJECTORY_EXTENSION))
        .collect();
    paths.sort();
    let rollouts = paths.iter().map(|p| load_trajectory(p)).collect::<Result<Vec<_>, _>>()?;
    let mission = rollouts.first().map(|t| t.meta.mission.clone()).unwrap_or_default();
    Ok(DemoSet { mission, rollouts })
}
