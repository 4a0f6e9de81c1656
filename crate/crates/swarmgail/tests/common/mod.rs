#![allow(dead_code)]

use swarmgail_core::behaviors::{Beacon, BehaviorKind, OperatorCommand, ScheduledCommand};
use swarmgail_core::features::FEATURE_DIM;
use swarmgail_core::geometry::Circle;
use swarmgail_core::sim::{Action, LOCAL_OBS_DIM};
use swarmgail_core::trajectory::{RobotRecord, StepRecord, Trajectory, TrajectoryMeta, TrajectorySource};
use swarmgail_core::{Point, SimRng, EPISODE_STEPS, N_ROBOTS};

/// Any finite double: mostly raw bit patterns (subnormals, huge
/// exponents, negative zero) plus plain small values.
pub fn any_finite(rng: &mut SimRng) -> f64 {
    if rng.coin() {
        return rng.uniform_range(-10.0, 10.0);
    }
    loop {
        let v = f64::from_bits(rng.next_u64());
        if v.is_finite() {
            return v;
        }
    }
}

fn behavior(rng: &mut SimRng) -> BehaviorKind {
    let p = Point::new(any_finite(rng), any_finite(rng));
    match rng.index(5) {
        0 => BehaviorKind::Stop,
        1 => BehaviorKind::Random,
        2 => BehaviorKind::Deploy,
        3 => BehaviorKind::Come(p),
        _ => BehaviorKind::Leave(p),
    }
}

fn command(rng: &mut SimRng) -> OperatorCommand {
    match rng.index(4) {
        0 => {
            let robots = (0..N_ROBOTS).filter(|_| rng.coin()).collect();
            OperatorCommand::Assign { robots, behavior: behavior(rng) }
        }
        1 => OperatorCommand::PlaceBeacon(Beacon {
            zone: Circle { center: Point::new(any_finite(rng), any_finite(rng)), radius: any_finite(rng) },
            behavior: behavior(rng),
        }),
        2 => OperatorCommand::RemoveBeacon(rng.index(10)),
        _ => OperatorCommand::SetSpeedCap(rng.coin().then(|| any_finite(rng))),
    }
}

const LABELS: [&str; 5] = ["stop", "random", "come", "leave", "deploy"];
const SOURCES: [TrajectorySource; 4] =
    [TrajectorySource::Human, TrajectorySource::Scripted, TrajectorySource::PpoPolicy, TrajectorySource::GailPolicy];
const MISSIONS: [&str; 6] = ["standing-still", "full-speed", "controlled-speed", "aggregation", "dispersion", "foraging"];

/// A valid trajectory with arbitrary contents.
pub fn random_trajectory(rng: &mut SimRng) -> Trajectory {
    let schedule = (0..rng.index(6))
        .map(|_| ScheduledCommand { step: rng.index(EPISODE_STEPS), command: command(rng) })
        .collect();
    let records = (0..EPISODE_STEPS)
        .map(|_| {
            let mut features = [0.0; FEATURE_DIM];
            features.iter_mut().for_each(|f| *f = any_finite(rng));
            let robots = (0..N_ROBOTS)
                .map(|_| {
                    let mut obs = [0.0; LOCAL_OBS_DIM];
                    obs.iter_mut().for_each(|o| *o = any_finite(rng));
                    RobotRecord {
                        obs,
                        action: Action::new(any_finite(rng), any_finite(rng)),
                        behavior: rng.coin().then(|| LABELS[rng.index(LABELS.len())].to_string()),
                    }
                })
                .collect();
            StepRecord { sim_time: any_finite(rng), features, robots }
        })
        .collect();
    let created = if rng.coin() { String::new() } else { format!("2026-01-{:02}T12:00:00Z build {}", rng.index(28) + 1, rng.index(100)) };
    Trajectory {
        meta: TrajectoryMeta {
            mission: MISSIONS[rng.index(MISSIONS.len())].into(),
            seed: rng.next_u64(),
            source: SOURCES[rng.index(SOURCES.len())],
            control_hz: 1,
            n_robots: N_ROBOTS,
            steps: EPISODE_STEPS,
            created,
            arena_hash: format!("{:016x}", rng.next_u64()),
        },
        records,
        schedule,
    }
}
