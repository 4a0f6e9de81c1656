//! Scripted robot behaviors, beacon triggers and selection-level commands.
//!
//! Behaviors are operator-side tools: unlike the learned policy they may read
//! the global world state.

mod operator;
mod voronoi;

pub use operator::{Operator, OperatorCommand, OperatorError, ScheduledCommand};
pub use voronoi::{area_centroid, voronoi_cells, voronoi_centroids, Polygon};

use crate::geometry::{Circle, Point};
use crate::math::{atan2, wrap_angle};
use crate::rng::SimRng;
use crate::sim::{Action, WorldState, MAX_ANGULAR_VEL, MAX_LINEAR_VEL};

/// Distance at which `Come` stops.
pub const COME_STOP_RADIUS: f64 = 0.2;
/// Width of the slow-down band outside the stop radius.
pub const COME_SLOWDOWN_BAND: f64 = 0.4;
/// Slowest approach speed inside the band, so the stop radius is reached in
/// finitely many 1 s control steps.
pub const COME_MIN_APPROACH: f64 = 0.05;
pub const HEADING_GAIN: f64 = 2.0;
/// Heading offset applied by `Deploy` after a collision (clockwise).
pub const DEPLOY_DEFLECTION: f64 = -15.0 * core::f64::consts::PI / 180.0;
pub const RANDOM_TURN_MIN: u32 = 1;
pub const RANDOM_TURN_MAX: u32 = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BehaviorKind {
    Stop,
    Random,
    Come(Point),
    Leave(Point),
    Deploy,
}

impl BehaviorKind {
    pub fn label(&self) -> &'static str {
        match self {
            BehaviorKind::Stop => "stop",
            BehaviorKind::Random => "random",
            BehaviorKind::Come(_) => "come",
            BehaviorKind::Leave(_) => "leave",
            BehaviorKind::Deploy => "deploy",
        }
    }

    pub fn target(&self) -> Option<Point> {
        match self {
            BehaviorKind::Come(t) | BehaviorKind::Leave(t) => Some(*t),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BehaviorState {
    pub kind: BehaviorKind,
    /// Remaining in-place turning steps of `Random`.
    pub turn_steps_remaining: u32,
    /// +1 counter-clockwise, -1 clockwise.
    pub turn_direction: i8,
}

impl BehaviorState {
    pub fn new(kind: BehaviorKind) -> Self {
        Self {
            kind,
            turn_steps_remaining: 0,
            turn_direction: 1,
        }
    }
}

impl From<BehaviorKind> for BehaviorState {
    fn from(kind: BehaviorKind) -> Self {
        Self::new(kind)
    }
}

/// Circular trigger zone that reassigns a behavior to robots inside it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Beacon {
    pub zone: Circle,
    pub behavior: BehaviorKind,
}

/// Heading controller toward `target`. `stop_radius > 0` enables the
/// stop-and-slow-down profile of `Come`.
fn seek(world: &WorldState, index: usize, target: Point, stop_radius: f64, heading_offset: f64) -> Action {
    let robot = &world.robots[index];
    let d = target - robot.position;
    let dist = d.norm();
    if stop_radius > 0.0 && dist <= stop_radius {
        return Action::STOP;
    }
    let desired = if dist > 0.0 { atan2(d.y, d.x) } else { robot.heading };
    let err = wrap_angle(desired + heading_offset - robot.heading);
    let angular = (HEADING_GAIN * err).clamp(-MAX_ANGULAR_VEL, MAX_ANGULAR_VEL);
    let linear = if dist > stop_radius + COME_SLOWDOWN_BAND {
        MAX_LINEAR_VEL
    } else if stop_radius > 0.0 {
        (MAX_LINEAR_VEL * (dist - stop_radius) / COME_SLOWDOWN_BAND).max(COME_MIN_APPROACH)
    } else {
        MAX_LINEAR_VEL * dist / COME_SLOWDOWN_BAND
    };
    Action::new(linear, angular)
}

fn random_step(mut state: BehaviorState, bumper: bool, rng: &mut SimRng) -> (Action, BehaviorState) {
    state.kind = BehaviorKind::Random;
    if state.turn_steps_remaining == 0 && bumper {
        state.turn_steps_remaining = rng.int_inclusive(RANDOM_TURN_MIN, RANDOM_TURN_MAX);
        state.turn_direction = if rng.coin() { 1 } else { -1 };
    }
    if state.turn_steps_remaining > 0 {
        state.turn_steps_remaining -= 1;
        let w = f64::from(state.turn_direction) * MAX_ANGULAR_VEL;
        (Action::new(0.0, w), state)
    } else {
        (Action::new(MAX_LINEAR_VEL, 0.0), state)
    }
}

/// One control step of a scripted behavior for robot `index`.
pub fn behavior_step(
    state: BehaviorState,
    world: &WorldState,
    index: usize,
    rng: &mut SimRng,
) -> (Action, BehaviorState) {
    let robot = &world.robots[index];
    match state.kind {
        BehaviorKind::Stop => (Action::STOP, state),
        BehaviorKind::Random => random_step(state, robot.bumper, rng),
        BehaviorKind::Come(t) => (seek(world, index, t, COME_STOP_RADIUS, 0.0), state),
        BehaviorKind::Leave(t) => {
            if robot.bumper {
                return random_step(BehaviorState::new(BehaviorKind::Random), true, rng);
            }
            // aim at the point mirrored through the robot, i.e. straight away from t
            let away = robot.position + (robot.position - t);
            let mut a = seek(world, index, away, 0.0, 0.0);
            a.linear = MAX_LINEAR_VEL;
            (a, state)
        }
        BehaviorKind::Deploy => {
            let centroid = voronoi_centroids(&world.positions(), &world.arena)[index];
            let offset = if robot.bumper { DEPLOY_DEFLECTION } else { 0.0 };
            (seek(world, index, centroid, 0.0, offset), state)
        }
    }
}

/// Reassigns behaviors of robots standing in a beacon zone. The first beacon
/// in list order wins; a robot already running that behavior keeps its state.
pub fn apply_beacons(states: &mut [BehaviorState], beacons: &[Beacon], world: &WorldState) {
    for (state, robot) in states.iter_mut().zip(&world.robots) {
        if let Some(b) = beacons.iter().find(|b| b.zone.contains(robot.position)) {
            if state.kind != b.behavior {
                *state = BehaviorState::new(b.behavior);
            }
        }
    }
}

/// Scales down the forward speed of an action to respect a speed cap.
pub fn apply_speed_cap(action: Action, cap: Option<f64>) -> Action {
    match cap {
        Some(c) => Action::new(action.linear.min(c.max(0.0)), action.angular),
        None => action,
    }
}
