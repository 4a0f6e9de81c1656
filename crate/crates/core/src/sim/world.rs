use crate::geometry::Point;
use crate::math::wrap_angle;
use crate::rng::SimRng;
use crate::CONTROL_PERIOD;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::ArenaSpec;

/// Robot body radius in meters (approximate TurtleBot 4 footprint).
pub const BODY_RADIUS: f64 = 0.17;
pub const MAX_LINEAR_VEL: f64 = 0.31;
pub const MAX_ANGULAR_VEL: f64 = 1.9;
/// Physics substeps per control step.
pub const SUBSTEPS: usize = 10;
pub const SUBSTEP_DT: f64 = CONTROL_PERIOD / SUBSTEPS as f64;

const SPAWN_ATTEMPTS: usize = 1000;
const CONTACT_BISECTIONS: usize = 60;

/// Velocity command for one robot.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Action {
    pub linear: f64,
    pub angular: f64,
}

impl Action {
    pub const STOP: Action = Action { linear: 0.0, angular: 0.0 };

    pub const fn new(linear: f64, angular: f64) -> Self {
        Self { linear, angular }
    }

    /// Clamps into the actuator ranges. Non-finite components become 0.
    pub fn clamped(self) -> Self {
        let fix = |v: f64| if v.is_finite() { v } else { 0.0 };
        Self {
            linear: fix(self.linear).clamp(0.0, MAX_LINEAR_VEL),
            angular: fix(self.angular).clamp(-MAX_ANGULAR_VEL, MAX_ANGULAR_VEL),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobotState {
    pub position: Point,
    /// Radians in `[-π, π)`.
    pub heading: f64,
    /// Realized forward speed over the last control step; 0 if it was halted.
    pub linear_vel: f64,
    pub angular_vel: f64,
    pub bumper: bool,
}

impl RobotState {
    pub fn at(position: Point, heading: f64) -> Self {
        Self {
            position,
            heading: wrap_angle(heading),
            linear_vel: 0.0,
            angular_vel: 0.0,
            bumper: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpawnError {
    #[error("spawn zone too small")]
    ZoneTooSmall,
    #[error("arena has no spawn zone")]
    NoSpawnZone,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorldState {
    pub arena: ArenaSpec,
    pub robots: Vec<RobotState>,
    pub sim_time: f64,
    pub rng: SimRng,
}

/// Places `n_robots` uniformly at random inside the spawn zones.
pub fn spawn_world(arena: ArenaSpec, n_robots: usize, seed: u64) -> Result<WorldState, SpawnError> {
    if arena.spawn_zones.is_empty() {
        return Err(SpawnError::NoSpawnZone);
    }
    let mut rng = SimRng::seed_from(seed);
    let mut robots: Vec<RobotState> = Vec::with_capacity(n_robots);
    for _ in 0..n_robots {
        let mut placed = None;
        for _ in 0..SPAWN_ATTEMPTS {
            let zone = arena.spawn_zones[rng.index(arena.spawn_zones.len())];
            let p = Point::new(
                rng.uniform_range(zone.min.x, zone.max.x),
                rng.uniform_range(zone.min.y, zone.max.y),
            );
            let heading = rng.uniform_range(-PI, PI);
            if body_fits(&arena, &robots, None, p) {
                placed = Some(RobotState::at(p, heading));
                break;
            }
        }
        robots.push(placed.ok_or(SpawnError::ZoneTooSmall)?);
    }
    Ok(WorldState {
        arena,
        robots,
        sim_time: 0.0,
        rng,
    })
}

/// Free-function form of [`WorldState::step`].
pub fn step_world(world: &WorldState, actions: &[Action]) -> WorldState {
    let mut next = world.clone();
    next.step(actions);
    next
}

/// What a body would overlap at a candidate position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Obstacle {
    Boundary,
    Wall,
    Robot(usize),
}

fn obstacle_at(arena: &ArenaSpec, robots: &[RobotState], me: Option<usize>, p: Point) -> Option<Obstacle> {
    let r = BODY_RADIUS;
    if p.x < r || p.y < r || p.x > arena.width - r || p.y > arena.height - r {
        return Some(Obstacle::Boundary);
    }
    if arena.walls.iter().any(|w| w.distance_to(p) < r) {
        return Some(Obstacle::Wall);
    }
    robots
        .iter()
        .enumerate()
        .filter(|(j, _)| Some(*j) != me)
        .find(|(_, other)| other.position.distance(p) < 2.0 * r)
        .map(|(j, _)| Obstacle::Robot(j))
}

fn body_fits(arena: &ArenaSpec, robots: &[RobotState], me: Option<usize>, p: Point) -> bool {
    obstacle_at(arena, robots, me, p).is_none()
}

impl WorldState {
    pub fn n_robots(&self) -> usize {
        self.robots.len()
    }

    pub fn positions(&self) -> Vec<Point> {
        self.robots.iter().map(|r| r.position).collect()
    }

    /// Advances one control period with explicit Euler unicycle kinematics.
    ///
    /// Robots move sequentially in index order within each substep, so the
    /// result never contains overlapping bodies. A robot that would collide is
    /// moved to the contact point and its forward motion is halted for the rest
    /// of the control step; it keeps rotating. Both parties of a robot-robot
    /// contact get their bumper set.
    ///
    /// # Panics
    ///
    /// If `actions.len()` differs from the number of robots.
    pub fn step(&mut self, actions: &[Action]) {
        assert_eq!(actions.len(), self.robots.len(), "one action per robot");
        let n = self.robots.len();
        let commands: Vec<Action> = actions.iter().map(|a| a.clamped()).collect();
        let mut halted = alloc::vec![false; n];
        let mut bumped = alloc::vec![false; n];

        for _ in 0..SUBSTEPS {
            for i in 0..n {
                let cmd = commands[i];
                let state = self.robots[i];
                if !halted[i] && cmd.linear > 0.0 {
                    let delta = Point::from_heading(state.heading) * (cmd.linear * SUBSTEP_DT);
                    let start = state.position;
                    let target = start + delta;
                    match obstacle_at(&self.arena, &self.robots, Some(i), target) {
                        None => self.robots[i].position = target,
                        Some(first_hit) => {
                            let (contact, hit) = self.contact_point(i, start, delta, first_hit);
                            self.robots[i].position = contact;
                            halted[i] = true;
                            bumped[i] = true;
                            if let Obstacle::Robot(j) = hit {
                                bumped[j] = true;
                            }
                        }
                    }
                }
                self.robots[i].heading = wrap_angle(state.heading + cmd.angular * SUBSTEP_DT);
            }
        }

        for (i, robot) in self.robots.iter_mut().enumerate() {
            robot.linear_vel = if halted[i] { 0.0 } else { commands[i].linear };
            robot.angular_vel = commands[i].angular;
            robot.bumper = bumped[i];
        }
        self.sim_time += CONTROL_PERIOD;
    }

    /// Bisects the substep displacement for the furthest collision-free point.
    fn contact_point(&self, i: usize, start: Point, delta: Point, first_hit: Obstacle) -> (Point, Obstacle) {
        if !body_fits(&self.arena, &self.robots, Some(i), start) {
            return (start, first_hit);
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut hit = first_hit;
        for _ in 0..CONTACT_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            match obstacle_at(&self.arena, &self.robots, Some(i), start + delta * mid) {
                None => lo = mid,
                Some(o) => {
                    hi = mid;
                    hit = o;
                }
            }
        }
        (start + delta * lo, hit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;

    fn world_with(robots: Vec<RobotState>) -> WorldState {
        WorldState {
            arena: ArenaSpec::empty(4.0, 4.0),
            robots,
            sim_time: 0.0,
            rng: SimRng::seed_from(0),
        }
    }

    #[test]
    fn spawn_is_deterministic() {
        let a = spawn_world(ArenaSpec::empty(4.0, 4.0), 3, 7).unwrap();
        let b = spawn_world(ArenaSpec::empty(4.0, 4.0), 3, 7).unwrap();
        assert_eq!(a, b);
        for (ra, rb) in a.robots.iter().zip(&b.robots) {
            assert_eq!(ra.position.x.to_bits(), rb.position.x.to_bits());
            assert_eq!(ra.heading.to_bits(), rb.heading.to_bits());
        }
        let c = spawn_world(ArenaSpec::empty(4.0, 4.0), 3, 8).unwrap();
        assert_ne!(a.robots, c.robots);
    }

    #[test]
    fn tiny_spawn_zone_fails() {
        let mut arena = ArenaSpec::empty(4.0, 4.0);
        arena.spawn_zones = alloc::vec![Rect::new(1.95, 1.95, 2.05, 2.05)];
        let err = spawn_world(arena, 3, 1).unwrap_err();
        assert_eq!(err, SpawnError::ZoneTooSmall);
        assert_eq!(alloc::format!("{err}"), "spawn zone too small");
    }

    #[test]
    fn spawned_bodies_do_not_overlap() {
        let mut arena = ArenaSpec::empty(4.0, 4.0);
        arena.spawn_zones = alloc::vec![Rect::new(1.4, 1.4, 2.6, 2.6)];
        for seed in 0..50 {
            let w = spawn_world(arena.clone(), 3, seed).unwrap();
            for i in 0..3 {
                for j in i + 1..3 {
                    assert!(w.robots[i].position.distance(w.robots[j].position) >= 2.0 * BODY_RADIUS);
                }
                assert_eq!(w.robots[i].linear_vel, 0.0);
            }
        }
    }

    #[test]
    fn straight_line() {
        let mut w = world_with(alloc::vec![RobotState::at(Point::new(1.0, 1.0), 0.0)]);
        w.step(&[Action::new(0.31, 0.0)]);
        let r = w.robots[0];
        assert!((r.position.x - 1.31).abs() < 1e-9);
        assert!((r.position.y - 1.0).abs() < 1e-9);
        assert_eq!(r.heading, 0.0);
        assert!(!r.bumper);
        assert_eq!(r.linear_vel, 0.31);
        assert_eq!(w.sim_time, 1.0);
    }

    #[test]
    fn pure_rotation() {
        let mut w = world_with(alloc::vec![RobotState::at(Point::new(2.0, 2.0), 0.0)]);
        w.step(&[Action::new(0.0, 1.9)]);
        let r = w.robots[0];
        assert_eq!(r.position, Point::new(2.0, 2.0));
        assert!((r.heading - 1.9).abs() < 1e-12);
        w.step(&[Action::new(0.0, 1.9)]);
        assert!((w.robots[0].heading - wrap_angle(3.8)).abs() < 1e-12);
    }

    #[test]
    fn actions_are_clamped() {
        let mut w = world_with(alloc::vec![RobotState::at(Point::new(2.0, 2.0), 0.0)]);
        w.step(&[Action::new(5.0, -9.0)]);
        assert_eq!(w.robots[0].linear_vel, MAX_LINEAR_VEL);
        assert_eq!(w.robots[0].angular_vel, -MAX_ANGULAR_VEL);
        w.step(&[Action::new(-1.0, f64::NAN)]);
        assert_eq!(w.robots[0].linear_vel, 0.0);
        assert_eq!(w.robots[0].angular_vel, 0.0);
    }

    #[test]
    fn robot_robot_contact_sets_both_bumpers() {
        let mut w = world_with(alloc::vec![
            RobotState::at(Point::new(1.0, 2.0), 0.0),
            RobotState::at(Point::new(1.5, 2.0), PI / 2.0),
        ]);
        w.step(&[Action::new(0.31, 0.0), Action::STOP]);
        let d = w.robots[0].position.distance(w.robots[1].position);
        assert!(d >= 2.0 * BODY_RADIUS && d - 2.0 * BODY_RADIUS < 1e-9, "{d}");
        assert!(w.robots[0].bumper && w.robots[1].bumper);
        assert_eq!(w.robots[0].linear_vel, 0.0);
        // clear next step when backing off is not possible but turning is
        w.step(&[Action::new(0.0, 1.0), Action::STOP]);
        assert!(!w.robots[0].bumper && !w.robots[1].bumper);
    }
}
