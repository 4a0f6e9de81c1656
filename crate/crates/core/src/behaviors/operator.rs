//! Selection and beacon control: the operator's command set and the
//! per-robot behavior bookkeeping it drives.

use super::{apply_beacons, apply_speed_cap, behavior_step, Beacon, BehaviorKind, BehaviorState};
use crate::rng::SimRng;
use crate::sim::{Action, WorldState};
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorCommand {
    /// Selection control: give `robots` a new behavior.
    Assign { robots: Vec<usize>, behavior: BehaviorKind },
    PlaceBeacon(Beacon),
    RemoveBeacon(usize),
    /// Caps the forward speed of every emitted action; `None` lifts the cap.
    SetSpeedCap(Option<f64>),
}

/// A command applied right before the actions of control step `step`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduledCommand {
    pub step: usize,
    pub command: OperatorCommand,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OperatorError {
    #[error("robot {0} does not exist")]
    UnknownRobot(usize),
    #[error("beacon {0} does not exist")]
    UnknownBeacon(usize),
    #[error("beacon zone does not intersect the arena")]
    BeaconOutside,
    #[error("target lies outside the arena")]
    TargetOutside,
    #[error("speed cap must be a finite non-negative number")]
    BadSpeedCap,
}

/// Behavior assignments, beacons and speed cap for the whole swarm.
/// Robots start with `Stop`.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    states: Vec<BehaviorState>,
    beacons: Vec<Beacon>,
    speed_cap: Option<f64>,
}

impl Operator {
    pub fn new(n_robots: usize) -> Self {
        Self {
            states: alloc::vec![BehaviorState::new(BehaviorKind::Stop); n_robots],
            beacons: Vec::new(),
            speed_cap: None,
        }
    }

    pub fn states(&self) -> &[BehaviorState] {
        &self.states
    }

    pub fn beacons(&self) -> &[Beacon] {
        &self.beacons
    }

    pub fn speed_cap(&self) -> Option<f64> {
        self.speed_cap
    }

    pub fn labels(&self) -> Vec<&'static str> {
        self.states.iter().map(|s| s.kind.label()).collect()
    }

    /// Validates and applies one command. `world` is used for bounds checks.
    pub fn apply(&mut self, command: &OperatorCommand, world: &WorldState) -> Result<(), OperatorError> {
        let bounds = world.arena.bounds();
        let target_ok = |k: &BehaviorKind| k.target().map_or(true, |t| bounds.contains(t));
        match command {
            OperatorCommand::Assign { robots, behavior } => {
                if let Some(&bad) = robots.iter().find(|&&r| r >= self.states.len()) {
                    return Err(OperatorError::UnknownRobot(bad));
                }
                if !target_ok(behavior) {
                    return Err(OperatorError::TargetOutside);
                }
                for &r in robots {
                    self.states[r] = BehaviorState::new(*behavior);
                }
            }
            OperatorCommand::PlaceBeacon(b) => {
                if !b.zone.intersects_rect(&bounds) {
                    return Err(OperatorError::BeaconOutside);
                }
                if !target_ok(&b.behavior) {
                    return Err(OperatorError::TargetOutside);
                }
                self.beacons.push(*b);
            }
            OperatorCommand::RemoveBeacon(i) => {
                if *i >= self.beacons.len() {
                    return Err(OperatorError::UnknownBeacon(*i));
                }
                self.beacons.remove(*i);
            }
            OperatorCommand::SetSpeedCap(cap) => {
                if let Some(c) = cap {
                    if !c.is_finite() || *c < 0.0 {
                        return Err(OperatorError::BadSpeedCap);
                    }
                }
                self.speed_cap = *cap;
            }
        }
        Ok(())
    }

    /// Beacon triggers, then one behavior step per robot, all read from the
    /// same pre-step world.
    pub fn actions(&mut self, world: &WorldState, rng: &mut SimRng) -> Vec<Action> {
        apply_beacons(&mut self.states, &self.beacons, world);
        let mut actions = Vec::with_capacity(self.states.len());
        for i in 0..self.states.len() {
            let (a, next) = behavior_step(self.states[i], world, i, rng);
            self.states[i] = next;
            actions.push(apply_speed_cap(a, self.speed_cap).clamped());
        }
        actions
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Circle, Point};
    use crate::sim::spawn_world;
    use crate::sim::ArenaSpec;

    #[test]
    fn assign_and_validate() {
        let world = spawn_world(ArenaSpec::empty(4.0, 4.0), 3, 1).unwrap();
        let mut op = Operator::new(3);
        assert_eq!(op.labels(), ["stop"; 3]);
        op.apply(&OperatorCommand::Assign { robots: alloc::vec![0, 2], behavior: BehaviorKind::Random }, &world)
            .unwrap();
        assert_eq!(op.labels(), ["random", "stop", "random"]);
        assert_eq!(
            op.apply(&OperatorCommand::Assign { robots: alloc::vec![3], behavior: BehaviorKind::Stop }, &world),
            Err(OperatorError::UnknownRobot(3))
        );
        assert_eq!(
            op.apply(
                &OperatorCommand::Assign { robots: alloc::vec![0], behavior: BehaviorKind::Come(Point::new(5.0, 1.0)) },
                &world
            ),
            Err(OperatorError::TargetOutside)
        );
        assert_eq!(op.apply(&OperatorCommand::RemoveBeacon(0), &world), Err(OperatorError::UnknownBeacon(0)));
        let b = Beacon { zone: Circle::new(Point::new(9.0, 9.0), 0.5), behavior: BehaviorKind::Stop };
        assert_eq!(op.apply(&OperatorCommand::PlaceBeacon(b), &world), Err(OperatorError::BeaconOutside));
        assert_eq!(op.apply(&OperatorCommand::SetSpeedCap(Some(-1.0)), &world), Err(OperatorError::BadSpeedCap));
    }

    #[test]
    fn stop_everyone_gives_zero_actions() {
        let world = spawn_world(ArenaSpec::empty(4.0, 4.0), 3, 1).unwrap();
        let mut op = Operator::new(3);
        let mut rng = SimRng::seed_from(0);
        assert!(op.actions(&world, &mut rng).iter().all(|a| *a == Action::STOP));
    }
}
