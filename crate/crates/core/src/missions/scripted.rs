use super::{MissionKind, MissionSpec};
use crate::behaviors::{Beacon, BehaviorKind, OperatorCommand, ScheduledCommand};
use crate::features::center_of_mass;
use crate::geometry::{Circle, Point, Rect};
use crate::sim::WorldState;
use alloc::vec;
use alloc::vec::Vec;

/// Speed cap used for controlled-speed demonstrations.
pub const CONTROLLED_SPEED_CAP: f64 = 0.1;

/// Nest, source and the two gray way points of the foraging relay.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForagingLayout {
    pub nest: Rect,
    pub source: Rect,
    pub upper_waypoint: Point,
    pub lower_waypoint: Point,
    pub beacon_radius: f64,
}

impl Default for ForagingLayout {
    fn default() -> Self {
        Self {
            nest: Rect::new(0.2, 1.5, 1.2, 2.5),
            source: Rect::new(2.8, 1.5, 3.8, 2.5),
            upper_waypoint: Point::new(2.0, 3.3),
            lower_waypoint: Point::new(2.0, 0.7),
            beacon_radius: 0.35,
        }
    }
}

impl ForagingLayout {
    /// Relay loop: upper way point → nest → lower way point → source → upper.
    pub fn beacons(&self) -> [Beacon; 4] {
        let nest = self.nest.center();
        let source = self.source.center();
        let r = self.beacon_radius;
        [
            Beacon { zone: Circle::new(self.upper_waypoint, r), behavior: BehaviorKind::Come(nest) },
            Beacon { zone: Circle::new(nest, r), behavior: BehaviorKind::Come(self.lower_waypoint) },
            Beacon { zone: Circle::new(self.lower_waypoint, r), behavior: BehaviorKind::Come(source) },
            Beacon { zone: Circle::new(source, r), behavior: BehaviorKind::Come(self.upper_waypoint) },
        ]
    }

    pub fn points_of_interest(&self) -> [Point; 4] {
        [self.upper_waypoint, self.nest.center(), self.lower_waypoint, self.source.center()]
    }
}

/// The operator strategy for `mission`, as commands issued at step 0.
pub fn scripted_demonstration(mission: &MissionSpec, world: &WorldState) -> Vec<ScheduledCommand> {
    let all: Vec<usize> = (0..world.robots.len()).collect();
    let at0 = |command| ScheduledCommand { step: 0, command };
    let assign_all = |behavior| at0(OperatorCommand::Assign { robots: all.clone(), behavior });
    let com = center_of_mass(&world.positions());
    match mission.kind {
        MissionKind::StandingStill => vec![assign_all(BehaviorKind::Stop)],
        MissionKind::FullSpeed => vec![assign_all(BehaviorKind::Random)],
        MissionKind::ControlledSpeed => vec![
            at0(OperatorCommand::SetSpeedCap(Some(CONTROLLED_SPEED_CAP))),
            assign_all(BehaviorKind::Random),
        ],
        MissionKind::Aggregation => vec![assign_all(BehaviorKind::Come(com))],
        MissionKind::Dispersion => vec![assign_all(BehaviorKind::Leave(com))],
        MissionKind::Foraging => {
            let layout = ForagingLayout::default();
            let mut cmds: Vec<ScheduledCommand> =
                layout.beacons().into_iter().map(|b| at0(OperatorCommand::PlaceBeacon(b))).collect();
            let poi = layout.points_of_interest();
            for (i, r) in world.robots.iter().enumerate() {
                let nearest = poi
                    .iter()
                    .copied()
                    .min_by(|a, b| a.distance(r.position).total_cmp(&b.distance(r.position)))
                    .unwrap();
                cmds.push(at0(OperatorCommand::Assign { robots: vec![i], behavior: BehaviorKind::Come(nearest) }));
            }
            cmds
        }
    }
}
