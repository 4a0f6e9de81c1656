use crate::sim::{GroundColor, WorldState};
use alloc::vec::Vec;

pub const FORAGING_REWARD: f64 = 10.0;

/// Items picked up and dropped during one control step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ForagingEvents {
    pub retrieved: u32,
    pub deposited: u32,
}

/// Carrying flags and item counters. Items are picked up on entering the
/// black source and dropped on entering the white nest; a robot carries at
/// most one item and the source never runs out.
#[derive(Clone, Debug, PartialEq)]
pub struct ForagingState {
    pub carrying: Vec<bool>,
    pub items_retrieved: u32,
    pub items_deposited: u32,
    ground: Vec<GroundColor>,
}

impl ForagingState {
    pub fn new(world: &WorldState) -> Self {
        Self {
            carrying: alloc::vec![false; world.robots.len()],
            items_retrieved: 0,
            items_deposited: 0,
            ground: world.robots.iter().map(|r| world.arena.ground_color(r.position)).collect(),
        }
    }

    /// Processes patch entries after a world step.
    pub fn update(&mut self, world: &WorldState) -> ForagingEvents {
        let mut ev = ForagingEvents::default();
        for (i, r) in world.robots.iter().enumerate() {
            let now = world.arena.ground_color(r.position);
            if now != self.ground[i] {
                match now {
                    GroundColor::Black if !self.carrying[i] => {
                        self.carrying[i] = true;
                        ev.retrieved += 1;
                    }
                    GroundColor::White if self.carrying[i] => {
                        self.carrying[i] = false;
                        ev.deposited += 1;
                    }
                    _ => {}
                }
            }
            self.ground[i] = now;
        }
        self.items_retrieved += ev.retrieved;
        self.items_deposited += ev.deposited;
        ev
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::missions::foraging_arena;
    use crate::rng::SimRng;
    use crate::sim::RobotState;

    #[test]
    fn source_then_nest_scores_twice() {
        let mut w = WorldState {
            arena: foraging_arena(),
            robots: alloc::vec![RobotState::at(Point::new(2.0, 2.0), 0.0)],
            sim_time: 0.0,
            rng: SimRng::seed_from(0),
        };
        let mut f = ForagingState::new(&w);
        let mut events = Vec::new();
        for p in [Point::new(3.3, 2.0), Point::new(3.4, 2.0), Point::new(2.0, 2.0), Point::new(0.7, 2.0), Point::new(0.7, 2.0)] {
            w.robots[0].position = p;
            events.push(f.update(&w));
        }
        assert_eq!(events[0], ForagingEvents { retrieved: 1, deposited: 0 });
        assert_eq!(events[1], ForagingEvents::default());
        assert_eq!(events[3], ForagingEvents { retrieved: 0, deposited: 1 });
        assert_eq!(events[4], ForagingEvents::default());
        assert_eq!((f.items_retrieved, f.items_deposited), (1, 1));
        assert!(!f.carrying[0]);
    }

    #[test]
    fn nest_without_item_scores_nothing() {
        let mut w = WorldState {
            arena: foraging_arena(),
            robots: alloc::vec![RobotState::at(Point::new(2.0, 2.0), 0.0)],
            sim_time: 0.0,
            rng: SimRng::seed_from(0),
        };
        let mut f = ForagingState::new(&w);
        w.robots[0].position = Point::new(0.7, 2.0);
        assert_eq!(f.update(&w), ForagingEvents::default());
    }
}
