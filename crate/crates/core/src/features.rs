//! Swarm-level features: average speed, grouping, coverage, color visit
//! frequency and color travel time (23 values per control step).

use crate::geometry::Point;
use crate::sim::{PatchColor, WorldState};
use alloc::vec::Vec;

pub const FEATURE_DIM: usize = 23;
pub const COVERAGE_GRID: usize = 4;
pub const COVERAGE_TILES: usize = COVERAGE_GRID * COVERAGE_GRID;

/// Offsets of each block inside [`SwarmFeatures::to_array`].
pub mod layout {
    pub const AVG_SPEED: usize = 0;
    pub const GROUPING: usize = 1;
    pub const COVERAGE: usize = 2;
    pub const COLOR_VISITS: usize = 18;
    pub const COLOR_TRAVEL_TIME: usize = 22;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwarmFeatures {
    pub avg_speed: f64,
    pub grouping: f64,
    /// Seconds since each tile was last visited, row-major from the lower-left tile.
    pub coverage: [f64; COVERAGE_TILES],
    /// Transition counts in (white→white, white→black, black→white, black→black) order.
    pub color_visits: [f64; 4],
    pub color_travel_time: f64,
}

impl SwarmFeatures {
    pub fn to_array(&self) -> [f64; FEATURE_DIM] {
        let mut out = [0.0; FEATURE_DIM];
        out[layout::AVG_SPEED] = self.avg_speed;
        out[layout::GROUPING] = self.grouping;
        out[layout::COVERAGE..layout::COLOR_VISITS].copy_from_slice(&self.coverage);
        out[layout::COLOR_VISITS..layout::COLOR_TRAVEL_TIME].copy_from_slice(&self.color_visits);
        out[layout::COLOR_TRAVEL_TIME] = self.color_travel_time;
        out
    }

    pub fn from_array(a: &[f64; FEATURE_DIM]) -> Self {
        let mut coverage = [0.0; COVERAGE_TILES];
        coverage.copy_from_slice(&a[layout::COVERAGE..layout::COLOR_VISITS]);
        let mut color_visits = [0.0; 4];
        color_visits.copy_from_slice(&a[layout::COLOR_VISITS..layout::COLOR_TRAVEL_TIME]);
        Self {
            avg_speed: a[layout::AVG_SPEED],
            grouping: a[layout::GROUPING],
            coverage,
            color_visits,
            color_travel_time: a[layout::COLOR_TRAVEL_TIME],
        }
    }
}

/// Mean absolute linear velocity.
pub fn average_speed(speeds: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = speeds.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v.abs(), n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Mean Euclidean distance to the center of mass.
pub fn grouping(positions: &[Point]) -> f64 {
    if positions.is_empty() {
        return 0.0;
    }
    let n = positions.len() as f64;
    let com = center_of_mass(positions);
    positions.iter().map(|p| p.distance(com)).sum::<f64>() / n
}

pub fn center_of_mass(positions: &[Point]) -> Point {
    let n = positions.len().max(1) as f64;
    let s = positions.iter().fold(Point::default(), |acc, p| acc + *p);
    Point::new(s.x / n, s.y / n)
}

fn transition_slot(from: PatchColor, to: PatchColor) -> usize {
    match (from, to) {
        (PatchColor::White, PatchColor::White) => 0,
        (PatchColor::White, PatchColor::Black) => 1,
        (PatchColor::Black, PatchColor::White) => 2,
        (PatchColor::Black, PatchColor::Black) => 3,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct RobotPatchTrack {
    /// Patch index under the robot at the previous update.
    current_patch: Option<usize>,
    last_color: Option<PatchColor>,
    last_entry_time: f64,
}

/// Per-episode state behind the coverage and color features.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureAccumulator {
    tile_last_visit: [f64; COVERAGE_TILES],
    robots: Vec<RobotPatchTrack>,
    transition_counts: [u64; 4],
    travel_time_sum: f64,
    travel_count: u64,
}

impl Default for FeatureAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl FeatureAccumulator {
    pub fn new() -> Self {
        Self {
            tile_last_visit: [0.0; COVERAGE_TILES],
            robots: Vec::new(),
            transition_counts: [0; 4],
            travel_time_sum: 0.0,
            travel_count: 0,
        }
    }

    pub fn transition_counts(&self) -> [u64; 4] {
        self.transition_counts
    }

    pub fn travel_count(&self) -> u64 {
        self.travel_count
    }

    /// Folds in the world at its current `sim_time` and returns the features.
    /// Call once per control step, in order.
    pub fn update(&mut self, world: &WorldState) -> SwarmFeatures {
        let now = world.sim_time;
        let arena = &world.arena;
        if self.robots.len() != world.robots.len() {
            self.robots.resize(world.robots.len(), RobotPatchTrack::default());
        }

        let tile_w = arena.width / COVERAGE_GRID as f64;
        let tile_h = arena.height / COVERAGE_GRID as f64;
        let last = COVERAGE_GRID as f64 - 1.0;
        for r in &world.robots {
            let col = crate::math::floor(r.position.x / tile_w).clamp(0.0, last) as usize;
            let row = crate::math::floor(r.position.y / tile_h).clamp(0.0, last) as usize;
            self.tile_last_visit[row * COVERAGE_GRID + col] = now;
        }

        for (track, r) in self.robots.iter_mut().zip(&world.robots) {
            let patch = arena.patch_at(r.position);
            if let Some(p) = patch {
                if track.current_patch != Some(p) {
                    let color = arena.patches[p].color;
                    if let Some(prev) = track.last_color {
                        self.transition_counts[transition_slot(prev, color)] += 1;
                        self.travel_time_sum += now - track.last_entry_time;
                        self.travel_count += 1;
                    }
                    track.last_color = Some(color);
                    track.last_entry_time = now;
                }
            }
            track.current_patch = patch;
        }

        let mut coverage = [0.0; COVERAGE_TILES];
        for (c, t) in coverage.iter_mut().zip(&self.tile_last_visit) {
            *c = (now - t).max(0.0);
        }
        SwarmFeatures {
            avg_speed: average_speed(world.robots.iter().map(|r| r.linear_vel)),
            grouping: grouping(&world.positions()),
            coverage,
            color_visits: self.transition_counts.map(|c| c as f64),
            color_travel_time: self.travel_time_sum / self.travel_count.max(1) as f64,
        }
    }
}

/// Free-function form of [`FeatureAccumulator::update`].
pub fn update_features(acc: &mut FeatureAccumulator, world: &WorldState) -> SwarmFeatures {
    acc.update(world)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::rng::SimRng;
    use crate::sim::{ArenaSpec, Patch, RobotState};
    fn world_at(positions: &[Point]) -> WorldState {
        let mut arena = ArenaSpec::empty(4.0, 4.0);
        arena.patches.push(Patch { rect: Rect::new(0.0, 3.0, 1.0, 4.0), color: PatchColor::White });
        arena.patches.push(Patch { rect: Rect::new(3.0, 3.0, 4.0, 4.0), color: PatchColor::Black });
        WorldState {
            arena,
            robots: positions.iter().map(|p| RobotState::at(*p, 0.0)).collect(),
            sim_time: 0.0,
            rng: SimRng::seed_from(0),
        }
    }

    #[test]
    fn stationary_swarm_has_zero_speed() {
        let mut acc = FeatureAccumulator::new();
        let f = acc.update(&world_at(&[Point::new(1.0, 1.0), Point::new(2.0, 2.0)]));
        assert_eq!(f.avg_speed, 0.0);
        assert_eq!(f.to_array().len(), FEATURE_DIM);
    }

    #[test]
    fn grouping_of_symmetric_line() {
        let c = Point::new(2.0, 2.0);
        let pts = [c + Point::new(-1.0, 0.0), c + Point::new(1.0, 0.0), c];
        assert!((grouping(&pts) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn coverage_tracks_visits() {
        let mut acc = FeatureAccumulator::new();
        let mut w = world_at(&[Point::new(0.5, 0.5)]);
        for t in 0..5 {
            w.sim_time = t as f64;
            let f = acc.update(&w);
            assert_eq!(f.coverage[0], 0.0);
            assert_eq!(f.coverage[15], t as f64);
        }
        w.robots[0].position = Point::new(3.5, 3.5);
        w.sim_time = 7.0;
        let f = acc.update(&w);
        assert_eq!(f.coverage[0], 3.0);
        assert_eq!(f.coverage[15], 0.0);
    }

    #[test]
    fn color_path_hand_trace() {
        // gray at 0, white at 5, gray at 8, black at 12
        let gray = Point::new(2.0, 2.0);
        let white = Point::new(0.5, 3.5);
        let black = Point::new(3.5, 3.5);
        let schedule = |t: usize| match t {
            0..=4 => gray,
            5..=7 => white,
            8..=11 => gray,
            _ => black,
        };
        let mut acc = FeatureAccumulator::new();
        let mut w = world_at(&[gray]);
        let mut f = None;
        for t in 0..=14 {
            w.sim_time = t as f64;
            w.robots[0].position = schedule(t);
            f = Some(acc.update(&w));
        }
        let f = f.unwrap();
        assert_eq!(f.color_visits, [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(acc.travel_count(), 1);
        assert_eq!(f.color_travel_time, 7.0);
    }

    #[test]
    fn first_entry_records_without_counting() {
        let mut acc = FeatureAccumulator::new();
        let f = acc.update(&world_at(&[Point::new(0.5, 3.5)]));
        assert_eq!(f.color_visits, [0.0; 4]);
        assert_eq!(f.color_travel_time, 0.0);
    }

    #[test]
    fn array_round_trip() {
        let mut a = [0.0; FEATURE_DIM];
        for (i, v) in a.iter_mut().enumerate() {
            *v = i as f64;
        }
        assert_eq!(SwarmFeatures::from_array(&a).to_array(), a);
    }
}
