use crate::math::{self, floor};
use core::f64::consts::PI;

use super::{GroundColor, WorldState, BODY_RADIUS};

pub const LIDAR_SECTORS: usize = 5;
pub const LIDAR_MAX_CM: f64 = 200.0;
pub const LOCAL_OBS_DIM: usize = 10;

/// What a single robot perceives on its own.
///
/// Lidar sectors are indexed by relative bearing, counter-clockwise from the
/// heading: front-left `[0°, 72°)`, left `[72°, 144°)`, back `[144°, 216°)`,
/// right `[216°, 288°)`, front-right `[288°, 360°)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalObservation {
    pub speed: f64,
    pub lidar: [f64; LIDAR_SECTORS],
    pub ground: GroundColor,
    pub bumper: bool,
}

impl LocalObservation {
    /// `[speed, lidar×5, black, white, gray, bumper]`.
    pub fn to_array(&self) -> [f64; LOCAL_OBS_DIM] {
        let g = self.ground.one_hot();
        let l = self.lidar;
        [
            self.speed,
            l[0],
            l[1],
            l[2],
            l[3],
            l[4],
            g[0],
            g[1],
            g[2],
            if self.bumper { 1.0 } else { 0.0 },
        ]
    }
}

/// Sector index for a relative bearing in radians (any range).
pub fn lidar_sector(relative_bearing: f64) -> usize {
    let two_pi = 2.0 * PI;
    let mut b = relative_bearing - two_pi * floor(relative_bearing / two_pi);
    if b >= two_pi {
        b = 0.0;
    }
    let s = floor(b / (two_pi / LIDAR_SECTORS as f64)) as usize;
    s.min(LIDAR_SECTORS - 1)
}

/// Local observation of robot `index`. Only other robots are visible to the
/// lidar; there is no occlusion.
pub fn sense(world: &WorldState, index: usize) -> LocalObservation {
    let me = &world.robots[index];
    let mut lidar = [LIDAR_MAX_CM; LIDAR_SECTORS];
    for (j, other) in world.robots.iter().enumerate() {
        if j == index {
            continue;
        }
        let d = other.position - me.position;
        let bearing = math::atan2(d.y, d.x) - me.heading;
        let s = lidar_sector(bearing);
        let cm = ((d.norm() - BODY_RADIUS) * 100.0).clamp(0.0, LIDAR_MAX_CM);
        if cm < lidar[s] {
            lidar[s] = cm;
        }
    }
    LocalObservation {
        speed: me.linear_vel.abs(),
        lidar,
        ground: world.arena.ground_color(me.position),
        bumper: me.bumper,
    }
}
