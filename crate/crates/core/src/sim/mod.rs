//! Deterministic 2D physics and local sensing for differential-drive robots.

mod arena;
mod sensing;
mod world;

pub use arena::{ArenaError, ArenaSpec, GroundColor, Patch, PatchColor};
pub use sensing::{lidar_sector, sense, LocalObservation, LIDAR_MAX_CM, LIDAR_SECTORS, LOCAL_OBS_DIM};
pub use world::{
    spawn_world, step_world, Action, RobotState, SpawnError, WorldState, BODY_RADIUS,
    MAX_ANGULAR_VEL, MAX_LINEAR_VEL, SUBSTEPS, SUBSTEP_DT,
};
