//! Simulation, swarm-level features and adversarial imitation learning for a
//! small swarm of differential-drive robots.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! filesystem, sockets or the command line lives in the `swarmgail` crate.
//!
//! Layout:
//!
//! * [`sim`]: arena, robot kinematics, collisions and local sensing.
//! * [`behaviors`]: operator-side scripted behaviors, beacons and the
//!   Voronoi centroid computation used by `Deploy`.
//! * [`features`]: the 23 swarm-level features.
//! * [`missions`]: arenas, rewards and scripted demonstrators for the six missions.
//! * [`neural`]: small MLPs with exact gradients, Adam, a Gaussian head.
//! * [`gail`]: joint observations, rollouts, discriminator, PPO and the
//!   training loop.
//! * [`trajectory`]: demonstration/rollout records and demo-set validation.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod behaviors;
pub mod episode;
pub mod features;
pub mod gail;
pub mod geometry;
pub mod math;
pub mod missions;
pub mod neural;
pub mod rng;
pub mod sim;
pub mod trajectory;

pub use geometry::{Circle, Point, Rect};
pub use rng::SimRng;

/// Control period in seconds (1 Hz control).
pub const CONTROL_PERIOD: f64 = 1.0;
/// Number of control steps in a demonstration or evaluation episode.
pub const EPISODE_STEPS: usize = 51;
/// Swarm size used throughout.
pub const N_ROBOTS: usize = 3;
