//! The six missions: arenas, reward functions and scripted demonstrators.

mod foraging;
mod scripted;

pub use foraging::{ForagingEvents, ForagingState, FORAGING_REWARD};
pub use scripted::{scripted_demonstration, ForagingLayout, CONTROLLED_SPEED_CAP};

use crate::features::SwarmFeatures;
use crate::geometry::Rect;
use crate::sim::{ArenaSpec, Patch, PatchColor};
use crate::EPISODE_STEPS;
use core::fmt;
use core::str::FromStr;

/// Lower clamp on the grouping feature inside the `1/g` rewards.
pub const GROUPING_EPSILON: f64 = 0.05;
pub const CONTROLLED_SPEED_TARGET: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MissionKind {
    StandingStill,
    FullSpeed,
    ControlledSpeed,
    Aggregation,
    Dispersion,
    Foraging,
}

impl MissionKind {
    pub const ALL: [MissionKind; 6] = [
        MissionKind::StandingStill,
        MissionKind::FullSpeed,
        MissionKind::ControlledSpeed,
        MissionKind::Aggregation,
        MissionKind::Dispersion,
        MissionKind::Foraging,
    ];

    /// Kebab-case name used on the command line and in files.
    pub fn name(self) -> &'static str {
        match self {
            MissionKind::StandingStill => "standing-still",
            MissionKind::FullSpeed => "full-speed",
            MissionKind::ControlledSpeed => "controlled-speed",
            MissionKind::Aggregation => "aggregation",
            MissionKind::Dispersion => "dispersion",
            MissionKind::Foraging => "foraging",
        }
    }

    /// Default arena of the mission.
    pub fn arena(self) -> ArenaSpec {
        match self {
            MissionKind::Foraging => foraging_arena(),
            _ => open_arena(),
        }
    }
}

impl fmt::Display for MissionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown mission `{0}`")]
pub struct UnknownMission(pub alloc::string::String);

impl FromStr for MissionKind {
    type Err = UnknownMission;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: alloc::string::String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .map(|c| c.to_ascii_lowercase())
            .collect();
        MissionKind::ALL
            .into_iter()
            .find(|m| m.name().replace('-', "") == norm)
            .ok_or_else(|| UnknownMission(s.into()))
    }
}

/// Sign convention of the controlled-speed reward.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SpeedRewardSign {
    /// `-|v_target - v̄|`: higher is better, maximum 0.
    #[default]
    Penalty,
    /// `|v_target - v̄|` exactly as the distance is written.
    Distance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MissionSpec {
    pub kind: MissionKind,
    pub arena: ArenaSpec,
    pub episode_steps: usize,
    pub v_target: f64,
    pub speed_reward: SpeedRewardSign,
}

impl MissionSpec {
    pub fn new(kind: MissionKind) -> Self {
        Self::with_arena(kind, kind.arena())
    }

    pub fn with_arena(kind: MissionKind, arena: ArenaSpec) -> Self {
        Self {
            kind,
            arena,
            episode_steps: EPISODE_STEPS,
            v_target: CONTROLLED_SPEED_TARGET,
            speed_reward: SpeedRewardSign::Penalty,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }
}

/// Per-step mission reward from the post-step features and foraging events.
pub fn reward(mission: &MissionSpec, features: &SwarmFeatures, events: ForagingEvents) -> f64 {
    let v = features.avg_speed;
    let g = features.grouping.max(GROUPING_EPSILON);
    match mission.kind {
        MissionKind::StandingStill => -v,
        MissionKind::FullSpeed => v,
        MissionKind::ControlledSpeed => {
            let d = (mission.v_target - v).abs();
            match mission.speed_reward {
                SpeedRewardSign::Penalty => -d,
                SpeedRewardSign::Distance => d,
            }
        }
        MissionKind::Aggregation => 1.0 / g,
        MissionKind::Dispersion => -1.0 / g,
        MissionKind::Foraging => FORAGING_REWARD * f64::from(events.retrieved + events.deposited),
    }
}

/// Empty 4 m × 4 m arena with a central 1.2 m spawn square.
pub fn open_arena() -> ArenaSpec {
    let mut a = ArenaSpec::empty(4.0, 4.0);
    a.spawn_zones = alloc::vec![Rect::new(1.4, 1.4, 2.6, 2.6)];
    a
}

/// White nest on the left, black source on the right, spawning in between.
pub fn foraging_arena() -> ArenaSpec {
    let layout = ForagingLayout::default();
    let mut a = ArenaSpec::empty(4.0, 4.0);
    a.patches = alloc::vec![
        Patch { rect: layout.nest, color: PatchColor::White },
        Patch { rect: layout.source, color: PatchColor::Black },
    ];
    a.spawn_zones = alloc::vec![Rect::new(1.5, 1.5, 2.5, 2.5)];
    a
}
