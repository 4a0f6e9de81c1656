//! JSON messages exchanged over the session socket. Every message is an
//! object with a `type` field; see `docs/protocol.md` for the full schema.

use serde::{Deserialize, Serialize};
use swarmgail_core::behaviors::{Beacon, BehaviorKind};
use swarmgail_core::features::SwarmFeatures;
use swarmgail_core::geometry::Circle;
use swarmgail_core::Point;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BehaviorMsg {
    Stop,
    Random,
    Come { x: f64, y: f64 },
    Leave { x: f64, y: f64 },
    Deploy,
}

impl From<BehaviorMsg> for BehaviorKind {
    fn from(b: BehaviorMsg) -> Self {
        match b {
            BehaviorMsg::Stop => BehaviorKind::Stop,
            BehaviorMsg::Random => BehaviorKind::Random,
            BehaviorMsg::Come { x, y } => BehaviorKind::Come(Point::new(x, y)),
            BehaviorMsg::Leave { x, y } => BehaviorKind::Leave(Point::new(x, y)),
            BehaviorMsg::Deploy => BehaviorKind::Deploy,
        }
    }
}

impl From<BehaviorKind> for BehaviorMsg {
    fn from(b: BehaviorKind) -> Self {
        match b {
            BehaviorKind::Stop => BehaviorMsg::Stop,
            BehaviorKind::Random => BehaviorMsg::Random,
            BehaviorKind::Come(p) => BehaviorMsg::Come { x: p.x, y: p.y },
            BehaviorKind::Leave(p) => BehaviorMsg::Leave { x: p.x, y: p.y },
            BehaviorKind::Deploy => BehaviorMsg::Deploy,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeaconMsg {
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    pub behavior: BehaviorMsg,
}

impl From<BeaconMsg> for Beacon {
    fn from(b: BeaconMsg) -> Self {
        Beacon { zone: Circle { center: Point::new(b.x, b.y), radius: b.radius }, behavior: b.behavior.into() }
    }
}

impl From<&Beacon> for BeaconMsg {
    fn from(b: &Beacon) -> Self {
        BeaconMsg { x: b.zone.center.x, y: b.zone.center.y, radius: b.zone.radius, behavior: b.behavior.into() }
    }
}

/// Client to server.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Command {
    /// Starts a new session and attaches this connection to it. `arena`
    /// optionally replaces the mission's arena (canonical arena text).
    CreateSession {
        mission: String,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        arena: Option<String>,
    },
    /// Attaches this connection to an existing session's stream.
    Attach { session: u64 },
    Select { robots: Vec<usize> },
    /// `robots` defaults to the current selection.
    AssignBehavior {
        #[serde(default)]
        robots: Option<Vec<usize>>,
        behavior: BehaviorMsg,
    },
    PlaceBeacon { beacon: BeaconMsg },
    RemoveBeacon { index: usize },
    /// `null` lifts the cap.
    SetSpeedCap { cap: Option<f64> },
    Start,
    Pause,
    /// Advances `count` control steps immediately (default 1).
    Step {
        #[serde(default = "one")]
        count: usize,
    },
    StartRecording,
    StopRecording,
    Reset { seed: u64 },
}

fn one() -> usize {
    1
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CreateSession { .. } => "create_session",
            Command::Attach { .. } => "attach",
            Command::Select { .. } => "select",
            Command::AssignBehavior { .. } => "assign_behavior",
            Command::PlaceBeacon { .. } => "place_beacon",
            Command::RemoveBeacon { .. } => "remove_beacon",
            Command::SetSpeedCap { .. } => "set_speed_cap",
            Command::Start => "start",
            Command::Pause => "pause",
            Command::Step { .. } => "step",
            Command::StartRecording => "start_recording",
            Command::StopRecording => "stop_recording",
            Command::Reset { .. } => "reset",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeaturesMsg {
    pub avg_speed: f64,
    pub grouping: f64,
    pub coverage: Vec<f64>,
    /// WW, WB, BW, BB.
    pub color_visits: Vec<f64>,
    pub color_travel_time: f64,
}

impl From<&SwarmFeatures> for FeaturesMsg {
    fn from(f: &SwarmFeatures) -> Self {
        FeaturesMsg {
            avg_speed: f.avg_speed,
            grouping: f.grouping,
            coverage: f.coverage.to_vec(),
            color_visits: f.color_visits.to_vec(),
            color_travel_time: f.color_travel_time,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotMsg {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub linear_vel: f64,
    pub angular_vel: f64,
    pub bumper: bool,
    pub behavior: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateMsg {
    pub step: usize,
    pub sim_time: f64,
    pub robots: Vec<RobotMsg>,
    pub beacons: Vec<BeaconMsg>,
    pub speed_cap: Option<f64>,
    pub features: FeaturesMsg,
    pub selection: Vec<usize>,
    pub running: bool,
    pub recording: bool,
}

/// Ordered per-session stream. `seq` increases by one per event.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StreamEvent {
    State { seq: u64, state: StateMsg },
    EpisodeEnd { seq: u64, step: usize, episode_return: f64 },
    RecordingSaved { seq: u64, trajectory: usize, records: usize, valid: bool },
    Reset { seq: u64, seed: u64, step: usize },
}

impl StreamEvent {
    pub fn seq(&self) -> u64 {
        match self {
            StreamEvent::State { seq, .. }
            | StreamEvent::EpisodeEnd { seq, .. }
            | StreamEvent::RecordingSaved { seq, .. }
            | StreamEvent::Reset { seq, .. } => *seq,
        }
    }
}

/// Server to client.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    /// Reply to create_session and attach.
    Session { session: u64, mission: String, seed: u64, arena_hash: String, state: StateMsg },
    /// Acknowledges a command, after the stream events it caused; `step` is
    /// the session's step counter after it.
    Ack { command: String, step: usize },
    Error { message: String },
    /// Sent after a command that closed a recording.
    Recording { trajectory: usize, records: usize, valid: bool },
    /// The subscriber fell behind and `missed` events were dropped.
    Gap { missed: u64 },
    /// Wrapped stream event, serialized with its own `type`.
    #[serde(untagged)]
    Stream(StreamEvent),
}
