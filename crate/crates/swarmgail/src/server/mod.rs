//! Live demonstration sessions over a WebSocket.

mod hub;
mod http;
mod protocol;
mod session;

pub use http::{router, serve, AppState, ServerConfig, SessionHandle};
pub use hub::{Hub, Subscription};
pub use protocol::{
    BeaconMsg, BehaviorMsg, Command, FeaturesMsg, RobotMsg, ServerMessage, StateMsg, StreamEvent,
};
pub use session::{Outcome, Session, SessionError};
