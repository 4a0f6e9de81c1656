//! WebSocket session endpoint plus plain HTTP downloads.
//!
//! * `GET /ws`: the session socket (JSON messages, see `protocol`).
//! * `GET /sessions`: list of sessions.
//! * `GET /sessions/{id}/arena`: canonical arena file.
//! * `GET /sessions/{id}/trajectories`: recordings of a session.
//! * `GET /sessions/{id}/trajectories/{n}`: one recording as a trajectory file.

use super::hub::{Hub, Subscription};
use super::protocol::{Command, ServerMessage};
use super::session::Session;
use crate::formats::write_trajectory;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Weak};
use std::time::Duration;
use swarmgail_core::missions::{MissionKind, MissionSpec};
use swarmgail_core::sim::ArenaSpec;
use swarmgail_core::trajectory::Trajectory;
use tokio::sync::{mpsc, Mutex};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ServerConfig {
    /// Wall-clock pacing of running sessions, in control steps per second.
    pub steps_per_second: f64,
    /// Per-subscriber stream queue length.
    pub stream_capacity: usize,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self { steps_per_second: 1.0, stream_capacity: 256 }
    }
}

pub struct SessionHandle {
    pub session: Mutex<Session>,
    pub hub: Hub,
}

pub struct AppState {
    cfg: ServerConfig,
    sessions: Mutex<BTreeMap<u64, Arc<SessionHandle>>>,
    next_id: AtomicU64,
    recordings: Option<mpsc::UnboundedSender<(u64, Trajectory)>>,
}

impl AppState {
    /// `recordings` receives every recording a session finishes.
    pub fn new(cfg: ServerConfig, recordings: Option<mpsc::UnboundedSender<(u64, Trajectory)>>) -> Arc<Self> {
        Arc::new(Self { cfg, sessions: Mutex::new(BTreeMap::new()), next_id: AtomicU64::new(1), recordings })
    }

    pub async fn session(&self, id: u64) -> Option<Arc<SessionHandle>> {
        self.sessions.lock().await.get(&id).cloned()
    }

    async fn create(self: &Arc<Self>, mission: &str, seed: u64, arena: Option<&str>) -> Result<Arc<SessionHandle>, String> {
        let kind: MissionKind = mission.parse().map_err(|e| format!("{e}"))?;
        let spec = match arena {
            Some(text) => {
                let a = ArenaSpec::parse(text).map_err(|e| format!("arena: {e}"))?;
                a.validate().map_err(|e| format!("arena: {e}"))?;
                MissionSpec::with_arena(kind, a)
            }
            None => MissionSpec::new(kind),
        };
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let mut session = Session::new(id, spec, seed).map_err(|e| e.to_string())?;
        session.set_clock(crate::pipeline::timestamp());
        let handle = Arc::new(SessionHandle { session: Mutex::new(session), hub: Hub::new(self.cfg.stream_capacity) });
        self.sessions.lock().await.insert(id, handle.clone());
        tokio::spawn(pace(Arc::downgrade(&handle), Arc::downgrade(self), self.cfg.steps_per_second));
        Ok(handle)
    }

    fn forward_recording(&self, id: u64, saved: Option<(usize, Trajectory)>) {
        if let (Some(tx), Some((_, t))) = (&self.recordings, saved) {
            let _ = tx.send((id, t));
        }
    }
}

/// Steps a running session at the configured wall-clock rate.
async fn pace(handle: Weak<SessionHandle>, app: Weak<AppState>, steps_per_second: f64) {
    let period = Duration::from_secs_f64(1.0 / steps_per_second.max(1e-3));
    let mut timer = tokio::time::interval(period);
    timer.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    loop {
        timer.tick().await;
        let (Some(h), Some(app)) = (handle.upgrade(), app.upgrade()) else { return };
        let mut s = h.session.lock().await;
        if s.is_running() {
            let out = s.tick();
            h.hub.publish(out.events);
            app.forward_recording(s.id, out.saved);
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/ws", get(ws_upgrade))
        .route("/sessions", get(list_sessions))
        .route("/sessions/{id}/arena", get(arena_file))
        .route("/sessions/{id}/trajectories", get(list_trajectories))
        .route("/sessions/{id}/trajectories/{n}", get(trajectory_file))
        .with_state(state)
}

/// Serves until the future `shutdown` completes.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}

#[derive(Serialize)]
struct SessionSummary {
    id: u64,
    mission: String,
    seed: u64,
    step: usize,
    recordings: usize,
}

async fn list_sessions(State(app): State<Arc<AppState>>) -> Json<Vec<SessionSummary>> {
    let handles: Vec<_> = app.sessions.lock().await.values().cloned().collect();
    let mut out = Vec::with_capacity(handles.len());
    for h in handles {
        let s = h.session.lock().await;
        out.push(SessionSummary {
            id: s.id,
            mission: s.mission().name().into(),
            seed: s.seed(),
            step: s.step_index(),
            recordings: s.recordings().len(),
        });
    }
    Json(out)
}

fn not_found(what: &str) -> Response {
    (StatusCode::NOT_FOUND, format!("{what} not found\n")).into_response()
}

fn text_file(body: String, name: &str) -> Response {
    (
        [
            (header::CONTENT_TYPE, "text/plain; charset=utf-8".to_string()),
            (header::CONTENT_DISPOSITION, format!("attachment; filename=\"{name}\"")),
        ],
        body,
    )
        .into_response()
}

async fn arena_file(State(app): State<Arc<AppState>>, Path(id): Path<u64>) -> Response {
    let Some(h) = app.session(id).await else { return not_found("session") };
    let s = h.session.lock().await;
    text_file(s.mission().arena.to_text(), &format!("{}.arena", s.mission().name()))
}

#[derive(Serialize)]
struct TrajectorySummary {
    index: usize,
    records: usize,
    valid: bool,
}

async fn list_trajectories(State(app): State<Arc<AppState>>, Path(id): Path<u64>) -> Response {
    let Some(h) = app.session(id).await else { return not_found("session") };
    let s = h.session.lock().await;
    let list: Vec<_> = s
        .recordings()
        .iter()
        .enumerate()
        .map(|(index, t)| TrajectorySummary { index, records: t.records.len(), valid: t.is_valid() })
        .collect();
    Json(list).into_response()
}

async fn trajectory_file(State(app): State<Arc<AppState>>, Path((id, n)): Path<(u64, usize)>) -> Response {
    let Some(h) = app.session(id).await else { return not_found("session") };
    let s = h.session.lock().await;
    let Some(t) = s.recordings().get(n) else { return not_found("trajectory") };
    match write_trajectory(t) {
        Ok(text) => text_file(text, &format!("session{id}_{n}.traj")),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

async fn ws_upgrade(ws: WebSocketUpgrade, State(app): State<Arc<AppState>>) -> Response {
    ws.on_upgrade(move |socket| connection(socket, app))
}

async fn send(socket: &mut WebSocket, msg: &ServerMessage) -> bool {
    match serde_json::to_string(msg) {
        Ok(text) => socket.send(Message::Text(text.into())).await.is_ok(),
        Err(_) => false,
    }
}

async fn next_event(sub: &mut Option<Subscription>) -> Option<ServerMessage> {
    match sub {
        Some(s) => s.next().await,
        None => std::future::pending().await,
    }
}

/// Handles one client: commands in, replies and the attached session's
/// stream out.
async fn connection(mut socket: WebSocket, app: Arc<AppState>) {
    let mut attached: Option<Arc<SessionHandle>> = None;
    let mut sub: Option<Subscription> = None;
    loop {
        tokio::select! {
            incoming = socket.recv() => {
                let text = match incoming {
                    Some(Ok(Message::Text(t))) => t.to_string(),
                    Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                    Some(Ok(_)) => continue,
                };
                let replies = command(&app, &mut attached, &mut sub, &text).await;
                for r in replies {
                    if !send(&mut socket, &r).await {
                        return;
                    }
                }
            }
            event = next_event(&mut sub) => {
                match event {
                    Some(e) => if !send(&mut socket, &e).await { return },
                    None => sub = None,
                }
            }
        }
    }
}

fn error(message: impl Into<String>) -> Vec<ServerMessage> {
    vec![ServerMessage::Error { message: message.into() }]
}

async fn command(
    app: &Arc<AppState>,
    attached: &mut Option<Arc<SessionHandle>>,
    sub: &mut Option<Subscription>,
    text: &str,
) -> Vec<ServerMessage> {
    let cmd: Command = match serde_json::from_str(text) {
        Ok(c) => c,
        Err(e) => return error(format!("malformed command: {e}")),
    };
    let handle = match &cmd {
        Command::CreateSession { mission, seed, arena } => match app.create(mission, *seed, arena.as_deref()).await {
            Ok(h) => h,
            Err(e) => return error(e),
        },
        Command::Attach { session } => match app.session(*session).await {
            Some(h) => h,
            None => return error(format!("unknown session {session}")),
        },
        _ => {
            let Some(h) = attached.as_ref() else {
                return error("no session attached; send create_session or attach first");
            };
            let mut s = h.session.lock().await;
            return match s.handle(cmd.clone()) {
                Ok(out) => {
                    h.hub.publish(out.events);
                    // this command's events reach the client before its ack
                    let mut replies: Vec<ServerMessage> =
                        sub.as_mut().map(|s| std::iter::from_fn(|| s.try_next()).collect()).unwrap_or_default();
                    replies.push(ServerMessage::Ack { command: cmd.name().into(), step: out.step });
                    if let Some((index, t)) = &out.saved {
                        replies.push(ServerMessage::Recording {
                            trajectory: *index,
                            records: t.records.len(),
                            valid: t.is_valid(),
                        });
                    }
                    app.forward_recording(s.id, out.saved);
                    replies
                }
                Err(e) => error(e.to_string()),
            };
        }
    };
    let s = handle.session.lock().await;
    *sub = Some(handle.hub.subscribe());
    let reply = ServerMessage::Session {
        session: s.id,
        mission: s.mission().name().into(),
        seed: s.seed(),
        arena_hash: s.mission().arena.digest(),
        state: s.state(),
    };
    drop(s);
    *attached = Some(handle);
    vec![reply]
}
