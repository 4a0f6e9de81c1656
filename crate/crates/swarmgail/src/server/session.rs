//! One live simulation driven by operator commands. Pure logic: the
//! transport feeds commands and ticks in, and forwards the returned events.

use super::protocol::{BeaconMsg, Command, FeaturesMsg, RobotMsg, StateMsg, StreamEvent};
use swarmgail_core::behaviors::{Operator, OperatorCommand, OperatorError, ScheduledCommand};
use swarmgail_core::episode::{Episode, TrajectoryRecorder};
use swarmgail_core::missions::MissionSpec;
use swarmgail_core::sim::SpawnError;
use swarmgail_core::trajectory::{Trajectory, TrajectorySource};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Spawn(#[from] SpawnError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("episode finished at step {0}; reset to continue")]
    EpisodeOver(usize),
    #[error("not recording")]
    NotRecording,
    #[error("already recording")]
    AlreadyRecording,
    #[error("`{0}` is handled by the server, not the session")]
    NotASessionCommand(&'static str),
}

/// What a command produced: the reply's step counter, stream events, and a
/// finished recording if one was closed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub step: usize,
    pub events: Vec<StreamEvent>,
    pub saved: Option<(usize, Trajectory)>,
}

struct Recording {
    recorder: TrajectoryRecorder,
    schedule: Vec<ScheduledCommand>,
}

pub struct Session {
    pub id: u64,
    mission: MissionSpec,
    seed: u64,
    episode: Episode,
    operator: Operator,
    selection: Vec<usize>,
    running: bool,
    recording: Option<Recording>,
    recordings: Vec<Trajectory>,
    seq: u64,
    created: String,
}

impl Session {
    pub fn new(id: u64, mission: MissionSpec, seed: u64) -> Result<Self, SessionError> {
        let episode = Episode::new(mission.clone(), seed)?;
        let n = episode.world().robots.len();
        Ok(Self {
            id,
            mission,
            seed,
            episode,
            operator: Operator::new(n),
            selection: Vec::new(),
            running: false,
            recording: None,
            recordings: Vec::new(),
            seq: 0,
            created: String::new(),
        })
    }

    /// Timestamp stamped into saved recordings.
    pub fn set_clock(&mut self, created: String) {
        self.created = created;
    }

    pub fn mission(&self) -> &MissionSpec {
        &self.mission
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn step_index(&self) -> usize {
        self.episode.step_index()
    }

    pub fn is_running(&self) -> bool {
        self.running
    }

    pub fn is_recording(&self) -> bool {
        self.recording.is_some()
    }

    pub fn recordings(&self) -> &[Trajectory] {
        &self.recordings
    }

    pub fn episode(&self) -> &Episode {
        &self.episode
    }

    pub fn state(&self) -> StateMsg {
        let world = self.episode.world();
        StateMsg {
            step: self.episode.step_index(),
            sim_time: world.sim_time,
            robots: world
                .robots
                .iter()
                .zip(self.operator.labels())
                .enumerate()
                .map(|(id, (r, label))| RobotMsg {
                    id,
                    x: r.position.x,
                    y: r.position.y,
                    heading: r.heading,
                    linear_vel: r.linear_vel,
                    angular_vel: r.angular_vel,
                    bumper: r.bumper,
                    behavior: label.to_string(),
                })
                .collect(),
            beacons: self.operator.beacons().iter().map(BeaconMsg::from).collect(),
            speed_cap: self.operator.speed_cap(),
            features: FeaturesMsg::from(self.episode.features()),
            selection: self.selection.clone(),
            running: self.running,
            recording: self.recording.is_some(),
        }
    }

    fn next_seq(&mut self) -> u64 {
        let s = self.seq;
        self.seq += 1;
        s
    }

    fn operator_command(&mut self, cmd: OperatorCommand) -> Result<(), SessionError> {
        self.operator.apply(&cmd, self.episode.world())?;
        let step = self.episode.step_index();
        if let Some(rec) = self.recording.as_mut() {
            rec.schedule.push(ScheduledCommand { step, command: cmd });
        }
        Ok(())
    }

    /// Applies a command between control steps.
    pub fn handle(&mut self, cmd: Command) -> Result<Outcome, SessionError> {
        let mut out = Outcome::default();
        match cmd {
            Command::CreateSession { .. } | Command::Attach { .. } => {
                return Err(SessionError::NotASessionCommand(cmd.name()));
            }
            Command::Select { robots } => {
                let n = self.episode.world().robots.len();
                if let Some(&bad) = robots.iter().find(|&&r| r >= n) {
                    return Err(OperatorError::UnknownRobot(bad).into());
                }
                self.selection = robots;
            }
            Command::AssignBehavior { robots, behavior } => {
                let robots = robots.unwrap_or_else(|| self.selection.clone());
                self.operator_command(OperatorCommand::Assign { robots, behavior: behavior.into() })?;
            }
            Command::PlaceBeacon { beacon } => self.operator_command(OperatorCommand::PlaceBeacon(beacon.into()))?,
            Command::RemoveBeacon { index } => self.operator_command(OperatorCommand::RemoveBeacon(index))?,
            Command::SetSpeedCap { cap } => self.operator_command(OperatorCommand::SetSpeedCap(cap))?,
            Command::Start => {
                if self.episode.is_done() {
                    return Err(SessionError::EpisodeOver(self.episode.step_index()));
                }
                self.running = true;
            }
            Command::Pause => self.running = false,
            Command::Step { count } => {
                for _ in 0..count {
                    self.step_once(&mut out)?;
                }
            }
            Command::StartRecording => {
                if self.recording.is_some() {
                    return Err(SessionError::AlreadyRecording);
                }
                self.start_recording(&mut out)?;
            }
            Command::StopRecording => {
                if self.recording.is_none() {
                    return Err(SessionError::NotRecording);
                }
                self.stop_recording(&mut out);
            }
            Command::Reset { seed } => {
                self.seed = seed;
                self.episode = Episode::new(self.mission.clone(), seed)?;
                self.operator = Operator::new(self.episode.world().robots.len());
                self.recording = None;
                self.running = false;
                let seq = self.next_seq();
                out.events.push(StreamEvent::Reset { seq, seed, step: 0 });
            }
        }
        out.step = self.episode.step_index();
        Ok(out)
    }

    /// Called by the pacing clock: one control step if running.
    pub fn tick(&mut self) -> Outcome {
        let mut out = Outcome::default();
        if self.running {
            // a running session always has steps left; step_once pauses at the end
            let _ = self.step_once(&mut out);
        }
        out.step = self.episode.step_index();
        out
    }

    fn step_once(&mut self, out: &mut Outcome) -> Result<(), SessionError> {
        if self.episode.is_done() {
            self.running = false;
            return Err(SessionError::EpisodeOver(self.episode.step_index()));
        }
        let obs = self.episode.local_observations();
        let mut rng = std::mem::replace(&mut self.episode.rng, swarmgail_core::SimRng::seed_from(0));
        let actions = self.operator.actions(self.episode.world(), &mut rng);
        self.episode.rng = rng;
        if let Some(rec) = self.recording.as_mut() {
            let labels = self.operator.labels();
            rec.recorder.record(&self.episode, &obs, &actions, Some(&labels));
        }
        self.episode.step(&actions);
        let seq = self.next_seq();
        out.events.push(StreamEvent::State { seq, state: self.state() });
        if self.recording.as_ref().is_some_and(|r| r.recorder.len() >= self.mission.episode_steps) {
            self.stop_recording(out);
        }
        if self.episode.is_done() {
            self.running = false;
            let seq = self.next_seq();
            out.events.push(StreamEvent::EpisodeEnd {
                seq,
                step: self.episode.step_index(),
                episode_return: self.episode.total_reward(),
            });
        }
        Ok(())
    }

    /// Recording always covers a whole episode: the world is respawned from
    /// the session seed and the current assignments, beacons and speed cap
    /// become the step-0 commands of the schedule, so replaying the schedule
    /// on the same seed reproduces the recording.
    fn start_recording(&mut self, out: &mut Outcome) -> Result<(), SessionError> {
        let mut setup = Vec::new();
        for (i, s) in self.operator.states().iter().enumerate() {
            setup.push(OperatorCommand::Assign { robots: vec![i], behavior: s.kind });
        }
        for b in self.operator.beacons() {
            setup.push(OperatorCommand::PlaceBeacon(*b));
        }
        if let Some(c) = self.operator.speed_cap() {
            setup.push(OperatorCommand::SetSpeedCap(Some(c)));
        }
        self.episode = Episode::new(self.mission.clone(), self.seed)?;
        self.operator = Operator::new(self.episode.world().robots.len());
        for c in &setup {
            self.operator.apply(c, self.episode.world())?;
        }
        let mut recorder = TrajectoryRecorder::new(&self.mission, self.seed, TrajectorySource::Human);
        recorder.set_created(self.created.clone());
        self.recording = Some(Recording {
            recorder,
            schedule: setup.into_iter().map(|command| ScheduledCommand { step: 0, command }).collect(),
        });
        let seq = self.next_seq();
        out.events.push(StreamEvent::Reset { seq, seed: self.seed, step: 0 });
        Ok(())
    }

    fn stop_recording(&mut self, out: &mut Outcome) {
        let Some(rec) = self.recording.take() else { return };
        let mut recorder = rec.recorder;
        for c in rec.schedule {
            recorder.push_command(c);
        }
        let t = recorder.finish();
        let valid = t.is_valid();
        let records = t.records.len();
        let index = self.recordings.len();
        self.recordings.push(t.clone());
        let seq = self.next_seq();
        out.events.push(StreamEvent::RecordingSaved { seq, trajectory: index, records, valid });
        out.saved = Some((index, t));
    }
}
