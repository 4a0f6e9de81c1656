use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use swarmgail::formats::{self, FormatError};
use swarmgail::pipeline::{self, EvalSubject, PipelineError};
use swarmgail::server::{self, AppState, ServerConfig};
use swarmgail_core::gail::{GailConfig, RoundMetrics};
use swarmgail_core::missions::{MissionKind, MissionSpec};
use swarmgail_core::trajectory::{validate_demoset, DemoSet, Trajectory, TrajectorySource};

/// Swarm imitation-learning workbench: demonstrations, GAIL and PPO
/// training, evaluation and the live demonstration server.
///
/// Outputs go under `--out`, else `$SWARMGAIL_OUT`, else `./runs`:
/// `demos/<mission>/`, `ckpts/<mission>/<run>/`, `evals/`.
///
/// Exit status: 0 ok, 1 runtime error, 2 usage error, 3 validation failure.
#[derive(Parser, Debug)]
#[command(name = "swarmgail", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Write a five-rollout demonstration set.
    Demo(DemoArgs),
    /// Train an imitation policy on a demonstration set.
    Train(TrainArgs),
    /// Train a policy on the true mission reward with PPO.
    Ppo(PpoArgs),
    /// Evaluate a checkpoint or the scripted demonstrator.
    Eval(EvalArgs),
    /// Check a demonstration directory.
    Validate(ValidateArgs),
    /// Run the live demonstration server.
    Serve(ServeArgs),
    /// Print a mission's default arena file.
    Arena { mission: MissionKind },
}

#[derive(Args, Debug)]
struct Common {
    /// Output root.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Arena file replacing the mission's default arena.
    #[arg(long)]
    arena: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum DemoSource {
    /// The mission's scripted strategy.
    Scripted,
    /// Record a human demonstration through the live server, then replay it.
    Serve,
    /// Replay the command schedule of a recorded trajectory file.
    File,
    /// Roll out a trained policy checkpoint.
    Ppo,
}

#[derive(Args, Debug)]
struct DemoArgs {
    mission: MissionKind,
    #[arg(long, value_enum, default_value = "scripted")]
    source: DemoSource,
    /// First of the five rollout seeds.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trajectory file for `--source file`.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    /// Checkpoint for `--source ppo`.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Listen address for `--source serve`.
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct TrainArgs {
    mission: MissionKind,
    /// Demonstration directory; defaults to `<out>/demos/<mission>`.
    #[arg(long)]
    demos: Option<PathBuf>,
    /// Budget in robot transitions (one episode = 153).
    #[arg(long, default_value_t = 153_000)]
    steps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    episodes_per_round: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct PpoArgs {
    mission: MissionKind,
    #[arg(long, default_value_t = 153_000)]
    steps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    episodes_per_round: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct EvalArgs {
    mission: MissionKind,
    #[arg(long, conflicts_with = "scripted", required_unless_present = "scripted")]
    checkpoint: Option<PathBuf>,
    /// Evaluate the scripted demonstrator instead of a policy.
    #[arg(long)]
    scripted: bool,
    #[arg(long, default_value_t = 5)]
    episodes: usize,
    /// First evaluation seed.
    #[arg(long, default_value_t = 1000)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    dir: PathBuf,
    /// Also require this mission.
    #[arg(long)]
    mission: Option<MissionKind>,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: String,
    /// Control steps per second while a session runs.
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    /// Recordings are saved under `<out>/recordings/`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Demo(a) => demo(a),
        Cmd::Train(a) => train(a),
        Cmd::Ppo(a) => ppo(a),
        Cmd::Eval(a) => eval(a),
        Cmd::Validate(a) => validate(a),
        Cmd::Serve(a) => serve(a),
        Cmd::Arena { mission } => {
            print!("{}", mission.arena().to_text());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                PipelineError::Usage(_) => 2,
                PipelineError::Validation(_) | PipelineError::InvalidFile(_) => 3,
                _ => 1,
            })
        }
    }
}

fn usage(msg: impl Into<String>) -> PipelineError {
    PipelineError::Usage(msg.into())
}

fn mission(kind: MissionKind, common: &Common) -> Result<MissionSpec, PipelineError> {
    match &common.arena {
        None => Ok(MissionSpec::new(kind)),
        Some(p) => {
            let arena = formats::load_arena(p)?;
            Ok(MissionSpec::with_arena(kind, arena))
        }
    }
}

fn runtime() -> Result<tokio::runtime::Runtime, PipelineError> {
    tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .map_err(|e| PipelineError::Usage(format!("cannot start runtime: {e}")))
}

fn print_returns(what: &str, returns: &[f64]) {
    let list: Vec<String> = returns.iter().map(|r| format!("{r:.4}")).collect();
    println!("{what}: {}", list.join(" "));
    println!("mean: {:.4}", pipeline::mean(returns.iter().copied()));
}

fn demo(a: DemoArgs) -> Result<(), PipelineError> {
    let m = mission(a.mission, &a.common)?;
    let (set, returns) = match a.source {
        DemoSource::Scripted => pipeline::operator_demos(&m, a.seed, None, TrajectorySource::Scripted)?,
        DemoSource::File => {
            let path = a.trajectory.as_deref().ok_or_else(|| usage("--source file needs --trajectory"))?;
            replay(&m, &formats::load_trajectory(path)?, a.seed)?
        }
        DemoSource::Ppo => {
            let path = a.checkpoint.as_deref().ok_or_else(|| usage("--source ppo needs --checkpoint"))?;
            let (snap, _) = formats::load_checkpoint(path)?;
            pipeline::policy_demos(&m, &snap.policy, a.seed, TrajectorySource::PpoPolicy)?
        }
        DemoSource::Serve => {
            let recorded = record_human(&m, &a.addr, &pipeline::output_root(a.common.out.as_deref()))?;
            replay(&m, &recorded, a.seed)?
        }
    };
    let dir = pipeline::demo_dir(&pipeline::output_root(a.common.out.as_deref()), &m);
    let files = formats::save_demoset(&set, &dir)?;
    for f in &files {
        println!("{}", f.display());
    }
    print_returns("returns", &returns);
    Ok(())
}

/// Five rollouts of a recorded command schedule.
fn replay(m: &MissionSpec, t: &Trajectory, seed: u64) -> Result<(DemoSet, Vec<f64>), PipelineError> {
    if t.meta.mission != m.name() {
        return Err(usage(format!("trajectory is for mission `{}`, not `{}`", t.meta.mission, m.name())));
    }
    if t.schedule.is_empty() {
        return Err(usage("trajectory carries no command schedule to replay"));
    }
    pipeline::operator_demos(m, seed, Some(&t.schedule), TrajectorySource::Human)
}

/// Serves until a complete recording of mission `m` arrives.
fn record_human(m: &MissionSpec, addr: &str, root: &Path) -> Result<Trajectory, PipelineError> {
    let rt = runtime()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| usage(format!("cannot listen on {addr}: {e}")))?;
        let (tx, mut rx) = tokio::sync::mpsc::unbounded_channel();
        let state = AppState::new(ServerConfig::default(), Some(tx));
        let (stop_tx, stop_rx) = tokio::sync::oneshot::channel::<()>();
        let server = tokio::spawn(server::serve(listener, state, async {
            let _ = stop_rx.await;
        }));
        eprintln!("serving on ws://{addr}/ws; record a full {} demonstration", m.name());
        let found = loop {
            let Some((id, t)) = rx.recv().await else {
                break Err(usage("server stopped before a recording arrived"));
            };
            save_recording(root, id, &t)?;
            if t.meta.mission == m.name() && t.is_valid() {
                break Ok(t);
            }
            eprintln!("session {id}: recording skipped (mission {}, {} records)", t.meta.mission, t.records.len());
        };
        let _ = stop_tx.send(());
        let _ = server.await;
        found
    })
}

fn save_recording(root: &Path, session: u64, t: &Trajectory) -> Result<PathBuf, PipelineError> {
    let dir = root.join("recordings").join(&t.meta.mission);
    let n = std::fs::read_dir(&dir).map(|d| d.count()).unwrap_or(0);
    let path = dir.join(format!("session{session}_{n:03}.{}", formats::TRAJECTORY_EXTENSION));
    formats::save_trajectory(t, &path)?;
    eprintln!("saved {}", path.display());
    Ok(path)
}

fn progress(total: u64) -> impl FnMut(&RoundMetrics) {
    let mut next = 0u64;
    move |r: &RoundMetrics| {
        if r.env_steps * 10 >= next * total {
            next = r.env_steps * 10 / total.max(1) + 1;
            let opt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
            eprintln!(
                "round {:>5} env_steps {:>7}/{total} true_return {:>8.3} disc_acc {} gail_reward {}",
                r.round,
                r.env_steps,
                r.mean_true_return,
                opt(r.disc_acc),
                opt(r.mean_gail_reward),
            );
        }
    }
}

fn config(steps: u64, seed: u64, episodes_per_round: usize) -> Result<GailConfig, PipelineError> {
    if episodes_per_round == 0 {
        return Err(usage("--episodes-per-round must be positive"));
    }
    Ok(GailConfig { total_env_steps: steps, episodes_per_round, seed, ..GailConfig::default() })
}

fn run_dir(root: &Path, m: &MissionSpec, arm: &str, seed: u64) -> PathBuf {
    root.join(pipeline::CKPTS_DIR).join(m.name()).join(format!("{arm}-seed{seed}"))
}

fn report(r: &pipeline::TrainReport) {
    println!("{} checkpoints in {}", r.checkpoints.len(), r.run_dir.display());
    if let Some(last) = r.final_checkpoint() {
        println!("final: {}", last.display());
    }
}

fn train(a: TrainArgs) -> Result<(), PipelineError> {
    let m = mission(a.mission, &a.common)?;
    let root = pipeline::output_root(a.common.out.as_deref());
    let demos_dir = a.demos.unwrap_or_else(|| pipeline::demo_dir(&root, &m));
    if !demos_dir.is_dir() {
        return Err(usage(format!("demonstration directory {} not found", demos_dir.display())));
    }
    let demos = formats::load_demoset(&demos_dir)?;
    let cfg = config(a.steps, a.seed, a.episodes_per_round)?;
    let mut log = progress(cfg.total_env_steps);
    let r = pipeline::train_run(&m, Some(&demos), &cfg, &run_dir(&root, &m, "gail", a.seed), Some(&mut log))?;
    report(&r);
    Ok(())
}

fn ppo(a: PpoArgs) -> Result<(), PipelineError> {
    let m = mission(a.mission, &a.common)?;
    let root = pipeline::output_root(a.common.out.as_deref());
    let cfg = config(a.steps, a.seed, a.episodes_per_round)?;
    let mut log = progress(cfg.total_env_steps);
    let r = pipeline::train_run(&m, None, &cfg, &run_dir(&root, &m, "ppo", a.seed), Some(&mut log))?;
    report(&r);
    Ok(())
}

/// `runs/ckpts/full-speed/ppo-seed0/ckpt_099` → `ppo-seed0-ckpt_099`.
fn checkpoint_label(path: &Path) -> String {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    match path.parent().and_then(Path::file_name) {
        Some(dir) => format!("{}-{name}", dir.to_string_lossy()),
        None => name,
    }
}

fn eval(a: EvalArgs) -> Result<(), PipelineError> {
    let m = mission(a.mission, &a.common)?;
    let subject = match &a.checkpoint {
        Some(p) => {
            let (snap, _) = formats::load_checkpoint(p)?;
            EvalSubject::Policy { label: checkpoint_label(p), policy: Box::new(snap.policy) }
        }
        None => EvalSubject::Scripted,
    };
    let rows = pipeline::evaluate(&m, &subject, a.episodes, a.seed)?;
    let root = pipeline::output_root(a.common.out.as_deref());
    let path = root.join(pipeline::EVALS_DIR).join(format!("{}-{}-seed{}.csv", m.name(), subject.label(), a.seed));
    formats::write_results(&path, &rows)?;
    for r in &rows {
        println!("episode {} seed {} return {:.4} mean_speed {:.4}", r.episode, r.seed, r.episode_return, r.mean_speed);
    }
    print_returns("returns", &rows.iter().map(|r| r.episode_return).collect::<Vec<_>>());
    println!("results: {}", path.display());
    Ok(())
}

fn validate(a: ValidateArgs) -> Result<(), PipelineError> {
    let set = match formats::load_demoset(&a.dir) {
        Ok(s) => s,
        Err(e @ (FormatError::Parse { .. } | FormatError::RecordCount { .. } | FormatError::NonFinite { .. })) => {
            return Err(PipelineError::InvalidFile(e));
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(k) = a.mission {
        if set.mission != k.name() {
            return Err(usage(format!("demonstrations are for `{}`, not `{}`", set.mission, k.name())));
        }
    }
    let report = validate_demoset(&set);
    if !report.is_ok() {
        return Err(PipelineError::Validation(report));
    }
    println!("ok: {} rollouts of {}", set.rollouts.len(), set.mission);
    Ok(())
}

fn serve(a: ServeArgs) -> Result<(), PipelineError> {
    if !(a.rate.is_finite() && a.rate > 0.0) {
        return Err(usage("--rate must be positive"));
    }
    let root = pipeline::output_root(a.out.as_deref());
    let rt = runtime()?;
    rt.block_on(async {
        let listener =
            tokio::net::TcpListener::bind(&a.addr).await.map_err(|e| usage(format!("cannot listen on {}: {e}", a.addr)))?;
        let (tx, mut rx) = tokio::sync::mpsc::unbounded_channel();
        let state = AppState::new(ServerConfig { steps_per_second: a.rate, ..ServerConfig::default() }, Some(tx));
        let store = tokio::spawn(async move {
            while let Some((id, t)) = rx.recv().await {
                if let Err(e) = save_recording(&root, id, &t) {
                    eprintln!("error: {e}");
                }
            }
        });
        eprintln!("serving on ws://{}/ws (ctrl-c to stop)", a.addr);
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        server::serve(listener, Arc::clone(&state), shutdown).await.map_err(|e| usage(format!("server: {e}")))?;
        drop(state);
        // open sockets may still hold the sender; give pending saves a moment
        let _ = tokio::time::timeout(std::time::Duration::from_secs(2), store).await;
        Ok(())
    })
}
