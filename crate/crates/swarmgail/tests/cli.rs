use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_swarmgail"));
    c.env_remove("SWARMGAIL_OUT");
    c
}

fn run(out: &Path, args: &[&str]) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn tempdir() -> (tempfile::TempDir, PathBuf) {
    let t = tempfile::tempdir().unwrap();
    let p = t.path().join("out");
    (t, p)
}

fn returns(o: &Output) -> Vec<f64> {
    let s = stdout(o);
    let line = s.lines().find_map(|l| l.strip_prefix("returns: ")).expect("returns line");
    line.split_whitespace().map(|v| v.parse().unwrap()).collect()
}

fn count_files(dir: &Path, prefix: &str) -> usize {
    std::fs::read_dir(dir).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with(prefix)).count()
}

#[test]
fn usage_errors_exit_2() {
    let (_out_guard, out) = tempdir();
    assert_eq!(code(&run(&out, &["demo", "moon-landing"])), 2);
    assert_eq!(code(&run(&out, &["train", "full-speed"])), 2);
    assert_eq!(code(&run(&out, &["demo", "full-speed", "--source", "file"])), 2);
    assert_eq!(code(&bin().args(["eval", "full-speed"]).output().unwrap()), 2);
    assert!(!out.join("ckpts").exists());
}

#[test]
fn scripted_demo_writes_validated_set() {
    let (_out_guard, out) = tempdir();
    let o = run(&out, &["demo", "standing-still", "--source", "scripted", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(returns(&o), vec![0.0; 5]);
    let dir = out.join("demos").join("standing-still");
    assert_eq!(count_files(&dir, "rollout_"), 5);
    let v = bin().arg("validate").arg(&dir).output().unwrap();
    assert_eq!(code(&v), 0);
    let v = bin().arg("validate").arg(&dir).args(["--mission", "foraging"]).output().unwrap();
    assert_eq!(code(&v), 2);

    std::fs::remove_file(dir.join("rollout_4.traj")).unwrap();
    assert_eq!(code(&bin().arg("validate").arg(&dir).output().unwrap()), 3);
    let text = std::fs::read_to_string(dir.join("rollout_3.traj")).unwrap();
    let cut: String = text.lines().take(30).map(|l| format!("{l}\n")).collect();
    std::fs::write(dir.join("rollout_4.traj"), cut).unwrap();
    let v = bin().arg("validate").arg(&dir).output().unwrap();
    assert_eq!(code(&v), 3);
    assert!(String::from_utf8_lossy(&v.stderr).contains("record count mismatch"));
}

#[test]
fn scripted_eval_is_deterministic_with_one_row_per_episode() {
    let (_out_guard, out) = tempdir();
    let a = run(&out, &["eval", "standing-still", "--scripted", "--episodes", "5", "--seed", "3"]);
    assert_eq!(code(&a), 0);
    assert_eq!(returns(&a), vec![0.0; 5]);
    let b = run(&out, &["eval", "standing-still", "--scripted", "--episodes", "5", "--seed", "3"]);
    assert_eq!(stdout(&a), stdout(&b));
    let rows = swarmgail::formats::read_results(&out.join("evals").join("standing-still-scripted-seed3.csv")).unwrap();
    assert_eq!(rows.len(), 5);
    let c = run(&out, &["eval", "full-speed", "--scripted", "--episodes", "7"]);
    assert_eq!(returns(&c).len(), 7);
}

#[test]
fn ppo_run_checkpoints_and_feeds_eval_and_demo() {
    let (_out_guard, out) = tempdir();
    let o = run(&out, &["ppo", "full-speed", "--steps", "1530", "--seed", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let dir = out.join("ckpts").join("full-speed").join("ppo-seed4");
    assert_eq!(count_files(&dir, "ckpt_"), 100);
    assert!(dir.join("metrics.csv").is_file());
    let first = std::fs::read(dir.join("ckpt_099")).unwrap();

    // same seed, same weights
    let (_again_guard, again) = tempdir();
    assert_eq!(code(&run(&again, &["ppo", "full-speed", "--steps", "1530", "--seed", "4"])), 0);
    assert_eq!(std::fs::read(again.join("ckpts/full-speed/ppo-seed4/ckpt_099")).unwrap(), first);

    let ckpt = dir.join("ckpt_099");
    let e = run(&out, &["eval", "full-speed", "--checkpoint", ckpt.to_str().unwrap()]);
    assert_eq!(code(&e), 0);
    let r = returns(&e);
    assert_eq!(r.len(), 5);
    assert!(r.iter().all(|v| (0.0..=15.81).contains(v)));

    let d = run(&out, &["demo", "full-speed", "--source", "ppo", "--checkpoint", ckpt.to_str().unwrap()]);
    assert_eq!(code(&d), 0, "{}", String::from_utf8_lossy(&d.stderr));
    assert_eq!(count_files(&out.join("demos/full-speed"), "rollout_"), 5);
}

#[test]
fn gail_train_uses_default_demo_dir() {
    let (_out_guard, out) = tempdir();
    assert_eq!(code(&run(&out, &["demo", "aggregation"])), 0);
    let o = run(&out, &["train", "aggregation", "--steps", "10200", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let dir = out.join("ckpts/aggregation/gail-seed1");
    assert_eq!(count_files(&dir, "ckpt_"), 100);
    let (snap, steps) = swarmgail::formats::load_checkpoint(&dir.join("ckpt_099")).unwrap();
    // 66 whole episodes of 153 transitions fit the budget
    assert_eq!(steps, 66 * 153);
    assert!(snap.discriminator.is_some());
    let (_, steps) = swarmgail::formats::load_checkpoint(&dir.join("ckpt_000")).unwrap();
    assert!(steps >= 102);
}

#[test]
fn recorded_schedule_replays_across_five_seeds() {
    use swarmgail::server::{BehaviorMsg, Command as Cmd, Session};
    use swarmgail_core::missions::{MissionKind, MissionSpec};
    let mut s = Session::new(1, MissionSpec::new(MissionKind::Dispersion), 0).unwrap();
    s.handle(Cmd::StartRecording).unwrap();
    s.handle(Cmd::AssignBehavior { robots: Some(vec![0, 1, 2]), behavior: BehaviorMsg::Deploy }).unwrap();
    let saved = s.handle(Cmd::Step { count: 51 }).unwrap().saved.unwrap().1;
    let (_out_guard, out) = tempdir();
    let file = out.join("human.traj");
    swarmgail::formats::save_trajectory(&saved, &file).unwrap();
    let o = run(&out, &["demo", "dispersion", "--source", "file", "--trajectory", file.to_str().unwrap(), "--seed", "20"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let set = swarmgail::formats::load_demoset(&out.join("demos/dispersion")).unwrap();
    let seeds: Vec<u64> = set.rollouts.iter().map(|t| t.meta.seed).collect();
    assert_eq!(seeds, [20, 21, 22, 23, 24]);
    assert!(set.rollouts.iter().all(|t| t.schedule == saved.schedule));
    let wrong = run(&out, &["demo", "foraging", "--source", "file", "--trajectory", file.to_str().unwrap()]);
    assert_eq!(code(&wrong), 2);
}
