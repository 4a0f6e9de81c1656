use proptest::prelude::*;
use swarmgail_core::gail::*;
use swarmgail_core::missions::{MissionKind, MissionSpec};
use swarmgail_core::sim::Action;
use swarmgail_core::trajectory::{DemoSet, TrajectorySource};
use swarmgail_core::episode::run_operator_episode;
use swarmgail_core::SimRng;

fn joint() -> impl Strategy<Value = [f64; JOINT_OBS_DIM]> {
    prop::collection::vec(-50.0f64..50.0, JOINT_OBS_DIM).prop_map(|v| v.try_into().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn policy_ignores_feature_block(a in joint(), b in joint(), seed in 0u64..1000) {
        let policy = Policy::init(&mut SimRng::seed_from(seed));
        let mut mixed = a;
        mixed[10..].copy_from_slice(&b[10..]);
        prop_assert_eq!(
            policy.mean_action(&JointObservation(a)),
            policy.mean_action(&JointObservation(mixed))
        );
    }

    #[test]
    fn discriminator_ignores_local_block(a in joint(), b in joint(), v in 0.0f64..0.31, w in -1.9f64..1.9, seed in 0u64..1000) {
        let disc = Discriminator::init(&mut SimRng::seed_from(seed));
        let mut mixed = a;
        mixed[..10].copy_from_slice(&b[..10]);
        let action = Action::new(v, w);
        prop_assert_eq!(
            disc.logit(&DiscSample { joint: JointObservation(a), action }),
            disc.logit(&DiscSample { joint: JointObservation(mixed), action })
        );
    }

    #[test]
    fn masks_partition_the_joint_vector(a in joint()) {
        let p = mask_for_policy(&a);
        let d = mask_for_discriminator(&a);
        for k in 0..JOINT_OBS_DIM {
            prop_assert!(p[k] == 0.0 || d[k] == 0.0);
            prop_assert_eq!(p[k] + d[k], a[k]);
        }
    }

    #[test]
    fn clipped_objective_never_exceeds_unclipped(ratio in 0.0f64..5.0, adv in -10.0f64..10.0) {
        prop_assert!(clipped_surrogate(ratio, adv, 0.2) <= ratio * adv + 1e-12);
    }

    #[test]
    fn policy_actions_stay_in_actuator_range(a in joint(), seed in 0u64..1000) {
        let mut rng = SimRng::seed_from(seed);
        let policy = Policy::init(&mut rng);
        let (raw, lp) = policy.sample(&JointObservation(a), &mut rng);
        let act = swarmgail_core::neural::squash_action(&raw);
        prop_assert!(lp.is_finite());
        prop_assert!((0.0..=0.31).contains(&act.linear));
        prop_assert!((-1.9..=1.9).contains(&act.angular));
    }
}

#[test]
fn robots_with_equal_local_observations_act_alike() {
    let policy = Policy::init(&mut SimRng::seed_from(3));
    let mission = MissionSpec::new(MissionKind::Aggregation);
    let r = collect_rollout(&policy, None, &mission, 5, ActionMode::Deterministic, TrajectorySource::GailPolicy).unwrap();
    for t in r.transitions() {
        let mut other = t.joint;
        other.0[10..].fill(0.0);
        assert_eq!(policy.act_deterministic(&other), t.action);
    }
}

#[test]
fn rollout_has_one_stream_per_robot_and_full_length() {
    let policy = Policy::init(&mut SimRng::seed_from(1));
    let mission = MissionSpec::new(MissionKind::FullSpeed);
    let r = collect_rollout(&policy, None, &mission, 2, ActionMode::Stochastic, TrajectorySource::GailPolicy).unwrap();
    assert_eq!(r.streams.len(), 3);
    for (i, s) in r.streams.iter().enumerate() {
        assert_eq!(s.len(), 51);
        assert!(s.iter().all(|t| t.robot == i));
        assert!(s[..50].iter().all(|t| !t.done) && s[50].done);
    }
    assert!(r.trajectory.is_valid());
    for (t, rec) in r.trajectory.records.iter().enumerate() {
        for i in 0..3 {
            let tr = &r.streams[i][t];
            // discriminator samples are built from what the world executed
            assert_eq!(tr.action, rec.robots[i].action);
            assert_eq!(tr.joint.0[10..], r.streams[0][t].joint.0[10..]);
        }
    }
    let sum: f64 = r.streams[0].iter().map(|t| t.true_reward).sum();
    assert!((sum - r.true_return).abs() < 1e-9);
    assert!((0.0..=15.81).contains(&r.true_return));
}

fn small_config(seed: u64) -> GailConfig {
    GailConfig { total_env_steps: 153 * 12, episodes_per_round: 4, seed, ..GailConfig::default() }
}

fn scripted_demos(kind: MissionKind) -> DemoSet {
    let m = MissionSpec::new(kind);
    DemoSet {
        mission: m.name().into(),
        rollouts: (0..5)
            .map(|k| run_operator_episode(&m, k, None, TrajectorySource::Scripted).unwrap().trajectory)
            .collect(),
    }
}

#[test]
fn training_is_deterministic_per_seed() {
    let m = MissionSpec::new(MissionKind::StandingStill);
    let demos = scripted_demos(MissionKind::StandingStill);
    let a = train(&small_config(7), &m, RewardSource::Imitation(&demos), &mut ()).unwrap();
    let b = train(&small_config(7), &m, RewardSource::Imitation(&demos), &mut ()).unwrap();
    let c = train(&small_config(8), &m, RewardSource::Imitation(&demos), &mut ()).unwrap();
    assert_eq!(a.snapshot, b.snapshot);
    assert_ne!(a.snapshot, c.snapshot);
}

#[test]
fn training_emits_exactly_the_configured_checkpoints() {
    let m = MissionSpec::new(MissionKind::FullSpeed);
    let mut sink = CollectingSink::default();
    let cfg = small_config(1);
    let s = train(&cfg, &m, RewardSource::Mission, &mut sink).unwrap();
    assert_eq!(s.checkpoints, 100);
    assert_eq!(sink.checkpoints.len(), 100);
    assert!(sink.checkpoints.iter().enumerate().all(|(k, c)| c.0 == k));
    assert_eq!(sink.checkpoints.last().unwrap().2, s.snapshot);
    assert_eq!(s.env_steps, cfg.total_env_steps);
    assert_eq!(sink.rounds.len(), 3);
    assert!(sink.rounds.iter().all(|r| r.disc_loss.is_none()));
}

#[test]
fn imitation_rounds_report_discriminator_metrics() {
    let m = MissionSpec::new(MissionKind::FullSpeed);
    let demos = scripted_demos(MissionKind::FullSpeed);
    let mut sink = CollectingSink::default();
    train(&small_config(2), &m, RewardSource::Imitation(&demos), &mut sink).unwrap();
    for r in &sink.rounds {
        let acc = r.disc_acc.unwrap();
        assert!((0.0..=1.0).contains(&acc));
        assert!(r.disc_loss.unwrap() > 0.0);
        assert!(r.mean_gail_reward.unwrap() > 0.0);
    }
}

#[test]
fn mismatched_or_empty_demos_are_rejected() {
    let m = MissionSpec::new(MissionKind::FullSpeed);
    let empty = DemoSet { mission: "full-speed".into(), rollouts: vec![] };
    assert_eq!(
        train(&small_config(0), &m, RewardSource::Imitation(&empty), &mut ()).unwrap_err(),
        TrainError::NoDemos
    );
    let other = scripted_demos(MissionKind::StandingStill);
    assert!(matches!(
        train(&small_config(0), &m, RewardSource::Imitation(&other), &mut ()),
        Err(TrainError::MissionMismatch { .. })
    ));
    let mut short = scripted_demos(MissionKind::FullSpeed);
    short.rollouts[2].records.truncate(40);
    assert!(matches!(
        train(&small_config(0), &m, RewardSource::Imitation(&short), &mut ()),
        Err(TrainError::InvalidDemo(_))
    ));
}
