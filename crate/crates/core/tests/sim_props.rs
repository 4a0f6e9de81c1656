use proptest::prelude::*;
use swarmgail_core::episode::Episode;
use swarmgail_core::features::{grouping, FeatureAccumulator, FEATURE_DIM};
use swarmgail_core::missions::{open_arena, MissionKind, MissionSpec};
use swarmgail_core::sim::*;
use swarmgail_core::Point;

fn action() -> impl Strategy<Value = Action> {
    (-1.0f64..1.0, -4.0f64..4.0).prop_map(|(v, w)| Action::new(v, w))
}

fn actions(steps: usize) -> impl Strategy<Value = Vec<[Action; 3]>> {
    prop::collection::vec([action(), action(), action()], steps)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stepping_is_deterministic(seed in 0u64..10_000, acts in actions(20)) {
        let a = spawn_world(open_arena(), 3, seed).unwrap();
        let (mut x, mut y) = (a.clone(), a);
        for step in &acts {
            x = step_world(&x, step);
            y = step_world(&y, step);
        }
        prop_assert_eq!(x.robots, y.robots);
        prop_assert_eq!(x.sim_time, y.sim_time);
    }

    #[test]
    fn velocities_respect_actuator_bounds(seed in 0u64..10_000, acts in actions(20)) {
        let mut w = spawn_world(open_arena(), 3, seed).unwrap();
        for (k, step) in acts.iter().enumerate() {
            w.step(step);
            prop_assert_eq!(w.sim_time, (k + 1) as f64);
            for r in &w.robots {
                prop_assert!((0.0..=MAX_LINEAR_VEL).contains(&r.linear_vel));
                prop_assert!((-MAX_ANGULAR_VEL..=MAX_ANGULAR_VEL).contains(&r.angular_vel));
            }
        }
    }

    #[test]
    fn robots_never_overlap_or_leave_the_arena(seed in 0u64..10_000, acts in actions(30)) {
        let mut w = spawn_world(open_arena(), 3, seed).unwrap();
        for step in &acts {
            let before = w.positions();
            w.step(step);
            for (i, r) in w.robots.iter().enumerate() {
                // one control step is ten substeps; each moves at most 3.1 cm
                prop_assert!(r.position.distance(before[i]) <= 10.0 * MAX_LINEAR_VEL * SUBSTEP_DT + 1e-12);
                prop_assert!(r.position.x >= BODY_RADIUS - 1e-9 && r.position.x <= 4.0 - BODY_RADIUS + 1e-9);
                prop_assert!(r.position.y >= BODY_RADIUS - 1e-9 && r.position.y <= 4.0 - BODY_RADIUS + 1e-9);
                for other in &w.robots[i + 1..] {
                    prop_assert!(r.position.distance(other.position) >= 2.0 * BODY_RADIUS - 1e-9);
                }
            }
        }
    }

    #[test]
    fn every_bearing_has_exactly_one_sector(b in -10.0f64..10.0) {
        let s = lidar_sector(b);
        prop_assert!(s < LIDAR_SECTORS);
        let width = std::f64::consts::TAU / LIDAR_SECTORS as f64;
        let wrapped = b.rem_euclid(std::f64::consts::TAU);
        let claims = (0..LIDAR_SECTORS)
            .filter(|k| wrapped >= *k as f64 * width && wrapped < (*k + 1) as f64 * width)
            .count();
        prop_assert_eq!(claims, 1);
    }

    #[test]
    fn lidar_is_unchanged_by_a_quarter_turn_of_the_world(seed in 0u64..10_000, acts in actions(5)) {
        let mut w = spawn_world(open_arena(), 3, seed).unwrap();
        for step in &acts {
            w.step(step);
        }
        let c = Point::new(2.0, 2.0);
        let mut rotated = w.clone();
        for r in &mut rotated.robots {
            let d = r.position - c;
            r.position = c + Point::new(-d.y, d.x);
            r.heading += std::f64::consts::FRAC_PI_2;
        }
        for i in 0..3 {
            let a = sense(&w, i);
            let b = sense(&rotated, i);
            for k in 0..LIDAR_SECTORS {
                prop_assert!((a.lidar[k] - b.lidar[k]).abs() < 1e-9, "{:?} vs {:?}", a.lidar, b.lidar);
            }
        }
    }

    #[test]
    fn grouping_is_translation_invariant(
        pts in prop::collection::vec((0.0f64..4.0, 0.0f64..4.0), 3),
        dx in -10.0f64..10.0,
        dy in -10.0f64..10.0,
    ) {
        let a: Vec<Point> = pts.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let b: Vec<Point> = a.iter().map(|p| *p + Point::new(dx, dy)).collect();
        prop_assert!((grouping(&a) - grouping(&b)).abs() < 1e-12);
    }

    #[test]
    fn features_are_well_formed_over_an_episode(seed in 0u64..10_000, acts in actions(51), foraging in any::<bool>()) {
        let kind = if foraging { MissionKind::Foraging } else { MissionKind::FullSpeed };
        let mut w = spawn_world(kind.arena(), 3, seed).unwrap();
        let mut acc = FeatureAccumulator::new();
        let mut prev = acc.update(&w);
        for step in &acts {
            w.step(step);
            let f = acc.update(&w);
            let arr = f.to_array();
            prop_assert_eq!(arr.len(), FEATURE_DIM);
            prop_assert!(arr.iter().all(|v| v.is_finite()));
            prop_assert!(f.coverage.iter().all(|c| *c >= 0.0 && *c <= w.sim_time));
            for k in 0..4 {
                prop_assert!(f.color_visits[k] >= prev.color_visits[k]);
            }
            prop_assert_eq!(acc.transition_counts().iter().sum::<u64>(), acc.travel_count());
            // 1 m tiles on the 4 m arenas, row-major from the bottom-left
            let mut occupied = [false; 16];
            for r in &w.robots {
                let col = (r.position.x.floor() as usize).min(3);
                let row = (r.position.y.floor() as usize).min(3);
                occupied[row * 4 + col] = true;
                prop_assert_eq!(f.coverage[row * 4 + col], 0.0);
            }
            for t in 0..16 {
                if !occupied[t] {
                    prop_assert_eq!(f.coverage[t], prev.coverage[t] + 1.0);
                }
            }
            prev = f;
        }
    }

    #[test]
    fn features_do_not_depend_on_robot_order(seed in 0u64..10_000, acts in actions(30), perm in 0usize..6) {
        let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let order = orders[perm];
        let mut a = spawn_world(MissionKind::Foraging.arena(), 3, seed).unwrap();
        let mut b = a.clone();
        b.robots = order.iter().map(|&i| a.robots[i].clone()).collect();
        let (mut fa, mut fb) = (FeatureAccumulator::new(), FeatureAccumulator::new());
        fa.update(&a);
        fb.update(&b);
        for step in &acts {
            let permuted: Vec<Action> = order.iter().map(|&i| step[i]).collect();
            a.step(step);
            b.step(&permuted);
            // sequential contact resolution can depend on order; only compare
            // while the swarm is contact-free
            if a.robots.iter().chain(&b.robots).any(|r| r.bumper) {
                return Ok(());
            }
            let x = fa.update(&a).to_array();
            let y = fb.update(&b).to_array();
            for k in 0..FEATURE_DIM {
                prop_assert!((x[k] - y[k]).abs() < 1e-12, "dim {k}: {} vs {}", x[k], y[k]);
            }
        }
    }

    #[test]
    fn mission_returns_stay_in_range(seed in 0u64..10_000, acts in actions(51), k in 0usize..6) {
        let kind = MissionKind::ALL[k];
        let mut ep = Episode::new(MissionSpec::new(kind), seed).unwrap();
        for step in &acts {
            let out = ep.step(step);
            prop_assert!(out.reward.is_finite());
        }
        let ret = ep.total_reward();
        let max = 51.0 * MAX_LINEAR_VEL;
        match kind {
            MissionKind::StandingStill => prop_assert!((-max - 1e-9..=0.0).contains(&ret)),
            MissionKind::FullSpeed => prop_assert!((0.0..=max + 1e-9).contains(&ret)),
            MissionKind::ControlledSpeed => prop_assert!(ret <= 0.0),
            MissionKind::Foraging => prop_assert!(ret >= 0.0 && ret % 10.0 == 0.0),
            MissionKind::Aggregation => prop_assert!(ret > 0.0 && ret <= 51.0 / 0.05 + 1e-9),
            MissionKind::Dispersion => prop_assert!(ret < 0.0 && ret >= -51.0 / 0.05 - 1e-9),
        }
    }
}

#[test]
fn unvisited_tile_coverage_equals_sim_time() {
    let mut w = spawn_world(open_arena(), 3, 4).unwrap();
    let mut acc = FeatureAccumulator::new();
    acc.update(&w);
    for _ in 0..10 {
        w.step(&[Action::STOP; 3]);
        let f = acc.update(&w);
        // spawn zone is central; the corner tiles are never entered
        for corner in [0, 3, 12, 15] {
            assert_eq!(f.coverage[corner], w.sim_time);
        }
    }
}

#[test]
fn controlled_speed_is_zero_exactly_at_target_speed() {
    // Straight lines in opposite directions from the middle keep every
    // robot at 0.1 m/s with nothing to bump into.
    let mission = MissionSpec::new(MissionKind::ControlledSpeed);
    let mut ep = Episode::new(mission, 0).unwrap();
    let mut world = ep.world().clone();
    world.robots[0] = RobotState::at(Point::new(1.5, 0.5), 0.0);
    world.robots[1] = RobotState::at(Point::new(1.5, 2.0), 0.0);
    world.robots[2] = RobotState::at(Point::new(1.5, 3.5), 0.0);
    let mut acc = FeatureAccumulator::new();
    acc.update(&world);
    let steady = [Action::new(0.1, 0.0); 3];
    for _ in 0..20 {
        world.step(&steady);
        let f = acc.update(&world);
        let r = swarmgail_core::missions::reward(ep.mission(), &f, Default::default());
        assert!(r.abs() < 1e-12, "{r}");
    }
    let out = ep.step(&[Action::new(0.2, 0.0); 3]);
    assert!(out.reward < 0.0);
}
