use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::protocol::{Gathering, MergePolicy, ThreeToSeven};

fn p(n: i64, d: i64) -> Position {
    Position::frac(n, d)
}

fn a(n: i64, d: i64) -> Angle {
    Angle::frac(n, d)
}

fn config(ps: &[Position]) -> Configuration {
    Configuration::from_positions(ps.iter().cloned()).unwrap()
}

fn gathering(ps: &[Position], delta: Angle) -> Simulation {
    Simulation::new(Arc::new(Gathering::default()), &config(ps), delta).unwrap()
}

const R0: RobotId = RobotId(0);
const R1: RobotId = RobotId(1);
const R2: RobotId = RobotId(2);

#[test]
fn lone_robot_walks_a_quarter() {
    let mut sim = gathering(&[p(1, 3)], a(1, 24));
    let r = sim.step(&Command::Activate { robot: R0 }).unwrap();
    assert_eq!(r.decisions[0].target, Some(p(7, 12)));
    let m = sim.robot(R0).unwrap().motion().unwrap();
    assert_eq!(m.planned, a(1, 4));
    assert_eq!(m.direction, Direction::Cw);
}

#[test]
fn advance_is_clamped_at_the_target() {
    let mut sim = gathering(&[p(0, 1), p(1, 5), p(1, 2)], a(1, 24));
    sim.step(&Command::Activate { robot: R0 }).unwrap();
    assert_eq!(sim.robot(R0).unwrap().light, Color::Cognizant);
    // past the target: stops exactly on r1 and forms a multiplicity
    let r = sim.step(&Command::Advance { robot: R0, amount: a(9, 10) }).unwrap();
    assert_eq!(sim.robot(R0).unwrap().position, p(1, 5));
    assert_eq!(r.arrived, Some(true));
    assert_eq!(r.formed_multiplicity, Some(p(1, 5)));
    assert!(r.primary);
    assert!(matches!(sim.robot(R0).unwrap().phase, Phase::Idle));
    assert_eq!(r.multiplicities, 1);
}

#[test]
fn stop_needs_delta_progress() {
    let mut sim = gathering(&[p(0, 1), p(1, 5), p(1, 2)], a(1, 50));
    sim.step(&Command::Activate { robot: R0 }).unwrap();
    sim.step(&Command::Advance { robot: R0, amount: a(1, 100) }).unwrap();
    let before = sim.state_hash();
    let seq = sim.seq();
    let e = sim.step(&Command::StopMove { robot: R0 }).unwrap_err();
    assert_eq!(e.reason(), "delta_floor");
    assert_eq!(sim.state_hash(), before);
    assert_eq!(sim.seq(), seq);
    assert!(!sim.can_stop(R0));
    sim.step(&Command::Advance { robot: R0, amount: a(1, 100) }).unwrap();
    assert!(sim.can_stop(R0));
    sim.step(&Command::StopMove { robot: R0 }).unwrap();
    assert_eq!(sim.robot(R0).unwrap().position, p(1, 50));
    assert!(sim.robot(R0).unwrap().is_activatable());
}

#[test]
fn short_moves_can_stop_at_their_end_only() {
    // planned arc below delta: the floor is the whole move
    let m = Motion {
        direction: Direction::Cw,
        origin: p(0, 1),
        target: p(1, 100),
        planned: a(1, 100),
        progress: Angle::zero(),
        paused: false,
        rule: Rule::CognizantMove,
        formation: true,
    };
    assert_eq!(m.floor(&a(1, 10)), a(1, 100));
}

#[test]
fn illegal_commands_are_rejected_without_change() {
    let mut sim = gathering(&[p(0, 1), p(1, 5), p(1, 2)], a(1, 24));
    let h = sim.state_hash();
    let cases = [
        (Command::Activate { robot: RobotId(9) }, "unknown_robot"),
        (Command::Advance { robot: R0, amount: a(1, 24) }, "not_moving"),
        (Command::StopMove { robot: R1 }, "not_moving"),
        (Command::ActivateGroup { robots: vec![] }, "empty_group"),
        (Command::ActivateGroup { robots: vec![R0, R0] }, "duplicate_robot"),
    ];
    for (cmd, reason) in cases {
        assert_eq!(sim.step(&cmd).unwrap_err().reason(), reason);
    }
    assert_eq!(sim.state_hash(), h);
    sim.step(&Command::Activate { robot: R0 }).unwrap();
    assert_eq!(sim.step(&Command::Activate { robot: R0 }).unwrap_err().reason(), "not_activatable");
    assert_eq!(
        sim.step(&Command::Advance { robot: R0, amount: Angle::zero() }).unwrap_err().reason(),
        "bad_amount"
    );
}

#[test]
fn contact_pauses_the_mover() {
    let mut sim = Simulation::unchecked(
        Arc::new(Gathering::default()),
        &config(&[p(0, 1), p(1, 5), p(1, 2)]),
        a(1, 24),
    );
    // hand-made motion past r1 so the obstacle, not the target, ends the advance
    sim.robots[0].phase = Phase::Moving(Motion {
        direction: Direction::Cw,
        origin: p(0, 1),
        target: p(3, 10),
        planned: a(3, 10),
        progress: Angle::zero(),
        paused: false,
        rule: Rule::CognizantMove,
        formation: true,
    });
    let r = sim.step(&Command::Advance { robot: R0, amount: a(1, 4) }).unwrap();
    assert_eq!(r.contact, Some(R1));
    assert_eq!(r.arrived, Some(false));
    assert_eq!(sim.robot(R0).unwrap().position, p(1, 5));
    assert!(sim.robot(R0).unwrap().motion().unwrap().paused);
    assert_eq!(sim.step(&Command::Advance { robot: R0, amount: a(1, 24) }).unwrap_err().reason(), "paused");
    assert!(sim.robot(R0).unwrap().is_activatable());
    assert_eq!(sim.multiplicity_points(), vec![p(1, 5)]);
}

#[test]
fn group_activation_looks_before_lights_change() {
    // all three compute from one look; only the leader moves
    let mut sim = gathering(&[p(0, 1), p(1, 5), p(1, 2)], a(1, 24));
    let r = sim.step(&Command::ActivateGroup { robots: vec![R0, R1, R2] }).unwrap();
    assert_eq!(r.decisions.len(), 3);
    assert_eq!(r.decisions[0].light, Some(Color::Cognizant));
    assert_eq!(sim.robot(R0).unwrap().light, Color::Cognizant);
    assert!(sim.robot(R0).unwrap().motion().is_some());
    assert!(sim.robot(R1).unwrap().motion().is_none());
}

#[test]
fn legal_commands_list_stop_points() {
    let mut sim = gathering(&[p(0, 1), p(1, 5), p(1, 2)], a(1, 24));
    sim.step(&Command::Activate { robot: R0 }).unwrap();
    let legal = sim.legal_commands();
    assert!(legal.contains(&LegalCommand::Advance { robot: R0, max_amount: a(1, 5), min_stop: p(1, 24) }));
    assert!(!legal.contains(&LegalCommand::StopMove { robot: R0 }));
    assert!(legal.contains(&LegalCommand::Activate { robot: R1 }));
}

#[test]
fn rejects_bad_setups() {
    let square = config(&[p(0, 1), p(1, 4), p(1, 2), p(3, 4)]);
    match Simulation::new(Arc::new(Gathering::default()), &square, a(1, 24)) {
        Err(SetupError::Config(ConfigError::Symmetric(r))) => assert_eq!(r, a(1, 4)),
        other => panic!("{other:?}"),
    }
    let ok = config(&[p(0, 1), p(1, 5), p(1, 2)]);
    assert!(matches!(
        Simulation::new(Arc::new(Gathering::default()), &ok, Angle::zero()),
        Err(SetupError::NonPositiveDelta)
    ));
    assert!(matches!(
        Simulation::new(Arc::new(ThreeToSeven), &ok, a(1, 24)),
        Err(SetupError::RobotCount { .. })
    ));
}

fn run_with(ps: &[Position], adv: &AdversarySpec, delta: Angle, seed: u64) -> RunResult {
    let mut sim = gathering(ps, delta);
    let mut adv = adv.build(ps.len(), seed);
    run(&mut sim, adv.as_mut(), &RunOptions { budget: None, record: true, hashes: true })
}

#[test]
fn three_robots_gather_under_round_robin() {
    let r = run_with(&[p(0, 1), p(1, 5), p(1, 2)], &AdversarySpec::RoundRobin, a(1, 24), 0);
    assert_eq!(r.outcome.label(), "gathered", "{:?}", r.outcome);
    assert!(r.monitors.violations.is_empty());
    assert_eq!(r.monitors.primary_formations, 1);
}

#[test]
fn every_builtin_adversary_gathers_the_example() {
    for adv in AdversarySpec::builtin_fair() {
        for seed in 0..5 {
            let r = run_with(&[p(0, 1), p(1, 5), p(1, 2)], &adv, a(1, 24), seed);
            assert!(matches!(r.outcome, Outcome::Gathered { .. }), "{} {seed}: {:?}", adv.label(), r.outcome);
            assert!(r.trace.unwrap().events.last().unwrap().annotations.gathered);
        }
    }
}

#[test]
fn two_robots_gather() {
    for seed in 0..10 {
        let adv = AdversarySpec::FairRandom { p_stop: 0.5, window: None };
        let r = run_with(&[p(0, 1), p(1, 4)], &adv, a(1, 60), seed);
        assert!(matches!(r.outcome, Outcome::Gathered { .. }), "{:?}", r.outcome);
    }
}

#[test]
fn trace_replays_to_identical_hashes() {
    let adv = AdversarySpec::AntipodalHunter { window: None };
    let r = run_with(&[p(0, 1), p(1, 7), p(3, 7), p(1, 2)], &adv, a(1, 48), 3);
    let trace = r.trace.unwrap();
    let text = trace.to_jsonl();
    let back = Trace::read_jsonl(text.as_bytes()).unwrap();
    assert_eq!(back, trace);
    let sim = back.replay().unwrap();
    assert_eq!(sim.state_hash(), r.final_hash);
    // a tampered hash is caught at its step
    let mut bad = back.clone();
    bad.events[2].hash = "00".into();
    assert!(matches!(bad.replay(), Err(TraceError::Diverged { seq: 3 })));
}

#[test]
fn freeze_on_crowd_can_deadlock() {
    // the literal rule leaves three multiplicities frozen forever
    let ps: Vec<Position> = [5, 18, 23, 29, 34, 44, 48, 49].iter().map(|&k| p(k, 60)).collect();
    let mut frozen = 0;
    let mut nearest = 0;
    for seed in 0..40 {
        for (policy, count) in [(MergePolicy::FreezeOnCrowd, &mut frozen), (MergePolicy::Nearest, &mut nearest)] {
            let proto = Arc::new(Gathering::new(Model::Fcom, policy));
            let mut sim = Simulation::new(proto, &config(&ps), a(1, 60)).unwrap();
            let mut adv = AdversarySpec::builtin_fair()[seed % 5].build(ps.len(), seed as u64);
            let r = run(&mut sim, adv.as_mut(), &RunOptions::default());
            if matches!(r.outcome, Outcome::Gathered { .. }) {
                *count += 1;
            }
        }
    }
    assert_eq!(nearest, 40);
    assert!(frozen < 40, "freeze-on-crowd gathered every time");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Moves never pass through another robot, so the cyclic order of
    /// robots at distinct points is preserved.
    #[test]
    fn robots_never_cross(ks in proptest::collection::btree_set(0i64..48, 3..7), seed in 0u64..1000) {
        let ring: Vec<Position> = ks.iter().map(|&k| p(k, 48)).collect();
        let cfg = config(&ring);
        prop_assume!(cfg.validate_initial().is_ok());
        let mut sim = Simulation::new(Arc::new(Gathering::default()), &cfg, a(1, 48)).unwrap();
        let mut adv = AdversarySpec::AntipodalHunter { window: None }.build(ring.len(), seed);
        let order = |sim: &Simulation| {
            let mut rs: Vec<(Position, RobotId)> =
                sim.robots().iter().map(|r| (r.position.clone(), r.id)).collect();
            rs.sort();
            rs.into_iter().map(|(_, id)| id).collect::<Vec<_>>()
        };
        let cyclic_eq = |a: &[RobotId], b: &[RobotId]| {
            (0..a.len()).any(|s| a.iter().cycle().skip(s).take(a.len()).eq(b.iter()))
        };
        let start = order(&sim);
        for _ in 0..3000 {
            if sim.is_gathered() {
                break;
            }
            let Some(cmd) = adv.next_command(&sim) else { break };
            sim.step(&cmd).unwrap();
            if sim.multiplicity_points().is_empty() {
                prop_assert!(cyclic_eq(&start, &order(&sim)));
            } else {
                break;
            }
        }
    }
}
