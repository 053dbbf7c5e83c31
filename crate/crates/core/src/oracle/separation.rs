//! The 3to7 instance: solvable with an internal light, not with an external one.
//!
//! `r1` sits at 0 and `r2` at 1/4. Under FSTA `r2` walks until `r1` is 5/12
//! ahead, so `alpha_cw(r1, r2)` ends at 7/12. When the adversary stops `r2`
//! at 1/2 the two robots are antipodal and see nothing; with only external
//! lights their snapshots are then equal as values.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::angles::{alpha_cw, Angle, Position};
use crate::configuration::{Color, Configuration, PointInfo, RobotId};
use crate::leadership::{Model, Snapshot};
use crate::protocol::ThreeToSeven;
use crate::simulator::{observe, Command, Phase, Simulation};

use super::report::{Counterexample, PropertyReport};

const R1: RobotId = RobotId(0);
const R2: RobotId = RobotId(1);

/// How the adversary cuts `r2`'s moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Schedule {
    Rigid,
    /// Stop after every `j * delta` of progress.
    StopEvery { j: i64 },
    /// Stop exactly at 1/2, the antipode of `r1`.
    StopAtAntipode,
}

impl Schedule {
    pub fn label(&self) -> String {
        match self {
            Schedule::Rigid => "rigid".into(),
            Schedule::StopEvery { j } => format!("stop-every-{j}-delta"),
            Schedule::StopAtAntipode => "stop-at-antipode".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleOutcome {
    pub schedule: String,
    pub final_gap: Angle,
    pub r1_stationary: bool,
    /// Positions where `r2` was stopped before reaching its target.
    pub stops: Vec<Position>,
    pub steps: u64,
    pub commands: Vec<Command>,
}

impl ScheduleOutcome {
    pub fn ok(&self) -> bool {
        self.final_gap == Angle::frac(7, 12) && self.r1_stationary
    }
}

pub fn initial() -> Configuration {
    Configuration::from_positions([Position::zero(), Position::frac(1, 4)]).expect("two points")
}

/// Drives 3to7 under one schedule until `r2` reports it has arrived.
pub fn run_schedule(schedule: &Schedule, delta: &Angle) -> Result<ScheduleOutcome, String> {
    let mut sim = Simulation::new(Arc::new(ThreeToSeven), &initial(), delta.clone())
        .map_err(|e| e.to_string())?;
    let origin = sim.robot(R1).expect("r1").position.clone();
    let mut r1_stationary = true;
    let mut stops = Vec::new();
    let mut commands = Vec::new();
    let mut apply = |sim: &mut Simulation, cmd: Command| -> Result<(), String> {
        sim.step(&cmd).map_err(|e| format!("{cmd:?}: {e}"))?;
        commands.push(cmd);
        Ok(())
    };
    for _ in 0..200 {
        // r1 gets a turn before each of r2's
        apply(&mut sim, Command::Activate { robot: R1 })?;
        let r1 = sim.robot(R1).expect("r1");
        if r1.position != origin || !matches!(r1.phase, Phase::Idle) {
            r1_stationary = false;
        }
        apply(&mut sim, Command::Activate { robot: R2 })?;
        let Some(m) = sim.robot(R2).expect("r2").motion().cloned() else {
            let gap = alpha_cw(&sim.robot(R1).expect("r1").position, &sim.robot(R2).expect("r2").position);
            return Ok(ScheduleOutcome {
                schedule: schedule.label(),
                final_gap: gap,
                r1_stationary,
                stops,
                steps: sim.seq(),
                commands,
            });
        };
        let chunk = match schedule {
            Schedule::Rigid => m.remaining(),
            Schedule::StopEvery { j } => delta.scaled(*j, 1).ok_or("chunk exceeds a turn")?,
            Schedule::StopAtAntipode => {
                let here = &sim.robot(R2).expect("r2").position;
                let to_half = alpha_cw(here, &Position::frac(1, 2));
                if !to_half.is_zero() && to_half < m.remaining() {
                    to_half
                } else {
                    m.remaining()
                }
            }
        };
        apply(&mut sim, Command::Advance { robot: R2, amount: chunk })?;
        if sim.robot(R2).expect("r2").motion().is_some() {
            stops.push(sim.robot(R2).expect("r2").position.clone());
            apply(&mut sim, Command::StopMove { robot: R2 })?;
        }
    }
    Err(format!("{} did not finish", schedule.label()))
}

/// Equality of FCOM snapshots when `r2` has stopped at the antipode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FcomWitness {
    pub r2_at: Position,
    /// Light assignments `(r1, r2)` tried.
    pub assignments: usize,
    pub all_equal: bool,
    pub snapshot: Snapshot,
    /// Under FSTA the same state is told apart by `r2`'s own light.
    pub fsta_distinguishes: bool,
}

pub fn fcom_witness() -> FcomWitness {
    let p1 = Position::zero();
    let p2 = Position::frac(1, 2);
    let occ = |l1: Color, l2: Color| {
        let mut m = BTreeMap::new();
        m.insert(p1.clone(), PointInfo { count: 1, lights: [l1].into_iter().collect() });
        m.insert(p2.clone(), PointInfo { count: 1, lights: [l2].into_iter().collect() });
        m
    };
    let mut all_equal = true;
    let mut assignments = 0;
    let mut snapshot = None;
    for &l1 in Color::GATHERING_PALETTE {
        for &l2 in Color::GATHERING_PALETTE {
            assignments += 1;
            let o = occ(l1, l2);
            let s1 = observe(&o, &p1, l1, Model::Fcom);
            let s2 = observe(&o, &p2, l2, Model::Fcom);
            if s1 != s2 {
                all_equal = false;
            }
            snapshot.get_or_insert(s1);
        }
    }
    let o = occ(Color::Off, Color::Done);
    let fsta_distinguishes =
        observe(&o, &p1, Color::Off, Model::Fsta) != observe(&o, &p2, Color::Done, Model::Fsta);
    FcomWitness {
        r2_at: p2,
        assignments,
        all_equal,
        snapshot: snapshot.expect("palette is nonempty"),
        fsta_distinguishes,
    }
}

pub fn schedules() -> Vec<Schedule> {
    vec![
        Schedule::Rigid,
        Schedule::StopEvery { j: 1 },
        Schedule::StopEvery { j: 2 },
        Schedule::StopEvery { j: 3 },
        Schedule::StopAtAntipode,
    ]
}

/// All schedules at `delta = 1/24` plus the FCOM witness.
pub fn separation_scenario() -> PropertyReport {
    let start = Instant::now();
    let delta = Angle::frac(1, 24);
    let mut report = PropertyReport::new("separation_3to7");
    let mut failure = None;
    for s in schedules() {
        report.instances += 1;
        match run_schedule(&s, &delta) {
            Ok(o) => {
                let stops: Vec<String> = o.stops.iter().map(|p| p.to_string()).collect();
                report.stat(
                    &o.schedule,
                    format!(
                        "alpha_cw(r1, r2) = {}, r1 stationary: {}, stops at [{}]",
                        o.final_gap,
                        o.r1_stationary,
                        stops.join(", ")
                    ),
                );
                if matches!(s, Schedule::StopAtAntipode) && !o.stops.contains(&Position::frac(1, 2)) {
                    failure.get_or_insert(format!("{} never stopped at 1/2", o.schedule));
                }
                if !o.ok() {
                    failure.get_or_insert(format!(
                        "{}: final gap {}, r1 stationary {}",
                        o.schedule, o.final_gap, o.r1_stationary
                    ));
                }
            }
            Err(e) => {
                failure.get_or_insert(e);
            }
        }
    }
    let w = fcom_witness();
    report.instances += 1;
    report.stat(
        "fcom_witness",
        format!(
            "r2 at {}: snapshots equal under all {} light pairs: {}; snapshot = {}",
            w.r2_at,
            w.assignments,
            w.all_equal,
            serde_json::to_string(&w.snapshot).expect("snapshot serializes")
        ),
    );
    report.stat("fsta_distinguishes", w.fsta_distinguishes);
    if !w.all_equal {
        failure.get_or_insert("FCOM snapshots differ at the antipodal stop".into());
    }
    if !w.fsta_distinguishes {
        failure.get_or_insert("FSTA snapshots coincide at the antipodal stop".into());
    }
    if let Some(witness) = failure {
        report.counterexample =
            Some(Counterexample { instance: 0, config: initial().to_file(), witness, run: None });
    }
    report.wall_ms = start.elapsed().as_millis() as u64;
    report
}
