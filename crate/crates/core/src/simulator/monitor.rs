//! Online safety checks, evaluated after every position change.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::angles::{is_antipodal, Position};
use crate::configuration::{PointInfo, PointSet, RobotId};
use crate::leadership::role_in;
use crate::protocol::{Direction, ProtocolKind};

use super::{Phase, RobotState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// More than two multiplicities created by formation-phase leader moves.
    TooManyPrimaryMultiplicities,
    /// Two multiplicity points exist at antipodal positions.
    AntipodalMultiplicities,
    /// Expected-leader count outside `1..=2` in an asymmetric state.
    ExpectedLeaderCount,
    /// A gathered robot would move when activated.
    LeftGathering,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub seq: u64,
    pub kind: ViolationKind,
    pub detail: String,
}

/// Aggregate statistics of a run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonitorReport {
    /// Multiplicity points created at all.
    pub formations: u32,
    /// Multiplicities created by leader moves computed while the whole
    /// configuration was multiplicity-free.
    pub primary_formations: u32,
    pub primary_points: Vec<Position>,
    /// Multiplicities created by leader moves of a robot whose only blind
    /// spot hid every existing multiplicity.
    pub blind_leader_formations: u32,
    pub max_simultaneous: usize,
    pub max_expected_leaders: usize,
    /// Multiplicity-free states that were rotationally symmetric.
    pub symmetric_states: u32,
    /// Contacts between two robots moving towards each other.
    pub head_on: u32,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone)]
pub(super) struct Monitors {
    kind: ProtocolKind,
    report: MonitorReport,
}

impl Monitors {
    pub(super) fn new(kind: ProtocolKind, robots: &[RobotState]) -> Self {
        let mut m = Monitors { kind, report: MonitorReport::default() };
        if kind == ProtocolKind::GatheringFcom {
            let points = points_of(robots);
            if let Ok(set) = PointSet::new(points) {
                if set.len() == robots.len() {
                    // start state: record the leader count, no violation possible here
                    let _ = m.check_leaders(0, &set);
                }
            }
        }
        m
    }

    pub(super) fn report(&self) -> MonitorReport {
        self.report.clone()
    }

    pub(super) fn after_move(
        &mut self,
        seq: u64,
        robots: &[RobotState],
        mover: usize,
        occ: &BTreeMap<Position, PointInfo>,
        formed: bool,
        primary: bool,
        contact: Option<RobotId>,
        direction: Direction,
    ) -> Vec<Violation> {
        if self.kind != ProtocolKind::GatheringFcom {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mults: Vec<&Position> =
            occ.iter().filter(|(_, i)| i.count >= 2).map(|(p, _)| p).collect();
        self.report.max_simultaneous = self.report.max_simultaneous.max(mults.len());
        let m = &robots[mover];
        if formed {
            self.report.formations += 1;
            if !primary && m.last_rule.is_some_and(|r| r.is_leader_move()) {
                self.report.blind_leader_formations += 1;
            }
            if primary {
                self.report.primary_formations += 1;
                self.report.primary_points.push(m.position.clone());
                if self.report.primary_formations > 2 {
                    out.push(Violation {
                        seq,
                        kind: ViolationKind::TooManyPrimaryMultiplicities,
                        detail: format!(
                            "formation-phase leader moves formed multiplicities at {:?}",
                            self.report.primary_points
                        ),
                    });
                }
            }
        }
        if let Some(c) = contact {
            let other = robots.iter().find(|r| r.id == c).expect("contact exists");
            if let Phase::Moving(om) = &other.phase {
                if !om.paused && om.direction != direction {
                    self.report.head_on += 1;
                }
            }
        }
        for (i, a) in mults.iter().enumerate() {
            for b in &mults[i + 1..] {
                if is_antipodal(a, b) {
                    out.push(Violation {
                        seq,
                        kind: ViolationKind::AntipodalMultiplicities,
                        detail: format!("multiplicities at {a} and {b}"),
                    });
                }
            }
        }
        if mults.is_empty() {
            let set = PointSet::new(points_of(robots)).expect("distinct points");
            if let Some(v) = self.check_leaders(seq, &set) {
                out.push(v);
            }
        }
        self.report.violations.extend(out.iter().cloned());
        out
    }

    fn check_leaders(&mut self, seq: u64, set: &PointSet) -> Option<Violation> {
        if set.is_rotationally_symmetric() {
            self.report.symmetric_states += 1;
            return None;
        }
        let mut count = 0;
        for p in set.points() {
            if role_in(set, p).map(|r| r.is_expected_leader()).unwrap_or(false) {
                count += 1;
            }
        }
        self.report.max_expected_leaders = self.report.max_expected_leaders.max(count);
        if count == 0 || count > 2 {
            return Some(Violation {
                seq,
                kind: ViolationKind::ExpectedLeaderCount,
                detail: format!("{count} expected leaders in {:?}", set.points()),
            });
        }
        None
    }

    pub(super) fn left_gathering(&mut self, seq: u64) -> Violation {
        let v = Violation {
            seq,
            kind: ViolationKind::LeftGathering,
            detail: "a robot at the gathering point computed a move".into(),
        };
        self.report.violations.push(v.clone());
        v
    }
}

fn points_of(robots: &[RobotState]) -> Vec<Position> {
    robots.iter().map(|r| r.position.clone()).collect()
}
