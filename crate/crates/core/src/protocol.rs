//! Compute functions: snapshot in, action out.
//!
//! Two protocols are provided. [`Gathering`] is the six-color FCOM gathering
//! algorithm; [`ThreeToSeven`] is the two-state FSTA solution of the 3to7
//! problem. Both are pure: no state survives between calls except what the
//! simulator stores in the robot's light.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::angles::{antipode, in_interval_cw_half_open, Angle, Position};
use crate::configuration::{Color, Occupancy};
use crate::leadership::{classify, LeaderClass, Model, Snapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Cw,
    Ccw,
}

/// A planned traversal: direction and arc length, in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub direction: Direction,
    pub arc: Angle,
}

impl Move {
    pub fn cw(arc: Angle) -> Self {
        Move { direction: Direction::Cw, arc }
    }

    pub fn ccw(arc: Angle) -> Self {
        Move { direction: Direction::Ccw, arc }
    }

    /// Destination relative to the mover, as a clockwise offset.
    pub fn cw_offset(&self) -> Angle {
        match self.direction {
            Direction::Cw => self.arc.clone(),
            Direction::Ccw => self.arc.complement(),
        }
    }

    pub fn target_from(&self, p: &Position) -> Position {
        match self.direction {
            Direction::Cw => p.cw(&self.arc),
            Direction::Ccw => p.ccw(&self.arc),
        }
    }
}

/// Which branch of a protocol produced an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Nothing visible: walk a quarter turn.
    Lonely,
    /// Nothing visible while at a multiplicity: stay.
    Resting,
    CognizantMove,
    UndecidedMove,
    RequestVerify,
    LeaderAbsentMove,
    LeaderPresentReset,
    /// Undecided with an unsafe neighbor, and nothing applies.
    UndecidedWait,
    ReportPresent,
    ReportAbsent,
    FollowerIdle,
    /// Leadership is undefined for the view.
    Unclassifiable,
    JoinMultiplicity,
    SingleIdle,
    MergeMultiplicity,
    MultiplicityIdle,
    StartWalk,
    AdjustWalk,
    BlindStep,
    Arrived,
    Waiting,
}

impl Rule {
    /// Rules that move a robot as a leader, before any multiplicity exists.
    pub fn is_leader_move(self) -> bool {
        matches!(self, Rule::CognizantMove | Rule::UndecidedMove | Rule::LeaderAbsentMove)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Action {
    pub set_light: Option<Color>,
    pub movement: Option<Move>,
    pub rule: Rule,
    /// Leadership class of the observer when the rule consulted it.
    pub classification: Option<LeaderClass>,
}

impl Action {
    fn idle(rule: Rule) -> Self {
        Action { set_light: None, movement: None, rule, classification: None }
    }

    fn with(rule: Rule, set_light: Option<Color>, movement: Option<Move>) -> Self {
        Action { set_light, movement, rule, classification: None }
    }

    fn classified(mut self, class: LeaderClass) -> Self {
        self.classification = Some(class);
        self
    }

    pub fn is_noop(&self) -> bool {
        self.set_light.is_none() && self.movement.is_none()
    }
}

pub trait Protocol: Send + Sync {
    fn kind(&self) -> ProtocolKind;
    fn model(&self) -> Model;
    fn palette(&self) -> &'static [Color];
    fn initial_light(&self) -> Color {
        Color::Off
    }
    fn compute(&self, snap: &Snapshot) -> Action;
}

/// Behavior of a robot at a multiplicity that sees other multiplicities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergePolicy {
    /// Head for the nearest clockwise multiplicity closer than a half turn.
    #[default]
    Nearest,
    /// Move only when exactly one other multiplicity is visible; freeze on
    /// three or more.
    FreezeOnCrowd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gathering {
    model: Model,
    merge: MergePolicy,
}

impl Default for Gathering {
    fn default() -> Self {
        Gathering { model: Model::Fcom, merge: MergePolicy::Nearest }
    }
}

impl Gathering {
    /// `model` must show other robots' lights (FCOM or LUMI).
    pub fn new(model: Model, merge: MergePolicy) -> Self {
        assert!(model.sees_lights(), "gathering needs visible lights");
        Gathering { model, merge }
    }

    pub fn merge_policy(&self) -> MergePolicy {
        self.merge
    }

    fn leadership_step(&self, snap: &Snapshot) -> Action {
        let class = match classify(snap) {
            Ok(c) => c,
            Err(_) => return Action::idle(Rule::Unclassifiable),
        };
        let entries = snap.entries();
        let cw = &entries[0];
        let to_cw = || Some(Move::cw(cw.offset.clone()));
        let action = match class {
            LeaderClass::CognizantLeader => {
                Action::with(Rule::CognizantMove, Some(Color::Cognizant), to_cw())
            }
            LeaderClass::UndecidedLeader { safe_neighbor: true, .. } => {
                Action::with(Rule::UndecidedMove, Some(Color::Undecided), to_cw())
            }
            LeaderClass::UndecidedLeader { safe_neighbor: false, c0_has_other_undecided: false } => {
                if cw.lights.contains(&Color::Off) {
                    Action::with(Rule::RequestVerify, Some(Color::Verify), None)
                } else if cw.lights.contains(&Color::LeaderAbsent) {
                    Action::with(Rule::LeaderAbsentMove, Some(Color::Cognizant), to_cw())
                } else if cw.lights.contains(&Color::LeaderPresent) {
                    Action::with(Rule::LeaderPresentReset, Some(Color::Off), None)
                } else {
                    Action::idle(Rule::UndecidedWait)
                }
            }
            LeaderClass::UndecidedLeader { .. } => Action::idle(Rule::UndecidedWait),
            LeaderClass::Follower => {
                let ccw = &entries[entries.len() - 1];
                if ccw.lights.contains(&Color::Verify) {
                    let origin = Position::zero();
                    let s = antipode(&origin);
                    let s0 = antipode(&origin.cw(&ccw.offset));
                    let present = entries
                        .iter()
                        .any(|e| in_interval_cw_half_open(&origin.cw(&e.offset), &s0, &s));
                    if present {
                        Action::with(Rule::ReportPresent, Some(Color::LeaderPresent), None)
                    } else {
                        Action::with(Rule::ReportAbsent, Some(Color::LeaderAbsent), None)
                    }
                } else {
                    Action::idle(Rule::FollowerIdle)
                }
            }
        };
        action.classified(class)
    }

    fn single_near_multiplicity(&self, snap: &Snapshot) -> Action {
        let entries = snap.entries();
        let cw = &entries[0];
        let ccw = &entries[entries.len() - 1];
        let cw_dist = cw.offset.clone();
        let ccw_dist = ccw.offset.complement();
        let cw_ok = cw.occupancy == Occupancy::Mult;
        let ccw_ok = ccw.occupancy == Occupancy::Mult;
        let movement = match (cw_ok, ccw_ok) {
            (true, true) if ccw_dist < cw_dist => Move::ccw(ccw_dist),
            (true, _) => Move::cw(cw_dist),
            (false, true) => Move::ccw(ccw_dist),
            (false, false) => return Action::idle(Rule::SingleIdle),
        };
        Action::with(Rule::JoinMultiplicity, None, Some(movement))
    }

    fn at_multiplicity(&self, snap: &Snapshot) -> Action {
        let half = Angle::half();
        let others: Vec<&Angle> = snap
            .entries()
            .iter()
            .filter(|e| e.occupancy == Occupancy::Mult)
            .map(|e| &e.offset)
            .collect();
        let target = match self.merge {
            MergePolicy::Nearest => others.first().filter(|d| ***d < half),
            MergePolicy::FreezeOnCrowd if others.len() == 1 => others.first().filter(|d| ***d < half),
            MergePolicy::FreezeOnCrowd => None,
        };
        match target {
            Some(d) => Action::with(Rule::MergeMultiplicity, None, Some(Move::cw((*d).clone()))),
            None => Action::idle(Rule::MultiplicityIdle),
        }
    }
}

impl Protocol for Gathering {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::GatheringFcom
    }

    fn model(&self) -> Model {
        self.model
    }

    fn palette(&self) -> &'static [Color] {
        Color::GATHERING_PALETTE
    }

    fn compute(&self, snap: &Snapshot) -> Action {
        let at_mult = snap.self_occupancy() == Occupancy::Mult;
        if snap.is_empty() {
            if at_mult {
                return Action::idle(Rule::Resting);
            }
            return Action::with(Rule::Lonely, None, Some(Move::cw(Angle::quarter())));
        }
        if at_mult {
            self.at_multiplicity(snap)
        } else if snap.any_multiplicity() {
            self.single_near_multiplicity(snap)
        } else {
            self.leadership_step(snap)
        }
    }
}

/// Two-state solution of 3to7: the robot that sees its partner at three
/// quarters of a turn walks until the partner is 5/12 of a turn ahead.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ThreeToSeven;

impl ThreeToSeven {
    /// Final clockwise distance from the walker to its partner.
    pub fn goal_gap() -> Angle {
        Angle::frac(5, 12)
    }
}

impl Protocol for ThreeToSeven {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::ThreeToSevenFsta
    }

    fn model(&self) -> Model {
        Model::Fsta
    }

    fn palette(&self) -> &'static [Color] {
        Color::THREE_TO_SEVEN_PALETTE
    }

    fn compute(&self, snap: &Snapshot) -> Action {
        let seen = snap.entries().first().map(|e| &e.offset);
        match snap.own_light() {
            Some(Color::Done) => match seen {
                None => Action::with(Rule::BlindStep, None, Some(Move::cw(Angle::frac(1, 12)))),
                Some(d) if *d == Self::goal_gap() => Action::idle(Rule::Arrived),
                Some(d) => {
                    let arc = Position::zero().cw(d).ccw(&Self::goal_gap());
                    let arc = Angle::from_rational(arc.value().clone()).expect("position is an angle");
                    Action::with(Rule::AdjustWalk, None, Some(Move::cw(arc)))
                }
            },
            _ => match seen {
                Some(d) if *d == Angle::frac(3, 4) => Action::with(
                    Rule::StartWalk,
                    Some(Color::Done),
                    Some(Move::cw(Angle::frac(1, 3))),
                ),
                _ => Action::idle(Rule::Waiting),
            },
        }
    }
}

/// Protocol names as used in files and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolKind {
    #[serde(rename = "gathering-fcom")]
    GatheringFcom,
    #[serde(rename = "3to7-fsta")]
    ThreeToSevenFsta,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::GatheringFcom => "gathering-fcom",
            ProtocolKind::ThreeToSevenFsta => "3to7-fsta",
        }
    }

    pub fn build(self) -> Box<dyn Protocol> {
        match self {
            ProtocolKind::GatheringFcom => Box::new(Gathering::default()),
            ProtocolKind::ThreeToSevenFsta => Box::new(ThreeToSeven),
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown protocol {0:?}; expected gathering-fcom or 3to7-fsta")]
pub struct UnknownProtocol(pub String);

impl FromStr for ProtocolKind {
    type Err = UnknownProtocol;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gathering-fcom" => Ok(ProtocolKind::GatheringFcom),
            "3to7-fsta" => Ok(ProtocolKind::ThreeToSevenFsta),
            other => Err(UnknownProtocol(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::leadership::SnapshotEntry;

    fn a(n: i64, d: i64) -> Angle {
        Angle::frac(n, d)
    }

    fn entry(off: Angle, occ: Occupancy, light: Color) -> SnapshotEntry {
        SnapshotEntry { offset: off, occupancy: occ, lights: [light].into_iter().collect() }
    }

    fn fcom(self_occ: Occupancy, entries: Vec<SnapshotEntry>) -> Snapshot {
        Snapshot::new(Model::Fcom, self_occ, None, entries).unwrap()
    }

    fn singles(offs: &[(i64, i64, Color)]) -> Snapshot {
        fcom(
            Occupancy::Single,
            offs.iter().map(|&(n, d, c)| entry(a(n, d), Occupancy::Single, c)).collect(),
        )
    }

    fn fsta(own: Color, offs: &[(i64, i64)]) -> Snapshot {
        let entries = offs
            .iter()
            .map(|&(n, d)| SnapshotEntry {
                offset: a(n, d),
                occupancy: Occupancy::Single,
                lights: BTreeSet::new(),
            })
            .collect();
        Snapshot::new(Model::Fsta, Occupancy::Single, Some(own), entries).unwrap()
    }

    #[test]
    fn lone_robot_walks_a_quarter() {
        let act = Gathering::default().compute(&singles(&[]));
        assert_eq!(act.movement, Some(Move::cw(a(1, 4))));
        assert_eq!(act.set_light, None);
        let act = Gathering::default().compute(&fcom(Occupancy::Mult, vec![]));
        assert!(act.is_noop());
    }

    #[test]
    fn cognizant_and_undecided_moves() {
        let g = Gathering::default();
        let act = g.compute(&singles(&[(1, 5, Color::Off)]));
        assert_eq!(act.rule, Rule::CognizantMove);
        assert_eq!(act.set_light, Some(Color::Cognizant));
        assert_eq!(act.movement, Some(Move::cw(a(1, 5))));

        let act = g.compute(&singles(&[(1, 5, Color::Off), (9, 20, Color::Off)]));
        assert_eq!(act.rule, Rule::UndecidedMove);
        assert_eq!(act.set_light, Some(Color::Undecided));
        assert_eq!(act.movement, Some(Move::cw(a(1, 5))));

        // C1 is the square; 3/4 leads C0, so the observer follows
        let act = g.compute(&singles(&[(1, 4, Color::Off), (3, 4, Color::Off)]));
        assert_eq!(act.classification, Some(LeaderClass::Follower));
        assert!(act.is_noop());
    }

    #[test]
    fn follower_reports_on_verify() {
        let g = Gathering::default();
        let act = g.compute(&singles(&[(2, 5, Color::Off), (9, 10, Color::Verify)]));
        assert_eq!(act.classification, Some(LeaderClass::Follower));
        assert_eq!(act.set_light, Some(Color::LeaderPresent));
        assert_eq!(act.movement, None);

        // nothing in [3/5, 1/2) once the third robot sits at 3/10
        let act = g.compute(&singles(&[(3, 10, Color::Off), (9, 10, Color::Verify)]));
        assert_eq!(act.classification, Some(LeaderClass::Follower));
        assert_eq!(act.set_light, Some(Color::LeaderAbsent));
    }

    #[test]
    fn single_joins_closer_multiplicity() {
        let g = Gathering::default();
        let snap = fcom(
            Occupancy::Single,
            vec![
                entry(a(1, 5), Occupancy::Mult, Color::Off),
                entry(a(9, 10), Occupancy::Mult, Color::Off),
            ],
        );
        assert_eq!(g.compute(&snap).movement, Some(Move::ccw(a(1, 10))));
        let tie = fcom(
            Occupancy::Single,
            vec![
                entry(a(1, 10), Occupancy::Mult, Color::Off),
                entry(a(9, 10), Occupancy::Mult, Color::Off),
            ],
        );
        assert_eq!(g.compute(&tie).movement, Some(Move::cw(a(1, 10))));
        let far = fcom(
            Occupancy::Single,
            vec![
                entry(a(1, 10), Occupancy::Single, Color::Off),
                entry(a(2, 5), Occupancy::Mult, Color::Off),
                entry(a(9, 10), Occupancy::Single, Color::Off),
            ],
        );
        assert!(g.compute(&far).is_noop());
    }

    #[test]
    fn multiplicity_merging() {
        let g = Gathering::default();
        let snap = fcom(Occupancy::Mult, vec![entry(a(3, 10), Occupancy::Mult, Color::Off)]);
        assert_eq!(g.compute(&snap).movement, Some(Move::cw(a(3, 10))));
        let back = fcom(Occupancy::Mult, vec![entry(a(7, 10), Occupancy::Mult, Color::Off)]);
        assert!(g.compute(&back).is_noop());

        let crowd = fcom(
            Occupancy::Mult,
            vec![
                entry(a(1, 10), Occupancy::Mult, Color::Off),
                entry(a(3, 10), Occupancy::Mult, Color::Off),
            ],
        );
        assert_eq!(g.compute(&crowd).movement, Some(Move::cw(a(1, 10))));
        let frozen = Gathering::new(Model::Fcom, MergePolicy::FreezeOnCrowd);
        assert!(frozen.compute(&crowd).is_noop());
    }

    #[test]
    fn lumi_own_light_is_ignored() {
        let g = Gathering::new(Model::Lumi, MergePolicy::Nearest);
        let mk = |own| {
            Snapshot::new(
                Model::Lumi,
                Occupancy::Single,
                Some(own),
                vec![entry(a(1, 5), Occupancy::Single, Color::Off)],
            )
            .unwrap()
        };
        let base = g.compute(&mk(Color::Off));
        for &c in Color::GATHERING_PALETTE {
            assert_eq!(g.compute(&mk(c)), base);
        }
    }

    #[test]
    fn three_to_seven_rules() {
        let p = ThreeToSeven;
        let act = p.compute(&fsta(Color::Off, &[(3, 4)]));
        assert_eq!(act.set_light, Some(Color::Done));
        assert_eq!(act.movement, Some(Move::cw(a(1, 3))));

        let act = p.compute(&fsta(Color::Done, &[(7, 12)]));
        assert_eq!(act.movement, Some(Move::cw(a(1, 6))));
        assert_eq!(act.set_light, None);

        let act = p.compute(&fsta(Color::Done, &[]));
        assert_eq!(act.movement, Some(Move::cw(a(1, 12))));

        assert!(p.compute(&fsta(Color::Done, &[(5, 12)])).is_noop());
        // the partner, seeing the walker a quarter turn ahead, stays put
        assert!(p.compute(&fsta(Color::Off, &[(1, 4)])).is_noop());
        assert!(p.compute(&fsta(Color::Off, &[])).is_noop());
    }

    #[test]
    fn protocol_names_round_trip() {
        for k in [ProtocolKind::GatheringFcom, ProtocolKind::ThreeToSevenFsta] {
            assert_eq!(k.name().parse::<ProtocolKind>().unwrap(), k);
            assert_eq!(k.build().kind(), k);
        }
        assert!("gathering".parse::<ProtocolKind>().is_err());
    }
}
