//! Local-view reasoning about leadership.
//!
//! A robot never sees its antipodal point, so from its snapshot it can only
//! narrow the global configuration down to two candidates: `C0`, with the
//! antipode empty, and `C1`, with the antipode occupied. Classification asks
//! in which of the candidates that are not rotationally symmetric the
//! observer is the true leader. Lights play no part in it.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::angles::{alpha_cw, antipode, Angle, Position};
use crate::configuration::{Color, ConfigError, Occupancy, PointSet};

/// Robot capability model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Model {
    /// External light only.
    Fcom,
    /// Internal light only.
    Fsta,
    /// Both.
    Lumi,
    /// Neither.
    Oblot,
}

impl Model {
    pub fn sees_lights(self) -> bool {
        matches!(self, Model::Fcom | Model::Lumi)
    }

    pub fn reads_own_light(self) -> bool {
        matches!(self, Model::Fsta | Model::Lumi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SnapshotEntry {
    /// Clockwise distance from the observer, in `(0, 1)` and never `1/2`.
    pub offset: Angle,
    pub occupancy: Occupancy,
    /// Distinct lights at the point; empty when the model hides lights.
    pub lights: BTreeSet<Color>,
}

/// One robot's view, expressed relative to itself at offset zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Snapshot {
    entries: Vec<SnapshotEntry>,
    self_occupancy: Occupancy,
    model: Model,
    own_light: Option<Color>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SnapshotError {
    #[error("entry offset {0} outside the open interval (0, 1)")]
    OffsetRange(Angle),
    #[error("entry at the invisible antipodal offset 1/2")]
    AntipodeVisible,
    #[error("entries not strictly increasing at offset {0}")]
    Unsorted(Angle),
    #[error("entry at offset {0} has no light under a light-sharing model")]
    MissingLights(Angle),
    #[error("entry at offset {0} carries lights under a model that hides them")]
    UnexpectedLights(Angle),
    #[error("own light must be present exactly when the model lets a robot read it")]
    OwnLight,
}

impl Snapshot {
    pub fn new(
        model: Model,
        self_occupancy: Occupancy,
        own_light: Option<Color>,
        entries: Vec<SnapshotEntry>,
    ) -> Result<Self, SnapshotError> {
        if own_light.is_some() != model.reads_own_light() {
            return Err(SnapshotError::OwnLight);
        }
        let half = Angle::half();
        let mut prev: Option<&Angle> = None;
        for e in &entries {
            if e.offset.is_zero() || e.offset == Angle::full() {
                return Err(SnapshotError::OffsetRange(e.offset.clone()));
            }
            if e.offset == half {
                return Err(SnapshotError::AntipodeVisible);
            }
            if let Some(p) = prev {
                if *p >= e.offset {
                    return Err(SnapshotError::Unsorted(e.offset.clone()));
                }
            }
            if model.sees_lights() && e.lights.is_empty() {
                return Err(SnapshotError::MissingLights(e.offset.clone()));
            }
            if !model.sees_lights() && !e.lights.is_empty() {
                return Err(SnapshotError::UnexpectedLights(e.offset.clone()));
            }
            prev = Some(&e.offset);
        }
        Ok(Snapshot { entries, self_occupancy, model, own_light })
    }

    /// A lights-free FCOM snapshot of single robots, mostly for tests.
    pub fn fcom_singles(offsets: &[Angle]) -> Self {
        let mut offsets = offsets.to_vec();
        offsets.sort();
        let entries = offsets
            .into_iter()
            .map(|offset| SnapshotEntry {
                offset,
                occupancy: Occupancy::Single,
                lights: [Color::Off].into_iter().collect(),
            })
            .collect();
        Snapshot::new(Model::Fcom, Occupancy::Single, None, entries).expect("valid offsets")
    }

    pub fn entries(&self) -> &[SnapshotEntry] {
        &self.entries
    }

    pub fn self_occupancy(&self) -> Occupancy {
        self.self_occupancy
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn own_light(&self) -> Option<Color> {
        self.own_light
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn offsets(&self) -> Vec<Angle> {
        self.entries.iter().map(|e| e.offset.clone()).collect()
    }

    pub fn any_multiplicity(&self) -> bool {
        self.self_occupancy == Occupancy::Mult
            || self.entries.iter().any(|e| e.occupancy == Occupancy::Mult)
    }

    /// First visible robot clockwise.
    pub fn cw_neighbor(&self) -> Option<&SnapshotEntry> {
        self.entries.first()
    }

    /// First visible robot counterclockwise.
    pub fn ccw_neighbor(&self) -> Option<&SnapshotEntry> {
        self.entries.last()
    }
}

/// Positional role, without the extra facts Algorithm-level decisions need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Cognizant,
    Undecided,
    Follower,
}

impl Role {
    pub fn is_expected_leader(self) -> bool {
        !matches!(self, Role::Follower)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum LeaderClass {
    CognizantLeader,
    UndecidedLeader { safe_neighbor: bool, c0_has_other_undecided: bool },
    Follower,
}

impl LeaderClass {
    pub fn role(self) -> Role {
        match self {
            LeaderClass::CognizantLeader => Role::Cognizant,
            LeaderClass::UndecidedLeader { .. } => Role::Undecided,
            LeaderClass::Follower => Role::Follower,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LeadershipError {
    #[error("a multiplicity point is visible; leadership is undefined")]
    MultiplicityVisible,
    #[error("both hypothetical configurations are rotationally symmetric")]
    BothSymmetric,
    #[error("observer is not an undecided leader")]
    NotUndecided,
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Offsets of every point `observer` can see in `points`.
pub fn view_from(points: &PointSet, observer: &Position) -> Vec<Angle> {
    let half = Angle::half();
    let mut offsets: Vec<Angle> = points
        .points()
        .iter()
        .filter(|q| *q != observer)
        .map(|q| alpha_cw(observer, q))
        .filter(|d| *d != half)
        .collect();
    offsets.sort();
    offsets
}

/// `C0` and `C1` built from visible offsets, observer at position zero.
pub fn hypothetical_from_offsets(offsets: &[Angle]) -> (PointSet, PointSet) {
    let origin = Position::zero();
    let c0 = PointSet::new(
        std::iter::once(origin.clone()).chain(offsets.iter().map(|o| origin.cw(o))),
    )
    .expect("offsets are distinct and nonzero");
    let c1 = c0.with_point(antipode(&origin)).expect("antipode never in a view");
    (c0, c1)
}

pub fn hypothetical_configs(snap: &Snapshot) -> Result<(PointSet, PointSet), LeadershipError> {
    if snap.any_multiplicity() {
        return Err(LeadershipError::MultiplicityVisible);
    }
    Ok(hypothetical_from_offsets(&snap.offsets()))
}

/// The possible global configurations consistent with a view.
struct Candidates {
    c0: PointSet,
    c1: PointSet,
    c0_possible: bool,
    c1_possible: bool,
}

impl Candidates {
    fn from_offsets(offsets: &[Angle]) -> Result<Self, LeadershipError> {
        let (c0, c1) = hypothetical_from_offsets(offsets);
        let c0_possible = !c0.is_rotationally_symmetric();
        let c1_possible = !c1.is_rotationally_symmetric();
        if !c0_possible && !c1_possible {
            return Err(LeadershipError::BothSymmetric);
        }
        Ok(Candidates { c0, c1, c0_possible, c1_possible })
    }

    fn role(&self) -> Result<Role, LeadershipError> {
        // the observer sits at 0, which is index 0 of either sorted set
        let leads_c0 = self.c0_possible && self.c0.true_leader_index()? == 0;
        let leads_c1 = self.c1_possible && self.c1.true_leader_index()? == 0;
        Ok(match (self.c0_possible, self.c1_possible) {
            (true, true) => match (leads_c0, leads_c1) {
                (true, true) => Role::Cognizant,
                (false, false) => Role::Follower,
                _ => Role::Undecided,
            },
            (true, false) if leads_c0 => Role::Cognizant,
            (false, true) if leads_c1 => Role::Cognizant,
            _ => Role::Follower,
        })
    }
}

pub fn role_from_offsets(offsets: &[Angle]) -> Result<Role, LeadershipError> {
    Candidates::from_offsets(offsets)?.role()
}

/// Role of the robot at `observer` when `points` is the whole configuration.
pub fn role_in(points: &PointSet, observer: &Position) -> Result<Role, LeadershipError> {
    role_from_offsets(&view_from(points, observer))
}

fn safe_neighbor_from(cands: &Candidates, offsets: &[Angle]) -> Result<bool, LeadershipError> {
    let s = Position::zero().cw(&offsets[0]);
    let leader = cands.c1.true_leader_index()?;
    let t = cands.c1.next(leader);
    Ok(antipode(t) != s)
}

pub fn classify(snap: &Snapshot) -> Result<LeaderClass, LeadershipError> {
    if snap.any_multiplicity() {
        return Err(LeadershipError::MultiplicityVisible);
    }
    let offsets = snap.offsets();
    classify_offsets(&offsets)
}

/// Full classification of a multiplicity-free view.
pub fn classify_offsets(offsets: &[Angle]) -> Result<LeaderClass, LeadershipError> {
    let cands = Candidates::from_offsets(offsets)?;
    Ok(match cands.role()? {
        Role::Cognizant => LeaderClass::CognizantLeader,
        Role::Follower => LeaderClass::Follower,
        Role::Undecided => {
            let safe_neighbor = safe_neighbor_from(&cands, offsets)?;
            let origin = Position::zero();
            let mut c0_has_other_undecided = false;
            for q in cands.c0.points().iter().filter(|q| **q != origin) {
                if role_in(&cands.c0, q)? == Role::Undecided {
                    c0_has_other_undecided = true;
                    break;
                }
            }
            LeaderClass::UndecidedLeader { safe_neighbor, c0_has_other_undecided }
        }
    })
}

pub fn is_safe_neighbor(snap: &Snapshot) -> Result<bool, LeadershipError> {
    if snap.any_multiplicity() {
        return Err(LeadershipError::MultiplicityVisible);
    }
    let offsets = snap.offsets();
    let cands = Candidates::from_offsets(&offsets)?;
    if cands.role()? != Role::Undecided {
        return Err(LeadershipError::NotUndecided);
    }
    safe_neighbor_from(&cands, &offsets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: i64, d: i64) -> Angle {
        Angle::frac(n, d)
    }

    fn p(n: i64, d: i64) -> Position {
        Position::frac(n, d)
    }

    fn snap(offsets: &[(i64, i64)]) -> Snapshot {
        let offs: Vec<Angle> = offsets.iter().map(|&(n, d)| a(n, d)).collect();
        Snapshot::fcom_singles(&offs)
    }

    #[test]
    fn hypothetical_examples() {
        let (c0, c1) = hypothetical_configs(&snap(&[(1, 5), (9, 20)])).unwrap();
        assert_eq!(c0.points(), &[p(0, 1), p(1, 5), p(9, 20)]);
        assert_eq!(c1.points(), &[p(0, 1), p(1, 5), p(9, 20), p(1, 2)]);
        let (c0, c1) = hypothetical_configs(&snap(&[])).unwrap();
        assert_eq!(c0.points(), &[p(0, 1)]);
        assert_eq!(c1.points(), &[p(0, 1), p(1, 2)]);
        let (c0, c1) = hypothetical_configs(&snap(&[(1, 4), (3, 4)])).unwrap();
        assert_eq!(c0.points(), &[p(0, 1), p(1, 4), p(3, 4)]);
        assert!(c1.is_rotationally_symmetric());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(&snap(&[(1, 5), (9, 20)])).unwrap(),
            LeaderClass::UndecidedLeader { safe_neighbor: true, c0_has_other_undecided: false }
        );
        // C1 is the square, so only C0 = {0, 1/4, 3/4} is possible, and 3/4 leads it
        assert_eq!(classify(&snap(&[(1, 4), (3, 4)])).unwrap(), LeaderClass::Follower);
        // view of 0 in {0, 1/5, 1/2}
        assert_eq!(classify(&snap(&[(1, 5)])).unwrap(), LeaderClass::CognizantLeader);
        // the robot at 3/10 has leading angle 1/20 in either candidate
        assert_eq!(classify(&snap(&[(1, 10), (3, 10), (7, 20)])).unwrap(), LeaderClass::Follower);
        // observer's gap 1/20 ties the hypothetical 1/2 -> 11/20 gap, and wins on the next one
        assert_eq!(
            classify(&snap(&[(1, 20), (1, 4), (11, 20)])).unwrap(),
            LeaderClass::CognizantLeader
        );
    }

    #[test]
    fn safe_neighbor_examples() {
        assert_eq!(is_safe_neighbor(&snap(&[(1, 5), (9, 20)])), Ok(true));
        assert_eq!(is_safe_neighbor(&snap(&[(1, 5)])), Err(LeadershipError::NotUndecided));
        assert_eq!(is_safe_neighbor(&snap(&[(1, 4), (3, 4)])), Err(LeadershipError::NotUndecided));
    }

    #[test]
    fn multiplicity_disables_classification() {
        let e = SnapshotEntry {
            offset: a(1, 3),
            occupancy: Occupancy::Mult,
            lights: [Color::Off].into_iter().collect(),
        };
        let s = Snapshot::new(Model::Fcom, Occupancy::Single, None, vec![e]).unwrap();
        assert_eq!(classify(&s), Err(LeadershipError::MultiplicityVisible));
        assert!(hypothetical_configs(&s).is_err());
    }

    #[test]
    fn snapshot_invariants() {
        let entry = |n, d| SnapshotEntry {
            offset: a(n, d),
            occupancy: Occupancy::Single,
            lights: [Color::Off].into_iter().collect(),
        };
        assert_eq!(
            Snapshot::new(Model::Fcom, Occupancy::Single, None, vec![entry(1, 2)]),
            Err(SnapshotError::AntipodeVisible)
        );
        assert!(matches!(
            Snapshot::new(Model::Fcom, Occupancy::Single, None, vec![entry(1, 3), entry(1, 4)]),
            Err(SnapshotError::Unsorted(_))
        ));
        assert_eq!(
            Snapshot::new(Model::Fcom, Occupancy::Single, Some(Color::Off), vec![]),
            Err(SnapshotError::OwnLight)
        );
        assert_eq!(
            Snapshot::new(Model::Fsta, Occupancy::Single, None, vec![]),
            Err(SnapshotError::OwnLight)
        );
        assert!(matches!(
            Snapshot::new(Model::Fsta, Occupancy::Single, Some(Color::Off), vec![entry(1, 3)]),
            Err(SnapshotError::UnexpectedLights(_))
        ));
    }

    #[test]
    fn view_hides_only_the_antipode() {
        let s = PointSet::new([p(0, 1), p(1, 4), p(1, 2), p(2, 3)]).unwrap();
        assert_eq!(view_from(&s, &p(0, 1)), vec![a(1, 4), a(2, 3)]);
        assert_eq!(view_from(&s, &p(1, 2)), vec![a(1, 6), a(3, 4)]);
    }
}
