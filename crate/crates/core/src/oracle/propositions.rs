//! Executable forms of the leadership propositions, checked by brute force.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::configuration::{ConfigFile, Configuration};
use crate::leadership::{classify_offsets, view_from, LeaderClass, Role};

use super::brute::{Judgement, Oracle, Ring, Variant};
use super::par_map;
use super::report::{Counterexample, PropertyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    /// Exactly one robot has the smallest angular sequence.
    LeaderUnique,
    /// No robot left of the leader reaches it along a prefix of the leader's sequence.
    NoPrefixCopy,
    /// After inserting a robot `r` without creating symmetry, the new leader is in `[L, r]`.
    InsertionContainment,
    /// An undecided robot leads `C0` and not `C1`.
    UndecidedLeadsC0,
    /// An undecided true leader has an empty antipode.
    LeaderUndecidedAntipodeEmpty,
    /// Any other undecided robot has an occupied antipode.
    OtherUndecidedAntipodeOccupied,
    /// Every other expected leader `r` has `alpha_cw(L, r) >= 1/2`.
    ExpectedLeaderPlacement,
    /// At most one expected leader besides the true leader.
    AtMostOneExtraUndecided,
    /// Two undecided leaders are never antipodal.
    UndecidedPairNotAntipodal,
    /// The clockwise neighbors of two undecided leaders are never antipodal.
    UndecidedPairNeighborsNotAntipodal,
    /// The true leader knows it is an expected leader; a cognizant robot is the true leader.
    SelfRecognition,
    /// The library classification equals the brute-force one.
    LibraryAgreement,
}

impl Property {
    pub const ALL: [Property; 12] = [
        Property::LeaderUnique,
        Property::NoPrefixCopy,
        Property::InsertionContainment,
        Property::UndecidedLeadsC0,
        Property::LeaderUndecidedAntipodeEmpty,
        Property::OtherUndecidedAntipodeOccupied,
        Property::ExpectedLeaderPlacement,
        Property::AtMostOneExtraUndecided,
        Property::UndecidedPairNotAntipodal,
        Property::UndecidedPairNeighborsNotAntipodal,
        Property::SelfRecognition,
        Property::LibraryAgreement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::LeaderUnique => "leader_unique",
            Property::NoPrefixCopy => "no_prefix_copy",
            Property::InsertionContainment => "insertion_containment",
            Property::UndecidedLeadsC0 => "undecided_leads_c0",
            Property::LeaderUndecidedAntipodeEmpty => "leader_undecided_antipode_empty",
            Property::OtherUndecidedAntipodeOccupied => "other_undecided_antipode_occupied",
            Property::ExpectedLeaderPlacement => "expected_leader_placement",
            Property::AtMostOneExtraUndecided => "at_most_one_extra_undecided",
            Property::UndecidedPairNotAntipodal => "undecided_pair_not_antipodal",
            Property::UndecidedPairNeighborsNotAntipodal => {
                "undecided_pair_neighbors_not_antipodal"
            }
            Property::SelfRecognition => "self_recognition",
            Property::LibraryAgreement => "library_agreement",
        }
    }

    /// Statements about the geometry, as opposed to the implementation cross-check.
    pub fn is_proposition(self) -> bool {
        self != Property::LibraryAgreement
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown property {s:?}"))
    }
}

/// Everything the properties need about one configuration, computed once.
pub struct Facts<'a> {
    ring: &'a Ring,
    oracle: Oracle,
    minimal: Vec<usize>,
    judgements: Vec<Result<Judgement, String>>,
}

impl<'a> Facts<'a> {
    pub fn new(ring: &'a Ring, oracle: Oracle) -> Self {
        let minimal = oracle.minimal(ring);
        let judgements = (0..ring.len())
            .map(|i| {
                oracle.judge(ring, i).map_err(|_| {
                    format!("{}: both hypothetical configurations symmetric", ring.position(i))
                })
            })
            .collect();
        Facts { ring, oracle, minimal, judgements }
    }

    pub fn leader(&self) -> Option<usize> {
        match self.minimal.as_slice() {
            [l] => Some(*l),
            _ => None,
        }
    }

    fn role(&self, i: usize) -> Option<Role> {
        self.judgements[i].as_ref().ok().map(|j| j.role)
    }

    fn with_role(&self, pred: impl Fn(Role) -> bool) -> Vec<usize> {
        (0..self.ring.len()).filter(|&i| self.role(i).is_some_and(&pred)).collect()
    }

    fn pos(&self, i: usize) -> String {
        self.ring.position(i).to_string()
    }

    pub fn check(&self, property: Property) -> Result<(), String> {
        let ring = self.ring;
        let half = ring.half();
        if property == Property::LeaderUnique {
            return match self.minimal.len() {
                1 => Ok(()),
                _ => Err(format!(
                    "robots {:?} share the smallest sequence",
                    self.minimal.iter().map(|&i| self.pos(i)).collect::<Vec<_>>()
                )),
            };
        }
        // everything else is stated relative to the unique true leader
        let Some(l) = self.leader() else { return Ok(()) };
        let lp = ring.points()[l];
        match property {
            Property::LeaderUnique => unreachable!(),
            Property::NoPrefixCopy => {
                let s_l = ring.cw_gaps(l);
                for r in 0..ring.len() {
                    if ring.cw(lp, ring.points()[r]) <= half {
                        continue;
                    }
                    let mut to_leader = Vec::new();
                    let mut j = r;
                    while j != l {
                        let k = ring.next(j);
                        to_leader.push(ring.cw(ring.points()[j], ring.points()[k]));
                        j = k;
                    }
                    if s_l.starts_with(&to_leader) {
                        return Err(format!(
                            "{} reaches the leader {} along a prefix of its sequence",
                            self.pos(r),
                            self.pos(l)
                        ));
                    }
                }
                Ok(())
            }
            Property::InsertionContainment => {
                for t in 0..ring.ticks() {
                    let Some(bigger) = ring.with_point(t) else { continue };
                    if bigger.is_symmetric() {
                        continue;
                    }
                    let Some(nl) = self.oracle.true_leader(&bigger) else {
                        return Err(format!("no unique leader after inserting {}/{}", t, ring.ticks()));
                    };
                    let np = bigger.points()[nl];
                    if ring.cw(lp, np) > ring.cw(lp, t) {
                        return Err(format!(
                            "inserting {} moved the leader from {} to {}",
                            bigger.position(bigger.index_of(t).expect("inserted")),
                            self.pos(l),
                            bigger.position(nl)
                        ));
                    }
                }
                Ok(())
            }
            Property::UndecidedLeadsC0 => {
                for i in self.with_role(|r| r == Role::Undecided) {
                    let j = self.judgements[i].as_ref().expect("has a role");
                    if !(j.leads_c0 && !j.leads_c1) {
                        return Err(format!(
                            "undecided {} leads c0: {}, leads c1: {}",
                            self.pos(i),
                            j.leads_c0,
                            j.leads_c1
                        ));
                    }
                }
                Ok(())
            }
            Property::LeaderUndecidedAntipodeEmpty => {
                if self.role(l) == Some(Role::Undecided) && ring.antipode_occupied(l) {
                    return Err(format!("undecided true leader {} has an occupied antipode", self.pos(l)));
                }
                Ok(())
            }
            Property::OtherUndecidedAntipodeOccupied => {
                for i in self.with_role(|r| r == Role::Undecided) {
                    if i != l && !ring.antipode_occupied(i) {
                        return Err(format!("undecided {} has an empty antipode", self.pos(i)));
                    }
                }
                Ok(())
            }
            Property::ExpectedLeaderPlacement => {
                for i in self.with_role(Role::is_expected_leader) {
                    if i != l && ring.cw(lp, ring.points()[i]) < half {
                        return Err(format!(
                            "expected leader {} is less than half a turn clockwise of {}",
                            self.pos(i),
                            self.pos(l)
                        ));
                    }
                }
                Ok(())
            }
            Property::AtMostOneExtraUndecided => {
                let others: Vec<usize> =
                    self.with_role(Role::is_expected_leader).into_iter().filter(|&i| i != l).collect();
                if others.len() > 1 {
                    return Err(format!(
                        "expected leaders besides {}: {:?}",
                        self.pos(l),
                        others.iter().map(|&i| self.pos(i)).collect::<Vec<_>>()
                    ));
                }
                Ok(())
            }
            Property::UndecidedPairNotAntipodal | Property::UndecidedPairNeighborsNotAntipodal => {
                let und = self.with_role(|r| r == Role::Undecided);
                for (x, &a) in und.iter().enumerate() {
                    for &b in &und[x + 1..] {
                        let (p, q) = if property == Property::UndecidedPairNotAntipodal {
                            (a, b)
                        } else {
                            (ring.next(a), ring.next(b))
                        };
                        if ring.cw(ring.points()[p], ring.points()[q]) == half {
                            return Err(format!(
                                "undecided {} and {}: {} and {} are antipodal",
                                self.pos(a),
                                self.pos(b),
                                self.pos(p),
                                self.pos(q)
                            ));
                        }
                    }
                }
                Ok(())
            }
            Property::SelfRecognition => {
                if let Some(Err(e)) = self.judgements.iter().find(|j| j.is_err()) {
                    return Err(e.clone());
                }
                if !self.role(l).is_some_and(Role::is_expected_leader) {
                    return Err(format!("true leader {} classifies itself as a follower", self.pos(l)));
                }
                if let Some(&i) = self.with_role(|r| r == Role::Cognizant).iter().find(|&&i| i != l) {
                    return Err(format!("{} is cognizant but {} is the true leader", self.pos(i), self.pos(l)));
                }
                Ok(())
            }
            Property::LibraryAgreement => self.library_agreement(l),
        }
    }

    fn library_agreement(&self, l: usize) -> Result<(), String> {
        let ring = self.ring;
        let set = ring.to_point_set();
        if set.is_rotationally_symmetric() {
            return Err("library finds a symmetry".into());
        }
        let lib_leader = set.true_leader().map_err(|e| e.to_string())?;
        if lib_leader != ring.position(l) {
            return Err(format!("library leader {lib_leader}, oracle leader {}", self.pos(l)));
        }
        let m = ring.ticks();
        for i in 0..ring.len() {
            let p = ring.position(i);
            let lib = classify_offsets(&view_from(&set, &p))
                .map_err(|e| format!("library fails on {p}: {e}"))?;
            let mine = self.role(i).ok_or_else(|| format!("oracle fails on {p}"))?;
            if lib.role() != mine {
                return Err(format!("{p}: library {:?}, oracle {mine:?}", lib.role()));
            }
            if let LeaderClass::UndecidedLeader { safe_neighbor, c0_has_other_undecided } = lib {
                let view = ring.view(i);
                let safe = self.oracle.safe_neighbor(m, &view);
                if safe != Some(safe_neighbor) {
                    return Err(format!("{p}: library safe {safe_neighbor}, oracle {safe:?}"));
                }
                let other = self
                    .oracle
                    .c0_has_other_undecided(m, &view)
                    .map_err(|_| format!("{p}: oracle cannot classify c0"))?;
                if other != c0_has_other_undecided {
                    return Err(format!(
                        "{p}: library c0-other-undecided {c0_has_other_undecided}, oracle {other}"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Checks each property on every instance and reports the first failure of each.
pub fn check_propositions(
    instances: &[Ring],
    variant: Variant,
    properties: &[Property],
) -> Vec<PropertyReport> {
    let oracle = Oracle::new(variant);
    let per_instance = par_map(instances, |_, ring| {
        let facts = Facts::new(ring, oracle);
        properties
            .iter()
            .map(|&p| {
                let start = Instant::now();
                let r = facts.check(p).err();
                (r, start.elapsed())
            })
            .collect::<Vec<_>>()
    });
    properties
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let mut report = PropertyReport::new(p.name());
            report.instances = instances.len() as u64;
            let mut spent = Duration::ZERO;
            for (idx, results) in per_instance.iter().enumerate() {
                let (fail, t) = &results[k];
                spent += *t;
                if report.counterexample.is_none() {
                    if let Some(w) = fail {
                        report.counterexample = Some(Counterexample {
                            instance: idx as u64,
                            config: instances[idx].to_configuration().to_file(),
                            witness: w.clone(),
                            run: None,
                        });
                    }
                }
            }
            report.wall_ms = spent.as_millis() as u64;
            if variant != Variant::Faithful {
                report.stat("classifier", variant.name());
            }
            report
        })
        .collect()
}

/// Re-evaluates one property on a saved configuration.
pub fn recheck(property: Property, config: &ConfigFile, variant: Variant) -> Result<(), String> {
    let config = Configuration::from_file(config).map_err(|e| e.to_string())?;
    let set = config.point_set().map_err(|e| e.to_string())?;
    let ring = Ring::from_point_set(&set).ok_or("denominators too large for the oracle")?;
    if ring.is_symmetric() {
        return Err("configuration is rotationally symmetric".into());
    }
    Facts::new(&ring, Oracle::new(variant)).check(property)
}

/// For each mutant classifier, the propositions it breaks on `instances`.
pub fn mutation_run(instances: &[Ring]) -> Vec<(Variant, Vec<PropertyReport>)> {
    let props: Vec<Property> = Property::ALL.into_iter().filter(|p| p.is_proposition()).collect();
    Variant::MUTANTS
        .into_iter()
        .map(|v| {
            let failed =
                check_propositions(instances, v, &props).into_iter().filter(|r| !r.passed()).collect();
            (v, failed)
        })
        .collect()
}
