//! Classes A, BI, BII and C of asymmetric multiplicity-free configurations,
//! and searches for instances of each.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::configuration::PointSet;
use crate::leadership::{classify_offsets, view_from, LeaderClass, LeadershipError, Role};

use super::brute::{Oracle, Ring};
use super::instances::{random_on_grid, sweep_grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Class {
    /// One expected leader; if undecided, its clockwise neighbor is safe.
    A,
    /// One cognizant and one undecided leader.
    BI,
    /// Two undecided leaders.
    BII,
    /// One expected leader, undecided, with an unsafe clockwise neighbor.
    C,
}

impl Class {
    pub const ALL: [Class; 4] = [Class::A, Class::BI, Class::BII, Class::C];

    pub fn name(self) -> &'static str {
        match self {
            Class::A => "A",
            Class::BI => "BI",
            Class::BII => "BII",
            Class::C => "C",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Class {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Class::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown class {s:?}; expected A, BI, BII or C"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaxonomyError {
    #[error("configuration is rotationally symmetric")]
    Symmetric,
    #[error("unexpected leader set {0:?}")]
    Leaders(Vec<LeaderClass>),
    #[error(transparent)]
    Leadership(#[from] LeadershipError),
}

/// Class of a configuration, from the library classification of every robot.
pub fn taxonomy_classify(set: &PointSet) -> Result<Class, TaxonomyError> {
    if set.is_rotationally_symmetric() {
        return Err(TaxonomyError::Symmetric);
    }
    let mut leaders = Vec::new();
    for p in set.points() {
        let c = classify_offsets(&view_from(set, p))?;
        if c != LeaderClass::Follower {
            leaders.push(c);
        }
    }
    use LeaderClass::*;
    match leaders.as_slice() {
        [CognizantLeader] => Ok(Class::A),
        [UndecidedLeader { safe_neighbor: true, .. }] => Ok(Class::A),
        [UndecidedLeader { safe_neighbor: false, .. }] => Ok(Class::C),
        [CognizantLeader, UndecidedLeader { .. }] | [UndecidedLeader { .. }, CognizantLeader] => {
            Ok(Class::BI)
        }
        [UndecidedLeader { .. }, UndecidedLeader { .. }] => Ok(Class::BII),
        _ => Err(TaxonomyError::Leaders(leaders)),
    }
}

pub fn classify_ring(ring: &Ring) -> Result<Class, TaxonomyError> {
    taxonomy_classify(&ring.to_point_set())
}

/// The same classes from the brute-force oracle; searches use it as a cheap
/// filter and confirm hits with the library.
pub fn oracle_class(ring: &Ring) -> Option<Class> {
    let o = Oracle::default();
    let mut cognizant = 0;
    let mut undecided = Vec::new();
    for i in 0..ring.len() {
        match o.judge(ring, i).ok()?.role {
            Role::Cognizant => cognizant += 1,
            Role::Undecided => undecided.push(i),
            Role::Follower => {}
        }
    }
    match (cognizant, undecided.as_slice()) {
        (1, []) => Some(Class::A),
        (1, [_]) => Some(Class::BI),
        (0, [_, _]) => Some(Class::BII),
        (0, [u]) => match o.safe_neighbor(ring.ticks(), &ring.view(*u))? {
            true => Some(Class::A),
            false => Some(Class::C),
        },
        _ => None,
    }
}

fn is_class(ring: &Ring, class: Class) -> bool {
    oracle_class(ring) == Some(class) && classify_ring(ring) == Ok(class)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub instances: Vec<Ring>,
    /// Largest grid swept completely, if any.
    pub swept_to: Option<i64>,
    /// Every grid up to the bound was swept, so a shortfall is an absence.
    pub exhaustive: bool,
    pub candidates: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub n: usize,
    pub max_den: i64,
    /// Candidate budget of the exhaustive phase.
    pub sweep_limit: u64,
    /// Candidate budget of the random phase.
    pub random_limit: u64,
}

impl SearchBounds {
    pub fn new(n: usize, max_den: i64) -> Self {
        SearchBounds { n, max_den, sweep_limit: 50_000, random_limit: 200_000 }
    }
}

/// Up to `count` distinct instances of `class`: grids are swept in order of
/// size first, then random grids up to the bound are sampled.
pub fn search(class: Class, bounds: SearchBounds, count: usize, seed: u64) -> SearchResult {
    search_where(bounds, count, seed, &|r| is_class(r, class))
}

/// [`search`] with an arbitrary filter over asymmetric multiplicity-free rings.
pub fn search_where(
    bounds: SearchBounds,
    count: usize,
    seed: u64,
    accept: &dyn Fn(&Ring) -> bool,
) -> SearchResult {
    let mut found: Vec<Ring> = Vec::new();
    let mut candidates = 0u64;
    let mut swept_to = None;
    let mut complete = true;
    let lo = (bounds.n as i64).max(2);
    for d in lo..=bounds.max_den {
        let mut budget_hit = false;
        sweep_grid(d, bounds.n, &mut |r| {
            candidates += 1;
            if accept(&r) {
                let r = canonical(&r);
                if !found.contains(&r) {
                    found.push(r);
                }
            }
            if found.len() >= count {
                return false;
            }
            if candidates >= bounds.sweep_limit {
                budget_hit = true;
                return false;
            }
            true
        });
        if found.len() >= count {
            return SearchResult { instances: found, swept_to, exhaustive: false, candidates };
        }
        if budget_hit {
            complete = false;
            break;
        }
        swept_to = Some(d);
    }
    if complete {
        return SearchResult { instances: found, swept_to, exhaustive: true, candidates };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tries = 0u64;
    while found.len() < count && tries < bounds.random_limit {
        tries += 1;
        let d = rng.gen_range(lo..=bounds.max_den);
        let Some(r) = random_on_grid(&mut rng, bounds.n, d) else { continue };
        let r = canonical(&r);
        if !found.contains(&r) && accept(&r) {
            found.push(r);
        }
    }
    SearchResult { instances: found, swept_to, exhaustive: false, candidates: candidates + tries }
}

/// Distinct instances of `class` spread over `n` in `min_n..=max_n`.
pub fn class_sample(class: Class, min_n: usize, max_n: usize, max_den: i64, count: usize, seed: u64) -> Vec<Ring> {
    let sizes = max_n + 1 - min_n;
    let mut out: Vec<Ring> = Vec::new();
    let mut want = count.div_ceil(sizes);
    // a small size may run dry; later sizes make up the shortfall
    for (k, n) in (min_n..=max_n).enumerate() {
        let left = sizes - k;
        want = want.max((count.saturating_sub(out.len())).div_ceil(left));
        let res = search(class, SearchBounds::new(n, max_den), want, seed.wrapping_add(n as u64));
        for r in res.instances {
            if out.len() < count && !out.contains(&r) {
                out.push(r);
            }
        }
    }
    out
}

/// The four possible leader sets of an asymmetric multiplicity-free configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LeaderCase {
    OneCognizant,
    OneUndecided,
    TwoUndecided,
    CognizantAndUndecided,
}

impl LeaderCase {
    pub const ALL: [LeaderCase; 4] = [
        LeaderCase::OneCognizant,
        LeaderCase::OneUndecided,
        LeaderCase::TwoUndecided,
        LeaderCase::CognizantAndUndecided,
    ];
}

pub fn leader_case(set: &PointSet) -> Result<LeaderCase, TaxonomyError> {
    let class = taxonomy_classify(set)?;
    Ok(match class {
        Class::BI => LeaderCase::CognizantAndUndecided,
        Class::BII => LeaderCase::TwoUndecided,
        Class::C => LeaderCase::OneUndecided,
        Class::A => {
            let cognizant = set
                .points()
                .iter()
                .any(|p| classify_offsets(&view_from(set, p)) == Ok(LeaderClass::CognizantLeader));
            if cognizant {
                LeaderCase::OneCognizant
            } else {
                LeaderCase::OneUndecided
            }
        }
    })
}

/// Random search for one instance of each leader case.
pub fn find_leader_cases(max_n: usize, max_den: i64, tries: u64, seed: u64) -> Vec<(LeaderCase, Option<Ring>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<(LeaderCase, Option<Ring>)> = LeaderCase::ALL.iter().map(|&c| (c, None)).collect();
    for _ in 0..tries {
        if found.iter().all(|(_, r)| r.is_some()) {
            break;
        }
        let n = rng.gen_range(3..=max_n);
        let d = rng.gen_range((n as i64).max(2)..=max_den);
        let Some(r) = random_on_grid(&mut rng, n, d) else { continue };
        if let Ok(case) = leader_case(&r.to_point_set()) {
            let slot = found.iter_mut().find(|(c, _)| *c == case).expect("all cases listed");
            if slot.1.is_none() {
                slot.1 = Some(canonical(&r));
            }
        }
    }
    found
}

/// The rotation that puts the true leader at 0, on the coarsest grid.
pub fn canonical(ring: &Ring) -> Ring {
    let l = super::brute::Oracle::default().true_leader(ring).unwrap_or(0);
    let base = ring.points()[l];
    let shifted = Ring::new(ring.ticks(), ring.points().iter().map(|&p| ring.cw(base, p)).collect())
        .expect("rotation keeps points distinct");
    Ring::from_point_set(&shifted.to_point_set()).expect("coarser grid fits")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_is_class_a() {
        let r = Ring::from_numerators(10, &[0, 2, 5]).unwrap();
        assert_eq!(classify_ring(&r), Ok(Class::A));
    }

    #[test]
    fn class_names_parse() {
        for c in Class::ALL {
            assert_eq!(c.name().parse::<Class>().unwrap(), c);
        }
        assert!("D".parse::<Class>().is_err());
    }
}
