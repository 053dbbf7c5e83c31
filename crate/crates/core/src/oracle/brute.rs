//! Brute-force leadership, computed from the definitions on an integer ring.
//!
//! Nothing here calls into the leadership or configuration algorithms:
//! sequences are plain `Vec<i64>` compared with `Ord`, symmetry is found by
//! trying every rotation of the point set, and the hypothetical
//! configurations are rebuilt from scratch for every observer.

use std::fmt;

use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::angles::Position;
use crate::configuration::{Configuration, PointSet};
use crate::leadership::Role;

/// Distinct points `k / m` of the circle, `m` even so antipodes are ticks too.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ring {
    m: i64,
    pts: Vec<i64>,
}

impl Ring {
    /// `None` for an odd or nonpositive `m`, an out of range tick, or a repeat.
    pub fn new(m: i64, mut pts: Vec<i64>) -> Option<Ring> {
        if m <= 0 || m % 2 != 0 || pts.is_empty() {
            return None;
        }
        if pts.iter().any(|&p| !(0..m).contains(&p)) {
            return None;
        }
        pts.sort_unstable();
        if pts.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(Ring { m, pts })
    }

    /// Points `k / d`; the ring gets `2d` ticks.
    pub fn from_numerators(d: i64, ks: &[i64]) -> Option<Ring> {
        Ring::new(2 * d, ks.iter().map(|k| 2 * k.rem_euclid(d)).collect())
    }

    pub fn from_point_set(set: &PointSet) -> Option<Ring> {
        let mut lcm: i64 = 1;
        for p in set.points() {
            let d = p.value().denom().to_i64()?;
            lcm = lcm.checked_mul(d / lcm.gcd(&d))?;
        }
        let m = lcm.checked_mul(2)?;
        let pts = set
            .points()
            .iter()
            .map(|p| {
                let v = p.value();
                let k = v.numer().to_i64()?.checked_mul(m / v.denom().to_i64()?)?;
                Some(k)
            })
            .collect::<Option<Vec<_>>>()?;
        Ring::new(m, pts)
    }

    pub fn ticks(&self) -> i64 {
        self.m
    }

    pub fn points(&self) -> &[i64] {
        &self.pts
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn half(&self) -> i64 {
        self.m / 2
    }

    pub fn position(&self, i: usize) -> Position {
        Position::frac(self.pts[i], self.m)
    }

    pub fn to_point_set(&self) -> PointSet {
        PointSet::new((0..self.len()).map(|i| self.position(i))).expect("ring points are distinct")
    }

    pub fn to_configuration(&self) -> Configuration {
        Configuration::from_positions((0..self.len()).map(|i| self.position(i)))
            .expect("ring points are distinct")
    }

    /// Clockwise ticks from `a` to `b`.
    pub fn cw(&self, a: i64, b: i64) -> i64 {
        (b - a).rem_euclid(self.m)
    }

    pub fn contains(&self, t: i64) -> bool {
        self.pts.binary_search(&t.rem_euclid(self.m)).is_ok()
    }

    pub fn index_of(&self, t: i64) -> Option<usize> {
        self.pts.binary_search(&t.rem_euclid(self.m)).ok()
    }

    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    pub fn antipode_occupied(&self, i: usize) -> bool {
        self.contains(self.pts[i] + self.half())
    }

    pub fn with_point(&self, t: i64) -> Option<Ring> {
        let t = t.rem_euclid(self.m);
        if self.contains(t) {
            return None;
        }
        let mut pts = self.pts.clone();
        pts.push(t);
        Ring::new(self.m, pts)
    }

    /// Clockwise gaps starting at robot `i`.
    pub fn cw_gaps(&self, i: usize) -> Vec<i64> {
        let n = self.len();
        if n == 1 {
            return vec![self.m];
        }
        (0..n).map(|k| self.cw(self.pts[(i + k) % n], self.pts[(i + k + 1) % n])).collect()
    }

    /// Counterclockwise gaps starting at robot `i`.
    pub fn ccw_gaps(&self, i: usize) -> Vec<i64> {
        let n = self.len();
        if n == 1 {
            return vec![self.m];
        }
        (0..n)
            .map(|k| self.cw(self.pts[(i + n - k - 1) % n], self.pts[(i + n - k) % n]))
            .collect()
    }

    /// Some nonzero rotation maps the set onto itself.
    pub fn is_symmetric(&self) -> bool {
        let base = self.pts[0];
        self.pts[1..].iter().any(|&p| {
            let shift = p - base;
            self.pts.iter().all(|&q| self.contains(q + shift))
        })
    }

    /// Offsets the robot at `i` can see, everything except itself and its antipode.
    pub fn view(&self, i: usize) -> Vec<i64> {
        let me = self.pts[i];
        let mut v: Vec<i64> = self
            .pts
            .iter()
            .filter(|&&q| q != me)
            .map(|&q| self.cw(me, q))
            .filter(|&d| d != self.half())
            .collect();
        v.sort_unstable();
        v
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for i in 0..self.len() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", self.position(i))?;
        }
        f.write_str("}")
    }
}

/// Classifier variants. Everything except `Faithful` is a deliberate defect,
/// used to show that the property suite notices a wrong classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Faithful,
    /// Leadership decided by the leading angle alone, ties accepted.
    LeadingAngleOnly,
    /// Ties accepted and symmetric hypotheticals kept as possible.
    NonStrict,
    /// Observers never doubt their antipode: only `C0` is considered.
    NoAntipodeDoubt,
    /// Sequences read counterclockwise.
    Counterclockwise,
}

impl Variant {
    pub const MUTANTS: [Variant; 4] = [
        Variant::LeadingAngleOnly,
        Variant::NonStrict,
        Variant::NoAntipodeDoubt,
        Variant::Counterclockwise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Faithful => "faithful",
            Variant::LeadingAngleOnly => "leading-angle-only",
            Variant::NonStrict => "non-strict",
            Variant::NoAntipodeDoubt => "no-antipode-doubt",
            Variant::Counterclockwise => "counterclockwise",
        }
    }
}

/// How an observer sees itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Judgement {
    pub role: Role,
    pub c0_possible: bool,
    pub c1_possible: bool,
    pub leads_c0: bool,
    pub leads_c1: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BothSymmetric;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    pub variant: Variant,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle { variant: Variant::Faithful }
    }
}

impl Oracle {
    pub fn new(variant: Variant) -> Self {
        Oracle { variant }
    }

    fn sequence(&self, ring: &Ring, i: usize) -> Vec<i64> {
        match self.variant {
            Variant::Counterclockwise => ring.ccw_gaps(i),
            Variant::LeadingAngleOnly => ring.cw_gaps(i)[..1].to_vec(),
            _ => ring.cw_gaps(i),
        }
    }

    /// Every robot whose sequence is not beaten by any other.
    pub fn minimal(&self, ring: &Ring) -> Vec<usize> {
        let seqs: Vec<Vec<i64>> = (0..ring.len()).map(|i| self.sequence(ring, i)).collect();
        let best = seqs.iter().min().expect("ring is nonempty");
        (0..ring.len()).filter(|&i| &seqs[i] == best).collect()
    }

    /// The true leader, if exactly one robot has the smallest sequence.
    pub fn true_leader(&self, ring: &Ring) -> Option<usize> {
        match self.minimal(ring).as_slice() {
            [one] => Some(*one),
            _ => None,
        }
    }

    /// Whether the robot at index `i` leads `ring` taken as the whole configuration.
    fn leads(&self, ring: &Ring, i: usize) -> bool {
        match self.variant {
            Variant::Faithful | Variant::Counterclockwise => self.true_leader(ring) == Some(i),
            Variant::LeadingAngleOnly | Variant::NonStrict => self.minimal(ring).contains(&i),
            Variant::NoAntipodeDoubt => self.true_leader(ring) == Some(i),
        }
    }

    /// `C0` and `C1` for a view, observer at tick 0.
    pub fn hypotheticals(m: i64, view: &[i64]) -> (Ring, Ring) {
        let mut pts = vec![0];
        pts.extend_from_slice(view);
        let c0 = Ring::new(m, pts).expect("view offsets are distinct and nonzero");
        let c1 = c0.with_point(m / 2).expect("antipode is never in a view");
        (c0, c1)
    }

    pub fn judge_view(&self, m: i64, view: &[i64]) -> Result<Judgement, BothSymmetric> {
        let (c0, c1) = Self::hypotheticals(m, view);
        let (c0_possible, c1_possible) = match self.variant {
            Variant::NonStrict => (true, true),
            Variant::NoAntipodeDoubt => {
                let c0_ok = !c0.is_symmetric();
                (c0_ok, !c0_ok && !c1.is_symmetric())
            }
            _ => (!c0.is_symmetric(), !c1.is_symmetric()),
        };
        if !c0_possible && !c1_possible {
            return Err(BothSymmetric);
        }
        // the observer is tick 0, the first point of either ring
        let leads_c0 = c0_possible && self.leads(&c0, 0);
        let leads_c1 = c1_possible && self.leads(&c1, 0);
        let role = match (c0_possible, c1_possible) {
            (true, true) => match (leads_c0, leads_c1) {
                (true, true) => Role::Cognizant,
                (false, false) => Role::Follower,
                _ => Role::Undecided,
            },
            _ if leads_c0 || leads_c1 => Role::Cognizant,
            _ => Role::Follower,
        };
        Ok(Judgement { role, c0_possible, c1_possible, leads_c0, leads_c1 })
    }

    pub fn judge(&self, ring: &Ring, i: usize) -> Result<Judgement, BothSymmetric> {
        self.judge_view(ring.ticks(), &ring.view(i))
    }

    /// Safe-neighbor test for an undecided observer with the given view.
    pub fn safe_neighbor(&self, m: i64, view: &[i64]) -> Option<bool> {
        let s = *view.first()?;
        let (_, c1) = Self::hypotheticals(m, view);
        let leader = self.true_leader(&c1)?;
        let t = c1.points()[c1.next(leader)];
        Some((t + m / 2).rem_euclid(m) != s)
    }

    /// Whether some robot of `C0` other than the observer is undecided
    /// when `C0` is taken as the whole configuration.
    pub fn c0_has_other_undecided(&self, m: i64, view: &[i64]) -> Result<bool, BothSymmetric> {
        let (c0, _) = Self::hypotheticals(m, view);
        for q in 1..c0.len() {
            if self.judge(&c0, q)?.role == Role::Undecided {
                return Ok(true);
            }
        }
        Ok(false)
    }
}
