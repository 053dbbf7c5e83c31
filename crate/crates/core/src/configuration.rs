//! Global configurations, angular sequences and the true leader.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::angles::{alpha_cw, Angle, Position};

/// Light colors across both protocol palettes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Off,
    Verify,
    Cognizant,
    Undecided,
    LeaderPresent,
    LeaderAbsent,
    Done,
}

impl Color {
    pub const GATHERING_PALETTE: &'static [Color] = &[
        Color::Off,
        Color::Verify,
        Color::Cognizant,
        Color::Undecided,
        Color::LeaderPresent,
        Color::LeaderAbsent,
    ];

    pub const THREE_TO_SEVEN_PALETTE: &'static [Color] = &[Color::Off, Color::Done];

    pub fn name(self) -> &'static str {
        match self {
            Color::Off => "off",
            Color::Verify => "verify",
            Color::Cognizant => "cognizant",
            Color::Undecided => "undecided",
            Color::LeaderPresent => "leader_present",
            Color::LeaderAbsent => "leader_absent",
            Color::Done => "done",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Simulator bookkeeping only; protocol code never sees it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RobotId(pub u32);

impl fmt::Display for RobotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Robot {
    pub id: RobotId,
    pub position: Position,
    pub light: Color,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Occupancy {
    Single,
    Mult,
}

/// What is present at one occupied point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointInfo {
    pub count: usize,
    pub lights: BTreeSet<Color>,
}

impl PointInfo {
    pub fn occupancy(&self) -> Occupancy {
        if self.count >= 2 {
            Occupancy::Mult
        } else {
            Occupancy::Single
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("configuration is empty")]
    Empty,
    #[error("duplicate robot id {0}")]
    DuplicateId(RobotId),
    #[error("position {0} is not occupied")]
    Unoccupied(Position),
    #[error("configuration has a multiplicity point at {0}")]
    HasMultiplicity(Position),
    #[error("configuration is rotationally symmetric under rotation by {0}")]
    Symmetric(Angle),
    #[error("angular sequences have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("light {light} at robot {id} is not in the {protocol} palette")]
    UnknownColor { id: RobotId, light: Color, protocol: String },
    #[error("malformed configuration: {0}")]
    Malformed(String),
}

/// A finite set of robots on the circle with their lights.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    robots: Vec<Robot>,
}

impl Configuration {
    pub fn new(robots: Vec<Robot>) -> Result<Self, ConfigError> {
        if robots.is_empty() {
            return Err(ConfigError::Empty);
        }
        let mut seen = BTreeSet::new();
        for r in &robots {
            if !seen.insert(r.id) {
                return Err(ConfigError::DuplicateId(r.id));
            }
        }
        Ok(Configuration { robots })
    }

    /// Robots with ids `0..n` at the given positions, all lights `off`.
    pub fn from_positions<I: IntoIterator<Item = Position>>(positions: I) -> Result<Self, ConfigError> {
        let robots = positions
            .into_iter()
            .enumerate()
            .map(|(i, position)| Robot { id: RobotId(i as u32), position, light: Color::Off })
            .collect();
        Self::new(robots)
    }

    pub fn robots(&self) -> &[Robot] {
        &self.robots
    }

    pub fn len(&self) -> usize {
        self.robots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.robots.is_empty()
    }

    /// Occupied points in clockwise order from `0`.
    pub fn occupancy(&self) -> BTreeMap<Position, PointInfo> {
        let mut map: BTreeMap<Position, PointInfo> = BTreeMap::new();
        for r in &self.robots {
            let entry = map
                .entry(r.position.clone())
                .or_insert_with(|| PointInfo { count: 0, lights: BTreeSet::new() });
            entry.count += 1;
            entry.lights.insert(r.light);
        }
        map
    }

    pub fn multiplicity_points(&self) -> Vec<Position> {
        self.occupancy()
            .into_iter()
            .filter(|(_, info)| info.count >= 2)
            .map(|(p, _)| p)
            .collect()
    }

    /// The position set, provided no point holds more than one robot.
    pub fn point_set(&self) -> Result<PointSet, ConfigError> {
        let mut points: Vec<Position> = self.robots.iter().map(|r| r.position.clone()).collect();
        points.sort();
        for w in points.windows(2) {
            if w[0] == w[1] {
                return Err(ConfigError::HasMultiplicity(w[0].clone()));
            }
        }
        Ok(PointSet { points })
    }

    /// Rejects palettes foreign to the given protocol.
    pub fn check_palette(&self, palette: &[Color], protocol: &str) -> Result<(), ConfigError> {
        for r in &self.robots {
            if !palette.contains(&r.light) {
                return Err(ConfigError::UnknownColor {
                    id: r.id,
                    light: r.light,
                    protocol: protocol.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Requirements for a protocol start: distinct positions, no rotational symmetry.
    pub fn validate_initial(&self) -> Result<PointSet, ConfigError> {
        let set = self.point_set()?;
        if let Some(rot) = set.symmetry_rotation() {
            return Err(ConfigError::Symmetric(rot));
        }
        Ok(set)
    }
}

/// One robot entry of the configuration file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotSpec {
    pub pos: Position,
    #[serde(default = "default_light")]
    pub light: Color,
}

fn default_light() -> Color {
    Color::Off
}

/// File form: `{"robots": [{"pos": "1/5", "light": "off"}, ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub robots: Vec<RobotSpec>,
}

impl Configuration {
    /// Ids are assigned in file order.
    pub fn from_file(file: &ConfigFile) -> Result<Self, ConfigError> {
        let robots = file
            .robots
            .iter()
            .enumerate()
            .map(|(i, r)| Robot { id: RobotId(i as u32), position: r.pos.clone(), light: r.light })
            .collect();
        Self::new(robots)
    }

    pub fn to_file(&self) -> ConfigFile {
        let mut robots: Vec<&Robot> = self.robots.iter().collect();
        robots.sort_by_key(|r| r.id);
        ConfigFile {
            robots: robots
                .into_iter()
                .map(|r| RobotSpec { pos: r.position.clone(), light: r.light })
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let file: ConfigFile =
            serde_json::from_str(text).map_err(|e| ConfigError::Malformed(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("configuration serializes")
    }
}

/// A multiplicity-free configuration, viewed as a sorted set of distinct points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    points: Vec<Position>,
}

impl PointSet {
    pub fn new<I: IntoIterator<Item = Position>>(points: I) -> Result<Self, ConfigError> {
        let mut points: Vec<Position> = points.into_iter().collect();
        if points.is_empty() {
            return Err(ConfigError::Empty);
        }
        points.sort();
        for w in points.windows(2) {
            if w[0] == w[1] {
                return Err(ConfigError::HasMultiplicity(w[0].clone()));
            }
        }
        Ok(PointSet { points })
    }

    pub fn points(&self) -> &[Position] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Position) -> bool {
        self.points.binary_search(p).is_ok()
    }

    pub fn index_of(&self, p: &Position) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    /// Copy with one more point, or `None` if it is already present.
    pub fn with_point(&self, p: Position) -> Option<PointSet> {
        match self.points.binary_search(&p) {
            Ok(_) => None,
            Err(i) => {
                let mut points = self.points.clone();
                points.insert(i, p);
                Some(PointSet { points })
            }
        }
    }

    /// Clockwise gaps, gap `i` running from point `i` to point `i + 1`.
    pub fn gaps(&self) -> Vec<Angle> {
        let n = self.points.len();
        if n == 1 {
            return vec![Angle::full()];
        }
        (0..n).map(|i| alpha_cw(&self.points[i], &self.points[(i + 1) % n])).collect()
    }

    /// Clockwise neighbor of the point at index `i`.
    pub fn next(&self, i: usize) -> &Position {
        &self.points[(i + 1) % self.points.len()]
    }

    pub fn angular_sequence(&self, at: &Position) -> Result<AngularSequence, ConfigError> {
        let i = self.index_of(at).ok_or_else(|| ConfigError::Unoccupied(at.clone()))?;
        let mut gaps = self.gaps();
        gaps.rotate_left(i);
        Ok(AngularSequence { gaps })
    }

    /// Smallest nonzero rotation mapping the set onto itself, if any.
    pub fn symmetry_rotation(&self) -> Option<Angle> {
        let gaps = self.gaps();
        let shift = smallest_period_shift(&gaps)?;
        Some(alpha_cw(&self.points[0], &self.points[shift]))
    }

    pub fn is_rotationally_symmetric(&self) -> bool {
        self.symmetry_rotation().is_some()
    }

    /// The unique point with the lexicographically smallest angular sequence.
    pub fn true_leader(&self) -> Result<Position, ConfigError> {
        Ok(self.points[self.true_leader_index()?].clone())
    }

    pub fn true_leader_index(&self) -> Result<usize, ConfigError> {
        if let Some(rot) = self.symmetry_rotation() {
            return Err(ConfigError::Symmetric(rot));
        }
        Ok(least_rotation(&self.gaps()))
    }

    /// Rigid rotation of every point by `angle` clockwise.
    pub fn rotated(&self, angle: &Angle) -> PointSet {
        let mut points: Vec<Position> = self.points.iter().map(|p| p.cw(angle)).collect();
        points.sort();
        PointSet { points }
    }
}

/// Clockwise gap list starting at one robot. The first gap is the leading angle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AngularSequence {
    pub gaps: Vec<Angle>,
}

impl AngularSequence {
    pub fn leading_angle(&self) -> &Angle {
        &self.gaps[0]
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }
}

pub fn lex_strictly_smaller(a: &AngularSequence, b: &AngularSequence) -> Result<bool, ConfigError> {
    if a.len() != b.len() {
        return Err(ConfigError::LengthMismatch(a.len(), b.len()));
    }
    for (x, y) in a.gaps.iter().zip(&b.gaps) {
        if x != y {
            return Ok(x < y);
        }
    }
    Ok(false)
}

/// Smallest `k` in `1..n` with `seq` equal to its rotation by `k`, found by
/// searching `seq` inside `seq ++ seq` with a KMP failure table.
fn smallest_period_shift<T: Eq>(seq: &[T]) -> Option<usize> {
    let n = seq.len();
    if n < 2 {
        return None;
    }
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && seq[i] != seq[k] {
            k = fail[k - 1];
        }
        if seq[i] == seq[k] {
            k += 1;
        }
        fail[i] = k;
    }
    // text = seq ++ seq minus its first element; the first match is the shift
    let mut q = 0;
    for j in 1..2 * n - 1 {
        let c = &seq[j % n];
        while q > 0 && *c != seq[q] {
            q = fail[q - 1];
        }
        if *c == seq[q] {
            q += 1;
        }
        if q == n {
            return Some(j + 1 - n);
        }
    }
    None
}

/// Booth's algorithm: start index of the lexicographically least rotation.
fn least_rotation<T: Ord>(seq: &[T]) -> usize {
    let n = seq.len();
    let at = |i: usize| &seq[i % n];
    let mut fail: Vec<isize> = vec![-1; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = fail[j - k - 1];
        while i != -1 && sj != at(k + i as usize + 1) {
            if sj < at(k + i as usize + 1) {
                k = j - i as usize - 1;
            }
            i = fail[i as usize];
        }
        // leaving the loop, either i == -1 or sj matches at k + i + 1
        if i == -1 && sj != at(k) {
            if sj < at(k) {
                k = j;
            }
            fail[j - k] = -1;
        } else {
            fail[j - k] = i + 1;
        }
    }
    k % n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: i64, d: i64) -> Position {
        Position::frac(n, d)
    }

    fn a(n: i64, d: i64) -> Angle {
        Angle::frac(n, d)
    }

    fn set(ps: &[(i64, i64)]) -> PointSet {
        PointSet::new(ps.iter().map(|&(n, d)| p(n, d))).unwrap()
    }

    fn seq(gs: &[(i64, i64)]) -> AngularSequence {
        AngularSequence { gaps: gs.iter().map(|&(n, d)| a(n, d)).collect() }
    }

    #[test]
    fn json_round_trip_and_rejections() {
        let c = Configuration::from_json(
            r#"{"robots":[{"pos":"0","light":"off"},{"pos":"1/5"},{"pos":"1/2","light":"verify"}]}"#,
        )
        .unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.robots()[2].light, Color::Verify);
        assert_eq!(Configuration::from_json(&c.to_json()).unwrap(), c);
        let err = Configuration::from_json(r#"{"robots":[{"pos":"1"}]}"#).unwrap_err();
        assert!(matches!(err, ConfigError::Malformed(ref m) if m.contains("outside")));
        let err = Configuration::from_json(r#"{"robots":[{"pos":"0","light":"purple"}]}"#);
        assert!(matches!(err, Err(ConfigError::Malformed(_))));
        let sq = Configuration::from_json(
            r#"{"robots":[{"pos":"0"},{"pos":"1/4"},{"pos":"1/2"},{"pos":"3/4"}]}"#,
        )
        .unwrap();
        assert_eq!(sq.validate_initial().unwrap_err(), ConfigError::Symmetric(Angle::frac(1, 4)));
    }

    #[test]
    fn angular_sequence_examples() {
        let s = set(&[(0, 1), (1, 5), (1, 2)]);
        assert_eq!(s.angular_sequence(&p(0, 1)).unwrap(), seq(&[(1, 5), (3, 10), (1, 2)]));
        assert_eq!(s.angular_sequence(&p(1, 2)).unwrap(), seq(&[(1, 2), (1, 5), (3, 10)]));
        let sq = set(&[(0, 1), (1, 4), (1, 2), (3, 4)]);
        assert_eq!(sq.angular_sequence(&p(1, 2)).unwrap(), seq(&[(1, 4); 4]));
        assert!(matches!(s.angular_sequence(&p(1, 3)), Err(ConfigError::Unoccupied(_))));
    }

    #[test]
    fn angular_sequence_rejects_multiplicity() {
        let c = Configuration::from_positions([p(0, 1), p(0, 1), p(1, 3)]).unwrap();
        assert!(matches!(c.point_set(), Err(ConfigError::HasMultiplicity(_))));
    }

    #[test]
    fn lex_examples() {
        assert!(lex_strictly_smaller(&seq(&[(1, 5), (3, 10), (1, 2)]), &seq(&[(3, 10), (1, 2), (1, 5)])).unwrap());
        assert!(!lex_strictly_smaller(&seq(&[(1, 4), (1, 4)]), &seq(&[(1, 4), (1, 4)])).unwrap());
        assert!(!lex_strictly_smaller(&seq(&[(1, 5), (1, 2), (3, 10)]), &seq(&[(1, 5), (3, 10), (1, 2)])).unwrap());
        // a difference at the second element decides
        assert!(lex_strictly_smaller(&seq(&[(1, 5), (1, 5), (3, 5)]), &seq(&[(1, 5), (2, 5), (2, 5)])).unwrap());
        assert!(matches!(
            lex_strictly_smaller(&seq(&[(1, 2), (1, 2)]), &seq(&[(1, 1)])),
            Err(ConfigError::LengthMismatch(2, 1))
        ));
    }

    #[test]
    fn symmetry_examples() {
        assert_eq!(set(&[(0, 1), (1, 4), (1, 2), (3, 4)]).symmetry_rotation(), Some(a(1, 4)));
        assert_eq!(set(&[(0, 1), (1, 10), (1, 2), (3, 5)]).symmetry_rotation(), Some(a(1, 2)));
        assert!(!set(&[(0, 1), (1, 10), (1, 2), (7, 10)]).is_rotationally_symmetric());
        assert!(!set(&[(0, 1)]).is_rotationally_symmetric());
        assert_eq!(set(&[(0, 1), (1, 2)]).symmetry_rotation(), Some(a(1, 2)));
        assert_eq!(set(&[(1, 6), (1, 2), (5, 6)]).symmetry_rotation(), Some(a(1, 3)));
    }

    #[test]
    fn true_leader_examples() {
        assert_eq!(set(&[(0, 1), (1, 5), (1, 2)]).true_leader().unwrap(), p(0, 1));
        assert_eq!(set(&[(0, 1), (1, 5), (9, 20), (1, 2)]).true_leader().unwrap(), p(9, 20));
        assert!(matches!(
            set(&[(0, 1), (1, 4), (1, 2), (3, 4)]).true_leader(),
            Err(ConfigError::Symmetric(_))
        ));
        assert_eq!(set(&[(1, 3)]).true_leader().unwrap(), p(1, 3));
    }

    #[test]
    fn booth_on_words() {
        let w = b"bbaab";
        assert_eq!(least_rotation(w), 2);
        let w = b"abab";
        assert_eq!(least_rotation(w) % 2, 0);
        let w = b"cabca";
        // rotations: cabca, abcac, bcaca, cacab, acabc -> least "abcac" at 1
        assert_eq!(least_rotation(w), 1);
    }

    #[test]
    fn period_shift_on_words() {
        assert_eq!(smallest_period_shift(b"abcabc"), Some(3));
        assert_eq!(smallest_period_shift(b"aaaa"), Some(1));
        assert_eq!(smallest_period_shift(b"aab"), None);
        assert_eq!(smallest_period_shift(b"a"), None);
    }

    #[test]
    fn palette_check() {
        let c = Configuration::new(vec![Robot { id: RobotId(0), position: p(0, 1), light: Color::Done }]).unwrap();
        assert!(c.check_palette(Color::GATHERING_PALETTE, "gathering-fcom").is_err());
        assert!(c.check_palette(Color::THREE_TO_SEVEN_PALETTE, "3to7-fsta").is_ok());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let r = Robot { id: RobotId(1), position: p(0, 1), light: Color::Off };
        let mut r2 = r.clone();
        r2.position = p(1, 2);
        assert_eq!(Configuration::new(vec![r, r2]), Err(ConfigError::DuplicateId(RobotId(1))));
    }
}
