//! Externally driven execution of Look-Compute-Move cycles.
//!
//! The adversary owns the clock: every state change is one [`Command`].
//! `Activate` performs Look and Compute atomically and sets the light;
//! movement then proceeds through `Advance` commands until the target is
//! reached, the robot runs into another robot, or the adversary stops it
//! after at least `delta` of progress.

mod adversary;
mod monitor;
mod trace;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use adversary::{
    Adversary, AdversaryError, AdversarySpec, AntipodalHunter, Fair, FairRandom, FullySync,
    RoundRobin, Scripted, SemiSync,
};
pub use monitor::{MonitorReport, Violation, ViolationKind};
pub use trace::{RobotView, Trace, TraceError, TraceEvent, TraceHeader};

use crate::angles::{alpha_cw, antipode, Angle, Position};
use crate::configuration::{Color, ConfigError, Configuration, PointInfo, RobotId};
use crate::leadership::{LeaderClass, Model, Snapshot, SnapshotEntry};
use crate::protocol::{Action, Direction, Protocol, ProtocolKind, Rule};

use monitor::Monitors;

/// An in-flight move.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Motion {
    pub direction: Direction,
    pub origin: Position,
    pub target: Position,
    pub planned: Angle,
    pub progress: Angle,
    pub paused: bool,
    pub rule: Rule,
    /// A leader move computed while no multiplicity existed anywhere.
    pub formation: bool,
}

impl Motion {
    pub fn remaining(&self) -> Angle {
        self.planned.checked_sub(&self.progress).expect("progress never exceeds plan")
    }

    /// Least progress after which the adversary may stop the move.
    pub fn floor(&self, delta: &Angle) -> Angle {
        delta.clone().min(self.planned.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "snake_case")]
pub enum Phase {
    Idle,
    Moving(Motion),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RobotState {
    pub id: RobotId,
    pub position: Position,
    pub light: Color,
    pub phase: Phase,
    /// Rule of the most recent compute.
    pub last_rule: Option<Rule>,
}

impl RobotState {
    pub fn motion(&self) -> Option<&Motion> {
        match &self.phase {
            Phase::Moving(m) => Some(m),
            Phase::Idle => None,
        }
    }

    /// Idle, or stopped by contact.
    pub fn is_activatable(&self) -> bool {
        self.motion().map_or(true, |m| m.paused)
    }

    /// Moving and free to advance.
    pub fn is_advancing(&self) -> bool {
        self.motion().is_some_and(|m| !m.paused)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "cmd", rename_all = "snake_case")]
pub enum Command {
    Activate { robot: RobotId },
    /// Simultaneous Look by several robots; lights change only after all
    /// of them have computed.
    ActivateGroup { robots: Vec<RobotId> },
    Advance { robot: RobotId, amount: Angle },
    StopMove { robot: RobotId },
}

impl Command {
    pub fn robots(&self) -> Vec<RobotId> {
        match self {
            Command::Activate { robot }
            | Command::Advance { robot, .. }
            | Command::StopMove { robot } => vec![*robot],
            Command::ActivateGroup { robots } => robots.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("no robot {0}")]
    UnknownRobot(RobotId),
    #[error("robot {0} is moving and cannot be activated")]
    NotActivatable(RobotId),
    #[error("robot {0} appears twice in a group activation")]
    DuplicateInGroup(RobotId),
    #[error("group activation needs at least one robot")]
    EmptyGroup,
    #[error("robot {0} has no move in progress")]
    NotMoving(RobotId),
    #[error("robot {0} is paused until its next activation")]
    Paused(RobotId),
    #[error("advance amount must be positive")]
    NonPositiveAmount,
    #[error("robot {robot} has progressed {progress}, below the required {required}")]
    DeltaFloor { robot: RobotId, progress: Angle, required: Angle },
}

impl StepError {
    /// Stable machine-readable reason.
    pub fn reason(&self) -> &'static str {
        match self {
            StepError::UnknownRobot(_) => "unknown_robot",
            StepError::NotActivatable(_) => "not_activatable",
            StepError::DuplicateInGroup(_) => "duplicate_robot",
            StepError::EmptyGroup => "empty_group",
            StepError::NotMoving(_) => "not_moving",
            StepError::Paused(_) => "paused",
            StepError::NonPositiveAmount => "bad_amount",
            StepError::DeltaFloor { .. } => "delta_floor",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SetupError {
    #[error("delta must be positive")]
    NonPositiveDelta,
    #[error("delta must be less than a full turn")]
    DeltaTooLarge,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{protocol} needs exactly two robots")]
    RobotCount { protocol: ProtocolKind },
}

/// What one activation decided, for traces and adversaries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub robot: RobotId,
    pub rule: Rule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<LeaderClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub light: Option<Color>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Position>,
}

/// Side effects of a single command.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub decisions: Vec<Decision>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub contact: Option<RobotId>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub formed_multiplicity: Option<Position>,
    /// The new multiplicity came from a formation-phase leader move.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub primary: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub arrived: Option<bool>,
    pub multiplicities: usize,
    pub gathered: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub violations: Vec<Violation>,
}

/// A legal move of the adversary at the current state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "cmd", rename_all = "snake_case")]
pub enum LegalCommand {
    Activate {
        robot: RobotId,
    },
    Advance {
        robot: RobotId,
        /// Advancing by this much or more reaches the target or the first obstacle.
        max_amount: Angle,
        /// Earliest point at which a stop becomes legal.
        min_stop: Position,
    },
    StopMove {
        robot: RobotId,
    },
}

/// Observation of `at` with the given model, from occupied points.
pub fn observe(
    points: &BTreeMap<Position, PointInfo>,
    at: &Position,
    own_light: Color,
    model: Model,
) -> Snapshot {
    let blind = antipode(at);
    let mut entries: Vec<SnapshotEntry> = points
        .iter()
        .filter(|(q, _)| *q != at && **q != blind)
        .map(|(q, info)| SnapshotEntry {
            offset: alpha_cw(at, q),
            occupancy: info.occupancy(),
            lights: if model.sees_lights() { info.lights.clone() } else { Default::default() },
        })
        .collect();
    entries.sort_by(|a, b| a.offset.cmp(&b.offset));
    let self_occupancy = points.get(at).expect("observer occupies its point").occupancy();
    let own = model.reads_own_light().then_some(own_light);
    Snapshot::new(model, self_occupancy, own, entries).expect("observation is well formed")
}

/// Snapshot of one robot of a static configuration.
pub fn observe_in(config: &Configuration, robot: RobotId, model: Model) -> Option<Snapshot> {
    let r = config.robots().iter().find(|r| r.id == robot)?;
    Some(observe(&config.occupancy(), &r.position, r.light, model))
}

#[derive(Clone)]
pub struct Simulation {
    protocol: Arc<dyn Protocol>,
    delta: Angle,
    robots: Vec<RobotState>,
    seq: u64,
    /// Bumped on every change of position, light, or phase.
    version: u64,
    quiescence_checked: Option<(u64, bool)>,
    monitors: Monitors,
}

impl std::fmt::Debug for Simulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Simulation")
            .field("protocol", &self.protocol.kind())
            .field("delta", &self.delta)
            .field("robots", &self.robots)
            .field("seq", &self.seq)
            .finish()
    }
}

impl Simulation {
    /// Validates the start configuration for the protocol.
    pub fn new(
        protocol: Arc<dyn Protocol>,
        initial: &Configuration,
        delta: Angle,
    ) -> Result<Self, SetupError> {
        if delta.is_zero() {
            return Err(SetupError::NonPositiveDelta);
        }
        if delta >= Angle::full() {
            return Err(SetupError::DeltaTooLarge);
        }
        initial.check_palette(protocol.palette(), protocol.kind().name())?;
        initial.validate_initial()?;
        if protocol.kind() == ProtocolKind::ThreeToSevenFsta && initial.len() != 2 {
            return Err(SetupError::RobotCount { protocol: protocol.kind() });
        }
        Ok(Self::unchecked(protocol, initial, delta))
    }

    /// No validation of the start configuration beyond a positive delta.
    pub fn unchecked(protocol: Arc<dyn Protocol>, initial: &Configuration, delta: Angle) -> Self {
        assert!(!delta.is_zero(), "delta must be positive");
        let mut robots: Vec<RobotState> = initial
            .robots()
            .iter()
            .map(|r| RobotState {
                id: r.id,
                position: r.position.clone(),
                light: r.light,
                phase: Phase::Idle,
                last_rule: None,
            })
            .collect();
        robots.sort_by_key(|r| r.id);
        let monitors = Monitors::new(protocol.kind(), &robots);
        Simulation {
            protocol,
            delta,
            robots,
            seq: 0,
            version: 0,
            quiescence_checked: None,
            monitors,
        }
    }

    pub fn protocol(&self) -> &dyn Protocol {
        self.protocol.as_ref()
    }

    pub fn protocol_arc(&self) -> Arc<dyn Protocol> {
        self.protocol.clone()
    }

    pub fn delta(&self) -> &Angle {
        &self.delta
    }

    pub fn robots(&self) -> &[RobotState] {
        &self.robots
    }

    /// Commands applied so far.
    pub fn seq(&self) -> u64 {
        self.seq
    }

    pub fn monitors(&self) -> MonitorReport {
        self.monitors.report()
    }

    fn index(&self, id: RobotId) -> Result<usize, StepError> {
        self.robots.binary_search_by_key(&id, |r| r.id).map_err(|_| StepError::UnknownRobot(id))
    }

    pub fn robot(&self, id: RobotId) -> Option<&RobotState> {
        self.index(id).ok().map(|i| &self.robots[i])
    }

    /// Positions and lights only.
    pub fn configuration(&self) -> Configuration {
        let robots = self
            .robots
            .iter()
            .map(|r| crate::configuration::Robot {
                id: r.id,
                position: r.position.clone(),
                light: r.light,
            })
            .collect();
        Configuration::new(robots).expect("ids are unique")
    }

    pub fn occupancy(&self) -> BTreeMap<Position, PointInfo> {
        let mut map: BTreeMap<Position, PointInfo> = BTreeMap::new();
        for r in &self.robots {
            let e = map
                .entry(r.position.clone())
                .or_insert_with(|| PointInfo { count: 0, lights: Default::default() });
            e.count += 1;
            e.lights.insert(r.light);
        }
        map
    }

    pub fn multiplicity_points(&self) -> Vec<Position> {
        self.occupancy().into_iter().filter(|(_, i)| i.count >= 2).map(|(p, _)| p).collect()
    }

    pub fn snapshot_of(&self, id: RobotId) -> Option<Snapshot> {
        let r = self.robot(id)?;
        Some(observe(&self.occupancy(), &r.position, r.light, self.protocol.model()))
    }

    /// What the robot would compute if activated now.
    pub fn preview(&self, id: RobotId) -> Option<Action> {
        self.snapshot_of(id).map(|s| self.protocol.compute(&s))
    }

    /// All robots at one point with nothing left to traverse.
    pub fn is_gathered(&self) -> bool {
        let first = &self.robots[0].position;
        self.robots.iter().all(|r| r.position == *first && !r.is_advancing())
    }

    /// Nobody moving and no activation would change anything.
    pub fn is_quiescent(&mut self) -> bool {
        if let Some((v, q)) = self.quiescence_checked {
            if v == self.version {
                return q;
            }
        }
        let q = self.robots.iter().all(|r| !r.is_advancing()) && {
            let occ = self.occupancy();
            let model = self.protocol.model();
            self.robots.iter().all(|r| {
                let act = self.protocol.compute(&observe(&occ, &r.position, r.light, model));
                act.movement.is_none() && act.set_light.map_or(true, |c| c == r.light)
            })
        };
        self.quiescence_checked = Some((self.version, q));
        q
    }

    pub fn legal_commands(&self) -> Vec<LegalCommand> {
        let mut out = Vec::new();
        for r in &self.robots {
            match r.motion() {
                Some(m) if !m.paused => {
                    let reach = self.reach(r, m);
                    let floor = m.floor(&self.delta);
                    let min_stop = match m.direction {
                        Direction::Cw => m.origin.cw(&floor),
                        Direction::Ccw => m.origin.ccw(&floor),
                    };
                    out.push(LegalCommand::Advance { robot: r.id, max_amount: reach, min_stop });
                    if m.progress >= floor {
                        out.push(LegalCommand::StopMove { robot: r.id });
                    }
                }
                _ => out.push(LegalCommand::Activate { robot: r.id }),
            }
        }
        out
    }

    pub fn can_stop(&self, id: RobotId) -> bool {
        self.robot(id)
            .and_then(|r| r.motion())
            .is_some_and(|m| !m.paused && m.progress >= m.floor(&self.delta))
    }

    /// Distance the mover can cover before its target or first obstacle.
    fn reach(&self, r: &RobotState, m: &Motion) -> Angle {
        let remaining = m.remaining();
        match self.first_obstacle(r, m.direction, &remaining) {
            Some((d, _)) => d,
            None => remaining,
        }
    }

    fn first_obstacle(
        &self,
        mover: &RobotState,
        direction: Direction,
        within: &Angle,
    ) -> Option<(Angle, RobotId)> {
        self.robots
            .iter()
            .filter(|o| o.id != mover.id && o.position != mover.position)
            .map(|o| {
                let d = match direction {
                    Direction::Cw => alpha_cw(&mover.position, &o.position),
                    Direction::Ccw => alpha_cw(&o.position, &mover.position),
                };
                (d, o.id)
            })
            .filter(|(d, _)| d <= within)
            .min()
    }

    /// Applies one command, or rejects it with no state change.
    pub fn step(&mut self, cmd: &Command) -> Result<StepReport, StepError> {
        let mut report = StepReport::default();
        let moved: Option<Direction> = match cmd {
            Command::Activate { robot } => {
                let i = self.index(*robot)?;
                if !self.robots[i].is_activatable() {
                    return Err(StepError::NotActivatable(*robot));
                }
                let occ = self.occupancy();
                let clean = occ.values().all(|p| p.count < 2);
                let (id, act) = self.compute_for(i, &occ);
                report.decisions.push(self.apply_action(i, id, act, clean));
                None
            }
            Command::ActivateGroup { robots } => {
                if robots.is_empty() {
                    return Err(StepError::EmptyGroup);
                }
                let mut idx = Vec::with_capacity(robots.len());
                for id in robots {
                    let i = self.index(*id)?;
                    if !self.robots[i].is_activatable() {
                        return Err(StepError::NotActivatable(*id));
                    }
                    if idx.contains(&i) {
                        return Err(StepError::DuplicateInGroup(*id));
                    }
                    idx.push(i);
                }
                let occ = self.occupancy();
                let clean = occ.values().all(|p| p.count < 2);
                let computed: Vec<_> = idx.iter().map(|&i| (i, self.compute_for(i, &occ))).collect();
                for (i, (id, act)) in computed {
                    report.decisions.push(self.apply_action(i, id, act, clean));
                }
                None
            }
            Command::Advance { robot, amount } => {
                let i = self.index(*robot)?;
                let m = match &self.robots[i].phase {
                    Phase::Moving(m) if m.paused => return Err(StepError::Paused(*robot)),
                    Phase::Moving(m) => m.clone(),
                    Phase::Idle => return Err(StepError::NotMoving(*robot)),
                };
                if amount.is_zero() {
                    return Err(StepError::NonPositiveAmount);
                }
                let dir = m.direction;
                self.advance(i, m, amount, &mut report);
                Some(dir)
            }
            Command::StopMove { robot } => {
                let i = self.index(*robot)?;
                let m = match &self.robots[i].phase {
                    Phase::Moving(m) if m.paused => return Err(StepError::Paused(*robot)),
                    Phase::Moving(m) => m,
                    Phase::Idle => return Err(StepError::NotMoving(*robot)),
                };
                let required = m.floor(&self.delta);
                if m.progress < required {
                    return Err(StepError::DeltaFloor {
                        robot: *robot,
                        progress: m.progress.clone(),
                        required,
                    });
                }
                self.robots[i].phase = Phase::Idle;
                self.version += 1;
                None
            }
        };
        self.seq += 1;
        let occ = self.occupancy();
        report.multiplicities = occ.values().filter(|i| i.count >= 2).count();
        report.gathered = self.is_gathered();
        if let Some(direction) = moved {
            let mover = self.index(cmd.robots()[0]).expect("validated");
            report.violations = self.monitors.after_move(
                self.seq,
                &self.robots,
                mover,
                &occ,
                report.formed_multiplicity.is_some(),
                report.primary,
                report.contact,
                direction,
            );
        }
        Ok(report)
    }

    fn compute_for(&self, i: usize, occ: &BTreeMap<Position, PointInfo>) -> (RobotId, Action) {
        let r = &self.robots[i];
        let snap = observe(occ, &r.position, r.light, self.protocol.model());
        (r.id, self.protocol.compute(&snap))
    }

    fn apply_action(&mut self, i: usize, id: RobotId, act: Action, clean: bool) -> Decision {
        let r = &mut self.robots[i];
        if let Some(c) = act.set_light {
            r.light = c;
        }
        r.last_rule = Some(act.rule);
        let target = act.movement.as_ref().map(|mv| mv.target_from(&r.position));
        r.phase = match act.movement {
            Some(mv) => Phase::Moving(Motion {
                direction: mv.direction,
                origin: r.position.clone(),
                target: target.clone().expect("target of a move"),
                planned: mv.arc,
                progress: Angle::zero(),
                paused: false,
                rule: act.rule,
                formation: clean && act.rule.is_leader_move(),
            }),
            None => Phase::Idle,
        };
        self.version += 1;
        Decision {
            robot: id,
            rule: act.rule,
            classification: act.classification,
            light: act.set_light,
            target,
        }
    }

    fn advance(&mut self, i: usize, mut m: Motion, amount: &Angle, report: &mut StepReport) {
        let remaining = m.remaining();
        let want = amount.clone().min(remaining);
        let obstacle = self.first_obstacle(&self.robots[i], m.direction, &want);
        let travel = obstacle.as_ref().map_or(want.clone(), |(d, _)| d.clone());
        let pos = match m.direction {
            Direction::Cw => self.robots[i].position.cw(&travel),
            Direction::Ccw => self.robots[i].position.ccw(&travel),
        };
        m.progress = m.progress.checked_add(&travel).expect("bounded by plan");
        let arrived = m.progress == m.planned;
        if let Some((_, id)) = obstacle {
            report.contact = Some(id);
            let joined = self.robots.iter().filter(|r| r.position == pos).count();
            if joined == 1 {
                report.formed_multiplicity = Some(pos.clone());
                report.primary = m.formation;
            }
        }
        let r = &mut self.robots[i];
        r.position = pos;
        r.phase = if arrived {
            Phase::Idle
        } else if report.contact.is_some() {
            m.paused = true;
            Phase::Moving(m)
        } else {
            Phase::Moving(m)
        };
        report.arrived = Some(arrived);
        self.version += 1;
    }

    /// Hex SHA-256 of positions, lights and phases.
    pub fn state_hash(&self) -> String {
        let mut h = Sha256::new();
        for r in &self.robots {
            h.update(r.id.0.to_le_bytes());
            h.update(r.position.to_string().as_bytes());
            h.update([0]);
            h.update(r.light.name().as_bytes());
            h.update([0]);
            match &r.phase {
                Phase::Idle => h.update(b"idle"),
                Phase::Moving(m) => {
                    let dir = match m.direction {
                        Direction::Cw => "cw",
                        Direction::Ccw => "ccw",
                    };
                    h.update(
                        format!(
                            "move {dir} {} {} {} {} {} {}",
                            m.origin, m.target, m.planned, m.progress, m.paused, m.formation
                        )
                        .as_bytes(),
                    );
                }
            }
            h.update([0xff]);
        }
        hex::encode(h.finalize())
    }

    /// Checks that a gathered swarm stays put when everyone is activated.
    pub fn gathered_is_stable(&self) -> bool {
        let occ = self.occupancy();
        let model = self.protocol.model();
        self.robots.iter().all(|r| {
            self.protocol.compute(&observe(&occ, &r.position, r.light, model)).movement.is_none()
        })
    }
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Gathered { point: Position },
    /// No robot would act again; used as the end of 3to7 runs.
    Quiescent,
    BudgetExhausted,
    InvariantViolation { violation: Violation },
    /// The adversary had no further command.
    Stalled,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Gathered { .. } => "gathered",
            Outcome::Quiescent => "quiescent",
            Outcome::BudgetExhausted => "budget_exhausted",
            Outcome::InvariantViolation { .. } => "invariant_violation",
            Outcome::Stalled => "stalled",
        }
    }
}

/// Default command budget: `400 * n * ceil(1 / delta)`.
pub fn default_budget(n: usize, delta: &Angle) -> u64 {
    let inv = crate::exact::Rational::one().div(delta.value());
    let num = inv.numer();
    let den = inv.denom();
    let ceil = num_integer::Integer::div_ceil(&num, &den);
    let ceil: u64 = ceil.try_into().unwrap_or(u64::MAX / 1024);
    400u64.saturating_mul(n as u64).saturating_mul(ceil)
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub budget: Option<u64>,
    pub record: bool,
    /// Keep the per-step state hash even without a full trace.
    pub hashes: bool,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub outcome: Outcome,
    pub steps: u64,
    pub monitors: MonitorReport,
    pub trace: Option<Trace>,
    pub hashes: Vec<String>,
    pub final_hash: String,
}

/// Drives `sim` with `adversary` until an end condition.
pub fn run(sim: &mut Simulation, adversary: &mut dyn Adversary, opts: &RunOptions) -> RunResult {
    let budget = opts.budget.unwrap_or_else(|| default_budget(sim.robots.len(), &sim.delta));
    let mut trace = opts.record.then(|| Trace::new(sim));
    let mut hashes = Vec::new();
    let gathering = sim.protocol.kind() == ProtocolKind::GatheringFcom;
    let outcome = loop {
        if gathering && sim.is_gathered() {
            if !sim.gathered_is_stable() {
                let v = sim.monitors.left_gathering(sim.seq);
                break Outcome::InvariantViolation { violation: v };
            }
            break Outcome::Gathered { point: sim.robots[0].position.clone() };
        }
        if sim.is_quiescent() {
            break Outcome::Quiescent;
        }
        if sim.seq >= budget {
            break Outcome::BudgetExhausted;
        }
        let Some(cmd) = adversary.next_command(sim) else {
            break Outcome::Stalled;
        };
        let report = match sim.step(&cmd) {
            Ok(r) => r,
            Err(e) => panic!("adversary issued an illegal command {cmd:?}: {e}"),
        };
        if opts.record || opts.hashes {
            let hash = sim.state_hash();
            if let Some(t) = trace.as_mut() {
                t.push(sim, cmd, report.clone(), hash.clone());
            }
            hashes.push(hash);
        }
        if let Some(v) = report.violations.first() {
            break Outcome::InvariantViolation { violation: v.clone() };
        }
    };
    RunResult {
        outcome,
        steps: sim.seq,
        monitors: sim.monitors(),
        trace,
        hashes,
        final_hash: sim.state_hash(),
    }
}

#[cfg(test)]
mod tests;
