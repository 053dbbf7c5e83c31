//! Built-in schedulers.
//!
//! Every strategy only ever issues commands that are legal in the state it
//! is shown, so a run never needs to recover from a rejected step.

use std::collections::VecDeque;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::angles::{alpha_cw, antipode, Angle};
use crate::configuration::{Color, RobotId};
use crate::protocol::Direction;

use super::{Command, RobotState, Simulation};

pub trait Adversary: Send {
    fn name(&self) -> &str;
    /// `None` ends the run.
    fn next_command(&mut self, sim: &Simulation) -> Option<Command>;
}

fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn remaining(r: &RobotState) -> Option<Angle> {
    r.motion().filter(|m| !m.paused).map(|m| m.remaining())
}

/// `delta * j / m` for small random `j` and `m`.
fn delta_piece(rng: &mut ChaCha8Rng, delta: &Angle) -> Angle {
    let j = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=3);
    delta.scaled(j, m).unwrap_or_else(|| delta.clone())
}

fn random_step(rng: &mut ChaCha8Rng, sim: &Simulation, r: &RobotState, p_stop: f64) -> Command {
    if r.is_activatable() {
        return Command::Activate { robot: r.id };
    }
    if sim.can_stop(r.id) && rng.gen_bool(p_stop) {
        return Command::StopMove { robot: r.id };
    }
    Command::Advance { robot: r.id, amount: delta_piece(rng, sim.delta()) }
}

/// Cycles through robots in id order; moves are never truncated.
#[derive(Debug, Default)]
pub struct RoundRobin {
    next: usize,
}

impl Adversary for RoundRobin {
    fn name(&self) -> &str {
        "round-robin"
    }

    fn next_command(&mut self, sim: &Simulation) -> Option<Command> {
        let robots = sim.robots();
        let r = &robots[self.next % robots.len()];
        self.next += 1;
        Some(match remaining(r) {
            Some(rest) => Command::Advance { robot: r.id, amount: rest },
            None => Command::Activate { robot: r.id },
        })
    }
}

#[derive(Debug)]
enum Stage {
    Look,
    Collect,
    /// Pending movers; `true` marks a stop after a truncated advance.
    Move(VecDeque<(RobotId, bool)>),
}

fn collect_movers(sim: &Simulation) -> VecDeque<(RobotId, bool)> {
    sim.robots().iter().filter(|r| r.is_advancing()).map(|r| (r.id, false)).collect()
}

/// Smallest `j` with `delta * j >= arc`.
fn ceil_steps(arc: &Angle, delta: &Angle) -> i64 {
    let q = arc.value().div(delta.value());
    let c = num_integer::Integer::div_ceil(&q.numer(), &q.denom());
    c.try_into().unwrap_or(i64::MAX)
}

/// Rounds in which every robot looks at the same instant, then all movers
/// complete their moves.
#[derive(Debug)]
pub struct FullySync {
    stage: Stage,
}

impl Default for FullySync {
    fn default() -> Self {
        FullySync { stage: Stage::Look }
    }
}

impl Adversary for FullySync {
    fn name(&self) -> &str {
        "fsync"
    }

    fn next_command(&mut self, sim: &Simulation) -> Option<Command> {
        loop {
            match &mut self.stage {
                Stage::Look => {
                    self.stage = Stage::Collect;
                    let robots: Vec<RobotId> =
                        sim.robots().iter().filter(|r| r.is_activatable()).map(|r| r.id).collect();
                    if !robots.is_empty() {
                        return Some(Command::ActivateGroup { robots });
                    }
                }
                Stage::Collect => {
                    let movers = collect_movers(sim);
                    self.stage = if movers.is_empty() { Stage::Look } else { Stage::Move(movers) };
                }
                Stage::Move(queue) => match queue.pop_front() {
                    None => self.stage = Stage::Look,
                    Some((id, _)) => {
                        if let Some(rest) = sim.robot(id).and_then(remaining) {
                            return Some(Command::Advance { robot: id, amount: rest });
                        }
                    }
                },
            }
        }
    }
}

/// Rounds with a random subset of simultaneous looks; each move of the
/// round either completes or is cut short after a random multiple of delta.
#[derive(Debug)]
pub struct SemiSync {
    rng: ChaCha8Rng,
    p_active: f64,
    p_truncate: f64,
    stage: Stage,
    /// Rounds since each robot (by index) last looked.
    starved: Vec<u32>,
}

impl SemiSync {
    pub fn new(seed: u64, p_active: f64, p_truncate: f64) -> Self {
        SemiSync { rng: rng_from(seed), p_active, p_truncate, stage: Stage::Look, starved: Vec::new() }
    }

    fn look(&mut self, sim: &Simulation) -> Option<Command> {
        let robots = sim.robots();
        if self.starved.len() != robots.len() {
            self.starved = vec![0; robots.len()];
        }
        let pool: Vec<usize> = (0..robots.len()).filter(|&i| robots[i].is_activatable()).collect();
        if pool.is_empty() {
            return None;
        }
        let mut chosen: Vec<usize> = Vec::new();
        for &i in &pool {
            if self.starved[i] >= 4 || self.rng.gen_bool(self.p_active) {
                chosen.push(i);
            }
        }
        if chosen.is_empty() {
            chosen.push(pool[self.rng.gen_range(0..pool.len())]);
        }
        for (i, s) in self.starved.iter_mut().enumerate() {
            *s = if chosen.contains(&i) { 0 } else { s.saturating_add(1) };
        }
        Some(Command::ActivateGroup { robots: chosen.into_iter().map(|i| robots[i].id).collect() })
    }
}

impl Adversary for SemiSync {
    fn name(&self) -> &str {
        "ssync"
    }

    fn next_command(&mut self, sim: &Simulation) -> Option<Command> {
        loop {
            match &mut self.stage {
                Stage::Look => {
                    self.stage = Stage::Collect;
                    if let Some(cmd) = self.look(sim) {
                        return Some(cmd);
                    }
                }
                Stage::Collect => {
                    let movers = collect_movers(sim);
                    self.stage = if movers.is_empty() { Stage::Look } else { Stage::Move(movers) };
                }
                Stage::Move(queue) => {
                    let Some((id, stop)) = queue.pop_front() else {
                        self.stage = Stage::Look;
                        continue;
                    };
                    if stop {
                        if sim.can_stop(id) {
                            return Some(Command::StopMove { robot: id });
                        }
                        continue;
                    }
                    let Some(rest) = sim.robot(id).and_then(remaining) else { continue };
                    let delta = sim.delta();
                    if rest > *delta && self.rng.gen_bool(self.p_truncate) {
                        let max_j = (ceil_steps(&rest, delta) - 1).clamp(1, 1 << 20);
                        let j = self.rng.gen_range(1..=max_j);
                        let amount = delta.scaled(j, 1).filter(|a| *a < rest).unwrap_or(delta.clone());
                        queue.push_front((id, true));
                        return Some(Command::Advance { robot: id, amount });
                    }
                    return Some(Command::Advance { robot: id, amount: rest });
                }
            }
        }
    }
}

/// Uniformly random robot; moves advance in fractions of delta and are
/// often stopped as soon as the delta floor allows.
#[derive(Debug)]
pub struct FairRandom {
    rng: ChaCha8Rng,
    p_stop: f64,
}

impl FairRandom {
    pub fn new(seed: u64, p_stop: f64) -> Self {
        FairRandom { rng: rng_from(seed), p_stop }
    }
}

impl Adversary for FairRandom {
    fn name(&self) -> &str {
        "fair-random"
    }

    fn next_command(&mut self, sim: &Simulation) -> Option<Command> {
        let robots = sim.robots();
        let r = &robots[self.rng.gen_range(0..robots.len())];
        Some(random_step(&mut self.rng, sim, r, self.p_stop))
    }
}

/// Stops movers exactly where they become antipodal to another robot, lets
/// the blinded robot look right then, and keeps leaders waiting.
#[derive(Debug)]
pub struct AntipodalHunter {
    rng: ChaCha8Rng,
    pending: VecDeque<Command>,
}

impl AntipodalHunter {
    pub fn new(seed: u64) -> Self {
        AntipodalHunter { rng: rng_from(seed), pending: VecDeque::new() }
    }

    fn is_leaderish(r: &RobotState) -> bool {
        matches!(r.light, Color::Cognizant | Color::Undecided | Color::Verify)
            || r.last_rule.is_some_and(|rule| rule.is_leader_move())
    }

    /// Nearest point ahead of a mover, short of its reach, that is
    /// antipodal to another robot.
    fn hunt(sim: &Simulation, r: &RobotState) -> Option<(Angle, Vec<RobotId>)> {
        let m = r.motion().filter(|m| !m.paused)?;
        let reach = sim
            .legal_commands()
            .into_iter()
            .find_map(|c| match c {
                super::LegalCommand::Advance { robot, max_amount, .. } if robot == r.id => Some(max_amount),
                _ => None,
            })?;
        let mut best: Option<(Angle, Vec<RobotId>)> = None;
        for o in sim.robots() {
            if o.id == r.id || o.position == r.position {
                continue;
            }
            let blind = antipode(&o.position);
            let d = match m.direction {
                Direction::Cw => alpha_cw(&r.position, &blind),
                Direction::Ccw => alpha_cw(&blind, &r.position),
            };
            if d.is_zero() || d >= reach {
                continue;
            }
            match &mut best {
                Some((bd, ids)) if *bd == d => ids.push(o.id),
                Some((bd, _)) if *bd < d => {}
                _ => best = Some((d, vec![o.id])),
            }
        }
        best
    }

    fn still_legal(sim: &Simulation, cmd: &Command) -> bool {
        match cmd {
            Command::StopMove { robot } => sim.can_stop(*robot),
            Command::Activate { robot } => sim.robot(*robot).is_some_and(|r| r.is_activatable()),
            _ => false,
        }
    }
}

impl Adversary for AntipodalHunter {
    fn name(&self) -> &str {
        "antipodal-hunter"
    }

    fn next_command(&mut self, sim: &Simulation) -> Option<Command> {
        while let Some(cmd) = self.pending.pop_front() {
            if Self::still_legal(sim, &cmd) {
                return Some(cmd);
            }
        }
        if self.rng.gen_bool(0.8) {
            let movers: Vec<&RobotState> = sim.robots().iter().filter(|r| r.is_advancing()).collect();
            for r in movers {
                if let Some((d, blinded)) = Self::hunt(sim, r) {
                    self.pending.push_back(Command::StopMove { robot: r.id });
                    for id in blinded {
                        self.pending.push_back(Command::Activate { robot: id });
                    }
                    return Some(Command::Advance { robot: r.id, amount: d });
                }
            }
        }
        let robots = sim.robots();
        let calm: Vec<&RobotState> = robots.iter().filter(|r| !Self::is_leaderish(r)).collect();
        let r = if !calm.is_empty() && self.rng.gen_bool(0.85) {
            calm[self.rng.gen_range(0..calm.len())]
        } else {
            &robots[self.rng.gen_range(0..robots.len())]
        };
        Some(random_step(&mut self.rng, sim, r, 0.5))
    }
}

/// Plays back a fixed command list.
#[derive(Debug, Clone)]
pub struct Scripted {
    commands: Vec<Command>,
    pos: usize,
}

impl Scripted {
    pub fn new(commands: Vec<Command>) -> Self {
        Scripted { commands, pos: 0 }
    }
}

impl Adversary for Scripted {
    fn name(&self) -> &str {
        "scripted"
    }

    fn next_command(&mut self, _sim: &Simulation) -> Option<Command> {
        let c = self.commands.get(self.pos).cloned();
        self.pos += 1;
        c
    }
}

/// Guarantees every robot a command at least once per `window` commands.
///
/// A starved idle robot is activated; a starved mover is stopped when the
/// delta floor allows, otherwise advanced by delta.
pub struct Fair<A> {
    inner: A,
    window: u64,
    last: Vec<u64>,
    count: u64,
}

impl<A: Adversary> Fair<A> {
    pub fn new(inner: A, window: u64) -> Self {
        Fair { inner, window: window.max(1), last: Vec::new(), count: 0 }
    }
}

impl<A: Adversary> Adversary for Fair<A> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn next_command(&mut self, sim: &Simulation) -> Option<Command> {
        let robots = sim.robots();
        if self.last.len() != robots.len() {
            self.last = vec![self.count; robots.len()];
        }
        self.count += 1;
        let starved = (0..robots.len())
            .filter(|&i| self.count - self.last[i] > self.window)
            .min_by_key(|&i| self.last[i]);
        let cmd = match starved {
            Some(i) => {
                let r = &robots[i];
                if r.is_activatable() {
                    Command::Activate { robot: r.id }
                } else if sim.can_stop(r.id) {
                    Command::StopMove { robot: r.id }
                } else {
                    Command::Advance { robot: r.id, amount: sim.delta().clone() }
                }
            }
            None => self.inner.next_command(sim)?,
        };
        for id in cmd.robots() {
            if let Ok(i) = robots.binary_search_by_key(&id, |r| r.id) {
                self.last[i] = self.count;
            }
        }
        Some(cmd)
    }
}

fn half() -> f64 {
    0.5
}

fn quarter() -> f64 {
    0.25
}

/// Adversary selection as it appears in run configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AdversarySpec {
    Fsync,
    Ssync {
        #[serde(default = "half")]
        p_active: f64,
        #[serde(default = "half")]
        p_truncate: f64,
    },
    FairRandom {
        #[serde(default = "quarter")]
        p_stop: f64,
        #[serde(default)]
        window: Option<u64>,
    },
    AntipodalHunter {
        #[serde(default)]
        window: Option<u64>,
    },
    RoundRobin,
    Scripted {
        commands: Vec<Command>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdversaryError {
    #[error("unknown adversary {0:?}; expected fsync, ssync, fair-random, antipodal-hunter or round-robin")]
    Unknown(String),
    #[error("probability {0} outside [0, 1]")]
    Probability(String),
}

impl AdversarySpec {
    /// Every built-in strategy that is fair by construction.
    pub fn builtin_fair() -> Vec<AdversarySpec> {
        vec![
            AdversarySpec::Fsync,
            AdversarySpec::Ssync { p_active: half(), p_truncate: half() },
            AdversarySpec::FairRandom { p_stop: quarter(), window: None },
            AdversarySpec::AntipodalHunter { window: None },
            AdversarySpec::RoundRobin,
        ]
    }

    pub fn label(&self) -> &'static str {
        match self {
            AdversarySpec::Fsync => "fsync",
            AdversarySpec::Ssync { .. } => "ssync",
            AdversarySpec::FairRandom { .. } => "fair-random",
            AdversarySpec::AntipodalHunter { .. } => "antipodal-hunter",
            AdversarySpec::RoundRobin => "round-robin",
            AdversarySpec::Scripted { .. } => "scripted",
        }
    }

    pub fn validate(&self) -> Result<(), AdversaryError> {
        let probs: &[f64] = match self {
            AdversarySpec::Ssync { p_active, p_truncate } => &[*p_active, *p_truncate],
            AdversarySpec::FairRandom { p_stop, .. } => std::slice::from_ref(p_stop),
            _ => &[],
        };
        for p in probs {
            if !(0.0..=1.0).contains(p) {
                return Err(AdversaryError::Probability(p.to_string()));
            }
        }
        Ok(())
    }

    /// `n` robots; the default fairness window is `8 * n`.
    pub fn build(&self, n: usize, seed: u64) -> Box<dyn Adversary> {
        let default_window = 8 * n.max(1) as u64;
        match self {
            AdversarySpec::Fsync => Box::new(FullySync::default()),
            AdversarySpec::Ssync { p_active, p_truncate } => {
                Box::new(SemiSync::new(seed, *p_active, *p_truncate))
            }
            AdversarySpec::FairRandom { p_stop, window } => Box::new(Fair::new(
                FairRandom::new(seed, *p_stop),
                window.unwrap_or(default_window),
            )),
            AdversarySpec::AntipodalHunter { window } => Box::new(Fair::new(
                AntipodalHunter::new(seed),
                window.unwrap_or(default_window),
            )),
            AdversarySpec::RoundRobin => Box::new(RoundRobin::default()),
            AdversarySpec::Scripted { commands } => Box::new(Scripted::new(commands.clone())),
        }
    }
}

impl FromStr for AdversarySpec {
    type Err = AdversaryError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AdversarySpec::builtin_fair()
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| AdversaryError::Unknown(s.to_string()))
    }
}
