//! Replayable JSON-lines traces.
//!
//! Line one is a header with the protocol, delta and start configuration;
//! every following line is one applied command with the full robot state
//! after it and the state hash.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::angles::{Angle, Position};
use crate::configuration::{Color, ConfigFile, Configuration, RobotId};
use crate::protocol::ProtocolKind;

use super::{Command, Phase, Simulation, StepError, StepReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RobotView {
    pub id: RobotId,
    pub pos: Position,
    pub light: Color,
    /// `idle`, `moving` or `paused`.
    pub phase: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub target: Option<Position>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub progress: Option<Angle>,
}

impl RobotView {
    pub fn of(sim: &Simulation) -> Vec<RobotView> {
        sim.robots()
            .iter()
            .map(|r| {
                let (phase, target, progress) = match &r.phase {
                    Phase::Idle => ("idle", None, None),
                    Phase::Moving(m) => (
                        if m.paused { "paused" } else { "moving" },
                        Some(m.target.clone()),
                        Some(m.progress.clone()),
                    ),
                };
                RobotView {
                    id: r.id,
                    pos: r.position.clone(),
                    light: r.light,
                    phase: phase.to_string(),
                    target,
                    progress,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub protocol: ProtocolKind,
    pub delta: Angle,
    pub initial: ConfigFile,
    pub initial_hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub seq: u64,
    pub command: Command,
    pub robots: Vec<RobotView>,
    pub annotations: StepReport,
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub header: TraceHeader,
    pub events: Vec<TraceEvent>,
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("trace i/o: {0}")]
    Io(#[from] io::Error),
    #[error("trace line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("trace is empty")]
    Empty,
    #[error("replay rejected the command at seq {seq}: {source}")]
    Rejected { seq: u64, source: StepError },
    #[error("replay diverged at seq {seq}")]
    Diverged { seq: u64 },
    #[error("trace header cannot be simulated: {0}")]
    Setup(String),
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    header: TraceHeader,
}

impl Trace {
    pub fn new(sim: &Simulation) -> Self {
        Trace {
            header: TraceHeader {
                protocol: sim.protocol().kind(),
                delta: sim.delta().clone(),
                initial: sim.configuration().to_file(),
                initial_hash: sim.state_hash(),
            },
            events: Vec::new(),
        }
    }

    pub(super) fn push(&mut self, sim: &Simulation, command: Command, report: StepReport, hash: String) {
        self.events.push(TraceEvent {
            seq: sim.seq(),
            command,
            robots: RobotView::of(sim),
            annotations: report,
            hash,
        });
    }

    pub fn commands(&self) -> Vec<Command> {
        self.events.iter().map(|e| e.command.clone()).collect()
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header = HeaderLine { header: self.header.clone() };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for e in &self.events {
            serde_json::to_writer(&mut w, e)?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self, TraceError> {
        let mut lines = r.lines().enumerate();
        let (_, first) = lines.next().ok_or(TraceError::Empty)?;
        let header: HeaderLine = serde_json::from_str(&first?)
            .map_err(|e| TraceError::Parse { line: 1, message: e.to_string() })?;
        let mut events = Vec::new();
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let e: TraceEvent = serde_json::from_str(&line)
                .map_err(|e| TraceError::Parse { line: i + 1, message: e.to_string() })?;
            events.push(e);
        }
        Ok(Trace { header: header.header, events })
    }

    /// Re-executes the commands and checks every recorded hash.
    pub fn replay(&self) -> Result<Simulation, TraceError> {
        let config = Configuration::from_file(&self.header.initial)
            .map_err(|e| TraceError::Setup(e.to_string()))?;
        let mut sim = Simulation::new(
            self.header.protocol.build().into(),
            &config,
            self.header.delta.clone(),
        )
        .map_err(|e| TraceError::Setup(e.to_string()))?;
        if sim.state_hash() != self.header.initial_hash {
            return Err(TraceError::Diverged { seq: 0 });
        }
        for e in &self.events {
            sim.step(&e.command).map_err(|source| TraceError::Rejected { seq: e.seq, source })?;
            if sim.state_hash() != e.hash {
                return Err(TraceError::Diverged { seq: e.seq });
            }
        }
        Ok(sim)
    }
}
