//! The step protocol: one newline-delimited JSON message per line, each
//! `{"type": ..., "payload": ...}`.
//!
//! Clients send `command` (payload: a simulator command), `undo`, `reset`,
//! `state` or `legal`. The server answers a command with `event`, `state`
//! and `legal`; undo, reset and state with `state` and `legal`; anything it
//! cannot apply with `error`, leaving the session untouched.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use circle_gather::configuration::RobotId;
use circle_gather::leadership::LeaderClass;
use circle_gather::protocol::{ProtocolKind, Rule};
use circle_gather::runconfig::RunConfig;
use circle_gather::simulator::{Command, RobotView, Simulation, TraceEvent};

use crate::args::ServeArgs;
use crate::exit::Failure;
use crate::run::resolve;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub payload: Value,
}

impl Message {
    pub fn new(kind: &str, payload: Value) -> Self {
        Message { kind: kind.to_string(), payload }
    }

    fn error(reason: &str, message: impl ToString) -> Self {
        Message::new("error", json!({"reason": reason, "message": message.to_string()}))
    }
}

/// What a robot would do if activated now.
#[derive(Debug, Serialize)]
struct Preview {
    robot: RobotId,
    rule: Rule,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<LeaderClass>,
}

/// One client's simulation with its undo stack.
pub struct Session {
    initial: Simulation,
    current: Simulation,
    history: Vec<Simulation>,
    log: Vec<Command>,
}

impl Session {
    pub fn new(sim: Simulation) -> Self {
        Session { initial: sim.clone(), current: sim, history: Vec::new(), log: Vec::new() }
    }

    pub fn simulation(&self) -> &Simulation {
        &self.current
    }

    /// Commands applied so far, in scripted-adversary order.
    pub fn log(&self) -> &[Command] {
        &self.log
    }

    pub fn state(&self) -> Message {
        let sim = &self.current;
        let previews: Vec<Preview> = sim
            .robots()
            .iter()
            .filter_map(|r| {
                let a = sim.preview(r.id)?;
                Some(Preview { robot: r.id, rule: a.rule, classification: a.classification })
            })
            .collect();
        Message::new(
            "state",
            json!({
                "seq": sim.seq(),
                "protocol": sim.protocol().kind(),
                "delta": sim.delta(),
                "robots": RobotView::of(sim),
                "multiplicities": sim.multiplicity_points(),
                "gathered": sim.protocol().kind() == ProtocolKind::GatheringFcom && sim.is_gathered(),
                "previews": previews,
                "undo_depth": self.history.len(),
                "hash": sim.state_hash(),
            }),
        )
    }

    pub fn legal(&self) -> Message {
        Message::new("legal", json!({"commands": self.current.legal_commands()}))
    }

    pub fn greeting(&self) -> Vec<Message> {
        vec![self.state(), self.legal()]
    }

    pub fn handle_line(&mut self, line: &str) -> Vec<Message> {
        match serde_json::from_str::<Message>(line) {
            Ok(m) => self.handle(m),
            Err(e) => vec![Message::error("malformed", e)],
        }
    }

    pub fn handle(&mut self, msg: Message) -> Vec<Message> {
        match msg.kind.as_str() {
            "command" => match Command::deserialize(&msg.payload) {
                Ok(cmd) => self.apply(cmd),
                Err(e) => vec![Message::error("bad_command", e)],
            },
            "undo" => match self.history.pop() {
                Some(prev) => {
                    self.current = prev;
                    self.log.pop();
                    self.greeting()
                }
                None => vec![Message::error("nothing_to_undo", "no command to undo")],
            },
            "reset" => {
                self.current = self.initial.clone();
                self.history.clear();
                self.log.clear();
                self.greeting()
            }
            "state" => self.greeting(),
            "legal" => vec![self.legal()],
            other => vec![Message::error("unknown_type", format!("unknown message type {other:?}"))],
        }
    }

    fn apply(&mut self, cmd: Command) -> Vec<Message> {
        let mut next = self.current.clone();
        match next.step(&cmd) {
            Ok(report) => {
                let event = TraceEvent {
                    seq: next.seq(),
                    command: cmd.clone(),
                    robots: RobotView::of(&next),
                    annotations: report,
                    hash: next.state_hash(),
                };
                self.history.push(std::mem::replace(&mut self.current, next));
                self.log.push(cmd);
                let event = serde_json::to_value(&event).expect("event serializes");
                vec![Message::new("event", event), self.state(), self.legal()]
            }
            Err(e) => vec![Message::error(e.reason(), e)],
        }
    }
}

fn send(w: &mut impl Write, msgs: &[Message]) -> io::Result<()> {
    for m in msgs {
        serde_json::to_writer(&mut *w, m)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Serves one connection until the client hangs up.
pub fn serve_connection(stream: TcpStream, rc: &RunConfig, base: Option<&std::path::Path>) -> io::Result<()> {
    let mut out = io::BufWriter::new(stream.try_clone()?);
    let sim = match rc.simulation(base) {
        Ok(s) => s,
        Err(e) => return send(&mut out, &[Message::error("bad_config", e)]),
    };
    let mut session = Session::new(sim);
    send(&mut out, &session.greeting())?;
    for line in BufReader::new(stream).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        send(&mut out, &session.handle_line(&line))?;
    }
    Ok(())
}

pub fn cmd_serve(a: &ServeArgs) -> Result<u8, Failure> {
    let (rc, base): (RunConfig, Option<PathBuf>) = resolve(&a.source)?;
    // fail before listening if the configuration cannot start
    rc.simulation(base.as_deref()).map_err(|e| Failure::input(e.to_string()))?;
    let listener = TcpListener::bind(&a.bind).map_err(|e| Failure::io(format!("cannot bind {}: {e}", a.bind)))?;
    let addr = listener.local_addr().map_err(|e| Failure::io(e.to_string()))?;
    println!("listening on {addr}");
    io::stdout().flush().ok();
    for stream in listener.incoming() {
        let stream = match stream {
            Ok(s) => s,
            Err(e) => {
                eprintln!("accept failed: {e}");
                continue;
            }
        };
        let rc = rc.clone();
        let base = base.clone();
        std::thread::spawn(move || {
            if let Err(e) = serve_connection(stream, &rc, base.as_deref()) {
                eprintln!("connection closed: {e}");
            }
        });
    }
    Ok(crate::exit::OK)
}
