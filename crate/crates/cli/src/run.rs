use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use circle_gather::angles::{Angle, Position};
use circle_gather::configuration::{Color, ConfigFile, RobotSpec};
use circle_gather::protocol::ProtocolKind;
use circle_gather::runconfig::{InitialConfig, RunConfig, RunConfigError};
use circle_gather::simulator::{AdversarySpec, Outcome, RunResult};

use crate::args::{RunArgs, RunSource};
use crate::exit::{self, Failure};

/// The run configuration described by the file and flags, plus the
/// directory relative configuration paths are resolved against.
pub fn resolve(src: &RunSource) -> Result<(RunConfig, Option<PathBuf>), Failure> {
    let (mut rc, base) = match &src.run_config {
        Some(path) => {
            let rc = RunConfig::load(path).map_err(input)?;
            (Some(rc), path.parent().map(Path::to_path_buf))
        }
        None => (None, None),
    };
    let initial = match (&src.config, &src.positions) {
        // flag paths are relative to the working directory, not the run config
        (Some(p), _) => Some(InitialConfig::Path(std::path::absolute(p).unwrap_or_else(|_| p.clone()))),
        (None, Some(list)) => Some(InitialConfig::Inline(parse_positions(list)?)),
        (None, None) => None,
    };
    let adversary = src.adversary.as_deref().map(parse_adversary).transpose()?;
    let rc = match rc.take() {
        Some(mut rc) => {
            if let Some(p) = src.protocol {
                rc.protocol = p;
            }
            if let Some(i) = initial {
                rc.initial = i;
            }
            if let Some(a) = adversary {
                rc.adversary = a;
            }
            if let Some(d) = &src.delta {
                rc.delta = d.clone();
            }
            rc.budget = src.budget.or(rc.budget);
            rc.seed = src.seed.unwrap_or(rc.seed);
            rc
        }
        None => RunConfig {
            protocol: src.protocol.unwrap_or(ProtocolKind::GatheringFcom),
            initial: initial.ok_or_else(|| {
                Failure::input("no start configuration: give a run config, --config or --positions")
            })?,
            adversary: adversary.unwrap_or(AdversarySpec::FairRandom { p_stop: 0.25, window: None }),
            delta: src.delta.clone().unwrap_or_else(|| Angle::frac(1, 60)),
            budget: src.budget,
            seed: src.seed.unwrap_or(0),
            trace_out: None,
        },
    };
    Ok((rc, base))
}

fn input(e: RunConfigError) -> Failure {
    Failure::input(e.to_string())
}

fn parse_positions(list: &str) -> Result<ConfigFile, Failure> {
    let robots = list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<Position>()
                .map(|pos| RobotSpec { pos, light: Color::Off })
                .map_err(|e| Failure::input(format!("--positions: {s:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConfigFile { robots })
}

fn parse_adversary(s: &str) -> Result<AdversarySpec, Failure> {
    let spec = match s.strip_prefix('@') {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("--adversary: cannot read {path}: {e}")))?;
            serde_json::from_str::<AdversarySpec>(&text)
                .map_err(|e| Failure::input(format!("--adversary: {path}: {e}")))?
        }
        None => s.parse().map_err(|e| Failure::input(format!("--adversary: {e}")))?,
    };
    spec.validate().map_err(|e| Failure::input(format!("--adversary: {e}")))?;
    Ok(spec)
}

pub fn exit_code(protocol: ProtocolKind, outcome: &Outcome) -> u8 {
    match outcome {
        Outcome::Gathered { .. } => exit::OK,
        Outcome::Quiescent if protocol == ProtocolKind::ThreeToSevenFsta => exit::OK,
        Outcome::BudgetExhausted => exit::BUDGET_EXHAUSTED,
        Outcome::InvariantViolation { .. } => exit::INVARIANT_VIOLATION,
        Outcome::Quiescent | Outcome::Stalled => exit::NOT_GATHERED,
    }
}

pub fn summary(rc: &RunConfig, r: &RunResult) -> String {
    let mut lines = Vec::new();
    lines.push(match &r.outcome {
        Outcome::Gathered { point } => format!("outcome: gathered at {point}"),
        Outcome::InvariantViolation { violation } => format!(
            "outcome: invariant violation {:?} at step {}: {}",
            violation.kind, violation.seq, violation.detail
        ),
        other => format!("outcome: {}", other.label()),
    });
    lines.push(format!("protocol: {}, adversary: {}, delta: {}, seed: {}", rc.protocol, rc.adversary.label(), rc.delta, rc.seed));
    lines.push(format!("steps: {}", r.steps));
    if let Some(trace) = &r.trace {
        let formed: Vec<String> = trace
            .events
            .iter()
            .filter_map(|e| {
                let p = e.annotations.formed_multiplicity.as_ref()?;
                let tag = if e.annotations.primary { " (leader move)" } else { "" };
                Some(format!("step {} at {p}{tag}", e.seq))
            })
            .collect();
        lines.push(format!(
            "multiplicities formed: {}",
            if formed.is_empty() { "none".to_string() } else { formed.join(", ") }
        ));
    }
    if let Some(last) = r.trace.as_ref().and_then(|t| t.events.last()) {
        let pos: Vec<String> = last.robots.iter().map(|v| format!("r{}: {}", v.id.0, v.pos)).collect();
        lines.push(format!("final positions: {}", pos.join(", ")));
    }
    lines.push(format!("max simultaneous multiplicities: {}", r.monitors.max_simultaneous));
    lines.push(format!("final hash: {}", r.final_hash));
    lines.join("\n")
}

pub fn cmd_run(args: &RunArgs) -> Result<u8, Failure> {
    let (mut rc, base) = resolve(&args.source)?;
    if let Some(p) = &args.trace_out {
        rc.trace_out = Some(p.clone());
    }
    let r = rc.execute(base.as_deref(), true).map_err(input)?;
    println!("{}", summary(&rc, &r));
    if let (Some(path), Some(trace)) = (&rc.trace_out, &r.trace) {
        let path = match &base {
            Some(b) if path.is_relative() && args.trace_out.is_none() => b.join(path),
            _ => path.clone(),
        };
        let write = || -> io::Result<()> {
            let mut w = BufWriter::new(fs::File::create(&path)?);
            trace.write_jsonl(&mut w)?;
            w.flush()
        };
        write().map_err(|e| Failure::io(format!("cannot write trace {}: {e}", path.display())))?;
        println!("trace: {}", path.display());
    }
    Ok(exit_code(rc.protocol, &r.outcome))
}
