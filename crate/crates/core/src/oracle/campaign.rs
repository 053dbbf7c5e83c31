//! Simulation campaigns: liveness, class-stratified formation counts, and
//! trace determinism.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::angles::Angle;
use crate::protocol::ProtocolKind;
use crate::runconfig::{InitialConfig, RunConfig};
use crate::simulator::{AdversarySpec, Outcome, RunResult, Trace};

use super::brute::Ring;
use super::par_map;
use super::report::{Counterexample, PropertyReport};
use super::taxonomy::Class;

/// Seed of run `adversary` on instance `instance`.
pub fn run_seed(base: u64, instance: usize, adversary: usize) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((instance as u64) << 8)
        .wrapping_add(adversary as u64)
}

pub fn run_config(ring: &Ring, adversary: &AdversarySpec, delta: &Angle, seed: u64) -> RunConfig {
    RunConfig {
        protocol: ProtocolKind::GatheringFcom,
        initial: InitialConfig::Inline(ring.to_configuration().to_file()),
        adversary: adversary.clone(),
        delta: delta.clone(),
        budget: None,
        seed,
        trace_out: None,
    }
}

fn execute(rc: &RunConfig) -> RunResult {
    rc.execute(None, false).expect("campaign run configs are valid")
}

fn problem(r: &RunResult) -> Option<String> {
    match &r.outcome {
        Outcome::Gathered { .. } => r
            .monitors
            .violations
            .first()
            .map(|v| format!("gathered but monitor flagged {:?}: {}", v.kind, v.detail)),
        Outcome::InvariantViolation { violation } => {
            Some(format!("{:?} at step {}: {}", violation.kind, violation.seq, violation.detail))
        }
        other => Some(format!("ended {} after {} steps", other.label(), r.steps)),
    }
}

/// Every instance under every adversary must gather without a monitor violation.
pub fn liveness(
    instances: &[Ring],
    adversaries: &[AdversarySpec],
    delta: &Angle,
    seed: u64,
) -> PropertyReport {
    let start = Instant::now();
    let jobs: Vec<(usize, usize)> =
        (0..instances.len()).flat_map(|i| (0..adversaries.len()).map(move |a| (i, a))).collect();
    let results = par_map(&jobs, |_, &(i, a)| {
        let rc = run_config(&instances[i], &adversaries[a], delta, run_seed(seed, i, a));
        let r = execute(&rc);
        (problem(&r).map(|w| (w, rc)), r.steps, r.monitors)
    });
    let mut report = PropertyReport::new("gathering_liveness");
    report.instances = jobs.len() as u64;
    let mut gathered = 0u64;
    let mut steps = 0u64;
    let mut max_sim = 0usize;
    let mut max_primary = 0u32;
    let mut blind = 0u32;
    let mut head_on = 0u32;
    let mut per_adv: BTreeMap<&str, u64> = BTreeMap::new();
    for (k, (fail, s, m)) in results.into_iter().enumerate() {
        let (i, a) = jobs[k];
        steps += s;
        max_sim = max_sim.max(m.max_simultaneous);
        max_primary = max_primary.max(m.primary_formations);
        blind += m.blind_leader_formations;
        head_on += m.head_on;
        match fail {
            None => {
                gathered += 1;
                *per_adv.entry(adversaries[a].label()).or_default() += 1;
            }
            Some((witness, rc)) => {
                if report.counterexample.is_none() {
                    report.counterexample = Some(Counterexample {
                        instance: i as u64,
                        config: instances[i].to_configuration().to_file(),
                        witness: format!("{}: {witness}", adversaries[a].label()),
                        run: Some(rc),
                    });
                }
            }
        }
    }
    report.stat("gathered", format!("{gathered}/{}", jobs.len()));
    for (adv, n) in per_adv {
        report.stat(&format!("gathered_{adv}"), format!("{n}/{}", instances.len()));
    }
    report.stat("total_steps", steps);
    report.stat("max_simultaneous_multiplicities", max_sim);
    report.stat("max_primary_formations", max_primary);
    report.stat("blind_leader_formations", blind);
    report.stat("head_on_contacts", head_on);
    report.wall_ms = start.elapsed().as_millis() as u64;
    report
}

/// Runs one class under `adversary` and checks its formation claim: class C
/// forms exactly one multiplicity from leader moves, the others one or two.
pub fn stratified(
    class: Class,
    instances: &[Ring],
    adversary: &AdversarySpec,
    delta: &Angle,
    seed: u64,
) -> PropertyReport {
    let start = Instant::now();
    let results = par_map(instances, |i, ring| {
        let rc = run_config(ring, adversary, delta, run_seed(seed, i, 0));
        let r = execute(&rc);
        (r, rc)
    });
    let mut report = PropertyReport::new(format!("class_{}_formation", class.name()));
    report.instances = instances.len() as u64;
    let mut histogram: BTreeMap<u32, u64> = BTreeMap::new();
    let mut exactly_one = 0u64;
    for (i, (r, rc)) in results.into_iter().enumerate() {
        let primary = r.monitors.primary_formations;
        *histogram.entry(primary).or_default() += 1;
        if primary == 1 {
            exactly_one += 1;
        }
        let claim_ok = match class {
            Class::C => primary == 1,
            _ => (1..=2).contains(&primary),
        };
        let fail = problem(&r).or_else(|| {
            (!claim_ok).then(|| format!("{primary} multiplicities formed by leader moves"))
        });
        if let Some(w) = fail {
            if report.counterexample.is_none() {
                report.counterexample = Some(Counterexample {
                    instance: i as u64,
                    config: ring_file(&instances[i]),
                    witness: w,
                    run: Some(rc),
                });
            }
        }
    }
    report.stat("adversary", adversary.label());
    report.stat("exactly_one_multiplicity", format!("{exactly_one}/{}", instances.len()));
    let h: Vec<String> = histogram.iter().map(|(k, v)| format!("{k}: {v}")).collect();
    report.stat("leader_formations_histogram", h.join(", "));
    report.wall_ms = start.elapsed().as_millis() as u64;
    report
}

fn ring_file(r: &Ring) -> crate::configuration::ConfigFile {
    r.to_configuration().to_file()
}

/// Record, serialize, parse and replay each run; replays must reproduce
/// every per-step hash, and rerunning the config must give the same trace.
pub fn determinism(
    instances: &[Ring],
    adversaries: &[AdversarySpec],
    delta: &Angle,
    seed: u64,
) -> PropertyReport {
    let start = Instant::now();
    let results = par_map(instances, |i, ring| {
        let adv = &adversaries[i % adversaries.len()];
        let rc = run_config(ring, adv, delta, run_seed(seed, i, 0));
        let first = rc.execute(None, true).expect("valid config");
        let second = rc.execute(None, true).expect("valid config");
        let trace = first.trace.as_ref().expect("recorded");
        let text = trace.to_jsonl();
        let check = || -> Result<usize, String> {
            if second.trace.as_ref().map(Trace::to_jsonl).as_deref() != Some(text.as_str()) {
                return Err("rerun produced a different trace".into());
            }
            let parsed = Trace::read_jsonl(text.as_bytes()).map_err(|e| e.to_string())?;
            let sim = parsed.replay().map_err(|e| e.to_string())?;
            if sim.state_hash() != first.final_hash {
                return Err("replay ends in a different state".into());
            }
            let hashes: Vec<&String> = parsed.events.iter().map(|e| &e.hash).collect();
            if hashes.len() != first.hashes.len() || hashes.iter().zip(&first.hashes).any(|(a, b)| *a != b) {
                return Err("per-step hashes differ".into());
            }
            Ok(hashes.len())
        };
        (check(), rc)
    });
    let mut report = PropertyReport::new("trace_determinism");
    report.instances = instances.len() as u64;
    let mut steps = 0usize;
    for (i, (res, rc)) in results.into_iter().enumerate() {
        match res {
            Ok(n) => steps += n,
            Err(w) => {
                if report.counterexample.is_none() {
                    report.counterexample = Some(Counterexample {
                        instance: i as u64,
                        config: ring_file(&instances[i]),
                        witness: w,
                        run: Some(rc),
                    });
                }
            }
        }
    }
    report.stat("hashes_compared", steps);
    report.wall_ms = start.elapsed().as_millis() as u64;
    report
}
