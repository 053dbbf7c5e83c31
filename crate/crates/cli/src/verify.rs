use std::fs;
use std::path::Path;

use circle_gather::angles::Angle;
use circle_gather::oracle::taxonomy::class_sample;
use circle_gather::oracle::{
    campaign, check_propositions, mutation_run, report, separation_scenario, Class, InstanceSource,
    Property, PropertyReport, Variant,
};
use circle_gather::protocol::ProtocolKind;
use circle_gather::runconfig::{InitialConfig, RunConfig};
use circle_gather::simulator::AdversarySpec;

use crate::args::VerifyArgs;
use crate::exit::{self, Failure};

fn variant(name: &str) -> Result<Variant, Failure> {
    std::iter::once(Variant::Faithful)
        .chain(Variant::MUTANTS)
        .find(|v| v.name() == name)
        .ok_or_else(|| {
            let names: Vec<&str> =
                std::iter::once(Variant::Faithful).chain(Variant::MUTANTS).map(Variant::name).collect();
            Failure::input(format!("unknown variant {name:?}; expected one of {}", names.join(", ")))
        })
}

fn propositions(a: &VerifyArgs, v: Variant) -> Vec<PropertyReport> {
    let source = if a.exhaustive {
        InstanceSource::Exhaustive { n: a.n, max_den: a.den.unwrap_or(12) }
    } else {
        InstanceSource::Random { count: a.count, min_n: 3, max_n: 12, max_den: a.den.unwrap_or(120), seed: a.seed }
    };
    let inst = source.generate();
    let mut reports = check_propositions(&inst, v, &Property::ALL);
    if a.mutants {
        for (m, failed) in mutation_run(&inst) {
            let mut r = PropertyReport::new(format!("mutant_{}_caught", m.name()));
            r.instances = inst.len() as u64;
            let names: Vec<&str> = failed.iter().map(|f| f.property.as_str()).collect();
            if names.is_empty() {
                r.counterexample = Some(report::Counterexample {
                    instance: 0,
                    config: circle_gather::configuration::ConfigFile { robots: vec![] },
                    witness: format!("no property fails under {}", m.name()),
                    run: None,
                });
            } else {
                r.stat("failing_properties", names.join(", "));
            }
            reports.push(r);
        }
    }
    reports
}

fn lemmas(a: &VerifyArgs) -> Vec<PropertyReport> {
    let classes: Vec<Class> = a.class.map(|c| vec![c]).unwrap_or_else(|| Class::ALL.to_vec());
    let hunter = AdversarySpec::AntipodalHunter { window: None };
    classes
        .into_iter()
        .map(|class| {
            let inst = class_sample(class, 3, 12, a.den.unwrap_or(60), a.count, a.seed);
            let mut r = campaign::stratified(class, &inst, &hunter, &a.delta, a.seed);
            if inst.len() < a.count {
                r.stat("note", format!("only {} of {} requested instances found", inst.len(), a.count));
            }
            r
        })
        .collect()
}

fn sampled(a: &VerifyArgs, min_n: usize) -> Vec<circle_gather::oracle::Ring> {
    InstanceSource::Random { count: a.count, min_n, max_n: 12, max_den: a.den.unwrap_or(120), seed: a.seed }
        .generate()
}

/// A counterexample as a run configuration `run` accepts.
fn replayable(r: &PropertyReport, delta: &Angle) -> Option<RunConfig> {
    let c = r.counterexample.as_ref()?;
    if let Some(rc) = &c.run {
        return Some(rc.clone());
    }
    if c.config.robots.is_empty() {
        return None;
    }
    let protocol = if c.config.robots.len() == 2 && r.property.starts_with("separation") {
        ProtocolKind::ThreeToSevenFsta
    } else {
        ProtocolKind::GatheringFcom
    };
    Some(RunConfig {
        protocol,
        initial: InitialConfig::Inline(c.config.clone()),
        adversary: AdversarySpec::FairRandom { p_stop: 0.25, window: None },
        delta: delta.clone(),
        budget: None,
        seed: 0,
        trace_out: None,
    })
}

fn write_counterexamples(reports: &[PropertyReport], dir: &Path, delta: &Angle) -> Result<(), Failure> {
    let failed: Vec<&PropertyReport> = reports.iter().filter(|r| !r.passed()).collect();
    if failed.is_empty() {
        return Ok(());
    }
    let io = |e: std::io::Error| Failure::io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    for r in failed {
        let c = r.counterexample.as_ref().expect("failed report has a counterexample");
        fs::write(dir.join(format!("{}.witness.txt", r.property)), format!("{}\n", c.witness)).map_err(io)?;
        if let Some(rc) = replayable(r, delta) {
            let path = dir.join(format!("{}.json", r.property));
            fs::write(&path, rc.to_json_pretty() + "\n").map_err(io)?;
            println!("counterexample written to {}", path.display());
        }
    }
    Ok(())
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<u8, Failure> {
    let v = variant(&a.variant)?;
    let any = a.propositions || a.lemmas || a.liveness || a.separation || a.determinism;
    let all = a.all || !any;
    let mut reports = Vec::new();
    if all || a.propositions {
        reports.extend(propositions(a, v));
    }
    if all || a.lemmas {
        reports.extend(lemmas(a));
    }
    if all || a.liveness {
        reports.push(campaign::liveness(&sampled(a, 2), &AdversarySpec::builtin_fair(), &a.delta, a.seed));
    }
    if all || a.separation {
        reports.push(separation_scenario());
    }
    if all || a.determinism {
        reports.push(campaign::determinism(&sampled(a, 2), &AdversarySpec::builtin_fair(), &a.delta, a.seed));
    }
    print!("{}", report::to_text(&reports));
    if let Some(path) = &a.report {
        let text = serde_json::to_string_pretty(&reports).expect("reports serialize");
        fs::write(path, text + "\n").map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    }
    write_counterexamples(&reports, &a.out, &a.delta)?;
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed == 0 {
        println!("all {} checks passed", reports.len());
        Ok(exit::OK)
    } else {
        println!("{failed} of {} checks failed", reports.len());
        Ok(exit::FAILED)
    }
}
