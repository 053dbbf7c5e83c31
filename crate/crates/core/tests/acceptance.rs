//! Acceptance suite: one PASS/FAIL line per criterion. Full reports are
//! written as JSON next to the build output.

use std::process::ExitCode;
use std::time::Instant;

use circle_gather::angles::Angle;
use circle_gather::oracle::taxonomy::class_sample;
use circle_gather::oracle::*;
use circle_gather::simulator::AdversarySpec;

struct Line {
    name: &'static str,
    ok: bool,
    summary: String,
    reports: Vec<PropertyReport>,
}

fn propositions() -> Line {
    let mut inst = InstanceSource::Exhaustive { n: 3, max_den: 24 }.generate();
    inst.extend(InstanceSource::Exhaustive { n: 4, max_den: 24 }.generate());
    let exhaustive = inst.len();
    let random =
        InstanceSource::Random { count: 10_000, min_n: 3, max_n: 12, max_den: 120, seed: 2024 }.generate();
    let mut reports = check_propositions(&inst, Variant::Faithful, &Property::ALL);
    reports.extend(check_propositions(&random, Variant::Faithful, &Property::ALL));
    let props_ok = report::all_passed(&reports);
    let mutants = mutation_run(&inst);
    let caught = mutants.iter().filter(|(_, failed)| !failed.is_empty()).count();
    for (v, failed) in &mutants {
        let mut r = PropertyReport::new(format!("mutant_{}", v.name()));
        r.instances = inst.len() as u64;
        let names: Vec<&str> = failed.iter().map(|f| f.property.as_str()).collect();
        r.stat("propositions_failed", names.join(", "));
        reports.push(r);
    }
    let failing: Vec<String> =
        reports.iter().filter(|r| !r.passed()).map(|r| r.property.clone()).collect();
    Line {
        name: "proposition suite",
        ok: props_ok && caught == mutants.len(),
        summary: format!(
            "{exhaustive} exhaustive + {} random instances x {} properties, counterexamples: {}; mutants caught {caught}/{}",
            random.len(),
            Property::ALL.len(),
            if failing.is_empty() { "none".to_string() } else { failing.join(", ") },
            mutants.len()
        ),
        reports,
    }
}

fn liveness() -> Line {
    let inst = InstanceSource::Random { count: 1000, min_n: 2, max_n: 12, max_den: 120, seed: 77 }.generate();
    let advs = AdversarySpec::builtin_fair();
    let r = campaign::liveness(&inst, &advs, &Angle::frac(1, 120), 5);
    let summary = format!(
        "{} configs x {} adversaries, delta 1/120: gathered {}, max simultaneous multiplicities {}, max leader formations {}, violations {}",
        inst.len(),
        advs.len(),
        r.stats["gathered"],
        r.stats["max_simultaneous_multiplicities"],
        r.stats["max_primary_formations"],
        if r.passed() { "0".to_string() } else { r.counterexample.as_ref().unwrap().witness.clone() }
    );
    Line { name: "gathering liveness", ok: r.passed(), summary, reports: vec![r] }
}

fn stratified() -> Line {
    let delta = Angle::frac(1, 120);
    let hunter = AdversarySpec::AntipodalHunter { window: None };
    let mut reports = Vec::new();
    let mut parts = Vec::new();
    for class in Class::ALL {
        let inst = class_sample(class, 3, 12, 60, 100, 31);
        let mut r = campaign::stratified(class, &inst, &hunter, &delta, 13);
        if inst.len() < 100 {
            r.counterexample.get_or_insert(Counterexample {
                instance: 0,
                config: circle_gather::configuration::ConfigFile { robots: vec![] },
                witness: format!("only {} instances found", inst.len()),
                run: None,
            });
        }
        parts.push(format!(
            "{}: {} runs, one-multiplicity {} [{}]",
            class,
            inst.len(),
            r.stats["exactly_one_multiplicity"],
            if r.passed() { "ok" } else { "FAIL" }
        ));
        reports.push(r);
    }
    Line {
        name: "class-stratified lemmas",
        ok: report::all_passed(&reports),
        summary: parts.join("; "),
        reports,
    }
}

fn separation() -> Line {
    let r = separation_scenario();
    let schedules: Vec<String> = r
        .stats
        .iter()
        .filter(|(k, _)| k.starts_with("rigid") || k.starts_with("stop"))
        .map(|(k, v)| format!("{k}: {}", v.split(", stops").next().unwrap_or("")))
        .collect();
    let summary = format!(
        "{}; FCOM antipodal snapshots equal: {}",
        schedules.join("; "),
        r.stats["fcom_witness"].contains("light pairs: true")
    );
    Line { name: "separation", ok: r.passed(), summary, reports: vec![r] }
}

fn determinism() -> Line {
    let inst = InstanceSource::Random { count: 100, min_n: 2, max_n: 10, max_den: 60, seed: 99 }.generate();
    let r = campaign::determinism(&inst, &AdversarySpec::builtin_fair(), &Angle::frac(1, 60), 21);
    let summary = format!(
        "{} recorded runs replayed, {} per-step hashes compared{}",
        inst.len(),
        r.stats["hashes_compared"],
        r.counterexample.as_ref().map(|c| format!(": {}", c.witness)).unwrap_or_default()
    );
    Line { name: "determinism", ok: r.passed(), summary, reports: vec![r] }
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [(&str, fn() -> Line); 5] = [
        ("propositions", propositions),
        ("liveness", liveness),
        ("stratified", stratified),
        ("separation", separation),
        ("determinism", determinism),
    ];
    let mut all_ok = true;
    let mut all_reports = Vec::new();
    for (key, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| key.contains(x.as_str())) {
            continue;
        }
        let start = Instant::now();
        let line = f();
        all_ok &= line.ok;
        println!(
            "{} {}: {} ({:.1} s)",
            if line.ok { "PASS" } else { "FAIL" },
            line.name,
            line.summary,
            start.elapsed().as_secs_f64()
        );
        all_reports.extend(line.reports);
    }
    let out = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-report.json");
    if let Ok(json) = serde_json::to_string_pretty(&all_reports) {
        let _ = std::fs::write(&out, json);
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
