use std::fs;

use circle_gather::oracle::taxonomy::{classify_ring, search, search_where, SearchBounds};

use crate::args::GenArgs;
use crate::exit::{self, Failure};

pub fn cmd_gen(a: &GenArgs) -> Result<u8, Failure> {
    if a.n < 2 {
        return Err(Failure::input("--n must be at least 2"));
    }
    if a.den < 2 {
        return Err(Failure::input("--den must be at least 2"));
    }
    let bounds = SearchBounds::new(a.n, a.den);
    let res = match a.class {
        Some(c) => search(c, bounds, a.count, a.seed),
        None => search_where(bounds, a.count, a.seed, &|_| true),
    };
    let what = match a.class {
        Some(c) => format!("class {c} configuration"),
        None => "asymmetric multiplicity-free configuration".to_string(),
    };
    if res.instances.is_empty() {
        if res.exhaustive {
            eprintln!(
                "unsatisfiable: no {what} of {} robots with denominators up to {} (every grid swept)",
                a.n, a.den
            );
        } else {
            eprintln!(
                "no {what} of {} robots found in {} candidates; the search was not exhaustive",
                a.n, res.candidates
            );
        }
        return Ok(exit::FAILED);
    }
    if res.instances.len() < a.count {
        eprintln!(
            "only {} {what}s of {} robots exist with denominators up to {}{}",
            res.instances.len(),
            a.n,
            a.den,
            if res.exhaustive { "" } else { " among those sampled" }
        );
    }
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
    }
    for (k, ring) in res.instances.iter().enumerate() {
        let json = ring.to_configuration().to_json();
        match &a.out {
            Some(dir) => {
                let path = dir.join(format!("instance-{k}.json"));
                fs::write(&path, json + "\n").map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
                eprintln!("{} {ring} class {}", path.display(), class_label(ring));
            }
            None => println!("{json}"),
        }
    }
    Ok(exit::OK)
}

fn class_label(ring: &circle_gather::oracle::Ring) -> String {
    classify_ring(ring).map(|c| c.to_string()).unwrap_or_else(|e| e.to_string())
}
