//! Independent checks of the leadership theory and of the protocols.

pub mod brute;
pub mod campaign;
pub mod instances;
pub mod propositions;
pub mod report;
pub mod separation;
pub mod taxonomy;

pub use brute::{Oracle, Ring, Variant};
pub use instances::InstanceSource;
pub use propositions::{check_propositions, mutation_run, recheck, Property};
pub use report::{Counterexample, PropertyReport};
pub use separation::separation_scenario;
pub use taxonomy::{taxonomy_classify, Class};

/// Maps `f` over `items` on all cores; results keep the input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(usize, &T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    if workers <= 1 || items.len() < 2 {
        return items.iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let chunk = items.len().div_ceil(workers);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .enumerate()
            .map(|(c, part)| {
                s.spawn(move || {
                    part.iter().enumerate().map(|(i, t)| f(c * chunk + i, t)).collect::<Vec<R>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}
