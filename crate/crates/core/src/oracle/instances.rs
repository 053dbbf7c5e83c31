//! Sources of asymmetric multiplicity-free configurations.

use num_integer::Integer;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::brute::Ring;

/// Where property instances come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InstanceSource {
    /// Every configuration of `n` points `k / d` with `d <= max_den`, one robot at 0.
    Exhaustive { n: usize, max_den: i64 },
    /// `count` configurations with `n` in `min_n..=max_n` on a common denominator `<= max_den`.
    Random { count: usize, min_n: usize, max_n: usize, max_den: i64, seed: u64 },
}

impl InstanceSource {
    pub fn generate(&self) -> Vec<Ring> {
        match *self {
            InstanceSource::Exhaustive { n, max_den } => exhaustive(n, max_den),
            InstanceSource::Random { count, min_n, max_n, max_den, seed } => {
                random(count, min_n, max_n, max_den, seed)
            }
        }
    }
}

/// Calls `f` with every sorted `(n - 1)`-subset of `1..d`.
fn for_each_subset(d: i64, n: usize, f: &mut dyn FnMut(&[i64]) -> bool) -> bool {
    fn go(next: i64, d: i64, left: usize, acc: &mut Vec<i64>, f: &mut dyn FnMut(&[i64]) -> bool) -> bool {
        if left == 0 {
            return f(acc);
        }
        let mut k = next;
        while k + left as i64 <= d {
            acc.push(k);
            if !go(k + 1, d, left - 1, acc, f) {
                return false;
            }
            acc.pop();
            k += 1;
        }
        true
    }
    let mut acc = vec![0];
    go(1, d, n - 1, &mut acc, f)
}

/// Configurations whose points do not all lie on a coarser grid.
fn reduced(d: i64, ks: &[i64]) -> bool {
    ks.iter().fold(d, |g, k| g.gcd(k)) == 1
}

/// Calls `visit` on each asymmetric configuration of `n` points on grid `d`
/// with a robot at 0, in lexicographic order; stops when it returns false.
pub fn sweep_grid(d: i64, n: usize, visit: &mut dyn FnMut(Ring) -> bool) -> bool {
    if n == 0 || (n as i64) > d {
        return true;
    }
    for_each_subset(d, n, &mut |ks| {
        if !reduced(d, ks) {
            return true;
        }
        let ring = Ring::from_numerators(d, ks).expect("distinct grid points");
        if ring.is_symmetric() {
            return true;
        }
        visit(ring)
    })
}

pub fn exhaustive(n: usize, max_den: i64) -> Vec<Ring> {
    let mut out = Vec::new();
    for d in 1..=max_den {
        sweep_grid(d, n, &mut |r| {
            out.push(r);
            true
        });
    }
    out
}

/// One random asymmetric configuration of `n` points on grid `d`.
pub fn random_on_grid(rng: &mut ChaCha8Rng, n: usize, d: i64) -> Option<Ring> {
    if (n as i64) > d {
        return None;
    }
    for _ in 0..1000 {
        let ks: Vec<i64> = sample(rng, d as usize, n).into_iter().map(|k| k as i64).collect();
        let ring = Ring::from_numerators(d, &ks).expect("distinct samples");
        if !ring.is_symmetric() {
            return Some(ring);
        }
    }
    None
}

pub fn random(count: usize, min_n: usize, max_n: usize, max_den: i64, seed: u64) -> Vec<Ring> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let min_n = min_n.max(1);
    assert!(min_n <= max_n && max_n as i64 <= max_den, "no configuration fits the bounds");
    while out.len() < count {
        let n = rng.gen_range(min_n..=max_n);
        let d = rng.gen_range((n as i64).max(2)..=max_den);
        if let Some(r) = random_on_grid(&mut rng, n, d) {
            out.push(r);
        }
    }
    out
}
