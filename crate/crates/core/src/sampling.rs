//! Seeded tuple streams and order-preserving parallel scans.
//!
//! Tuples are drawn sequentially from one ChaCha stream and evaluated in parallel
//! blocks, and every reduction keeps the earliest position, so results do not depend
//! on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const BLOCK: u64 = 1 << 15;

fn draw(rng: &mut ChaCha8Rng, block: u64, ranges: &[u64]) -> Vec<u64> {
    let mut flat = Vec::with_capacity(block as usize * ranges.len());
    for _ in 0..block {
        flat.extend(ranges.iter().map(|&r| rng.gen_range(0..r)));
    }
    flat
}

/// How a check covers its domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Sampled { seed: u64, samples: u64 },
}

impl Mode {
    pub fn sampled(seed: u64, samples: u64) -> Self {
        Mode::Sampled { seed, samples }
    }
}

/// Draws `count` tuples, coordinate `k` below `ranges[k]`, and returns the first one
/// (by draw number) on which `fails` holds. `init` builds per-thread scratch space.
pub fn first_failing<I, S, F>(
    seed: u64,
    count: u64,
    ranges: &[u64],
    init: I,
    fails: F,
) -> Option<(u64, Vec<u64>)>
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, &[u64]) -> bool + Sync + Send,
{
    let arity = ranges.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < count {
        let block = BLOCK.min(count - done);
        let flat = draw(&mut rng, block, ranges);
        if let Some(pos) = flat.par_chunks(arity).map_init(&init, |s, t| fails(s, t)).position_first(|b| b) {
            return Some((done + pos as u64, flat[pos * arity..(pos + 1) * arity].to_vec()));
        }
        done += block;
    }
    None
}

/// Evaluates `classify` on `count` drawn tuples, keeping hits in draw order and
/// stopping after the block in which `enough` first returns true.
pub fn collect<I, S, F, T, E>(
    seed: u64,
    count: u64,
    ranges: &[u64],
    init: I,
    classify: F,
    enough: E,
) -> (u64, Vec<(Vec<u64>, T)>)
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, &[u64]) -> Option<T> + Sync + Send,
    T: Send,
    E: Fn(&[(Vec<u64>, T)]) -> bool,
{
    let arity = ranges.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut done = 0;
    while done < count && !enough(&out) {
        let block = BLOCK.min(count - done);
        let flat = draw(&mut rng, block, ranges);
        let found: Vec<(Vec<u64>, T)> = flat
            .par_chunks(arity)
            .map_init(&init, |s, t| classify(s, t).map(|r| (t.to_vec(), r)))
            .flatten()
            .collect();
        out.extend(found);
        done += block;
    }
    (done, out)
}

/// First `(a, b)` in lexicographic order with `a, b < range` on which `fails` holds.
pub fn first_failing_pair<I, S, F>(range: u64, init: I, fails: F) -> Option<(u64, u64)>
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, u64, u64) -> bool + Sync + Send,
{
    first_failing_pair_in(&(0..range).collect::<Vec<_>>(), init, fails)
}

/// First `(a, b)` in lexicographic order with `a, b` drawn from the sorted `set`.
pub fn first_failing_pair_in<I, S, F>(set: &[u64], init: I, fails: F) -> Option<(u64, u64)>
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, u64, u64) -> bool + Sync + Send,
{
    set.par_iter()
        .map_init(&init, |s, &a| set.iter().find(|&&b| fails(s, a, b)).map(|&b| (a, b)))
        .find_map_first(|x| x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_is_reproducible() {
        let run = || collect(7, 1000, &[50, 50], || (), |_, t| (t[0] == t[1]).then_some(()), |_| false).1;
        let (a, b) = (run(), run());
        assert!(!a.is_empty());
        assert_eq!(a.iter().map(|x| &x.0).collect::<Vec<_>>(), b.iter().map(|x| &x.0).collect::<Vec<_>>());
        let first = first_failing(7, 1000, &[50, 50], || (), |_, t| t[0] == t[1]).unwrap();
        assert_eq!(first.1, a[0].0);
    }

    #[test]
    fn first_pair_is_lexicographic() {
        assert_eq!(first_failing_pair(10, || (), |_, a, b| a + b == 7 && a > 1), Some((2, 5)));
        assert_eq!(first_failing_pair(10, || (), |_, _, _| false), None);
    }
}
