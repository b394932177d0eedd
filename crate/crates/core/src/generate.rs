//! Seeded instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coloring::{Coloring, MAX_ARITY};
use crate::error::{Error, Result};
use crate::tuple::{binomial, pair_code, IncreasingTuple};

/// Which tuples may share a color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Grouping {
    /// Any tuples.
    #[default]
    Free,
    /// Only tuples with the same last coordinate, so the whole domain is a
    /// 1-tail rainbow (for pairs: a tail rainbow).
    SameLast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenParams {
    pub arity: usize,
    pub bound: usize,
    pub n: usize,
    pub seed: u64,
    pub grouping: Grouping,
}

impl GenParams {
    pub fn new(arity: usize, bound: usize, n: usize, seed: u64) -> Self {
        GenParams {
            arity,
            bound,
            n,
            seed,
            grouping: Grouping::Free,
        }
    }

    pub fn same_last(mut self) -> Self {
        self.grouping = Grouping::SameLast;
        self
    }
}

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Splits `ranks` (already shuffled) into classes of random size in `1..=bound`,
/// writing class ids into `class_of`.
fn chunk_classes(ranks: &[usize], bound: usize, rng: &mut ChaCha8Rng, next: &mut u64, class_of: &mut [u64]) {
    let mut i = 0;
    while i < ranks.len() {
        let size = rng.gen_range(1..=bound).min(ranks.len() - i);
        for &r in &ranks[i..i + size] {
            class_of[r] = *next;
        }
        *next += 1;
        i += size;
    }
}

/// Relabels class ids `0..count` through a seeded permutation so that colors
/// carry no positional information.
fn scramble(class_of: &mut [u64], count: u64, rng: &mut ChaCha8Rng) {
    let mut perm: Vec<u64> = (0..count).collect();
    perm.shuffle(rng);
    for c in class_of.iter_mut() {
        *c = perm[*c as usize];
    }
}

/// A `bound`-bounded coloring whose classes come from seeded shuffling.
pub fn random_bounded_coloring(p: GenParams) -> Result<Coloring> {
    if p.arity == 0 || p.arity > MAX_ARITY {
        return Err(Error::UnsupportedArity(p.arity));
    }
    if p.bound == 0 {
        return Err(Error::Infeasible("bound must be at least 1".into()));
    }
    if p.n < p.arity {
        return Err(Error::Infeasible(format!(
            "domain size {} is below arity {}",
            p.n, p.arity
        )));
    }
    let total = binomial(p.n, p.arity) as usize;
    let mut rng = rng_for(p.seed);
    let mut class_of = vec![0u64; total];
    let mut next = 0u64;
    match p.grouping {
        Grouping::Free => {
            let mut ranks: Vec<usize> = (0..total).collect();
            ranks.shuffle(&mut rng);
            chunk_classes(&ranks, p.bound, &mut rng, &mut next, &mut class_of);
        }
        Grouping::SameLast => {
            // Tuples ending in z occupy ranks [C(z, k), C(z + 1, k)).
            for z in p.arity - 1..p.n {
                let lo = binomial(z, p.arity) as usize;
                let hi = binomial(z + 1, p.arity) as usize;
                let mut ranks: Vec<usize> = (lo..hi).collect();
                ranks.shuffle(&mut rng);
                chunk_classes(&ranks, p.bound, &mut rng, &mut next, &mut class_of);
            }
        }
    }
    scramble(&mut class_of, next, &mut rng);
    Coloring::new(p.arity, p.bound, p.n, class_of)
}

/// A 2-bounded triple coloring on a 1-tail-rainbow domain whose `f_bar(x, y, .)`
/// is constant above a known threshold.
#[derive(Debug, Clone)]
pub struct StableTripleColoring {
    pub base: Coloring,
    pub window: usize,
    /// Stabilization threshold per pair, indexed by pair code.
    thresholds: Vec<usize>,
    /// The classes of the matching used in every slice above the window.
    pub matching: Vec<(IncreasingTuple, IncreasingTuple)>,
}

impl StableTripleColoring {
    /// `f_bar(x, y, s)` is the same for all `s > threshold(x, y)`.
    pub fn threshold(&self, x: usize, y: usize) -> usize {
        self.thresholds[pair_code(x, y) as usize]
    }

    pub fn thresholds(&self) -> &[usize] {
        &self.thresholds
    }
}

/// Slices `s > window` all follow one global pair matching; slices at or
/// below the window are independent random matchings.
///
/// In a slice above the window, a matched pair `{p, q}` with `p < q` in colex
/// order shares a color exactly when `max q < s`, so the least partner of
/// either pair is fixed once `s` exceeds the larger of its own maximum and the
/// window.
pub fn make_stable_triple_coloring(n: usize, window: usize, seed: u64) -> Result<StableTripleColoring> {
    if n < 3 {
        return Err(Error::Infeasible(format!("need n >= 3, got {n}")));
    }
    if window >= n {
        return Err(Error::Infeasible(format!("window {window} must be below n = {n}")));
    }
    let mut rng = rng_for(seed);
    let pairs = binomial(n, 2) as usize;

    // Global matching over all pairs.
    let mut order: Vec<usize> = (0..pairs).collect();
    order.shuffle(&mut rng);
    let mut partner: Vec<Option<usize>> = vec![None; pairs];
    let mut matching = Vec::new();
    let mut i = 0;
    while i < order.len() {
        if i + 1 < order.len() && rng.gen_bool(0.5) {
            let (a, b) = (order[i].min(order[i + 1]), order[i].max(order[i + 1]));
            partner[a] = Some(b);
            partner[b] = Some(a);
            matching.push((a, b));
            i += 2;
        } else {
            i += 1;
        }
    }
    matching.sort_unstable();

    let decode = |r: usize| -> (usize, usize) {
        let t = crate::tuple::decode_tuple(crate::tuple::TupleCode { arity: 2, rank: r as u64 });
        (t.as_slice()[0], t.as_slice()[1])
    };

    let total = binomial(n, 3) as usize;
    let mut class_of = vec![0u64; total];
    let mut next = 0u64;
    for s in 2..n {
        // Pairs inside [0, s) are exactly ranks [0, C(s, 2)).
        let slice_pairs = binomial(s, 2) as usize;
        let base = binomial(s, 3) as usize;
        if s > window {
            for p in 0..slice_pairs {
                match partner[p] {
                    Some(q) if q < slice_pairs && q < p => {
                        class_of[base + p] = class_of[base + q];
                    }
                    _ => {
                        class_of[base + p] = next;
                        next += 1;
                    }
                }
            }
        } else {
            let mut ranks: Vec<usize> = (base..base + slice_pairs).collect();
            ranks.shuffle(&mut rng);
            chunk_classes(&ranks, 2, &mut rng, &mut next, &mut class_of);
        }
    }
    scramble(&mut class_of, next, &mut rng);
    let base = Coloring::new(3, 2, n, class_of)?;

    let thresholds = (0..pairs)
        .map(|r| {
            let (_, y) = decode(r);
            y.max(window)
        })
        .collect();
    let matching = matching
        .into_iter()
        .map(|(a, b)| {
            let (a0, a1) = decode(a);
            let (b0, b1) = decode(b);
            (
                IncreasingTuple::new(vec![a0, a1]).expect("decoded pair"),
                IncreasingTuple::new(vec![b0, b1]).expect("decoded pair"),
            )
        })
        .collect();
    Ok(StableTripleColoring {
        base,
        window,
        thresholds,
        matching,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{full_domain, is_k_tail_rainbow, is_rainbow};

    #[test]
    fn bound_one_is_injective() {
        let f = random_bounded_coloring(GenParams::new(2, 1, 12, 3)).unwrap();
        assert!(is_rainbow(&full_domain(&f), &f));
        let f = random_bounded_coloring(GenParams::new(3, 1, 9, 3).same_last()).unwrap();
        assert!(is_rainbow(&full_domain(&f), &f));
    }

    #[test]
    fn seeded_determinism() {
        let p = GenParams::new(3, 2, 15, 42);
        assert_eq!(random_bounded_coloring(p).unwrap(), random_bounded_coloring(p).unwrap());
        let q = GenParams::new(3, 2, 15, 43);
        assert_ne!(random_bounded_coloring(p).unwrap(), random_bounded_coloring(q).unwrap());
    }

    #[test]
    fn validator_clean_for_many_seeds() {
        for seed in 0..1000 {
            let b = 1 + (seed % 3) as usize;
            let f = random_bounded_coloring(GenParams::new(2, b, 16, seed)).unwrap();
            assert!(f.is_bounded_by(b));
            let g = random_bounded_coloring(GenParams::new(2, b, 16, seed).same_last()).unwrap();
            assert!(g.is_bounded_by(b));
            assert!(is_k_tail_rainbow(&full_domain(&g), &g, 1).unwrap());
        }
    }

    #[test]
    fn infeasible_parameters() {
        assert!(random_bounded_coloring(GenParams::new(2, 0, 5, 1)).is_err());
        assert!(random_bounded_coloring(GenParams::new(3, 2, 2, 1)).is_err());
        assert!(random_bounded_coloring(GenParams::new(5, 2, 9, 1)).is_err());
        assert!(make_stable_triple_coloring(10, 10, 1).is_err());
    }
}
