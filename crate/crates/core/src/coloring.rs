//! Bounded colorings of increasing tuples over a finite domain, and the
//! rainbow predicates on them.

use std::collections::HashMap;

use crate::error::{Error, Result, TuplePair};
use crate::tuple::{binomial, decode_tuple, for_each_tuple, rank_slice, subsets_of, ColexTuples, IncreasingTuple, TupleCode};

pub const MAX_ARITY: usize = 4;

/// A total coloring of `[[0, n)]^arity` whose color classes have at most
/// `bound` members. The table is indexed by colex rank.
///
/// Equality compares tables only; the declared bound is not part of it.
#[derive(Debug, Clone)]
pub struct Coloring {
    arity: usize,
    bound: usize,
    n: usize,
    colors: Vec<u64>,
}

impl PartialEq for Coloring {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.n == other.n && self.colors == other.colors
    }
}

impl Eq for Coloring {}

impl Coloring {
    /// Validates arity, table size and `bound`-boundedness.
    pub fn new(arity: usize, bound: usize, n: usize, colors: Vec<u64>) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::UnsupportedArity(arity));
        }
        if bound == 0 {
            return Err(Error::Infeasible("bound must be at least 1".into()));
        }
        let expected = binomial(n, arity) as usize;
        if colors.len() != expected {
            return Err(Error::TableSize {
                n,
                arity,
                expected,
                found: colors.len(),
            });
        }
        let c = Coloring {
            arity,
            bound,
            n,
            colors,
        };
        c.check_bound(bound)?;
        Ok(c)
    }

    /// Like [`Coloring::new`] with the bound set to the largest class size.
    pub fn tight(arity: usize, n: usize, colors: Vec<u64>) -> Result<Self> {
        let bound = max_class(&colors).map_or(1, |(_, k)| k);
        Coloring::new(arity, bound, n, colors)
    }

    pub fn from_fn<F>(arity: usize, bound: usize, n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> u64,
    {
        let colors = ColexTuples::new(n, arity).map(|t| f(&t)).collect();
        Coloring::new(arity, bound, n, colors)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Declared bound. Every class is known to be no larger.
    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn colors(&self) -> &[u64] {
        &self.colors
    }

    /// Color of an increasing tuple inside the domain.
    #[inline]
    pub fn color(&self, t: &[usize]) -> u64 {
        debug_assert_eq!(t.len(), self.arity);
        debug_assert!(t.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(t.last().is_none_or(|&m| m < self.n));
        self.colors[rank_slice(t) as usize]
    }

    /// Checked lookup.
    pub fn color_of(&self, t: &IncreasingTuple) -> Result<u64> {
        if t.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: t.len(),
            });
        }
        if t.max_entry().is_some_and(|m| m >= self.n) {
            return Err(Error::OutOfDomain {
                tuple: t.as_slice().to_vec(),
                n: self.n,
            });
        }
        Ok(self.color(t.as_slice()))
    }

    pub fn tuples(&self) -> ColexTuples {
        ColexTuples::new(self.n, self.arity)
    }

    /// `(tuple, color)` pairs in colex order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, u64)> + '_ {
        self.tuples().zip(self.colors.iter().copied())
    }

    pub fn class_sizes(&self) -> HashMap<u64, usize> {
        let mut m = HashMap::new();
        for &c in &self.colors {
            *m.entry(c).or_insert(0) += 1;
        }
        m
    }

    /// Size of the largest color class (0 for an empty table).
    pub fn max_class_size(&self) -> usize {
        max_class(&self.colors).map_or(0, |(_, k)| k)
    }

    pub fn is_bounded_by(&self, b: usize) -> bool {
        self.max_class_size() <= b
    }

    pub fn check_bound(&self, b: usize) -> Result<()> {
        match max_class(&self.colors) {
            Some((color, count)) if count > b => Err(Error::BoundViolation {
                color,
                count,
                bound: b,
            }),
            _ => Ok(()),
        }
    }

    /// The coloring induced on `subset`, relabelled so that the `i`-th smallest
    /// element of `subset` becomes `i`. Colors are unchanged.
    pub fn restrict(&self, subset: &[usize]) -> Coloring {
        let mut s = subset.to_vec();
        s.sort_unstable();
        s.dedup();
        let colors = subsets_of(&s, self.arity).map(|t| self.color(&t)).collect();
        Coloring {
            arity: self.arity,
            bound: self.bound,
            n: s.len(),
            colors,
        }
    }
}

fn max_class(colors: &[u64]) -> Option<(u64, usize)> {
    let mut m: HashMap<u64, usize> = HashMap::new();
    for &c in colors {
        *m.entry(c).or_insert(0) += 1;
    }
    // Least color among the largest classes, for a deterministic witness.
    m.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
}

pub(crate) fn sorted_set(x: &[usize]) -> Vec<usize> {
    let mut v = x.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// First pair of distinct tuples in `[X]^k` sharing a color, if any.
pub fn rainbow_collision(x: &[usize], f: &Coloring) -> Option<TuplePair> {
    first_collision(x, f, f.arity())
}

/// Scans `[X]^k` in colex order for two tuples with equal colors whose last
/// `width` entries differ.
fn first_collision(x: &[usize], f: &Coloring, width: usize) -> Option<TuplePair> {
    let x = sorted_set(x);
    let k = f.arity();
    let contiguous = x.first().is_none_or(|&lo| lo == 0) && x.last().is_none_or(|&hi| hi + 1 == x.len());
    // color -> (rank of positions, rank of the positions of the last `width` entries)
    let mut seen: HashMap<u64, (u64, u64)> = HashMap::new();
    let mut buf = vec![0usize; k];
    let mut found = None;
    let lift = |pos: &[usize]| pos.iter().map(|&p| x[p]).collect::<Vec<_>>();
    for_each_tuple(x.len(), k, |rank, pos| {
        if found.is_some() {
            return;
        }
        let c = if contiguous {
            f.colors[rank as usize]
        } else {
            for (b, &p) in buf.iter_mut().zip(pos) {
                *b = x[p];
            }
            f.color(&buf)
        };
        let tail = rank_slice(&pos[k - width..]);
        match seen.get(&c) {
            Some(&(_, prev_tail)) if prev_tail == tail => {}
            Some(&(prev_rank, _)) => {
                let prev = decode_tuple(TupleCode { arity: k, rank: prev_rank });
                found = Some((lift(prev.as_slice()), lift(pos)));
            }
            None => {
                seen.insert(c, (rank, tail));
            }
        }
    });
    found
}

/// `f` restricted to `[X]^k` is injective. Sets with fewer than `k` elements
/// are vacuously rainbows.
pub fn is_rainbow(x: &[usize], f: &Coloring) -> bool {
    rainbow_collision(x, f).is_none()
}

/// Two tuples of `[X]^k` with the same color but different last `width`
/// coordinates, if any.
pub fn tail_collision(x: &[usize], f: &Coloring, width: usize) -> Result<Option<TuplePair>> {
    let k = f.arity();
    if width == 0 || width > k {
        return Err(Error::TailWidth { width, arity: k });
    }
    Ok(first_collision(x, f, width))
}

/// Any two tuples of `[X]^k` whose last `width` coordinates differ get
/// different colors. `width = k` is the plain rainbow property.
pub fn is_k_tail_rainbow(x: &[usize], f: &Coloring, width: usize) -> Result<bool> {
    Ok(tail_collision(x, f, width)?.is_none())
}

/// Width of the plain "tail rainbow" notion for a given arity: every
/// coordinate but the first (so pairs use width 1 and triples width 2).
pub fn tail_width_for(arity: usize) -> usize {
    arity.saturating_sub(1).max(1)
}

/// Tail rainbow in the default sense of [`tail_width_for`].
pub fn is_tail_rainbow(x: &[usize], f: &Coloring) -> bool {
    tail_collision(x, f, tail_width_for(f.arity()))
        .expect("default width is in range")
        .is_none()
}

/// The whole domain `[0, n)`.
pub fn full_domain(f: &Coloring) -> Vec<usize> {
    (0..f.n()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(n: usize, f: impl FnMut(&[usize]) -> u64) -> Coloring {
        Coloring::from_fn(2, 3, n, f).unwrap()
    }

    #[test]
    fn rejects_unbounded_tables() {
        let err = Coloring::new(2, 1, 3, vec![7, 7, 1]).unwrap_err();
        assert_eq!(
            err,
            Error::BoundViolation {
                color: 7,
                count: 2,
                bound: 1
            }
        );
        assert!(Coloring::new(2, 2, 3, vec![7, 7]).is_err());
        assert!(Coloring::new(5, 2, 6, vec![]).is_err());
    }

    #[test]
    fn degenerate_domain_has_empty_table() {
        let f = Coloring::new(3, 1, 2, vec![]).unwrap();
        assert!(is_rainbow(&[0, 1], &f));
        assert!(is_k_tail_rainbow(&[0, 1], &f, 1).unwrap());
        assert_eq!(f.max_class_size(), 0);
    }

    #[test]
    fn small_sets_are_rainbows() {
        let f = Coloring::tight(2, 5, vec![0; 10]).unwrap();
        assert!(is_rainbow(&[3], &f));
        assert!(is_rainbow(&[], &f));
        assert!(!is_rainbow(&[0, 1, 2], &f));
    }

    #[test]
    fn injective_everywhere_is_rainbow() {
        let f = pairs(6, |t| rank_slice(t));
        assert!(is_rainbow(&full_domain(&f), &f));
    }

    #[test]
    fn tail_rainbow_versus_rainbow() {
        // f(0,2) = f(1,2), everything else distinct.
        let f = pairs(3, |t| match t {
            [0, 2] | [1, 2] => 100,
            _ => rank_slice(t),
        });
        let x = [0, 1, 2];
        assert!(is_k_tail_rainbow(&x, &f, 1).unwrap());
        assert!(!is_rainbow(&x, &f));
        assert_eq!(rainbow_collision(&x, &f), Some((vec![0, 2], vec![1, 2])));
        assert!(!is_k_tail_rainbow(&x, &f, 2).unwrap());
        assert!(is_k_tail_rainbow(&x, &f, 3).is_err());
        assert!(is_k_tail_rainbow(&x, &f, 0).is_err());
    }

    #[test]
    fn restrict_relabels() {
        let f = pairs(5, |t| rank_slice(t) * 10);
        let g = f.restrict(&[4, 1, 3]);
        assert_eq!(g.n(), 3);
        assert_eq!(g.color(&[0, 1]), f.color(&[1, 3]));
        assert_eq!(g.color(&[1, 2]), f.color(&[3, 4]));
    }

    #[test]
    fn collision_scan_matches_pairwise_oracle() {
        // O(|X|^{2k}) oracle: compare every pair of distinct tuples.
        let f = pairs(8, |t| (t[0] * 7 + t[1] * 3) as u64 % 11);
        let f = Coloring::tight(2, 8, f.colors().to_vec()).unwrap();
        for mask in 0u32..256 {
            let x: Vec<usize> = (0..8).filter(|i| mask >> i & 1 == 1).collect();
            let ts: Vec<Vec<usize>> = subsets_of(&x, 2).collect();
            let mut oracle = true;
            for a in &ts {
                for b in &ts {
                    if a != b && f.color(a) == f.color(b) {
                        oracle = false;
                    }
                }
            }
            assert_eq!(is_rainbow(&x, &f), oracle, "{x:?}");
        }
    }
}
