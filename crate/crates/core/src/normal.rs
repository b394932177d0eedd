//! Normal forms for 2-bounded pair and triple colorings.
//!
//! A 2-bounded pair coloring on a tail-rainbow domain is equivalent (same
//! rainbows) to exactly one *normal* coloring, whose color at `(x0, x1)` is the
//! pair code of `(u, x1)` with `u` the least partner of `(x0, x1)` in its color
//! class. The triple analogue colors `(x0, x1, x2)` by the triple code of
//! `(y0, y1, x2)`, where `(y0, y1)` is the colex-least pair that shares the
//! color of `(x0, x1, x2)` over the same last coordinate.

use std::collections::HashMap;

use crate::coloring::{full_domain, tail_collision, Coloring};
use crate::error::{Error, Result};
use crate::tuple::{for_each_tuple, pair_code, triple_code};

fn expect_arity(g: &Coloring, arity: usize) -> Result<()> {
    if g.arity() != arity {
        return Err(Error::ArityMismatch {
            expected: arity,
            found: g.arity(),
        });
    }
    Ok(())
}

/// Least earlier partner for every pair: `least[rank(x0,x1)] = min{x <= x0 : g(x,x1) = g(x0,x1)}`.
fn least_partners(g: &Coloring) -> Vec<usize> {
    let mut least = vec![0usize; g.colors().len()];
    let mut first: HashMap<u64, usize> = HashMap::new();
    let mut idx = 0usize;
    for x1 in 1..g.n() {
        first.clear();
        for x0 in 0..x1 {
            let c = g.colors()[idx];
            least[idx] = *first.entry(c).or_insert(x0);
            idx += 1;
        }
    }
    least
}

/// Replaces `g` by its normal form `g_bar(x0, x1) = <g_tilde(x0, x1), x1>`.
///
/// Requires `g` to be 2-bounded with the whole domain a tail rainbow; the
/// result has exactly the same rainbow subsets.
pub fn normalize_pairs(g: &Coloring) -> Result<Coloring> {
    expect_arity(g, 2)?;
    g.check_bound(2)?;
    if let Some(w) = tail_collision(&full_domain(g), g, 1)? {
        return Err(Error::Precondition {
            what: "domain is not a tail rainbow",
            witness: w,
        });
    }
    let mut colors = least_partners(g).into_iter().map(|u| u as u64).collect::<Vec<_>>();
    for_each_tuple(g.n(), 2, |rank, t| colors[rank as usize] = pair_code(colors[rank as usize] as usize, t[1]));
    Coloring::new(2, 2, g.n(), colors)
}

pub fn is_normal(g: &Coloring) -> bool {
    if g.arity() != 2 || !g.is_bounded_by(2) {
        return false;
    }
    // A normal color at (x0, x1) names a pair (u, x1) with u <= x0 that carries
    // the same color; then u is automatically the least partner.
    let colors = g.colors();
    let mut ok = true;
    for_each_tuple(g.n(), 2, |rank, t| {
        let base = pair_code(0, t[1]);
        let c = colors[rank as usize];
        ok &= c >= base && c <= rank && colors[c as usize] == c;
    });
    ok
}

/// Least pair `(y0, y1)` over the same last coordinate sharing each triple's color.
fn least_pairs_per_slice(g: &Coloring) -> Vec<(usize, usize)> {
    let mut least = vec![(0, 0); g.colors().len()];
    let mut first: HashMap<u64, (usize, usize)> = HashMap::new();
    let mut idx = 0usize;
    // Colex order: for each x2, pairs (x0, x1) with x1 < x2 in colex order.
    for x2 in 2..g.n() {
        first.clear();
        for x1 in 1..x2 {
            for x0 in 0..x1 {
                let c = g.colors()[idx];
                least[idx] = *first.entry(c).or_insert((x0, x1));
                idx += 1;
            }
        }
    }
    least
}

/// Semi-normal form of a 2-bounded triple coloring whose domain is a 1-tail
/// rainbow. Preserves the color classes, hence every k-tail rainbow.
pub fn semi_normalize_triples(g: &Coloring) -> Result<Coloring> {
    expect_arity(g, 3)?;
    g.check_bound(2)?;
    if let Some(w) = tail_collision(&full_domain(g), g, 1)? {
        return Err(Error::Precondition {
            what: "domain is not a 1-tail rainbow",
            witness: w,
        });
    }
    let least = least_pairs_per_slice(g);
    let mut colors = vec![0u64; least.len()];
    for_each_tuple(g.n(), 3, |rank, t| {
        let (y0, y1) = least[rank as usize];
        colors[rank as usize] = triple_code(y0, y1, t[2]);
    });
    Coloring::new(3, 2, g.n(), colors)
}

pub fn is_semi_normal(g: &Coloring) -> bool {
    if g.arity() != 3 || !g.is_bounded_by(2) {
        return false;
    }
    // As for pairs: the color must name a triple (y0, y1, x2) at or before this
    // one in the same slice that carries that very color.
    let colors = g.colors();
    let mut ok = true;
    for_each_tuple(g.n(), 3, |rank, t| {
        let base = triple_code(0, 1, t[2]);
        let c = colors[rank as usize];
        ok &= c >= base && c <= rank && colors[c as usize] == c;
    });
    ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::is_rainbow;
    use crate::tuple::rank_slice;

    fn worked_example() -> Coloring {
        // g(0,1) = 5, g(0,2) = 7, g(1,2) = 7
        Coloring::new(2, 2, 3, vec![5, 7, 7]).unwrap()
    }

    #[test]
    fn worked_example_by_hand() {
        let gb = normalize_pairs(&worked_example()).unwrap();
        assert_eq!(gb.color(&[0, 1]), pair_code(0, 1));
        assert_eq!(gb.color(&[0, 2]), pair_code(0, 2));
        assert_eq!(gb.color(&[1, 2]), pair_code(0, 2));
        assert!(is_normal(&gb));
        assert!(!is_normal(&worked_example()));
        for mask in 0u32..8 {
            let x: Vec<usize> = (0..3).filter(|i| mask >> i & 1 == 1).collect();
            assert_eq!(is_rainbow(&x, &worked_example()), is_rainbow(&x, &gb));
        }
    }

    #[test]
    fn normal_input_is_fixed() {
        let g = normalize_pairs(&worked_example()).unwrap();
        assert_eq!(normalize_pairs(&g).unwrap(), g);
        let inj = Coloring::from_fn(2, 1, 7, rank_slice).unwrap();
        assert!(is_normal(&inj));
        assert_eq!(normalize_pairs(&inj).unwrap(), inj);
    }

    #[test]
    fn rejects_non_tail_rainbow_domain() {
        // g(0,1) = g(0,2): different last coordinates.
        let g = Coloring::new(2, 2, 3, vec![1, 1, 2]).unwrap();
        match normalize_pairs(&g) {
            Err(Error::Precondition { witness, .. }) => {
                assert_eq!(witness, (vec![0, 1], vec![0, 2]));
            }
            other => panic!("unexpected {other:?}"),
        }
        let g3 = Coloring::new(2, 3, 3, vec![1, 1, 1]).unwrap();
        assert!(matches!(normalize_pairs(&g3), Err(Error::BoundViolation { .. })));
    }

    #[test]
    fn shape_violation_is_not_normal() {
        // (0,2) colored with a code whose last coordinate is not 2.
        let g = Coloring::new(2, 2, 3, vec![pair_code(0, 1), pair_code(1, 2), pair_code(1, 2)]).unwrap();
        assert!(!is_normal(&g));
    }

    #[test]
    fn semi_normal_shape() {
        // Slice z = 3: (0,1,3) ~ (1,2,3); everything else a singleton.
        let g = Coloring::from_fn(3, 2, 4, |t| match t {
            [0, 1, 3] | [1, 2, 3] => 99,
            _ => rank_slice(t),
        })
        .unwrap();
        let s = semi_normalize_triples(&g).unwrap();
        assert!(is_semi_normal(&s));
        assert!(!is_semi_normal(&g));
        assert_eq!(s.color(&[1, 2, 3]), triple_code(0, 1, 3));
        assert_eq!(s.color(&[0, 1, 3]), triple_code(0, 1, 3));
        assert_eq!(s.color(&[0, 2, 3]), triple_code(0, 2, 3));
        assert_eq!(semi_normalize_triples(&s).unwrap(), s);
    }
}
