use proptest::prelude::*;

use rainbow_core::coloring::{full_domain, is_k_tail_rainbow, is_rainbow};
use rainbow_core::format::{parse_coloring, write_coloring, Format};
use rainbow_core::generate::{random_bounded_coloring, GenParams};
use rainbow_core::normal::{is_normal, normalize_pairs, semi_normalize_triples};
use rainbow_core::rainbow::{charging_floor_holds, greedy_tail_rainbow, viable_set};
use rainbow_core::reductions::{cohesive_thin, galvin_counterexample, galvin_dual};
use rainbow_core::{Coloring, IncreasingTuple};

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}

fn relabel(g: &Coloring, salt: u64) -> Coloring {
    let colors = g.colors().iter().map(|&c| c.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt).collect();
    Coloring::new(g.arity(), g.bound(), g.n(), colors).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalizing_keeps_rainbows(n in 3usize..10, seed in any::<u64>()) {
        let g = random_bounded_coloring(GenParams::new(2, 2, n, seed).same_last()).unwrap();
        let gb = normalize_pairs(&g).unwrap();
        prop_assert!(is_normal(&gb));
        for x in subsets(n) {
            prop_assert_eq!(is_rainbow(&x, &g), is_rainbow(&x, &gb));
        }
    }

    #[test]
    fn normal_form_ignores_color_names(n in 3usize..30, seed in any::<u64>(), salt in any::<u64>()) {
        let g = random_bounded_coloring(GenParams::new(2, 2, n, seed).same_last()).unwrap();
        prop_assert_eq!(normalize_pairs(&g).unwrap(), normalize_pairs(&relabel(&g, salt)).unwrap());
        let h = random_bounded_coloring(GenParams::new(3, 2, n.min(14), seed).same_last()).unwrap();
        prop_assert_eq!(
            semi_normalize_triples(&h).unwrap(),
            semi_normalize_triples(&relabel(&h, salt)).unwrap()
        );
    }

    #[test]
    fn wider_tails_are_stronger(k in 2usize..=4, n in 4usize..9, bound in 1usize..4, seed in any::<u64>()) {
        let f = random_bounded_coloring(GenParams::new(k, bound, n, seed)).unwrap();
        for x in subsets(n) {
            let flags: Vec<bool> = (1..=k).map(|w| is_k_tail_rainbow(&x, &f, w).unwrap()).collect();
            prop_assert_eq!(flags[k - 1], is_rainbow(&x, &f));
            for w in 1..k {
                prop_assert!(!flags[w] || flags[w - 1]);
            }
        }
    }

    #[test]
    fn rainbows_are_closed_under_subsets(n in 4usize..9, seed in any::<u64>()) {
        let f = random_bounded_coloring(GenParams::new(3, 2, n, seed)).unwrap();
        for x in subsets(n).filter(|x| is_rainbow(x, &f)) {
            for i in 0..x.len() {
                let mut y = x.clone();
                y.remove(i);
                prop_assert!(is_rainbow(&y, &f));
            }
        }
    }

    #[test]
    fn greedy_tail_floor(n in 2usize..300, seed in any::<u64>()) {
        let f = random_bounded_coloring(GenParams::new(2, 2, n, seed)).unwrap();
        let t = greedy_tail_rainbow(&f).unwrap();
        prop_assert!(is_k_tail_rainbow(t.as_slice(), &f, 1).unwrap());
        prop_assert!(charging_floor_holds(t.len(), n), "m = {} n = {}", t.len(), n);
    }

    #[test]
    fn thinning_is_antitone(
        sets in prop::collection::vec(prop::collection::btree_set(0usize..40, 0..40), 0..8),
    ) {
        let sets: Vec<Vec<usize>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let domain: Vec<usize> = (0..40).collect();
        let mut prev = domain.clone();
        for i in 1..=sets.len() {
            let c = cohesive_thin(&sets[..i], &domain).unwrap();
            prop_assert!(c.iter().all(|x| prev.contains(x)));
            prop_assert!(c.len() << i >= domain.len());
            prev = c;
        }
    }

    #[test]
    fn one_new_element_blocks_at_most_head_many(n in 10usize..60, seed in any::<u64>(), len in 0usize..5) {
        // For normal g: given y, the x with y viable for sigma but not for
        // sigma + {x} satisfy g(x, y) = g(u, y) for some u in sigma, and each
        // u has at most one such partner.
        let g = normalize_pairs(&random_bounded_coloring(GenParams::new(2, 2, n, seed).same_last()).unwrap()).unwrap();
        let head: Vec<usize> = full_domain(&g).into_iter().take(len).collect();
        let sigma = rainbow_core::rainbow::greedy_rainbow_over(&g, &head, false);
        let v = viable_set(&sigma, &g, n).unwrap();
        for &y in &v {
            let bad = v
                .iter()
                .filter(|&&x| x < y)
                .filter(|&&x| {
                    let ext = sigma.extended(x).unwrap();
                    !viable_set(&ext, &g, n).unwrap().contains(&y)
                })
                .count();
            prop_assert!(bad <= sigma.len(), "y = {} bad = {} sigma = {}", y, bad, sigma);
        }
    }

    #[test]
    fn dual_homogeneous_sets_are_rainbows(k in 2usize..=3, b in 2usize..=3, seed in any::<u64>()) {
        let f = random_bounded_coloring(GenParams::new(k, b, 9, seed)).unwrap();
        let g = galvin_dual(&f, b).unwrap();
        prop_assert_eq!(galvin_counterexample(&f, &g).unwrap(), None);
    }

    #[test]
    fn serialization_round_trips(k in 1usize..=4, n in 0usize..12, bound in 1usize..4, seed in any::<u64>()) {
        let n = n.max(k);
        let f = random_bounded_coloring(GenParams::new(k, bound, n, seed)).unwrap();
        for fmt in [Format::Rrcol, Format::Json] {
            let text = write_coloring(&f, fmt);
            let back = parse_coloring(&text).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(write_coloring(&back, fmt), text);
        }
    }

    #[test]
    fn tuples_round_trip(v in prop::collection::btree_set(0usize..500, 0..5)) {
        let v: Vec<usize> = v.into_iter().collect();
        let t = IncreasingTuple::new(v.clone()).unwrap();
        let code = rainbow_core::encode_tuple(&t);
        prop_assert_eq!(rainbow_core::tuple::decode_tuple(code).into_vec(), v);
    }
}
