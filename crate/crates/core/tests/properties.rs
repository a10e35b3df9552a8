//! Property tests over randomly drawn words, subsets and elements.

use std::sync::OnceLock;

use proptest::prelude::*;
use ramcx::analysis::{discrepancy, type_regular_corpus, TypedFacets};
use ramcx::complex::{walls_and_incidence, PartiteHypergraph};
use ramcx::cslattice::{generators, GeneratorSet};
use ramcx::quotient::{generate_group, reduce_mod_f, search_polynomial, CongruenceMap, DEFAULT_GROUP_BUDGET};
use ramcx::{relative_position, Field, ValMatrix};

fn f3_field() -> &'static Field {
    static F: OnceLock<Field> = OnceLock::new();
    F.get_or_init(|| Field::new(3, 4).unwrap())
}

fn gens_33() -> &'static GeneratorSet {
    static G: OnceLock<GeneratorSet> = OnceLock::new();
    G.get_or_init(|| generators(3, 3).unwrap())
}

fn cmap_psl2_9() -> &'static (CongruenceMap, GeneratorSet) {
    static C: OnceLock<(CongruenceMap, GeneratorSet)> = OnceLock::new();
    C.get_or_init(|| {
        let c = search_polynomial(3, 2, 2, 1).unwrap();
        let g = c.generators().unwrap();
        (c, g)
    })
}

fn corpus() -> &'static [PartiteHypergraph] {
    static C: OnceLock<Vec<PartiteHypergraph>> = OnceLock::new();
    C.get_or_init(|| type_regular_corpus(99, 40, 10))
}

fn word_product(gens: &GeneratorSet, word: &[usize]) -> ValMatrix {
    let f = gens.field();
    let all: Vec<_> = gens.all().collect();
    let mut m = ValMatrix::identity(gens.d());
    for &k in word {
        m = m.mul(&all[k % all.len()].raw, f);
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn frobenius_fixes_the_field_and_orders_divide(a in 1u32..81) {
        let f = f3_field();
        let x = ramcx::Fe(a);
        prop_assert_eq!(f.frobenius_pow(x, 4), x);
        prop_assert_eq!(80 % f.element_order(x).unwrap(), 0);
        prop_assert_eq!(f.mul(x, f.inv(x)), f.one());
    }

    #[test]
    fn generator_types_add_along_words(word in proptest::collection::vec(0usize..26, 0..5)) {
        let gens = gens_33();
        let f = gens.field();
        let all: Vec<_> = gens.all().collect();
        let expected: usize = word.iter().map(|&k| all[k].level).sum::<usize>() % 3;
        let m = word_product(gens, &word);
        let v = m.determinant(f).valuation().unwrap();
        prop_assert_eq!(v.rem_euclid(3) as usize, expected);
        let rp = relative_position(&ValMatrix::identity(3), &m, f).unwrap();
        prop_assert_eq!(rp.type_offset() as usize, expected);
    }

    #[test]
    fn reduction_is_a_homomorphism(a in proptest::collection::vec(0usize..4, 1..4), b in proptest::collection::vec(0usize..4, 1..4)) {
        let (cmap, gens) = cmap_psl2_9();
        let f = gens.field();
        let ma = word_product(gens, &a);
        let mb = word_product(gens, &b);
        let lhs = reduce_mod_f(&ma.mul(&mb, f), cmap).unwrap();
        let rhs = reduce_mod_f(&ma, cmap).unwrap().mul(&reduce_mod_f(&mb, cmap).unwrap(), f);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn discrepancy_is_a_probability_gap(idx in 0usize..40, seed in any::<u64>()) {
        let h = &corpus()[idx % corpus().len()];
        let tf = TypedFacets::new(h).unwrap();
        let mut s = seed;
        let w: Vec<Vec<u32>> = tf.parts.iter().map(|p| {
            p.iter().copied().filter(|_| { s = s.rotate_left(7) ^ 0x9E37_79B9; s & 1 == 1 }).collect()
        }).collect();
        let disc = discrepancy(h, &w).unwrap();
        prop_assert!(disc >= num_rational::Ratio::from_integer(0));
        prop_assert!(disc <= num_rational::Ratio::from_integer(1));
        // relabelling the types by a cyclic shift permutes the subsets with them
        let d = h.d() as u32;
        let types: Vec<u32> = h.types().unwrap().iter().map(|t| (t + 1) % d).collect();
        let shifted = PartiteHypergraph::new(h.d(), h.n(), d, Some(types), h.facets().to_vec()).unwrap();
        let mut w2 = w.clone();
        w2.rotate_right(1);
        prop_assert_eq!(discrepancy(&shifted, &w2).unwrap(), disc);
    }
}

#[test]
fn depth_one_is_a_bijection_onto_neighbors() {
    for (d, q) in [(2, 3), (2, 5), (3, 3)] {
        let gens = generators(d, q).unwrap();
        let ball = ramcx::cslattice::building_ball(&gens, 1, 100_000).unwrap();
        assert_eq!(ball.len(), 1 + gens.len());
        for g in gens.all() {
            let rp = g.matrix.rel_position(gens.field()).unwrap();
            assert!(rp.classify().neighbor);
            assert_eq!(rp.distance(), 1);
        }
    }
}

#[test]
fn rank_two_balls_are_trees() {
    for q in [3u64, 5] {
        let gens = generators(2, q).unwrap();
        let ball = ramcx::cslattice::building_ball(&gens, 3, 100_000).unwrap();
        let want = ramcx::analysis::tree_ball_sizes(q, 3);
        let mut acc = 0;
        for (r, s) in ball.sphere_sizes().into_iter().enumerate() {
            acc += s as u64;
            assert_eq!(acc, want[r], "q = {q}, radius {r}");
        }
    }
}

#[test]
fn partite_index_matches_the_request() {
    for (q, d, e, r) in [(3u64, 2usize, 2u32, 1u32), (3, 2, 2, 2), (5, 2, 2, 2), (3, 2, 3, 1), (3, 3, 2, 1)] {
        if let Ok(c) = search_polynomial(q, d, e, r) {
            assert_eq!(ramcx::quotient::partite_index(&c), r);
        }
    }
}

#[test]
fn incidence_edges_biject_with_facets() {
    for h in corpus() {
        for i in 0..h.d() as u32 {
            assert_eq!(walls_and_incidence(h, i).unwrap().edges.len(), h.facets().len());
        }
    }
}

#[test]
fn partite_labels_close_up() {
    // generate_group fails with a consistency error when a relation has nonzero total type
    let c = search_polynomial(3, 2, 2, 2).unwrap();
    let g = generate_group(&c.generators().unwrap(), &c, DEFAULT_GROUP_BUDGET).unwrap();
    let t = g.graph.types.as_ref().unwrap();
    for v in 0..g.len() {
        for (k, &w) in g.graph.neighbors(v).iter().enumerate() {
            assert_eq!(t[w as usize], (t[v] + g.graph.gen_levels[k]) % 2);
        }
    }
}
