use std::cmp::Ordering;

use proptest::prelude::*;

use outerspine::complexes::{
    contractibility_pipeline, homology_f2, is_acyclic, reductive_subposet, OrderComplex, Verdict,
};
use outerspine::folds::{ends_at_standard_rose, fold_to_rose_randomized, verify_kn_path};
use outerspine::free_words::{canonical_class, Letter, Word};
use outerspine::marked_graphs::{compare_norm, roses_equal, Rose};
use outerspine::sampling::{random_isometric_twin, random_nonstandard_rose, random_rose, rng_from_seed};
use outerspine::whitehead::{
    blowup, count_identity_check, full_set, max_reductive_edge, nontrivial_ideal_edges, reductive_edges, size,
    star_graph, whitehead_reduce, IdealTree,
};
use outerspine::Limits;

fn rose_strategy() -> impl Strategy<Value = Rose> {
    (2usize..=3, any::<u64>(), 1usize..=8).prop_map(|(n, seed, k)| random_rose(&mut rng_from_seed(seed), n, k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn star_graph_edges_count_translation_length(rho in rose_strategy(), codes in prop::collection::vec(0usize..6, 1..7)) {
        let n = rho.rank();
        let w = Word::new(codes.into_iter().map(|c| Letter::from_code(c % (2 * n))));
        if let Ok(c) = canonical_class(&w) {
            let g = star_graph(&rho, &c);
            prop_assert_eq!(g.edges.len(), rho.translation_length(&c));
            prop_assert_eq!(g.valences().iter().sum::<usize>(), 2 * g.edges.len());
        }
    }

    #[test]
    fn counting_identity_is_exact(rho in rose_strategy(), a in any::<u32>(), b in any::<u32>()) {
        let h = full_set(rho.rank());
        prop_assert!(count_identity_check(&rho, a & h, b & h, 3));
    }

    #[test]
    fn randomized_folding_reaches_the_standard_rose(rho in rose_strategy(), seed in any::<u64>()) {
        let run = fold_to_rose_randomized(&rho, &mut rng_from_seed(seed)).unwrap();
        prop_assert!(verify_kn_path(&run.path));
        prop_assert!(ends_at_standard_rose(&run.path));
        prop_assert!(run.moves.iter().all(|m| m.edges_after < m.edges_before));
    }

    #[test]
    fn norm_comparison_ignores_isometries(a in rose_strategy(), seed in any::<u64>()) {
        let limits = Limits::default();
        let mut rng = rng_from_seed(seed);
        let b = random_rose(&mut rng, a.rank(), 4);
        let ab = compare_norm(&a, &b, &limits).unwrap();
        let twin = compare_norm(&random_isometric_twin(&mut rng, &a), &b, &limits).unwrap();
        prop_assert_eq!(ab, twin);
        prop_assert_eq!(ab == Ordering::Equal, roses_equal(&a, &b));
    }

    #[test]
    fn ideal_edge_sizes_are_crossings(rho in rose_strategy(), pick in any::<usize>()) {
        let edges = nontrivial_ideal_edges(rho.rank());
        let alpha = edges[pick % edges.len()];
        let b = blowup(&rho, &IdealTree::new([alpha]).unwrap()).unwrap();
        let crossings = b.marked.edge_crossings(b.edge_of(&alpha).unwrap()).unwrap();
        prop_assert!(size(&rho, alpha.side()).unwrap().agrees_up_to(&crossings, 3));
    }

    #[test]
    fn descent_ends_at_a_minimum(rho in rose_strategy()) {
        let limits = Limits::default();
        let (end, trace) = whitehead_reduce(&rho, &limits).unwrap();
        prop_assert!(trace.len() <= 64);
        prop_assert!(reductive_edges(&end, &limits).unwrap().is_empty());
        prop_assert!(max_reductive_edge(&end, &limits).unwrap().is_none());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn pipeline_agrees_with_homology(seed in any::<u64>(), n in 2usize..=3) {
        let limits = Limits::default();
        let rho = random_nonstandard_rose(&mut rng_from_seed(seed), n, 8);
        let (verdict, trace) = contractibility_pipeline(&rho, &limits).unwrap();
        prop_assert_eq!(verdict, Verdict::Contractible);
        prop_assert_eq!(trace.steps.last().unwrap().after.len(), 1);
        let p = reductive_subposet(&rho, &limits).unwrap();
        let c = OrderComplex::of_poset(&p).unwrap();
        prop_assert!(is_acyclic(&homology_f2(&c).unwrap()));
        prop_assert_eq!(c.euler_characteristic(), 1);
    }
}
