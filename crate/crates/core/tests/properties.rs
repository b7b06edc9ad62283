use std::collections::BTreeSet;

use proptest::prelude::*;
use spr_core::pc_graph::{
    build_pc_graph, edge_topological_orderings, enumerate_snr_domains, is_acyclic_restriction,
    is_connected, is_spanning_tree, merge_all, realize_snr_order, snrdom,
};
use spr_core::reduction::{
    apply_reduction, find_successful_reduction, postpone_snr, reduction_domain,
};
use spr_core::reduction_graph::{
    build_reduction_graph, canonical_form, components, is_isomorphic, reduction_functions,
};
use spr_core::{Label, LegalString, Pointer};

fn legal_string(max_labels: u32) -> impl Strategy<Value = LegalString> {
    (0..=max_labels)
        .prop_flat_map(|n| {
            let labels: Vec<Label> = (2..n + 2).flat_map(|l| [l, l]).collect();
            let len = labels.len();
            (
                Just(labels).prop_shuffle(),
                prop::collection::vec(any::<bool>(), len),
            )
        })
        .prop_map(|(labels, bars)| {
            let pointers = labels
                .into_iter()
                .zip(bars)
                .map(|(l, b)| {
                    if b {
                        Pointer::inverted(l)
                    } else {
                        Pointer::plain(l)
                    }
                })
                .collect();
            LegalString::new(pointers).expect("two occurrences per label")
        })
}

fn with_subset(max_labels: u32) -> impl Strategy<Value = (LegalString, BTreeSet<Label>)> {
    legal_string(max_labels).prop_flat_map(|u| {
        let dom: Vec<Label> = u.domain().into_iter().collect();
        (
            Just(u),
            prop::sample::subsequence(dom.clone(), 0..=dom.len()),
        )
            .prop_map(|(u, d)| (u, d.into_iter().collect()))
    })
}

fn cyclic(u: &LegalString) -> usize {
    components(&build_reduction_graph(u))
        .unwrap()
        .cyclic_count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn text_roundtrip(u in legal_string(6)) {
        prop_assert_eq!(u.to_string().parse::<LegalString>().unwrap(), u);
    }

    #[test]
    fn inverse_is_an_involution(u in legal_string(6)) {
        let s = u.to_pointer_string();
        prop_assert_eq!(s.inverse().inverse(), s);
    }

    #[test]
    fn removal_composes((u, d) in with_subset(6), (_, e) in with_subset(6)) {
        let union: BTreeSet<Label> = d.union(&e).copied().collect();
        prop_assert_eq!(u.remove_pointers(&d).remove_pointers(&e), u.remove_pointers(&union));
    }

    #[test]
    fn greedy_reduction_succeeds(u in legal_string(6)) {
        let phi = find_successful_reduction(&u);
        prop_assert!(apply_reduction(&u, &phi).unwrap().is_empty());
        prop_assert_eq!(reduction_domain(&phi), u.domain());
    }

    #[test]
    fn snr_count_matches_graphs(u in legal_string(6)) {
        let phi = find_successful_reduction(&u);
        let order = build_pc_graph(&u).order();
        prop_assert_eq!(phi.snr_count(), cyclic(&u));
        prop_assert_eq!(phi.snr_count() + 1, order);
    }

    #[test]
    fn postponed_snr_set_is_a_spanning_tree(u in legal_string(6)) {
        let phi = postpone_snr(&u, &find_successful_reduction(&u)).unwrap();
        prop_assert!(apply_reduction(&u, &phi).unwrap().is_empty());
        let snr: BTreeSet<Label> = phi.snr_labels().into_iter().collect();
        prop_assert!(is_spanning_tree(&build_pc_graph(&u), &snr).unwrap());
    }

    #[test]
    fn pc_graph_is_connected(u in legal_string(6)) {
        prop_assert!(is_connected(&build_pc_graph(&u)));
    }

    #[test]
    fn rf_simulates_reductions(u in legal_string(6)) {
        let phi = find_successful_reduction(&u);
        let g = build_reduction_graph(&u);
        for prefix in phi.prefixes() {
            let v = apply_reduction(&u, &prefix).unwrap();
            let image = reduction_functions(&g, reduction_domain(&prefix));
            let target = build_reduction_graph(&v);
            prop_assert!(is_isomorphic(&image, &target).unwrap());
            prop_assert_eq!(canonical_form(&image).unwrap(), canonical_form(&target).unwrap());
        }
    }

    #[test]
    fn counting_form((u, d) in with_subset(6)) {
        let g = build_pc_graph(&u);
        let tree = is_spanning_tree(&g, &d).unwrap();
        let counts = cyclic(&u.remove_pointers(&d)) == 0 && cyclic(&u) == d.len();
        prop_assert_eq!(tree, counts);
    }

    #[test]
    fn acyclic_merges_match_removal((u, d) in with_subset(6)) {
        let g = build_pc_graph(&u);
        if is_acyclic_restriction(&g, &d).unwrap() {
            let merged = merge_all(&g, d.iter().copied()).unwrap();
            prop_assert!(merged.is_isomorphic(&build_pc_graph(&u.remove_pointers(&d))));
        } else {
            prop_assert!(merge_all(&g, d.iter().copied()).is_err());
        }
    }

    #[test]
    fn removal_commutes_with_reduction((u, d) in with_subset(6)) {
        let phi = find_successful_reduction(&u);
        let removed = u.remove_pointers(&d);
        for prefix in phi.prefixes() {
            if let (Ok(a), Ok(b)) = (apply_reduction(&u, &prefix), apply_reduction(&removed, &prefix)) {
                prop_assert_eq!(b, a.remove_pointers(&d));
            }
        }
    }

    #[test]
    fn snrdom_survives_reduction(u in legal_string(6)) {
        let sd = snrdom(&u);
        let phi = find_successful_reduction(&u);
        for prefix in phi.prefixes() {
            let v = apply_reduction(&u, &prefix).unwrap();
            let want: BTreeSet<Label> = v.domain().intersection(&sd).copied().collect();
            prop_assert_eq!(snrdom(&v), want);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tree_orderings_are_realizable(u in legal_string(5)) {
        let g = build_pc_graph(&u);
        let domains = enumerate_snr_domains(&g);
        prop_assert!(!domains.is_empty());
        for order in edge_topological_orderings(&g, &domains[0]).unwrap() {
            let w = realize_snr_order(&u, &order).unwrap();
            prop_assert_eq!(w.snr_labels(), order);
            prop_assert!(apply_reduction(&u, &w).unwrap().is_empty());
        }
    }
}
