mod common;

use fixsize_core::index_coding::{
    chromatic_leq, confusion_graph, encoder_works, solvable_at_k, Client, ConfusionGraph, IndexInstance,
};
use fixsize_core::network::SizeSpec;
use proptest::prelude::*;

fn least_colors(g: &ConfusionGraph) -> usize {
    (0..=g.vertices).find(|&m| chromatic_leq(g, m).is_some()).unwrap()
}

#[test]
fn coloring_matches_encoder_enumeration() {
    let all = common::micro_index_instances();
    assert!(all.len() > 10_000);
    for inst in &all {
        for k in 1..=2 {
            let want = common::min_symbols_by_enumeration(inst, k);
            let g = confusion_graph(inst, k).unwrap();
            assert_eq!(least_colors(&g).max(1), want, "{} at k={k}", inst.to_json());
            for (a, b) in [(1, 0), (2, 0), (3, 0), (1, 1), (1, 2)] {
                let inst = IndexInstance { a, b, ..inst.clone() };
                let out = solvable_at_k(&inst, k).unwrap();
                assert_eq!(out.solvable, want <= inst.alphabet(k));
                if let Some(f) = out.encoder {
                    assert!(encoder_works(&inst, k, &f).unwrap());
                }
            }
        }
    }
}

#[test]
fn pigeonhole_negatives() {
    for l in 1..=3 {
        let inst = IndexInstance {
            messages: vec![SizeSpec::Fixed(2); l],
            a: 1,
            b: 0,
            clients: vec![Client { has: (2..=l).collect(), wants: vec![1] }],
        };
        for k in 1..=3 {
            assert!(!solvable_at_k(&inst, k).unwrap().solvable);
        }
    }
}

fn brute_colorable(g: &ConfusionGraph, m: usize) -> bool {
    let n = g.vertices;
    if m == 0 {
        return n == 0;
    }
    let mut c = vec![0u32; n];
    loop {
        if g.is_proper(&c) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            c[i] += 1;
            if (c[i] as usize) < m {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

fn graph_strategy() -> impl Strategy<Value = ConfusionGraph> {
    (1usize..=7).prop_flat_map(|n| {
        proptest::collection::vec(proptest::bool::weighted(0.45), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            let edges: Vec<_> = pairs.into_iter().zip(bits).filter(|(_, b)| *b).map(|(p, _)| p).collect();
            ConfusionGraph::from_edges(n, &edges)
        })
    })
}

fn instance_strategy() -> impl Strategy<Value = IndexInstance> {
    let size = prop_oneof![Just(SizeSpec::Fixed(1)), Just(SizeSpec::Fixed(2)), Just(SizeSpec::Fixed(3)), Just(SizeSpec::Default)];
    (proptest::collection::vec(size, 1..=3), proptest::collection::vec((0u8..8, 1u8..8), 0..=3)).prop_map(|(messages, raw)| {
        let l = messages.len();
        let pick = |mask: u8| (1..=l).filter(|m| mask >> (m - 1) & 1 == 1).collect::<Vec<_>>();
        let mut inst = IndexInstance {
            messages,
            a: 1,
            b: 0,
            clients: raw.into_iter().map(|(h, w)| Client { has: pick(h), wants: pick(w) }).collect(),
        };
        inst.normalize().unwrap();
        inst
    })
}

proptest! {
    #[test]
    fn chromatic_matches_brute_force(g in graph_strategy(), m in 0usize..5) {
        let got = chromatic_leq(&g, m);
        prop_assert_eq!(got.is_some(), brute_colorable(&g, m));
        if let Some(c) = got {
            prop_assert!(g.is_proper(&c));
            prop_assert!(c.iter().all(|&x| (x as usize) < m));
        }
    }

    #[test]
    fn solvability_is_monotone_in_alphabet(inst in instance_strategy(), k in 1usize..=3, a in 1usize..4, b in 0usize..3, da in 0usize..3, db in 0usize..2) {
        let small = IndexInstance { a, b, ..inst.clone() };
        let large = IndexInstance { a: a + da, b: b + db, ..inst };
        if solvable_at_k(&small, k).unwrap().solvable {
            prop_assert!(solvable_at_k(&large, k).unwrap().solvable);
        }
    }
}
