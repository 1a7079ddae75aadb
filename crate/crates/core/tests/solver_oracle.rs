mod common;

use fixsize_core::network::canonicalize;
use fixsize_core::solver::{enumerate_solutions, solve_at_k, solve_naive, verify_scheme, SolveOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn plain() -> SolveOptions {
    SolveOptions { symmetry_breaking: false, ..SolveOptions::default() }
}

#[test]
fn search_matches_naive_on_random_networks() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..300 {
        let k = 1 + i % 2;
        let net = common::random_small(&mut rng, 3, k);
        let truth = solve_naive(&net, k, &Default::default()).unwrap().solvable();
        for opts in [SolveOptions::default(), plain()] {
            let out = solve_at_k(&net, k, &opts).unwrap();
            assert_eq!(out.is_solvable(), truth, "instance {i}: {net:?}");
            if let Some(s) = out.witness() {
                assert!(verify_scheme(&net, s).ok);
            }
        }
    }
}

#[test]
fn plain_enumeration_counts_every_reachable_scheme() {
    // Without symmetry breaking every function on reachable rows is listed.
    // When every edge leaves a node without in-edges all rows are reachable,
    // so the list must match the naive count exactly.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut compared = 0;
    for _ in 0..400 {
        let net = common::random_small(&mut rng, 2, 2);
        if !net.edges.iter().all(|e| net.in_edges(&e.tail).is_empty()) {
            continue;
        }
        let naive = solve_naive(&net, 2, &Default::default()).unwrap().solutions as usize;
        let listed = enumerate_solutions(&net, 2, usize::MAX, &plain()).unwrap().len();
        assert_eq!(naive, listed, "{net:?}");
        compared += 1;
    }
    assert!(compared > 20, "{compared}");
}

#[test]
fn canonical_form_preserves_solvability() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..150 {
        let net = common::random_small(&mut rng, 3, 3);
        let canon = canonicalize(&net).unwrap();
        for k in 1..=3 {
            let a = solve_at_k(&net, k, &SolveOptions::default()).unwrap().is_solvable();
            let b = solve_at_k(&canon, k, &SolveOptions::default()).unwrap().is_solvable();
            assert_eq!(a, b, "k={k} {net:?}");
        }
    }
}
