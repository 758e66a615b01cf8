mod common;

use common::oracles;
use lexkernel::defgraph::{scc, DefGraph, WordId};
use lexkernel::fixtures::{random_digraph, random_sparse_digraph};
use lexkernel::grounding::{is_feedback_vertex_set, is_grounding_set, learnable_mask, GroundSet};
use lexkernel::minset::{enumerate_minsets, greedy_fvs, pack_disjoint_circuits, solve_minset, SolveOptions};
use lexkernel::structure::kernel_mask;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sorted_partition(g: &DefGraph) -> Vec<Vec<usize>> {
    let s = scc(g);
    let mut parts: Vec<Vec<usize>> = (0..s.len())
        .map(|c| s.components[c].iter().map(|v| v.index()).collect())
        .collect();
    parts.sort();
    parts
}

#[test]
fn scc_matches_mutual_reachability() {
    let mut r = rng(1);
    for _ in 0..150 {
        let n = r.gen_range(1..=50);
        let p = r.gen_range(0.0..0.12);
        let g = random_digraph(&mut r, n, p, true);
        assert_eq!(sorted_partition(&g), oracles::scc_partition(&g));
    }
}

#[test]
fn kernel_matches_reaches_a_circuit() {
    let mut r = rng(2);
    for _ in 0..150 {
        let n = r.gen_range(1..=120);
        let g = { let d = r.gen_range(0.3..2.0); random_sparse_digraph(&mut r, n, d) };
        assert_eq!(kernel_mask(&g), oracles::kernel_by_reachability(&g));
    }
}

#[test]
fn grounding_equals_feedback_and_literal_closure() {
    let mut r = rng(3);
    for _ in 0..300 {
        let n = r.gen_range(1..=30);
        let g = { let p = r.gen_range(0.0..0.2); random_digraph(&mut r, n, p, true) };
        let p = r.gen_range(0.0..1.0);
        let members: Vec<WordId> = g.vertices().filter(|_| r.gen_bool(p)).collect();
        let u = GroundSet::user(members.clone());
        assert_eq!(is_grounding_set(&g, &u), is_feedback_vertex_set(&g, &members));
        assert_eq!(learnable_mask(&g, &u), oracles::learnable_by_fixpoint(&g, &u.mask(n)));
    }
}

#[test]
fn exact_minset_matches_brute_force() {
    let mut r = rng(4);
    for _ in 0..60 {
        let n = r.gen_range(1..=12);
        let g = { let (p, l) = (r.gen_range(0.05..0.4), r.gen_bool(0.3)); random_digraph(&mut r, n, p, l) };
        let m = solve_minset(&g, &SolveOptions::default()).unwrap();
        assert_eq!(m.size(), oracles::brute_min_fvs(&g), "graph {:?}", g.arcs().collect::<Vec<_>>());
        assert!(pack_disjoint_circuits(&g, 0) <= m.size());
        assert!(m.size() <= greedy_fvs(&g, 0).len());
    }
}

#[test]
fn enumeration_finds_every_optimum_on_small_graphs() {
    let mut r = rng(5);
    for _ in 0..40 {
        let n = r.gen_range(1..=8);
        let g = { let (p, l) = (r.gen_range(0.1..0.5), r.gen_bool(0.3)); random_digraph(&mut r, n, p, l) };
        let all = oracles::brute_all_min_fvs(&g);
        let found = enumerate_minsets(&g, all.len() + 5, &SolveOptions::default()).unwrap();
        let mut sets: Vec<Vec<WordId>> = found.iter().map(|m| m.members.clone()).collect();
        sets.sort();
        assert_eq!(sets, all);
    }
}

#[test]
fn small_digraphs_exhaustively() {
    for n in 1..=3 {
        for g in oracles::all_digraphs(n) {
            let m = solve_minset(&g, &SolveOptions::default()).unwrap();
            assert_eq!(m.size(), oracles::brute_min_fvs(&g));
            assert_eq!(kernel_mask(&g), oracles::kernel_by_reachability(&g));
        }
    }
}
