//! Slow reference implementations used to check the fast ones.

#![allow(dead_code)]

use lexkernel::defgraph::{DefGraph, WordId};

fn adjacency(g: &DefGraph) -> Vec<Vec<bool>> {
    let n = g.len();
    let mut adj = vec![vec![false; n]; n];
    for (u, v) in g.arcs() {
        adj[u.index()][v.index()] = true;
    }
    adj
}

/// Reachability by breadth-first search from every vertex: `r[u][v]` iff a
/// path of at least one arc leads from u to v.
pub fn transitive_closure(g: &DefGraph) -> Vec<Vec<bool>> {
    let n = g.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|u| g.successors(WordId(u as u32)).map(|v| v.index()).collect())
        .collect();
    (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            let mut queue: std::collections::VecDeque<usize> = adj[s].iter().copied().collect();
            for &v in &adj[s] {
                seen[v] = true;
            }
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            seen
        })
        .collect()
}

/// Partition into mutual-reachability classes, each sorted, ordered by
/// smallest member.
pub fn scc_partition(g: &DefGraph) -> Vec<Vec<usize>> {
    let n = g.len();
    let r = transitive_closure(g);
    let mut seen = vec![false; n];
    let mut parts = Vec::new();
    for u in 0..n {
        if seen[u] {
            continue;
        }
        let part: Vec<usize> = (0..n).filter(|&v| v == u || (r[u][v] && r[v][u])).collect();
        for &v in &part {
            seen[v] = true;
        }
        parts.push(part);
    }
    parts
}

/// Vertices with a path to a vertex lying on a circuit.
pub fn kernel_by_reachability(g: &DefGraph) -> Vec<bool> {
    let n = g.len();
    let r = transitive_closure(g);
    let on_circuit: Vec<bool> = (0..n).map(|v| r[v][v]).collect();
    (0..n)
        .map(|u| on_circuit[u] || (0..n).any(|w| on_circuit[w] && r[u][w]))
        .collect()
}

/// Acyclicity of the graph minus `removed`, by repeatedly deleting sinks.
pub fn acyclic_without(g: &DefGraph, removed: &[bool]) -> bool {
    let n = g.len();
    let adj = adjacency(g);
    let mut alive: Vec<bool> = removed.iter().map(|r| !r).collect();
    loop {
        let sink = (0..n).find(|&v| alive[v] && !(0..n).any(|w| alive[w] && adj[v][w]));
        match sink {
            Some(v) => alive[v] = false,
            None => return !alive.iter().any(|&a| a),
        }
    }
}

/// Learnability read literally: start from U and add any vertex whose
/// predecessors are all learnable, until nothing changes.
pub fn learnable_by_fixpoint(g: &DefGraph, ground: &[bool]) -> Vec<bool> {
    let n = g.len();
    let adj = adjacency(g);
    let mut learned = ground.to_vec();
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..n {
            if !learned[v] && (0..n).all(|u| !adj[u][v] || learned[u]) {
                learned[v] = true;
                changed = true;
            }
        }
    }
    learned
}

fn mask_of(bits: u32, n: usize) -> Vec<bool> {
    (0..n).map(|i| bits >> i & 1 == 1).collect()
}

/// Size of a minimum feedback vertex set by trying every subset in order
/// of size.
pub fn brute_min_fvs(g: &DefGraph) -> usize {
    let n = g.len();
    assert!(n <= 20);
    let mut subsets: Vec<u32> = (0..1u32 << n).collect();
    subsets.sort_by_key(|s| s.count_ones());
    for s in subsets {
        if acyclic_without(g, &mask_of(s, n)) {
            return s.count_ones() as usize;
        }
    }
    unreachable!("the full vertex set is always a feedback vertex set")
}

/// Every minimum feedback vertex set, as sorted id lists.
pub fn brute_all_min_fvs(g: &DefGraph) -> Vec<Vec<WordId>> {
    let n = g.len();
    let k = brute_min_fvs(g);
    let mut out: Vec<Vec<WordId>> = (0..1u32 << n)
        .filter(|s| s.count_ones() as usize == k && acyclic_without(g, &mask_of(*s, n)))
        .map(|s| (0..n).filter(|&i| s >> i & 1 == 1).map(|i| WordId(i as u32)).collect())
        .collect();
    out.sort();
    out
}

/// Every digraph on `n` vertices, self-loops included, by arc bitmask.
pub fn all_digraphs(n: usize) -> impl Iterator<Item = DefGraph> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).collect();
    (0..1u64 << slots.len()).map(move |bits| {
        let arcs = slots
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .map(|(_, &a)| a);
        DefGraph::from_arcs(n, arcs)
    })
}
