//! Cheap bounds: greedy feedback vertex sets from above, vertex-disjoint
//! shortest circuits from below.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::defgraph::{DefGraph, WordId};

/// Reusable BFS scratch space for shortest-circuit queries.
pub(crate) struct CircuitFinder {
    stamp: Vec<u32>,
    current: u32,
    parent: Vec<u32>,
    depth: Vec<u32>,
    queue: VecDeque<u32>,
}

impl CircuitFinder {
    pub(crate) fn new(n: usize) -> Self {
        CircuitFinder {
            stamp: vec![0; n],
            current: 0,
            parent: vec![0; n],
            depth: vec![0; n],
            queue: VecDeque::new(),
        }
    }

    /// Shortest circuit through `v` using only `alive` vertices, no longer
    /// than `max_len`. Returned in arc order starting at `v`.
    pub(crate) fn shortest_through(
        &mut self,
        succ: &[Vec<u32>],
        alive: &[bool],
        v: u32,
        max_len: usize,
    ) -> Option<Vec<u32>> {
        if max_len == 0 || !alive[v as usize] {
            return None;
        }
        if succ[v as usize].binary_search(&v).is_ok() {
            return Some(vec![v]);
        }
        self.current = self.current.wrapping_add(1);
        if self.current == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.current = 1;
        }
        let cur = self.current;
        self.queue.clear();
        self.stamp[v as usize] = cur;
        self.depth[v as usize] = 0;
        self.queue.push_back(v);
        while let Some(u) = self.queue.pop_front() {
            let d = self.depth[u as usize];
            // A circuit closing at u has length d + 1.
            if d as usize + 1 > max_len {
                break;
            }
            for &w in &succ[u as usize] {
                if w == v {
                    let mut path = vec![u];
                    let mut x = u;
                    while x != v {
                        x = self.parent[x as usize];
                        path.push(x);
                    }
                    path.reverse();
                    return Some(path);
                }
                let wi = w as usize;
                if !alive[wi] || self.stamp[wi] == cur {
                    continue;
                }
                self.stamp[wi] = cur;
                self.parent[wi] = u;
                self.depth[wi] = d + 1;
                self.queue.push_back(w);
            }
        }
        None
    }
}

/// Shortest circuit through `v`, in arc order, if any.
pub fn shortest_circuit_through(g: &DefGraph, v: WordId) -> Option<Vec<WordId>> {
    let mut finder = CircuitFinder::new(g.len());
    finder
        .shortest_through(g.successor_lists(), &vec![true; g.len()], v.0, usize::MAX)
        .map(|c| c.into_iter().map(WordId).collect())
}

/// Live subgraph with degree counters, pruned of vertices that cannot lie
/// on a circuit (no live predecessor or no live successor).
struct Pruner<'a> {
    succ: &'a [Vec<u32>],
    pred: &'a [Vec<u32>],
    alive: Vec<bool>,
    indeg: Vec<usize>,
    outdeg: Vec<usize>,
    stack: Vec<u32>,
}

impl<'a> Pruner<'a> {
    fn new(g: &'a DefGraph) -> Self {
        let succ = g.successor_lists();
        let pred = g.predecessor_lists();
        let n = g.len();
        let mut p = Pruner {
            succ,
            pred,
            alive: vec![true; n],
            indeg: pred.iter().map(Vec::len).collect(),
            outdeg: succ.iter().map(Vec::len).collect(),
            stack: Vec::new(),
        };
        for v in 0..n as u32 {
            if p.indeg[v as usize] == 0 || p.outdeg[v as usize] == 0 {
                p.stack.push(v);
            }
        }
        p.cascade(&mut |_| {});
        p
    }

    /// Removes `v` and anything left without a live predecessor or
    /// successor; `touched` sees every vertex whose degree changed.
    fn remove(&mut self, v: u32, touched: &mut dyn FnMut(u32)) {
        self.stack.push(v);
        self.cascade(touched);
    }

    fn cascade(&mut self, touched: &mut dyn FnMut(u32)) {
        while let Some(v) = self.stack.pop() {
            let vi = v as usize;
            if !self.alive[vi] {
                continue;
            }
            self.alive[vi] = false;
            for &w in &self.succ[vi] {
                let wi = w as usize;
                if self.alive[wi] {
                    self.indeg[wi] -= 1;
                    touched(w);
                    if self.indeg[wi] == 0 {
                        self.stack.push(w);
                    }
                }
            }
            for &u in &self.pred[vi] {
                let ui = u as usize;
                if self.alive[ui] {
                    self.outdeg[ui] -= 1;
                    touched(u);
                    if self.outdeg[ui] == 0 {
                        self.stack.push(u);
                    }
                }
            }
        }
    }

    fn live(&self) -> impl Iterator<Item = u32> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter(|&(_, &a)| a)
            .map(|(i, _)| i as u32)
    }
}

/// Seeded tie-break rank for every vertex: lower rank wins.
pub(crate) fn seeded_ranks(n: usize, seed: u64) -> Vec<u32> {
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut rank = vec![0u32; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v as usize] = r as u32;
    }
    rank
}

/// Greedy feedback vertex set: repeatedly take the live vertex with the
/// largest in-degree × out-degree, then drop members that turn out to be
/// redundant. Ties are broken by a seeded shuffle.
pub fn greedy_fvs(g: &DefGraph, seed: u64) -> Vec<WordId> {
    let picked = greedy_pick(g, &seeded_ranks(g.len(), seed));
    let mut members = remove_redundant(g, picked);
    members.sort_unstable();
    members.into_iter().map(WordId).collect()
}

pub(crate) fn greedy_pick(g: &DefGraph, rank: &[u32]) -> Vec<u32> {
    let mut pr = Pruner::new(g);
    let mut picked = Vec::new();
    let self_loops: Vec<u32> = pr
        .live()
        .filter(|&v| g.has_self_loop(WordId(v)))
        .collect();
    for v in self_loops {
        if pr.alive[v as usize] {
            picked.push(v);
            pr.remove(v, &mut |_| {});
        }
    }

    let score = |pr: &Pruner, v: u32| pr.indeg[v as usize] as u64 * pr.outdeg[v as usize] as u64;
    let mut heap: BinaryHeap<(u64, Reverse<u32>, u32)> = pr
        .live()
        .map(|v| (score(&pr, v), Reverse(rank[v as usize]), v))
        .collect();
    while let Some((s, _, v)) = heap.pop() {
        if !pr.alive[v as usize] || s != score(&pr, v) {
            continue;
        }
        picked.push(v);
        let mut touched = Vec::new();
        pr.remove(v, &mut |w| touched.push(w));
        for w in touched {
            if pr.alive[w as usize] {
                heap.push((score(&pr, w), Reverse(rank[w as usize]), w));
            }
        }
    }
    picked
}

/// Drops members whose removal keeps the set a feedback vertex set, trying
/// the latest picks first.
pub(crate) fn remove_redundant(g: &DefGraph, picked: Vec<u32>) -> Vec<u32> {
    let mut removed = vec![false; g.len()];
    for &v in &picked {
        removed[v as usize] = true;
    }
    let mut kept = Vec::with_capacity(picked.len());
    for &v in picked.iter().rev() {
        removed[v as usize] = false;
        if g.is_acyclic_without(&removed) {
            continue;
        }
        removed[v as usize] = true;
        kept.push(v);
    }
    kept
}

/// Vertex-disjoint circuits collected shortest-first: all self-loops, then
/// circuits of length 2, 3, ... found by BFS, each removing its vertices
/// before the search continues. Vertices are visited in seeded order.
pub fn disjoint_circuits(g: &DefGraph, seed: u64) -> Vec<Vec<WordId>> {
    pack(g, seed)
        .into_iter()
        .map(|c| c.into_iter().map(WordId).collect())
        .collect()
}

pub(crate) fn pack(g: &DefGraph, seed: u64) -> Vec<Vec<u32>> {
    let mut pr = Pruner::new(g);
    let rank = seeded_ranks(g.len(), seed);
    let mut order: Vec<u32> = (0..g.len() as u32).collect();
    order.sort_by_key(|&v| rank[v as usize]);
    let mut finder = CircuitFinder::new(g.len());
    let mut circuits = Vec::new();
    let mut len = 1;
    loop {
        let live = pr.live().count();
        if live == 0 || len > live {
            break;
        }
        for &v in &order {
            if !pr.alive[v as usize] {
                continue;
            }
            if let Some(c) = finder.shortest_through(pr.succ, &pr.alive, v, len) {
                for &w in &c {
                    pr.remove(w, &mut |_| {});
                }
                circuits.push(c);
            }
        }
        // Removals only destroy circuits, so nothing of length <= len is left.
        len += 1;
    }
    circuits
}

/// Number of vertex-disjoint circuits found shortest-first; a lower bound on
/// every feedback vertex set.
pub fn pack_disjoint_circuits(g: &DefGraph, seed: u64) -> usize {
    pack(g, seed).len()
}
