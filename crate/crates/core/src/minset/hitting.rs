//! Minimum hitting set over a growing pool of circuit constraints, by
//! depth-first branch-and-bound.
//!
//! Branching picks the uncovered circuit with the fewest open vertices and
//! tries each of its vertices in turn, excluding the earlier ones, so the
//! subtrees are disjoint. The bound is a greedy packing of uncovered circuits
//! with pairwise disjoint open vertices.

use std::collections::HashSet;
use std::time::Instant;

#[derive(Debug, Default, Clone)]
pub(crate) struct CircuitPool {
    n: usize,
    circuits: Vec<Vec<u32>>,
    seen: HashSet<Vec<u32>>,
    by_vertex: Vec<Vec<u32>>,
    /// Circuit indices sorted by length, for the packing bound.
    by_length: Vec<u32>,
}

impl CircuitPool {
    pub(crate) fn new(n: usize) -> Self {
        CircuitPool {
            n,
            by_vertex: vec![Vec::new(); n],
            ..Default::default()
        }
    }

    /// Adds the vertex set of a circuit; returns false if already known.
    pub(crate) fn add(&mut self, mut circuit: Vec<u32>) -> bool {
        circuit.sort_unstable();
        circuit.dedup();
        if self.seen.contains(&circuit) {
            return false;
        }
        let idx = self.circuits.len() as u32;
        for &v in &circuit {
            self.by_vertex[v as usize].push(idx);
        }
        let pos = self
            .by_length
            .partition_point(|&c| self.circuits[c as usize].len() <= circuit.len());
        self.by_length.insert(pos, idx);
        self.seen.insert(circuit.clone());
        self.circuits.push(circuit);
        true
    }

    pub(crate) fn len(&self) -> usize {
        self.circuits.len()
    }
}

pub(crate) enum Outcome {
    /// A minimum hitting set among those smaller than the limit.
    Found(Vec<u32>),
    /// No hitting set smaller than the limit.
    NoneBelowLimit,
    TimedOut,
}

struct Search<'a> {
    pool: &'a CircuitPool,
    forbidden: &'a [Vec<u32>],
    chosen: Vec<bool>,
    chosen_list: Vec<u32>,
    excluded: Vec<bool>,
    hits: Vec<u32>,
    mark: Vec<u32>,
    stamp: u32,
    limit: usize,
    best: Option<Vec<u32>>,
    deadline: Instant,
    nodes: u64,
    timed_out: bool,
}

/// Finds a minimum hitting set of size below `limit` that contains no set in
/// `forbidden`. `nodes` accumulates the number of search nodes.
pub(crate) fn solve(
    pool: &CircuitPool,
    limit: usize,
    forbidden: &[Vec<u32>],
    deadline: Instant,
    nodes: &mut u64,
) -> Outcome {
    let mut s = Search {
        pool,
        forbidden,
        chosen: vec![false; pool.n],
        chosen_list: Vec::new(),
        excluded: vec![false; pool.n],
        hits: vec![0; pool.circuits.len()],
        mark: vec![0; pool.n],
        stamp: 0,
        limit,
        best: None,
        deadline,
        nodes: 0,
        timed_out: false,
    };
    s.dfs();
    *nodes += s.nodes;
    match (s.timed_out, s.best) {
        (true, _) => Outcome::TimedOut,
        (false, Some(b)) => Outcome::Found(b),
        (false, None) => Outcome::NoneBelowLimit,
    }
}

impl Search<'_> {
    fn contains_forbidden(&self) -> bool {
        self.forbidden
            .iter()
            .any(|f| f.iter().all(|&v| self.chosen[v as usize]))
    }

    fn choose(&mut self, v: u32) {
        self.chosen[v as usize] = true;
        self.chosen_list.push(v);
        for &c in &self.pool.by_vertex[v as usize] {
            self.hits[c as usize] += 1;
        }
    }

    fn unchoose(&mut self, v: u32) {
        self.chosen[v as usize] = false;
        self.chosen_list.pop();
        for &c in &self.pool.by_vertex[v as usize] {
            self.hits[c as usize] -= 1;
        }
    }

    fn dfs(&mut self) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(512) && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        if self.timed_out || self.chosen_list.len() >= self.limit {
            return;
        }
        if !self.forbidden.is_empty() && self.contains_forbidden() {
            return;
        }

        self.stamp += 1;
        let stamp = self.stamp;
        let mut bound = 0usize;
        let mut branch: Option<(usize, u32)> = None;
        for &c in &self.pool.by_length {
            if self.hits[c as usize] > 0 {
                continue;
            }
            let circuit = &self.pool.circuits[c as usize];
            let mut open = 0usize;
            let mut disjoint = true;
            for &v in circuit {
                if !self.excluded[v as usize] {
                    open += 1;
                    if self.mark[v as usize] == stamp {
                        disjoint = false;
                    }
                }
            }
            if open == 0 {
                return;
            }
            if disjoint {
                bound += 1;
                for &v in circuit {
                    if !self.excluded[v as usize] {
                        self.mark[v as usize] = stamp;
                    }
                }
            }
            if branch.is_none_or(|(best_open, _)| open < best_open) {
                branch = Some((open, c));
            }
        }

        let Some((_, c)) = branch else {
            self.best = Some(self.chosen_list.clone());
            self.limit = self.chosen_list.len();
            return;
        };
        if self.chosen_list.len() + bound >= self.limit {
            return;
        }

        let mut candidates: Vec<(usize, u32)> = self.pool.circuits[c as usize]
            .iter()
            .filter(|&&v| !self.excluded[v as usize])
            .map(|&v| {
                let uncovered = self.pool.by_vertex[v as usize]
                    .iter()
                    .filter(|&&k| self.hits[k as usize] == 0)
                    .count();
                (uncovered, v)
            })
            .collect();
        candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

        let mut newly_excluded = Vec::with_capacity(candidates.len());
        for (_, v) in candidates {
            if self.chosen_list.len() + 1 >= self.limit {
                break;
            }
            self.choose(v);
            self.dfs();
            self.unchoose(v);
            if self.timed_out {
                break;
            }
            self.excluded[v as usize] = true;
            newly_excluded.push(v);
        }
        for v in newly_excluded {
            self.excluded[v as usize] = false;
        }
    }
}
