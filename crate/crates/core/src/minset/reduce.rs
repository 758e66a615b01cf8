//! Feedback-vertex-set preprocessing.
//!
//! Rules, applied until none fires:
//! - a vertex without predecessors or successors lies on no circuit: delete it;
//! - a vertex with a self-loop is in every solution: force it and delete it;
//! - a vertex with a single predecessor `u` (or a single successor `w`) can be
//!   bypassed: every circuit through it also runs through `u` (`w`), so it is
//!   replaced by arcs from `u` to its successors (from its predecessors to `w`);
//! - an arc joining two different strongly connected components lies on no
//!   circuit: delete it.
//!
//! Each rule keeps `optimum(original) = |forced| + optimum(reduced)`.

use std::collections::{BTreeSet, VecDeque};

use crate::defgraph::{tarjan, DefGraph, WordId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    /// Reduced graph on the surviving vertices, compactly numbered.
    pub graph: DefGraph,
    /// Original id of every reduced vertex.
    pub to_original: Vec<WordId>,
    /// Vertices that belong to every minimum feedback vertex set.
    pub forced: Vec<WordId>,
    /// Vertices that some minimum feedback vertex set avoids.
    pub excluded: Vec<WordId>,
}

impl Reduction {
    /// Maps a solution of the reduced graph back to a solution of the
    /// original graph.
    pub fn lift(&self, reduced_solution: &[WordId]) -> Vec<WordId> {
        let mut out: Vec<WordId> = self
            .forced
            .iter()
            .copied()
            .chain(reduced_solution.iter().map(|v| self.to_original[v.index()]))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

struct Work {
    succ: Vec<BTreeSet<u32>>,
    pred: Vec<BTreeSet<u32>>,
    alive: Vec<bool>,
    queue: VecDeque<u32>,
    queued: Vec<bool>,
    forced: Vec<u32>,
    excluded: Vec<u32>,
}

impl Work {
    fn enqueue(&mut self, v: u32) {
        if self.alive[v as usize] && !self.queued[v as usize] {
            self.queued[v as usize] = true;
            self.queue.push_back(v);
        }
    }

    fn delete(&mut self, v: u32) {
        let vi = v as usize;
        self.alive[vi] = false;
        let succ = std::mem::take(&mut self.succ[vi]);
        let pred = std::mem::take(&mut self.pred[vi]);
        for &w in &succ {
            self.pred[w as usize].remove(&v);
            self.enqueue(w);
        }
        for &u in &pred {
            self.succ[u as usize].remove(&v);
            self.enqueue(u);
        }
    }

    fn add_arc(&mut self, u: u32, w: u32) {
        self.succ[u as usize].insert(w);
        self.pred[w as usize].insert(u);
    }

    fn apply_local(&mut self, v: u32) -> bool {
        let vi = v as usize;
        if !self.alive[vi] {
            return false;
        }
        if self.succ[vi].contains(&v) {
            self.forced.push(v);
            self.delete(v);
            return true;
        }
        if self.succ[vi].is_empty() || self.pred[vi].is_empty() {
            self.excluded.push(v);
            self.delete(v);
            return true;
        }
        if self.pred[vi].len() == 1 {
            let u = *self.pred[vi].iter().next().unwrap();
            let targets: Vec<u32> = self.succ[vi].iter().copied().collect();
            self.delete(v);
            for w in targets {
                self.add_arc(u, w);
            }
            self.enqueue(u);
            self.excluded.push(v);
            return true;
        }
        if self.succ[vi].len() == 1 {
            let w = *self.succ[vi].iter().next().unwrap();
            let sources: Vec<u32> = self.pred[vi].iter().copied().collect();
            self.delete(v);
            for u in sources {
                self.add_arc(u, w);
            }
            self.enqueue(w);
            self.excluded.push(v);
            return true;
        }
        false
    }

    /// Deletes arcs between different SCCs of the live graph.
    fn cut_bridging_arcs(&mut self) -> bool {
        let live: Vec<u32> = (0..self.alive.len() as u32)
            .filter(|&v| self.alive[v as usize])
            .collect();
        let mut local = vec![u32::MAX; self.alive.len()];
        for (i, &v) in live.iter().enumerate() {
            local[v as usize] = i as u32;
        }
        let adj: Vec<Vec<u32>> = live
            .iter()
            .map(|&v| self.succ[v as usize].iter().map(|&w| local[w as usize]).collect())
            .collect();
        let mut comp = vec![0usize; live.len()];
        for (c, members) in tarjan(&adj).iter().enumerate() {
            for &m in members {
                comp[m as usize] = c;
            }
        }
        let mut cut = Vec::new();
        for (i, &v) in live.iter().enumerate() {
            for &w in &self.succ[v as usize] {
                if comp[i] != comp[local[w as usize] as usize] {
                    cut.push((v, w));
                }
            }
        }
        for &(v, w) in &cut {
            self.succ[v as usize].remove(&w);
            self.pred[w as usize].remove(&v);
            self.enqueue(v);
            self.enqueue(w);
        }
        !cut.is_empty()
    }
}

/// Exhaustively applies the reduction rules.
pub fn reduce(g: &DefGraph) -> Reduction {
    reduce_with(g, true)
}

/// Only the rules that keep every minimum solution intact: deleting
/// vertices and arcs that lie on no circuit.
pub(crate) fn reduce_preserving_optima(g: &DefGraph) -> Reduction {
    reduce_with(g, false)
}

fn reduce_with(g: &DefGraph, bypass: bool) -> Reduction {
    let n = g.len();
    let mut work = Work {
        succ: g
            .successor_lists()
            .iter()
            .map(|l| l.iter().copied().collect())
            .collect(),
        pred: g
            .predecessor_lists()
            .iter()
            .map(|l| l.iter().copied().collect())
            .collect(),
        alive: vec![true; n],
        queue: (0..n as u32).collect(),
        queued: vec![true; n],
        forced: Vec::new(),
        excluded: Vec::new(),
    };
    loop {
        while let Some(v) = work.queue.pop_front() {
            work.queued[v as usize] = false;
            if bypass {
                work.apply_local(v);
            } else {
                let vi = v as usize;
                if work.alive[vi] && (work.succ[vi].is_empty() || work.pred[vi].is_empty()) {
                    work.excluded.push(v);
                    work.delete(v);
                }
            }
        }
        if !work.cut_bridging_arcs() {
            break;
        }
    }

    let survivors: Vec<u32> = (0..n as u32).filter(|&v| work.alive[v as usize]).collect();
    let mut local = vec![u32::MAX; n];
    for (i, &v) in survivors.iter().enumerate() {
        local[v as usize] = i as u32;
    }
    let labels = survivors
        .iter()
        .map(|&v| g.label(WordId(v)).clone())
        .collect();
    let arcs: Vec<(usize, usize)> = survivors
        .iter()
        .enumerate()
        .flat_map(|(i, &v)| {
            work.succ[v as usize]
                .iter()
                .map(|&w| (i, local[w as usize] as usize))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut forced: Vec<WordId> = work.forced.iter().map(|&v| WordId(v)).collect();
    forced.sort_unstable();
    let mut excluded: Vec<WordId> = work.excluded.iter().map(|&v| WordId(v)).collect();
    excluded.sort_unstable();
    Reduction {
        graph: DefGraph::with_labels(labels, arcs),
        to_original: survivors.into_iter().map(WordId).collect(),
        forced,
        excluded,
    }
}
