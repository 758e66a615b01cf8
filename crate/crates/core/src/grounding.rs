//! Learnability from a set of known words.
//!
//! A word is learnable from a ground set `U` if it is in `U` or all of its
//! defining words are learnable. `U` grounds the graph when everything is
//! learnable, which happens exactly when `U` meets every circuit.

use std::collections::{BTreeSet, BinaryHeap, VecDeque};
use std::cmp::Reverse;
use std::io::BufRead;

use serde::Serialize;
use thiserror::Error;

use crate::defgraph::{DefGraph, WordId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroundingError {
    /// Vertices of one circuit left unlearnable, in arc order.
    #[error("ungrounded circuit of length {}", .witness.len())]
    UngroundedCircuit { witness: Vec<WordId> },
    #[error("line {line}: unknown word {name:?}")]
    UnknownWord { line: usize, name: String },
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroundSource {
    UserSupplied,
    Kernel,
    MinsetSolver,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    pub members: BTreeSet<WordId>,
    pub source: GroundSource,
}

impl GroundSet {
    pub fn new<I: IntoIterator<Item = WordId>>(members: I, source: GroundSource) -> Self {
        GroundSet {
            members: members.into_iter().collect(),
            source,
        }
    }

    pub fn user<I: IntoIterator<Item = WordId>>(members: I) -> Self {
        Self::new(members, GroundSource::UserSupplied)
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for v in &self.members {
            m[v.index()] = true;
        }
        m
    }

    /// One `lemma#pos` (or bare lemma) per line; blank lines and `#`-prefixed
    /// comment lines are ignored.
    pub fn read<R: BufRead>(g: &DefGraph, reader: R) -> Result<Self, GroundingError> {
        let mut members = BTreeSet::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| GroundingError::Io(e.to_string()))?;
            let name = line.trim();
            if name.is_empty() || name.starts_with('#') {
                continue;
            }
            let v = g.find(name).ok_or_else(|| GroundingError::UnknownWord {
                line: i + 1,
                name: name.to_string(),
            })?;
            members.insert(v);
        }
        Ok(GroundSet {
            members,
            source: GroundSource::UserSupplied,
        })
    }
}

/// Learnable closure L(U) as a membership mask.
///
/// A vertex outside `U` becomes learnable once its last unlearnable
/// predecessor does; vertices without predecessors are learnable outright.
pub fn learnable_mask(g: &DefGraph, ground: &GroundSet) -> Vec<bool> {
    let n = g.len();
    let mut learnable = ground.mask(n);
    let mut missing = vec![0usize; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for v in g.vertices() {
        let i = v.index();
        if learnable[i] {
            queue.push_back(i);
        } else {
            missing[i] = g.in_degree(v);
            if missing[i] == 0 {
                learnable[i] = true;
                queue.push_back(i);
            }
        }
    }
    while let Some(u) = queue.pop_front() {
        for w in g.successors(WordId(u as u32)) {
            let wi = w.index();
            if learnable[wi] {
                continue;
            }
            missing[wi] -= 1;
            if missing[wi] == 0 {
                learnable[wi] = true;
                queue.push_back(wi);
            }
        }
    }
    learnable
}

pub fn learnable_closure(g: &DefGraph, ground: &GroundSet) -> BTreeSet<WordId> {
    learnable_mask(g, ground)
        .into_iter()
        .enumerate()
        .filter(|&(_, l)| l)
        .map(|(i, _)| WordId(i as u32))
        .collect()
}

pub fn is_grounding_set(g: &DefGraph, ground: &GroundSet) -> bool {
    learnable_mask(g, ground).into_iter().all(|l| l)
}

/// True iff removing `set` leaves an acyclic graph.
pub fn is_feedback_vertex_set<'a, I>(g: &DefGraph, set: I) -> bool
where
    I: IntoIterator<Item = &'a WordId>,
{
    let mut removed = vec![false; g.len()];
    for v in set {
        removed[v.index()] = true;
    }
    g.is_acyclic_without(&removed)
}

/// Order in which the words outside `ground` can be learned by definition:
/// each word appears after all of its defining words outside `ground`.
/// Ties go to the smallest vertex id.
pub fn learning_order(g: &DefGraph, ground: &GroundSet) -> Result<Vec<WordId>, GroundingError> {
    let n = g.len();
    let known = ground.mask(n);
    let mut missing = vec![0usize; n];
    let mut heap = BinaryHeap::new();
    for v in g.vertices() {
        let i = v.index();
        if known[i] {
            continue;
        }
        missing[i] = g.predecessors(v).filter(|u| !known[u.index()]).count();
        if missing[i] == 0 {
            heap.push(Reverse(i));
        }
    }
    let mut order = Vec::new();
    let mut done = known.clone();
    while let Some(Reverse(u)) = heap.pop() {
        done[u] = true;
        order.push(WordId(u as u32));
        for w in g.successors(WordId(u as u32)) {
            let wi = w.index();
            if known[wi] || done[wi] {
                continue;
            }
            missing[wi] -= 1;
            if missing[wi] == 0 {
                heap.push(Reverse(wi));
            }
        }
    }
    if order.len() + ground.members.len() == n {
        return Ok(order);
    }
    Err(GroundingError::UngroundedCircuit {
        witness: stuck_circuit(g, &done),
    })
}

/// Every vertex left unlearned has an unlearned predecessor, so walking
/// predecessors from the smallest such vertex must close a circuit.
fn stuck_circuit(g: &DefGraph, done: &[bool]) -> Vec<WordId> {
    let start = done.iter().position(|&d| !d).expect("some vertex is stuck");
    let mut seen_at = vec![usize::MAX; g.len()];
    let mut walk = Vec::new();
    let mut v = start;
    while seen_at[v] == usize::MAX {
        seen_at[v] = walk.len();
        walk.push(v);
        v = g
            .predecessors(WordId(v as u32))
            .find(|u| !done[u.index()])
            .expect("stuck vertex has a stuck predecessor")
            .index();
    }
    // walk[seen_at[v]..] follows arcs backwards; reverse into arc order.
    let mut cycle: Vec<WordId> = walk[seen_at[v]..]
        .iter()
        .rev()
        .map(|&i| WordId(i as u32))
        .collect();
    let min_pos = cycle
        .iter()
        .enumerate()
        .min_by_key(|(_, v)| **v)
        .map(|(i, _)| i)
        .unwrap();
    cycle.rotate_left(min_pos);
    cycle
}
