//! Minimum grounding sets, i.e. minimum feedback vertex sets.
//!
//! The exact solver treats the problem as covering circuits: it keeps a pool
//! of known circuits, finds a minimum vertex set hitting all of them, and
//! checks whether that set breaks every circuit of the graph. If not, the
//! shortest circuits that survive are added to the pool and the covering
//! problem is solved again. Only short circuits are ever generated, which
//! keeps the pool small on dictionary graphs.

mod heuristics;
mod hitting;
mod reduce;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::defgraph::{tarjan, DefGraph, WordId};
use crate::structure::{Label, StructureLabels};

pub use heuristics::{disjoint_circuits, greedy_fvs, pack_disjoint_circuits, shortest_circuit_through};
pub use reduce::{reduce, Reduction};

use heuristics::CircuitFinder;
use hitting::{CircuitPool, Outcome};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MinSetError {
    #[error("solver budget must be positive")]
    InvalidBudget,
    #[error("budget exhausted before optimality was proven (bounds {lower_bound}..={upper_bound})")]
    BudgetExhausted {
        lower_bound: usize,
        upper_bound: usize,
    },
    #[error("{0} is outside the kernel")]
    OutsideKernel(WordId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMode {
    /// Fail unless optimality is proven within the budget.
    #[default]
    Exact,
    /// Fall back to the best known set, with bounds, when the budget runs out.
    Auto,
}

impl FromStr for SolveMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(SolveMode::Exact),
            "auto" => Ok(SolveMode::Auto),
            other => Err(format!("unknown solve mode {other:?} (expected exact or auto)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Exact,
    Heuristic,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Exact => "exact",
            Status::Heuristic => "heuristic",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    /// Branch-and-bound nodes over all covering solves.
    pub nodes: u64,
    /// Circuit constraints generated.
    pub circuits: usize,
    /// Covering solves performed.
    pub rounds: usize,
    /// Strongly connected pieces left after reduction.
    pub components: usize,
    /// Vertices fixed by reduction.
    pub forced: usize,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SolveStats {
    fn absorb(&mut self, other: &SolveStats) {
        self.nodes += other.nodes;
        self.circuits += other.circuits;
        self.rounds += other.rounds;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinSetResult {
    /// Ascending vertex ids.
    pub members: Vec<WordId>,
    pub status: Status,
    pub lower_bound: usize,
    pub upper_bound: usize,
    pub stats: SolveStats,
}

impl MinSetResult {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub budget: Duration,
    pub mode: SolveMode,
    /// Tie-break seed for the greedy upper bound and circuit packing.
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            budget: Duration::from_secs(60),
            mode: SolveMode::Exact,
            seed: 0,
        }
    }
}

/// Lazy circuit-covering search on one graph (usually one strongly
/// connected piece of a reduced graph).
struct LazySolver<'a> {
    g: &'a DefGraph,
    pool: CircuitPool,
    finder: CircuitFinder,
    seed: u64,
    stats: SolveStats,
}

enum Search {
    Found(Vec<u32>),
    Exhausted,
    TimedOut,
}

impl<'a> LazySolver<'a> {
    fn new(g: &'a DefGraph, seed: u64) -> Self {
        let mut pool = CircuitPool::new(g.len());
        for (u, v) in g.arcs() {
            if u == v {
                pool.add(vec![u.0]);
            } else if u < v && g.has_arc(v, u) {
                pool.add(vec![u.0, v.0]);
            }
        }
        for c in heuristics::pack(g, seed) {
            pool.add(c);
        }
        LazySolver {
            g,
            finder: CircuitFinder::new(g.len()),
            pool,
            seed,
            stats: SolveStats::default(),
        }
    }

    fn mask(&self, set: &[u32]) -> Vec<bool> {
        let mut m = vec![false; self.g.len()];
        for &v in set {
            m[v as usize] = true;
        }
        m
    }

    /// Adds a shortest circuit through every vertex that still lies on a
    /// circuit once `removed` is deleted, skipping vertices already covered
    /// by a circuit added in this round.
    fn separate(&mut self, removed: &[bool]) -> usize {
        let g = self.g;
        let mut alive: Vec<bool> = removed.iter().map(|r| !r).collect();
        prune_acyclic_fringe(g, &mut alive);
        let mut covered = vec![false; g.len()];
        let mut added = 0;
        for v in 0..g.len() as u32 {
            if !alive[v as usize] || covered[v as usize] {
                continue;
            }
            if let Some(c) = self
                .finder
                .shortest_through(g.successor_lists(), &alive, v, usize::MAX)
            {
                for &w in &c {
                    covered[w as usize] = true;
                }
                if self.pool.add(c) {
                    added += 1;
                }
            }
        }
        self.stats.circuits = self.pool.len();
        added
    }

    /// Extends a partial cover to a feedback vertex set greedily.
    fn repair(&self, partial: &[u32]) -> Vec<u32> {
        let removed = self.mask(partial);
        let rest: Vec<WordId> = self
            .g
            .vertices()
            .filter(|v| !removed[v.index()])
            .collect();
        let sub = self.g.induced_subgraph(&rest);
        let ranks = heuristics::seeded_ranks(sub.len(), self.seed);
        let mut picked: Vec<u32> = partial.to_vec();
        picked.extend(heuristics::greedy_pick(&sub, &ranks).into_iter().map(|v| rest[v as usize].0));
        heuristics::remove_redundant(self.g, picked)
    }

    /// Minimum feedback vertex set of size below `limit` avoiding supersets
    /// of `forbidden`, refining the circuit pool until the covering optimum
    /// is acyclic. `incumbent`, when given, is improved by repairing
    /// intermediate covers and tightens `limit` as it shrinks.
    fn search(
        &mut self,
        mut limit: usize,
        forbidden: &[Vec<u32>],
        deadline: Instant,
        mut incumbent: Option<&mut Vec<u32>>,
        lower: &mut usize,
    ) -> Search {
        loop {
            if Instant::now() >= deadline {
                return Search::TimedOut;
            }
            self.stats.rounds += 1;
            self.stats.circuits = self.pool.len();
            let outcome = hitting::solve(&self.pool, limit, forbidden, deadline, &mut self.stats.nodes);
            match outcome {
                Outcome::TimedOut => return Search::TimedOut,
                Outcome::NoneBelowLimit => return Search::Exhausted,
                Outcome::Found(cover) => {
                    if forbidden.is_empty() {
                        *lower = (*lower).max(cover.len());
                    }
                    let removed = self.mask(&cover);
                    if self.g.is_acyclic_without(&removed) {
                        return Search::Found(cover);
                    }
                    self.separate(&removed);
                    if let Some(best) = incumbent.as_deref_mut() {
                        let repaired = self.repair(&cover);
                        if repaired.len() < best.len() {
                            *best = repaired;
                            limit = best.len();
                        }
                        if *lower >= best.len() {
                            return Search::Exhausted;
                        }
                    }
                }
            }
        }
    }
}

/// Removes vertices that cannot lie on a circuit within `alive`.
fn prune_acyclic_fringe(g: &DefGraph, alive: &mut [bool]) {
    let n = g.len();
    let succ = g.successor_lists();
    let pred = g.predecessor_lists();
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    let mut stack = Vec::new();
    for v in 0..n {
        if !alive[v] {
            continue;
        }
        indeg[v] = pred[v].iter().filter(|&&u| alive[u as usize]).count();
        outdeg[v] = succ[v].iter().filter(|&&w| alive[w as usize]).count();
        if indeg[v] == 0 || outdeg[v] == 0 {
            stack.push(v);
        }
    }
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &w in &succ[v] {
            let w = w as usize;
            if alive[w] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        for &u in &pred[v] {
            let u = u as usize;
            if alive[u] {
                outdeg[u] -= 1;
                if outdeg[u] == 0 {
                    stack.push(u);
                }
            }
        }
    }
}

struct PieceResult {
    members: Vec<u32>,
    lower: usize,
    exact: bool,
    stats: SolveStats,
}

fn solve_piece(g: &DefGraph, deadline: Instant, seed: u64) -> PieceResult {
    let mut solver = LazySolver::new(g, seed);
    let mut lower = heuristics::pack(g, seed).len();
    let mut incumbent = heuristics::remove_redundant(
        g,
        heuristics::greedy_pick(g, &heuristics::seeded_ranks(g.len(), seed)),
    );
    if lower >= incumbent.len() {
        incumbent.sort_unstable();
        return PieceResult {
            members: incumbent,
            lower,
            exact: true,
            stats: solver.stats,
        };
    }
    let limit = incumbent.len();
    let outcome = solver.search(limit, &[], deadline, Some(&mut incumbent), &mut lower);
    let (mut members, exact) = match outcome {
        Search::Found(cover) => (cover, true),
        Search::Exhausted => (incumbent, true),
        Search::TimedOut => (incumbent, false),
    };
    members.sort_unstable();
    if exact {
        lower = members.len();
    }
    PieceResult {
        members,
        lower,
        exact,
        stats: solver.stats,
    }
}

/// Strongly connected pieces with at least one circuit, as compact subgraphs
/// plus their vertex lists.
fn cyclic_pieces(g: &DefGraph) -> Vec<Vec<WordId>> {
    tarjan(g.successor_lists())
        .into_iter()
        .filter(|c| c.len() > 1 || g.has_self_loop(WordId(c[0])))
        .map(|c| c.into_iter().map(WordId).collect())
        .rev()
        .collect()
}

/// Minimum feedback vertex set of `g`.
///
/// The graph is reduced, split into strongly connected pieces, and each
/// piece is solved by lazy circuit covering. In [`SolveMode::Auto`] an
/// expired budget yields the best set found with `Status::Heuristic`.
pub fn solve_minset(g: &DefGraph, opts: &SolveOptions) -> Result<MinSetResult, MinSetError> {
    if opts.budget.is_zero() {
        return Err(MinSetError::InvalidBudget);
    }
    let start = Instant::now();
    let deadline = start + opts.budget;
    let red = reduce(g);
    let pieces = cyclic_pieces(&red.graph);
    let results: Vec<(Vec<WordId>, PieceResult)> = pieces
        .into_par_iter()
        .map(|vs| {
            let sub = red.graph.induced_subgraph(&vs);
            let r = solve_piece(&sub, deadline, opts.seed);
            (vs, r)
        })
        .collect();

    let mut stats = SolveStats {
        components: results.len(),
        forced: red.forced.len(),
        ..Default::default()
    };
    let mut reduced_members = Vec::new();
    let mut lower = red.forced.len();
    let mut exact = true;
    for (vs, r) in &results {
        stats.absorb(&r.stats);
        reduced_members.extend(r.members.iter().map(|&v| vs[v as usize]));
        lower += r.lower;
        exact &= r.exact;
    }
    let members = red.lift(&reduced_members);
    let upper = members.len();
    stats.wall_time = start.elapsed();
    if !exact && opts.mode == SolveMode::Exact {
        return Err(MinSetError::BudgetExhausted {
            lower_bound: lower,
            upper_bound: upper,
        });
    }
    Ok(MinSetResult {
        members,
        status: if exact { Status::Exact } else { Status::Heuristic },
        lower_bound: if exact { upper } else { lower.min(upper) },
        upper_bound: upper,
        stats,
    })
}

/// Up to `max_count` distinct minimum feedback vertex sets.
///
/// After each optimum is found it is excluded by a no-good constraint and
/// the covering search is repeated at the same size. Only reductions that
/// preserve every optimum are applied. Running out of budget after the
/// first optimum ends the enumeration early.
pub fn enumerate_minsets(
    g: &DefGraph,
    max_count: usize,
    opts: &SolveOptions,
) -> Result<Vec<MinSetResult>, MinSetError> {
    if opts.budget.is_zero() {
        return Err(MinSetError::InvalidBudget);
    }
    if max_count == 0 {
        return Ok(Vec::new());
    }
    let start = Instant::now();
    let deadline = start + opts.budget;
    let red = reduce::reduce_preserving_optima(g);
    let h = &red.graph;

    let first = solve_piece(h, deadline, opts.seed);
    if !first.exact {
        return Err(MinSetError::BudgetExhausted {
            lower_bound: first.lower,
            upper_bound: first.members.len(),
        });
    }
    let k = first.members.len();
    let mut solver = LazySolver::new(h, opts.seed);
    let lift = |members: &[u32]| -> Vec<WordId> {
        let local: Vec<WordId> = members.iter().map(|&v| WordId(v)).collect();
        red.lift(&local)
    };
    let make = |members: &[u32], stats: SolveStats, started: Instant| MinSetResult {
        members: lift(members),
        status: Status::Exact,
        lower_bound: k,
        upper_bound: k,
        stats: SolveStats {
            wall_time: started.elapsed(),
            ..stats
        },
    };
    let mut results = vec![make(&first.members, first.stats.clone(), start)];
    let mut forbidden = vec![first.members];
    let mut unused_lower = 0;
    while results.len() < max_count {
        let round_start = Instant::now();
        let before = solver.stats.clone();
        match solver.search(k + 1, &forbidden, deadline, None, &mut unused_lower) {
            Search::Found(mut cover) => {
                cover.sort_unstable();
                let mut stats = solver.stats.clone();
                stats.nodes -= before.nodes;
                stats.rounds -= before.rounds;
                results.push(make(&cover, stats, round_start));
                forbidden.push(cover);
            }
            Search::Exhausted | Search::TimedOut => break,
        }
    }
    Ok(results)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinSetSplit {
    pub core: Vec<WordId>,
    pub satellite: Vec<WordId>,
}

/// Partitions a grounding set into its Core and Satellite members.
pub fn split_minset(m: &MinSetResult, labels: &StructureLabels) -> Result<MinSetSplit, MinSetError> {
    let mut split = MinSetSplit {
        core: Vec::new(),
        satellite: Vec::new(),
    };
    for &v in &m.members {
        match labels.label(v) {
            Label::Core => split.core.push(v),
            Label::Satellite => split.satellite.push(v),
            Label::Rest => return Err(MinSetError::OutsideKernel(v)),
        }
    }
    Ok(split)
}
