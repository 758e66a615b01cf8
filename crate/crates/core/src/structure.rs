//! Kernel, Core, Satellites and the two definitional-distance hierarchies.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

use crate::defgraph::{condense, scc, DefGraph, Sccs, WordId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("the kernel is empty; the K-hierarchy is undefined")]
    EmptyKernel,
}

/// Iteratively deletes words that define no surviving word.
///
/// The survivors are exactly the words with a path to some circuit.
pub fn kernel_mask(g: &DefGraph) -> Vec<bool> {
    let n = g.len();
    let mut alive = vec![true; n];
    let mut out_deg: Vec<usize> = g.vertices().map(|v| g.out_degree(v)).collect();
    let mut stack: Vec<usize> = (0..n).filter(|&v| out_deg[v] == 0).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for u in g.predecessors(WordId(v as u32)) {
            let ui = u.index();
            if !alive[ui] {
                continue;
            }
            out_deg[ui] -= 1;
            if out_deg[ui] == 0 {
                stack.push(ui);
            }
        }
    }
    alive
}

pub fn compute_kernel(g: &DefGraph) -> Vec<WordId> {
    kernel_mask(g)
        .into_iter()
        .enumerate()
        .filter(|&(_, k)| k)
        .map(|(i, _)| WordId(i as u32))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Core,
    Satellite,
    Rest,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Core => "core",
            Label::Satellite => "satellite",
            Label::Rest => "rest",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Word subset used to restrict counts and statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    All,
    Kernel,
    Only(Label),
}

impl Scope {
    pub fn admits(self, label: Label) -> bool {
        match self {
            Scope::All => true,
            Scope::Kernel => label != Label::Rest,
            Scope::Only(l) => l == label,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureLabels {
    pub labels: Vec<Label>,
    pub sccs: Sccs,
    /// SCC id of the Core, if the kernel is nonempty.
    pub core_component: Option<usize>,
}

impl StructureLabels {
    pub fn label(&self, v: WordId) -> Label {
        self.labels[v.index()]
    }

    pub fn scc_id(&self, v: WordId) -> usize {
        self.sccs.component(v)
    }

    pub fn scc_size(&self, v: WordId) -> usize {
        self.sccs.components[self.scc_id(v)].len()
    }

    pub fn in_kernel(&self, v: WordId) -> bool {
        self.labels[v.index()] != Label::Rest
    }

    pub fn with_label(&self, label: Label) -> Vec<WordId> {
        self.in_scope(Scope::Only(label))
    }

    pub fn kernel(&self) -> Vec<WordId> {
        self.in_scope(Scope::Kernel)
    }

    pub fn in_scope(&self, scope: Scope) -> Vec<WordId> {
        self.labels
            .iter()
            .enumerate()
            .filter(|&(_, &l)| scope.admits(l))
            .map(|(i, _)| WordId(i as u32))
            .collect()
    }

    pub fn count(&self, scope: Scope) -> usize {
        self.labels.iter().filter(|&&l| scope.admits(l)).count()
    }
}

/// Core = largest SCC inside the kernel; Satellites = the rest of the
/// kernel; Rest = everything outside the kernel.
///
/// Ties for the largest SCC prefer a cyclic component, then the component
/// holding the smallest vertex id.
pub fn label_structures(g: &DefGraph) -> StructureLabels {
    let kernel = kernel_mask(g);
    let sccs = scc(g);
    let mut best: Option<(usize, bool, WordId, usize)> = None;
    for (c, members) in sccs.components.iter().enumerate() {
        if !kernel[members[0].index()] {
            continue;
        }
        let key = (members.len(), sccs.is_cyclic(g, c), members[0]);
        let better = match best {
            None => true,
            Some((size, cyclic, first, _)) => {
                (key.0, key.1) > (size, cyclic) || ((key.0, key.1) == (size, cyclic) && key.2 < first)
            }
        };
        if better {
            best = Some((key.0, key.1, key.2, c));
        }
    }
    let core_component = best.map(|b| b.3);
    if core_component.is_none() && !g.is_empty() {
        warn!("kernel is empty: every word is labeled Rest");
    }
    let labels = g
        .vertices()
        .map(|v| {
            if !kernel[v.index()] {
                Label::Rest
            } else if Some(sccs.component(v)) == core_component {
                Label::Core
            } else {
                Label::Satellite
            }
        })
        .collect();
    StructureLabels {
        labels,
        sccs,
        core_component,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HierarchyKind {
    /// Distance from the kernel.
    K,
    /// Distance from the condensation sources.
    C,
}

impl fmt::Display for HierarchyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HierarchyKind::K => "K",
            HierarchyKind::C => "C",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    #[default]
    Max,
    Min,
}

impl Aggregator {
    fn fold(self, it: impl Iterator<Item = u32>) -> Option<u32> {
        match self {
            Aggregator::Max => it.max(),
            Aggregator::Min => it.min(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Aggregator::Max => "max",
            Aggregator::Min => "min",
        }
    }
}

impl FromStr for Aggregator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max" => Ok(Aggregator::Max),
            "min" => Ok(Aggregator::Min),
            other => Err(format!("unknown aggregator {other:?} (expected max or min)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hierarchy {
    pub kind: HierarchyKind,
    pub aggregator: Aggregator,
    pub levels: Vec<u32>,
    /// Level of the Core (C-hierarchy only).
    pub core_level: Option<u32>,
}

impl Hierarchy {
    pub fn level(&self, v: WordId) -> u32 {
        self.levels[v.index()]
    }
}

/// Definitional distance of every word.
///
/// K: kernel words sit at level 0; every other word is one more than the
/// aggregate of its defining words' levels. C: the same recursion on the
/// condensation, starting from its source nodes; words inherit the level of
/// their SCC. A word without any defining word is treated as having a
/// level-0 predecessor.
pub fn hierarchy(
    g: &DefGraph,
    labels: &StructureLabels,
    kind: HierarchyKind,
    aggregator: Aggregator,
) -> Result<Hierarchy, StructureError> {
    match kind {
        HierarchyKind::K => k_hierarchy(g, labels, aggregator),
        HierarchyKind::C => Ok(c_hierarchy(g, labels, aggregator)),
    }
}

fn k_hierarchy(
    g: &DefGraph,
    labels: &StructureLabels,
    aggregator: Aggregator,
) -> Result<Hierarchy, StructureError> {
    if labels.core_component.is_none() {
        return Err(StructureError::EmptyKernel);
    }
    let rest: Vec<bool> = labels.labels.iter().map(|&l| l == Label::Rest).collect();
    let order = g
        .topological_order(&rest)
        .expect("all circuits lie inside the kernel");
    let mut levels = vec![0u32; g.len()];
    for v in order {
        let agg = aggregator
            .fold(g.predecessors(v).map(|u| levels[u.index()]))
            .unwrap_or(0);
        levels[v.index()] = agg + 1;
    }
    Ok(Hierarchy {
        kind: HierarchyKind::K,
        aggregator,
        levels,
        core_level: None,
    })
}

fn c_hierarchy(g: &DefGraph, labels: &StructureLabels, aggregator: Aggregator) -> Hierarchy {
    let cond = condense(g);
    debug_assert_eq!(cond.sccs, labels.sccs);
    // Component ids are already topologically ordered.
    let mut node_level = vec![0u32; cond.len()];
    for x in 0..cond.len() {
        if cond.is_source[x] {
            continue;
        }
        let agg = aggregator
            .fold(cond.pred[x].iter().map(|&y| node_level[y]))
            .expect("non-source node has a predecessor");
        node_level[x] = agg + 1;
    }
    let levels = g
        .vertices()
        .map(|v| node_level[cond.sccs.component(v)])
        .collect();
    Hierarchy {
        kind: HierarchyKind::C,
        aggregator,
        levels,
        core_level: labels.core_component.map(|c| node_level[c]),
    }
}

/// Number of words at each level, restricted to `scope`.
pub fn level_counts(h: &Hierarchy, labels: &StructureLabels, scope: Scope) -> BTreeMap<u32, usize> {
    let mut counts = BTreeMap::new();
    for (i, &level) in h.levels.iter().enumerate() {
        if scope.admits(labels.labels[i]) {
            *counts.entry(level).or_insert(0) += 1;
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn lemmas(g: &DefGraph, vs: &[WordId]) -> Vec<String> {
        vs.iter().map(|&v| g.lemma(v).to_string()).collect()
    }

    #[test]
    fn g3_kernel() {
        let g = fixtures::g3();
        assert_eq!(lemmas(&g, &compute_kernel(&g)), vec!["a", "b", "c", "d", "e"]);
    }

    #[test]
    fn single_pruning_step() {
        let g = fixtures::graph_from_defs(&[("a", &["b"]), ("b", &["a"]), ("c", &["a", "b"])]);
        assert_eq!(lemmas(&g, &compute_kernel(&g)), vec!["a", "b"]);
    }

    #[test]
    fn acyclic_graph_has_empty_kernel() {
        let g = DefGraph::from_arcs(4, [(0, 1), (1, 2), (0, 3)]);
        assert!(compute_kernel(&g).is_empty());
        let labels = label_structures(&g);
        assert!(labels.core_component.is_none());
        assert!(labels.labels.iter().all(|&l| l == Label::Rest));
        assert_eq!(
            hierarchy(&g, &labels, HierarchyKind::K, Aggregator::Max),
            Err(StructureError::EmptyKernel)
        );
    }

    #[test]
    fn g3_labels() {
        let g = fixtures::g3();
        let labels = label_structures(&g);
        assert_eq!(lemmas(&g, &labels.with_label(Label::Core)), vec!["a", "b", "c"]);
        assert_eq!(lemmas(&g, &labels.with_label(Label::Satellite)), vec!["d", "e"]);
        assert_eq!(lemmas(&g, &labels.with_label(Label::Rest)), vec!["f"]);
        assert_eq!(labels.scc_size(WordId(3)), 2);
    }

    #[test]
    fn two_cycle_is_all_core() {
        let g = fixtures::graph_from_defs(&[("a", &["b"]), ("b", &["a"])]);
        let labels = label_structures(&g);
        assert_eq!(labels.count(Scope::Only(Label::Core)), 2);
        assert_eq!(labels.count(Scope::Only(Label::Satellite)), 0);
        assert_eq!(labels.count(Scope::Only(Label::Rest)), 0);
    }

    #[test]
    fn equal_size_tie_goes_to_smallest_id() {
        let g = fixtures::graph_from_defs(&[("a", &["b", "x"]), ("b", &["a"]), ("x", &["y"]), ("y", &["x"])]);
        let labels = label_structures(&g);
        assert_eq!(lemmas(&g, &labels.with_label(Label::Core)), vec!["a", "b"]);
        assert_eq!(lemmas(&g, &labels.with_label(Label::Satellite)), vec!["x", "y"]);
    }

    #[test]
    fn singleton_kernel_scc_is_satellite() {
        // x reaches the a<->b circuit without lying on a circuit itself.
        let g = fixtures::graph_from_defs(&[("a", &["b"]), ("b", &["a", "x"]), ("x", &["y"]), ("y", &["y"])]);
        let labels = label_structures(&g);
        assert_eq!(lemmas(&g, &labels.with_label(Label::Core)), vec!["a", "b"]);
        assert_eq!(lemmas(&g, &labels.with_label(Label::Satellite)), vec!["x", "y"]);
        assert_eq!(labels.scc_size(g.find("x").unwrap()), 1);
    }

    #[test]
    fn cyclic_singleton_beats_acyclic_singleton() {
        // 0 -> 1, 1 -> 1: both in the kernel, only 1 lies on a circuit.
        let g = DefGraph::from_arcs(2, [(0, 1), (1, 1)]);
        let labels = label_structures(&g);
        assert_eq!(labels.label(WordId(1)), Label::Core);
        assert_eq!(labels.label(WordId(0)), Label::Satellite);
    }

    #[test]
    fn g3_hierarchies() {
        let g = fixtures::g3();
        let labels = label_structures(&g);
        let k = hierarchy(&g, &labels, HierarchyKind::K, Aggregator::Max).unwrap();
        assert_eq!(k.levels, vec![0, 0, 0, 0, 0, 1]);
        let c = hierarchy(&g, &labels, HierarchyKind::C, Aggregator::Max).unwrap();
        assert_eq!(c.levels, vec![0, 0, 0, 1, 1, 2]);
        assert_eq!(c.core_level, Some(0));

        assert_eq!(
            level_counts(&k, &labels, Scope::Only(Label::Rest)),
            BTreeMap::from([(1, 1)])
        );
        assert_eq!(
            level_counts(&c, &labels, Scope::Only(Label::Satellite)),
            BTreeMap::from([(1, 2)])
        );
        assert_eq!(
            level_counts(&k, &labels, Scope::All),
            BTreeMap::from([(0, 5), (1, 1)])
        );
    }

    #[test]
    fn strongly_connected_c_levels_are_zero() {
        let g = DefGraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]);
        let labels = label_structures(&g);
        let c = hierarchy(&g, &labels, HierarchyKind::C, Aggregator::Max).unwrap();
        assert_eq!(c.levels, vec![0, 0, 0]);
    }

    #[test]
    fn max_and_min_aggregators_differ() {
        // core {0,1}; 2 defined by core; 3 defined by 0 and 2.
        let g = DefGraph::from_arcs(5, [(0, 1), (1, 0), (0, 2), (0, 3), (2, 3), (3, 4)]);
        let labels = label_structures(&g);
        let kmax = hierarchy(&g, &labels, HierarchyKind::K, Aggregator::Max).unwrap();
        let kmin = hierarchy(&g, &labels, HierarchyKind::K, Aggregator::Min).unwrap();
        assert_eq!(kmax.levels, vec![0, 0, 1, 2, 3]);
        assert_eq!(kmin.levels, vec![0, 0, 1, 1, 2]);
        let cmax = hierarchy(&g, &labels, HierarchyKind::C, Aggregator::Max).unwrap();
        let cmin = hierarchy(&g, &labels, HierarchyKind::C, Aggregator::Min).unwrap();
        assert_eq!(cmax.levels, vec![0, 0, 1, 2, 3]);
        assert_eq!(cmin.levels, vec![0, 0, 1, 1, 2]);
    }

    #[test]
    fn core_with_external_predecessor_sits_at_level_one() {
        // A tiny satellite circuit {2,3} feeds into the core {0,1,4}.
        let g = DefGraph::from_arcs(5, [(0, 1), (1, 4), (4, 0), (2, 3), (3, 2), (2, 0)]);
        let labels = label_structures(&g);
        let c = hierarchy(&g, &labels, HierarchyKind::C, Aggregator::Max).unwrap();
        assert_eq!(c.core_level, Some(1));
    }
}
