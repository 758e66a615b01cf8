//! The definitional digraph: an arc `u -> v` whenever `u` occurs in the
//! definition of `v`.

use std::collections::{BinaryHeap, HashMap};
use std::cmp::Reverse;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{Lexicon, Pos};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("definition of {entry} uses unresolved token {token:?}")]
    Unresolved { entry: String, token: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WordId(pub u32);

impl WordId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for WordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexLabel {
    pub lemma: String,
    pub pos: Pos,
}

/// Immutable definitional digraph with sorted successor and predecessor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefGraph {
    labels: Vec<VertexLabel>,
    succ: Vec<Vec<u32>>,
    pred: Vec<Vec<u32>>,
    arcs: usize,
}

impl DefGraph {
    /// One vertex per entry, one arc per distinct (defining, defined) pair.
    /// The lexicon must be closed.
    pub fn from_lexicon(lex: &Lexicon) -> Result<Self, GraphError> {
        let index = lex.lemma_index();
        let labels = lex
            .entries
            .iter()
            .map(|e| VertexLabel {
                lemma: e.lemma.clone(),
                pos: e.pos,
            })
            .collect();
        let mut arcs = Vec::new();
        for (v, e) in lex.entries.iter().enumerate() {
            for tok in &e.definition {
                let u = *index.get(tok.as_str()).ok_or_else(|| GraphError::Unresolved {
                    entry: e.key(),
                    token: tok.clone(),
                })?;
                arcs.push((u, v));
            }
        }
        Ok(Self::with_labels(labels, arcs))
    }

    /// Synthetic graph on `n` vertices named `v0..v{n-1}`.
    pub fn from_arcs<I>(n: usize, arcs: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let labels = (0..n)
            .map(|i| VertexLabel {
                lemma: format!("v{i}"),
                pos: Pos::Noun,
            })
            .collect();
        Self::with_labels(labels, arcs)
    }

    pub fn with_labels<I>(labels: Vec<VertexLabel>, arcs: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = labels.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for (u, v) in arcs {
            assert!(u < n && v < n, "arc ({u}, {v}) out of range for {n} vertices");
            succ[u].push(v as u32);
            pred[v].push(u as u32);
        }
        let mut count = 0;
        for list in succ.iter_mut().chain(pred.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        for list in &succ {
            count += list.len();
        }
        DefGraph {
            labels,
            succ,
            pred,
            arcs: count,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs
    }

    pub fn vertices(&self) -> impl Iterator<Item = WordId> + '_ {
        (0..self.labels.len() as u32).map(WordId)
    }

    pub fn successors(&self, v: WordId) -> impl ExactSizeIterator<Item = WordId> + '_ {
        self.succ[v.index()].iter().map(|&w| WordId(w))
    }

    pub fn predecessors(&self, v: WordId) -> impl ExactSizeIterator<Item = WordId> + '_ {
        self.pred[v.index()].iter().map(|&w| WordId(w))
    }

    pub fn out_degree(&self, v: WordId) -> usize {
        self.succ[v.index()].len()
    }

    pub fn in_degree(&self, v: WordId) -> usize {
        self.pred[v.index()].len()
    }

    pub fn has_arc(&self, u: WordId, v: WordId) -> bool {
        self.succ[u.index()].binary_search(&v.0).is_ok()
    }

    pub fn has_self_loop(&self, v: WordId) -> bool {
        self.has_arc(v, v)
    }

    /// Arcs in `(source id, target id)` order.
    pub fn arcs(&self) -> impl Iterator<Item = (WordId, WordId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().map(move |&v| (WordId(u as u32), WordId(v))))
    }

    pub(crate) fn successor_lists(&self) -> &[Vec<u32>] {
        &self.succ
    }

    pub(crate) fn predecessor_lists(&self) -> &[Vec<u32>] {
        &self.pred
    }

    pub fn label(&self, v: WordId) -> &VertexLabel {
        &self.labels[v.index()]
    }

    pub fn lemma(&self, v: WordId) -> &str {
        &self.labels[v.index()].lemma
    }

    pub fn pos(&self, v: WordId) -> Pos {
        self.labels[v.index()].pos
    }

    /// `lemma#pos`
    pub fn name(&self, v: WordId) -> String {
        let l = &self.labels[v.index()];
        format!("{}#{}", l.lemma, l.pos)
    }

    /// Name → vertex lookup table.
    pub fn name_index(&self) -> HashMap<String, WordId> {
        self.vertices().map(|v| (self.name(v), v)).collect()
    }

    /// Looks up a vertex by `lemma#pos`, or by bare lemma (earliest vertex).
    pub fn find(&self, name: &str) -> Option<WordId> {
        match name.rsplit_once('#') {
            Some((lemma, pos)) => {
                let pos: Pos = pos.parse().ok()?;
                self.vertices()
                    .find(|&v| self.labels[v.index()].lemma == lemma && self.labels[v.index()].pos == pos)
            }
            None => self.vertices().find(|&v| self.labels[v.index()].lemma == name),
        }
    }

    /// Edge list, `u<TAB>v` per arc, sorted by source then target id.
    pub fn write_edges<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (u, v) in self.arcs() {
            writeln!(out, "{}\t{}", self.name(u), self.name(v))?;
        }
        Ok(())
    }

    /// Compact subgraph induced on `keep` (ascending ids). Vertex `i` of the
    /// result is `keep[i]` here.
    pub fn induced_subgraph(&self, keep: &[WordId]) -> DefGraph {
        let mut local = vec![u32::MAX; self.len()];
        for (i, v) in keep.iter().enumerate() {
            local[v.index()] = i as u32;
        }
        let labels = keep.iter().map(|&v| self.labels[v.index()].clone()).collect();
        let arcs = keep.iter().enumerate().flat_map(|(i, v)| {
            let local = &local;
            self.succ[v.index()]
                .iter()
                .filter(move |&&w| local[w as usize] != u32::MAX)
                .map(move |&w| (i, local[w as usize] as usize))
        });
        DefGraph::with_labels(labels, arcs.collect::<Vec<_>>())
    }

    /// Whether the subgraph induced on the vertices not flagged in `removed`
    /// is acyclic.
    pub fn is_acyclic_without(&self, removed: &[bool]) -> bool {
        let n = self.len();
        let mut indeg = vec![0usize; n];
        let mut remaining = 0;
        for v in 0..n {
            if removed[v] {
                continue;
            }
            remaining += 1;
            indeg[v] = self.pred[v].iter().filter(|&&u| !removed[u as usize]).count();
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| !removed[v] && indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(u) = stack.pop() {
            seen += 1;
            for &w in &self.succ[u] {
                let w = w as usize;
                if removed[w] {
                    continue;
                }
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        seen == remaining
    }

    pub fn is_acyclic(&self) -> bool {
        self.is_acyclic_without(&vec![false; self.len()])
    }

    /// Vertices of the subgraph induced on `keep`, listed in topological
    /// order with smallest-id tie-break, or `None` if that subgraph has a cycle.
    pub fn topological_order(&self, keep: &[bool]) -> Option<Vec<WordId>> {
        let n = self.len();
        let mut indeg = vec![0usize; n];
        let mut heap = BinaryHeap::new();
        let mut total = 0;
        for v in 0..n {
            if !keep[v] {
                continue;
            }
            total += 1;
            indeg[v] = self.pred[v].iter().filter(|&&u| keep[u as usize]).count();
            if indeg[v] == 0 {
                heap.push(Reverse(v));
            }
        }
        let mut order = Vec::with_capacity(total);
        while let Some(Reverse(u)) = heap.pop() {
            order.push(WordId(u as u32));
            for &w in &self.succ[u] {
                let w = w as usize;
                if keep[w] {
                    indeg[w] -= 1;
                    if indeg[w] == 0 {
                        heap.push(Reverse(w));
                    }
                }
            }
        }
        (order.len() == total).then_some(order)
    }
}

/// Partition of the vertices into strongly connected components.
///
/// Component ids follow a topological order of the condensation: every arc
/// between two components goes from a lower id to a higher id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sccs {
    pub comp_of: Vec<usize>,
    /// Members of each component, ascending.
    pub components: Vec<Vec<WordId>>,
}

impl Sccs {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, v: WordId) -> usize {
        self.comp_of[v.index()]
    }

    /// A component is cyclic if it has more than one member or a self-loop.
    pub fn is_cyclic(&self, g: &DefGraph, c: usize) -> bool {
        let members = &self.components[c];
        members.len() > 1 || g.has_self_loop(members[0])
    }
}

/// Tarjan's algorithm, iterative. Components are returned in the order
/// Tarjan completes them, which is a reverse topological order.
pub(crate) fn tarjan(succ: &[Vec<u32>]) -> Vec<Vec<u32>> {
    const UNVISITED: u32 = u32::MAX;
    let n = succ.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut out = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root as usize] = next_index;
        low[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            let vi = v as usize;
            if let Some(&w) = succ[vi].get(*edge) {
                *edge += 1;
                let wi = w as usize;
                if index[wi] == UNVISITED {
                    index[wi] = next_index;
                    low[wi] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[wi] = true;
                    call.push((w, 0));
                } else if on_stack[wi] {
                    low[vi] = low[vi].min(index[wi]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                let p = parent as usize;
                low[p] = low[p].min(low[vi]);
            }
            if low[vi] == index[vi] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w as usize] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                out.push(comp);
            }
        }
    }
    out
}

pub fn scc(g: &DefGraph) -> Sccs {
    let mut raw = tarjan(&g.succ);
    raw.reverse();
    let mut comp_of = vec![0usize; g.len()];
    for (c, members) in raw.iter().enumerate() {
        for &v in members {
            comp_of[v as usize] = c;
        }
    }
    Sccs {
        comp_of,
        components: raw
            .into_iter()
            .map(|m| m.into_iter().map(WordId).collect())
            .collect(),
    }
}

/// The acyclic graph obtained by merging each SCC into one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensation {
    pub sccs: Sccs,
    pub succ: Vec<Vec<usize>>,
    pub pred: Vec<Vec<usize>>,
    pub is_source: Vec<bool>,
}

impl Condensation {
    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(x, list)| list.iter().map(move |&y| (x, y)))
    }
}

pub fn condense(g: &DefGraph) -> Condensation {
    let sccs = scc(g);
    let k = sccs.len();
    let mut succ = vec![Vec::new(); k];
    let mut pred = vec![Vec::new(); k];
    for (u, v) in g.arcs() {
        let (x, y) = (sccs.component(u), sccs.component(v));
        if x != y {
            succ[x].push(y);
            pred[y].push(x);
        }
    }
    for list in succ.iter_mut().chain(pred.iter_mut()) {
        list.sort_unstable();
        list.dedup();
    }
    let is_source = pred.iter().map(Vec::is_empty).collect();
    Condensation {
        sccs,
        succ,
        pred,
        is_source,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ids(g: &DefGraph, names: &[&str]) -> Vec<WordId> {
        names.iter().map(|n| g.find(n).unwrap()).collect()
    }

    #[test]
    fn mutual_definition() {
        let g = fixtures::graph_from_defs(&[("a", &["b"]), ("b", &["a"])]);
        assert_eq!(g.len(), 2);
        let arcs: Vec<_> = g.arcs().collect();
        assert_eq!(arcs, vec![(WordId(0), WordId(1)), (WordId(1), WordId(0))]);
    }

    #[test]
    fn duplicate_tokens_collapse() {
        let g = fixtures::graph_from_defs(&[("a", &["b", "b"]), ("b", &["a"])]);
        assert_eq!(g.arc_count(), 2);
        assert_eq!(g.in_degree(WordId(0)), 1);
    }

    #[test]
    fn self_arcs_retained() {
        let g = fixtures::graph_from_defs(&[("a", &["a", "b"]), ("b", &["a"])]);
        assert!(g.has_self_loop(WordId(0)));
        assert_eq!(g.arc_count(), 3);
    }

    #[test]
    fn g3_arcs() {
        let g = fixtures::g3();
        assert_eq!(g.len(), 6);
        let mut names: Vec<(String, String)> = g
            .arcs()
            .map(|(u, v)| (g.lemma(u).to_string(), g.lemma(v).to_string()))
            .collect();
        names.sort();
        let mut expected: Vec<(String, String)> = [
            ("c", "a"),
            ("a", "b"),
            ("b", "c"),
            ("c", "d"),
            ("e", "d"),
            ("d", "e"),
            ("d", "f"),
        ]
        .iter()
        .map(|(u, v)| (u.to_string(), v.to_string()))
        .collect();
        expected.sort();
        assert_eq!(names, expected);
    }

    #[test]
    fn unresolved_token_is_an_error() {
        let lex = fixtures::lexicon_from_defs(&[("a", &["b"])]);
        assert!(matches!(DefGraph::from_lexicon(&lex), Err(GraphError::Unresolved { .. })));
    }

    #[test]
    fn g3_components() {
        let g = fixtures::g3();
        let s = scc(&g);
        assert_eq!(
            s.components,
            vec![ids(&g, &["a", "b", "c"]), ids(&g, &["d", "e"]), ids(&g, &["f"])]
        );
        assert!(s.is_cyclic(&g, 0));
        assert!(s.is_cyclic(&g, 1));
        assert!(!s.is_cyclic(&g, 2));
    }

    #[test]
    fn chain_gives_singletons() {
        let g = DefGraph::from_arcs(3, [(0, 1), (1, 2)]);
        let s = scc(&g);
        assert_eq!(s.len(), 3);
        assert!(s.components.iter().all(|c| c.len() == 1));
        assert_eq!(s.components[0], vec![WordId(0)]);
    }

    #[test]
    fn self_loop_singleton_is_cyclic() {
        let g = DefGraph::from_arcs(1, [(0, 0)]);
        let s = scc(&g);
        assert_eq!(s.len(), 1);
        assert!(s.is_cyclic(&g, 0));
    }

    #[test]
    fn g3_condensation() {
        let g = fixtures::g3();
        let c = condense(&g);
        assert_eq!(c.len(), 3);
        assert_eq!(c.arcs().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(c.is_source, vec![true, false, false]);
    }

    #[test]
    fn strongly_connected_condenses_to_one_node() {
        let g = DefGraph::from_arcs(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        let c = condense(&g);
        assert_eq!(c.len(), 1);
        assert_eq!(c.arcs().count(), 0);
        assert!(c.is_source[0]);
    }

    #[test]
    fn dag_condensation_is_isomorphic() {
        let g = DefGraph::from_arcs(4, [(0, 1), (0, 2), (1, 3), (2, 3)]);
        let c = condense(&g);
        assert_eq!(c.len(), 4);
        assert_eq!(c.arcs().count(), 4);
        for (u, v) in g.arcs() {
            let (x, y) = (c.sccs.component(u), c.sccs.component(v));
            assert!(c.succ[x].contains(&y));
        }
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 200_000;
        let g = DefGraph::from_arcs(n, (0..n).map(|i| (i, (i + 1) % n)));
        let s = scc(&g);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn edge_list_export() {
        let g = fixtures::graph_from_defs(&[("a", &["b"]), ("b", &["a", "b"])]);
        let mut buf = Vec::new();
        g.write_edges(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "a#noun\tb#noun\nb#noun\ta#noun\nb#noun\tb#noun\n"
        );
    }

    #[test]
    fn topological_order_smallest_first() {
        let g = DefGraph::from_arcs(4, [(2, 0), (3, 1), (1, 0)]);
        let order = g.topological_order(&[true; 4]).unwrap();
        assert_eq!(order, vec![WordId(2), WordId(3), WordId(1), WordId(0)]);
        let cyc = DefGraph::from_arcs(2, [(0, 1), (1, 0)]);
        assert!(cyc.topological_order(&[true; 2]).is_none());
        assert!(cyc.topological_order(&[true, false]).is_some());
    }
}
