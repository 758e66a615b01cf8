//! Structure summary of a finished game dictionary, in the row shape of the
//! per-dictionary counting table.

use std::time::Duration;

use lexkernel::defgraph::DefGraph;
use lexkernel::lexicon::Lexicon;
use lexkernel::minset::{solve_minset, split_minset, SolveMode, SolveOptions, Status};
use lexkernel::structure::{label_structures, Label};
use serde::{Deserialize, Serialize};

use crate::session::GameError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Share {
    pub count: usize,
    pub percent: f64,
}

impl Share {
    fn of(count: usize, total: usize) -> Self {
        let percent = if total == 0 { 0.0 } else { 100.0 * count as f64 / total as f64 };
        Share { count, percent }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionAnalysis {
    pub words: usize,
    /// Percentages of `words`.
    pub rest: Share,
    pub kernel: Share,
    pub satellites: Share,
    pub core: Share,
    pub minset: Share,
    /// Percentages of the MinSet size.
    pub minset_satellite: Share,
    pub minset_core: Share,
    pub minset_status: Status,
    pub minset_lower_bound: usize,
    pub minset_members: Vec<String>,
}

pub fn analyze_lexicon(lex: &Lexicon, budget: Duration) -> Result<SessionAnalysis, GameError> {
    let g = DefGraph::from_lexicon(lex).map_err(|e| GameError::Storage(e.to_string()))?;
    let labels = label_structures(&g);
    let opts = SolveOptions {
        budget,
        mode: SolveMode::Auto,
        seed: 0,
    };
    let m = solve_minset(&g, &opts).map_err(|e| GameError::Storage(e.to_string()))?;
    let split = split_minset(&m, &labels).map_err(|e| GameError::Storage(e.to_string()))?;
    let n = g.len();
    let count = |l: Label| labels.with_label(l).len();
    Ok(SessionAnalysis {
        words: n,
        rest: Share::of(count(Label::Rest), n),
        kernel: Share::of(labels.kernel().len(), n),
        satellites: Share::of(count(Label::Satellite), n),
        core: Share::of(count(Label::Core), n),
        minset: Share::of(m.size(), n),
        minset_satellite: Share::of(split.satellite.len(), m.size()),
        minset_core: Share::of(split.core.len(), m.size()),
        minset_status: m.status,
        minset_lower_bound: m.lower_bound,
        minset_members: m.members.iter().map(|&v| g.lemma(v).to_string()).collect(),
    })
}
