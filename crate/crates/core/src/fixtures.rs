//! Small hand-built lexica and seeded random graphs, shared by tests, the
//! acceptance suite and the benchmarks in the CLI.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::defgraph::DefGraph;
use crate::lexicon::{LexEntry, Lexicon, Pos};

/// Lexicon with one noun entry per `(lemma, definition)` pair, in order.
pub fn lexicon_from_defs(defs: &[(&str, &[&str])]) -> Lexicon {
    Lexicon::new(
        defs.iter()
            .enumerate()
            .map(|(i, (lemma, def))| {
                let mut e = LexEntry::new(*lemma, Pos::Noun, def.iter().map(|t| t.to_string()).collect());
                e.source_line = i + 1;
                e
            })
            .collect(),
    )
}

pub fn graph_from_defs(defs: &[(&str, &[&str])]) -> DefGraph {
    DefGraph::from_lexicon(&lexicon_from_defs(defs)).expect("fixture lexicon is closed")
}

/// a:=[c], b:=[a], c:=[b], d:=[c,e], e:=[d], f:=[d]
pub const G3_DEFS: &[(&str, &[&str])] = &[
    ("a", &["c"]),
    ("b", &["a"]),
    ("c", &["b"]),
    ("d", &["c", "e"]),
    ("e", &["d"]),
    ("f", &["d"]),
];

pub fn g3_lexicon() -> Lexicon {
    lexicon_from_defs(G3_DEFS)
}

pub fn g3() -> DefGraph {
    graph_from_defs(G3_DEFS)
}

/// Random digraph where each ordered pair (including self-pairs when
/// `loops` is set) is an arc with probability `p`.
pub fn random_digraph<R: Rng>(rng: &mut R, n: usize, p: f64, loops: bool) -> DefGraph {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if (u != v || loops) && rng.gen_bool(p) {
                arcs.push((u, v));
            }
        }
    }
    DefGraph::from_arcs(n, arcs)
}

/// Random digraph with a fixed expected out-degree, for large sparse graphs.
pub fn random_sparse_digraph<R: Rng>(rng: &mut R, n: usize, avg_degree: f64) -> DefGraph {
    let m = (n as f64 * avg_degree).round() as usize;
    let arcs: Vec<(usize, usize)> = (0..m)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect();
    DefGraph::from_arcs(n, arcs)
}

/// Dictionary-shaped synthetic lexicon: definitions draw their tokens
/// from a Zipf-like distribution over the headword list, so a small set of
/// frequent words does most of the defining.
pub fn synthetic_dictionary(words: usize, seed: u64) -> Lexicon {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lemmas: Vec<String> = (0..words).map(|i| format!("w{i}")).collect();
    let weights: Vec<f64> = (0..words).map(|r| 1.0 / (r as f64 + 1.0).powf(1.1)).collect();
    let total: f64 = weights.iter().sum();
    let mut cumulative = Vec::with_capacity(words);
    let mut acc = 0.0;
    for w in &weights {
        acc += w / total;
        cumulative.push(acc);
    }
    let draw = |rng: &mut ChaCha8Rng| -> usize {
        let x: f64 = rng.gen();
        cumulative.partition_point(|&c| c < x).min(words - 1)
    };
    let mut entries = Vec::with_capacity(words);
    for (i, lemma) in lemmas.iter().enumerate() {
        let len = rng.gen_range(2..=8);
        let definition = (0..len).map(|_| lemmas[draw(&mut rng)].clone()).collect();
        let pos = *Pos::ALL.choose(&mut rng).unwrap();
        let mut e = LexEntry::new(lemma.clone(), pos, definition);
        e.source_line = i + 1;
        entries.push(e);
    }
    Lexicon::new(entries)
}
