//! Dictionaries as definitional digraphs: kernel, core and satellites,
//! hierarchies, grounding sets, minimum feedback vertex sets and
//! psycholinguistic summaries.

pub mod defgraph;
pub mod fixtures;
pub mod grounding;
pub mod lexicon;
pub mod minset;
pub mod structure;
pub mod psychstats;
pub mod export;
