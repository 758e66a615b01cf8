//! CSV and JSON artifacts. Column layouts:
//!
//! - labels: `word,label,scc_id,scc_size,k_level,c_level`
//! - table1: `structure,count,percent`
//! - table2 (per hierarchy): `level,count,truncated_total`, where
//!   `truncated_total` is filled on the level that absorbs the sparse tail
//! - structure report: `structure,count,variable,covered,coverage,mean,sd`
//! - gradients: `level,count,total,merged,variable,covered,coverage,mean,sd`
//! - effect sizes: `variable,a,b,d,residualized`
//! - correlations: `x,y,n,r`
//! - POS breakdown: `structure,count,noun,verb,adj,adv`
//!
//! Absent values are empty cells. Floats use the shortest exact decimal
//! form, so reruns are byte-identical.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;

use crate::defgraph::DefGraph;
use crate::lexicon::Pos;
use crate::minset::{MinSetResult, MinSetSplit, SolveStats, Status};
use crate::psychstats::{
    truncate_levels, Correlation, EffectSize, LevelRow, PosRow, StructureReport, Summary,
};
use crate::structure::{Hierarchy, Label, StructureLabels};

fn csv_err(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

fn num(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn write_rows<W: Write>(out: W, header: &[&str], rows: Vec<Vec<String>>) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush()
}

pub fn write_labels_csv<W: Write>(
    out: W,
    g: &DefGraph,
    labels: &StructureLabels,
    k: &Hierarchy,
    c: &Hierarchy,
) -> io::Result<()> {
    let rows = g
        .vertices()
        .map(|v| {
            vec![
                g.name(v),
                labels.label(v).as_str().to_string(),
                labels.scc_id(v).to_string(),
                labels.scc_size(v).to_string(),
                k.level(v).to_string(),
                c.level(v).to_string(),
            ]
        })
        .collect();
    write_rows(out, &["word", "label", "scc_id", "scc_size", "k_level", "c_level"], rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Row {
    pub structure: &'static str,
    pub count: usize,
    /// Percent of the graph's words, or of the MinSet for its two parts.
    pub percent: Option<f64>,
}

/// Structure sizes in the shape of the per-dictionary counting table.
/// `total` and `first_sense` are entry counts before the graph was built.
pub fn table1(
    total: usize,
    first_sense: usize,
    labels: &StructureLabels,
    minset: Option<&MinSetSplit>,
) -> Vec<Table1Row> {
    let n = labels.labels.len();
    let pct = |c: usize, of: usize| (of > 0).then(|| 100.0 * c as f64 / of as f64);
    let count = |l: Label| labels.with_label(l).len();
    let kernel = labels.kernel().len();
    let mut rows = vec![
        Table1Row { structure: "total_word_meanings", count: total, percent: None },
        Table1Row { structure: "first_sense_meanings", count: first_sense, percent: None },
        Table1Row { structure: "graph_words", count: n, percent: pct(n, n) },
        Table1Row { structure: "rest", count: count(Label::Rest), percent: pct(count(Label::Rest), n) },
        Table1Row { structure: "kernel", count: kernel, percent: pct(kernel, n) },
        Table1Row {
            structure: "satellites",
            count: count(Label::Satellite),
            percent: pct(count(Label::Satellite), n),
        },
        Table1Row { structure: "core", count: count(Label::Core), percent: pct(count(Label::Core), n) },
    ];
    if let Some(m) = minset {
        let size = m.core.len() + m.satellite.len();
        rows.push(Table1Row { structure: "minsets", count: size, percent: pct(size, n) });
        rows.push(Table1Row {
            structure: "satellites_minsets",
            count: m.satellite.len(),
            percent: pct(m.satellite.len(), size),
        });
        rows.push(Table1Row {
            structure: "core_minsets",
            count: m.core.len(),
            percent: pct(m.core.len(), size),
        });
    }
    rows
}

pub fn write_table1<W: Write>(out: W, rows: &[Table1Row]) -> io::Result<()> {
    let rows = rows
        .iter()
        .map(|r| vec![r.structure.to_string(), r.count.to_string(), num(r.percent)])
        .collect();
    write_rows(out, &["structure", "count", "percent"], rows)
}

/// Words per level; the level that absorbs the truncated tail carries the
/// merged total.
pub fn write_level_table<W: Write>(
    out: W,
    counts: &BTreeMap<u32, usize>,
    truncate_min_count: usize,
) -> io::Result<()> {
    let mut merged_total: BTreeMap<u32, usize> = BTreeMap::new();
    for (level, group) in truncate_levels(counts, truncate_min_count) {
        if group.len() > 1 {
            merged_total.insert(level, group.iter().map(|l| counts[l]).sum());
        }
    }
    let rows = counts
        .iter()
        .map(|(l, c)| {
            vec![
                l.to_string(),
                c.to_string(),
                merged_total.get(l).map(|t| t.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    write_rows(out, &["level", "count", "truncated_total"], rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinSetJson {
    pub size: usize,
    pub status: Status,
    pub lower_bound: usize,
    pub members: Vec<String>,
    pub core_members: Vec<String>,
    pub satellite_members: Vec<String>,
    pub stats: SolveStats,
}

impl MinSetJson {
    pub fn new(g: &DefGraph, m: &MinSetResult, split: &MinSetSplit) -> Self {
        let names = |ws: &[crate::defgraph::WordId]| ws.iter().map(|&w| g.name(w)).collect();
        MinSetJson {
            size: m.size(),
            status: m.status,
            lower_bound: m.lower_bound,
            members: names(&m.members),
            core_members: names(&split.core),
            satellite_members: names(&split.satellite),
            stats: m.stats.clone(),
        }
    }
}

pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")
}

fn summary_cells(s: &Summary) -> [String; 4] {
    [s.covered.to_string(), num(Some(s.coverage)), num(s.mean), num(s.sd)]
}

pub fn write_structure_report<W: Write>(out: W, report: &StructureReport) -> io::Result<()> {
    let mut rows = Vec::new();
    for r in &report.rows {
        for (var, s) in &r.variables {
            let mut row = vec![r.structure.as_str().to_string(), r.count.to_string(), var.to_string()];
            row.extend(summary_cells(s));
            rows.push(row);
        }
    }
    write_rows(
        out,
        &["structure", "count", "variable", "covered", "coverage", "mean", "sd"],
        rows,
    )
}

pub fn write_gradients<W: Write>(out: W, levels: &[LevelRow]) -> io::Result<()> {
    let mut rows = Vec::new();
    for r in levels {
        for (var, s) in &r.variables {
            let mut row = vec![
                r.level.to_string(),
                r.count.to_string(),
                r.total.to_string(),
                r.merged.to_string(),
                var.to_string(),
            ];
            row.extend(summary_cells(s));
            rows.push(row);
        }
    }
    write_rows(
        out,
        &["level", "count", "total", "merged", "variable", "covered", "coverage", "mean", "sd"],
        rows,
    )
}

pub fn write_effect_sizes<W: Write>(out: W, effects: &[EffectSize]) -> io::Result<()> {
    let rows = effects
        .iter()
        .map(|e| {
            vec![
                e.variable.to_string(),
                e.a.as_str().to_string(),
                e.b.as_str().to_string(),
                num(e.d),
                e.residualized.to_string(),
            ]
        })
        .collect();
    write_rows(out, &["variable", "a", "b", "d", "residualized"], rows)
}

pub fn write_correlations<W: Write>(out: W, correlations: &[Correlation]) -> io::Result<()> {
    let rows = correlations
        .iter()
        .map(|c| vec![c.x.to_string(), c.y.to_string(), c.n.to_string(), num(c.r)])
        .collect();
    write_rows(out, &["x", "y", "n", "r"], rows)
}

pub fn write_pos_breakdown<W: Write>(out: W, rows: &[PosRow]) -> io::Result<()> {
    let rows = rows
        .iter()
        .map(|r| {
            let mut row = vec![r.structure.as_str().to_string(), r.count.to_string()];
            for p in Pos::ALL {
                row.push(num(r.percent.as_ref().map(|m| m[&p])));
            }
            row
        })
        .collect();
    write_rows(out, &["structure", "count", "noun", "verb", "adj", "adv"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::minset::{solve_minset, split_minset, SolveOptions};
    use crate::structure::{hierarchy, label_structures, level_counts, Aggregator, HierarchyKind, Scope};

    fn text(f: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> String {
        let mut buf = Vec::new();
        f(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn g3_labels_csv() {
        let g = fixtures::g3();
        let labels = label_structures(&g);
        let k = hierarchy(&g, &labels, HierarchyKind::K, Aggregator::Max).unwrap();
        let c = hierarchy(&g, &labels, HierarchyKind::C, Aggregator::Max).unwrap();
        let csv = text(|b| write_labels_csv(b, &g, &labels, &k, &c));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "word,label,scc_id,scc_size,k_level,c_level");
        assert_eq!(lines[1], "a#noun,core,0,3,0,0");
        assert_eq!(lines[6], "f#noun,rest,2,1,1,2");
    }

    #[test]
    fn g3_table1_and_minset_json() {
        let g = fixtures::g3();
        let labels = label_structures(&g);
        let m = solve_minset(&g, &SolveOptions::default()).unwrap();
        let split = split_minset(&m, &labels).unwrap();
        let rows = table1(6, 6, &labels, Some(&split));
        let get = |s: &str| rows.iter().find(|r| r.structure == s).unwrap().count;
        assert_eq!((get("kernel"), get("core"), get("satellites"), get("rest")), (5, 3, 2, 1));
        assert_eq!((get("minsets"), get("core_minsets"), get("satellites_minsets")), (2, 1, 1));
        let json = serde_json::to_value(MinSetJson::new(&g, &m, &split)).unwrap();
        assert_eq!(json["size"], 2);
        assert_eq!(json["status"], "exact");
        assert_eq!(json["core_members"].as_array().unwrap().len(), 1);
        assert!(json["stats"].get("wall_time").is_none());
    }

    #[test]
    fn level_table_marks_truncation() {
        let counts: BTreeMap<u32, usize> = [(0, 100), (1, 40), (2, 5), (3, 2)].into_iter().collect();
        let csv = text(|b| write_level_table(b, &counts, 10));
        assert_eq!(csv, "level,count,truncated_total\n0,100,\n1,40,47\n2,5,\n3,2,\n");
        let g = fixtures::g3();
        let labels = label_structures(&g);
        let k = hierarchy(&g, &labels, HierarchyKind::K, Aggregator::Max).unwrap();
        let csv = text(|b| write_level_table(b, &level_counts(&k, &labels, Scope::All), 1));
        assert_eq!(csv, "level,count,truncated_total\n0,5,\n1,1,\n");
    }
}
