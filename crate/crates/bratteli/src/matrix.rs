//! {0,1}-matrices over ordered index sets, stored as sparse rows.
//!
//! A row is either a finite set of columns carrying 1 or a cofinite set
//! ("every index except these"), and may carry unresolved tail markers in the
//! same way ultragraph ranges do. Like graphs, a matrix may declare a
//! periodic template: the last `k` indices are frontier rows (unresolved),
//! and the continuation clones the preceding `k` rows one generation forward.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{digraph_cycle, CycleAnswer, DirectedGraph, GraphEdge};
use crate::ultragraph::{RangeSet, Ultraedge, Ultragraph};

/// The decided part of a row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowBase {
    /// Exactly these columns carry 1.
    Finite(BTreeSet<String>),
    /// Every column carries 1 except these.
    Cofinite(BTreeSet<String>),
}

/// One row: decided columns plus unresolved tail references. A tail marker
/// names a row (equivalently an ultraedge) whose future content joins this
/// row once deeper data is available.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixRow {
    pub base: RowBase,
    pub tails: BTreeSet<String>,
}

impl MatrixRow {
    pub fn new(base: RowBase, tails: BTreeSet<String>) -> Self {
        MatrixRow { base, tails }
    }

    pub fn finite(columns: impl IntoIterator<Item = String>) -> Self {
        MatrixRow {
            base: RowBase::Finite(columns.into_iter().collect()),
            tails: BTreeSet::new(),
        }
    }

    /// A row about which nothing is decided yet; it references itself.
    pub fn unresolved(id: &str) -> Self {
        MatrixRow {
            base: RowBase::Finite(BTreeSet::new()),
            tails: [id.to_string()].into(),
        }
    }

    pub fn is_resolved(&self) -> bool {
        self.tails.is_empty()
    }

    /// True when the row provably has no 1 anywhere.
    pub fn is_zero(&self) -> bool {
        self.tails.is_empty() && matches!(&self.base, RowBase::Finite(s) if s.is_empty())
    }

    pub fn has(&self, column: &str) -> bool {
        match &self.base {
            RowBase::Finite(s) => s.contains(column),
            RowBase::Cofinite(excl) => !excl.contains(column),
        }
    }
}

/// A {0,1}-matrix truncation over an ordered index set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroOneMatrix {
    name: String,
    indices: Vec<String>,
    rows: Vec<MatrixRow>,
    periodic: Option<usize>,
}

impl ZeroOneMatrix {
    pub fn new(
        name: impl Into<String>,
        indices: Vec<String>,
        rows: Vec<MatrixRow>,
        periodic: Option<usize>,
    ) -> Result<Self> {
        if indices.len() != rows.len() {
            return Err(Error::other("every index needs exactly one row"));
        }
        let index_set: BTreeSet<&String> = indices.iter().collect();
        if index_set.len() != indices.len() {
            return Err(Error::other("duplicate matrix index"));
        }
        for (i, row) in indices.iter().zip(&rows) {
            let cols: Vec<&String> = match &row.base {
                RowBase::Finite(s) => s.iter().collect(),
                RowBase::Cofinite(s) => s.iter().collect(),
            };
            for c in cols {
                if !index_set.contains(c) {
                    return Err(Error::other(format!("row {i} references unknown index {c}")));
                }
            }
            if row.is_zero() {
                return Err(Error::ZeroRow(i.clone()));
            }
        }
        if let Some(k) = periodic {
            if k == 0 || 2 * k > indices.len() {
                return Err(Error::other(
                    "periodic template needs at least 2k declared indices",
                ));
            }
        }
        Ok(ZeroOneMatrix {
            name: name.into(),
            indices,
            rows,
            periodic,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn indices(&self) -> &[String] {
        &self.indices
    }

    pub fn periodic(&self) -> Option<usize> {
        self.periodic
    }

    pub fn row(&self, index: &str) -> &MatrixRow {
        let pos = self
            .indices
            .iter()
            .position(|i| i == index)
            .expect("unknown index");
        &self.rows[pos]
    }

    pub fn rows(&self) -> impl Iterator<Item = (&String, &MatrixRow)> {
        self.indices.iter().zip(&self.rows)
    }

    /// Entry test on the decided part.
    pub fn has(&self, i: &str, j: &str) -> bool {
        self.row(i).has(j)
    }

    pub fn is_row_finite(&self) -> bool {
        self.rows
            .iter()
            .all(|r| matches!(r.base, RowBase::Finite(_)))
    }

    /// Appends `n` generations of the periodic template, mirroring the graph
    /// semantics: the last `k` indices are frontier rows, each cloned from
    /// its predecessor with targets shifted one generation forward.
    pub fn unroll_periods(&self, n: usize) -> ZeroOneMatrix {
        let Some(k) = self.periodic else {
            return self.clone();
        };
        let mut m = self.clone();
        for _ in 0..n {
            let len = m.indices.len();
            let frontier: Vec<String> = m.indices[len - k..].to_vec();
            let prev: Vec<String> = m.indices[len - 2 * k..len - k].to_vec();
            let gen = len + 1;
            let fresh: Vec<String> = frontier
                .iter()
                .map(|f| {
                    let base = f.split('~').next().unwrap_or(f);
                    format!("{base}~{gen}")
                })
                .collect();
            let shift = |t: &String| -> String {
                if let Some(i) = prev.iter().position(|p| p == t) {
                    frontier[i].clone()
                } else if let Some(i) = frontier.iter().position(|f| f == t) {
                    fresh[i].clone()
                } else {
                    t.clone()
                }
            };
            // The frontier rows take the shifted content of their
            // predecessors; the fresh indices become the new frontier.
            for (fi, f) in frontier.iter().enumerate() {
                let src_pos = m.indices.iter().position(|i| i == &prev[fi]).unwrap();
                let src = m.rows[src_pos].clone();
                let new_base = match src.base {
                    RowBase::Finite(s) => RowBase::Finite(s.iter().map(&shift).collect()),
                    RowBase::Cofinite(s) => RowBase::Cofinite(s.iter().map(&shift).collect()),
                };
                let new_tails = src.tails.iter().map(&shift).collect();
                let dst_pos = m.indices.iter().position(|i| i == f).unwrap();
                m.rows[dst_pos] = MatrixRow::new(new_base, new_tails);
            }
            for f in &fresh {
                m.indices.push(f.clone());
                m.rows.push(MatrixRow::unresolved(f));
            }
        }
        m
    }

    /// Cycle scan on the decided entries: an index sequence `i_1, ..., i_n`
    /// with a 1 at every consecutive pair and at `(i_n, i_1)`.
    pub fn find_cycle(&self) -> CycleAnswer {
        let snapshot = if self.periodic.is_some() {
            self.unroll_periods(2)
        } else {
            self.clone()
        };
        let succ: BTreeMap<&str, Vec<&str>> = snapshot
            .indices
            .iter()
            .map(|i| {
                let row = snapshot.row(i);
                let targets: Vec<&str> = snapshot
                    .indices
                    .iter()
                    .filter(|j| row.has(j))
                    .map(String::as_str)
                    .collect();
                (i.as_str(), targets)
            })
            .collect();
        if let Some(cycle) = digraph_cycle(&snapshot.indices, &succ) {
            return CycleAnswer::Cycle(cycle);
        }
        let unresolved = snapshot.rows.iter().any(|r| !r.is_resolved());
        let template_cofinite = match self.periodic {
            Some(k) => self.rows[self.rows.len() - 2 * k..self.rows.len() - k]
                .iter()
                .any(|r| matches!(r.base, RowBase::Cofinite(_))),
            None => false,
        };
        if unresolved || template_cofinite {
            CycleAnswer::AcyclicWithinDepth
        } else {
            CycleAnswer::Acyclic
        }
    }

    /// The dual graph: one vertex per index, an edge `i -> j` per 1-entry.
    /// Needs a row-finite matrix; unresolved rows become boundary vertices.
    pub fn dual_graph(&self) -> Result<DirectedGraph> {
        if let Some((i, _)) = self.rows().find(|(_, r)| !matches!(r.base, RowBase::Finite(_))) {
            return Err(Error::RowNotFinite(i.clone()));
        }
        let mut edges = Vec::new();
        let mut boundary = BTreeSet::new();
        for (i, row) in self.rows() {
            if !row.is_resolved() {
                boundary.insert(i.clone());
                continue;
            }
            if let RowBase::Finite(cols) = &row.base {
                for (n, j) in cols.iter().enumerate() {
                    edges.push(GraphEdge::new(format!("{i}:{n}"), i.clone(), j.clone()));
                }
            }
        }
        DirectedGraph::new(
            format!("{}.dual", self.name),
            self.indices.clone(),
            boundary,
            edges,
            self.periodic,
        )
    }

    /// The canonical ultragraph: vertices and ultraedges are both the index
    /// set, the edge at `i` starts at `i` and ranges over the 1-columns of
    /// row `i`. An unresolved row becomes an edge whose range is its own
    /// tail, mirroring how realized truncations encode the frontier.
    pub fn canonical_ultragraph(&self) -> Result<Ultragraph> {
        let frontier_start = self
            .periodic
            .map(|k| self.indices.len() - k)
            .unwrap_or(usize::MAX);
        let mut edges = Vec::new();
        for (pos, (i, row)) in self.rows().enumerate() {
            if pos >= frontier_start {
                // Periodic frontier rows stay edgeless; the template
                // supplies their continuation.
                continue;
            }
            let range = match &row.base {
                RowBase::Finite(s) => RangeSet::new(s.clone(), None, tails_as_edges(&row.tails)),
                RowBase::Cofinite(excl) => {
                    RangeSet::new(BTreeSet::new(), Some(excl.clone()), tails_as_edges(&row.tails))
                }
            };
            edges.push(Ultraedge {
                id: format!("e_{i}"),
                source: i.clone(),
                range,
            });
        }
        Ultragraph::new(
            format!("{}.ultragraph", self.name),
            self.indices.clone(),
            BTreeSet::new(),
            edges,
            self.periodic,
        )
    }
}

fn tails_as_edges(tails: &BTreeSet<String>) -> BTreeSet<String> {
    tails.iter().map(|t| format!("e_{t}")).collect()
}

impl fmt::Display for ZeroOneMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} indices)", self.name, self.indices.len())
    }
}
