//! Ultragraphs: edges whose range is a set of vertices.
//!
//! Ranges are [`RangeSet`]s with three parts: an explicit finite set, an
//! optional "all current vertices except ..." tag (which tracks the vertex
//! set as a truncation deepens), and unresolved tail references to other
//! edges' ranges. Tails are first-class: the range recursion of a realized
//! ultragraph can chain arbitrarily deep, and a truncation must say honestly
//! which parts it has not resolved.
//!
//! Boundary vertices and `periodic k` templates work exactly as for
//! [`DirectedGraph`]: frontier vertices emit no stored edges and the
//! continuation clones the predecessors' edges one generation forward.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{digraph_cycle, CycleAnswer, DirectedGraph, GraphEdge};
use crate::matrix::{MatrixRow, RowBase, ZeroOneMatrix};

/// The range of an ultraedge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeSet {
    resolved: BTreeSet<String>,
    /// `Some(excl)` means "every current vertex except those in `excl`".
    all_except: Option<BTreeSet<String>>,
    /// Ids of ultraedges whose (not yet resolved) ranges join this one.
    tails: BTreeSet<String>,
}

impl RangeSet {
    pub fn new(
        resolved: BTreeSet<String>,
        all_except: Option<BTreeSet<String>>,
        tails: BTreeSet<String>,
    ) -> Self {
        RangeSet {
            resolved,
            all_except,
            tails,
        }
    }

    pub fn vertices(vertices: impl IntoIterator<Item = String>) -> Self {
        RangeSet {
            resolved: vertices.into_iter().collect(),
            all_except: None,
            tails: BTreeSet::new(),
        }
    }

    pub fn resolved(&self) -> &BTreeSet<String> {
        &self.resolved
    }

    pub fn all_except(&self) -> Option<&BTreeSet<String>> {
        self.all_except.as_ref()
    }

    pub fn tails(&self) -> &BTreeSet<String> {
        &self.tails
    }

    pub fn is_fully_resolved(&self) -> bool {
        self.tails.is_empty()
    }

    /// Nonempty as required of every range: some resolved vertex, a cofinite
    /// tag, or at least a tail that will produce vertices.
    pub fn is_provably_nonempty(&self) -> bool {
        !self.resolved.is_empty() || self.all_except.is_some() || !self.tails.is_empty()
    }

    /// The concrete vertex set against a snapshot of the vertex list.
    pub fn materialize(&self, vertices: &[String]) -> BTreeSet<String> {
        let mut out = self.resolved.clone();
        if let Some(excl) = &self.all_except {
            out.extend(
                vertices
                    .iter()
                    .filter(|v| !excl.contains(*v))
                    .cloned(),
            );
        }
        out
    }
}

/// An ultraedge: a single source vertex and a set-valued range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ultraedge {
    pub id: String,
    pub source: String,
    pub range: RangeSet,
}

/// An ultragraph truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ultragraph {
    name: String,
    vertices: Vec<String>,
    boundary: BTreeSet<String>,
    edges: Vec<Ultraedge>,
    periodic: Option<usize>,
}

impl Ultragraph {
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<String>,
        boundary: BTreeSet<String>,
        edges: Vec<Ultraedge>,
        periodic: Option<usize>,
    ) -> Result<Self> {
        let vertex_set: BTreeSet<&String> = vertices.iter().collect();
        if vertex_set.len() != vertices.len() {
            return Err(Error::other("duplicate vertex id"));
        }
        let mut edge_ids = BTreeSet::new();
        for e in &edges {
            if !edge_ids.insert(&e.id) {
                return Err(Error::other(format!("duplicate ultraedge id {}", e.id)));
            }
            if !vertex_set.contains(&e.source) {
                return Err(Error::other(format!(
                    "ultraedge {} starts at unknown vertex {}",
                    e.id, e.source
                )));
            }
            for v in e.range.resolved() {
                if !vertex_set.contains(v) {
                    return Err(Error::other(format!(
                        "ultraedge {} ranges over unknown vertex {v}",
                        e.id
                    )));
                }
            }
            if !e.range.is_provably_nonempty() {
                return Err(Error::other(format!("ultraedge {} has an empty range", e.id)));
            }
        }
        for e in &edges {
            for t in e.range.tails() {
                if !edge_ids.contains(t) {
                    return Err(Error::other(format!(
                        "ultraedge {} references unknown tail {t}",
                        e.id
                    )));
                }
            }
        }
        for b in &boundary {
            if !vertex_set.contains(b) {
                return Err(Error::other(format!("unknown boundary vertex {b}")));
            }
        }
        if let Some(k) = periodic {
            if k == 0 || 2 * k > vertices.len() {
                return Err(Error::other(
                    "periodic template needs at least 2k declared vertices",
                ));
            }
            let frontier: BTreeSet<&String> = vertices[vertices.len() - k..].iter().collect();
            for e in &edges {
                if frontier.contains(&e.source) {
                    return Err(Error::other(format!(
                        "frontier vertex {} must not emit stored ultraedges",
                        e.source
                    )));
                }
            }
        }
        Ok(Ultragraph {
            name: name.into(),
            vertices,
            boundary,
            edges,
            periodic,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Ultraedge] {
        &self.edges
    }

    pub fn periodic(&self) -> Option<usize> {
        self.periodic
    }

    pub fn explicit_boundary(&self) -> &BTreeSet<String> {
        &self.boundary
    }

    pub fn boundary(&self) -> BTreeSet<String> {
        let mut b = self.boundary.clone();
        if let Some(k) = self.periodic {
            b.extend(self.vertices[self.vertices.len() - k..].iter().cloned());
        }
        b
    }

    pub fn edge(&self, id: &str) -> Option<&Ultraedge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn edges_from<'a>(&'a self, v: &'a str) -> impl Iterator<Item = &'a Ultraedge> {
        self.edges.iter().filter(move |e| e.source == v)
    }

    /// The source map is bijective when every non-boundary vertex emits
    /// exactly one ultraedge. This is the ultragraph shape of an Exel-Laca
    /// presentation.
    pub fn source_bijective(&self) -> Result<()> {
        let boundary = self.boundary();
        for v in &self.vertices {
            let count = self.edges_from(v).count();
            if boundary.contains(v) {
                if count != 0 {
                    return Err(Error::SourceNotBijective(format!(
                        "boundary vertex {v} emits a stored edge"
                    )));
                }
            } else if count != 1 {
                return Err(Error::SourceNotBijective(format!(
                    "vertex {v} emits {count} ultraedges, expected exactly 1"
                )));
            }
        }
        Ok(())
    }

    /// Appends `n` generations of the periodic template.
    pub fn unroll_periods(&self, n: usize) -> Ultragraph {
        let Some(k) = self.periodic else {
            return self.clone();
        };
        let mut g = self.clone();
        for _ in 0..n {
            let len = g.vertices.len();
            let frontier: Vec<String> = g.vertices[len - k..].to_vec();
            let prev: Vec<String> = g.vertices[len - 2 * k..len - k].to_vec();
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
            let mut new_edges = Vec::new();
            for e in &g.edges {
                if let Some(i) = prev.iter().position(|p| *p == e.source) {
                    let base = e.id.split('~').next().unwrap_or(&e.id);
                    new_edges.push(Ultraedge {
                        id: format!("{base}~{gen}"),
                        source: frontier[i].clone(),
                        range: RangeSet {
                            resolved: e.range.resolved.iter().map(&shift).collect(),
                            all_except: e
                                .range
                                .all_except
                                .as_ref()
                                .map(|s| s.iter().map(&shift).collect()),
                            tails: e.range.tails.iter().map(&shift).collect(),
                        },
                    });
                }
            }
            g.vertices.extend(fresh);
            g.edges.extend(new_edges);
        }
        g
    }

    /// Cycle scan over resolved range data. A path steps from an edge's
    /// source into any vertex of its range.
    pub fn find_cycle(&self) -> CycleAnswer {
        let snapshot = if self.periodic.is_some() {
            self.unroll_periods(2)
        } else {
            self.clone()
        };
        let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        let mut materialized: Vec<(usize, BTreeSet<String>)> = Vec::new();
        for (n, e) in snapshot.edges.iter().enumerate() {
            materialized.push((n, e.range.materialize(&snapshot.vertices)));
        }
        for (n, range) in &materialized {
            let e = &snapshot.edges[*n];
            let targets: Vec<&str> = snapshot
                .vertices
                .iter()
                .filter(|v| range.contains(*v))
                .map(String::as_str)
                .collect();
            succ.entry(e.source.as_str()).or_default().extend(targets);
        }
        for v in &snapshot.vertices {
            succ.entry(v.as_str()).or_default();
        }
        if let Some(cycle) = digraph_cycle(&snapshot.vertices, &succ) {
            return CycleAnswer::Cycle(cycle);
        }
        let unresolved = snapshot.edges.iter().any(|e| !e.range.is_fully_resolved());
        if unresolved || !self.boundary.is_empty() {
            CycleAnswer::AcyclicWithinDepth
        } else {
            CycleAnswer::Acyclic
        }
    }

    /// Replaces each ultraedge by one graph edge per range vertex. Ranges
    /// must be fully resolved; the cofinite tag resolves against the current
    /// vertex snapshot.
    pub fn expand(&self) -> Result<DirectedGraph> {
        let mut edges = Vec::new();
        for e in &self.edges {
            if !e.range.is_fully_resolved() {
                return Err(Error::UnresolvedRange { edge: e.id.clone() });
            }
            for (n, v) in e.range.materialize(&self.vertices).iter().enumerate() {
                edges.push(GraphEdge::new(
                    format!("{}:{}", e.id, n),
                    e.source.clone(),
                    v.clone(),
                ));
            }
        }
        DirectedGraph::new(
            format!("{}.expanded", self.name),
            self.vertices.clone(),
            self.boundary.clone(),
            edges,
            self.periodic,
        )
    }

    /// Adds a fresh vertex emitting a single ultraedge that ranges over the
    /// whole previous vertex set. Existing cofinite ranges exclude the new
    /// vertex, so they keep meaning "the vertex set as of their creation,
    /// plus whatever deepening adds".
    pub fn m2_unitize(&self) -> Result<Ultragraph> {
        let unit = fresh_id(&self.vertices, "u");
        let mut edges: Vec<Ultraedge> = self
            .edges
            .iter()
            .map(|e| {
                let mut e = e.clone();
                if let Some(excl) = &mut e.range.all_except {
                    excl.insert(unit.clone());
                }
                e
            })
            .collect();
        edges.push(Ultraedge {
            id: format!("e_{unit}"),
            source: unit.clone(),
            range: RangeSet {
                resolved: BTreeSet::new(),
                all_except: Some([unit.clone()].into()),
                tails: BTreeSet::new(),
            },
        });
        let mut vertices = self.vertices.clone();
        vertices.push(unit);
        // A periodic template is indexed from the end of the vertex list, so
        // appending the unit vertex would corrupt it; unitizations of
        // periodic truncations resolve the template first.
        if self.periodic.is_some() {
            return Err(Error::Refused {
                reason: "unitize the unrolled truncation; the periodic template would shift".into(),
            });
        }
        Ultragraph::new(
            format!("{}.unitized", self.name),
            vertices,
            self.boundary.clone(),
            edges,
            None,
        )
    }

    /// The edge matrix under the vertex/ultraedge identification: defined
    /// when the source map is bijective. Entry `(v, w)` is 1 exactly when
    /// `w` lies in the range of the edge at `v`.
    pub fn edge_matrix(&self) -> Result<ZeroOneMatrix> {
        self.source_bijective()?;
        let edge_owner: BTreeMap<&str, &str> = self
            .edges
            .iter()
            .map(|e| (e.id.as_str(), e.source.as_str()))
            .collect();
        let mut rows = Vec::new();
        for v in &self.vertices {
            match self.edges_from(v).next() {
                None => rows.push(MatrixRow::unresolved(v)),
                Some(e) => {
                    let base = match e.range.all_except() {
                        Some(excl) => RowBase::Cofinite(excl.clone()),
                        None => RowBase::Finite(e.range.resolved().clone()),
                    };
                    if e.range.all_except().is_some() && !e.range.resolved().is_empty() {
                        return Err(Error::other(format!(
                            "ultraedge {} mixes cofinite and explicit range parts",
                            e.id
                        )));
                    }
                    let tails = e
                        .range
                        .tails()
                        .iter()
                        .map(|t| edge_owner.get(t.as_str()).unwrap_or(&t.as_str()).to_string())
                        .collect();
                    rows.push(MatrixRow::new(base, tails));
                }
            }
        }
        ZeroOneMatrix::new(
            format!("{}.matrix", self.name),
            self.vertices.clone(),
            rows,
            self.periodic,
        )
    }

    /// A graph regarded as an ultragraph: each edge keeps its identity and
    /// ranges over its single target.
    pub fn from_graph(g: &DirectedGraph) -> Result<Ultragraph> {
        let mut edges = Vec::new();
        for e in g.edges() {
            if e.infinite {
                return Err(Error::InfiniteEmitter(e.source.clone()));
            }
            edges.push(Ultraedge {
                id: e.id.clone(),
                source: e.source.clone(),
                range: RangeSet::vertices([e.target.clone()]),
            });
        }
        Ultragraph::new(
            g.name().to_string(),
            g.vertices().to_vec(),
            g.explicit_boundary().clone(),
            edges,
            g.periodic(),
        )
    }

    /// Regroups a directed graph into an ultragraph with one ultraedge per
    /// emitting vertex, ranging over its out-neighbors. This inverts
    /// expansion for bijective-source ultragraphs.
    pub fn from_grouped_graph(g: &DirectedGraph) -> Result<Ultragraph> {
        let boundary = g.boundary();
        let mut edges = Vec::new();
        for v in g.vertices() {
            if boundary.contains(v) {
                continue;
            }
            let range: BTreeSet<String> = g.out_edges(v).map(|e| e.target.clone()).collect();
            if g.out_edges(v).any(|e| e.infinite) {
                return Err(Error::InfiniteEmitter(v.clone()));
            }
            if range.is_empty() {
                return Err(Error::SinkPresent(v.clone()));
            }
            edges.push(Ultraedge {
                id: format!("e_{v}"),
                source: v.clone(),
                range: RangeSet::vertices(range),
            });
        }
        Ultragraph::new(
            format!("{}.grouped", g.name()),
            g.vertices().to_vec(),
            g.explicit_boundary().clone(),
            edges,
            g.periodic(),
        )
    }
}

fn fresh_id(existing: &[String], base: &str) -> String {
    let mut n = 0usize;
    loop {
        let candidate = if n == 0 {
            base.to_string()
        } else {
            format!("{base}{n}")
        };
        if !existing.contains(&candidate) {
            return candidate;
        }
        n += 1;
    }
}

impl fmt::Display for Ultragraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} vertices, {} ultraedges)",
            self.name,
            self.vertices.len(),
            self.edges.len()
        )
    }
}
