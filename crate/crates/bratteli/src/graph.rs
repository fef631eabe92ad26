//! Directed multigraphs with truncation-aware scans.
//!
//! Infinite families are stored as finite truncations plus structure. A
//! vertex may be marked as a *boundary* vertex: its outgoing edges exist but
//! are not represented. A graph may also carry a periodic declaration
//! `periodic k`: the last `k` declared vertices form the frontier, the `k`
//! before them are their predecessors, and the graph continues forever by
//! cloning each predecessor's out-structure onto the frontier (frontier
//! targets shift one generation forward, predecessor targets shift onto the
//! frontier, all other targets stay fixed). The frontier vertices of a
//! periodic graph are implicitly boundary vertices.
//!
//! An edge flagged `infinite` stands for infinitely many parallel copies;
//! such graphs serve as classification witnesses and are rejected by the
//! row-finite operations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{MatrixRow, RowBase, ZeroOneMatrix};
use crate::Nat;

/// One directed edge. `infinite` marks an infinite bundle of parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphEdge {
    pub id: String,
    pub source: String,
    pub target: String,
    pub infinite: bool,
}

impl GraphEdge {
    pub fn new(id: impl Into<String>, source: impl Into<String>, target: impl Into<String>) -> Self {
        GraphEdge {
            id: id.into(),
            source: source.into(),
            target: target.into(),
            infinite: false,
        }
    }
}

/// Answer of a cycle scan over a possibly truncated object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleAnswer {
    /// A concrete cycle, as the list of vertices (or indices) visited.
    Cycle(Vec<String>),
    /// Definitively acyclic: the object is completely represented.
    Acyclic,
    /// No cycle within the represented part; the continuation is unknown.
    AcyclicWithinDepth,
}

impl CycleAnswer {
    pub fn has_cycle(&self) -> bool {
        matches!(self, CycleAnswer::Cycle(_))
    }
}

/// A directed multigraph truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    name: String,
    vertices: Vec<String>,
    boundary: BTreeSet<String>,
    edges: Vec<GraphEdge>,
    periodic: Option<usize>,
}

impl DirectedGraph {
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<String>,
        boundary: BTreeSet<String>,
        edges: Vec<GraphEdge>,
        periodic: Option<usize>,
    ) -> Result<Self> {
        let vertex_set: BTreeSet<&String> = vertices.iter().collect();
        if vertex_set.len() != vertices.len() {
            return Err(Error::other("duplicate vertex id"));
        }
        let mut edge_ids = BTreeSet::new();
        for e in &edges {
            if !edge_ids.insert(&e.id) {
                return Err(Error::other(format!("duplicate edge id {}", e.id)));
            }
            if !vertex_set.contains(&e.source) || !vertex_set.contains(&e.target) {
                return Err(Error::other(format!(
                    "edge {} has an endpoint outside the vertex set",
                    e.id
                )));
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
                        "frontier vertex {} must not emit stored edges; its structure comes from the template",
                        e.source
                    )));
                }
            }
        }
        Ok(DirectedGraph {
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

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn periodic(&self) -> Option<usize> {
        self.periodic
    }

    pub fn explicit_boundary(&self) -> &BTreeSet<String> {
        &self.boundary
    }

    /// Vertices whose outgoing structure is not stored: explicitly marked
    /// ones plus the frontier of a periodic declaration.
    pub fn boundary(&self) -> BTreeSet<String> {
        let mut b = self.boundary.clone();
        if let Some(k) = self.periodic {
            b.extend(self.vertices[self.vertices.len() - k..].iter().cloned());
        }
        b
    }

    pub fn out_edges<'a>(&'a self, v: &'a str) -> impl Iterator<Item = &'a GraphEdge> {
        self.edges.iter().filter(move |e| e.source == v)
    }

    pub fn in_edges<'a>(&'a self, v: &'a str) -> impl Iterator<Item = &'a GraphEdge> {
        self.edges.iter().filter(move |e| e.target == v)
    }

    /// Semantic sinks: vertices with no outgoing edges whose absence of
    /// edges is represented (not boundary). For a frontier vertex the
    /// template decides, and its sink-ness shows up on its clones.
    pub fn sinks(&self) -> Vec<String> {
        let boundary = self.boundary();
        self.vertices
            .iter()
            .filter(|v| !boundary.contains(*v) && self.out_edges(v).next().is_none())
            .cloned()
            .collect()
    }

    pub fn infinite_emitters(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for e in &self.edges {
            if e.infinite && !out.contains(&e.source) {
                out.push(e.source.clone());
            }
        }
        out
    }

    pub fn is_row_finite(&self) -> bool {
        self.infinite_emitters().is_empty()
    }

    /// Appends `n` generations of the periodic template. No-op without a
    /// periodic declaration.
    pub fn unroll_periods(&self, n: usize) -> DirectedGraph {
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
            let shift = |t: &str| -> String {
                if let Some(i) = prev.iter().position(|p| p == t) {
                    frontier[i].clone()
                } else if let Some(i) = frontier.iter().position(|f| f == t) {
                    fresh[i].clone()
                } else {
                    t.to_string()
                }
            };
            let mut new_edges = Vec::new();
            for e in &g.edges {
                if let Some(i) = prev.iter().position(|p| *p == e.source) {
                    let base = e.id.split('~').next().unwrap_or(&e.id);
                    new_edges.push(GraphEdge {
                        id: format!("{base}~{gen}"),
                        source: frontier[i].clone(),
                        target: shift(&e.target),
                        infinite: e.infinite,
                    });
                }
            }
            g.vertices.extend(fresh);
            g.edges.extend(new_edges);
        }
        g
    }

    /// Cycle scan. Periodic graphs are scanned after one unrolling step,
    /// which is where any cycle of the infinite unrolling first closes up.
    pub fn find_cycle(&self) -> CycleAnswer {
        let snapshot = if self.periodic.is_some() {
            self.unroll_periods(1)
        } else {
            self.clone()
        };
        let succ: BTreeMap<&str, Vec<&str>> = snapshot
            .vertices
            .iter()
            .map(|v| {
                (
                    v.as_str(),
                    snapshot
                        .out_edges(v)
                        .map(|e| e.target.as_str())
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        if let Some(cycle) = digraph_cycle(&snapshot.vertices, &succ) {
            return CycleAnswer::Cycle(cycle);
        }
        if self.boundary.is_empty() {
            CycleAnswer::Acyclic
        } else {
            CycleAnswer::AcyclicWithinDepth
        }
    }

    /// Number of finite paths ending at each vertex, counting a vertex as
    /// its own path of length zero. Requires an acyclic graph.
    pub fn path_counts(&self) -> BTreeMap<String, Nat> {
        let mut indeg: BTreeMap<&str, usize> = self
            .vertices
            .iter()
            .map(|v| (v.as_str(), self.in_edges(v).count()))
            .collect();
        let mut queue: Vec<&str> = self
            .vertices
            .iter()
            .map(String::as_str)
            .filter(|v| indeg[v] == 0)
            .collect();
        let mut topo: Vec<&str> = Vec::new();
        while let Some(v) = queue.pop() {
            topo.push(v);
            for e in self.out_edges(v) {
                let d = indeg.get_mut(e.target.as_str()).unwrap();
                *d -= 1;
                if *d == 0 {
                    queue.push(&e.target);
                }
            }
        }
        assert_eq!(
            topo.len(),
            self.vertices.len(),
            "path_counts needs an acyclic graph"
        );
        let mut counts: BTreeMap<String, Nat> = BTreeMap::new();
        for v in topo {
            let mut c = Nat::from(1u32);
            for e in self.in_edges(v) {
                c += counts.get(&e.source).cloned().unwrap_or_else(Nat::zero);
            }
            counts.insert(v.to_string(), c);
        }
        counts
    }

    pub fn reachable(&self, from: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from.to_string()];
        while let Some(v) = stack.pop() {
            if !seen.insert(v.clone()) {
                continue;
            }
            for e in self.out_edges(&v) {
                stack.push(e.target.clone());
            }
        }
        seen
    }

    /// Splits the truncation the way the sink structure splits the algebra:
    /// one matrix summand per sink with finitely many paths into it, a
    /// compact-operator summand per sink with infinitely many, and a
    /// residual sink-free graph. Errors when some vertex connects to
    /// infinitely many sinks, which is the obstruction to this shape.
    pub fn decompose_sinks(&self) -> Result<SinkDecomposition> {
        if let Some(v) = self.infinite_emitters().first() {
            return Err(Error::InfiniteEmitter(v.clone()));
        }
        if !self.boundary.is_empty() {
            return Err(Error::Refused {
                reason: "graph has boundary vertices without a periodic template; \
                         sink decomposition needs a complete or periodic graph"
                    .into(),
            });
        }
        if let CycleAnswer::Cycle(c) = self.find_cycle() {
            return Err(Error::CyclePresent(c.join(" -> ")));
        }
        let (a, b) = match self.periodic {
            None => (self.clone(), self.clone()),
            Some(_) => {
                let t = self.vertices.len() + 2;
                (self.unroll_periods(t), self.unroll_periods(t + 1))
            }
        };
        let sinks_a: BTreeSet<String> = a.sinks().into_iter().collect();
        let sinks_b: BTreeSet<String> = b.sinks().into_iter().collect();
        // Per-vertex reachable sink counts must have stabilized.
        for v in &self.vertices {
            let ra = a.reachable(v).intersection(&sinks_a).count();
            let rb = b.reachable(v).intersection(&sinks_b).count();
            if rb > ra {
                return Err(Error::InfinitelyManySinks { vertex: v.clone() });
            }
        }
        let counts_a = a.path_counts();
        let counts_b = b.path_counts();
        let mut finite_summands = Vec::new();
        let mut compact_summands = Vec::new();
        for s in self.sinks() {
            if counts_b[&s] > counts_a[&s] {
                compact_summands.push(s);
            } else {
                finite_summands.push((s.clone(), counts_a[&s].clone()));
            }
        }
        let continues = sinks_a.iter().any(|s| !self.vertices.contains(s));
        // The residual keeps the vertices of unbounded forward depth: those
        // that reach the frontier of the periodic template.
        let keep: Vec<String> = match self.periodic {
            None => Vec::new(),
            Some(k) => {
                let frontier: BTreeSet<String> = self.vertices[self.vertices.len() - k..]
                    .iter()
                    .cloned()
                    .collect();
                self.vertices
                    .iter()
                    .filter(|v| !self.reachable(v).is_disjoint(&frontier))
                    .cloned()
                    .collect()
            }
        };
        let keep_set: BTreeSet<&String> = keep.iter().collect();
        let residual_edges: Vec<GraphEdge> = self
            .edges
            .iter()
            .filter(|e| keep_set.contains(&e.source) && keep_set.contains(&e.target))
            .cloned()
            .collect();
        let residual_periodic = self.periodic.filter(|&k| {
            self.vertices.len() >= 2 * k
                && self.vertices[self.vertices.len() - 2 * k..]
                    .iter()
                    .all(|v| keep_set.contains(&v))
        });
        let residual = DirectedGraph::new(
            format!("{}.residual", self.name),
            keep,
            BTreeSet::new(),
            residual_edges,
            residual_periodic,
        )?;
        Ok(SinkDecomposition {
            finite_summands,
            compact_summands,
            residual,
            continues,
        })
    }

    /// Edge matrix of a row-finite graph with no sinks: indexed by edges,
    /// with a 1 at `(e, f)` exactly when `f` starts where `e` ends. Edges
    /// ending on a boundary vertex get an unresolved row.
    pub fn edge_matrix(&self) -> Result<ZeroOneMatrix> {
        if self.periodic.is_some() {
            return Err(Error::Refused {
                reason: "edge matrix of a periodic graph is not supported; unroll first".into(),
            });
        }
        if let Some(v) = self.infinite_emitters().first() {
            return Err(Error::InfiniteEmitter(v.clone()));
        }
        if let Some(v) = self.sinks().first() {
            return Err(Error::SinkPresent(v.clone()));
        }
        let boundary = self.boundary();
        let indices: Vec<String> = self.edges.iter().map(|e| e.id.clone()).collect();
        let mut rows = Vec::with_capacity(indices.len());
        for e in &self.edges {
            if boundary.contains(&e.target) {
                rows.push(MatrixRow::unresolved(&e.id));
            } else {
                let follow: BTreeSet<String> =
                    self.out_edges(&e.target).map(|f| f.id.clone()).collect();
                rows.push(MatrixRow::new(RowBase::Finite(follow), BTreeSet::new()));
            }
        }
        ZeroOneMatrix::new(format!("{}.edges", self.name), indices, rows, None)
    }
}

impl fmt::Display for DirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} vertices, {} edges)",
            self.name,
            self.vertices.len(),
            self.edges.len()
        )
    }
}

/// Output of [`DirectedGraph::decompose_sinks`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SinkDecomposition {
    /// `(sink, n)` pairs: a full matrix summand of size `n` per sink with
    /// `n` finite paths into it (the sink itself counts as one).
    pub finite_summands: Vec<(String, Nat)>,
    /// Sinks with infinitely many paths: compact-operator summands.
    pub compact_summands: Vec<String>,
    /// What remains after deleting everything of bounded depth; has no sinks.
    pub residual: DirectedGraph,
    /// True when the periodic continuation keeps generating summands.
    pub continues: bool,
}

/// Disjoint union of directed lines, one of length `n` per entry: the
/// standard graph presentation of a sum of matrix algebras. Decomposing the
/// result recovers the input.
pub fn fin_dim_to_graph(dims: &[u64]) -> Result<DirectedGraph> {
    if dims.is_empty() {
        return Err(Error::other("dimension list must be nonempty"));
    }
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (b, &n) in dims.iter().enumerate() {
        if n == 0 {
            return Err(Error::other("dimensions must be positive"));
        }
        for i in 1..=n {
            vertices.push(format!("x{}_{}", b + 1, i));
            if i > 1 {
                edges.push(GraphEdge::new(
                    format!("l{}_{}", b + 1, i - 1),
                    format!("x{}_{}", b + 1, i - 1),
                    format!("x{}_{}", b + 1, i),
                ));
            }
        }
    }
    DirectedGraph::new("fin_dim", vertices, BTreeSet::new(), edges, None)
}

/// DFS cycle search over an explicit successor map; returns the vertices of
/// the first cycle found, in traversal order.
pub(crate) fn digraph_cycle(
    order: &[String],
    succ: &BTreeMap<&str, Vec<&str>>,
) -> Option<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Gray,
        Black,
    }
    let mut marks: BTreeMap<&str, Mark> = order.iter().map(|v| (v.as_str(), Mark::White)).collect();
    let mut parent: BTreeMap<&str, &str> = BTreeMap::new();
    for start in order {
        if marks[start.as_str()] != Mark::White {
            continue;
        }
        let mut stack: Vec<(&str, usize)> = vec![(start.as_str(), 0)];
        marks.insert(start.as_str(), Mark::Gray);
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            let children = succ.get(v).map(Vec::as_slice).unwrap_or(&[]);
            if *i < children.len() {
                let w = children[*i];
                *i += 1;
                match marks[w] {
                    Mark::White => {
                        parent.insert(w, v);
                        marks.insert(w, Mark::Gray);
                        stack.push((w, 0));
                    }
                    Mark::Gray => {
                        // Found a cycle: walk back from v to w.
                        let mut cycle = vec![w.to_string()];
                        let mut cur = v;
                        while cur != w {
                            cycle.push(cur.to_string());
                            cur = parent[cur];
                        }
                        cycle.reverse();
                        return Some(cycle);
                    }
                    Mark::Black => {}
                }
            } else {
                marks.insert(v, Mark::Black);
                stack.pop();
            }
        }
    }
    None
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Builds a complete graph from `(id, source, target)` triples.
    pub fn graph(name: &str, vertices: &[&str], edges: &[(&str, &str, &str)]) -> DirectedGraph {
        DirectedGraph::new(
            name,
            vertices.iter().map(|s| s.to_string()).collect(),
            BTreeSet::new(),
            edges
                .iter()
                .map(|(id, s, t)| GraphEdge::new(*id, *s, *t))
                .collect(),
            None,
        )
        .unwrap()
    }

    /// The row-finite no-sink witness family: one vertex per level and two
    /// parallel edges to the next, truncated with a periodic template.
    pub fn double_edge_chain(depth: usize) -> DirectedGraph {
        let vertices: Vec<String> = (1..=depth).map(|i| format!("v{i}")).collect();
        let mut edges = Vec::new();
        for i in 1..depth {
            for c in ["a", "b"] {
                edges.push(GraphEdge::new(
                    format!("{c}{i}"),
                    format!("v{i}"),
                    format!("v{}", i + 1),
                ));
            }
        }
        DirectedGraph::new("f2", vertices, BTreeSet::new(), edges, Some(1)).unwrap()
    }

    /// The sprouting family: v_n -> v_{n+1} and v_n -> w_n (a sink),
    /// truncated at `depth` and tagged periodic.
    pub fn sink_sprouter(depth: usize) -> DirectedGraph {
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        for i in 1..=depth {
            vertices.push(format!("v{i}"));
            vertices.push(format!("w{i}"));
        }
        for i in 1..depth {
            edges.push(GraphEdge::new(
                format!("c{i}"),
                format!("v{i}"),
                format!("v{}", i + 1),
            ));
            edges.push(GraphEdge::new(
                format!("s{i}"),
                format!("v{i}"),
                format!("w{i}"),
            ));
        }
        DirectedGraph::new("vw", vertices, BTreeSet::new(), edges, Some(2)).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::{double_edge_chain, graph, sink_sprouter};
    use super::*;
    use crate::nat;

    #[test]
    fn two_sinks_from_one_source_decomposes_into_two_blocks() {
        // left <- mid -> right presents two 2x2 matrix blocks.
        let g = graph(
            "two_m2",
            &["l", "m", "r"],
            &[("e", "m", "l"), ("f", "m", "r")],
        );
        let d = g.decompose_sinks().unwrap();
        let dims: Vec<Nat> = d.finite_summands.iter().map(|(_, n)| n.clone()).collect();
        assert_eq!(dims, vec![nat(2), nat(2)]);
        assert!(d.compact_summands.is_empty());
        assert!(d.residual.vertices().is_empty());
        assert!(!d.continues);
    }

    #[test]
    fn single_edge_decomposes_into_one_block() {
        let g = graph("m2", &["v", "w"], &[("e", "v", "w")]);
        let d = g.decompose_sinks().unwrap();
        assert_eq!(d.finite_summands, vec![("w".to_string(), nat(2))]);
    }

    #[test]
    fn sink_sprouter_connects_to_infinitely_many_sinks() {
        let g = sink_sprouter(8);
        match g.decompose_sinks() {
            Err(Error::InfinitelyManySinks { vertex }) => assert_eq!(vertex, "v1"),
            other => panic!("expected the infinitely-many-sinks error, got {other:?}"),
        }
    }

    #[test]
    fn double_edge_chain_has_no_sinks_and_no_cycles() {
        let g = double_edge_chain(4);
        assert!(g.sinks().is_empty());
        assert!(g.is_row_finite());
        assert_eq!(g.find_cycle(), CycleAnswer::Acyclic);
        let d = g.decompose_sinks().unwrap();
        assert!(d.finite_summands.is_empty());
        assert_eq!(d.residual.vertices().len(), g.vertices().len());
    }

    #[test]
    fn unrolling_the_sprouter_matches_the_hand_built_family() {
        let small = sink_sprouter(8);
        let big = sink_sprouter(10);
        let unrolled = small.unroll_periods(2);
        assert_eq!(unrolled.vertices().len(), big.vertices().len());
        assert_eq!(unrolled.edges().len(), big.edges().len());
        assert_eq!(unrolled.sinks().len(), big.sinks().len());
    }

    #[test]
    fn cycles_are_found_and_witnessed() {
        let g = graph(
            "loopy",
            &["a", "b", "c"],
            &[("e", "a", "b"), ("f", "b", "c"), ("g", "c", "a")],
        );
        match g.find_cycle() {
            CycleAnswer::Cycle(c) => assert_eq!(c.len(), 3),
            other => panic!("expected a cycle, got {other:?}"),
        }
    }

    #[test]
    fn periodic_clone_edges_to_fixed_targets_can_close_cycles() {
        // p -> x, p -> f, x -> f: cloning p's structure onto f yields
        // f -> x, closing the cycle x -> f -> x.
        let g = DirectedGraph::new(
            "pump",
            vec!["x".into(), "p".into(), "f".into()],
            BTreeSet::new(),
            vec![
                GraphEdge::new("a", "p", "x"),
                GraphEdge::new("b", "p", "f"),
                GraphEdge::new("c", "x", "f"),
            ],
            Some(1),
        )
        .unwrap();
        assert!(g.find_cycle().has_cycle());
    }

    #[test]
    fn fin_dim_graph_round_trips_through_decomposition() {
        let g = fin_dim_to_graph(&[3, 5, 7]).unwrap();
        let d = g.decompose_sinks().unwrap();
        let dims: Vec<Nat> = d.finite_summands.iter().map(|(_, n)| n.clone()).collect();
        assert_eq!(dims, vec![nat(3), nat(5), nat(7)]);
        assert!(d.residual.vertices().is_empty());
    }

    #[test]
    fn edge_matrix_follows_range_equals_source() {
        // v -e-> w -f-> x with a loop g at x.
        let g = graph(
            "chain_loop",
            &["v", "w", "x"],
            &[("e", "v", "w"), ("f", "w", "x"), ("g", "x", "x")],
        );
        let m = g.edge_matrix().unwrap();
        assert!(m.has("e", "f"));
        assert!(m.has("f", "g"));
        assert!(m.has("g", "g"));
        assert!(!m.has("e", "g"));
        assert!(!m.has("f", "e"));
    }

    #[test]
    fn parallel_edges_give_identical_matrix_rows() {
        let g = graph(
            "parallel",
            &["v", "w", "x"],
            &[
                ("e", "v", "w"),
                ("e2", "v", "w"),
                ("f", "w", "x"),
                ("g", "x", "x"),
            ],
        );
        let m = g.edge_matrix().unwrap();
        assert!(m.has("e", "f"));
        assert!(m.has("e2", "f"));
        assert_eq!(m.row("e"), m.row("e2"));
    }

    #[test]
    fn edge_matrix_refuses_sinks() {
        let g = graph("sink", &["v", "w"], &[("e", "v", "w")]);
        assert!(matches!(g.edge_matrix(), Err(Error::SinkPresent(_))));
    }
}
