//! From a diagram to an ultragraph presentation.
//!
//! A diagram vertex `v` with delta value `D = d_v - sum (d_src - 1)` over its
//! incoming edges contributes vertices `v_1, ..., v_{D-1}`, each emitting one
//! ultraedge. For `i >= 2` the edge at `v_i` ranges over `{v_{i-1}}`. The
//! edge at `v_1` ranges over the next level according to an injection that
//! labels every incoming edge of a vertex `w` with a distinct slot in
//! `0..D_w`: slot `k >= 1` contributes the vertex `w_k` directly, and slot
//! `0` (allowed only when `d_w` equals its incoming weight, on an edge whose
//! source sends a double edge to `w`) splices in the range of `w_1`'s own
//! edge, recursively. Truncation leaves the unresolvable remainders as
//! symbolic tails.
//!
//! Simulating the finite-dimensional tower of the result and comparing it
//! with the input diagram is the verification loop in [`crate::tower`].

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diagram::BratteliDiagram;
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::ultragraph::{RangeSet, Ultraedge, Ultragraph};
use crate::Nat;

/// Largest group size a single diagram vertex may contribute.
const GROUP_CAP: u64 = 1 << 20;

/// Per-vertex delta values `d_v - sum (d_src - 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaTable {
    values: BTreeMap<String, Nat>,
}

impl DeltaTable {
    pub fn get(&self, vertex: &str) -> Option<&Nat> {
        self.values.get(vertex)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Nat)> {
        self.values.iter()
    }
}

/// Computes the delta table. Requires the realization hypotheses (all labels
/// at least 2; strict growth or a double edge into every non-source), which
/// guarantee every delta is at least 2.
pub fn compute_deltas(d: &BratteliDiagram) -> Result<DeltaTable> {
    if let Err(v) = d.satisfies_realization_conditions() {
        return Err(Error::ConditionViolated {
            vertex: v.vertex.unwrap_or_default(),
            message: v.message,
        });
    }
    let mut values = BTreeMap::new();
    for (n, level) in d.levels().iter().enumerate() {
        for (j, vertex) in level.vertices.iter().enumerate() {
            let delta = if n == 0 {
                vertex.dim.clone()
            } else {
                let m = d.matrix(n - 1);
                let weight = &m.incoming_weight(&d.level(n - 1).dims())[j];
                let edges = m.col_edge_count(j);
                // d + |E1 v| - sum d_src, grouped to stay nonnegative.
                (&vertex.dim + edges) - weight
            };
            debug_assert!(delta >= Nat::from(2u32));
            values.insert(vertex.id.clone(), delta);
        }
    }
    Ok(DeltaTable { values })
}

/// The slot assignment for one target vertex: every incoming parallel edge
/// `(source position, copy)` paired with its slot.
pub type SlotRow = Vec<(usize, u64, u64)>;

/// Slot assignments for every non-source vertex, keyed by
/// `(level, position)` of the target.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InjectionTable {
    slots: BTreeMap<(usize, usize), SlotRow>,
}

impl InjectionTable {
    pub fn new(slots: BTreeMap<(usize, usize), SlotRow>) -> Self {
        InjectionTable { slots }
    }

    pub fn row(&self, level: usize, target: usize) -> Option<&SlotRow> {
        self.slots.get(&(level, target))
    }

    pub fn rows(&self) -> impl Iterator<Item = (&(usize, usize), &SlotRow)> {
        self.slots.iter()
    }

    pub fn insert(&mut self, level: usize, target: usize, row: SlotRow) {
        self.slots.insert((level, target), row);
    }
}

fn small(n: &Nat, what: &str, vertex: &str) -> Result<u64> {
    n.to_u64().ok_or_else(|| Error::DeltaTooLarge {
        vertex: vertex.to_string(),
        delta: format!("{what} {n}"),
    })
}

/// All incoming parallel edges of the vertex at `(level, j)`, ordered by
/// source canonical order then copy number.
fn incoming_instances(d: &BratteliDiagram, level: usize, j: usize) -> Result<Vec<(usize, u64)>> {
    let m = d.matrix(level - 1);
    let mut out = Vec::new();
    for i in 0..m.rows() {
        let mult = small(m.get(i, j), "multiplicity", &d.level(level).vertices[j].id)?;
        for c in 0..mult {
            out.push((i, c));
        }
    }
    Ok(out)
}

/// The deterministic assignment: incoming edges take slots `1, 2, ...` in
/// canonical order; in the equality case the first edge whose source sends a
/// double edge takes slot `0` and the rest follow in order.
pub fn assign_injections(d: &BratteliDiagram, deltas: &DeltaTable) -> Result<InjectionTable> {
    build_injections(d, deltas, None)
}

/// A uniformly random valid assignment, for testing that the recovered
/// diagram does not depend on the choice.
pub fn assign_injections_seeded(
    d: &BratteliDiagram,
    deltas: &DeltaTable,
    seed: u64,
) -> Result<InjectionTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    build_injections(d, deltas, Some(&mut rng))
}

fn build_injections(
    d: &BratteliDiagram,
    deltas: &DeltaTable,
    mut rng: Option<&mut ChaCha8Rng>,
) -> Result<InjectionTable> {
    let mut table = InjectionTable::default();
    let two = Nat::from(2u32);
    for n in 1..d.depth() {
        let m = d.matrix(n - 1);
        for (j, vertex) in d.level(n).vertices.iter().enumerate() {
            let instances = incoming_instances(d, n, j)?;
            if instances.is_empty() {
                continue; // a mid-level source: no slots to assign
            }
            let delta = small(deltas.get(&vertex.id).unwrap(), "delta", &vertex.id)?;
            let slack_zero = d.slack_at(n)[j].as_ref().is_some_and(Nat::is_zero);
            let mut row: SlotRow = Vec::with_capacity(instances.len());
            if slack_zero {
                // Bijection onto 0..delta with 0 on a double-edge source.
                debug_assert_eq!(delta, instances.len() as u64);
                let zero_candidates: Vec<usize> = instances
                    .iter()
                    .enumerate()
                    .filter(|(_, (i, _))| *m.get(*i, j) >= two)
                    .map(|(pos, _)| pos)
                    .collect();
                let zero_pos = match rng.as_deref_mut() {
                    None => *zero_candidates.first().ok_or_else(|| {
                        Error::BadInjection(format!(
                            "vertex {} needs a double edge for the equality case",
                            vertex.id
                        ))
                    })?,
                    Some(r) => *zero_candidates
                        .get(r.random_range(0..zero_candidates.len().max(1)))
                        .ok_or_else(|| {
                            Error::BadInjection(format!(
                                "vertex {} needs a double edge for the equality case",
                                vertex.id
                            ))
                        })?,
                };
                let mut labels: Vec<u64> = (1..delta).collect();
                if let Some(r) = rng.as_deref_mut() {
                    labels.shuffle(r);
                }
                let mut next = labels.into_iter();
                for (pos, (i, c)) in instances.iter().enumerate() {
                    let k = if pos == zero_pos {
                        0
                    } else {
                        next.next().expect("bijection size")
                    };
                    row.push((*i, *c, k));
                }
            } else {
                // Strict growth: choose distinct labels from 1..delta.
                let count = instances.len() as u64;
                debug_assert!(delta > count);
                let labels: Vec<u64> = match rng.as_deref_mut() {
                    None => (1..=count).collect(),
                    Some(r) => {
                        let mut all: Vec<u64> = (1..delta).collect();
                        all.shuffle(r);
                        all.truncate(count as usize);
                        all
                    }
                };
                for ((i, c), k) in instances.iter().zip(labels) {
                    row.push((*i, *c, k));
                }
            }
            table.insert(n, j, row);
        }
    }
    Ok(table)
}

/// Checks a (possibly hand-written) table against the injection rules.
pub fn validate_injections(
    d: &BratteliDiagram,
    deltas: &DeltaTable,
    table: &InjectionTable,
) -> Result<()> {
    let two = Nat::from(2u32);
    for n in 1..d.depth() {
        let m = d.matrix(n - 1);
        for (j, vertex) in d.level(n).vertices.iter().enumerate() {
            let instances = incoming_instances(d, n, j)?;
            if instances.is_empty() {
                continue;
            }
            let row = table.row(n, j).ok_or_else(|| {
                Error::BadInjection(format!("no slots assigned at vertex {}", vertex.id))
            })?;
            let mut covered: BTreeSet<(usize, u64)> = BTreeSet::new();
            let mut used: BTreeSet<u64> = BTreeSet::new();
            let delta = small(deltas.get(&vertex.id).unwrap(), "delta", &vertex.id)?;
            let slack_zero = d.slack_at(n)[j].as_ref().is_some_and(Nat::is_zero);
            for (i, c, k) in row {
                if !covered.insert((*i, *c)) {
                    return Err(Error::BadInjection(format!(
                        "edge copy assigned twice at vertex {}",
                        vertex.id
                    )));
                }
                if !used.insert(*k) {
                    return Err(Error::BadInjection(format!(
                        "slot {k} used twice at vertex {}",
                        vertex.id
                    )));
                }
                if *k >= delta {
                    return Err(Error::BadInjection(format!(
                        "slot {k} out of range at vertex {} (delta {delta})",
                        vertex.id
                    )));
                }
                if *k == 0 {
                    if !slack_zero {
                        return Err(Error::BadInjection(format!(
                            "slot 0 used at vertex {} although its dimension strictly dominates",
                            vertex.id
                        )));
                    }
                    if *m.get(*i, j) < two {
                        return Err(Error::BadInjection(format!(
                            "slot 0 at vertex {} sits on a single edge from {}",
                            vertex.id,
                            d.level(n - 1).vertices[*i].id
                        )));
                    }
                }
            }
            if covered.len() != instances.len() {
                return Err(Error::BadInjection(format!(
                    "not every incoming edge of {} is assigned",
                    vertex.id
                )));
            }
            if slack_zero && !used.contains(&0) {
                return Err(Error::BadInjection(format!(
                    "vertex {} has zero slack, so slot 0 must be used",
                    vertex.id
                )));
            }
        }
    }
    Ok(())
}

/// How [`build_ultragraph`] picks the injection table.
#[derive(Debug, Clone)]
pub enum InjectionChoice {
    /// The deterministic canonical-order rule.
    Deterministic,
    /// A caller-supplied table (validated first).
    Provided(InjectionTable),
    /// A random valid table from the given seed.
    Seeded(u64),
}

/// An ultragraph together with the data it was built from, so verification
/// runs are replayable with nothing re-derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizedUltragraph {
    ultragraph: Ultragraph,
    diagram: BratteliDiagram,
    deltas: DeltaTable,
    injections: InjectionTable,
    /// Ultragraph vertex to (diagram vertex, index within the group).
    group: BTreeMap<String, (String, u64)>,
    depth: usize,
}

impl RealizedUltragraph {
    pub fn ultragraph(&self) -> &Ultragraph {
        &self.ultragraph
    }

    /// The unrolled diagram truncation the realization was built from.
    pub fn diagram(&self) -> &BratteliDiagram {
        &self.diagram
    }

    pub fn deltas(&self) -> &DeltaTable {
        &self.deltas
    }

    pub fn injections(&self) -> &InjectionTable {
        &self.injections
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn group_of(&self, ultra_vertex: &str) -> Option<&(String, u64)> {
        self.group.get(ultra_vertex)
    }

    /// Replays a serialized realization: rebuilds the ultragraph from the
    /// source diagram and injection table and checks that it reproduces
    /// `body` exactly (and that the recorded deltas match). Used by the text
    /// format so stored provenance is honest.
    pub fn reassemble(
        diagram: BratteliDiagram,
        injections: InjectionTable,
        body: &Ultragraph,
        recorded_deltas: BTreeMap<String, Nat>,
    ) -> Result<RealizedUltragraph> {
        let report = diagram.validate();
        if !report.is_valid() {
            return Err(Error::other(format!("source diagram is invalid: {report}")));
        }
        let deltas = compute_deltas(&diagram)?;
        for (id, recorded) in &recorded_deltas {
            match deltas.get(id) {
                Some(actual) if actual == recorded => {}
                Some(actual) => {
                    return Err(Error::other(format!(
                        "recorded delta {recorded} at {id} does not match the recomputed {actual}"
                    )))
                }
                None => return Err(Error::other(format!("delta recorded for unknown vertex {id}"))),
            }
        }
        validate_injections(&diagram, &deltas, &injections)?;
        let mut rebuilt = realize_with(&diagram, deltas, injections)?;
        if rebuilt.ultragraph.vertices() != body.vertices()
            || rebuilt.ultragraph.edges() != body.edges()
        {
            return Err(Error::other(
                "provenance does not reproduce the stored ultragraph",
            ));
        }
        rebuilt.ultragraph.set_name(body.name());
        Ok(rebuilt)
    }

    /// The ultragraph with every unresolved edge dropped and its source
    /// marked as boundary: the largest fully resolved truncation.
    pub fn resolved_truncation(&self) -> Result<Ultragraph> {
        let mut boundary = self.ultragraph.explicit_boundary().clone();
        let mut edges = Vec::new();
        for e in self.ultragraph.edges() {
            if e.range.is_fully_resolved() {
                edges.push(e.clone());
            } else {
                boundary.insert(e.source.clone());
            }
        }
        Ultragraph::new(
            format!("{}.resolved", self.ultragraph.name()),
            self.ultragraph.vertices().to_vec(),
            boundary,
            edges,
            None,
        )
    }
}

/// Builds the ultragraph of `d` materialized to `depth` diagram levels.
pub fn build_ultragraph(
    d: &BratteliDiagram,
    depth: usize,
    choice: InjectionChoice,
) -> Result<RealizedUltragraph> {
    if depth < 2 {
        return Err(Error::other("realization needs depth >= 2"));
    }
    let work = d.unroll(depth.min(d.depth()).max(2))?;
    let work = if depth > work.depth() {
        d.unroll(depth)?
    } else {
        work
    };
    if let Err(v) = work.satisfies_realization_conditions() {
        return Err(Error::ConditionViolated {
            vertex: v.vertex.unwrap_or_default(),
            message: v.message,
        });
    }
    let deltas = compute_deltas(&work)?;
    let injections = match choice {
        InjectionChoice::Deterministic => assign_injections(&work, &deltas)?,
        InjectionChoice::Seeded(seed) => assign_injections_seeded(&work, &deltas, seed)?,
        InjectionChoice::Provided(table) => {
            validate_injections(&work, &deltas, &table)?;
            table
        }
    };
    realize_with(&work, deltas, injections)
}

fn realize_with(
    work: &BratteliDiagram,
    deltas: DeltaTable,
    injections: InjectionTable,
) -> Result<RealizedUltragraph> {
    let depth = work.depth();
    let mut vertices = Vec::new();
    let mut group = BTreeMap::new();
    let mut group_sizes: Vec<Vec<u64>> = Vec::new();
    for level in work.levels() {
        let mut sizes = Vec::new();
        for v in &level.vertices {
            let delta = small(deltas.get(&v.id).unwrap(), "delta", &v.id)?;
            if delta > GROUP_CAP {
                return Err(Error::DeltaTooLarge {
                    vertex: v.id.clone(),
                    delta: delta.to_string(),
                });
            }
            for i in 1..delta {
                let id = format!("{}_{}", v.id, i);
                group.insert(id.clone(), (v.id.clone(), i));
                vertices.push(id);
            }
            sizes.push(delta - 1);
        }
        group_sizes.push(sizes);
    }

    // One-step range data for each v_1: direct slots (target, k >= 1) and
    // the recursion targets of slot-0 edges.
    let mut direct: Vec<Vec<Vec<(usize, u64)>>> = Vec::new();
    let mut splice: Vec<Vec<Vec<usize>>> = Vec::new();
    for n in 0..depth {
        let width = work.level(n).width();
        direct.push(vec![Vec::new(); width]);
        splice.push(vec![Vec::new(); width]);
    }
    for (&(n, j), row) in injections.rows() {
        for &(i, _copy, k) in row {
            if k == 0 {
                splice[n - 1][i].push(j);
            } else {
                direct[n - 1][i].push((j, k));
            }
        }
    }

    // Resolve the v_1 ranges from the deepest level backward.
    let vertex_name = |n: usize, j: usize, i: u64| format!("{}_{}", work.level(n).vertices[j].id, i);
    let edge_name = |n: usize, j: usize, i: u64| format!("e_{}_{}", work.level(n).vertices[j].id, i);
    let mut head_ranges: Vec<Vec<RangeSet>> = Vec::new();
    for n in (0..depth).rev() {
        let width = work.level(n).width();
        let mut level_ranges = Vec::with_capacity(width);
        for j in 0..width {
            if n + 1 == depth {
                level_ranges.push(RangeSet::new(
                    BTreeSet::new(),
                    None,
                    [edge_name(n, j, 1)].into(),
                ));
                continue;
            }
            let mut resolved: BTreeSet<String> = BTreeSet::new();
            let mut tails: BTreeSet<String> = BTreeSet::new();
            for &(w, k) in &direct[n][j] {
                let name = vertex_name(n + 1, w, k);
                if !resolved.insert(name) {
                    return Err(Error::other(format!(
                        "range pieces overlap at {}",
                        vertex_name(n + 1, w, k)
                    )));
                }
            }
            for &w in &splice[n][j] {
                // head_ranges is filled back to front: position 0 holds the
                // deepest level processed so far.
                let deeper: &RangeSet = &head_ranges[0][w];
                for v in deeper.resolved() {
                    if !resolved.insert(v.clone()) {
                        return Err(Error::other(format!("range pieces overlap at {v}")));
                    }
                }
                tails.extend(deeper.tails().iter().cloned());
            }
            if resolved.is_empty() && tails.is_empty() {
                return Err(Error::other(format!(
                    "empty realized range at {}",
                    vertex_name(n, j, 1)
                )));
            }
            level_ranges.push(RangeSet::new(resolved, None, tails));
        }
        head_ranges.insert(0, level_ranges);
    }

    let mut edges = Vec::new();
    for n in 0..depth {
        for (j, _v) in work.level(n).vertices.iter().enumerate() {
            let size = group_sizes[n][j];
            for i in 1..=size {
                let range = if i == 1 {
                    head_ranges[n][j].clone()
                } else {
                    RangeSet::vertices([vertex_name(n, j, i - 1)])
                };
                edges.push(Ultraedge {
                    id: edge_name(n, j, i),
                    source: vertex_name(n, j, i),
                    range,
                });
            }
        }
    }
    let ultragraph = Ultragraph::new(
        format!("{}.realized", work.name()),
        vertices,
        BTreeSet::new(),
        edges,
        None,
    )?;
    ultragraph.source_bijective()?;
    Ok(RealizedUltragraph {
        ultragraph,
        diagram: work.clone(),
        deltas,
        injections,
        group,
        depth,
    })
}

/// The row-finite specialization: under strict growth every slot is at least
/// 1, every range resolves into the very next level, and expanding the
/// ultragraph gives a row-finite graph with no sinks and no cycles. The
/// final level's head vertices become boundary vertices of the graph.
pub fn realize_row_finite(
    d: &BratteliDiagram,
    depth: usize,
    choice: InjectionChoice,
) -> Result<(RealizedUltragraph, DirectedGraph)> {
    let probe = d.unroll(depth.min(d.depth()).max(2))?;
    if let Err(v) = probe.satisfies_strict_growth() {
        return Err(Error::ConditionViolated {
            vertex: v.vertex.unwrap_or_default(),
            message: v.message,
        });
    }
    let realized = build_ultragraph(d, depth, choice)?;
    let graph = realized.resolved_truncation()?.expand()?;
    Ok((realized, graph))
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::diagram::testutil::diagram;
    use crate::diagram::{BratteliDiagram, DiagVertex, Level, MultMatrix};
    use crate::nat;

    /// The worked three-level example: sources (2,2,3), middle (8,7), top
    /// (9,22,16), with the edge pattern e,e',e'' / f,f',f'' / g,h,k / h',h''
    /// / k'.
    pub fn worked_example() -> BratteliDiagram {
        let levels = vec![
            Level::new(vec![
                DiagVertex::new("s", nat(2)),
                DiagVertex::new("t", nat(2)),
                DiagVertex::new("u", nat(3)),
            ]),
            Level::new(vec![
                DiagVertex::new("v", nat(8)),
                DiagVertex::new("w", nat(7)),
            ]),
            Level::new(vec![
                DiagVertex::new("x", nat(9)),
                DiagVertex::new("y", nat(22)),
                DiagVertex::new("z", nat(16)),
            ]),
        ];
        let mut m0 = MultMatrix::zero(3, 2);
        m0.set(0, 0, nat(1)); // e: s -> v
        m0.set(1, 0, nat(2)); // e', e'': t -> v
        m0.set(1, 1, nat(2)); // f, f': t -> w
        m0.set(2, 1, nat(1)); // f'': u -> w
        let mut m1 = MultMatrix::zero(2, 3);
        m1.set(0, 0, nat(1)); // g: v -> x
        m1.set(0, 1, nat(1)); // h: v -> y
        m1.set(0, 2, nat(1)); // k: v -> z
        m1.set(1, 1, nat(2)); // h', h'': w -> y
        m1.set(1, 2, nat(1)); // k': w -> z
        BratteliDiagram::new("worked_example", levels, vec![m0, m1], None).unwrap()
    }

    /// The injection choices printed in the worked example.
    pub fn worked_example_injections() -> InjectionTable {
        let mut t = InjectionTable::default();
        // Level 2 targets: v (position 0), w (position 1).
        // Incoming of v: (s#0) = e, (t#0) = e', (t#1) = e''.
        t.insert(1, 0, vec![(0, 0, 1), (1, 0, 3), (1, 1, 4)]);
        // Incoming of w: (t#0) = f, (t#1) = f', (u#0) = f''.
        t.insert(1, 1, vec![(1, 0, 0), (1, 1, 2), (2, 0, 1)]);
        // Level 3 targets: x, y, z.
        t.insert(2, 0, vec![(0, 0, 1)]); // k_x(g) = 1
        t.insert(2, 1, vec![(0, 0, 1), (1, 0, 0), (1, 1, 2)]); // h, h', h''
        t.insert(2, 2, vec![(0, 0, 2), (1, 0, 1)]); // k, k'
        t
    }

    /// A single-source chain 2 ->(x2) 4 ->(x2) 8.
    pub fn doubling_chain() -> BratteliDiagram {
        diagram(
            "doubling",
            &[&[2], &[4], &[8]],
            &[(0, 0, 0, 2), (1, 0, 0, 2)],
            None,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::testutil::{doubling_chain, worked_example, worked_example_injections};
    use super::*;
    use crate::graph::CycleAnswer;
    use crate::nat;

    #[test]
    fn worked_example_deltas() {
        let d = worked_example();
        let deltas = compute_deltas(&d).unwrap();
        let expect = [
            ("s", 2u64),
            ("t", 2),
            ("u", 3),
            ("v", 5),
            ("w", 3),
            ("x", 2),
            ("y", 3),
            ("z", 3),
        ];
        for (id, want) in expect {
            assert_eq!(deltas.get(id), Some(&nat(want)), "delta at {id}");
        }
    }

    #[test]
    fn source_vertices_take_their_dimension_as_delta() {
        let d = doubling_chain();
        let deltas = compute_deltas(&d).unwrap();
        assert_eq!(deltas.get("v1_0"), Some(&nat(2)));
    }

    #[test]
    fn worked_example_ranges_with_the_papers_choice_of_injections() {
        let d = worked_example();
        let table = worked_example_injections();
        let realized =
            build_ultragraph(&d, 3, InjectionChoice::Provided(table)).unwrap();
        let u = realized.ultragraph();

        let range = |edge: &str| {
            let e = u.edge(edge).unwrap_or_else(|| panic!("edge {edge}"));
            (
                e.range.resolved().iter().cloned().collect::<Vec<_>>(),
                e.range.tails().iter().cloned().collect::<Vec<_>>(),
            )
        };
        assert_eq!(range("e_s_1"), (vec!["v_1".to_string()], vec![]));
        assert_eq!(range("e_u_1"), (vec!["w_1".to_string()], vec![]));
        assert_eq!(
            range("e_v_1"),
            (
                vec!["x_1".to_string(), "y_1".to_string(), "z_2".to_string()],
                vec![]
            )
        );
        assert_eq!(
            range("e_w_1"),
            (
                vec!["y_2".to_string(), "z_1".to_string()],
                vec!["e_y_1".to_string()]
            )
        );
        assert_eq!(
            range("e_t_1"),
            (
                vec![
                    "v_3".to_string(),
                    "v_4".to_string(),
                    "w_2".to_string(),
                    "y_2".to_string(),
                    "z_1".to_string()
                ],
                vec!["e_y_1".to_string()]
            )
        );
        // Group edges point one step down.
        assert_eq!(range("e_v_4"), (vec!["v_3".to_string()], vec![]));
        assert_eq!(range("e_u_2"), (vec!["u_1".to_string()], vec![]));
    }

    #[test]
    fn worked_example_vertex_set() {
        let d = worked_example();
        let realized = build_ultragraph(&d, 3, InjectionChoice::Deterministic).unwrap();
        let expected = [
            "s_1", "t_1", "u_1", "u_2", "v_1", "v_2", "v_3", "v_4", "w_1", "w_2", "x_1", "y_1",
            "y_2", "z_1", "z_2",
        ];
        assert_eq!(
            realized.ultragraph().vertices(),
            expected.map(String::from).as_slice()
        );
        realized.ultragraph().source_bijective().unwrap();
    }

    #[test]
    fn deterministic_injections_validate() {
        let d = worked_example();
        let deltas = compute_deltas(&d).unwrap();
        let table = assign_injections(&d, &deltas).unwrap();
        validate_injections(&d, &deltas, &table).unwrap();
    }

    #[test]
    fn seeded_injections_validate_across_seeds() {
        let d = worked_example();
        let deltas = compute_deltas(&d).unwrap();
        for seed in 0..20 {
            let table = assign_injections_seeded(&d, &deltas, seed).unwrap();
            validate_injections(&d, &deltas, &table).unwrap();
        }
    }

    #[test]
    fn corrupt_injection_tables_are_rejected() {
        let d = worked_example();
        let deltas = compute_deltas(&d).unwrap();
        // Slot 0 on a single-multiplicity edge: f'' comes alone from u.
        let mut bad = worked_example_injections();
        bad.insert(1, 1, vec![(1, 0, 2), (1, 1, 1), (2, 0, 0)]);
        match validate_injections(&d, &deltas, &bad) {
            Err(Error::BadInjection(msg)) => assert!(msg.contains("single edge"), "{msg}"),
            other => panic!("expected a rejection, got {other:?}"),
        }
        // Slot 0 at a strictly growing vertex.
        let mut bad = worked_example_injections();
        bad.insert(1, 0, vec![(0, 0, 0), (1, 0, 3), (1, 1, 4)]);
        assert!(validate_injections(&d, &deltas, &bad).is_err());
        // A repeated slot.
        let mut bad = worked_example_injections();
        bad.insert(2, 2, vec![(0, 0, 1), (1, 0, 1)]);
        assert!(validate_injections(&d, &deltas, &bad).is_err());
    }

    #[test]
    fn doubling_chain_ranges_match_hand_expansion() {
        // Deltas (2, 2, 2): one vertex per level. Every slack is zero, so
        // each step puts slot 0 on the first double-edge copy and slot 1 on
        // the second; the head ranges chain through the slot-0 splices:
        // r(e at level 1) = {level-2 head} + r(e at level 2)
        //                 = {level-2 head, level-3 head} + unresolved tail.
        let d = doubling_chain();
        let realized = build_ultragraph(&d, 3, InjectionChoice::Deterministic).unwrap();
        let u = realized.ultragraph();
        assert_eq!(u.vertices().len(), 3);
        let head = u.edge("e_v1_0_1").unwrap();
        assert_eq!(
            head.range.resolved().iter().collect::<Vec<_>>(),
            vec!["v2_0_1", "v3_0_1"]
        );
        assert_eq!(
            head.range.tails().iter().collect::<Vec<_>>(),
            vec!["e_v3_0_1"]
        );
        let mid = u.edge("e_v2_0_1").unwrap();
        assert_eq!(
            mid.range.resolved().iter().collect::<Vec<_>>(),
            vec!["v3_0_1"]
        );
        assert_eq!(
            mid.range.tails().iter().collect::<Vec<_>>(),
            vec!["e_v3_0_1"]
        );
    }

    #[test]
    fn strict_growth_realizes_row_finite_with_clean_scans() {
        let d = crate::diagram::testutil::diagram(
            "strict",
            &[&[2], &[5], &[11], &[23]],
            &[(0, 0, 0, 2), (1, 0, 0, 2), (2, 0, 0, 2)],
            None,
        );
        let (realized, graph) = realize_row_finite(&d, 4, InjectionChoice::Deterministic).unwrap();
        assert!(graph.sinks().is_empty());
        assert!(graph.is_row_finite());
        assert!(!graph.find_cycle().has_cycle());
        // Every resolved range sits in the immediately next level.
        for e in realized.ultragraph().edges() {
            let (src_vertex, src_i) = realized.group_of(&e.source).unwrap();
            let (src_level, _) = realized.diagram().locate(src_vertex).unwrap();
            if *src_i >= 2 {
                continue;
            }
            for v in e.range.resolved() {
                let (tgt_vertex, _) = realized.group_of(v).unwrap();
                let (tgt_level, _) = realized.diagram().locate(tgt_vertex).unwrap();
                assert_eq!(tgt_level, src_level + 1);
            }
        }
    }

    #[test]
    fn realization_refuses_bad_diagrams() {
        let d = crate::diagram::testutil::diagram(
            "flat",
            &[&[2], &[2]],
            &[(0, 0, 0, 1)],
            None,
        );
        assert!(matches!(
            build_ultragraph(&d, 2, InjectionChoice::Deterministic),
            Err(Error::ConditionViolated { .. })
        ));
        assert_eq!(
            worked_example().levels().len(),
            3,
            "sanity: fixture untouched"
        );
    }

    #[test]
    fn ranges_never_point_backward_or_sideways_at_the_head() {
        let d = worked_example();
        let realized = build_ultragraph(&d, 3, InjectionChoice::Seeded(7)).unwrap();
        for e in realized.ultragraph().edges() {
            let (src_vertex, src_i) = realized.group_of(&e.source).unwrap();
            let (src_level, _) = realized.diagram().locate(src_vertex).unwrap();
            for v in e.range.resolved() {
                let (tgt_vertex, _) = realized.group_of(v).unwrap();
                let (tgt_level, _) = realized.diagram().locate(tgt_vertex).unwrap();
                if *src_i == 1 {
                    assert!(tgt_level > src_level, "head ranges point forward");
                } else {
                    assert_eq!(tgt_vertex, src_vertex, "group edges stay inside the group");
                }
            }
        }
        assert_eq!(
            realized.ultragraph().find_cycle(),
            CycleAnswer::AcyclicWithinDepth
        );
    }
}
