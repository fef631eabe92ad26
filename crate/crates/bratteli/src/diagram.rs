//! Leveled diagrams with dimension labels and multiplicity matrices.
//!
//! A stored diagram is always a truncation of an (in general infinite)
//! diagram: the final level's vertices have no outgoing edges and this is
//! waived rather than reported as a sink. An optional [`PeriodicTail`]
//! declares that from some level on, both the multiplicity matrices and the
//! dimension slacks `d_w - sum m[v][w] d_v` repeat with a fixed period, which
//! is enough to encode diagrams like constant chains, UHF towers, and
//! strictly growing towers exactly.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::Nat;

/// One vertex of a level: an identifier and its dimension label `d_v >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagVertex {
    pub id: String,
    pub dim: Nat,
}

impl DiagVertex {
    pub fn new(id: impl Into<String>, dim: Nat) -> Self {
        DiagVertex { id: id.into(), dim }
    }
}

/// A nonempty, finite level of the diagram. Vertex order is canonical and
/// used for deterministic tie-breaking everywhere downstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub vertices: Vec<DiagVertex>,
}

impl Level {
    pub fn new(vertices: Vec<DiagVertex>) -> Self {
        Level { vertices }
    }

    pub fn width(&self) -> usize {
        self.vertices.len()
    }

    pub fn dims(&self) -> Vec<Nat> {
        self.vertices.iter().map(|v| v.dim.clone()).collect()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }
}

/// Multiplicity matrix between two consecutive levels.
///
/// `entries[i][j]` counts the edges from the `i`-th vertex of the lower level
/// to the `j`-th vertex of the upper level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultMatrix {
    entries: Vec<Vec<Nat>>,
    cols: usize,
}

impl MultMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        MultMatrix {
            entries: vec![vec![Nat::zero(); cols]; rows],
            cols,
        }
    }

    pub fn from_rows(entries: Vec<Vec<Nat>>) -> Result<Self> {
        let cols = entries.first().map(|r| r.len()).unwrap_or(0);
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::other("ragged multiplicity matrix"));
        }
        Ok(MultMatrix { entries, cols })
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Nat {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Nat) {
        self.entries[i][j] = value;
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: &Nat) {
        self.entries[i][j] += value;
    }

    pub fn row(&self, i: usize) -> &[Nat] {
        &self.entries[i]
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.entries[i].iter().all(Nat::is_zero)
    }

    pub fn col_is_zero(&self, j: usize) -> bool {
        self.entries.iter().all(|r| r[j].is_zero())
    }

    /// Number of edges into column `j`, counted with multiplicity.
    pub fn col_edge_count(&self, j: usize) -> Nat {
        self.entries.iter().map(|r| r[j].clone()).sum()
    }

    /// Matrix product: paths through the middle level are counted by
    /// multiplying step multiplicities and summing over midpoints.
    pub fn multiply(&self, other: &MultMatrix) -> MultMatrix {
        assert_eq!(self.cols, other.rows(), "matrix shape mismatch");
        let mut out = MultMatrix::zero(self.rows(), other.cols());
        for i in 0..self.rows() {
            for k in 0..self.cols {
                let m = &self.entries[i][k];
                if m.is_zero() {
                    continue;
                }
                for j in 0..other.cols() {
                    let n = &other.entries[k][j];
                    if n.is_zero() {
                        continue;
                    }
                    let add = m * n;
                    out.entries[i][j] += add;
                }
            }
        }
        out
    }

    /// Weighted column sums `sum_i entries[i][j] * dims[i]`: the total
    /// dimension arriving at each upper vertex.
    pub fn incoming_weight(&self, dims: &[Nat]) -> Vec<Nat> {
        assert_eq!(dims.len(), self.rows());
        (0..self.cols)
            .map(|j| {
                self.entries
                    .iter()
                    .zip(dims)
                    .map(|(row, d)| &row[j] * d)
                    .sum()
            })
            .collect()
    }

    pub fn identity(n: usize) -> MultMatrix {
        let mut m = MultMatrix::zero(n, n);
        for i in 0..n {
            m.entries[i][i] = Nat::from(1u32);
        }
        m
    }
}

impl fmt::Display for MultMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Declares that from level `from` (0-based) on, the matrices and dimension
/// slacks repeat with the given period. The explicit part must contain levels
/// `from ..= from + period`, which pin down one full period of steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicTail {
    pub from: usize,
    pub period: usize,
}

/// One repeating step of a periodic tail: the multiplicity matrix together
/// with the per-vertex slack `d_w - sum m[v][w] d_v` of the target level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailStep {
    pub matrix: MultMatrix,
    pub slack: Vec<Nat>,
}

/// A single invariant violation with coordinates, as reported by
/// [`BratteliDiagram::validate`]. Levels are 1-based in messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub level: usize,
    pub vertex: Option<String>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.vertex {
            Some(v) => write!(f, "level {} vertex {}: {}", self.level, v, self.message),
            None => write!(f, "level {}: {}", self.level, self.message),
        }
    }
}

/// Outcome of validation: all violations found, plus a note when the final
/// level's no-sink requirement was waived as a truncation boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub boundary_waived: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            write!(f, "valid")?;
            if self.boundary_waived {
                write!(f, " (truncation boundary at the final level)")?;
            }
        } else {
            for (i, v) in self.violations.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

/// A truncated Bratteli diagram: nonempty levels, one multiplicity matrix per
/// consecutive level pair, and an optional periodic tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BratteliDiagram {
    name: String,
    levels: Vec<Level>,
    matrices: Vec<MultMatrix>,
    tail: Option<PeriodicTail>,
}

impl BratteliDiagram {
    /// Builds a diagram after checking the structural shape: matrix sizes
    /// must match level widths and a tail must fit inside the explicit part.
    /// Value-level invariants are the business of [`validate`].
    ///
    /// [`validate`]: BratteliDiagram::validate
    pub fn new(
        name: impl Into<String>,
        levels: Vec<Level>,
        matrices: Vec<MultMatrix>,
        tail: Option<PeriodicTail>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::other("diagram must have at least one level"));
        }
        if matrices.len() + 1 != levels.len() {
            return Err(Error::other(format!(
                "expected {} multiplicity matrices for {} levels, got {}",
                levels.len() - 1,
                levels.len(),
                matrices.len()
            )));
        }
        for (n, m) in matrices.iter().enumerate() {
            if m.rows() != levels[n].width() || m.cols() != levels[n + 1].width() {
                return Err(Error::other(format!(
                    "matrix between levels {} and {} has shape {}x{}, expected {}x{}",
                    n + 1,
                    n + 2,
                    m.rows(),
                    m.cols(),
                    levels[n].width(),
                    levels[n + 1].width()
                )));
            }
        }
        if let Some(t) = tail {
            if t.period == 0 {
                return Err(Error::other("tail period must be positive"));
            }
            if t.from + t.period >= levels.len() {
                return Err(Error::other(format!(
                    "periodic tail needs explicit levels {}..={}, but only {} are stored",
                    t.from + 1,
                    t.from + t.period + 1,
                    levels.len()
                )));
            }
            if levels[t.from].width() != levels[t.from + t.period].width() {
                return Err(Error::other(
                    "periodic tail is not shape-compatible: period start and end widths differ",
                ));
            }
        }
        Ok(BratteliDiagram {
            name: name.into(),
            levels,
            matrices,
            tail,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    /// Number of explicitly stored levels.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &Level {
        &self.levels[n]
    }

    pub fn matrices(&self) -> &[MultMatrix] {
        &self.matrices
    }

    /// Matrix between levels `n` and `n + 1` (0-based).
    pub fn matrix(&self, n: usize) -> &MultMatrix {
        &self.matrices[n]
    }

    pub fn tail(&self) -> Option<PeriodicTail> {
        self.tail
    }

    pub fn has_tail(&self) -> bool {
        self.tail.is_some()
    }

    pub fn total_vertices(&self) -> usize {
        self.levels.iter().map(Level::width).sum()
    }

    /// Per-vertex slack at level `n >= 1`: `d_v - sum_{e in E1 v} d_src(e)`.
    /// `None` marks a vertex whose incoming weight exceeds its dimension,
    /// i.e. a dimension-inequality violation.
    pub fn slack_at(&self, n: usize) -> Vec<Option<Nat>> {
        assert!(n >= 1 && n < self.levels.len());
        let weights = self.matrices[n - 1].incoming_weight(&self.levels[n - 1].dims());
        self.levels[n]
            .vertices
            .iter()
            .zip(weights)
            .map(|(v, w)| if v.dim >= w { Some(&v.dim - &w) } else { None })
            .collect()
    }

    /// The repeating steps of the tail, read off the explicit levels.
    /// Step `k` goes from phase `k` to phase `k + 1`.
    pub fn tail_steps(&self) -> Option<Vec<TailStep>> {
        let t = self.tail?;
        let mut steps = Vec::with_capacity(t.period);
        for k in 0..t.period {
            let src = t.from + k;
            let slack = self
                .slack_at(src + 1)
                .into_iter()
                .map(|s| s.unwrap_or_else(Nat::zero))
                .collect();
            steps.push(TailStep {
                matrix: self.matrices[src].clone(),
                slack,
            });
        }
        Some(steps)
    }

    /// Checks every stored invariant and reports each violation with
    /// coordinates. An empty report means the value is a valid truncation.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for (n, level) in self.levels.iter().enumerate() {
            if level.vertices.is_empty() {
                violations.push(Violation {
                    level: n + 1,
                    vertex: None,
                    message: "level is empty".into(),
                });
                continue;
            }
            for v in &level.vertices {
                if !seen.insert(&v.id) {
                    violations.push(Violation {
                        level: n + 1,
                        vertex: Some(v.id.clone()),
                        message: "duplicate vertex id".into(),
                    });
                }
                if v.dim.is_zero() {
                    violations.push(Violation {
                        level: n + 1,
                        vertex: Some(v.id.clone()),
                        message: "dimension must be >= 1".into(),
                    });
                }
            }
        }
        // No sinks except at the truncation boundary.
        for n in 0..self.matrices.len() {
            for (i, v) in self.levels[n].vertices.iter().enumerate() {
                if self.matrices[n].row_is_zero(i) {
                    violations.push(Violation {
                        level: n + 1,
                        vertex: Some(v.id.clone()),
                        message: "vertex has no outgoing edge".into(),
                    });
                }
            }
        }
        // Dimension inequality d_v >= sum of incoming source dimensions.
        for n in 1..self.levels.len() {
            for (j, (v, slack)) in self.levels[n]
                .vertices
                .iter()
                .zip(self.slack_at(n))
                .enumerate()
            {
                if slack.is_none() {
                    let weight = &self.matrices[n - 1].incoming_weight(&self.levels[n - 1].dims())[j];
                    violations.push(Violation {
                        level: n + 1,
                        vertex: Some(v.id.clone()),
                        message: format!(
                            "dimension {} is below the incoming weight {}",
                            v.dim, weight
                        ),
                    });
                }
            }
        }
        if let Some(t) = self.tail {
            // Every generated level must stay valid: a target vertex with no
            // incoming edges in its phase needs slack >= 1 to keep d >= 1.
            if let Some(steps) = self.tail_steps() {
                for (k, step) in steps.iter().enumerate() {
                    for j in 0..step.matrix.cols() {
                        if step.matrix.col_is_zero(j) && step.slack[j].is_zero() {
                            let id = &self.levels[t.from + k + 1].vertices[j].id;
                            violations.push(Violation {
                                level: t.from + k + 2,
                                vertex: Some(id.clone()),
                                message: "tail phase generates dimension 0 here".into(),
                            });
                        }
                    }
                    for i in 0..step.matrix.rows() {
                        if step.matrix.row_is_zero(i) {
                            let id = &self.levels[t.from + k].vertices[i].id;
                            violations.push(Violation {
                                level: t.from + k + 1,
                                vertex: Some(id.clone()),
                                message: "tail phase makes this vertex a sink forever".into(),
                            });
                        }
                    }
                }
            }
        }
        ValidationReport {
            violations,
            boundary_waived: self.tail.is_none(),
        }
    }

    /// Materializes the diagram out to `depth` levels. Shrinks by truncation;
    /// grows by unrolling the periodic tail (an error without one). The
    /// result is fully explicit when `depth` differs from the stored depth,
    /// except that growing keeps the tail declaration (it still applies).
    pub fn unroll(&self, depth: usize) -> Result<BratteliDiagram> {
        if depth == 0 {
            return Err(Error::other("cannot unroll to depth 0"));
        }
        if depth <= self.levels.len() {
            let tail = self.tail.filter(|t| t.from + t.period < depth);
            return BratteliDiagram::new(
                self.name.clone(),
                self.levels[..depth].to_vec(),
                self.matrices[..depth - 1].to_vec(),
                tail,
            );
        }
        let t = self.tail.ok_or(Error::DepthExceeded {
            index: depth,
            depth: self.levels.len(),
        })?;
        let steps = self.tail_steps().expect("tail steps exist");
        let mut levels = self.levels.clone();
        let mut matrices = self.matrices.clone();
        while levels.len() < depth {
            let src_idx = levels.len() - 1;
            let phase = (src_idx - t.from) % t.period;
            let step = &steps[phase];
            let dims = levels[src_idx].dims();
            let mut next_dims = step.matrix.incoming_weight(&dims);
            for (d, s) in next_dims.iter_mut().zip(&step.slack) {
                *d += s;
            }
            let template = &self.levels[t.from + phase + 1];
            let vertices = template
                .vertices
                .iter()
                .zip(next_dims)
                .map(|(v, dim)| {
                    let base = v.id.split('~').next().unwrap_or(&v.id);
                    DiagVertex::new(format!("{}~{}", base, src_idx + 2), dim)
                })
                .collect();
            levels.push(Level::new(vertices));
            matrices.push(step.matrix.clone());
        }
        BratteliDiagram::new(self.name.clone(), levels, matrices, self.tail)
    }

    /// Telescopes onto the kept levels (0-based, strictly increasing).
    /// Matrices between consecutive kept levels are the products of the
    /// collapsed steps, i.e. path counts. Indices beyond the stored depth are
    /// reached through the periodic tail when one is declared.
    pub fn telescope(&self, keep: &[usize]) -> Result<BratteliDiagram> {
        if keep.is_empty() || keep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadKeepList);
        }
        let max = *keep.last().unwrap();
        let base = if max < self.levels.len() {
            self.clone()
        } else {
            self.unroll(max + 1)?
        };
        let levels: Vec<Level> = keep.iter().map(|&n| base.levels[n].clone()).collect();
        let mut matrices = Vec::with_capacity(keep.len() - 1);
        for w in keep.windows(2) {
            let mut m = base.matrices[w[0]].clone();
            for n in w[0] + 1..w[1] {
                m = m.multiply(&base.matrices[n]);
            }
            matrices.push(m);
        }
        BratteliDiagram::new(self.name.clone(), levels, matrices, None)
    }

    /// Index of a vertex id: `(level, position)`.
    pub fn locate(&self, id: &str) -> Option<(usize, usize)> {
        for (n, level) in self.levels.iter().enumerate() {
            if let Some(i) = level.index_of(id) {
                return Some((n, i));
            }
        }
        None
    }

    /// True when every vertex has `d >= 2` and every non-first-level vertex
    /// either strictly dominates its incoming weight or receives a double
    /// edge. Diagrams with this property have no nonzero finite-dimensional
    /// quotients and admit the ultragraph realization. With a periodic tail,
    /// the phase steps are required to keep the property at every generated
    /// level.
    pub fn satisfies_realization_conditions(&self) -> std::result::Result<(), Violation> {
        self.check_conditions(false)
    }

    /// True when every vertex has `d >= 2` and strictly dominates its
    /// incoming weight (`d_v > sum d_src`). Diagrams with this property have
    /// no unital quotients and realize as row-finite graphs with no sinks.
    pub fn satisfies_strict_growth(&self) -> std::result::Result<(), Violation> {
        self.check_conditions(true)
    }

    fn check_conditions(&self, strict: bool) -> std::result::Result<(), Violation> {
        let two = Nat::from(2u32);
        for (n, level) in self.levels.iter().enumerate() {
            for v in &level.vertices {
                if v.dim < two {
                    return Err(Violation {
                        level: n + 1,
                        vertex: Some(v.id.clone()),
                        message: "dimension must be >= 2".into(),
                    });
                }
            }
        }
        for n in 1..self.levels.len() {
            let m = &self.matrices[n - 1];
            for (j, (v, slack)) in self.levels[n]
                .vertices
                .iter()
                .zip(self.slack_at(n))
                .enumerate()
            {
                let ok = match slack {
                    None => false,
                    Some(s) if !s.is_zero() => true,
                    Some(_) => {
                        !strict
                            && !m.col_is_zero(j)
                            && (0..m.rows()).any(|i| *m.get(i, j) >= two)
                    }
                };
                if !ok {
                    return Err(Violation {
                        level: n + 1,
                        vertex: Some(v.id.clone()),
                        message: if strict {
                            "dimension does not strictly dominate the incoming weight".into()
                        } else {
                            "neither strict growth nor a double edge into this vertex".into()
                        },
                    });
                }
            }
        }
        if let Some(t) = self.tail {
            let steps = self.tail_steps().expect("tail steps exist");
            for (k, step) in steps.iter().enumerate() {
                for j in 0..step.matrix.cols() {
                    let ok = if strict {
                        !step.slack[j].is_zero()
                    } else {
                        !step.slack[j].is_zero()
                            || (0..step.matrix.rows()).any(|i| *step.matrix.get(i, j) >= two)
                    };
                    if !ok {
                        let id = self.levels[t.from + k + 1].vertices[j].id.clone();
                        return Err(Violation {
                            level: t.from + k + 2,
                            vertex: Some(id),
                            message: "tail phase repeats a non-growing step here".into(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::nat;

    /// Builds a diagram from dimension rows and edge triples
    /// `(level, src_index, dst_index, mult)`.
    pub fn diagram(
        name: &str,
        dims: &[&[u64]],
        edges: &[(usize, usize, usize, u64)],
        tail: Option<PeriodicTail>,
    ) -> BratteliDiagram {
        let levels: Vec<Level> = dims
            .iter()
            .enumerate()
            .map(|(n, row)| {
                Level::new(
                    row.iter()
                        .enumerate()
                        .map(|(i, &d)| DiagVertex::new(format!("v{}_{}", n + 1, i), nat(d)))
                        .collect(),
                )
            })
            .collect();
        let mut matrices: Vec<MultMatrix> = (0..levels.len() - 1)
            .map(|n| MultMatrix::zero(levels[n].width(), levels[n + 1].width()))
            .collect();
        for &(n, i, j, m) in edges {
            matrices[n].set(i, j, nat(m));
        }
        BratteliDiagram::new(name, levels, matrices, tail).unwrap()
    }

    /// The three-row diagram whose rows run 1|4,1,1|8,2,1|16,3,1|...: row a
    /// doubles, row b accumulates row c, row c stays constant 1.
    pub fn example_2_16(depth: usize) -> BratteliDiagram {
        let mut levels = vec![Level::new(vec![DiagVertex::new("r1", nat(1))])];
        let mut matrices = Vec::new();
        let mut m0 = MultMatrix::zero(1, 3);
        m0.set(0, 0, nat(1));
        m0.set(0, 1, nat(1));
        matrices.push(m0);
        let mut a = 4u64;
        for (b, n) in (1u64..).zip(1..depth) {
            levels.push(Level::new(vec![
                DiagVertex::new(format!("a{}", n + 1), nat(a)),
                DiagVertex::new(format!("b{}", n + 1), nat(b)),
                DiagVertex::new(format!("c{}", n + 1), nat(1)),
            ]));
            if n + 1 < depth {
                let mut m = MultMatrix::zero(3, 3);
                m.set(0, 0, nat(2));
                m.set(1, 1, nat(1));
                m.set(2, 1, nat(1));
                m.set(2, 2, nat(1));
                matrices.push(m);
            }
            a *= 2;
        }
        matrices.truncate(depth - 1);
        BratteliDiagram::new("example_2_16", levels, matrices, None).unwrap()
    }

    /// The telescoping figure: levels (1,1) -> (1,3,4) -> (4,10); dropping
    /// the middle column must produce multiplicities 2,2 / 0,1.
    pub fn telescoping_figure() -> BratteliDiagram {
        let levels = vec![
            Level::new(vec![
                DiagVertex::new("a0", nat(1)),
                DiagVertex::new("c0", nat(1)),
            ]),
            Level::new(vec![
                DiagVertex::new("a1", nat(1)),
                DiagVertex::new("b1", nat(3)),
                DiagVertex::new("c1", nat(4)),
            ]),
            Level::new(vec![
                DiagVertex::new("a2", nat(4)),
                DiagVertex::new("c2", nat(10)),
            ]),
        ];
        let mut m0 = MultMatrix::zero(2, 3);
        m0.set(0, 0, nat(1));
        m0.set(0, 1, nat(1));
        m0.set(1, 2, nat(1));
        let mut m1 = MultMatrix::zero(3, 2);
        m1.set(0, 0, nat(1));
        m1.set(1, 0, nat(1));
        m1.set(1, 1, nat(2));
        m1.set(2, 1, nat(1));
        BratteliDiagram::new("telescoping_figure", levels, vec![m0, m1], None).unwrap()
    }

    /// Brute-force path counting between two levels by depth-first
    /// enumeration, multiplying step multiplicities along each path.
    pub fn count_paths(d: &BratteliDiagram, from: usize, to: usize) -> MultMatrix {
        assert!(from < to);
        let mut counts = MultMatrix::identity(d.level(from).width());
        for n in from..to {
            let step = d.matrix(n);
            let mut next = MultMatrix::zero(counts.rows(), step.cols());
            for i in 0..counts.rows() {
                for k in 0..counts.cols() {
                    let c = counts.get(i, k).clone();
                    if c.is_zero() {
                        continue;
                    }
                    for j in 0..step.cols() {
                        let add = &c * step.get(k, j);
                        next.add_to(i, j, &add);
                    }
                }
            }
            counts = next;
        }
        counts
    }
}
