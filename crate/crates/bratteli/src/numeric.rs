//! Bounded-size numeric cross-check of the amalgamation step.
//!
//! The combinatorial amalgamation law is backed, at tiny scale, by actually
//! constructing matrix units: given block sizes for `B` and `C` and the
//! projection ranks `m[v][w]`, the check builds the distinguished bases
//! `beta` and `gamma` as complex matrices on the amalgamated space, forms the
//! candidate units `alpha` as products, and verifies the multiplication
//! relations, together with the span dimension and the unit identity
//! `1_A = (1_B - sum q^v) + 1_C`.
//!
//! Entries are exact 0/1 values, so double precision with tolerance `1e-12`
//! leaves no real slack; the rank computation uses a pivoted elimination
//! with relative threshold `1e-9`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

pub const RELATION_TOLERANCE: f64 = 1e-12;
pub const RANK_THRESHOLD: f64 = 1e-9;
pub const DEFAULT_DIM_CAP: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Complex {
    re: f64,
    im: f64,
}

impl Complex {
    const ZERO: Complex = Complex { re: 0.0, im: 0.0 };
    const ONE: Complex = Complex { re: 1.0, im: 0.0 };

    fn mul(self, other: Complex) -> Complex {
        Complex {
            re: self.re * other.re - self.im * other.im,
            im: self.re * other.im + self.im * other.re,
        }
    }

    fn add(self, other: Complex) -> Complex {
        Complex {
            re: self.re + other.re,
            im: self.im + other.im,
        }
    }

    fn sub(self, other: Complex) -> Complex {
        Complex {
            re: self.re - other.re,
            im: self.im - other.im,
        }
    }

    fn conj(self) -> Complex {
        Complex {
            re: self.re,
            im: -self.im,
        }
    }

    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    fn div(self, other: Complex) -> Complex {
        let d = other.re * other.re + other.im * other.im;
        Complex {
            re: (self.re * other.re + self.im * other.im) / d,
            im: (self.im * other.re - self.re * other.im) / d,
        }
    }
}

/// A basis slot `(block, component index, copy index)` of the amalgamated
/// space.
type Slot = (usize, u64, u64);

/// Sparse complex matrix keyed by (row, column). The matrix units involved
/// here have a handful of entries each, so products stay cheap.
#[derive(Debug, Clone, PartialEq, Default)]
struct SparseMatrix {
    entries: BTreeMap<(usize, usize), Complex>,
}

impl SparseMatrix {
    fn unit(i: usize, j: usize) -> SparseMatrix {
        let mut entries = BTreeMap::new();
        entries.insert((i, j), Complex::ONE);
        SparseMatrix { entries }
    }

    fn add_unit(&mut self, i: usize, j: usize) {
        let e = self.entries.entry((i, j)).or_insert(Complex::ZERO);
        *e = e.add(Complex::ONE);
    }

    fn matmul(&self, other: &SparseMatrix) -> SparseMatrix {
        // Group the right factor's entries by row.
        let mut by_row: BTreeMap<usize, Vec<(usize, Complex)>> = BTreeMap::new();
        for (&(i, j), &v) in &other.entries {
            by_row.entry(i).or_default().push((j, v));
        }
        let mut out = SparseMatrix::default();
        for (&(i, k), &a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    let e = out.entries.entry((i, j)).or_insert(Complex::ZERO);
                    *e = e.add(a.mul(b));
                }
            }
        }
        out
    }

    fn max_diff(&self, other: &SparseMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for key in self.entries.keys().chain(other.entries.keys()) {
            let a = self.entries.get(key).copied().unwrap_or(Complex::ZERO);
            let b = other.entries.get(key).copied().unwrap_or(Complex::ZERO);
            worst = worst.max(a.sub(b).abs());
        }
        worst
    }
}

/// Outcome of the numeric check.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericReport {
    pub total_dim: u64,
    pub relation_pairs: usize,
    pub max_deviation: f64,
    pub span_rank: usize,
    pub expected_rank: usize,
    pub unit_ok: bool,
}

impl NumericReport {
    pub fn pass(&self) -> bool {
        self.max_deviation <= RELATION_TOLERANCE
            && self.span_rank == self.expected_rank
            && self.unit_ok
    }
}

impl fmt::Display for NumericReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "dim {}: {} relation pairs, worst deviation {:.3e}, span rank {}/{}, unit {}: {}",
            self.total_dim,
            self.relation_pairs,
            self.max_deviation,
            self.span_rank,
            self.expected_rank,
            if self.unit_ok { "ok" } else { "broken" },
            if self.pass() { "PASS" } else { "FAIL" }
        )
    }
}

/// Runs the matrix-unit construction for block sizes `b_dims`, `c_dims` and
/// projection ranks `q_ranks[v][w]`. The total amalgamated dimension must
/// stay within `cap`.
pub fn numeric_matrix_units(
    b_dims: &[u64],
    c_dims: &[u64],
    q_ranks: &[Vec<u64>],
    cap: u64,
) -> Result<NumericReport> {
    if q_ranks.len() != b_dims.len() || q_ranks.iter().any(|r| r.len() != c_dims.len()) {
        return Err(Error::BadAmalgamation(
            "rank matrix shape does not match the block lists".into(),
        ));
    }
    for (v, row) in q_ranks.iter().enumerate() {
        if row.iter().all(|&m| m == 0) {
            return Err(Error::BadAmalgamation(format!(
                "projection of block {v} vanishes"
            )));
        }
    }
    for (w, &c) in c_dims.iter().enumerate() {
        let total: u64 = q_ranks.iter().map(|row| row[w]).sum();
        if total > c {
            return Err(Error::BadAmalgamation(format!(
                "ranks into block {w} exceed its dimension"
            )));
        }
    }
    let a_dims: Vec<u64> = c_dims
        .iter()
        .enumerate()
        .map(|(w, &c)| {
            c + b_dims
                .iter()
                .zip(q_ranks)
                .map(|(&b, row)| (b - 1) * row[w])
                .sum::<u64>()
        })
        .collect();
    let total: u64 = a_dims.iter().sum();
    if total > cap {
        return Err(Error::NumericCapExceeded {
            cap,
            total: total.to_string(),
        });
    }

    // kappa[v][w]: the slots of block w owned by block v's projection,
    // assigned as consecutive runs.
    let mut kappa: Vec<Vec<Vec<u64>>> = vec![vec![Vec::new(); c_dims.len()]; b_dims.len()];
    for w in 0..c_dims.len() {
        let mut next = 0u64;
        for v in 0..b_dims.len() {
            kappa[v][w] = (next..next + q_ranks[v][w]).collect();
            next += q_ranks[v][w];
        }
    }

    // Basis of the amalgamated space: for each block w, the index set
    // {(k, 0)} followed by {(k, r) : k in kappa[v][w], 1 <= r < b_v}.
    let mut offset_of_w: Vec<usize> = Vec::with_capacity(c_dims.len());
    let mut index_of: BTreeMap<Slot, usize> = BTreeMap::new();
    let mut next = 0usize;
    for (w, &c) in c_dims.iter().enumerate() {
        offset_of_w.push(next);
        for k in 0..c {
            index_of.insert((w, k, 0), next);
            next += 1;
        }
        for (v, &b) in b_dims.iter().enumerate() {
            for &k in &kappa[v][w] {
                for r in 1..b {
                    index_of.insert((w, k, r), next);
                    next += 1;
                }
            }
        }
    }
    debug_assert_eq!(next as u64, total);

    let gamma = |w: usize, k: u64, l: u64| -> SparseMatrix {
        SparseMatrix::unit(index_of[&(w, k, 0)], index_of[&(w, l, 0)])
    };
    let beta = |v: usize, r: u64, s: u64| -> SparseMatrix {
        let mut m = SparseMatrix::default();
        for w in 0..c_dims.len() {
            for &k in &kappa[v][w] {
                m.add_unit(index_of[&(w, k, r)], index_of[&(w, k, s)]);
            }
        }
        m
    };
    let owner = |w: usize, k: u64| -> usize {
        (0..b_dims.len())
            .find(|&v| kappa[v][w].contains(&k))
            .expect("slot with positive component index has an owner")
    };

    // alpha[(w, k, r), (l, s)] built as products, per the four cases.
    let alpha = |w: usize, k: u64, r: u64, l: u64, s: u64| -> SparseMatrix {
        match (r, s) {
            (0, 0) => gamma(w, k, l),
            (0, _) => gamma(w, k, l).matmul(&beta(owner(w, l), 0, s)),
            (_, 0) => beta(owner(w, k), r, 0).matmul(&gamma(w, k, l)),
            (_, _) => beta(owner(w, k), r, 0)
                .matmul(&gamma(w, k, l))
                .matmul(&beta(owner(w, l), 0, s)),
        }
    };

    // Enumerate the index pairs per block.
    let mut slots: Vec<(usize, u64, u64)> = Vec::new();
    for &(w, k, r) in index_of.keys() {
        slots.push((w, k, r));
    }
    let mut alphas: Vec<(Slot, Slot, SparseMatrix)> = Vec::new();
    for &(w, k, r) in &slots {
        for &(w2, l, s) in &slots {
            if w == w2 {
                alphas.push(((w, k, r), (w2, l, s), alpha(w, k, r, l, s)));
            }
        }
    }

    // Multiplication relations.
    let lookup: BTreeMap<(Slot, Slot), &SparseMatrix> = alphas
        .iter()
        .map(|(x, y, m)| ((*x, *y), m))
        .collect();
    let mut worst: f64 = 0.0;
    let mut pairs = 0usize;
    for (x1, y1, m1) in &alphas {
        for (x2, y2, m2) in &alphas {
            pairs += 1;
            let product = m1.matmul(m2);
            let expected = if x1.0 == x2.0 && y1 == x2 {
                (*lookup[&(*x1, *y2)]).clone()
            } else {
                SparseMatrix::default()
            };
            worst = worst.max(product.max_diff(&expected));
        }
    }

    // Span rank of the alphas as vectors.
    let vectors: Vec<&SparseMatrix> = alphas.iter().map(|(_, _, m)| m).collect();
    let span_rank = sparse_rank(&vectors);
    let expected_rank: usize = a_dims.iter().map(|&a| (a * a) as usize).sum();

    // Unit identity: (1_B - sum q^v) + 1_C must be the identity.
    let mut unit = SparseMatrix::default();
    for (v, &b) in b_dims.iter().enumerate() {
        for r in 1..b {
            // 1_B minus the q's leaves the r >= 1 diagonal of each block.
            for w in 0..c_dims.len() {
                for &k in &kappa[v][w] {
                    unit.add_unit(index_of[&(w, k, r)], index_of[&(w, k, r)]);
                }
            }
        }
    }
    for (w, &c) in c_dims.iter().enumerate() {
        for k in 0..c {
            unit.add_unit(index_of[&(w, k, 0)], index_of[&(w, k, 0)]);
        }
    }
    let mut identity = SparseMatrix::default();
    for i in 0..total as usize {
        identity.add_unit(i, i);
    }
    let unit_ok = unit.max_diff(&identity) <= RELATION_TOLERANCE;

    Ok(NumericReport {
        total_dim: total,
        relation_pairs: pairs,
        max_deviation: worst,
        span_rank,
        expected_rank,
        unit_ok,
    })
}

/// Rank of a family of sparse vectors (matrices flattened by their key set)
/// by incremental pivoted elimination with a relative threshold.
fn sparse_rank(vectors: &[&SparseMatrix]) -> usize {
    // Pivot column -> eliminated row stored with unit pivot.
    let mut pivots: BTreeMap<(usize, usize), BTreeMap<(usize, usize), Complex>> = BTreeMap::new();
    for &v in vectors {
        let mut row = v.entries.clone();
        loop {
            // Eliminate against known pivots.
            let mut changed = false;
            let keys: Vec<(usize, usize)> = row.keys().copied().collect();
            for key in keys {
                if let (Some(pivot_row), Some(&coef)) = (pivots.get(&key), row.get(&key)) {
                    for (k, pv) in pivot_row {
                        let e = row.entry(*k).or_insert(Complex::ZERO);
                        *e = e.sub(coef.mul(*pv));
                    }
                    row.remove(&key);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let scale = row.values().fold(0.0f64, |m, c| m.max(c.abs()));
        row.retain(|_, c| c.abs() > RANK_THRESHOLD * scale.max(1.0));
        if row.is_empty() {
            continue;
        }
        // Choose the largest entry as pivot and normalize.
        let (&pivot_key, &pivot_val) = row
            .iter()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .unwrap();
        let normalized: BTreeMap<(usize, usize), Complex> = row
            .iter()
            .filter(|(k, _)| **k != pivot_key)
            .map(|(k, c)| (*k, c.div(pivot_val)))
            .collect();
        pivots.insert(pivot_key, normalized);
    }
    pivots.len()
}

// Conjugation is part of the adjoint bookkeeping callers may need; keep the
// helper alive for them.
#[allow(dead_code)]
fn adjoint(m: &SparseMatrix) -> SparseMatrix {
    let mut out = SparseMatrix::default();
    for (&(i, j), &v) in &m.entries {
        out.entries.insert((j, i), v.conj());
    }
    out
}
