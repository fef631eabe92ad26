//! Seeded generation of valid random diagrams for test corpora.
//!
//! The generator produces diagrams that satisfy the requested growth
//! condition by construction: dimensions are chosen after the multiplicity
//! matrix so that every vertex either strictly dominates its incoming weight
//! or (in the realization mode) sits at equality under a double edge.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diagram::{BratteliDiagram, DiagVertex, Level, MultMatrix};
use crate::{nat, Nat};

/// Which condition the generated diagram must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMode {
    /// Strict growth or a double edge into every vertex; equality steps are
    /// produced on purpose so the slot-0 recursion gets exercised.
    Realization,
    /// Strict growth everywhere: the row-finite class.
    StrictGrowth,
}

/// Size bounds for the generator.
#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    pub mode: GenMode,
    pub depth: usize,
    pub max_width: usize,
    pub max_dim: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            mode: GenMode::Realization,
            depth: 4,
            max_width: 4,
            max_dim: 200,
        }
    }
}

/// Generates one valid diagram from the seed. Deterministic in
/// `(config, seed)`.
///
/// Dimensions grow by at most 3 per level, so every level `n` (0-based) gets
/// the budget `max_dim - 3 * (depth - 1 - n)`: a vertex sitting alone in a
/// column of the next level always fits, which makes the edge assignment
/// feasible at any width.
pub fn random_diagram(cfg: &GenConfig, seed: u64) -> BratteliDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depth = cfg.depth.max(2);
    assert!(
        cfg.max_dim >= 3 * depth as u64 + 8,
        "max_dim too small for this depth"
    );
    let cap = |n: usize| nat(cfg.max_dim - 3 * (depth - 1 - n) as u64);
    let mut levels: Vec<Level> = Vec::with_capacity(depth);
    let mut matrices: Vec<MultMatrix> = Vec::with_capacity(depth - 1);
    let first_width = rng.random_range(1..=cfg.max_width.max(1));
    levels.push(Level::new(
        (0..first_width)
            .map(|i| DiagVertex::new(format!("v1_{i}"), nat(rng.random_range(2..=6))))
            .collect(),
    ));
    for n in 1..depth {
        let rows = levels[n - 1].width();
        let dims = levels[n - 1].dims();
        // Column weights may not exceed cap(n) - 3, leaving room for the
        // strict-growth increment.
        let budget = cap(n) - nat(3);
        let mut cols = rng.random_range(1..=cfg.max_width.max(1));
        let mut m;
        'attempt: loop {
            m = MultMatrix::zero(rows, cols);
            let mut weights = vec![Nat::from(0u32); cols];
            // Every source needs an outgoing edge; place each in a random
            // column with room. Each dim fits an empty column by the cap
            // induction, so cols == rows always succeeds.
            for (i, dim) in dims.iter().enumerate() {
                let open: Vec<usize> = (0..cols)
                    .filter(|&j| &weights[j] + dim <= budget)
                    .collect();
                match open.as_slice() {
                    [] => {
                        if cols < rows {
                            cols += 1;
                            continue 'attempt;
                        }
                        unreachable!("a fresh column always has room");
                    }
                    js => {
                        let j = js[rng.random_range(0..js.len())];
                        m.set(i, j, nat(1));
                        weights[j] += dim;
                    }
                }
            }
            // Optional extra edges and double edges while the budget lasts.
            for (j, weight) in weights.iter_mut().enumerate() {
                for (i, dim) in dims.iter().enumerate() {
                    for _ in 0..2 {
                        if rng.random_bool(0.3) && &*weight + dim <= budget {
                            m.add_to(i, j, &nat(1));
                            *weight += dim;
                        }
                    }
                }
            }
            break;
        }
        let weights = m.incoming_weight(&dims);
        let two = nat(2);
        let vertices: Vec<DiagVertex> = (0..cols)
            .map(|j| {
                let weight = weights[j].clone();
                let has_double = (0..rows).any(|i| *m.get(i, j) >= two);
                let dim = if weight == Nat::from(0u32) {
                    // A fresh source in the middle of the diagram.
                    nat(rng.random_range(2..=6))
                } else {
                    let equality_ok = matches!(cfg.mode, GenMode::Realization)
                        && has_double
                        && rng.random_bool(0.4);
                    if equality_ok {
                        weight
                    } else {
                        weight + nat(rng.random_range(1..=3))
                    }
                };
                DiagVertex::new(format!("v{}_{j}", n + 1), dim)
            })
            .collect();
        levels.push(Level::new(vertices));
        matrices.push(m);
    }
    let d = BratteliDiagram::new(format!("gen_{seed}"), levels, matrices, None)
        .expect("generated shape is consistent");
    debug_assert!(d.validate().is_valid(), "{}", d.validate());
    debug_assert!(match cfg.mode {
        GenMode::Realization => d.satisfies_realization_conditions().is_ok(),
        GenMode::StrictGrowth => d.satisfies_strict_growth().is_ok(),
    });
    d
}
