//! Saturated hereditary vertex sets and the quotient diagrams they induce.
//!
//! A set of diagram vertices is *hereditary* when it is closed under
//! following edges forward, and *saturated* when any vertex all of whose
//! outgoing edges land in the set is itself in the set. Such sets are the
//! diagram-level picture of ideals; deleting one leaves the diagram of the
//! quotient algebra.
//!
//! Saturation is only enforced "within the represented depth": membership of
//! final-level vertices is provisional (their continuation is not stored), so
//! a vertex whose successors all sit on the truncation boundary is never
//! forced into the set by them.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::diagram::{BratteliDiagram, Level};
use crate::error::{Error, Result};

/// Member vertices per level, by position in the level's canonical order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct HereditarySet {
    members: Vec<BTreeSet<usize>>,
}

impl HereditarySet {
    pub fn new(members: Vec<BTreeSet<usize>>) -> Self {
        HereditarySet { members }
    }

    pub fn empty(depth: usize) -> Self {
        HereditarySet {
            members: vec![BTreeSet::new(); depth],
        }
    }

    pub fn depth(&self) -> usize {
        self.members.len()
    }

    pub fn level(&self, n: usize) -> &BTreeSet<usize> {
        &self.members[n]
    }

    pub fn contains(&self, level: usize, index: usize) -> bool {
        self.members[level].contains(&index)
    }

    pub fn is_empty(&self) -> bool {
        self.members.iter().all(BTreeSet::is_empty)
    }

    pub fn total(&self) -> usize {
        self.members.iter().map(BTreeSet::len).sum()
    }

    /// Vertex ids of the members, for reports.
    pub fn ids(&self, d: &BratteliDiagram) -> Vec<String> {
        let mut out = Vec::new();
        for (n, set) in self.members.iter().enumerate() {
            for &i in set {
                out.push(d.level(n).vertices[i].id.clone());
            }
        }
        out
    }

    /// Checks heredity and saturation against `d`, which must have exactly
    /// the same number of levels as this set spans.
    pub fn check(&self, d: &BratteliDiagram) -> Result<()> {
        assert_eq!(self.members.len(), d.depth(), "set depth mismatch");
        let depth = d.depth();
        for n in 0..depth.saturating_sub(1) {
            let m = d.matrix(n);
            for (i, v) in d.level(n).vertices.iter().enumerate() {
                let inside = self.members[n].contains(&i);
                if inside {
                    for j in 0..m.cols() {
                        if !m.get(i, j).is_zero() && !self.members[n + 1].contains(&j) {
                            return Err(Error::NotHereditary {
                                level: n + 1,
                                vertex: v.id.clone(),
                            });
                        }
                    }
                } else if n + 2 < depth {
                    // Saturation forcing: skipped when the successors sit on
                    // the truncation boundary.
                    let all_in = !m.row_is_zero(i)
                        && (0..m.cols())
                            .all(|j| m.get(i, j).is_zero() || self.members[n + 1].contains(&j));
                    if all_in {
                        return Err(Error::NotSaturated {
                            level: n + 1,
                            vertex: v.id.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// The quotient diagram on the complement: kept vertices with edges whose
    /// endpoints are both kept, dimensions inherited. Leading and trailing
    /// levels that end up empty are dropped. When a kept vertex one level
    /// below the boundary loses every stored successor (possible because
    /// saturation is not enforced against the boundary level), the final
    /// level is dropped so that the vertex sits on the quotient's own
    /// truncation boundary.
    pub fn quotient(&self, d: &BratteliDiagram) -> Result<BratteliDiagram> {
        self.check(d)?;
        let kept: Vec<Vec<usize>> = (0..d.depth())
            .map(|n| {
                (0..d.level(n).width())
                    .filter(|i| !self.members[n].contains(i))
                    .collect()
            })
            .collect();
        let first = kept.iter().position(|k| !k.is_empty());
        let last = kept.iter().rposition(|k| !k.is_empty());
        let (first, mut last) = match (first, last) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::EmptyQuotient),
        };
        if last > first {
            let m = d.matrix(last - 1);
            let dead = kept[last - 1].iter().any(|&i| {
                kept[last].iter().all(|&j| m.get(i, j).is_zero())
            });
            if dead {
                last -= 1;
            }
        }
        if kept[first..=last].iter().any(|k| k.is_empty()) {
            // Cannot happen for saturated hereditary sets on valid diagrams.
            return Err(Error::other(
                "quotient has an interior empty level; input diagram is inconsistent",
            ));
        }
        let levels: Vec<Level> = (first..=last)
            .map(|n| {
                Level::new(
                    kept[n]
                        .iter()
                        .map(|&i| d.level(n).vertices[i].clone())
                        .collect(),
                )
            })
            .collect();
        let mut matrices = Vec::with_capacity(levels.len().saturating_sub(1));
        for n in first..last {
            let m = d.matrix(n);
            let mut q = crate::diagram::MultMatrix::zero(kept[n].len(), kept[n + 1].len());
            for (qi, &i) in kept[n].iter().enumerate() {
                for (qj, &j) in kept[n + 1].iter().enumerate() {
                    q.set(qi, qj, m.get(i, j).clone());
                }
            }
            matrices.push(q);
        }
        BratteliDiagram::new(format!("{}.quotient", d.name()), levels, matrices, None)
    }
}

/// Enumerates every saturated hereditary subset of the depth-truncation of
/// `d`, pairing each with its quotient diagram (`None` when the quotient is
/// empty). The working frontier is capped at `limit` candidates.
pub fn enumerate_hereditary_sets(
    d: &BratteliDiagram,
    depth: usize,
    limit: usize,
) -> Result<Vec<(HereditarySet, Option<BratteliDiagram>)>> {
    let d = d.unroll(depth.min(d.depth()))?;
    let depth = d.depth();
    for level in d.levels() {
        if level.width() >= usize::BITS as usize - 1 {
            return Err(Error::EnumerationLimit {
                limit,
                candidates: usize::MAX,
            });
        }
    }
    // Build candidates backward: a subset of level n is compatible with a
    // chosen subset of level n+1 if it is hereditary into it and (away from
    // the boundary) saturated with respect to it.
    let mut partials: Vec<Vec<BTreeSet<usize>>> = {
        let w = d.level(depth - 1).width();
        (0u64..(1u64 << w))
            .map(|mask| vec![bitmask_set(mask, w)])
            .collect()
    };
    if partials.len() > limit {
        return Err(Error::EnumerationLimit {
            limit,
            candidates: partials.len(),
        });
    }
    for n in (0..depth.saturating_sub(1)).rev() {
        let m = d.matrix(n);
        let w = d.level(n).width();
        let enforce_saturation = n + 2 < depth;
        let mut next: Vec<Vec<BTreeSet<usize>>> = Vec::new();
        for tail in &partials {
            let upper = &tail[0];
            'mask: for mask in 0u64..(1u64 << w) {
                for i in 0..w {
                    let inside = mask & (1 << i) != 0;
                    let targets: Vec<usize> = (0..m.cols())
                        .filter(|&j| !m.get(i, j).is_zero())
                        .collect();
                    if inside {
                        if targets.iter().any(|j| !upper.contains(j)) {
                            continue 'mask;
                        }
                    } else if enforce_saturation
                        && !targets.is_empty()
                        && targets.iter().all(|j| upper.contains(j))
                    {
                        continue 'mask;
                    }
                }
                let mut chain = Vec::with_capacity(tail.len() + 1);
                chain.push(bitmask_set(mask, w));
                chain.extend(tail.iter().cloned());
                next.push(chain);
                if next.len() > limit {
                    return Err(Error::EnumerationLimit {
                        limit,
                        candidates: next.len(),
                    });
                }
            }
        }
        partials = next;
    }
    let mut out = Vec::with_capacity(partials.len());
    for chain in partials {
        let h = HereditarySet::new(chain);
        let quotient = match h.quotient(&d) {
            Ok(q) => Some(q),
            Err(Error::EmptyQuotient) => None,
            Err(e) => return Err(e),
        };
        out.push((h, quotient));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

fn bitmask_set(mask: u64, width: usize) -> BTreeSet<usize> {
    (0..width).filter(|i| mask & (1 << i) != 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::testutil::{diagram, example_2_16};
    use crate::nat;

    #[test]
    fn single_vertex_has_two_subsets() {
        let d = diagram("one", &[&[1]], &[], None);
        let sets = enumerate_hereditary_sets(&d, 1, 1 << 16).unwrap();
        assert_eq!(sets.len(), 2);
        assert!(sets[0].0.is_empty());
        assert_eq!(sets[1].0.total(), 1);
        assert!(sets[1].1.is_none()); // full set, empty quotient
    }

    #[test]
    fn two_level_chain_has_three_subsets() {
        let d = diagram("chain", &[&[1], &[1]], &[(0, 0, 0, 1)], None);
        let sets = enumerate_hereditary_sets(&d, 2, 1 << 16).unwrap();
        let totals: Vec<usize> = sets.iter().map(|(h, _)| h.total()).collect();
        assert_eq!(sets.len(), 3);
        assert_eq!(totals, vec![0, 1, 2]);
        // {v} alone is not hereditary.
        let only_v = HereditarySet::new(vec![[0].into(), BTreeSet::new()]);
        assert!(matches!(
            only_v.check(&d),
            Err(Error::NotHereditary { .. })
        ));
    }

    /// Independent oracle: filter all subsets of all vertices by the same
    /// heredity and saturation definitions, written directly.
    fn brute_force(d: &BratteliDiagram) -> Vec<Vec<BTreeSet<usize>>> {
        let widths: Vec<usize> = d.levels().iter().map(|l| l.width()).collect();
        let total: usize = widths.iter().sum();
        let mut found = Vec::new();
        'outer: for mask in 0u64..(1 << total) {
            let mut per_level: Vec<BTreeSet<usize>> = Vec::new();
            let mut bit = 0;
            for &w in &widths {
                let mut s = BTreeSet::new();
                for i in 0..w {
                    if mask & (1 << (bit + i)) != 0 {
                        s.insert(i);
                    }
                }
                bit += w;
                per_level.push(s);
            }
            for n in 0..d.depth() - 1 {
                let m = d.matrix(n);
                for i in 0..widths[n] {
                    let inside = per_level[n].contains(&i);
                    let targets: Vec<usize> = (0..m.cols())
                        .filter(|&j| !m.get(i, j).is_zero())
                        .collect();
                    if inside && targets.iter().any(|j| !per_level[n + 1].contains(j)) {
                        continue 'outer;
                    }
                    if !inside
                        && n + 2 < d.depth()
                        && !targets.is_empty()
                        && targets.iter().all(|j| per_level[n + 1].contains(j))
                    {
                        continue 'outer;
                    }
                }
            }
            found.push(per_level);
        }
        found
    }

    #[test]
    fn enumeration_matches_brute_force_on_example_2_16() {
        let d = example_2_16(3);
        let fast = enumerate_hereditary_sets(&d, 3, 1 << 16).unwrap();
        let mut slow: Vec<HereditarySet> =
            brute_force(&d).into_iter().map(HereditarySet::new).collect();
        slow.sort();
        let fast_sets: Vec<&HereditarySet> = fast.iter().map(|(h, _)| h).collect();
        assert_eq!(fast_sets.len(), slow.len());
        for (a, b) in fast_sets.iter().zip(&slow) {
            assert_eq!(*a, b);
        }
    }

    #[test]
    fn empty_set_gives_the_diagram_back() {
        let d = example_2_16(4);
        let q = HereditarySet::empty(4).quotient(&d).unwrap();
        assert_eq!(q.levels(), d.levels());
        assert_eq!(q.matrices(), d.matrices());
    }

    #[test]
    fn dropping_the_bottom_rows_of_example_2_16_leaves_powers_of_two() {
        let d = example_2_16(5);
        // Rows b and c occupy positions 1 and 2 at levels 2..5.
        let mut members = vec![BTreeSet::new()];
        for _ in 1..5 {
            members.push([1usize, 2].into());
        }
        let h = HereditarySet::new(members);
        let q = h.quotient(&d).unwrap();
        assert!(q.validate().is_valid());
        let dims: Vec<Vec<crate::Nat>> = q.levels().iter().map(|l| l.dims()).collect();
        assert_eq!(
            dims,
            vec![
                vec![nat(1)],
                vec![nat(4)],
                vec![nat(8)],
                vec![nat(16)],
                vec![nat(32)]
            ]
        );
    }

    #[test]
    fn quotients_of_enumerated_sets_validate() {
        let d = example_2_16(4);
        for (_, q) in enumerate_hereditary_sets(&d, 4, 1 << 16).unwrap() {
            if let Some(q) = q {
                let report = q.validate();
                assert!(report.is_valid(), "{report}");
            }
        }
    }

    #[test]
    fn frontier_limit_is_enforced() {
        let d = example_2_16(6);
        assert!(matches!(
            enumerate_hereditary_sets(&d, 6, 4),
            Err(Error::EnumerationLimit { .. })
        ));
    }
}
