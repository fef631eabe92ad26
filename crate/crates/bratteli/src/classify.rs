//! Three-valued membership of AF-algebras in the presentation classes.
//!
//! A descriptor collects structural facts about an AF-algebra. Some are
//! computable here (which distinguished quotients a diagram has); the
//! analytic ones (simplicity, stability, Type-I-ness of quotients, spectrum
//! discreteness) arrive as asserted flags, because the obstruction results
//! consume them as hypotheses. A small fixed rule set then closes the
//! descriptor into per-class verdicts: member, non-member, or unknown, each
//! carrying the rules that fired. No rule fires on unknown premises, so
//! verdicts are sound for any truthful descriptor; completeness is not
//! claimed (descriptors outside the rule lattice legitimately stay unknown).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::diagram::BratteliDiagram;
use crate::error::{Error, Result};
use crate::graph::{CycleAnswer, DirectedGraph};
use crate::matrix::ZeroOneMatrix;
use crate::properties::{check_quotient_properties, whole_diagram_pattern, PatternKind};
use crate::tri::Tri;
use crate::ultragraph::Ultragraph;

/// A presentation offered as evidence of membership. Witnesses must present
/// AF-algebras: a cycle found in one is a hard inconsistency.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Graph(DirectedGraph),
    Ultragraph(Ultragraph),
    Matrix(ZeroOneMatrix),
}

/// Structural facts about one AF-algebra.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AlgDescriptor {
    pub name: String,
    pub nonzero: Tri,
    pub simple: Tri,
    pub unital: Tri,
    pub finite_dimensional: Tri,
    pub stable: Tri,
    /// Commutative with non-discrete spectrum (asserted analytic fact).
    pub commutative_nondiscrete_spectrum: Tri,
    pub has_c_quotient: Tri,
    pub has_findim_quotient: Tri,
    pub has_unital_quotient: Tri,
    /// A unital quotient that is not Type I (asserted, or derived from a
    /// simple unital infinite-dimensional summand).
    pub has_unital_non_type_i_quotient: Tri,
    pub has_unital_quotient_with_infinitely_many_ideals: Tri,
    /// Asserted shape: the algebra is the 2x2 matrices over the minimal
    /// unitization of an Exel-Laca algebra.
    pub m2_unitization_of_exel_laca: Tri,
    pub summands: Vec<AlgDescriptor>,
    pub witnesses: Vec<Witness>,
}

impl AlgDescriptor {
    pub fn named(name: impl Into<String>) -> Self {
        AlgDescriptor {
            name: name.into(),
            ..Default::default()
        }
    }

    /// Applies the consistency implications until stable. Returns an error
    /// on a contradictory descriptor.
    pub fn closed(&self) -> Result<AlgDescriptor> {
        let mut a = self.clone();
        for s in &mut a.summands {
            *s = s.closed()?;
        }
        loop {
            let before = a.clone();
            a.step_closure()?;
            if a == before {
                return Ok(a);
            }
        }
    }

    fn step_closure(&mut self) -> Result<()> {
        fn meet(slot: &mut Tri, value: Tri, what: &str) -> Result<()> {
            match (*slot, value) {
                (_, Tri::Unknown) => {}
                (Tri::Unknown, v) => *slot = v,
                (a, b) if a == b => {}
                _ => {
                    return Err(Error::InconsistentDescriptor(format!(
                        "{what} is claimed both yes and no"
                    )))
                }
            }
            Ok(())
        }
        if self.finite_dimensional.is_yes() {
            meet(&mut self.unital, Tri::Yes, "unital")?;
        }
        if self.finite_dimensional.is_yes() && self.nonzero.is_yes() {
            meet(&mut self.has_findim_quotient, Tri::Yes, "has_findim_quotient")?;
        }
        if self.unital.is_yes() && self.nonzero.is_yes() {
            meet(&mut self.has_unital_quotient, Tri::Yes, "has_unital_quotient")?;
        }
        if self.stable.is_yes() {
            if self.nonzero.is_yes() {
                meet(&mut self.unital, Tri::No, "unital")?;
            }
            meet(&mut self.has_unital_quotient, Tri::No, "has_unital_quotient")?;
            meet(&mut self.has_findim_quotient, Tri::No, "has_findim_quotient")?;
        }
        if self.simple.is_yes() {
            // For a simple algebra the quotient facts are facts about the
            // algebra itself.
            if !self.unital.is_unknown() {
                meet(&mut self.has_unital_quotient, self.unital, "has_unital_quotient")?;
            }
            if !self.finite_dimensional.is_unknown() {
                meet(
                    &mut self.has_findim_quotient,
                    self.finite_dimensional,
                    "has_findim_quotient",
                )?;
            }
            if self.finite_dimensional.is_no() {
                meet(&mut self.has_c_quotient, Tri::No, "has_c_quotient")?;
            }
            if self.unital.is_yes() && self.finite_dimensional.is_no() && self.nonzero.is_yes() {
                // A simple unital infinite-dimensional algebra is itself a
                // unital quotient that cannot be Type I.
                meet(
                    &mut self.has_unital_non_type_i_quotient,
                    Tri::Yes,
                    "has_unital_non_type_i_quotient",
                )?;
            }
        }
        if self.has_c_quotient.is_yes() {
            meet(&mut self.has_findim_quotient, Tri::Yes, "has_findim_quotient")?;
        }
        if self.has_findim_quotient.is_yes() {
            meet(&mut self.has_unital_quotient, Tri::Yes, "has_unital_quotient")?;
        }
        if self.has_unital_quotient.is_no() {
            meet(&mut self.has_findim_quotient, Tri::No, "has_findim_quotient")?;
            if self.nonzero.is_yes() {
                meet(&mut self.unital, Tri::No, "unital")?;
            }
        }
        if self.has_findim_quotient.is_no() {
            meet(&mut self.has_c_quotient, Tri::No, "has_c_quotient")?;
        }
        if self.has_unital_non_type_i_quotient.is_yes() {
            meet(&mut self.has_unital_quotient, Tri::Yes, "has_unital_quotient")?;
        }
        if !self.summands.is_empty() {
            // The summand list is the full decomposition, so facts lift: a
            // nonzero unital (or finite-dimensional, or scalar) quotient of
            // the sum is exactly a quotient of one summand with the rest
            // collapsed, and global flags are conjunctions.
            let or = |f: fn(&AlgDescriptor) -> Tri| {
                self.summands.iter().map(f).reduce(Tri::or).unwrap()
            };
            let and = |f: fn(&AlgDescriptor) -> Tri| {
                self.summands.iter().map(f).reduce(Tri::and).unwrap()
            };
            let lifted = [
                (or(|a| a.nonzero), 0usize),
                (and(|a| a.unital), 1),
                (and(|a| a.finite_dimensional), 2),
                (and(|a| a.stable), 3),
                (or(|a| a.has_c_quotient), 4),
                (or(|a| a.has_findim_quotient), 5),
                (or(|a| a.has_unital_quotient), 6),
                (or(|a| a.has_unital_non_type_i_quotient), 7),
                (
                    or(|a| a.has_unital_quotient_with_infinitely_many_ideals),
                    8,
                ),
            ];
            for (value, slot) in lifted {
                let (field, what): (&mut Tri, &str) = match slot {
                    0 => (&mut self.nonzero, "nonzero"),
                    1 => (&mut self.unital, "unital"),
                    2 => (&mut self.finite_dimensional, "finite_dimensional"),
                    3 => (&mut self.stable, "stable"),
                    4 => (&mut self.has_c_quotient, "has_c_quotient"),
                    5 => (&mut self.has_findim_quotient, "has_findim_quotient"),
                    6 => (&mut self.has_unital_quotient, "has_unital_quotient"),
                    7 => (
                        &mut self.has_unital_non_type_i_quotient,
                        "has_unital_non_type_i_quotient",
                    ),
                    _ => (
                        &mut self.has_unital_quotient_with_infinitely_many_ideals,
                        "has_unital_quotient_with_infinitely_many_ideals",
                    ),
                };
                meet(field, value, what)?;
            }
        }
        Ok(())
    }
}

/// The four classes of the containment picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AlgClass {
    Graph,
    ExelLaca,
    Ultragraph,
    RowFiniteNoSinks,
}

impl AlgClass {
    pub const ALL: [AlgClass; 4] = [
        AlgClass::Graph,
        AlgClass::ExelLaca,
        AlgClass::Ultragraph,
        AlgClass::RowFiniteNoSinks,
    ];

    pub fn short(&self) -> &'static str {
        match self {
            AlgClass::Graph => "graph",
            AlgClass::ExelLaca => "EL",
            AlgClass::Ultragraph => "ultragraph",
            AlgClass::RowFiniteNoSinks => "RFNS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Member,
    NonMember,
    Unknown,
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Membership::Member => "member",
            Membership::NonMember => "non_member",
            Membership::Unknown => "unknown",
        })
    }
}

/// The rule inventory. Every verdict cites the rules that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[allow(clippy::upper_case_acronyms)]
pub enum RuleId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R9,
    R10,
    R11,
    R12,
    R13,
    R14,
    R15,
    R16,
}

impl RuleId {
    pub const ALL: [RuleId; 16] = [
        RuleId::R1,
        RuleId::R2,
        RuleId::R3,
        RuleId::R4,
        RuleId::R5,
        RuleId::R6,
        RuleId::R7,
        RuleId::R8,
        RuleId::R9,
        RuleId::R10,
        RuleId::R11,
        RuleId::R12,
        RuleId::R13,
        RuleId::R14,
        RuleId::R15,
        RuleId::R16,
    ];

    pub fn describe(&self) -> &'static str {
        match self {
            RuleId::R1 => "nonzero finite-dimensional algebras are graph algebras",
            RuleId::R2 => "no finite-dimensional algebra is an Exel-Laca algebra",
            RuleId::R3 => "stable AF-algebras come from row-finite graphs with no sinks",
            RuleId::R4 => "row-finite-no-sinks membership is equivalent to having no unital quotient",
            RuleId::R5 => "no finite-dimensional quotients forces an Exel-Laca presentation",
            RuleId::R6 => "Exel-Laca AF-algebras have no scalar quotient",
            RuleId::R7 => "unital quotients of graph AF-algebras are Type I with finitely many ideals",
            RuleId::R8 => "commutative ultragraph AF-algebras have discrete spectrum",
            RuleId::R9 => "simple AF-algebras split by dimension and unitality",
            RuleId::R10 => "the classes are closed under finite direct sums",
            RuleId::R11 => "row-finite-no-sinks algebras are both graph and Exel-Laca algebras",
            RuleId::R12 => "graph and Exel-Laca algebras are ultragraph algebras",
            RuleId::R13 => "an exhibited acyclic presentation settles membership",
            RuleId::R14 => "matrix summands plus a part with no unital quotients form a graph algebra",
            RuleId::R15 => "2x2 matrices over a unitized Exel-Laca algebra stay Exel-Laca",
            RuleId::R16 => "graph membership passes to quotients, so a non-graph summand obstructs",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", *self as u8 + 1)
    }
}

/// Per-class status with the citation trail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassVerdict {
    statuses: BTreeMap<AlgClass, (Membership, BTreeSet<RuleId>)>,
}

impl ClassVerdict {
    fn unknown() -> Self {
        ClassVerdict {
            statuses: AlgClass::ALL
                .iter()
                .map(|c| (*c, (Membership::Unknown, BTreeSet::new())))
                .collect(),
        }
    }

    pub fn status(&self, class: AlgClass) -> Membership {
        self.statuses[&class].0
    }

    pub fn citations(&self, class: AlgClass) -> &BTreeSet<RuleId> {
        &self.statuses[&class].1
    }

    pub fn cites(&self, class: AlgClass, rule: RuleId) -> bool {
        self.statuses[&class].1.contains(&rule)
    }

    pub fn fully_decided(&self) -> bool {
        AlgClass::ALL
            .iter()
            .all(|c| self.status(*c) != Membership::Unknown)
    }

    fn set(&mut self, class: AlgClass, membership: Membership, rule: RuleId) -> Result<()> {
        let slot = self.statuses.get_mut(&class).unwrap();
        match (slot.0, membership) {
            (Membership::Unknown, m) => {
                slot.0 = m;
                slot.1.insert(rule);
            }
            (a, b) if a == b => {
                slot.1.insert(rule);
            }
            _ => {
                let prior = slot
                    .1
                    .iter()
                    .next()
                    .map(|r| r.to_string())
                    .unwrap_or_else(|| "?".into());
                return Err(Error::RuleConflict {
                    class: class.short(),
                    a: prior,
                    b: rule.to_string(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for ClassVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, class) in AlgClass::ALL.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let (m, cites) = &self.statuses[class];
            let trail: Vec<String> = cites.iter().map(|r| r.to_string()).collect();
            write!(f, "{}: {}", class.short(), m)?;
            if !trail.is_empty() {
                write!(f, " [{}]", trail.join(" "))?;
            }
        }
        Ok(())
    }
}

/// Classifies a descriptor with the default rule order.
pub fn classify(a: &AlgDescriptor) -> Result<ClassVerdict> {
    classify_with_order(a, &RuleId::ALL)
}

/// Classifies with an explicit rule order. The fixpoint does not depend on
/// the order (rules only add information, and conflicts are errors either
/// way); the parameter exists so tests can check exactly that.
pub fn classify_with_order(a: &AlgDescriptor, order: &[RuleId]) -> Result<ClassVerdict> {
    let a = a.closed()?;
    let summand_verdicts: Vec<ClassVerdict> = a
        .summands
        .iter()
        .map(|s| classify_with_order(s, order))
        .collect::<Result<_>>()?;
    let mut verdict = ClassVerdict::unknown();
    loop {
        let before = verdict.clone();
        for rule in order {
            apply_rule(&a, &summand_verdicts, *rule, &mut verdict)?;
        }
        if verdict == before {
            break;
        }
    }
    Ok(verdict)
}

fn apply_rule(
    a: &AlgDescriptor,
    subs: &[ClassVerdict],
    rule: RuleId,
    v: &mut ClassVerdict,
) -> Result<()> {
    use AlgClass::*;
    use Membership::*;
    match rule {
        RuleId::R1 => {
            if a.finite_dimensional.is_yes() && a.nonzero.is_yes() {
                v.set(Graph, Member, rule)?;
            }
        }
        RuleId::R2 => {
            if a.finite_dimensional.is_yes() && a.nonzero.is_yes() {
                v.set(ExelLaca, NonMember, rule)?;
            }
        }
        RuleId::R3 => {
            if a.stable.is_yes() {
                v.set(RowFiniteNoSinks, Member, rule)?;
            }
        }
        RuleId::R4 => match a.has_unital_quotient {
            Tri::Yes => v.set(RowFiniteNoSinks, NonMember, rule)?,
            Tri::No => v.set(RowFiniteNoSinks, Member, rule)?,
            Tri::Unknown => {}
        },
        RuleId::R5 => {
            if a.has_findim_quotient.is_no() {
                v.set(ExelLaca, Member, rule)?;
            }
        }
        RuleId::R6 => {
            if a.has_c_quotient.is_yes() {
                v.set(ExelLaca, NonMember, rule)?;
            }
        }
        RuleId::R7 => {
            if a.has_unital_non_type_i_quotient.is_yes()
                || a.has_unital_quotient_with_infinitely_many_ideals.is_yes()
            {
                v.set(Graph, NonMember, rule)?;
            }
        }
        RuleId::R8 => {
            if a.commutative_nondiscrete_spectrum.is_yes() {
                v.set(Ultragraph, NonMember, rule)?;
            }
        }
        RuleId::R9 => {
            if a.simple.is_yes() && a.nonzero.is_yes() {
                match (a.finite_dimensional, a.unital) {
                    (Tri::Yes, _) => {
                        v.set(Graph, Member, rule)?;
                        v.set(ExelLaca, NonMember, rule)?;
                    }
                    (Tri::No, Tri::Yes) => {
                        v.set(ExelLaca, Member, rule)?;
                        v.set(Graph, NonMember, rule)?;
                    }
                    (Tri::No, Tri::No) => {
                        v.set(RowFiniteNoSinks, Member, rule)?;
                    }
                    _ => {}
                }
            }
        }
        RuleId::R10 => {
            if !subs.is_empty() {
                for class in [Graph, ExelLaca, Ultragraph] {
                    if subs.iter().all(|s| s.status(class) == Member) {
                        v.set(class, Member, rule)?;
                    }
                }
            }
        }
        RuleId::R11 => {
            if v.status(RowFiniteNoSinks) == Member {
                v.set(Graph, Member, rule)?;
                v.set(ExelLaca, Member, rule)?;
            }
            if v.status(Graph) == NonMember || v.status(ExelLaca) == NonMember {
                v.set(RowFiniteNoSinks, NonMember, rule)?;
            }
        }
        RuleId::R12 => {
            if v.status(Graph) == Member || v.status(ExelLaca) == Member {
                v.set(Ultragraph, Member, rule)?;
            }
            if v.status(Ultragraph) == NonMember {
                v.set(Graph, NonMember, rule)?;
                v.set(ExelLaca, NonMember, rule)?;
            }
        }
        RuleId::R13 => {
            for w in &a.witnesses {
                match w {
                    Witness::Graph(g) => {
                        if let CycleAnswer::Cycle(c) = g.find_cycle() {
                            return Err(Error::InconsistentDescriptor(format!(
                                "graph witness {} has a cycle through {}",
                                g.name(),
                                c.join(" -> ")
                            )));
                        }
                        v.set(Graph, Member, rule)?;
                        if g.is_row_finite() && g.sinks().is_empty() {
                            v.set(RowFiniteNoSinks, Member, rule)?;
                        }
                    }
                    Witness::Ultragraph(u) => {
                        if let CycleAnswer::Cycle(c) = u.find_cycle() {
                            return Err(Error::InconsistentDescriptor(format!(
                                "ultragraph witness {} has a cycle through {}",
                                u.name(),
                                c.join(" -> ")
                            )));
                        }
                        v.set(Ultragraph, Member, rule)?;
                        if u.source_bijective().is_ok() {
                            v.set(ExelLaca, Member, rule)?;
                        }
                    }
                    Witness::Matrix(m) => {
                        if let CycleAnswer::Cycle(c) = m.find_cycle() {
                            return Err(Error::InconsistentDescriptor(format!(
                                "matrix witness {} has a cycle through {}",
                                m.name(),
                                c.join(" -> ")
                            )));
                        }
                        v.set(ExelLaca, Member, rule)?;
                    }
                }
            }
        }
        RuleId::R14 => {
            if !a.summands.is_empty() {
                let shape_fits = a.summands.iter().all(|s| {
                    (s.finite_dimensional.is_yes() && s.nonzero.is_yes())
                        || s.has_unital_quotient.is_no()
                });
                if shape_fits {
                    v.set(Graph, Member, rule)?;
                }
            }
        }
        RuleId::R15 => {
            if a.m2_unitization_of_exel_laca.is_yes() {
                v.set(ExelLaca, Member, rule)?;
            }
        }
        RuleId::R16 => {
            for s in subs {
                if s.status(Graph) == NonMember {
                    v.set(Graph, NonMember, rule)?;
                }
            }
        }
    }
    Ok(())
}

/// Combines descriptors of the summands into a descriptor of the direct sum.
/// Because each summand is a quotient of the sum (project onto it), the
/// quotient facts lift by disjunction, and that disjunction is exact: a
/// nonzero unital (or finite-dimensional, or scalar) quotient of the sum is
/// one of some summand with the rest collapsed.
pub fn combine_direct_sum(parts: &[AlgDescriptor]) -> Result<AlgDescriptor> {
    if parts.is_empty() {
        return Err(Error::other("direct sum of nothing"));
    }
    if parts.len() == 1 {
        return Ok(parts[0].clone());
    }
    let closed: Vec<AlgDescriptor> = parts
        .iter()
        .map(AlgDescriptor::closed)
        .collect::<Result<_>>()?;
    let fold = |f: fn(&AlgDescriptor) -> Tri, op: fn(Tri, Tri) -> Tri| {
        closed.iter().map(f).reduce(op).unwrap()
    };
    let name = format!(
        "({})",
        parts
            .iter()
            .map(|p| p.name.as_str())
            .collect::<Vec<_>>()
            .join(" + ")
    );
    let out = AlgDescriptor {
        name,
        nonzero: fold(|a| a.nonzero, Tri::or),
        simple: Tri::No,
        unital: fold(|a| a.unital, Tri::and),
        finite_dimensional: fold(|a| a.finite_dimensional, Tri::and),
        stable: fold(|a| a.stable, Tri::and),
        commutative_nondiscrete_spectrum: {
            let all_yes = closed
                .iter()
                .all(|a| a.commutative_nondiscrete_spectrum.is_yes());
            if all_yes {
                Tri::Yes
            } else {
                Tri::Unknown
            }
        },
        has_c_quotient: fold(|a| a.has_c_quotient, Tri::or),
        has_findim_quotient: fold(|a| a.has_findim_quotient, Tri::or),
        has_unital_quotient: fold(|a| a.has_unital_quotient, Tri::or),
        has_unital_non_type_i_quotient: fold(|a| a.has_unital_non_type_i_quotient, Tri::or),
        has_unital_quotient_with_infinitely_many_ideals: fold(
            |a| a.has_unital_quotient_with_infinitely_many_ideals,
            Tri::or,
        ),
        m2_unitization_of_exel_laca: Tri::Unknown,
        summands: parts.to_vec(),
        witnesses: Vec::new(),
    };
    out.closed()
}

/// Reads the computable descriptor flags off a diagram: the three quotient
/// properties from the certificate checker, unitality from eventually-unital
/// inclusions, finite-dimensionality from tail stabilization. Analytic flags
/// stay unknown.
pub fn derive_descriptor(d: &BratteliDiagram, depth: usize, limit: usize) -> Result<AlgDescriptor> {
    let props = check_quotient_properties(d, depth, limit)?;
    let mut a = AlgDescriptor::named(format!("{}.descriptor", d.name()));
    a.nonzero = Tri::Yes;
    a.has_c_quotient = props.has_c_quotient.tri();
    a.has_findim_quotient = props.has_findim_quotient.tri();
    a.has_unital_quotient = props.has_unital_quotient.tri();
    a.unital = whole_diagram_pattern(d, depth, PatternKind::Unital)?;
    a.finite_dimensional = whole_diagram_pattern(d, depth, PatternKind::FinDim)?;
    a.closed()
}
