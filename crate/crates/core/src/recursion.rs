//! Symbolic engine for the tangency recursion: rewrite any relative invariant
//! into a rational combination of products of absolute invariants, with a
//! termination certificate.
//!
//! One rewriting step trades a unit of tangency at a chosen marking for a
//! psi-raising term, a hypersurface-class insertion term, and a signed sum of
//! comb-locus products. A comb product pairs an absolute invariant of the
//! hypersurface (the internal component, carrying dual-basis tokens rho^h at
//! the gluing points) with relative invariants (the teeth, carrying rho_h and
//! a tangency equal to the meeting multiplicity). Tokens with index <= k are
//! restricted (they restrict from the ambient and are materialized on teeth
//! as honest classes); indices above k stand for the unknown part of the
//! hypersurface cohomology and are symbolic only.
//!
//! The induction measure is (Y.beta, number of markings, total tangency),
//! ordered lexicographically, with total tangency read as Y.beta + 1 for
//! absolute invariants of the hypersurface. Every emitted leaf strictly
//! decreases the measure; `reduce` records the drops as a trace.

use std::collections::BTreeSet;

use num::{One, Zero};

use crate::chow::{factorial, render_class, ChowElement, ChowRing, PairedBasis, Rat};
use crate::error::{EngineError, Result};
use crate::givental::s_function;
use crate::lefschetz::{lefschetz_series, relative_ladder};
use crate::toric::{CurveClass, Geometry};

/// Everything a rewrite needs to know about the target geometry.
pub struct RecursionContext<'a> {
    pub geom: &'a Geometry,
    pub ring: &'a ChowRing,
    pub basis: &'a PairedBasis,
    /// Total number of dual-basis tokens (defaults to one more than the
    /// restricted count, i.e. a single symbolic unrestricted direction).
    pub token_arity: usize,
}

impl<'a> RecursionContext<'a> {
    pub fn new(geom: &'a Geometry, ring: &'a ChowRing, basis: &'a PairedBasis) -> Self {
        let k = basis.restricted_token_count();
        RecursionContext {
            geom,
            ring,
            basis,
            token_arity: k + 1,
        }
    }

    pub fn with_token_arity(mut self, l: usize) -> Self {
        assert!(l >= self.restricted_tokens());
        self.token_arity = l;
        self
    }

    pub fn restricted_tokens(&self) -> usize {
        self.basis.restricted_token_count()
    }
}

/// An insertion at a marked point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Insertion {
    /// An honest ambient class (restricting along the inclusion when it sits
    /// on a hypersurface invariant).
    Class(ChowElement),
    /// (restriction of `factor`) * rho^index, a dual-basis token.
    Upper { index: usize, factor: ChowElement },
    /// (restriction of `factor`) * rho_index.
    Lower { index: usize, factor: ChowElement },
}

impl Insertion {
    fn is_unrestricted(&self, k: usize) -> bool {
        match self {
            Insertion::Class(_) => false,
            Insertion::Upper { index, .. } | Insertion::Lower { index, .. } => *index > k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Marking {
    pub insertion: Insertion,
    pub psi: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LeafKind {
    AbsX,
    AbsY,
    Rel,
}

/// The termination measure (Y.beta, markings, total tangency).
pub type Measure = (i64, usize, i64);

/// A single absolute or relative invariant inside a product.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct InvariantLeaf {
    pub kind: LeafKind,
    pub beta: CurveClass,
    pub markings: Vec<Marking>,
    /// Tangency orders, parallel to `markings`; empty unless `kind` is Rel.
    pub tangency: Vec<u32>,
}

impl InvariantLeaf {
    /// A relative invariant with ambient-class insertions.
    pub fn relative(
        geom: &Geometry,
        beta: CurveClass,
        markings: Vec<Marking>,
        tangency: Vec<u32>,
    ) -> Result<Self> {
        if markings.len() < 2 {
            return Err(EngineError::InvalidInput(
                "invariants need at least two markings".into(),
            ));
        }
        if tangency.len() != markings.len() {
            return Err(EngineError::InvalidInput(
                "tangency vector must be parallel to the markings".into(),
            ));
        }
        let total: i64 = tangency.iter().map(|&a| i64::from(a)).sum();
        if total > geom.y_degree(&beta) {
            return Err(EngineError::InvalidInput(format!(
                "total tangency {total} exceeds Y.beta = {}",
                geom.y_degree(&beta)
            )));
        }
        let mut leaf = InvariantLeaf {
            kind: LeafKind::Rel,
            beta,
            markings,
            tangency,
        };
        leaf.normalize();
        Ok(leaf)
    }

    pub fn absolute_x(beta: CurveClass, markings: Vec<Marking>) -> Result<Self> {
        if markings.len() < 2 {
            return Err(EngineError::InvalidInput(
                "invariants need at least two markings".into(),
            ));
        }
        let mut leaf = InvariantLeaf {
            kind: LeafKind::AbsX,
            beta,
            markings,
            tangency: Vec::new(),
        };
        leaf.normalize();
        Ok(leaf)
    }

    pub fn n_markings(&self) -> usize {
        self.markings.len()
    }

    pub fn total_tangency(&self) -> i64 {
        self.tangency.iter().map(|&a| i64::from(a)).sum()
    }

    /// Lexicographic induction measure; absolute hypersurface invariants
    /// count as tangency Y.beta + 1.
    pub fn measure(&self, geom: &Geometry) -> Measure {
        let d = geom.y_degree(&self.beta);
        let third = match self.kind {
            LeafKind::AbsX => 0,
            LeafKind::AbsY => d + 1,
            LeafKind::Rel => self.total_tangency(),
        };
        (d, self.n_markings(), third)
    }

    fn has_token(&self) -> bool {
        self.markings
            .iter()
            .any(|m| !matches!(m.insertion, Insertion::Class(_)))
    }

    fn unrestricted_count(&self, k: usize) -> usize {
        self.markings
            .iter()
            .filter(|m| m.insertion.is_unrestricted(k))
            .count()
    }

    /// A zero insertion makes the invariant the zero functional.
    fn is_trivially_zero(&self) -> bool {
        self.markings.iter().any(|m| match &m.insertion {
            Insertion::Class(c) => c.is_zero(),
            Insertion::Upper { factor, .. } | Insertion::Lower { factor, .. } => factor.is_zero(),
        })
    }

    /// Canonical order of markings; a tangency-free relative leaf over plain
    /// classes is the same thing as an absolute ambient invariant.
    fn normalize(&mut self) {
        if self.kind == LeafKind::Rel {
            if self.total_tangency() == 0 && !self.has_token() {
                self.kind = LeafKind::AbsX;
                self.tangency.clear();
            } else {
                let mut paired: Vec<(Marking, u32)> = self
                    .markings
                    .drain(..)
                    .zip(self.tangency.drain(..))
                    .collect();
                paired.sort();
                for (m, a) in paired {
                    self.markings.push(m);
                    self.tangency.push(a);
                }
                return;
            }
        }
        self.markings.sort();
    }
}

impl std::fmt::Display for InvariantLeaf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "\u{27e8}")?;
        for (i, m) in self.markings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match &m.insertion {
                Insertion::Class(c) => write!(f, "{}", render_class(c))?,
                Insertion::Upper { index, factor } => {
                    if factor.is_zero() || factor.max_degree() != Some(0) {
                        write!(f, "({})*rho^{}", render_class(factor), index)?;
                    } else {
                        write!(f, "rho^{}", index)?;
                    }
                }
                Insertion::Lower { index, factor } => {
                    if factor.is_zero() || factor.max_degree() != Some(0) {
                        write!(f, "({})*rho_{}", render_class(factor), index)?;
                    } else {
                        write!(f, "rho_{}", index)?;
                    }
                }
            }
            if m.psi > 0 {
                write!(f, " psi^{}", m.psi)?;
            }
            if self.kind == LeafKind::Rel && self.tangency[i] > 0 {
                write!(f, " [{}]", self.tangency[i])?;
            }
        }
        let target = match self.kind {
            LeafKind::AbsX => "X",
            LeafKind::AbsY => "Y",
            LeafKind::Rel => "X|Y",
        };
        write!(f, "\u{27e9}^{{{target}}}_{{{:?}}}", self.beta.pairings)
    }
}

/// A rational linear combination of products of leaves, kept in canonical
/// merged form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Expression {
    pub terms: Vec<(Rat, Vec<InvariantLeaf>)>,
}

impl Expression {
    pub fn zero() -> Self {
        Expression { terms: Vec::new() }
    }

    pub fn single(coeff: Rat, leaves: Vec<InvariantLeaf>) -> Self {
        let mut e = Expression {
            terms: vec![(coeff, leaves)],
        };
        e.normalize();
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&mut self, other: Expression) {
        self.terms.extend(other.terms);
        self.normalize();
    }

    fn normalize(&mut self) {
        self.terms
            .retain(|(_, leaves)| !leaves.iter().any(|l| l.is_trivially_zero()));
        for (_, leaves) in &mut self.terms {
            leaves.sort();
        }
        self.terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut merged: Vec<(Rat, Vec<InvariantLeaf>)> = Vec::new();
        for (c, leaves) in self.terms.drain(..) {
            match merged.last_mut() {
                Some((mc, ml)) if *ml == leaves => {
                    *mc = &*mc + &c;
                }
                _ => merged.push((c, leaves)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        self.terms = merged;
    }
}

impl std::fmt::Display for Expression {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, leaves)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", crate::chow::render_rat(c))?;
            for leaf in leaves {
                write!(f, " * {leaf}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// comb profiles
// ---------------------------------------------------------------------------

/// One tooth of a comb: the markings it carries, its curve class, and the
/// multiplicity with which it meets the hypersurface.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Tooth {
    pub markings: Vec<usize>,
    pub beta: CurveClass,
    pub multiplicity: u32,
}

/// A comb configuration: internal component data plus an unordered (but
/// canonically sorted) list of teeth. The k-th marking always sits on the
/// internal component.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CombProfile {
    pub internal_markings: Vec<usize>,
    pub internal_beta: CurveClass,
    pub teeth: Vec<Tooth>,
}

impl CombProfile {
    /// The weight m^(1) ... m^(r) / r! attached to each ordered arrangement
    /// of the teeth.
    pub fn weight(&self) -> Rat {
        let mut w = Rat::one();
        for t in &self.teeth {
            w *= crate::chow::rat(i64::from(t.multiplicity));
        }
        w / factorial(self.teeth.len() as u64)
    }

    /// Number of ordered arrangements; teeth carry disjoint non-empty marking
    /// sets, so they are pairwise distinct and every ordering is distinct.
    pub fn arrangements(&self) -> Rat {
        factorial(self.teeth.len() as u64)
    }
}

/// Enumerate the comb locus for tangency vector `alpha` at marking `k` (a
/// rewriting step passes the already-decremented vector). The constraints:
///
/// * Y.beta0 + sum_i m^(i) = sum of alpha over the internal markings;
/// * 1 <= m^(i) and m^(i) + (tangency carried by the tooth) <= Y.beta^(i);
/// * |A^(0)| + r >= 2, and every tooth carries at least one marking;
/// * a degree-zero internal component needs at least three special points.
pub fn enumerate_profiles(
    geom: &Geometry,
    alpha: &[u32],
    k: usize,
    beta: &CurveClass,
) -> Vec<CombProfile> {
    let n = alpha.len();
    let eff: BTreeSet<Vec<i64>> = {
        let mut set = BTreeSet::new();
        set.insert(CurveClass::zero(geom.num_rays()).pairings);
        let deg = geom.degree(beta);
        if deg > 0 {
            if let Ok(list) = geom.enumerate_effective(deg) {
                set.extend(list.into_iter().map(|c| c.pairings));
            }
        }
        set
    };
    if !eff.contains(&beta.pairings) {
        return Vec::new();
    }
    let mut profiles = Vec::new();
    // All subsets of markings containing k form the internal component.
    for mask in 0..(1u32 << n) {
        if mask & (1 << k) == 0 {
            continue;
        }
        let internal: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let outside: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) == 0).collect();
        let target: i64 = internal.iter().map(|&i| i64::from(alpha[i])).sum();
        for blocks in set_partitions(&outside) {
            let r = blocks.len();
            if internal.len() + r < 2 {
                continue;
            }
            let mut assignment: Vec<Tooth> = Vec::with_capacity(r);
            assign_teeth(
                geom,
                alpha,
                &eff,
                target,
                &blocks,
                0,
                beta.clone(),
                0,
                &mut assignment,
                &mut |teeth, remaining, msum| {
                    if geom.y_degree(&remaining) + msum != target {
                        return;
                    }
                    if remaining.is_zero() && internal.len() + r < 3 {
                        return;
                    }
                    let mut teeth = teeth.to_vec();
                    teeth.sort();
                    profiles.push(CombProfile {
                        internal_markings: internal.clone(),
                        internal_beta: remaining,
                        teeth,
                    });
                },
            );
        }
    }
    profiles.sort();
    profiles.dedup();
    profiles
}

/// Unordered set partitions of `items` into non-empty blocks.
fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    match items.split_first() {
        None => vec![vec![]],
        Some((&first, rest)) => {
            let mut out = Vec::new();
            for partition in set_partitions(rest) {
                for i in 0..partition.len() {
                    let mut p = partition.clone();
                    p[i].insert(0, first);
                    out.push(p);
                }
                let mut p = partition;
                p.push(vec![first]);
                out.push(p);
            }
            out
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn assign_teeth(
    geom: &Geometry,
    alpha: &[u32],
    eff: &BTreeSet<Vec<i64>>,
    target: i64,
    blocks: &[Vec<usize>],
    idx: usize,
    remaining: CurveClass,
    msum: i64,
    current: &mut Vec<Tooth>,
    emit: &mut dyn FnMut(&[Tooth], CurveClass, i64),
) {
    if idx == blocks.len() {
        emit(current, remaining, msum);
        return;
    }
    let block_tangency: i64 = blocks[idx].iter().map(|&i| i64::from(alpha[i])).sum();
    // Candidate classes for this tooth: effective, leaving an effective
    // remainder, with enough Y-degree for the multiplicity.
    for cand in eff.iter() {
        let tooth_beta = CurveClass {
            pairings: cand.clone(),
        };
        let rest = remaining.sub(&tooth_beta);
        if !eff.contains(&rest.pairings) {
            continue;
        }
        let e = geom.y_degree(&tooth_beta);
        let max_m = e - block_tangency;
        for m in 1..=max_m.max(0) {
            if msum + m > target {
                break;
            }
            current.push(Tooth {
                markings: blocks[idx].clone(),
                beta: tooth_beta.clone(),
                multiplicity: m as u32,
            });
            assign_teeth(
                geom,
                alpha,
                eff,
                target,
                blocks,
                idx + 1,
                rest.clone(),
                msum + m,
                current,
                emit,
            );
            current.pop();
        }
    }
}

// ---------------------------------------------------------------------------
// one rewriting step
// ---------------------------------------------------------------------------

fn class_times(ring: &ChowRing, ins: &Insertion, c: &ChowElement) -> Result<Insertion> {
    Ok(match ins {
        Insertion::Class(x) => Insertion::Class(ring.multiply(x, c)?),
        Insertion::Upper { index, factor } => Insertion::Upper {
            index: *index,
            factor: ring.multiply(factor, c)?,
        },
        Insertion::Lower { index, factor } => Insertion::Lower {
            index: *index,
            factor: ring.multiply(factor, c)?,
        },
    })
}

/// Expand one unit of tangency at marking `k`: the leaf with tangency alpha
/// is rewritten as (alpha_k - 1) * (psi-raised leaf at alpha - e_k) plus the
/// hypersurface-insertion leaf at alpha - e_k, minus the weighted comb
/// products, with dual-basis tokens summed over all token indices.
pub fn expand_step(ctx: &RecursionContext, leaf: &InvariantLeaf, k: usize) -> Result<Expression> {
    if leaf.kind != LeafKind::Rel || k >= leaf.n_markings() || leaf.tangency[k] == 0 {
        return Err(EngineError::NoTangency { marking: k });
    }
    let geom = ctx.geom;
    let ring = ctx.ring;
    let measure_in = leaf.measure(geom);
    let mut alpha = leaf.tangency.clone();
    alpha[k] -= 1;

    let mut out = Expression::zero();

    // psi-raising term, weighted by the decremented tangency.
    let psi_coeff = i64::from(alpha[k]);
    if psi_coeff != 0 {
        let mut raised = leaf.clone();
        raised.tangency = alpha.clone();
        raised.markings[k].psi += 1;
        raised.normalize();
        out.add(Expression::single(
            crate::chow::rat(psi_coeff),
            vec![raised],
        ));
    }

    // hypersurface-class insertion term.
    let y = ring.divisor_element(&geom.y.coeffs);
    {
        let mut inserted = leaf.clone();
        inserted.tangency = alpha.clone();
        inserted.markings[k].insertion = class_times(ring, &inserted.markings[k].insertion, &y)?;
        inserted.normalize();
        out.add(Expression::single(Rat::one(), vec![inserted]));
    }

    // comb corrections, with a minus sign.
    let k_restricted = ctx.restricted_tokens();
    let l = ctx.token_arity;
    for profile in enumerate_profiles(geom, &alpha, k, &leaf.beta) {
        let r = profile.teeth.len();
        let coeff = -(profile.weight() * profile.arrangements());
        // token indices for the gluing points, one per tooth
        let mut tokens = vec![1usize; r];
        loop {
            let mut internal_markings: Vec<Marking> = profile
                .internal_markings
                .iter()
                .map(|&i| leaf.markings[i].clone())
                .collect();
            for &h in &tokens {
                internal_markings.push(Marking {
                    insertion: Insertion::Upper {
                        index: h,
                        factor: ring.one(),
                    },
                    psi: 0,
                });
            }
            let mut internal = InvariantLeaf {
                kind: LeafKind::AbsY,
                beta: profile.internal_beta.clone(),
                markings: internal_markings,
                tangency: Vec::new(),
            };
            internal.normalize();

            let mut factors = vec![internal];
            for (tooth, &h) in profile.teeth.iter().zip(&tokens) {
                let mut markings: Vec<Marking> = tooth
                    .markings
                    .iter()
                    .map(|&i| leaf.markings[i].clone())
                    .collect();
                let mut tangency: Vec<u32> =
                    tooth.markings.iter().map(|&i| alpha[i]).collect();
                let gluing = if h <= k_restricted {
                    Insertion::Class(ctx.basis.lower[h].clone())
                } else {
                    Insertion::Lower {
                        index: h,
                        factor: ring.one(),
                    }
                };
                markings.push(Marking {
                    insertion: gluing,
                    psi: 0,
                });
                tangency.push(tooth.multiplicity);
                let mut tooth_leaf = InvariantLeaf {
                    kind: LeafKind::Rel,
                    beta: tooth.beta.clone(),
                    markings,
                    tangency,
                };
                tooth_leaf.normalize();
                factors.push(tooth_leaf);
            }
            out.add(Expression::single(coeff.clone(), factors));

            // next token vector
            let mut pos = 0;
            loop {
                if pos == r {
                    break;
                }
                tokens[pos] += 1;
                if tokens[pos] <= l {
                    break;
                }
                tokens[pos] = 1;
                pos += 1;
            }
            if r == 0 || pos == r {
                break;
            }
        }
    }

    for (_, leaves) in &out.terms {
        for emitted in leaves {
            let m = emitted.measure(geom);
            if m >= measure_in {
                return Err(EngineError::MeasureViolation {
                    from: measure_in,
                    to: m,
                });
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// full reduction
// ---------------------------------------------------------------------------

/// Which marking to expand when several carry tangency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    SmallestIndex,
    LargestIndex,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub expanded: Measure,
    pub marking: usize,
    pub emitted: Vec<Measure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReduceTrace {
    pub steps: Vec<TraceStep>,
}

impl ReduceTrace {
    /// Every emitted measure is strictly below the measure it came from.
    pub fn strictly_decreasing(&self) -> bool {
        self.steps
            .iter()
            .all(|s| s.emitted.iter().all(|m| *m < s.expanded))
    }
}

/// Drop every product containing a factor with exactly one unrestricted
/// insertion; such invariants vanish.
pub fn restricted_filter(ctx: &RecursionContext, expr: &Expression) -> Expression {
    let k = ctx.restricted_tokens();
    let mut out = Expression {
        terms: expr
            .terms
            .iter()
            .filter(|(_, leaves)| !leaves.iter().any(|l| l.unrestricted_count(k) == 1))
            .cloned()
            .collect(),
    };
    out.normalize();
    out
}

/// Rewrite until only absolute invariants remain. Vanishing unrestricted
/// terms are dropped along the way (each rewriting step introduces them only
/// in products where some factor carries exactly one unrestricted insertion).
/// Returns the final expression and the measure trace.
pub fn reduce(
    ctx: &RecursionContext,
    leaf: &InvariantLeaf,
    tie: TieBreak,
) -> Result<(Expression, ReduceTrace)> {
    let mut expr = restricted_filter(ctx, &Expression::single(Rat::one(), vec![leaf.clone()]));
    let mut trace = ReduceTrace::default();
    loop {
        let mut target: Option<(usize, usize, usize)> = None;
        'scan: for (ti, (_, leaves)) in expr.terms.iter().enumerate() {
            for (li, l) in leaves.iter().enumerate() {
                if l.kind == LeafKind::Rel && l.total_tangency() > 0 {
                    let candidates = (0..l.n_markings()).filter(|&j| l.tangency[j] > 0);
                    let j = match tie {
                        TieBreak::SmallestIndex => candidates.min(),
                        TieBreak::LargestIndex => candidates.max(),
                    }
                    .expect("positive tangency present");
                    target = Some((ti, li, j));
                    break 'scan;
                }
            }
        }
        let Some((ti, li, j)) = target else { break };
        let (coeff, leaves) = expr.terms.remove(ti);
        let factor = leaves[li].clone();
        let rest: Vec<InvariantLeaf> = leaves
            .into_iter()
            .enumerate()
            .filter_map(|(i, l)| (i != li).then_some(l))
            .collect();
        let expansion = expand_step(ctx, &factor, j)?;
        trace.steps.push(TraceStep {
            expanded: factor.measure(ctx.geom),
            marking: j,
            emitted: expansion
                .terms
                .iter()
                .flat_map(|(_, ls)| ls.iter().map(|l| l.measure(ctx.geom)))
                .collect(),
        });
        let mut substituted = Expression::zero();
        for (c, ls) in expansion.terms {
            let mut product = rest.clone();
            product.extend(ls);
            substituted.add(Expression::single(&coeff * &c, product));
        }
        expr.add(substituted);
        expr = restricted_filter(ctx, &expr);
        if let Some(step) = trace.steps.last() {
            if step.emitted.iter().any(|m| *m >= step.expanded) {
                return Err(EngineError::MeasureViolation {
                    from: step.expanded,
                    to: *step.emitted.iter().find(|m| **m >= step.expanded).unwrap(),
                });
            }
        }
    }
    Ok((expr, trace))
}

// ---------------------------------------------------------------------------
// numeric evaluation
// ---------------------------------------------------------------------------

/// Result of evaluating an expression: a number, or the first leaf with no
/// closed form in the supported regime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evaluation {
    Value(Rat),
    Unevaluable(Box<InvariantLeaf>),
}

impl Evaluation {
    pub fn value(&self) -> Option<&Rat> {
        match self {
            Evaluation::Value(v) => Some(v),
            Evaluation::Unevaluable(_) => None,
        }
    }
}

/// Evaluate every leaf by its two-pointed closed form (S-function for the
/// ambient, the restricted series for the hypersurface, the ladder for
/// relative leaves); token-carrying leaves are zeroed when the dimension
/// ledger rules them out and reported otherwise. The empty expression is 0.
pub fn evaluate(ctx: &RecursionContext, expr: &Expression) -> Result<Evaluation> {
    let mut total = Rat::zero();
    for (coeff, leaves) in &expr.terms {
        // A vanishing factor kills the whole product, so an unevaluable
        // sibling only matters when every evaluable factor is non-zero.
        let mut product = coeff.clone();
        let mut pending: Option<Evaluation> = None;
        for leaf in leaves {
            match leaf_value(ctx, leaf)? {
                Evaluation::Value(v) => product *= v,
                unev @ Evaluation::Unevaluable(_) => pending = Some(unev),
            }
        }
        if product.is_zero() {
            continue;
        }
        if let Some(unev) = pending {
            return Ok(unev);
        }
        total += product;
    }
    Ok(Evaluation::Value(total))
}

fn leaf_value(ctx: &RecursionContext, leaf: &InvariantLeaf) -> Result<Evaluation> {
    let k = ctx.restricted_tokens();
    // The vanishing rule: exactly one unrestricted insertion kills the
    // invariant outright.
    if leaf.unrestricted_count(k) == 1 {
        return Ok(Evaluation::Value(Rat::zero()));
    }
    if leaf.unrestricted_count(k) >= 2 {
        return Ok(Evaluation::Unevaluable(Box::new(leaf.clone())));
    }
    // Resolve the concretely known restricted tokens.
    let mut resolved = leaf.clone();
    for m in &mut resolved.markings {
        m.insertion = match std::mem::replace(
            &mut m.insertion,
            Insertion::Class(ctx.ring.zero()),
        ) {
            Insertion::Upper { index: 1, factor } => Insertion::Class(factor),
            Insertion::Lower { index, factor } if index <= k => {
                Insertion::Class(ctx.ring.multiply(&ctx.basis.lower[index], &factor)?)
            }
            other => other,
        };
    }
    if resolved.has_token() {
        // Remaining tokens are restricted duals with no avatar; they only
        // matter when the dimension ledger lets them pair non-trivially.
        return match token_dimension_check(ctx, &resolved)? {
            false => Ok(Evaluation::Value(Rat::zero())),
            true => Ok(Evaluation::Unevaluable(Box::new(leaf.clone()))),
        };
    }
    resolved.normalize();
    class_leaf_value(ctx, &resolved)
}

/// For a leaf still carrying restricted upper tokens, decide whether the
/// total insertion codimension can match the virtual dimension; degrees of
/// the duals are known even though the classes themselves live off the
/// ambient ring.
fn token_dimension_check(ctx: &RecursionContext, leaf: &InvariantLeaf) -> Result<bool> {
    let dim_x = ctx.geom.dim() as i64;
    let dim_y = dim_x - 1;
    let n = leaf.n_markings() as i64;
    let vdim = match leaf.kind {
        LeafKind::AbsX => dim_x - 3 - ctx.geom.kx_degree(&leaf.beta) + n,
        LeafKind::AbsY => dim_y - 3 - ctx.geom.ky_degree(&leaf.beta) + n,
        LeafKind::Rel => {
            dim_x - 3 - ctx.geom.kx_degree(&leaf.beta) + n - leaf.total_tangency()
        }
    };
    let mut codim = 0i64;
    for m in &leaf.markings {
        codim += i64::from(m.psi);
        match &m.insertion {
            Insertion::Class(c) => {
                if c.is_zero() {
                    return Ok(false);
                }
                if !c.is_homogeneous() {
                    // mixed degree: stay conservative
                    return Ok(true);
                }
                codim += i64::from(c.max_degree().unwrap());
            }
            Insertion::Upper { index, factor } | Insertion::Lower { index, factor } => {
                if factor.is_zero() {
                    return Ok(false);
                }
                if !factor.is_homogeneous() {
                    return Ok(true);
                }
                let dual_deg = ctx.basis.lower[*index]
                    .max_degree()
                    .map(i64::from)
                    .unwrap_or(0);
                let token_codim = match &m.insertion {
                    Insertion::Lower { .. } => dual_deg,
                    _ => dim_y - dual_deg,
                };
                codim += token_codim + i64::from(factor.max_degree().unwrap());
            }
        }
    }
    Ok(codim == vdim)
}

fn class_leaf_value(ctx: &RecursionContext, leaf: &InvariantLeaf) -> Result<Evaluation> {
    // Split non-homogeneous insertions linearly.
    for (i, m) in leaf.markings.iter().enumerate() {
        let Insertion::Class(c) = &m.insertion else {
            unreachable!("tokens resolved before closed-form evaluation")
        };
        if c.is_zero() {
            return Ok(Evaluation::Value(Rat::zero()));
        }
        if !c.is_homogeneous() {
            let mut total = Rat::zero();
            for d in 0..=(ctx.ring.dim() as u32) {
                let part = ctx.ring.graded_part(c, d);
                if part.is_zero() {
                    continue;
                }
                let mut split = leaf.clone();
                split.markings[i].insertion = Insertion::Class(part);
                match class_leaf_value(ctx, &split)? {
                    Evaluation::Value(v) => total += v,
                    unev => return Ok(unev),
                }
            }
            return Ok(Evaluation::Value(total));
        }
    }
    // Pure dimension vanishing: homogeneous insertions whose total
    // codimension misses the virtual dimension integrate to zero.
    {
        let dim_x = ctx.geom.dim() as i64;
        let n = leaf.n_markings() as i64;
        let vdim = match leaf.kind {
            LeafKind::AbsX => dim_x - 3 - ctx.geom.kx_degree(&leaf.beta) + n,
            LeafKind::AbsY => (dim_x - 1) - 3 - ctx.geom.ky_degree(&leaf.beta) + n,
            LeafKind::Rel => {
                dim_x - 3 - ctx.geom.kx_degree(&leaf.beta) + n - leaf.total_tangency()
            }
        };
        let codim: i64 = leaf
            .markings
            .iter()
            .map(|m| {
                let Insertion::Class(c) = &m.insertion else {
                    unreachable!()
                };
                i64::from(m.psi) + i64::from(c.max_degree().unwrap())
            })
            .sum();
        if codim != vdim {
            return Ok(Evaluation::Value(Rat::zero()));
        }
    }
    if leaf.n_markings() != 2 {
        return Ok(Evaluation::Unevaluable(Box::new(leaf.clone())));
    }
    // One marking must be a plain untouched fundamental-class insertion.
    let trivial = (0..2).find(|&i| {
        matches!(&leaf.markings[i].insertion, Insertion::Class(c) if *c == ctx.ring.one())
            && leaf.markings[i].psi == 0
            && (leaf.kind != LeafKind::Rel || leaf.tangency[i] == 0)
    });
    let Some(trivial) = trivial else {
        return Ok(Evaluation::Unevaluable(Box::new(leaf.clone())));
    };
    let data = 1 - trivial;
    let Insertion::Class(gamma) = &leaf.markings[data].insertion else {
        unreachable!()
    };
    let a = i64::from(leaf.markings[data].psi);
    let series = match leaf.kind {
        LeafKind::AbsX => s_function(ctx.geom, ctx.ring, &leaf.beta)?,
        LeafKind::AbsY => {
            let cap = ctx.geom.degree(&leaf.beta);
            lefschetz_series(ctx.geom, ctx.ring, cap)?.0.coeff(&leaf.beta)
        }
        LeafKind::Rel => {
            let m = i64::from(leaf.tangency[data]);
            relative_ladder(ctx.geom, ctx.ring, &leaf.beta, m)?
                .pop()
                .unwrap()
        }
    };
    let value = match series.coeff(-a - 1) {
        Some(class) => ctx.ring.pairing(gamma, class)?,
        None => Rat::zero(),
    };
    Ok(Evaluation::Value(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::{paper_basis, rat};
    use crate::lefschetz::relative_point_invariant;
    use crate::toric::{pn_divisor, projective_space, GeometryFlags};

    struct Setup {
        geom: Geometry,
        ring: ChowRing,
        basis: PairedBasis,
    }

    fn pn_pair(n: usize, y: i64) -> Setup {
        let geom = Geometry::new(
            projective_space(n),
            pn_divisor(n, y),
            pn_divisor(n, 1),
            GeometryFlags {
                very_ample_y: true,
                contains_all_curve_classes: true,
            },
        )
        .unwrap();
        let ring = ChowRing::build(&geom).unwrap();
        let basis = paper_basis(&ring, &geom).unwrap();
        Setup { geom, ring, basis }
    }

    fn ctx(setup: &Setup) -> RecursionContext<'_> {
        RecursionContext::new(&setup.geom, &setup.ring, &setup.basis)
    }

    fn line(n: usize, d: i64) -> CurveClass {
        CurveClass {
            pairings: vec![d; n + 1],
        }
    }

    fn point_leaf(s: &Setup, beta: CurveClass, tangency: Vec<u32>) -> InvariantLeaf {
        InvariantLeaf::relative(
            &s.geom,
            beta,
            vec![
                Marking {
                    insertion: Insertion::Class(s.basis.lower[1].clone()),
                    psi: 0,
                },
                Marking {
                    insertion: Insertion::Class(s.ring.one()),
                    psi: 0,
                },
            ],
            tangency,
        )
        .unwrap()
    }

    #[test]
    fn zero_tangency_relabels_absolute() {
        let s = pn_pair(2, 1);
        let leaf = point_leaf(&s, line(2, 1), vec![0, 0]);
        assert_eq!(leaf.kind, LeafKind::AbsX);
    }

    fn tangency_index(leaf: &InvariantLeaf) -> usize {
        (0..leaf.n_markings())
            .find(|&i| leaf.tangency[i] > 0)
            .expect("a marking with positive tangency")
    }

    #[test]
    fn unit_tangency_expands_to_single_insertion_term() {
        // alpha = (1, 0): the psi term carries coefficient zero and no comb
        // profile satisfies the degree constraint, leaving one term.
        for n in [2usize, 3] {
            let s = pn_pair(n, 1);
            let c = ctx(&s);
            let leaf = point_leaf(&s, line(n, 1), vec![1, 0]);
            let expansion = expand_step(&c, &leaf, tangency_index(&leaf)).unwrap();
            assert_eq!(expansion.terms.len(), 1);
            let (coeff, leaves) = &expansion.terms[0];
            assert_eq!(coeff, &rat(1));
            assert_eq!(leaves.len(), 1);
            assert_eq!(leaves[0].kind, LeafKind::AbsX);
            assert_eq!(leaves[0].total_tangency(), 0);
        }
    }

    #[test]
    fn no_tangency_is_an_error() {
        let s = pn_pair(2, 1);
        let c = ctx(&s);
        let leaf = point_leaf(&s, line(2, 2), vec![1, 0]);
        let free = (0..2).find(|&i| leaf.tangency[i] == 0).unwrap();
        assert!(matches!(
            expand_step(&c, &leaf, free),
            Err(EngineError::NoTangency { .. })
        ));
    }

    #[test]
    fn profile_weight_formula() {
        let profile = CombProfile {
            internal_markings: vec![0],
            internal_beta: CurveClass::zero(3),
            teeth: vec![
                Tooth {
                    markings: vec![1],
                    beta: line(2, 1),
                    multiplicity: 2,
                },
                Tooth {
                    markings: vec![2],
                    beta: line(2, 1),
                    multiplicity: 3,
                },
            ],
        };
        assert_eq!(profile.weight(), rat(3)); // 6 / 2!
        assert_eq!(profile.arrangements(), rat(2));
    }

    #[test]
    fn degree_zero_internal_needs_three_special_points() {
        let s = pn_pair(2, 1);
        // After a rewriting step at full tangency the vector is (0, 0), and
        // no comb satisfies the degree constraint.
        assert!(enumerate_profiles(&s.geom, &[0, 0], 0, &line(2, 1)).is_empty());
        // At tangency (1, 0) the no-teeth comb (the whole curve inside the
        // hypersurface) is the only stable configuration: the one-tooth
        // candidate would need a degree-zero internal component with two
        // special points.
        let profiles = enumerate_profiles(&s.geom, &[1, 0], 0, &line(2, 1));
        assert_eq!(profiles.len(), 1);
        assert!(profiles[0].teeth.is_empty());
        assert_eq!(profiles[0].internal_markings, vec![0, 1]);
        // With a third marking the one-tooth comb becomes stable.
        let profiles = enumerate_profiles(&s.geom, &[1, 0, 0], 0, &line(2, 1));
        assert!(profiles
            .iter()
            .any(|p| p.internal_beta.is_zero() && p.internal_markings.len() + p.teeth.len() >= 3));
    }

    #[test]
    fn reduce_depth_matches_tangency() {
        let s = pn_pair(2, 1);
        let c = ctx(&s);
        for d in 1..=3i64 {
            let leaf = point_leaf(&s, line(2, d), vec![d as u32, 0]);
            let (expr, trace) = reduce(&c, &leaf, TieBreak::SmallestIndex).unwrap();
            assert!(trace.strictly_decreasing());
            let tangencies: Vec<i64> = trace.steps.iter().map(|st| st.expanded.2).collect();
            assert_eq!(tangencies.iter().max(), Some(&d));
            assert_eq!(tangencies.iter().min(), Some(&1));
            for (_, leaves) in &expr.terms {
                for l in leaves {
                    assert_ne!(l.kind, LeafKind::Rel);
                    assert_eq!(l.unrestricted_count(c.restricted_tokens()), 0);
                }
            }
        }
    }

    #[test]
    fn filter_drops_single_unrestricted_insertions() {
        let s = pn_pair(2, 1);
        let c = ctx(&s);
        let k = c.restricted_tokens();
        let unrestricted = InvariantLeaf {
            kind: LeafKind::AbsY,
            beta: line(2, 1),
            markings: vec![
                Marking {
                    insertion: Insertion::Class(s.ring.one()),
                    psi: 0,
                },
                Marking {
                    insertion: Insertion::Upper {
                        index: k + 1,
                        factor: s.ring.one(),
                    },
                    psi: 0,
                },
            ],
            tangency: Vec::new(),
        };
        let expr = Expression::single(rat(1), vec![unrestricted.clone()]);
        assert!(restricted_filter(&c, &expr).is_zero());

        // a diagonal pair: the tooth carries rho_h, the internal rho^h, each
        // with exactly one unrestricted insertion
        let tooth = InvariantLeaf {
            kind: LeafKind::Rel,
            beta: line(2, 1),
            markings: vec![
                Marking {
                    insertion: Insertion::Lower {
                        index: k + 1,
                        factor: s.ring.one(),
                    },
                    psi: 0,
                },
                Marking {
                    insertion: Insertion::Class(s.ring.one()),
                    psi: 0,
                },
            ],
            tangency: vec![1, 0],
        };
        let pair = Expression::single(rat(1), vec![unrestricted, tooth]);
        assert!(restricted_filter(&c, &pair).is_zero());

        // restricted tokens survive
        let restricted = InvariantLeaf {
            kind: LeafKind::AbsY,
            beta: line(2, 1),
            markings: vec![
                Marking {
                    insertion: Insertion::Class(s.ring.one()),
                    psi: 0,
                },
                Marking {
                    insertion: Insertion::Upper {
                        index: 1,
                        factor: s.ring.one(),
                    },
                    psi: 0,
                },
            ],
            tangency: Vec::new(),
        };
        let expr = Expression::single(rat(1), vec![restricted]);
        assert_eq!(restricted_filter(&c, &expr), expr);
    }

    #[test]
    fn evaluate_empty_expression_is_zero() {
        let s = pn_pair(2, 1);
        let c = ctx(&s);
        assert_eq!(
            evaluate(&c, &Expression::zero()).unwrap(),
            Evaluation::Value(Rat::zero())
        );
    }

    #[test]
    fn evaluate_reports_three_pointed_leaf() {
        // A dimension-consistent three-pointed hypersurface invariant has no
        // closed form here and must be named.
        let s = pn_pair(2, 1);
        let c = ctx(&s);
        let h = s.ring.generator(0);
        let leaf = InvariantLeaf {
            kind: LeafKind::AbsY,
            beta: line(2, 1),
            markings: vec![
                Marking {
                    insertion: Insertion::Class(h.clone()),
                    psi: 0,
                },
                Marking {
                    insertion: Insertion::Class(h.clone()),
                    psi: 0,
                },
                Marking {
                    insertion: Insertion::Class(h),
                    psi: 0,
                },
            ],
            tangency: Vec::new(),
        };
        let expr = Expression::single(rat(1), vec![leaf.clone()]);
        match evaluate(&c, &expr).unwrap() {
            Evaluation::Unevaluable(named) => assert_eq!(*named, leaf),
            Evaluation::Value(v) => panic!("expected unevaluable, got {v}"),
        }
    }

    #[test]
    fn reduce_and_evaluate_match_ladder_closed_form() {
        for (n, y, d) in [(2usize, 1i64, 1i64), (2, 1, 2), (3, 1, 2)] {
            let s = pn_pair(n, y);
            let c = ctx(&s);
            let beta = line(n, d);
            let e = s.geom.y_degree(&beta) as u32;
            let leaf = point_leaf(&s, beta.clone(), vec![e, 0]);
            let (expr, _) = reduce(&c, &leaf, TieBreak::SmallestIndex).unwrap();
            let value = evaluate(&c, &expr).unwrap();
            let expected = relative_point_invariant(&s.geom, &s.ring, &beta).unwrap();
            assert_eq!(value, Evaluation::Value(expected));
        }
    }

    #[test]
    fn confluence_on_mixed_tangency() {
        let s = pn_pair(2, 1);
        let c = ctx(&s);
        let leaf = point_leaf(&s, line(2, 2), vec![1, 1]);
        let (small, _) = reduce(&c, &leaf, TieBreak::SmallestIndex).unwrap();
        let (large, _) = reduce(&c, &leaf, TieBreak::LargestIndex).unwrap();
        let vs = evaluate(&c, &small).unwrap();
        let vl = evaluate(&c, &large).unwrap();
        assert_eq!(vs, vl);
        assert!(matches!(vs, Evaluation::Value(_)));
    }
}
