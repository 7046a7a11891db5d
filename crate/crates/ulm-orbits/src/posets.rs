//! Order theory for classifying module elements: the fundamental poset of
//! cyclic-factor positions, order ideals in its support restriction, and the
//! dictionary between ideals and admissible height sequences.
//!
//! A point `(v, alpha)` stands for the residue of height `v` inside a cyclic
//! summand with exponent `alpha`.  Points are ordered by
//! `(v, alpha) >= (v', alpha')` iff `v' >= v` and
//! `alpha' - v' <= alpha - v`: a bigger point has smaller height and larger
//! remaining order, exactly when some homomorphism of cyclic modules carries
//! the bigger residue onto the smaller one.
//!
//! For a shape with Ulm invariants `f`, the support poset `P_f` keeps the
//! points whose exponent actually occurs.  Its finite order ideals correspond
//! one-to-one with the height sequences realised by elements of the module;
//! [`kappa`] and [`ideal_from_sequence`] are the two directions of that
//! bijection.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::module::{ensure_within, Element, ModuleShape, UlmSequence};
use crate::ring::Height;

/// A point of the fundamental poset: height `v` inside an exponent-`alpha`
/// cyclic summand, with `0 <= v < alpha`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PElem {
    v: u32,
    alpha: u32,
}

impl fmt::Debug for PElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PElem({}, {})", self.v, self.alpha)
    }
}

impl fmt::Display for PElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.v, self.alpha)
    }
}

impl PElem {
    pub fn new(v: u32, alpha: u32) -> Result<PElem> {
        if v >= alpha {
            return Err(Error::OutsidePoset(format!(
                "({v}, {alpha}) needs height strictly below the exponent"
            )));
        }
        Ok(PElem { v, alpha })
    }

    pub fn height(&self) -> u32 {
        self.v
    }

    pub fn exponent(&self) -> u32 {
        self.alpha
    }

    /// Remaining order: how many times the uniformiser still acts without
    /// killing the residue.
    pub fn residual(&self) -> u32 {
        self.alpha - self.v
    }

    /// The fundamental-poset comparison `self >= other`.
    pub fn dominates(&self, other: &PElem) -> bool {
        other.v >= self.v && other.residual() <= self.residual()
    }

    /// Partial comparison in the fundamental order.  The derived `Ord` on the
    /// raw pair is only a storage order; use this for the mathematics.
    pub fn compare(&self, other: &PElem) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        match (self.dominates(other), other.dominates(self)) {
            (true, true) => Some(Equal),
            (true, false) => Some(Greater),
            (false, true) => Some(Less),
            (false, false) => None,
        }
    }
}

/// A finite poset over explicit labels with a precomputed comparison table.
///
/// Construction validates the partial-order axioms, so downstream consumers
/// (cover computation, chain search, isomorphism checks) can trust the table.
#[derive(Clone, Debug)]
pub struct FinitePoset<T> {
    elements: Vec<T>,
    le: Vec<bool>,
}

impl<T: Clone + Eq + fmt::Debug> FinitePoset<T> {
    /// Builds the poset on `elements` with `le_fn(x, y)` meaning `x <= y`,
    /// rejecting duplicate labels and any violation of reflexivity,
    /// antisymmetry, or transitivity.
    pub fn from_le_fn(elements: Vec<T>, le_fn: impl Fn(&T, &T) -> bool) -> Result<FinitePoset<T>> {
        let n = elements.len();
        for i in 0..n {
            for j in 0..i {
                if elements[i] == elements[j] {
                    return Err(Error::DuplicateLabels);
                }
            }
        }
        let mut le = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                le[i * n + j] = le_fn(&elements[i], &elements[j]);
            }
        }
        for i in 0..n {
            if !le[i * n + i] {
                return Err(Error::InvalidPoset(format!(
                    "relation is not reflexive at {:?}",
                    elements[i]
                )));
            }
            for j in 0..n {
                if i != j && le[i * n + j] && le[j * n + i] {
                    return Err(Error::InvalidPoset(format!(
                        "relation is not antisymmetric on {:?}, {:?}",
                        elements[i], elements[j]
                    )));
                }
                for m in 0..n {
                    if le[i * n + j] && le[j * n + m] && !le[i * n + m] {
                        return Err(Error::InvalidPoset(format!(
                            "relation is not transitive through {:?}",
                            elements[j]
                        )));
                    }
                }
            }
        }
        Ok(FinitePoset { elements, le })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn index_of(&self, label: &T) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }

    /// Whether `elements()[i] <= elements()[j]`.
    pub fn le(&self, i: usize, j: usize) -> bool {
        self.le[i * self.elements.len() + j]
    }

    fn strictly_less(&self, i: usize, j: usize) -> bool {
        i != j && self.le(i, j)
    }

    /// The covering pairs `(lower, upper)` of the order: `lower < upper` with
    /// nothing strictly between.  This is the edge set of the Hasse diagram,
    /// listed in index order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.elements.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if !self.strictly_less(i, j) {
                    continue;
                }
                let blocked = (0..n)
                    .any(|m| self.strictly_less(i, m) && self.strictly_less(m, j));
                if !blocked {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Length, in edges, of the longest chain of the poset; `0` for the empty
    /// or antichain case.
    pub fn longest_chain_edges(&self) -> u64 {
        let n = self.elements.len();
        let mut depth = vec![u64::MAX; n];
        fn walk<T: Clone + Eq + fmt::Debug>(
            poset: &FinitePoset<T>,
            depth: &mut [u64],
            j: usize,
        ) -> u64 {
            if depth[j] != u64::MAX {
                return depth[j];
            }
            let mut best = 0;
            for i in 0..poset.len() {
                if poset.strictly_less(i, j) {
                    best = best.max(walk(poset, depth, i) + 1);
                }
            }
            depth[j] = best;
            best
        }
        (0..n).map(|j| walk(self, &mut depth, j)).max().unwrap_or(0)
    }

    /// The same order under new labels, which must remain pairwise distinct.
    pub fn relabel<U: Clone + Eq + fmt::Debug>(
        &self,
        f: impl Fn(&T) -> U,
    ) -> Result<FinitePoset<U>> {
        let elements: Vec<U> = self.elements.iter().map(&f).collect();
        for i in 0..elements.len() {
            for j in 0..i {
                if elements[i] == elements[j] {
                    return Err(Error::DuplicateLabels);
                }
            }
        }
        Ok(FinitePoset { elements, le: self.le.clone() })
    }

    /// Label-preserving comparison: `true` when both posets carry the same
    /// label set with the same order relation.
    pub fn isomorphic_by_labels(&self, other: &FinitePoset<T>) -> Result<bool> {
        if self.elements.len() != other.elements.len() {
            return Ok(false);
        }
        let mut map = Vec::with_capacity(self.elements.len());
        for e in &self.elements {
            match other.index_of(e) {
                Some(j) => map.push(j),
                None => return Ok(false),
            }
        }
        for i in 0..self.elements.len() {
            for j in 0..self.elements.len() {
                if self.le(i, j) != other.le(map[i], map[j]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl<T: Clone + Eq + Ord + fmt::Debug> FinitePoset<T> {
    /// The lattice of downward-closed subsets of the poset, ordered by
    /// inclusion, each labelled by its sorted member list.  Enumerates the
    /// `2^len` candidate subsets, so that count must fit under `bound`.
    pub fn downset_lattice(&self, bound: u64) -> Result<FinitePoset<Vec<T>>> {
        let n = self.len();
        ensure_within(1u128 << n.min(127), bound)?;
        let mut labels = Vec::new();
        for mask in 0u64..(1u64 << n) {
            let member = |i: usize| mask >> i & 1 == 1;
            let closed = (0..n)
                .all(|i| !member(i) || (0..n).all(|j| !self.le(j, i) || member(j)));
            if closed {
                let mut members: Vec<T> = (0..n)
                    .filter(|&i| member(i))
                    .map(|i| self.elements[i].clone())
                    .collect();
                members.sort();
                labels.push(members);
            }
        }
        labels.sort_by_key(|m| (m.len(), m.clone()));
        FinitePoset::from_le_fn(labels, |x, y| x.iter().all(|e| y.contains(e)))
    }
}

/// The fundamental poset restricted to exponents `1..=max_alpha`, elements
/// listed by ascending `(alpha, v)`.
pub fn fundamental_poset(max_alpha: u32) -> Result<FinitePoset<PElem>> {
    let mut elems = Vec::new();
    for alpha in 1..=max_alpha {
        for v in 0..alpha {
            elems.push(PElem { v, alpha });
        }
    }
    FinitePoset::from_le_fn(elems, |x, y| y.dominates(x))
}

/// The support poset `P_f` of a shape: fundamental-poset points whose
/// exponent occurs among the cyclic factors.
pub fn support_poset(shape: &ModuleShape) -> Result<FinitePoset<PElem>> {
    let mut elems = Vec::new();
    for (&alpha, _) in shape.multiplicities() {
        for v in 0..alpha {
            elems.push(PElem { v, alpha });
        }
    }
    FinitePoset::from_le_fn(elems, |x, y| y.dominates(x))
}

fn in_support(shape: &ModuleShape, point: &PElem) -> bool {
    shape.multiplicities().contains_key(&point.alpha)
}

/// A finite order ideal of a support poset, stored as its canonical antichain
/// of maximal points (sorted by the raw `(v, alpha)` order).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OrderIdeal {
    antichain: Vec<PElem>,
}

impl fmt::Debug for OrderIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrderIdeal{{")?;
        for (i, g) in self.antichain.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}

impl OrderIdeal {
    /// The empty ideal.
    pub fn empty() -> OrderIdeal {
        OrderIdeal { antichain: Vec::new() }
    }

    /// The down-closure of `generators` inside the support poset of `shape`.
    /// Generators must lie in that poset; redundant ones are dropped.
    pub fn from_generators(shape: &ModuleShape, generators: &[PElem]) -> Result<OrderIdeal> {
        for g in generators {
            if !in_support(shape, g) {
                return Err(Error::OutsidePoset(format!(
                    "{g} has no cyclic factor of exponent {} in {shape}",
                    g.alpha
                )));
            }
        }
        let distinct: BTreeSet<PElem> = generators.iter().copied().collect();
        let mut antichain: Vec<PElem> = distinct
            .iter()
            .filter(|g| !distinct.iter().any(|h| h != *g && h.dominates(g)))
            .copied()
            .collect();
        antichain.sort();
        Ok(OrderIdeal { antichain })
    }

    /// The maximal points, smallest antichain generating the ideal.
    pub fn antichain(&self) -> &[PElem] {
        &self.antichain
    }

    pub fn is_empty(&self) -> bool {
        self.antichain.is_empty()
    }

    /// All points of the ideal, i.e. the support-poset points below some
    /// maximal point, sorted by the raw `(v, alpha)` order.
    pub fn downset(&self, shape: &ModuleShape) -> Vec<PElem> {
        let mut out = Vec::new();
        for (&alpha, _) in shape.multiplicities() {
            for v in 0..alpha {
                let p = PElem { v, alpha };
                if self.contains(&p) {
                    out.push(p);
                }
            }
        }
        out.sort();
        out
    }

    /// Membership of a single point.
    pub fn contains(&self, point: &PElem) -> bool {
        self.antichain.iter().any(|g| g.dominates(point))
    }

    /// Ideal inclusion `other subset-of self`.
    pub fn includes(&self, other: &OrderIdeal) -> bool {
        other.antichain.iter().all(|g| self.contains(g))
    }
}

/// The height sequence `kappa(I)` of an order ideal: entry `n` is the least
/// height among the maximal points shifted down `n` times, with points
/// dropped once the shift exhausts their residual order.
pub fn kappa(ideal: &OrderIdeal) -> UlmSequence {
    let mut finite = Vec::new();
    for step in 0u32.. {
        let next = ideal
            .antichain
            .iter()
            .filter(|g| g.v + step < g.alpha)
            .map(|g| g.v + step)
            .min();
        match next {
            Some(h) => finite.push(h),
            None => break,
        }
    }
    UlmSequence::new(finite).expect("shifted minima increase strictly")
}

/// Whether `seq` is realised by some element of `shape`: every jump of the
/// sequence (including the final jump to infinity) must land after a height
/// where the corresponding Ulm invariant is positive.
pub fn is_admissible(shape: &ModuleShape, seq: &UlmSequence) -> bool {
    let entries = seq.finite_part();
    let invariants = shape.ulm_invariants();
    if entries.iter().any(|&h| h >= shape.exponent()) {
        return false;
    }
    for i in 1..=entries.len() {
        let gap = match seq.entry(i) {
            Height::Finite(h) => h > entries[i - 1] + 1,
            Height::Infinite => true,
        };
        if gap && !invariants.contains_key(&entries[i - 1]) {
            return false;
        }
    }
    true
}

/// All admissible height sequences of `shape`, sorted lexicographically on
/// the finite parts.  Enumerates the `2^k` candidate subsets of heights, so
/// the count must fit under `bound`.
pub fn admissible_sequences(shape: &ModuleShape, bound: u64) -> Result<Vec<UlmSequence>> {
    let k = shape.exponent();
    ensure_within(1u128 << k.min(127), bound)?;
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << k) {
        let finite: Vec<u32> = (0..k).filter(|&h| mask >> h & 1 == 1).collect();
        let seq = UlmSequence::new(finite).expect("mask heights are increasing");
        if is_admissible(shape, &seq) {
            out.push(seq);
        }
    }
    out.sort();
    Ok(out)
}

/// All finite order ideals of the support poset of `shape`, sorted by size
/// and then by their point lists.  Enumerates subsets of the support poset,
/// so `2^|P_f|` must fit under `bound`.
pub fn enumerate_ideals(shape: &ModuleShape, bound: u64) -> Result<Vec<OrderIdeal>> {
    let poset = support_poset(shape)?;
    let n = poset.len();
    ensure_within(1u128 << n.min(127), bound)?;
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let member = |i: usize| mask >> i & 1 == 1;
        let closed = (0..n).all(|i| {
            !member(i) || (0..n).all(|j| !poset.le(j, i) || member(j))
        });
        if !closed {
            continue;
        }
        let points: Vec<PElem> =
            (0..n).filter(|&i| member(i)).map(|i| poset.elements()[i]).collect();
        out.push(OrderIdeal::from_generators(shape, &points)?);
    }
    out.sort_by_key(|ideal| (ideal.downset(shape).len(), ideal.downset(shape)));
    Ok(out)
}

/// The lattice `J(P_f)` of order ideals of the support poset, ordered by
/// inclusion, with labels in [`enumerate_ideals`] order.
pub fn ideal_lattice(shape: &ModuleShape, bound: u64) -> Result<FinitePoset<OrderIdeal>> {
    let ideals = enumerate_ideals(shape, bound)?;
    FinitePoset::from_le_fn(ideals, |x, y| y.includes(x))
}

/// The ideal with `kappa(I) = seq`, for an admissible sequence: one maximal
/// point per jump of the sequence, recording the height and the exponent of
/// the cyclic factor forced by that jump.
pub fn ideal_from_sequence(shape: &ModuleShape, seq: &UlmSequence) -> Result<OrderIdeal> {
    if !is_admissible(shape, seq) {
        return Err(Error::NotAdmissible(format!(
            "sequence {seq} is not realised in {shape}"
        )));
    }
    let entries = seq.finite_part();
    let mut generators = Vec::new();
    for i in 1..=entries.len() {
        let gap = match seq.entry(i) {
            Height::Finite(h) => h > entries[i - 1] + 1,
            Height::Infinite => true,
        };
        if gap {
            let prev = entries[i - 1];
            generators.push(PElem {
                v: prev + 1 - i as u32,
                alpha: prev + 1,
            });
        }
    }
    OrderIdeal::from_generators(shape, &generators)
}

/// The ideal attached to a module element: the down-closure of the points
/// `(valuation(c), alpha)` over the nonzero coordinates `c` of the element.
/// Its `kappa` image recovers the height sequence of the element.
pub fn ideal_of_element(shape: &ModuleShape, a: &Element) -> Result<OrderIdeal> {
    let ring = shape.ring();
    let mut generators = Vec::new();
    for (c, &alpha) in shape.factor_exponents().iter().enumerate() {
        let coord = a.coords()[c];
        if let Height::Finite(v) = ring.valuation(coord) {
            generators.push(PElem { v, alpha });
        }
    }
    OrderIdeal::from_generators(shape, &generators)
}

/// Element-level degeneration through the ideal dictionary: `a` degenerates
/// to `b` exactly when the ideal of `a` contains the ideal of `b`.
pub fn ideal_criterion(shape: &ModuleShape, a: &Element, b: &Element) -> Result<bool> {
    Ok(ideal_of_element(shape, a)?.includes(&ideal_of_element(shape, b)?))
}

/// Direct membership criterion for the ideal of an element, bypassing the
/// ideal construction: `(v, alpha)` lies in the ideal exactly when the
/// element survives `alpha - v - 1` uniformiser shifts without its height
/// outrunning `alpha - 1`.
pub fn element_ideal_contains(shape: &ModuleShape, a: &Element, point: &PElem) -> Result<bool> {
    if !in_support(shape, point) {
        return Err(Error::OutsidePoset(format!(
            "{point} has no cyclic factor of exponent {} in {shape}",
            point.alpha
        )));
    }
    let seq = shape.ulm_sequence(a);
    let steps = (point.alpha - point.v - 1) as usize;
    Ok(seq.entry(steps) <= Height::Finite(point.alpha - 1))
}

/// The poset of element orbits: admissible height sequences ordered by
/// reverse domination, so that a degeneration moves its source downward and
/// the all-infinite sequence of the zero element sits at the bottom.
pub fn orbit_poset(shape: &ModuleShape, bound: u64) -> Result<FinitePoset<UlmSequence>> {
    let seqs = admissible_sequences(shape, bound)?;
    FinitePoset::from_le_fn(seqs, |x, y| x.dominates(y))
}
