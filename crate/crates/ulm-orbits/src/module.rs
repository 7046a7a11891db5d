//! Finite modules `⊕ (R/p^α)^{m_α}`, their elements, and height data.
//!
//! A [`ModuleShape`] fixes the isomorphism type by its multiplicity function
//! `α ↦ m_α` and lays the factors out as concrete coordinates in ascending
//! order of exponent.  Elements are coordinate vectors; coordinate `c` lives
//! in `R/p^{α_c}` and is stored as a scalar code below `q^{α_c}`.  All scalar
//! coefficients act through the shape's working ring `R/p^k`, where `k` is
//! the exponent (the largest `α`).

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ring::{Backend, Height, RingSpec, Scalar};

/// The annihilator exponent `k` is capped so that `q^k` stays a valid ring
/// modulus; see [`RingSpec`].
const MAX_EXPONENT: u32 = 32;

/// A finite module `⊕_α (R/p^α)^{m_α}` over a discrete valuation ring.
#[derive(Clone, PartialEq, Eq)]
pub struct ModuleShape {
    ring: RingSpec,
    multiplicities: BTreeMap<u32, u32>,
    /// Exponent `α_c` of each coordinate, ascending.
    factors: Vec<u32>,
    /// `q^{α_c}` for each coordinate: the number of residues it ranges over.
    radix: Vec<u64>,
    /// Total number of elements, saturating at `u128::MAX`.
    element_count: u128,
}

impl fmt::Debug for ModuleShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModuleShape")
            .field("ring", &self.ring)
            .field("multiplicities", &self.multiplicities)
            .finish()
    }
}

impl fmt::Display for ModuleShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0 over {}", self.ring);
        }
        let parts: Vec<String> = self
            .multiplicities
            .iter()
            .map(|(&alpha, &m)| {
                if m == 1 {
                    format!("(R/p^{alpha})")
                } else {
                    format!("(R/p^{alpha})^{m}")
                }
            })
            .collect();
        write!(f, "{} over {}", parts.join(" + "), self.ring)
    }
}

impl ModuleShape {
    /// Builds a shape over the given ring backend.  Multiplicity entries with
    /// `m = 0` are dropped; exponents must be positive and at most 32.  The
    /// working precision of the attached ring is exactly the exponent of the
    /// module (0 for the zero module).
    pub fn new(backend: Backend, base: u64, multiplicities: &BTreeMap<u32, u32>) -> Result<ModuleShape> {
        let mut cleaned = BTreeMap::new();
        for (&alpha, &m) in multiplicities {
            if m == 0 {
                continue;
            }
            if alpha == 0 {
                return Err(Error::InvalidShape(
                    "cyclic factor with exponent 0 is trivial; drop it".into(),
                ));
            }
            if alpha > MAX_EXPONENT {
                return Err(Error::InvalidShape(format!(
                    "exponent {alpha} exceeds the supported maximum {MAX_EXPONENT}"
                )));
            }
            cleaned.insert(alpha, m);
        }
        let exponent = cleaned.keys().next_back().copied().unwrap_or(0);
        let ring = match backend {
            Backend::IntegerLocal => RingSpec::integer_local(base, exponent)?,
            Backend::PolynomialLocal => RingSpec::polynomial_local(base, exponent)?,
        };
        let mut factors = Vec::new();
        for (&alpha, &m) in &cleaned {
            for _ in 0..m {
                factors.push(alpha);
            }
        }
        let q = ring.residue_field_order();
        let radix: Vec<u64> = factors.iter().map(|&a| q.pow(a)).collect();
        let element_count = radix
            .iter()
            .try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
            .unwrap_or(u128::MAX);
        Ok(ModuleShape { ring, multiplicities: cleaned, factors, radix, element_count })
    }

    /// `⊕ (Z/p^α)^{m_α}` from `(α, m_α)` pairs.
    pub fn integer_local(p: u64, pairs: &[(u32, u32)]) -> Result<ModuleShape> {
        Self::new(Backend::IntegerLocal, p, &pairs.iter().copied().collect())
    }

    /// `⊕ (F_q[t]/t^α)^{m_α}` from `(α, m_α)` pairs.
    pub fn polynomial_local(q: u64, pairs: &[(u32, u32)]) -> Result<ModuleShape> {
        Self::new(Backend::PolynomialLocal, q, &pairs.iter().copied().collect())
    }

    /// The working ring `R/p^k`, where `k` is the exponent of the module.
    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    /// The multiplicity function `α ↦ m_α` (positive entries only).
    pub fn multiplicities(&self) -> &BTreeMap<u32, u32> {
        &self.multiplicities
    }

    /// The exponent `k`: the least `k` with `p^k A = 0`.
    pub fn exponent(&self) -> u32 {
        self.ring.precision()
    }

    pub fn is_zero(&self) -> bool {
        self.factors.is_empty()
    }

    /// The number of cyclic coordinates.
    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    /// Exponents `α_c` per coordinate, ascending.
    pub fn factor_exponents(&self) -> &[u32] {
        &self.factors
    }

    /// The number of elements (saturating at `u128::MAX`).
    pub fn element_count(&self) -> u128 {
        self.element_count
    }

    /// `log_q` of the number of elements: `Σ α m_α`.
    pub fn log_order(&self) -> u64 {
        self.factors.iter().map(|&a| a as u64).sum()
    }

    /// The Ulm invariants `β ↦ f_β`: the number of independent height-`β`
    /// generators, which for this shape is `f_β = m_{β+1}`.  Only positive
    /// entries appear.
    pub fn ulm_invariants(&self) -> BTreeMap<u32, u32> {
        self.multiplicities.iter().map(|(&alpha, &m)| (alpha - 1, m)).collect()
    }

    pub fn zero_element(&self) -> Element {
        Element { coords: vec![Scalar::ZERO; self.factors.len()] }
    }

    /// The canonical generator `e_c` (1 in coordinate `c`).
    pub fn generator(&self, c: usize) -> Element {
        assert!(c < self.factors.len(), "generator index {c} out of range");
        let mut e = self.zero_element();
        e.coords[c] = Scalar::from_code_unchecked(1);
        e
    }

    /// Checks that an element fits this shape: right arity, every coordinate
    /// reduced below its radix.
    pub fn check_element(&self, e: &Element) -> Result<()> {
        if e.coords.len() != self.factors.len() {
            return Err(Error::ShapeMismatch(format!(
                "element has {} coordinates, shape has {} factors",
                e.coords.len(),
                self.factors.len()
            )));
        }
        for (c, &x) in e.coords.iter().enumerate() {
            if x.code() >= self.radix[c] {
                return Err(Error::ShapeMismatch(format!(
                    "coordinate {c} has code {} but only {} residues",
                    x.code(),
                    self.radix[c]
                )));
            }
        }
        Ok(())
    }

    /// Builds an element from coordinate codes.
    pub fn element_from_codes(&self, codes: &[u64]) -> Result<Element> {
        if codes.len() != self.factors.len() {
            return Err(Error::ShapeMismatch(format!(
                "element has {} coordinates, shape has {} factors",
                codes.len(),
                self.factors.len()
            )));
        }
        let e = Element { coords: codes.iter().map(|&c| Scalar::from_code_unchecked(c)).collect() };
        self.check_element(&e)?;
        Ok(e)
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .zip(&self.factors)
            .map(|((&x, &y), &alpha)| self.ring.reduce_mod_power(self.ring.add(x, y), alpha))
            .collect();
        Element { coords }
    }

    pub fn neg(&self, a: &Element) -> Element {
        let coords = a
            .coords
            .iter()
            .zip(&self.factors)
            .map(|(&x, &alpha)| self.ring.reduce_mod_power(self.ring.neg(x), alpha))
            .collect();
        Element { coords }
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        self.add(a, &self.neg(b))
    }

    /// The scalar action `r · a`, coordinate `c` computed mod `p^{α_c}`.
    pub fn scale(&self, r: Scalar, a: &Element) -> Element {
        let coords = a
            .coords
            .iter()
            .zip(&self.factors)
            .map(|(&x, &alpha)| self.ring.reduce_mod_power(self.ring.mul(r, x), alpha))
            .collect();
        Element { coords }
    }

    /// Multiplication by the uniformizer `p`.
    pub fn shift(&self, a: &Element) -> Element {
        let coords = a
            .coords
            .iter()
            .zip(&self.factors)
            .map(|(&x, &alpha)| self.ring.reduce_mod_power(self.ring.shift_up(x, 1), alpha))
            .collect();
        Element { coords }
    }

    /// `Σ coeffs[i] · elems[i]`.
    pub fn linear_combination(&self, elems: &[Element], coeffs: &[Scalar]) -> Result<Element> {
        if elems.len() != coeffs.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} elements but {} coefficients",
                elems.len(),
                coeffs.len()
            )));
        }
        let mut acc = self.zero_element();
        for (e, &r) in elems.iter().zip(coeffs) {
            acc = self.add(&acc, &self.scale(r, e));
        }
        Ok(acc)
    }

    /// The height `h(a)`: the minimum coordinate valuation, infinite exactly
    /// for zero.
    pub fn height(&self, a: &Element) -> Height {
        a.coords
            .iter()
            .map(|&x| self.ring.valuation(x))
            .min()
            .unwrap_or(Height::Infinite)
    }

    /// The least `m` with `p^m a = 0`.
    pub fn order_exponent(&self, a: &Element) -> u32 {
        a.coords
            .iter()
            .zip(&self.factors)
            .map(|(&x, &alpha)| match self.ring.valuation(x) {
                Height::Infinite => 0,
                Height::Finite(v) => alpha - v,
            })
            .max()
            .unwrap_or(0)
    }

    /// The Ulm sequence of `a`: the heights `h(a), h(pa), h(p^2 a), ...` up
    /// to the last finite one.  The finite entries are strictly increasing;
    /// the zero element gives the empty (all-infinite) sequence.
    pub fn ulm_sequence(&self, a: &Element) -> UlmSequence {
        let mut finite = Vec::new();
        let mut cur = a.clone();
        while let Height::Finite(h) = self.height(&cur) {
            finite.push(h);
            cur = self.shift(&cur);
        }
        UlmSequence { finite }
    }

    /// The mixed-radix index of an element: coordinate 0 is the least
    /// significant digit.  Only meaningful when the element count fits `u64`.
    pub fn element_index(&self, a: &Element) -> u64 {
        debug_assert!(self.element_count <= u64::MAX as u128);
        let mut idx = 0u64;
        for (&x, &r) in a.coords.iter().zip(&self.radix).rev() {
            idx = idx * r + x.code();
        }
        idx
    }

    /// Inverse of [`ModuleShape::element_index`].
    pub fn element_from_index(&self, mut idx: u64) -> Element {
        let mut coords = Vec::with_capacity(self.factors.len());
        for &r in &self.radix {
            coords.push(Scalar::from_code_unchecked(idx % r));
            idx /= r;
        }
        debug_assert!(idx == 0, "index out of range");
        Element { coords }
    }

    /// All elements in index order.  Fails if the count exceeds `bound`.
    pub fn enumerate_elements(&self, bound: u64) -> Result<Vec<Element>> {
        ensure_within(self.element_count, bound)?;
        Ok((0..self.element_count as u64).map(|i| self.element_from_index(i)).collect())
    }

    /// Checks that two shapes live over the same ring (backend and residue
    /// field), as needed for maps between them.
    pub fn check_same_ring(&self, other: &ModuleShape) -> Result<()> {
        if self.ring.backend() != other.ring.backend()
            || self.ring.residue_field_order() != other.ring.residue_field_order()
        {
            return Err(Error::RingMismatch(format!(
                "{} vs {}",
                self.ring, other.ring
            )));
        }
        Ok(())
    }
}

/// Guards an enumeration of `needed` states against a budget.
pub fn ensure_within(needed: u128, bound: u64) -> Result<()> {
    if needed > bound as u128 {
        Err(Error::BoundExceeded { needed, bound })
    } else {
        Ok(())
    }
}

/// An element of a [`ModuleShape`]: one scalar per cyclic coordinate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    coords: Vec<Scalar>,
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let codes: Vec<u64> = self.coords.iter().map(|c| c.code()).collect();
        write!(f, "Element{codes:?}")
    }
}

impl Element {
    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.code() == 0)
    }
}

/// A finite tuple of elements of one module; the unit orbits and
/// degenerations act on these.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementTuple {
    elems: Vec<Element>,
}

impl fmt::Debug for ElementTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.elems).finish()
    }
}

impl ElementTuple {
    /// Wraps a nonempty list of elements.
    pub fn new(elems: Vec<Element>) -> Result<ElementTuple> {
        if elems.is_empty() {
            return Err(Error::ShapeMismatch("tuples must have at least one entry".into()));
        }
        Ok(ElementTuple { elems })
    }

    pub fn entries(&self) -> &[Element] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }
}

/// The Ulm sequence of an element: strictly increasing finite heights
/// followed by an implicit tail of infinities.  The zero element has the
/// empty sequence (all entries infinite).
///
/// The derived `Ord` (lexicographic on the finite part) is used only as a
/// storage order; the mathematically meaningful comparison is
/// [`UlmSequence::dominates`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UlmSequence {
    finite: Vec<u32>,
}

impl fmt::Debug for UlmSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UlmSequence({self})")
    }
}

impl fmt::Display for UlmSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in &self.finite {
            write!(f, "{h},")?;
        }
        write!(f, "inf")
    }
}

impl UlmSequence {
    /// Builds a sequence from its finite entries, which must be strictly
    /// increasing.
    pub fn new(finite: Vec<u32>) -> Result<UlmSequence> {
        if !finite.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Parse(format!(
                "height entries must be strictly increasing, got {finite:?}"
            )));
        }
        Ok(UlmSequence { finite })
    }

    /// The all-infinite sequence (of the zero element).
    pub fn infinite() -> UlmSequence {
        UlmSequence { finite: Vec::new() }
    }

    pub fn finite_part(&self) -> &[u32] {
        &self.finite
    }

    /// The `n`-th entry, infinite past the finite part.
    pub fn entry(&self, n: usize) -> Height {
        self.finite.get(n).map_or(Height::Infinite, |&h| Height::Finite(h))
    }

    pub fn is_infinite(&self) -> bool {
        self.finite.is_empty()
    }

    /// Term-by-term `self_n >= other_n` over all indices, comparing with
    /// infinity past the finite parts.
    pub fn dominates(&self, other: &UlmSequence) -> bool {
        self.finite.len() <= other.finite.len()
            && self.finite.iter().zip(&other.finite).all(|(a, b)| a >= b)
    }
}

/// Splits a finite abelian group given by cyclic factor orders into its
/// primary parts: one [`ModuleShape`] per prime, over the integers localised
/// at that prime.
pub fn primary_decomposition(orders: &[u64]) -> Result<BTreeMap<u64, ModuleShape>> {
    let mut per_prime: BTreeMap<u64, BTreeMap<u32, u32>> = BTreeMap::new();
    for &n in orders {
        if n == 0 {
            return Err(Error::InvalidShape("cyclic factor of order 0".into()));
        }
        let mut m = n;
        let mut d = 2u64;
        while d * d <= m {
            if m % d == 0 {
                let mut alpha = 0u32;
                while m % d == 0 {
                    m /= d;
                    alpha += 1;
                }
                *per_prime.entry(d).or_default().entry(alpha).or_insert(0) += 1;
            }
            d += 1;
        }
        if m > 1 {
            let mut alpha = 0u32;
            let mut left = n;
            while left % m == 0 {
                left /= m;
                alpha += 1;
            }
            *per_prime.entry(m).or_default().entry(alpha).or_insert(0) += 1;
        }
    }
    per_prime
        .into_iter()
        .map(|(p, mult)| ModuleShape::new(Backend::IntegerLocal, p, &mult).map(|s| (p, s)))
        .collect()
}
