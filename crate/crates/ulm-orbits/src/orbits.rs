//! Orbit and degeneration decisions, constructive witness maps, atoms, and
//! orbit enumeration.
//!
//! Two `n`-tuples lie in the same automorphism orbit exactly when their
//! height tables agree, and `ā` degenerates to `b̄` (some endomorphism sends
//! `ā` to `b̄` entrywise) exactly when the tables of `ā` are contained level
//! by level in those of `b̄`.  The module decides both questions through the
//! canonical forms of [`crate::linear`], constructs witnessing homomorphisms
//! by a generator-by-generator search, and enumerates whole orbit spaces.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exec;
use crate::linear::{
    self, height_table, height_table_at, howell_form, kernel_form, SubmoduleForm,
};
use crate::module::{ensure_within, Element, ElementTuple, ModuleShape, UlmSequence};
use crate::ring::Scalar;

/// Whether some automorphism of the shape carries `a` to `b` entrywise.
pub fn same_orbit(shape: &ModuleShape, a: &ElementTuple, b: &ElementTuple) -> Result<bool> {
    check_arity(a, b)?;
    Ok(height_table(shape, a)? == height_table(shape, b)?)
}

/// Whether some endomorphism of the shape carries `a` to `b` entrywise.
pub fn degenerates(shape: &ModuleShape, a: &ElementTuple, b: &ElementTuple) -> Result<bool> {
    Ok(degeneration_failure(shape, a, shape, b)?.is_none())
}

/// Whether some homomorphism from `shape_a` to `shape_b` (over the same
/// ring) carries `a` to `b` entrywise.
pub fn degenerates_between(
    shape_a: &ModuleShape,
    a: &ElementTuple,
    shape_b: &ModuleShape,
    b: &ElementTuple,
) -> Result<bool> {
    Ok(degeneration_failure(shape_a, a, shape_b, b)?.is_none())
}

/// The first obstruction to a degeneration from `a` to `b`, if any: a level
/// `h` and a coefficient vector whose combination has height `>= h` on the
/// `a` side but drops below `h` on the `b` side.
pub fn degeneration_failure(
    shape_a: &ModuleShape,
    a: &ElementTuple,
    shape_b: &ModuleShape,
    b: &ElementTuple,
) -> Result<Option<(u32, Vec<Scalar>)>> {
    shape_a.check_same_ring(shape_b)?;
    check_arity(a, b)?;
    let precision = shape_a.exponent().max(shape_b.exponent());
    let ring = shape_a.ring().with_precision(precision)?;
    let ta = height_table_at(shape_a, a, precision)?;
    let tb = height_table_at(shape_b, b, precision)?;
    Ok(linear::table_inclusion_failure(&ring, &ta, &tb))
}

fn check_arity(a: &ElementTuple, b: &ElementTuple) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch(format!(
            "tuples have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// The degeneration invariant `N(ā) = Σ_h log_q |M_h(ā)|`.  It strictly
/// increases along strict degenerations and is bounded by `n·k·(k+1)`, so no
/// chain of strict degenerations is longer than that.
pub fn n_invariant(shape: &ModuleShape, t: &ElementTuple) -> Result<u64> {
    Ok(height_table(shape, t)?.iter().map(SubmoduleForm::log_cardinality).sum())
}

/// One orbit of `n`-tuples: its least-index representative, its size, and
/// the height table shared by all its members.
#[derive(Clone, Debug)]
pub struct OrbitInfo {
    pub representative: ElementTuple,
    pub size: u64,
    pub table: Vec<SubmoduleForm>,
}

impl OrbitInfo {
    /// `Σ_h log_q |M_h|` for this orbit.
    pub fn n_invariant(&self) -> u64 {
        self.table.iter().map(SubmoduleForm::log_cardinality).sum()
    }
}

/// All orbits of `n`-tuples, sorted by the index of their representative
/// (which is the least tuple index in the orbit).  Fails if there are more
/// than `bound` tuples to scan.
pub fn enumerate_tuple_orbits(
    shape: &ModuleShape,
    n: usize,
    bound: u64,
) -> Result<Vec<OrbitInfo>> {
    if n == 0 {
        return Err(Error::ShapeMismatch("tuples must have at least one entry".into()));
    }
    let total = shape.element_count().checked_pow(n as u32).unwrap_or(u128::MAX);
    ensure_within(total, bound)?;
    let total = total as u64;
    let elem_count = shape.element_count() as u64;

    type Buckets = HashMap<Vec<SubmoduleForm>, (u64, u64)>;
    let merged: Buckets = exec::fold_indexed(
        total,
        Buckets::new,
        |mut acc: Buckets, idx| {
            let tuple = tuple_from_index(shape, elem_count, idx, n);
            let table = height_table(shape, &tuple).expect("enumerated tuples fit the shape");
            let entry = acc.entry(table).or_insert((idx, 0));
            entry.0 = entry.0.min(idx);
            entry.1 += 1;
            acc
        },
        |mut a: Buckets, b: Buckets| {
            for (key, (idx, count)) in b {
                let entry = a.entry(key).or_insert((idx, 0));
                entry.0 = entry.0.min(idx);
                entry.1 += count;
            }
            a
        },
    );

    let mut orbits: Vec<OrbitInfo> = merged
        .into_iter()
        .map(|(table, (idx, size))| OrbitInfo {
            representative: tuple_from_index(shape, elem_count, idx, n),
            size,
            table,
        })
        .collect();
    orbits.sort_by_key(|o| tuple_index(shape, elem_count, &o.representative));
    Ok(orbits)
}

/// Decodes tuple number `idx` (mixed radix over element indices, entry 0
/// least significant).
pub(crate) fn tuple_from_index(
    shape: &ModuleShape,
    elem_count: u64,
    mut idx: u64,
    n: usize,
) -> ElementTuple {
    let mut entries = Vec::with_capacity(n);
    for _ in 0..n {
        entries.push(shape.element_from_index(idx % elem_count));
        idx /= elem_count;
    }
    ElementTuple::new(entries).expect("n >= 1")
}

pub(crate) fn tuple_index(shape: &ModuleShape, elem_count: u64, t: &ElementTuple) -> u64 {
    t.entries()
        .iter()
        .rev()
        .fold(0, |acc, e| acc * elem_count + shape.element_index(e))
}

/// The length (number of strict steps) of the longest chain of strict
/// degenerations among orbits of `n`-tuples.
pub fn chain_depth(shape: &ModuleShape, n: usize, bound: u64) -> Result<u64> {
    let orbits = enumerate_tuple_orbits(shape, n, bound)?;
    let ring = shape.ring();
    // N strictly increases along strict degenerations, so processing orbits
    // by N gives a topological order for the longest-path computation.
    let mut order: Vec<usize> = (0..orbits.len()).collect();
    order.sort_by_key(|&i| orbits[i].n_invariant());
    let mut depth = vec![0u64; orbits.len()];
    let mut best = 0;
    for (pos, &j) in order.iter().enumerate() {
        for &i in &order[..pos] {
            let degenerates = orbits[i]
                .table
                .iter()
                .zip(&orbits[j].table)
                .all(|(ma, mb)| mb.includes(ring, ma));
            if degenerates && orbits[i].table != orbits[j].table {
                depth[j] = depth[j].max(depth[i] + 1);
            }
        }
        best = best.max(depth[j]);
    }
    Ok(best)
}

/// The Ulm sequences of the atoms among nonzero element orbits: the orbits
/// that degenerate to nothing but themselves and zero.  For a finite shape
/// there is exactly one, with a single finite height `k - 1`.
pub fn element_atoms(shape: &ModuleShape) -> Result<Vec<UlmSequence>> {
    if shape.is_zero() {
        return Err(Error::ZeroModule);
    }
    let h_max = shape.exponent() - 1;
    Ok(vec![UlmSequence::new(vec![h_max]).expect("single entry is increasing")])
}

/// A representative element of the atom orbit: `p^(k-1) e_c` for the first
/// coordinate of exponent `k`.
pub fn atom_element(shape: &ModuleShape) -> Result<Element> {
    if shape.is_zero() {
        return Err(Error::ZeroModule);
    }
    let k = shape.exponent();
    let c = shape
        .factor_exponents()
        .iter()
        .position(|&alpha| alpha == k)
        .expect("some factor has the top exponent");
    let mut e = shape.generator(c);
    for _ in 1..k {
        e = shape.shift(&e);
    }
    Ok(e)
}

/// Representatives of the atoms among nonzero `n`-tuple orbits: one per
/// point of the projective space of lines in `F_q^n`, realised as multiples
/// of the atom element by coefficient vectors with first nonzero entry 1.
pub fn tuple_atoms(shape: &ModuleShape, n: usize, bound: u64) -> Result<Vec<ElementTuple>> {
    if n == 0 {
        return Err(Error::ShapeMismatch("tuples must have at least one entry".into()));
    }
    if shape.is_zero() {
        // The zero module has only the zero orbit, which is not an atom.
        return Ok(Vec::new());
    }
    let q = shape.ring().residue_field_order();
    let total = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    ensure_within(total, bound)?;
    let atom = atom_element(shape)?;
    let mut out = Vec::new();
    for idx in 0..total as u64 {
        // Digits of idx are the coefficients r_1, ..., r_n in F_q.
        let mut coeffs = Vec::with_capacity(n);
        let mut rest = idx;
        for _ in 0..n {
            coeffs.push(rest % q);
            rest /= q;
        }
        // Keep projective representatives: first nonzero coefficient is 1.
        match coeffs.iter().find(|&&c| c != 0) {
            Some(&first) if first == 1 => {}
            _ => continue,
        }
        let entries: Vec<Element> = coeffs
            .iter()
            .map(|&c| {
                let r = shape.ring().scalar(c).expect("field codes are valid scalars");
                shape.scale(r, &atom)
            })
            .collect();
        out.push(ElementTuple::new(entries).expect("n >= 1"));
    }
    Ok(out)
}

/// A homomorphism between shapes, tabulated by the images of the canonical
/// generators of the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomTable {
    images: Vec<Element>,
    automorphism: bool,
}

impl HomTable {
    pub fn new(images: Vec<Element>, automorphism: bool) -> HomTable {
        HomTable { images, automorphism }
    }

    /// The identity map of a shape.
    pub fn identity(shape: &ModuleShape) -> HomTable {
        let images = (0..shape.num_factors()).map(|c| shape.generator(c)).collect();
        HomTable { images, automorphism: true }
    }

    /// Image of generator `c`.
    pub fn images(&self) -> &[Element] {
        &self.images
    }

    /// Whether the construction certified this map as an automorphism.
    pub fn is_automorphism(&self) -> bool {
        self.automorphism
    }

    /// Applies the map: `x ↦ Σ_c x_c · images[c]`, with each coordinate
    /// lifted to a scalar of the codomain's ring.
    pub fn apply(
        &self,
        domain: &ModuleShape,
        codomain: &ModuleShape,
        x: &Element,
    ) -> Result<Element> {
        domain.check_element(x)?;
        if self.images.len() != domain.num_factors() {
            return Err(Error::ShapeMismatch(format!(
                "table has {} images, domain has {} factors",
                self.images.len(),
                domain.num_factors()
            )));
        }
        let ring = codomain.ring();
        let mut acc = codomain.zero_element();
        for (xc, y) in x.coords().iter().zip(&self.images) {
            let code = xc.code() % ring.residue_count();
            let r = ring.scalar(code).expect("reduced code is in range");
            acc = codomain.add(&acc, &codomain.scale(r, y));
        }
        Ok(acc)
    }
}

/// Whether a generator-image table defines an automorphism of `shape`:
/// the images must respect the generator orders (well-definedness) and the
/// induced map must be injective, which is checked by comparing the kernel
/// of the lifted map against the lattice of coordinate relations.
pub fn verify_automorphism(shape: &ModuleShape, table: &HomTable) -> Result<bool> {
    let c = shape.num_factors();
    if table.images().len() != c {
        return Err(Error::ShapeMismatch(format!(
            "table has {} images, shape has {c} factors",
            table.images().len()
        )));
    }
    let k = shape.exponent();
    let ring = shape.ring();
    let exponents = shape.factor_exponents();
    for (i, y) in table.images().iter().enumerate() {
        shape.check_element(y)?;
        if shape.order_exponent(y) > exponents[i] {
            return Ok(false); // not even well defined as a homomorphism
        }
    }
    // Kernel of r ↦ Σ r_c images[c], with the coordinate-d congruence
    // embedded at full precision by scaling with p^(k - α_d).
    let embedded: Vec<Vec<Scalar>> = table
        .images()
        .iter()
        .map(|y| {
            y.coords()
                .iter()
                .zip(exponents)
                .map(|(&x, &alpha)| ring.shift_up(x, k - alpha))
                .collect()
        })
        .collect();
    let kernel = kernel_form(ring, &embedded);
    // The relation lattice: p^{α_c} e_c for each coordinate.
    let relations: Vec<Vec<Scalar>> = (0..c)
        .map(|i| {
            (0..c)
                .map(|j| if i == j { ring.uniformizer_power(exponents[i]) } else { Scalar::ZERO })
                .collect()
        })
        .collect();
    Ok(kernel == howell_form(ring, c, &relations))
}

/// Builds a homomorphism `φ: A → B` with `φ(s_i) = t_i` for all `i`, by
/// extending the assignment generator by generator while keeping every
/// partial tuple's height table included in its image's table.  Fails with a
/// witness if no coefficient-respecting map can exist, i.e. if some
/// combination's height would drop.
pub fn extend_homomorphism(
    shape_a: &ModuleShape,
    shape_b: &ModuleShape,
    s: &ElementTuple,
    t: &ElementTuple,
    bound: u64,
) -> Result<HomTable> {
    shape_a.check_same_ring(shape_b)?;
    check_arity(s, t)?;
    if let Some((_, row)) = degeneration_failure(shape_a, s, shape_b, t)? {
        return Err(Error::NotHeightIncreasing {
            witness: row.iter().map(|x| x.code()).collect(),
        });
    }
    ensure_within(shape_b.element_count(), bound)?;
    let precision = shape_a.exponent().max(shape_b.exponent());
    let ring = shape_a.ring().with_precision(precision)?;
    let candidates = shape_b.enumerate_elements(bound)?;
    let exponents = shape_a.factor_exponents().to_vec();

    let mut dom: Vec<Element> = s.entries().to_vec();
    let mut img: Vec<Element> = t.entries().to_vec();
    let mut images = Vec::with_capacity(exponents.len());
    for (c, &alpha) in exponents.iter().enumerate() {
        dom.push(shape_a.generator(c));
        let dom_tuple = ElementTuple::new(dom.clone()).expect("nonempty");
        let ta = height_table_at(shape_a, &dom_tuple, precision)?;
        let chosen = candidates
            .iter()
            .filter(|y| shape_b.order_exponent(y) <= alpha)
            .find(|y| {
                let mut trial = img.clone();
                trial.push((*y).clone());
                let trial_tuple = ElementTuple::new(trial).expect("nonempty");
                let tb = height_table_at(shape_b, &trial_tuple, precision)
                    .expect("candidate fits the shape");
                linear::table_inclusion_failure(&ring, &ta, &tb).is_none()
            })
            .cloned()
            .expect("a height-increasing partial map always extends");
        img.push(chosen.clone());
        images.push(chosen);
    }
    Ok(HomTable { images, automorphism: false })
}

/// Builds an automorphism `φ` of `shape` with `φ(a_i) = b_i` for all `i`,
/// by a back-and-forth extension that keeps the height tables of the two
/// growing tuples equal.  Fails with [`Error::NotSameOrbit`] if the tuples'
/// tables differ.
pub fn build_automorphism(
    shape: &ModuleShape,
    a: &ElementTuple,
    b: &ElementTuple,
    bound: u64,
) -> Result<HomTable> {
    check_arity(a, b)?;
    if !same_orbit(shape, a, b)? {
        return Err(Error::NotSameOrbit);
    }
    ensure_within(shape.element_count(), bound)?;
    let candidates = shape.enumerate_elements(bound)?;
    let exponents = shape.factor_exponents().to_vec();

    let mut dom: Vec<Element> = a.entries().to_vec();
    let mut img: Vec<Element> = b.entries().to_vec();
    let mut images = Vec::with_capacity(exponents.len());
    let search = |fixed: &[Element], target_table: &Vec<SubmoduleForm>, alpha: u32| -> Element {
        candidates
            .iter()
            .filter(|y| shape.order_exponent(y) <= alpha)
            .find(|y| {
                let mut trial = fixed.to_vec();
                trial.push((*y).clone());
                let tuple = ElementTuple::new(trial).expect("nonempty");
                let table = height_table(shape, &tuple).expect("candidate fits the shape");
                &table == target_table
            })
            .cloned()
            .expect("tuples with equal tables extend on both sides")
    };
    for (c, &alpha) in exponents.iter().enumerate() {
        // Forward: pick the image of generator c.
        dom.push(shape.generator(c));
        let ta = height_table(shape, &ElementTuple::new(dom.clone()).expect("nonempty"))?;
        let y = search(&img, &ta, alpha);
        img.push(y.clone());
        images.push(y);
        // Backward: make sure generator c is hit, keeping the map onto.
        img.push(shape.generator(c));
        let tb = height_table(shape, &ElementTuple::new(img.clone()).expect("nonempty"))?;
        let x = search(&dom, &tb, alpha);
        dom.push(x);
    }
    let table = HomTable { images, automorphism: true };
    debug_assert!(verify_automorphism(shape, &table)?);
    Ok(table)
}

/// The full element set of the submodule generated by `gens`, sorted by
/// element index.  Fails if it outgrows `bound`.
pub fn submodule_closure(
    shape: &ModuleShape,
    gens: &[Element],
    bound: u64,
) -> Result<Vec<Element>> {
    use std::collections::BTreeSet;
    for g in gens {
        shape.check_element(g)?;
    }
    let ring = shape.ring();
    // All scalar multiples of the generators; adding these repeatedly
    // reaches every combination Σ r_i g_i.
    let mut steps: BTreeSet<Element> = BTreeSet::new();
    for g in gens {
        for r in ring.enumerate_residues(ring.precision())? {
            let m = shape.scale(r, g);
            if !m.is_zero() {
                steps.insert(m);
            }
        }
    }
    let mut seen: BTreeSet<Element> = BTreeSet::new();
    seen.insert(shape.zero_element());
    let mut queue: Vec<Element> = vec![shape.zero_element()];
    while let Some(x) = queue.pop() {
        for m in &steps {
            let y = shape.add(&x, m);
            if seen.insert(y.clone()) {
                ensure_within(seen.len() as u128, bound)?;
                queue.push(y);
            }
        }
    }
    let mut out: Vec<Element> = seen.into_iter().collect();
    out.sort_by_key(|e| shape.element_index(e));
    Ok(out)
}

/// A least generating list for the submodule generated by `gens`: the
/// shortest length that works, and among those the lexicographically first
/// by element index.
pub fn minimal_generators(
    shape: &ModuleShape,
    gens: &[Element],
    bound: u64,
) -> Result<Vec<Element>> {
    let closure = submodule_closure(shape, gens, bound)?;
    if closure.len() == 1 {
        return Ok(Vec::new()); // the zero submodule needs no generators
    }
    let size = closure.len();
    for m in 1..=shape.num_factors().max(1) {
        ensure_within((size as u128).pow(m as u32), bound)?;
        let mut pick = vec![0usize; m];
        loop {
            let candidate: Vec<Element> = pick.iter().map(|&i| closure[i].clone()).collect();
            let span = submodule_closure(shape, &candidate, bound)?;
            if span.len() == size {
                return Ok(candidate);
            }
            // Advance the index vector (last position fastest).
            let mut pos = m;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                pick[pos] += 1;
                if pick[pos] < size {
                    break;
                }
                pick[pos] = 0;
            }
            if pick.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    unreachable!("the original generators themselves generate the closure")
}

/// Whether some endomorphism maps the submodule generated by `s_gens` onto
/// the one generated by `t_gens`.
pub fn submodule_degenerates(
    shape: &ModuleShape,
    s_gens: &[Element],
    t_gens: &[Element],
    bound: u64,
) -> Result<bool> {
    Ok(submodule_search(shape, s_gens, t_gens, bound, false)?.is_some())
}

/// Whether some automorphism maps the submodule generated by `s_gens` onto
/// the one generated by `t_gens`.
pub fn submodule_same_orbit(
    shape: &ModuleShape,
    s_gens: &[Element],
    t_gens: &[Element],
    bound: u64,
) -> Result<bool> {
    Ok(submodule_orbit_map(shape, s_gens, t_gens, bound)?.is_some())
}

/// An automorphism carrying one submodule onto the other, if one exists.
pub fn submodule_orbit_map(
    shape: &ModuleShape,
    s_gens: &[Element],
    t_gens: &[Element],
    bound: u64,
) -> Result<Option<HomTable>> {
    match submodule_search(shape, s_gens, t_gens, bound, true)? {
        Some((s_min, _)) if s_min.is_empty() => {
            // Both submodules are zero; the identity already matches them.
            Ok(Some(HomTable::identity(shape)))
        }
        Some((s_min, image)) => {
            let a = ElementTuple::new(s_min).expect("nonzero submodule");
            let b = ElementTuple::new(image).expect("nonzero submodule");
            Ok(Some(build_automorphism(shape, &a, &b, bound)?))
        }
        None => Ok(None),
    }
}

/// Searches for a generating tuple of `T` that `s_min` can map to.  With
/// `need_orbit` the map must be an automorphism (table equality), otherwise
/// any endomorphism (table inclusion) is accepted.  Returns the minimal
/// generators of `S` and the matching image tuple.
fn submodule_search(
    shape: &ModuleShape,
    s_gens: &[Element],
    t_gens: &[Element],
    bound: u64,
    need_orbit: bool,
) -> Result<Option<(Vec<Element>, Vec<Element>)>> {
    let s_min = minimal_generators(shape, s_gens, bound)?;
    let t_closure = submodule_closure(shape, t_gens, bound)?;
    let t_min = minimal_generators(shape, t_gens, bound)?;
    let s_closure_len = submodule_closure(shape, &s_min, bound)?.len();

    // Zero submodules: only the zero submodule maps onto them (and only the
    // identity-like case matches in orbit mode).
    if s_min.is_empty() {
        return Ok(if t_closure.len() == 1 {
            Some((Vec::new(), Vec::new()))
        } else {
            None
        });
    }
    if t_min.len() > s_min.len() {
        return Ok(None); // too few generators to surject
    }
    if need_orbit && s_closure_len != t_closure.len() {
        return Ok(None);
    }

    let m = s_min.len();
    let t_size = t_closure.len() as u64;
    ensure_within((t_size as u128).pow(m as u32), bound)?;
    let s_tuple = ElementTuple::new(s_min.clone()).expect("nonempty");
    let total = t_size.pow(m as u32);
    for idx in 0..total {
        let mut entries = Vec::with_capacity(m);
        let mut rest = idx;
        for _ in 0..m {
            entries.push(t_closure[(rest % t_size) as usize].clone());
            rest /= t_size;
        }
        let image_tuple = ElementTuple::new(entries.clone()).expect("nonempty");
        let compatible = if need_orbit {
            same_orbit(shape, &s_tuple, &image_tuple)?
        } else {
            degenerates(shape, &s_tuple, &image_tuple)?
        };
        if !compatible {
            continue;
        }
        // The image tuple must generate all of T.
        if submodule_closure(shape, &entries, bound)?.len() == t_closure.len() {
            return Ok(Some((s_min, entries)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1() -> ModuleShape {
        ModuleShape::integer_local(2, &[(1, 1), (2, 1)]).unwrap()
    }

    fn el(shape: &ModuleShape, codes: &[u64]) -> Element {
        shape.element_from_codes(codes).unwrap()
    }

    fn t1(shape: &ModuleShape, codes: &[u64]) -> ElementTuple {
        ElementTuple::new(vec![el(shape, codes)]).unwrap()
    }

    const BOUND: u64 = 1 << 20;

    #[test]
    fn same_orbit_in_z2_plus_z4() {
        let a = a1();
        assert!(same_orbit(&a, &t1(&a, &[0, 1]), &t1(&a, &[1, 3])).unwrap());
        assert!(same_orbit(&a, &t1(&a, &[1, 0]), &t1(&a, &[1, 2])).unwrap());
        assert!(!same_orbit(&a, &t1(&a, &[0, 2]), &t1(&a, &[1, 0])).unwrap());
        assert!(!same_orbit(&a, &t1(&a, &[0, 1]), &t1(&a, &[0, 2])).unwrap());
    }

    #[test]
    fn degeneration_in_z2_plus_z4() {
        let a = a1();
        // (0,1) → (1,0) → (0,2) → 0 is the longest strict chain.
        assert!(degenerates(&a, &t1(&a, &[0, 1]), &t1(&a, &[1, 0])).unwrap());
        assert!(degenerates(&a, &t1(&a, &[1, 0]), &t1(&a, &[0, 2])).unwrap());
        assert!(degenerates(&a, &t1(&a, &[0, 2]), &t1(&a, &[0, 0])).unwrap());
        assert!(!degenerates(&a, &t1(&a, &[0, 2]), &t1(&a, &[1, 0])).unwrap());
        assert!(!degenerates(&a, &t1(&a, &[0, 0]), &t1(&a, &[0, 2])).unwrap());
        // Degeneration is reflexive.
        assert!(degenerates(&a, &t1(&a, &[0, 1]), &t1(&a, &[0, 1])).unwrap());
    }

    #[test]
    fn n_invariant_descends_the_chain() {
        let a = a1();
        assert_eq!(n_invariant(&a, &t1(&a, &[0, 1])).unwrap(), 3);
        assert_eq!(n_invariant(&a, &t1(&a, &[1, 0])).unwrap(), 4);
        assert_eq!(n_invariant(&a, &t1(&a, &[0, 2])).unwrap(), 5);
        assert_eq!(n_invariant(&a, &t1(&a, &[0, 0])).unwrap(), 6);
    }

    #[test]
    fn orbit_enumeration_in_z2_plus_z4() {
        let a = a1();
        let orbits = enumerate_tuple_orbits(&a, 1, BOUND).unwrap();
        assert_eq!(orbits.len(), 4);
        let mut sizes: Vec<u64> = orbits.iter().map(|o| o.size).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 2, 4]);
        assert_eq!(orbits.iter().map(|o| o.size).sum::<u64>(), 8);
        // Representatives are the least tuple index of each orbit, ascending.
        let reps: Vec<u64> = orbits
            .iter()
            .map(|o| a.element_index(&o.representative.entries()[0]))
            .collect();
        assert_eq!(reps, vec![0, 1, 2, 4]);
    }

    #[test]
    fn chain_depth_matches_the_hand_computed_chain() {
        let a = a1();
        assert_eq!(chain_depth(&a, 1, BOUND).unwrap(), 3);
    }

    #[test]
    fn atoms_of_z2_plus_z4() {
        let a = a1();
        assert_eq!(
            element_atoms(&a).unwrap(),
            vec![UlmSequence::new(vec![1]).unwrap()]
        );
        assert_eq!(atom_element(&a).unwrap(), el(&a, &[0, 2]));
        let pairs = tuple_atoms(&a, 2, BOUND).unwrap();
        // Projective points of F_2^2: (1,0), (0,1), (1,1).
        assert_eq!(pairs.len(), 3);
        let expected: Vec<Vec<Vec<u64>>> = vec![
            vec![vec![0, 2], vec![0, 0]],
            vec![vec![0, 0], vec![0, 2]],
            vec![vec![0, 2], vec![0, 2]],
        ];
        for (t, codes) in pairs.iter().zip(expected) {
            let want: Vec<Element> = codes.iter().map(|c| el(&a, c)).collect();
            assert_eq!(t.entries(), want.as_slice());
        }
        let z = ModuleShape::integer_local(2, &[]).unwrap();
        assert_eq!(element_atoms(&z), Err(Error::ZeroModule));
        assert_eq!(tuple_atoms(&z, 2, BOUND).unwrap(), Vec::new());
    }

    #[test]
    fn extension_fails_with_a_height_witness() {
        let a = a1();
        // (0,2) has height 1 but (1,0) has height 0: r = 1 already drops.
        let err = extend_homomorphism(&a, &a, &t1(&a, &[0, 2]), &t1(&a, &[1, 0]), BOUND)
            .unwrap_err();
        match err {
            Error::NotHeightIncreasing { witness } => assert_eq!(witness, vec![1]),
            other => panic!("expected a height witness, got {other:?}"),
        }
    }

    #[test]
    fn extension_builds_a_working_homomorphism() {
        let a = a1();
        let s = t1(&a, &[0, 1]);
        let t = t1(&a, &[1, 0]);
        let hom = extend_homomorphism(&a, &a, &s, &t, BOUND).unwrap();
        assert!(!hom.is_automorphism());
        let image = hom.apply(&a, &a, &s.entries()[0]).unwrap();
        assert_eq!(image, t.entries()[0]);
        // A homomorphism is height increasing everywhere.
        for i in 0..a.element_count() as u64 {
            let x = a.element_from_index(i);
            let y = hom.apply(&a, &a, &x).unwrap();
            assert!(a.height(&y) >= a.height(&x));
        }
    }

    #[test]
    fn extension_crosses_shapes_over_the_same_prime() {
        let a = a1();
        let b = ModuleShape::integer_local(2, &[(1, 1), (3, 1)]).unwrap();
        let s = t1(&a, &[1, 0]);
        let t = t1(&b, &[0, 4]);
        let hom = extend_homomorphism(&a, &b, &s, &t, BOUND).unwrap();
        assert_eq!(hom.apply(&a, &b, &s.entries()[0]).unwrap(), t.entries()[0]);
        // Sums are preserved.
        for i in 0..a.element_count() as u64 {
            for j in 0..a.element_count() as u64 {
                let (x, y) = (a.element_from_index(i), a.element_from_index(j));
                let lhs = hom.apply(&a, &b, &a.add(&x, &y)).unwrap();
                let rhs = b.add(&hom.apply(&a, &b, &x).unwrap(), &hom.apply(&a, &b, &y).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn automorphism_construction_connects_orbit_mates() {
        let a = a1();
        let s = t1(&a, &[0, 1]);
        let t = t1(&a, &[1, 1]);
        let auto = build_automorphism(&a, &s, &t, BOUND).unwrap();
        assert!(auto.is_automorphism());
        assert!(verify_automorphism(&a, &auto).unwrap());
        assert_eq!(auto.apply(&a, &a, &s.entries()[0]).unwrap(), t.entries()[0]);
        // Bijective on all 8 elements.
        let mut images = std::collections::BTreeSet::new();
        for i in 0..a.element_count() as u64 {
            images.insert(auto.apply(&a, &a, &a.element_from_index(i)).unwrap());
        }
        assert_eq!(images.len(), 8);
    }

    #[test]
    fn automorphism_construction_rejects_different_orbits() {
        let a = a1();
        let err = build_automorphism(&a, &t1(&a, &[0, 2]), &t1(&a, &[1, 0]), BOUND).unwrap_err();
        assert_eq!(err, Error::NotSameOrbit);
    }

    #[test]
    fn identity_table_is_an_automorphism() {
        let a = a1();
        let id = HomTable::identity(&a);
        assert!(verify_automorphism(&a, &id).unwrap());
        for i in 0..a.element_count() as u64 {
            let x = a.element_from_index(i);
            assert_eq!(id.apply(&a, &a, &x).unwrap(), x);
        }
    }

    #[test]
    fn closure_and_minimal_generators() {
        let a = a1();
        let s = submodule_closure(&a, &[el(&a, &[0, 1])], BOUND).unwrap();
        assert_eq!(s.len(), 4);
        let whole = submodule_closure(&a, &[el(&a, &[1, 0]), el(&a, &[0, 1])], BOUND).unwrap();
        assert_eq!(whole.len(), 8);
        let min = minimal_generators(&a, &whole, BOUND).unwrap();
        assert_eq!(min, vec![el(&a, &[1, 0]), el(&a, &[0, 1])]);
        // A cyclic submodule has a single minimal generator.
        let min_cyclic = minimal_generators(&a, &[el(&a, &[0, 3])], BOUND).unwrap();
        assert_eq!(min_cyclic.len(), 1);
    }

    #[test]
    fn submodule_orbit_and_degeneration() {
        let a = a1();
        let s = vec![el(&a, &[0, 1])]; // Z/4 inside
        let t = vec![el(&a, &[0, 2])]; // Z/2 inside, the image of doubling
        assert!(submodule_degenerates(&a, &s, &t, BOUND).unwrap());
        assert!(!submodule_same_orbit(&a, &s, &t, BOUND).unwrap());
        // ⟨(0,1)⟩ and ⟨(1,1)⟩ are both cyclic of order 4 and conjugate.
        let u = vec![el(&a, &[1, 1])];
        assert!(submodule_same_orbit(&a, &s, &u, BOUND).unwrap());
        let map = submodule_orbit_map(&a, &s, &u, BOUND).unwrap().unwrap();
        assert!(map.is_automorphism());
        // The map really carries ⟨(0,1)⟩ onto ⟨(1,1)⟩.
        let s_closure = submodule_closure(&a, &s, BOUND).unwrap();
        let mut image: Vec<Element> = s_closure
            .iter()
            .map(|x| map.apply(&a, &a, x).unwrap())
            .collect();
        image.sort_by_key(|e| a.element_index(e));
        assert_eq!(image, submodule_closure(&a, &u, BOUND).unwrap());
        // (1,0) generates a Z/2 not inside the doubling image; it is still a
        // degeneration target of S.
        let w = vec![el(&a, &[1, 0])];
        assert!(submodule_degenerates(&a, &s, &w, BOUND).unwrap());
        assert!(!submodule_degenerates(&a, &t, &s, BOUND).unwrap());
    }

    #[test]
    fn cross_shape_degeneration_uses_the_joint_precision() {
        let a = a1();
        let b = ModuleShape::integer_local(2, &[(1, 1), (3, 1)]).unwrap();
        // (1,0) in A can map to (0,4) in B (both die under p).
        assert!(degenerates_between(&a, &t1(&a, &[1, 0]), &b, &t1(&b, &[0, 4])).unwrap());
        // But nothing in A maps onto an element of height-2 order 2 with a
        // unit coordinate... (0,1) in B has order 8, no preimage in A.
        assert!(!degenerates_between(&a, &t1(&a, &[0, 1]), &b, &t1(&b, &[0, 1])).unwrap());
        // Mismatched rings are rejected.
        let c = ModuleShape::integer_local(3, &[(1, 1)]).unwrap();
        assert!(matches!(
            degenerates_between(&a, &t1(&a, &[1, 0]), &c, &t1(&c, &[1])),
            Err(Error::RingMismatch(_))
        ));
    }

    #[test]
    fn zero_module_has_one_orbit() {
        let z = ModuleShape::integer_local(2, &[]).unwrap();
        let orbits = enumerate_tuple_orbits(&z, 2, BOUND).unwrap();
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].size, 1);
        assert_eq!(chain_depth(&z, 1, BOUND).unwrap(), 0);
    }

    #[test]
    fn bound_violations_are_reported() {
        let a = a1();
        assert!(matches!(
            enumerate_tuple_orbits(&a, 2, 63),
            Err(Error::BoundExceeded { .. })
        ));
    }
}
