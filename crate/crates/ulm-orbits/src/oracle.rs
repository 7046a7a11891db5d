//! Brute-force oracles: exhaustive endomorphism and automorphism sets, the
//! orbit partition they induce, and the degeneration relation by direct
//! search.
//!
//! Nothing here touches the canonical forms of [`crate::linear`]; a
//! homomorphism is a free choice of generator images with compatible orders,
//! and orbits and degenerations are read off by acting with every map.  The
//! two routes are checked against each other in the test suites.

use crate::error::Result;
use crate::exec;
use crate::module::{ensure_within, Element, ElementTuple, ModuleShape};
use crate::orbits::HomTable;

/// All elements annihilated by `p^alpha`, in element index order.  These are
/// exactly the legal images of a generator of exponent `alpha`.
fn order_bounded_elements(shape: &ModuleShape, alpha: u32) -> Vec<Element> {
    let q = shape.ring().residue_field_order();
    let exponents = shape.factor_exponents();
    // Coordinate d admits the multiples of p^(α_d - alpha); in the shared
    // code encoding those are u * q^gap for u below q^(α_d - gap).
    let gaps: Vec<u32> = exponents.iter().map(|&a| a.saturating_sub(alpha)).collect();
    let counts: Vec<u64> = exponents
        .iter()
        .zip(&gaps)
        .map(|(&a, &g)| q.pow(a - g))
        .collect();
    let total: u64 = counts.iter().product();
    let mut out = Vec::with_capacity(total as usize);
    for mut idx in 0..total {
        let mut codes = Vec::with_capacity(exponents.len());
        for (&count, &gap) in counts.iter().zip(&gaps) {
            let u = idx % count;
            idx /= count;
            codes.push(u * q.pow(gap));
        }
        out.push(shape.element_from_codes(&codes).expect("codes are in range"));
    }
    out
}

/// Every endomorphism of the shape, as generator-image tables, enumerated in
/// lexicographic image order.  Fails if there are more than `bound` of them.
pub fn enumerate_endomorphisms(shape: &ModuleShape, bound: u64) -> Result<Vec<HomTable>> {
    let candidates: Vec<Vec<Element>> = shape
        .factor_exponents()
        .iter()
        .map(|&alpha| order_bounded_elements(shape, alpha))
        .collect();
    let total = candidates
        .iter()
        .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
    ensure_within(total, bound)?;
    let mut out = Vec::with_capacity(total as usize);
    for mut idx in 0..total as u64 {
        let mut images = Vec::with_capacity(candidates.len());
        for cand in &candidates {
            images.push(cand[(idx % cand.len() as u64) as usize].clone());
            idx /= cand.len() as u64;
        }
        out.push(HomTable::new(images, false));
    }
    Ok(out)
}

/// The action of a generator-image table on the whole element set:
/// `table[i]` is the element index of the image of element `i`.
pub fn action_table(shape: &ModuleShape, hom: &HomTable) -> Result<Vec<u64>> {
    let count = shape.element_count() as u64;
    let mut out = Vec::with_capacity(count as usize);
    for i in 0..count {
        let x = shape.element_from_index(i);
        let y = hom.apply(shape, shape, &x)?;
        out.push(shape.element_index(&y));
    }
    Ok(out)
}

/// Every automorphism, found by filtering the endomorphisms for bijective
/// action.  This is the exhaustive route: it never consults canonical forms.
pub fn enumerate_automorphisms(shape: &ModuleShape, bound: u64) -> Result<Vec<HomTable>> {
    let count = shape.element_count() as u64;
    let mut out = Vec::new();
    for endo in enumerate_endomorphisms(shape, bound)? {
        let action = action_table(shape, &endo)?;
        let mut seen = vec![false; count as usize];
        let mut bijective = true;
        for &img in &action {
            if seen[img as usize] {
                bijective = false;
                break;
            }
            seen[img as usize] = true;
        }
        if bijective {
            out.push(HomTable::new(endo.images().to_vec(), true));
        }
    }
    Ok(out)
}

/// Decodes a tuple index as used by [`orbit_partition`] and
/// [`degeneration_relation`]: entry `i` of the tuple is element number
/// `⌊index / |A|^i⌋ mod |A|` in element enumeration order.
pub fn tuple_at(shape: &ModuleShape, n: usize, index: u64) -> Result<ElementTuple> {
    let elem_count = shape.element_count() as u64;
    let total = (elem_count as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if n == 0 || (index as u128) >= total {
        return Err(crate::error::Error::ShapeMismatch(format!(
            "tuple index {index} out of range for {total} {n}-tuples"
        )));
    }
    Ok(crate::orbits::tuple_from_index(shape, elem_count, index, n))
}

/// The orbit partition of `n`-tuples under the full automorphism group,
/// computed by direct action.  Orbits are lists of tuple indices, each
/// sorted ascending, ordered by their least member.
pub fn orbit_partition(shape: &ModuleShape, n: usize, bound: u64) -> Result<Vec<Vec<u64>>> {
    let elem_count = shape.element_count() as u64;
    let total = (elem_count as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    ensure_within(total, bound)?;
    let total = total as u64;
    let autos = enumerate_automorphisms(shape, bound)?;
    let actions: Vec<Vec<u64>> = autos
        .iter()
        .map(|a| action_table(shape, a))
        .collect::<Result<_>>()?;

    // The canonical key of a tuple is the least tuple index in its orbit.
    let keys: Vec<u64> = exec::map_indexed(total, |idx| {
        actions
            .iter()
            .map(|action| map_tuple_index(idx, action, elem_count, n))
            .min()
            .unwrap_or(idx)
    });
    let mut orbits: std::collections::BTreeMap<u64, Vec<u64>> = std::collections::BTreeMap::new();
    for (idx, &key) in keys.iter().enumerate() {
        orbits.entry(key).or_default().push(idx as u64);
    }
    Ok(orbits.into_values().collect())
}

/// Applies an element-level action to a packed tuple index.
pub(crate) fn map_tuple_index(mut idx: u64, action: &[u64], elem_count: u64, n: usize) -> u64 {
    let mut out = 0u64;
    let mut scale = 1u64;
    for _ in 0..n {
        out += action[(idx % elem_count) as usize] * scale;
        idx /= elem_count;
        scale *= elem_count;
    }
    out
}

/// Whether some endomorphism carries `a` to `b` entrywise, by scanning the
/// full endomorphism set.
pub fn degenerates_by_search(
    shape: &ModuleShape,
    a: &ElementTuple,
    b: &ElementTuple,
    bound: u64,
) -> Result<bool> {
    for e in a.entries().iter().chain(b.entries()) {
        shape.check_element(e)?;
    }
    for endo in enumerate_endomorphisms(shape, bound)? {
        let matches = a
            .entries()
            .iter()
            .zip(b.entries())
            .all(|(x, y)| endo.apply(shape, shape, x).expect("entries fit the shape") == *y);
        if matches {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The full degeneration relation on `n`-tuples as a dense bit matrix:
/// `related(i, j)` holds when some endomorphism maps tuple `i` to tuple `j`.
pub struct DegenerationRelation {
    tuple_count: u64,
    bits: Vec<u64>,
}

impl DegenerationRelation {
    pub fn tuple_count(&self) -> u64 {
        self.tuple_count
    }

    pub fn related(&self, from: u64, to: u64) -> bool {
        let pos = from * self.tuple_count + to;
        self.bits[(pos / 64) as usize] >> (pos % 64) & 1 == 1
    }
}

/// Tabulates the degeneration relation by letting every endomorphism act on
/// every tuple.  Needs `(number of tuples)^2` below `bound`.
pub fn degeneration_relation(
    shape: &ModuleShape,
    n: usize,
    bound: u64,
) -> Result<DegenerationRelation> {
    let elem_count = shape.element_count() as u64;
    let total = (elem_count as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    ensure_within(total.saturating_mul(total), bound)?;
    let total = total as u64;
    let endos = enumerate_endomorphisms(shape, bound)?;
    let actions: Vec<Vec<u64>> = endos
        .iter()
        .map(|e| action_table(shape, e))
        .collect::<Result<_>>()?;
    let words = ((total * total + 63) / 64) as usize;
    let chunks: Vec<Vec<u64>> = exec::map_indexed(total, |idx| {
        let mut row = vec![0u64; ((total + 63) / 64) as usize];
        for action in &actions {
            let img = map_tuple_index(idx, action, elem_count, n);
            row[(img / 64) as usize] |= 1 << (img % 64);
        }
        row
    });
    let mut bits = vec![0u64; words];
    for (idx, row) in chunks.iter().enumerate() {
        for (w, &word) in row.iter().enumerate() {
            if word == 0 {
                continue;
            }
            for b in 0..64 {
                if word >> b & 1 == 1 {
                    let img = (w as u64) * 64 + b as u64;
                    let pos = idx as u64 * total + img;
                    bits[(pos / 64) as usize] |= 1 << (pos % 64);
                }
            }
        }
    }
    Ok(DegenerationRelation { tuple_count: total, bits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::{degenerates, enumerate_tuple_orbits, tuple_from_index};

    fn a1() -> ModuleShape {
        ModuleShape::integer_local(2, &[(1, 1), (2, 1)]).unwrap()
    }

    const BOUND: u64 = 1 << 20;

    #[test]
    fn endomorphism_count_is_the_product_of_torsion_layers() {
        // |Hom| = Π_c |A[p^{α_c}]|: generator c can go to any element killed
        // by p^{α_c}.  For Z/2 + Z/4 that is 4 * 8 = 32.
        let a = a1();
        let endos = enumerate_endomorphisms(&a, BOUND).unwrap();
        assert_eq!(endos.len(), 32);
        // Each image really is annihilated as required.
        for endo in &endos {
            for (y, &alpha) in endo.images().iter().zip(a.factor_exponents()) {
                assert!(a.order_exponent(y) <= alpha);
            }
        }
    }

    #[test]
    fn automorphism_count_in_z2_plus_z4() {
        let a = a1();
        let autos = enumerate_automorphisms(&a, BOUND).unwrap();
        assert_eq!(autos.len(), 8);
        for auto in &autos {
            assert!(auto.is_automorphism());
            assert!(crate::orbits::verify_automorphism(&a, auto).unwrap());
        }
    }

    #[test]
    fn automorphisms_form_a_group_under_composition() {
        let a = a1();
        let autos = enumerate_automorphisms(&a, BOUND).unwrap();
        let tables: std::collections::BTreeSet<Vec<u64>> = autos
            .iter()
            .map(|t| action_table(&a, t).unwrap())
            .collect();
        for f in &tables {
            for g in &tables {
                let composed: Vec<u64> = (0..f.len()).map(|i| f[g[i] as usize]).collect();
                assert!(tables.contains(&composed));
            }
        }
        // The identity is present.
        let id: Vec<u64> = (0..a.element_count() as u64).collect();
        assert!(tables.contains(&id));
    }

    #[test]
    fn orbit_partition_matches_hand_computation() {
        let a = a1();
        let orbits = orbit_partition(&a, 1, BOUND).unwrap();
        assert_eq!(
            orbits,
            vec![vec![0], vec![1, 5], vec![2, 3, 6, 7], vec![4]]
        );
    }

    #[test]
    fn partition_agrees_with_height_table_orbits() {
        let a = a1();
        for n in [1usize, 2] {
            let brute = orbit_partition(&a, n, BOUND).unwrap();
            let fast = enumerate_tuple_orbits(&a, n, BOUND).unwrap();
            assert_eq!(brute.len(), fast.len());
            let elem_count = a.element_count() as u64;
            for (b, f) in brute.iter().zip(&fast) {
                assert_eq!(b.len() as u64, f.size);
                let rep = tuple_from_index(&a, elem_count, b[0], n);
                assert_eq!(rep, f.representative);
            }
        }
    }

    #[test]
    fn search_and_canonical_degeneration_agree_exhaustively() {
        let a = a1();
        let count = a.element_count() as u64;
        for i in 0..count {
            for j in 0..count {
                let s = ElementTuple::new(vec![a.element_from_index(i)]).unwrap();
                let t = ElementTuple::new(vec![a.element_from_index(j)]).unwrap();
                assert_eq!(
                    degenerates_by_search(&a, &s, &t, BOUND).unwrap(),
                    degenerates(&a, &s, &t).unwrap(),
                    "pair ({i}, {j})"
                );
            }
        }
    }

    #[test]
    fn relation_matrix_matches_single_searches() {
        let a = a1();
        let rel = degeneration_relation(&a, 1, BOUND).unwrap();
        assert_eq!(rel.tuple_count(), 8);
        for i in 0..8 {
            for j in 0..8 {
                let s = ElementTuple::new(vec![a.element_from_index(i)]).unwrap();
                let t = ElementTuple::new(vec![a.element_from_index(j)]).unwrap();
                assert_eq!(
                    rel.related(i, j),
                    degenerates_by_search(&a, &s, &t, BOUND).unwrap()
                );
            }
        }
    }

    #[test]
    fn zero_module_has_exactly_one_endomorphism() {
        let z = ModuleShape::integer_local(2, &[]).unwrap();
        assert_eq!(enumerate_endomorphisms(&z, BOUND).unwrap().len(), 1);
        assert_eq!(enumerate_automorphisms(&z, BOUND).unwrap().len(), 1);
        assert_eq!(orbit_partition(&z, 1, BOUND).unwrap(), vec![vec![0]]);
    }
}
