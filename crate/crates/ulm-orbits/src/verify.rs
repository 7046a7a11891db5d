//! Self-verification suites: every high-level answer the crate produces is
//! recomputed here against the brute-force oracle or against an independent
//! second route, over a whole shape at once.
//!
//! Suites examine all tuple pairs when the square fits under a fixed limit
//! and fall back to a seeded deterministic sample otherwise, so reports are
//! reproducible run to run.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linear::{height_table, SubmoduleForm};
use crate::module::{ElementTuple, ModuleShape};
use crate::oracle;
use crate::orbits::{
    chain_depth, degenerates, enumerate_tuple_orbits, n_invariant, same_orbit, tuple_atoms,
    tuple_from_index,
};
use crate::posets::{
    admissible_sequences, enumerate_ideals, ideal_criterion, ideal_of_element, kappa,
};

/// Pair squares up to this size are checked exhaustively; larger ones are
/// sampled.
const FULL_PAIR_LIMIT: u128 = 1_000_000;
/// Number of sampled pairs when exhaustive pair checking is off the table.
const SAMPLE_PAIRS: usize = 10_000;
/// Fixed seed so sampled runs are reproducible.
const SAMPLE_SEED: u64 = 0x756c_6d5f_6f72_6269;

/// Outcome of one verification suite.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl SuiteReport {
    fn pass(name: &'static str, detail: String) -> SuiteReport {
        SuiteReport { name, passed: true, detail }
    }

    fn fail(name: &'static str, detail: String) -> SuiteReport {
        SuiteReport { name, passed: false, detail }
    }
}

/// Runs every suite for `n`-tuples over `shape`.  A `BoundExceeded` error
/// means the shape is too big for the configured cap; failed suites are
/// reported, not raised.
pub fn run_all(shape: &ModuleShape, n: usize, bound: u64) -> Result<Vec<SuiteReport>> {
    let elem_count = shape.element_count() as u64;
    let total128 = (elem_count as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let infos = enumerate_tuple_orbits(shape, n, bound)?;
    let partition = oracle::orbit_partition(shape, n, bound)?;
    let total = total128 as u64;

    // Least orbit member under the brute-force action, per tuple index.
    let mut oracle_key = vec![0u64; total as usize];
    for orbit in &partition {
        for &m in orbit {
            oracle_key[m as usize] = orbit[0];
        }
    }
    // Least orbit member under the fingerprint partition, per table.
    let mut table_key: HashMap<Vec<SubmoduleForm>, u64> = HashMap::new();
    for (i, info) in infos.iter().enumerate() {
        let idx = least_index_of(shape, elem_count, &infos, i);
        table_key.insert(info.table.clone(), idx);
    }

    let pairs = pair_set(total);
    let endos = oracle::enumerate_endomorphisms(shape, bound)?;
    let endo_actions: Vec<Vec<u64>> = endos
        .iter()
        .map(|e| oracle::action_table(shape, e))
        .collect::<Result<_>>()?;
    let tuple_of = |idx: u64| tuple_from_index(shape, elem_count, idx, n);
    let brute_deg = |i: u64, j: u64| {
        endo_actions
            .iter()
            .any(|act| oracle::map_tuple_index(i, act, elem_count, n) == j)
    };

    Ok(vec![
        barker_suite(shape, &infos, &partition, &oracle_key, &table_key, total, &tuple_of),
        degeneration_suite(shape, &pairs, total, &tuple_of, &brute_deg),
        mutual_suite(shape, &pairs, &oracle_key, &tuple_of, &brute_deg),
        dictionary_suite(shape, bound)?,
        atom_suite(shape, n, bound, &infos, &table_key, elem_count)?,
        monotonicity_suite(shape, &pairs, &tuple_of),
        depth_suite(shape, n, bound)?,
    ])
}

fn least_index_of(
    shape: &ModuleShape,
    elem_count: u64,
    infos: &[crate::orbits::OrbitInfo],
    i: usize,
) -> u64 {
    crate::orbits::tuple_index(shape, elem_count, &infos[i].representative)
}

/// All pairs when the square is small, a fixed-seed sample otherwise.
fn pair_set(total: u64) -> Vec<(u64, u64)> {
    let square = (total as u128) * (total as u128);
    if square <= FULL_PAIR_LIMIT {
        (0..total).flat_map(|i| (0..total).map(move |j| (i, j))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
        (0..SAMPLE_PAIRS)
            .map(|_| (rng.gen_range(0..total), rng.gen_range(0..total)))
            .collect()
    }
}

fn pair_label(total: u64, pairs: &[(u64, u64)]) -> String {
    let square = (total as u128) * (total as u128);
    if square <= FULL_PAIR_LIMIT {
        format!("all {square} pairs")
    } else {
        format!("{} sampled pairs of {square}", pairs.len())
    }
}

fn barker_suite(
    shape: &ModuleShape,
    infos: &[crate::orbits::OrbitInfo],
    partition: &[Vec<u64>],
    oracle_key: &[u64],
    table_key: &HashMap<Vec<SubmoduleForm>, u64>,
    total: u64,
    tuple_of: &dyn Fn(u64) -> ElementTuple,
) -> SuiteReport {
    const NAME: &str = "barker-oracle";
    if infos.len() != partition.len() {
        return SuiteReport::fail(
            NAME,
            format!(
                "fingerprints give {} orbits, brute force gives {}",
                infos.len(),
                partition.len()
            ),
        );
    }
    for idx in 0..total {
        let table = height_table(shape, &tuple_of(idx)).expect("enumerated tuples fit");
        if table_key[&table] != oracle_key[idx as usize] {
            return SuiteReport::fail(
                NAME,
                format!("tuple {idx} is classified differently by the two partitions"),
            );
        }
    }
    SuiteReport::pass(
        NAME,
        format!("{} orbits agree with the brute-force partition of {total} tuples", infos.len()),
    )
}

fn degeneration_suite(
    shape: &ModuleShape,
    pairs: &[(u64, u64)],
    total: u64,
    tuple_of: &dyn Fn(u64) -> ElementTuple,
    brute_deg: &dyn Fn(u64, u64) -> bool,
) -> SuiteReport {
    const NAME: &str = "degeneration-oracle";
    let mut mismatches = 0u64;
    let mut first = String::new();
    for &(i, j) in pairs {
        let fast = degenerates(shape, &tuple_of(i), &tuple_of(j)).expect("same shape");
        let brute = brute_deg(i, j);
        if fast != brute {
            if mismatches == 0 {
                first = format!("; first at pair ({i}, {j}): criterion {fast}, oracle {brute}");
            }
            mismatches += 1;
        }
    }
    if mismatches > 0 {
        return SuiteReport::fail(NAME, format!("{mismatches} disagreements{first}"));
    }
    SuiteReport::pass(
        NAME,
        format!("criterion matches endomorphism search on {}", pair_label(total, pairs)),
    )
}

fn mutual_suite(
    shape: &ModuleShape,
    pairs: &[(u64, u64)],
    oracle_key: &[u64],
    tuple_of: &dyn Fn(u64) -> ElementTuple,
    brute_deg: &dyn Fn(u64, u64) -> bool,
) -> SuiteReport {
    const NAME: &str = "mutual-degeneration";
    let mut violations = 0u64;
    let mut checked = 0u64;
    for &(i, j) in pairs {
        if !(brute_deg(i, j) && brute_deg(j, i)) {
            continue;
        }
        checked += 1;
        let brute_same = oracle_key[i as usize] == oracle_key[j as usize];
        let fast_same = same_orbit(shape, &tuple_of(i), &tuple_of(j)).expect("same shape");
        if !brute_same || !fast_same {
            violations += 1;
        }
    }
    if violations > 0 {
        return SuiteReport::fail(
            NAME,
            format!("{violations} mutually degenerating pairs in different orbits"),
        );
    }
    SuiteReport::pass(
        NAME,
        format!("{checked} mutually degenerating pairs all share an orbit"),
    )
}

fn dictionary_suite(shape: &ModuleShape, bound: u64) -> Result<SuiteReport> {
    const NAME: &str = "dictionary-roundtrip";
    let seqs = admissible_sequences(shape, bound)?;
    let ideals = enumerate_ideals(shape, bound)?;
    let element_orbits = oracle::orbit_partition(shape, 1, bound)?.len();
    if seqs.len() != ideals.len() || seqs.len() != element_orbits {
        return Ok(SuiteReport::fail(
            NAME,
            format!(
                "{} sequences, {} ideals, {} brute-force element orbits",
                seqs.len(),
                ideals.len(),
                element_orbits
            ),
        ));
    }
    for ideal in &ideals {
        let seq = kappa(ideal);
        if !seqs.contains(&seq)
            || crate::posets::ideal_from_sequence(shape, &seq)? != *ideal
        {
            return Ok(SuiteReport::fail(NAME, format!("ideal {ideal:?} fails to round-trip")));
        }
    }
    for left in &ideals {
        for right in &ideals {
            if right.includes(left) != kappa(left).dominates(&kappa(right)) {
                return Ok(SuiteReport::fail(
                    NAME,
                    format!("order mismatch between {left:?} and {right:?}"),
                ));
            }
        }
    }
    let elements = shape.enumerate_elements(bound)?;
    for a in &elements {
        let seq = shape.ulm_sequence(a);
        if kappa(&ideal_of_element(shape, a)?) != seq || !seqs.contains(&seq) {
            return Ok(SuiteReport::fail(
                NAME,
                format!("element {a:?} has a sequence outside the dictionary"),
            ));
        }
    }
    let element_pairs: Vec<(u64, u64)> = pair_set(elements.len() as u64);
    for &(i, j) in &element_pairs {
        let (a, b) = (&elements[i as usize], &elements[j as usize]);
        let by_ideal = ideal_criterion(shape, a, b)?;
        let ta = ElementTuple::new(vec![a.clone()]).expect("one entry");
        let tb = ElementTuple::new(vec![b.clone()]).expect("one entry");
        if by_ideal != degenerates(shape, &ta, &tb)? {
            return Ok(SuiteReport::fail(
                NAME,
                format!("ideal criterion disagrees with degeneration on pair ({i}, {j})"),
            ));
        }
    }
    Ok(SuiteReport::pass(
        NAME,
        format!(
            "{} sequences = {} ideals = {element_orbits} orbits; inverse maps and orders agree",
            seqs.len(),
            ideals.len()
        ),
    ))
}

fn atom_suite(
    shape: &ModuleShape,
    n: usize,
    bound: u64,
    infos: &[crate::orbits::OrbitInfo],
    table_key: &HashMap<Vec<SubmoduleForm>, u64>,
    elem_count: u64,
) -> Result<SuiteReport> {
    const NAME: &str = "atoms";
    let listed = tuple_atoms(shape, n, bound)?;
    // Exhaustive detection: a nonzero orbit is an atom when its only strict
    // degenerations lead to the zero orbit.
    let mut detected: Vec<u64> = Vec::new();
    for (i, info) in infos.iter().enumerate() {
        if info.representative.entries().iter().all(|e| e.is_zero()) {
            continue;
        }
        let mut atom = true;
        for (j, other) in infos.iter().enumerate() {
            if i == j || other.representative.entries().iter().all(|e| e.is_zero()) {
                continue;
            }
            if degenerates(shape, &info.representative, &other.representative)? {
                atom = false;
                break;
            }
        }
        if atom {
            detected.push(least_index_of(shape, elem_count, infos, i));
        }
    }
    detected.sort_unstable();
    let mut listed_keys: Vec<u64> = Vec::new();
    for t in &listed {
        let table = height_table(shape, t)?;
        listed_keys.push(table_key[&table]);
    }
    listed_keys.sort_unstable();
    listed_keys.dedup();
    if listed_keys != detected {
        return Ok(SuiteReport::fail(
            NAME,
            format!(
                "constructed atoms cover orbits {listed_keys:?} but exhaustive search finds {detected:?}"
            ),
        ));
    }
    if listed.len() != listed_keys.len() {
        return Ok(SuiteReport::fail(
            NAME,
            format!("{} representatives but only {} distinct orbits", listed.len(), listed_keys.len()),
        ));
    }
    Ok(SuiteReport::pass(
        NAME,
        format!("{} atom orbits match exhaustive detection", detected.len()),
    ))
}

fn monotonicity_suite(
    shape: &ModuleShape,
    pairs: &[(u64, u64)],
    tuple_of: &dyn Fn(u64) -> ElementTuple,
) -> SuiteReport {
    const NAME: &str = "n-monotonicity";
    let mut violations = 0u64;
    let mut checked = 0u64;
    for &(i, j) in pairs {
        let (ti, tj) = (tuple_of(i), tuple_of(j));
        if !degenerates(shape, &ti, &tj).expect("same shape") {
            continue;
        }
        checked += 1;
        let (ni, nj) = (
            n_invariant(shape, &ti).expect("same shape"),
            n_invariant(shape, &tj).expect("same shape"),
        );
        if ni > nj {
            violations += 1;
        } else if ni == nj && !degenerates(shape, &tj, &ti).expect("same shape") {
            violations += 1;
        }
    }
    if violations > 0 {
        return SuiteReport::fail(NAME, format!("{violations} monotonicity violations"));
    }
    SuiteReport::pass(NAME, format!("N non-decreasing along {checked} degenerations"))
}

fn depth_suite(shape: &ModuleShape, n: usize, bound: u64) -> Result<SuiteReport> {
    const NAME: &str = "depth-bound";
    let depth = chain_depth(shape, n, bound)?;
    let k = shape.exponent() as u64;
    let limit = n as u64 * k * (k + 1);
    if depth > limit {
        return Ok(SuiteReport::fail(
            NAME,
            format!("longest strict chain {depth} exceeds the bound {limit}"),
        ));
    }
    Ok(SuiteReport::pass(
        NAME,
        format!("longest strict chain {depth} within the bound {limit}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOUND: u64 = 1 << 20;

    #[test]
    fn every_suite_passes_on_the_base_shape() {
        let shape = ModuleShape::integer_local(2, &[(1, 1), (2, 1)]).unwrap();
        for n in [1, 2] {
            let reports = run_all(&shape, n, BOUND).unwrap();
            assert_eq!(reports.len(), 7);
            for r in &reports {
                assert!(r.passed, "suite {} failed for n={n}: {}", r.name, r.detail);
            }
        }
    }

    #[test]
    fn every_suite_passes_on_a_polynomial_shape() {
        let shape = ModuleShape::polynomial_local(2, &[(1, 1), (2, 1)]).unwrap();
        let reports = run_all(&shape, 1, BOUND).unwrap();
        for r in &reports {
            assert!(r.passed, "suite {} failed: {}", r.name, r.detail);
        }
    }

    #[test]
    fn suites_handle_the_zero_module() {
        let shape = ModuleShape::integer_local(3, &[]).unwrap();
        let reports = run_all(&shape, 1, BOUND).unwrap();
        for r in &reports {
            assert!(r.passed, "suite {} failed: {}", r.name, r.detail);
        }
    }

    #[test]
    fn bound_errors_propagate() {
        let shape = ModuleShape::integer_local(2, &[(1, 1), (2, 1)]).unwrap();
        assert!(matches!(
            run_all(&shape, 2, 16),
            Err(crate::error::Error::BoundExceeded { .. })
        ));
    }
}
