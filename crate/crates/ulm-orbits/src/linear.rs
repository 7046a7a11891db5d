//! Canonical forms for submodules of `(R/p^K)^n` and the height tables that
//! fingerprint tuples.
//!
//! `R/p^K` is a chain ring, so every submodule of the free module `(R/p^K)^n`
//! has a unique Howell-style canonical generating matrix: pivot entries are
//! exact uniformizer powers `p^v` in strictly increasing columns, entries
//! above a pivot are reduced modulo that pivot, and for every row the
//! "closure" multiple `p^(K-v) * row` lies in the span of the later rows.
//! Equality of submodules is then literal equality of matrices, which is what
//! lets height tables act as orbit fingerprints.

use crate::error::Result;
use crate::exec;
use crate::module::{ElementTuple, ModuleShape};
use crate::ring::{Height, RingSpec, Scalar};

/// Above this many coefficient vectors, height tables switch from exhaustive
/// enumeration to the kernel-based computation.  Doubles as the default cap
/// for every user-facing enumeration.
pub const EXHAUSTIVE_CAP: u64 = 1 << 20;

/// A submodule of `(R/p^K)^n` in canonical row form.
///
/// Two values compare equal exactly when they denote the same submodule of
/// the same ambient free module.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SubmoduleForm {
    n: usize,
    precision: u32,
    rows: Vec<Vec<Scalar>>,
    /// `(column, valuation)` of each row's pivot, in row order.
    pivots: Vec<(usize, u32)>,
}

impl SubmoduleForm {
    /// The ambient rank `n`.
    pub fn ambient_rank(&self) -> usize {
        self.n
    }

    /// The ambient precision `K`.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// The canonical generating rows.
    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    /// `(column, valuation)` of each pivot.
    pub fn pivots(&self) -> &[(usize, u32)] {
        &self.pivots
    }

    /// `log_q` of the number of vectors in the submodule.
    pub fn log_cardinality(&self) -> u64 {
        self.pivots.iter().map(|&(_, v)| (self.precision - v) as u64).sum()
    }

    /// Whether this is all of `(R/p^K)^n`.
    pub fn is_full(&self) -> bool {
        self.log_cardinality() == self.n as u64 * self.precision as u64
    }

    /// Whether this is the zero submodule.
    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Greedy left-to-right reduction of `v` by the canonical rows.  The
    /// result is zero exactly when `v` lies in the submodule.
    pub fn reduce(&self, ring: &RingSpec, v: &[Scalar]) -> Vec<Scalar> {
        debug_assert_eq!(v.len(), self.n);
        let mut r = v.to_vec();
        for (row, &(col, pv)) in self.rows.iter().zip(&self.pivots) {
            let x = r[col];
            if let Some(m) = divide_by_power(ring, x, pv) {
                for (ri, wi) in r.iter_mut().zip(row) {
                    *ri = ring.sub(*ri, ring.mul(m, *wi));
                }
            }
        }
        r
    }

    /// Membership test.
    pub fn contains(&self, ring: &RingSpec, v: &[Scalar]) -> bool {
        self.reduce(ring, v).iter().all(|&x| x == Scalar::ZERO)
    }

    /// Whether `other` is a submodule of `self`.
    pub fn includes(&self, ring: &RingSpec, other: &SubmoduleForm) -> bool {
        debug_assert_eq!(self.n, other.n);
        other.rows.iter().all(|row| self.contains(ring, row))
    }
}

/// `x / p^v` when the valuation of `x` is at least `v`; `None` when it is
/// smaller (or `x` is zero, where no reduction step is useful).
fn divide_by_power(ring: &RingSpec, x: Scalar, v: u32) -> Option<Scalar> {
    match ring.valuation(x) {
        Height::Infinite => None,
        Height::Finite(w) if w < v => None,
        Height::Finite(w) => Some(ring.shift_up(ring.unit_part(x), w - v)),
    }
}

/// The full module `(R/p^K)^n` (identity rows).
pub fn full_form(ring: &RingSpec, n: usize) -> SubmoduleForm {
    if ring.precision() == 0 {
        return zero_form(ring, n);
    }
    let one = ring.one();
    let rows: Vec<Vec<Scalar>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { one } else { Scalar::ZERO }).collect())
        .collect();
    let pivots = (0..n).map(|i| (i, 0)).collect();
    SubmoduleForm { n, precision: ring.precision(), rows, pivots }
}

/// The zero submodule of `(R/p^K)^n`.
pub fn zero_form(ring: &RingSpec, n: usize) -> SubmoduleForm {
    SubmoduleForm { n, precision: ring.precision(), rows: Vec::new(), pivots: Vec::new() }
}

/// The canonical form of the submodule generated by `generators`.
pub fn howell_form(ring: &RingSpec, n: usize, generators: &[Vec<Scalar>]) -> SubmoduleForm {
    let k = ring.precision();
    if k == 0 || n == 0 {
        return zero_form(ring, n);
    }
    let mut worklist: Vec<Vec<Scalar>> = generators
        .iter()
        .inspect(|g| debug_assert_eq!(g.len(), n))
        .filter(|g| g.iter().any(|&x| x != Scalar::ZERO))
        .cloned()
        .collect();
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut pivots: Vec<(usize, u32)> = Vec::new();

    for col in 0..n {
        // Rows whose leading coordinate sits in this column.
        let mut bucket = Vec::new();
        let mut rest = Vec::new();
        for row in worklist {
            if leading_column(&row) == Some(col) {
                bucket.push(row);
            } else {
                rest.push(row);
            }
        }
        worklist = rest;
        if bucket.is_empty() {
            continue;
        }

        // Pivot: a row of minimal valuation in this column, normalised so the
        // pivot entry is exactly p^v.
        let best = bucket
            .iter()
            .enumerate()
            .min_by_key(|(i, row)| (ring.valuation(row[col]), *i))
            .map(|(i, _)| i)
            .expect("bucket is nonempty");
        let mut pivot_row = bucket.swap_remove(best);
        let pv = ring
            .valuation(pivot_row[col])
            .finite()
            .expect("leading entry is nonzero");
        let unit_inv = ring.invert_unit(ring.unit_part(pivot_row[col]));
        for x in pivot_row.iter_mut() {
            *x = ring.mul(unit_inv, *x);
        }

        // Eliminate the rest of the bucket; their leading columns move right.
        for mut other in bucket {
            let m = divide_by_power(ring, other[col], pv)
                .expect("pivot valuation is minimal in its column");
            for (oi, pi) in other.iter_mut().zip(&pivot_row) {
                *oi = ring.sub(*oi, ring.mul(m, *pi));
            }
            if leading_column(&other).is_some() {
                worklist.push(other);
            }
        }

        // Howell closure: p^(K-v) * pivot_row kills the pivot but may leave a
        // nonzero tail that later columns must absorb.
        if pv > 0 {
            let closure: Vec<Scalar> =
                pivot_row.iter().map(|&x| ring.shift_up(x, k - pv)).collect();
            if leading_column(&closure).is_some() {
                worklist.push(closure);
            }
        }

        rows.push(pivot_row);
        pivots.push((col, pv));
    }

    // Reduce entries above each pivot modulo the pivot's power.  Left to
    // right: a subtraction at column c only perturbs columns >= c, which
    // later steps then reduce.
    for i in 0..rows.len() {
        let (col, pv) = pivots[i];
        for j in 0..i {
            let x = rows[j][col];
            let low = ring.reduce_mod_power(x, pv);
            let diff = ring.sub(x, low);
            if let Some(m) = divide_by_power(ring, diff, pv) {
                let pivot_row = rows[i].clone();
                for (rj, pi) in rows[j].iter_mut().zip(&pivot_row) {
                    *rj = ring.sub(*rj, ring.mul(m, *pi));
                }
            }
        }
    }

    SubmoduleForm { n, precision: k, rows, pivots }
}

/// The column of the first nonzero entry.
fn leading_column(row: &[Scalar]) -> Option<usize> {
    row.iter().position(|&x| x != Scalar::ZERO)
}

/// Extends a canonical form by extra generators, reusing the existing rows.
fn absorb(ring: &RingSpec, form: &SubmoduleForm, extra: &[Vec<Scalar>]) -> SubmoduleForm {
    let mut gens = form.rows.clone();
    let mut changed = false;
    for row in extra {
        if !form.contains(ring, row) {
            gens.push(row.clone());
            changed = true;
        }
    }
    if changed {
        howell_form(ring, form.n, &gens)
    } else {
        form.clone()
    }
}

/// The kernel of `x ↦ Σ x_i · images[i]` as a submodule of `(R/p^K)^m`,
/// where `m = images.len()` and each image is a vector over `R/p^K`.
pub fn kernel_form(ring: &RingSpec, images: &[Vec<Scalar>]) -> SubmoduleForm {
    let m = images.len();
    if m == 0 {
        return zero_form(ring, 0);
    }
    let c = images[0].len();
    // Augment with an identity block and take the rows whose image part is
    // zero; in a Howell form those generate the whole kernel.
    let aug: Vec<Vec<Scalar>> = images
        .iter()
        .enumerate()
        .map(|(i, img)| {
            debug_assert_eq!(img.len(), c);
            let mut row = img.clone();
            row.extend((0..m).map(|j| if i == j { ring.one() } else { Scalar::ZERO }));
            row
        })
        .collect();
    let full = howell_form(ring, c + m, &aug);
    let tails: Vec<Vec<Scalar>> = full
        .rows
        .iter()
        .filter(|row| row[..c].iter().all(|&x| x == Scalar::ZERO))
        .map(|row| row[c..].to_vec())
        .collect();
    howell_form(ring, m, &tails)
}

/// The height table of a tuple at the shape's own precision: the canonical
/// forms of `M_h = { r : h(r_1 a_1 + ... + r_n a_n) >= h }` for
/// `h = 0, ..., k`.  Equality of tables classifies tuples up to
/// automorphism; inclusion detects degeneration.
pub fn height_table(shape: &ModuleShape, tuple: &ElementTuple) -> Result<Vec<SubmoduleForm>> {
    height_table_at(shape, tuple, shape.exponent())
}

/// The height table with coefficients drawn from `R/p^K` for a chosen
/// working precision `K >= k`; used to compare tuples across shapes over the
/// same ring.
pub fn height_table_at(
    shape: &ModuleShape,
    tuple: &ElementTuple,
    precision: u32,
) -> Result<Vec<SubmoduleForm>> {
    debug_assert!(precision >= shape.exponent());
    for e in tuple.entries() {
        shape.check_element(e)?;
    }
    let ring = shape.ring().with_precision(precision)?;
    let n = tuple.len();
    // The kernel route costs a few Howell reductions; the enumeration route
    // walks every coefficient vector and is only worth taking when that walk
    // is tiny.  Both produce the same canonical forms.
    const ENUMERATION_ROUTE_CAP: u128 = 1 << 12;
    let total = (ring.residue_count() as u128).checked_pow(n as u32);
    match total {
        Some(t) if t <= ENUMERATION_ROUTE_CAP => {
            Ok(height_table_by_enumeration(shape, tuple, &ring))
        }
        _ => Ok(height_table_by_kernels(shape, tuple, &ring)),
    }
}

/// Exhaustive-route height table: walk every coefficient vector, record the
/// height of its combination, then absorb the vectors level by level.
pub fn height_table_by_enumeration(
    shape: &ModuleShape,
    tuple: &ElementTuple,
    ring: &RingSpec,
) -> Vec<SubmoduleForm> {
    let k = ring.precision();
    let n = tuple.len();
    if k == 0 {
        return vec![zero_form(ring, n)];
    }
    let radix = ring.residue_count();
    let total = radix.pow(n as u32);
    // Coefficients live in R/p^K, but act on the shape through their
    // reduction to the shape's own working ring.
    let shape_ring = shape.ring();
    let shape_radix = shape_ring.residue_count();
    let heights: Vec<Height> = exec::map_indexed(total, |idx| {
        let coeffs: Vec<Scalar> = decode_coefficients(ring, idx, n)
            .iter()
            .map(|c| {
                shape_ring
                    .scalar(c.code() % shape_radix)
                    .expect("reduced code is in range")
            })
            .collect();
        let combo = shape
            .linear_combination(tuple.entries(), &coeffs)
            .expect("tuple and coefficients have matching arity");
        shape.height(&combo)
    });
    let mut table = Vec::with_capacity(k as usize + 1);
    table.push(full_form(ring, n));
    for h in 1..=k {
        let mut form = zero_form(ring, n);
        let needed = Height::Finite(h);
        for (idx, &ht) in heights.iter().enumerate() {
            if ht >= needed && !form.is_full() {
                let coeffs = decode_coefficients(ring, idx as u64, n);
                form = absorb(ring, &form, &[coeffs]);
            }
        }
        table.push(form);
    }
    table
}

/// Kernel-route height table: `M_h` is the kernel of the map that sends a
/// coefficient vector to the mod-`p^min(h, α_c)` residues of its combination,
/// with each congruence embedded into `R/p^K` by scaling with
/// `p^(K - min(h, α_c))`.
pub fn height_table_by_kernels(
    shape: &ModuleShape,
    tuple: &ElementTuple,
    ring: &RingSpec,
) -> Vec<SubmoduleForm> {
    let k = ring.precision();
    let n = tuple.len();
    if k == 0 {
        return vec![zero_form(ring, n)];
    }
    let exponents = shape.factor_exponents();
    let mut table = Vec::with_capacity(k as usize + 1);
    table.push(full_form(ring, n));
    for h in 1..=k {
        let images: Vec<Vec<Scalar>> = tuple
            .entries()
            .iter()
            .map(|a| {
                a.coords()
                    .iter()
                    .zip(exponents)
                    .map(|(&x, &alpha)| ring.shift_up(x, k - h.min(alpha)))
                    .collect()
            })
            .collect();
        table.push(kernel_form(ring, &images));
    }
    table
}

/// Decodes coefficient vector number `idx` (mixed radix, coordinate 0 least
/// significant).
fn decode_coefficients(ring: &RingSpec, mut idx: u64, n: usize) -> Vec<Scalar> {
    let radix = ring.residue_count();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(ring.scalar(idx % radix).expect("residue code is in range"));
        idx /= radix;
    }
    out
}

/// The first `(h, coefficient vector)` certifying that `a_tables` is not
/// included in `b_tables` level by level, if any.  The vector produces
/// combinations of height `>= h` on one side and `< h` on the other.
pub fn table_inclusion_failure(
    ring: &RingSpec,
    a_tables: &[SubmoduleForm],
    b_tables: &[SubmoduleForm],
) -> Option<(u32, Vec<Scalar>)> {
    debug_assert_eq!(a_tables.len(), b_tables.len());
    for (h, (ma, mb)) in a_tables.iter().zip(b_tables).enumerate() {
        for row in ma.rows() {
            if !mb.contains(ring, row) {
                return Some((h as u32, row.clone()));
            }
        }
    }
    None
}
