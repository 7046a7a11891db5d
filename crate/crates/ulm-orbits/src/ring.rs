//! Residue arithmetic for the two supported discrete valuation rings.
//!
//! Both backends present the quotient `R/p^K` through one scalar encoding: a
//! scalar is a code in `0..q^K`, and its base-`q` digits are the coefficients
//! of the residue.  For the integers localised at a prime `p` (where `q = p`)
//! the code simply *is* the integer representative.  For `F_q[t]` localised at
//! `t`, digit `i` of the code is the index of the coefficient of `t^i` in the
//! residue field `F_q`.  The shared encoding keeps valuation, uniformizer
//! shifts and residue enumeration identical across backends; only addition and
//! multiplication differ.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Residue codes are kept below `2^32` so products fit comfortably in `u128`
/// and exhaustive enumerations can be counted in `u64`.
const MAX_MODULUS: u64 = 1 << 32;

/// Cap on the residue field size of the polynomial backend; field tables are
/// dense `q x q` arrays, so this bounds them to a few megabytes.
const MAX_FIELD: u64 = 1024;

/// A coordinate height or valuation: a natural number or infinity.
///
/// The derived order puts `Finite(a) < Finite(b)` exactly when `a < b`, and
/// every finite value below `Infinite`, which is the order heights need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Height {
    Finite(u32),
    Infinite,
}

impl Height {
    pub fn is_finite(self) -> bool {
        matches!(self, Height::Finite(_))
    }

    /// The finite value, if there is one.
    pub fn finite(self) -> Option<u32> {
        match self {
            Height::Finite(v) => Some(v),
            Height::Infinite => None,
        }
    }
}

impl fmt::Display for Height {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Height::Finite(v) => write!(f, "{v}"),
            Height::Infinite => write!(f, "inf"),
        }
    }
}

/// Which discrete valuation ring a [`RingSpec`] quotients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Integers localised at a rational prime `p`; residues mod `p^K`.
    IntegerLocal,
    /// `F_q[t]` localised at `t`; residues mod `t^K`.
    PolynomialLocal,
}

/// A scalar of some `R/p^K`, stored as its canonical code.
///
/// Scalars carry no pointer back to their ring; the [`RingSpec`] they belong
/// to must be supplied to every operation.  Mixing scalars across rings is
/// guarded where rings are actually visible (shapes, elements, parsers).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar(u64);

impl Scalar {
    pub const ZERO: Scalar = Scalar(0);

    /// The canonical code of this scalar.
    pub fn code(self) -> u64 {
        self.0
    }

    /// Wraps a code that the caller has already range checked.
    pub(crate) fn from_code_unchecked(code: u64) -> Scalar {
        Scalar(code)
    }
}

/// Multiplication tables for a finite field `F_q` with `q = p^e`.
///
/// For `e > 1` the field is realised as `F_p[x]` modulo the monic irreducible
/// polynomial of degree `e` whose coefficient code (base-`p`, constant digit
/// first) is smallest; element `i` is the polynomial with base-`p` digits `i`.
/// Prime fields use the same tables with the identity encoding.
#[derive(Debug)]
struct FieldTable {
    q: u64,
    /// Non-leading coefficients of the modulus polynomial, constant first;
    /// empty for prime fields.
    modulus_poly: Vec<u64>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl FieldTable {
    fn build(p: u64, degree: u32) -> FieldTable {
        let q = p.pow(degree);
        debug_assert!(q <= MAX_FIELD);
        let modulus_poly = if degree == 1 {
            Vec::new()
        } else {
            least_irreducible(p, degree)
        };
        let e = degree as usize;
        let mut add = vec![0u16; (q * q) as usize];
        let mut mul = vec![0u16; (q * q) as usize];
        let mut neg = vec![0u16; q as usize];
        let mut inv = vec![0u16; q as usize];
        for a in 0..q {
            let da = digits(a, p, e);
            let mut dn = vec![0u64; e];
            for i in 0..e {
                dn[i] = (p - da[i]) % p;
            }
            neg[a as usize] = undigits(&dn, p) as u16;
            for b in 0..q {
                let db = digits(b, p, e);
                let mut ds = vec![0u64; e];
                for i in 0..e {
                    ds[i] = (da[i] + db[i]) % p;
                }
                add[(a * q + b) as usize] = undigits(&ds, p) as u16;
                let prod = if degree == 1 {
                    a * b % p
                } else {
                    let full = poly_mul(p, &da, &db);
                    let rem = poly_rem(p, &full, &modulus_poly);
                    undigits(&rem, p)
                };
                mul[(a * q + b) as usize] = prod as u16;
            }
        }
        for a in 1..q {
            for b in 1..q {
                if mul[(a * q + b) as usize] == 1 {
                    inv[a as usize] = b as u16;
                    break;
                }
            }
        }
        FieldTable { q, modulus_poly, add, mul, neg, inv }
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        self.add[(a * self.q + b) as usize] as u64
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.mul[(a * self.q + b) as usize] as u64
    }

    #[inline]
    fn neg(&self, a: u64) -> u64 {
        self.neg[a as usize] as u64
    }

    #[inline]
    fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.inv[a as usize] as u64
    }
}

/// Base-`p` digits of `x`, lowest first, padded to length `len`.
fn digits(x: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len];
    let mut x = x;
    for d in out.iter_mut() {
        *d = x % p;
        x /= p;
    }
    out
}

fn undigits(ds: &[u64], p: u64) -> u64 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Product of coefficient vectors over `F_p` (lowest degree first).
fn poly_mul(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `x^e + modulus_poly`, as
/// coefficients of degree `< e`.
fn poly_rem(p: u64, a: &[u64], modulus_poly: &[u64]) -> Vec<u64> {
    let e = modulus_poly.len();
    let mut work = a.to_vec();
    for d in (e..work.len()).rev() {
        let lead = work[d];
        if lead != 0 {
            work[d] = 0;
            // x^d = x^(d-e) * x^e = -x^(d-e) * modulus_poly  (mod the modulus)
            for (i, &m) in modulus_poly.iter().enumerate() {
                let sub = lead * m % p;
                work[d - e + i] = (work[d - e + i] + p - sub) % p;
            }
        }
    }
    work.truncate(e);
    work
}

/// Non-leading coefficients of the lexicographically least (lowest coefficient
/// code, constant digit first) monic irreducible polynomial of degree `e`
/// over `F_p`.
fn least_irreducible(p: u64, e: u32) -> Vec<u64> {
    let e = e as usize;
    for code in 0..p.pow(e as u32) {
        let tail = digits(code, p, e);
        if is_irreducible(p, &tail) {
            return tail;
        }
    }
    unreachable!("monic irreducible polynomials exist in every degree");
}

/// Whether the monic polynomial `x^e + tail` is irreducible over `F_p`,
/// by trial division against every monic polynomial of degree `1..=e/2`.
fn is_irreducible(p: u64, tail: &[u64]) -> bool {
    let e = tail.len();
    if tail[0] == 0 {
        return false; // divisible by x
    }
    let mut full = tail.to_vec();
    full.push(1);
    for d in 1..=e / 2 {
        for code in 0..p.pow(d as u32) {
            let mut div = digits(code, p, d);
            div.push(1);
            if poly_divides(p, &div, &full) {
                return false;
            }
        }
    }
    true
}

/// Whether monic `div` divides `a` over `F_p`.
fn poly_divides(p: u64, div: &[u64], a: &[u64]) -> bool {
    let tail = &div[..div.len() - 1];
    let rem = poly_rem(p, a, tail);
    rem.iter().all(|&c| c == 0)
}

/// The quotient `R/p^K` of a discrete valuation ring `R`, with `q` the order
/// of the residue field.  `K = 0` encodes the zero ring (only the code 0).
#[derive(Clone)]
pub struct RingSpec {
    backend: Backend,
    base: u64,
    precision: u32,
    modulus: u64,
    field: Option<Arc<FieldTable>>,
}

impl PartialEq for RingSpec {
    fn eq(&self, other: &Self) -> bool {
        self.backend == other.backend
            && self.base == other.base
            && self.precision == other.precision
    }
}

impl Eq for RingSpec {}

impl std::hash::Hash for RingSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.backend, self.base, self.precision).hash(state);
    }
}

impl fmt::Debug for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RingSpec")
            .field("backend", &self.backend)
            .field("base", &self.base)
            .field("precision", &self.precision)
            .finish()
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.backend {
            Backend::IntegerLocal => {
                write!(f, "Z/{}^{} (p = {})", self.base, self.precision, self.base)
            }
            Backend::PolynomialLocal => {
                write!(f, "F_{}[t]/(t^{})", self.base, self.precision)?;
                if let Some(table) = &self.field {
                    if !table.modulus_poly.is_empty() {
                        let p = smallest_prime_factor(self.base);
                        write!(f, " with F_{} = F_{}[x]/(", self.base, p)?;
                        let e = table.modulus_poly.len();
                        write!(f, "x^{e}")?;
                        for (i, &c) in table.modulus_poly.iter().enumerate().rev() {
                            if c == 0 {
                                continue;
                            }
                            match (i, c) {
                                (0, c) => write!(f, " + {c}")?,
                                (1, 1) => write!(f, " + x")?,
                                (1, c) => write!(f, " + {c}x")?,
                                (i, 1) => write!(f, " + x^{i}")?,
                                (i, c) => write!(f, " + {c}x^{i}")?,
                            }
                        }
                        write!(f, ")")?;
                    }
                }
                Ok(())
            }
        }
    }
}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

fn is_prime(n: u64) -> bool {
    n >= 2 && smallest_prime_factor(n) == n
}

impl RingSpec {
    /// The integers localised at the prime `p`, at working precision `K`:
    /// arithmetic happens in `Z/p^K`.
    pub fn integer_local(p: u64, precision: u32) -> Result<RingSpec> {
        if !is_prime(p) {
            return Err(Error::InvalidRing(format!("{p} is not prime")));
        }
        let modulus = checked_power(p, precision)?;
        Ok(RingSpec { backend: Backend::IntegerLocal, base: p, precision, modulus, field: None })
    }

    /// `F_q[t]` localised at `t`, at working precision `K`: arithmetic
    /// happens in `F_q[t]/(t^K)`.  `q` must be a prime power; for `q = p^e`
    /// with `e > 1` the residue field is realised via the least monic
    /// irreducible polynomial of degree `e` over `F_p` (see
    /// [`RingSpec::to_string`] for the chosen modulus).
    pub fn polynomial_local(q: u64, precision: u32) -> Result<RingSpec> {
        let p = smallest_prime_factor(q);
        if q < 2 || !is_prime_power(q, p) {
            return Err(Error::InvalidRing(format!("{q} is not a prime power")));
        }
        if q > MAX_FIELD {
            return Err(Error::InvalidRing(format!(
                "residue field of order {q} exceeds the supported maximum {MAX_FIELD}"
            )));
        }
        let modulus = checked_power(q, precision)?;
        let mut degree = 0u32;
        let mut m = q;
        while m > 1 {
            m /= p;
            degree += 1;
        }
        let field = Arc::new(FieldTable::build(p, degree));
        Ok(RingSpec {
            backend: Backend::PolynomialLocal,
            base: q,
            precision,
            modulus,
            field: Some(field),
        })
    }

    /// The same ring at a different working precision.
    pub fn with_precision(&self, precision: u32) -> Result<RingSpec> {
        let modulus = checked_power(self.base, precision)?;
        Ok(RingSpec {
            backend: self.backend,
            base: self.base,
            precision,
            modulus,
            field: self.field.clone(),
        })
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    /// The order `q` of the residue field.
    pub fn residue_field_order(&self) -> u64 {
        self.base
    }

    /// The working precision `K`.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// The number of residues, `q^K`.
    pub fn residue_count(&self) -> u64 {
        self.modulus
    }

    /// `q^m`, for `m <= K`.
    pub fn power_count(&self, m: u32) -> u64 {
        debug_assert!(m <= self.precision);
        self.base.pow(m)
    }

    /// Checks a raw code and wraps it as a scalar of this ring.
    pub fn scalar(&self, code: u64) -> Result<Scalar> {
        if code < self.modulus {
            Ok(Scalar(code))
        } else {
            Err(Error::Parse(format!(
                "scalar code {code} out of range for {} residues",
                self.modulus
            )))
        }
    }

    /// The scalar with the given uniformizer-power coefficients (lowest
    /// first): digit `i` multiplies `p^i` (integers) or `t^i` (polynomials).
    /// Coefficients beyond the precision must be absent or zero.
    pub fn scalar_from_coefficients(&self, coeffs: &[u64]) -> Result<Scalar> {
        let mut code = 0u64;
        for (i, &c) in coeffs.iter().enumerate() {
            if c >= self.base {
                return Err(Error::Parse(format!(
                    "coefficient {c} out of range for residue field of order {}",
                    self.base
                )));
            }
            if i as u32 >= self.precision {
                if c != 0 {
                    return Err(Error::Parse(format!(
                        "coefficient of index {i} exceeds precision {}",
                        self.precision
                    )));
                }
            } else {
                code += c * self.base.pow(i as u32);
            }
        }
        Ok(Scalar(code))
    }

    /// Base-`q` digits of the scalar, lowest first, with trailing zeros
    /// trimmed (the zero scalar gives an empty vector).
    pub fn scalar_coefficients(&self, x: Scalar) -> Vec<u64> {
        let mut out = Vec::new();
        let mut c = x.0;
        while c != 0 {
            out.push(c % self.base);
            c /= self.base;
        }
        out
    }

    pub fn zero(&self) -> Scalar {
        Scalar(0)
    }

    pub fn one(&self) -> Scalar {
        Scalar(1 % self.modulus.max(1))
    }

    pub fn add(&self, x: Scalar, y: Scalar) -> Scalar {
        self.check(x);
        self.check(y);
        match self.backend {
            Backend::IntegerLocal => Scalar((x.0 + y.0) % self.modulus.max(1)),
            Backend::PolynomialLocal => {
                let table = self.field.as_deref().expect("polynomial ring has a field table");
                let mut out = 0u64;
                let mut scale = 1u64;
                let (mut a, mut b) = (x.0, y.0);
                for _ in 0..self.precision {
                    out += table.add(a % self.base, b % self.base) * scale;
                    a /= self.base;
                    b /= self.base;
                    scale *= self.base;
                }
                Scalar(out)
            }
        }
    }

    pub fn neg(&self, x: Scalar) -> Scalar {
        self.check(x);
        match self.backend {
            Backend::IntegerLocal => Scalar((self.modulus - x.0) % self.modulus.max(1)),
            Backend::PolynomialLocal => {
                let table = self.field.as_deref().expect("polynomial ring has a field table");
                let mut out = 0u64;
                let mut scale = 1u64;
                let mut a = x.0;
                for _ in 0..self.precision {
                    out += table.neg(a % self.base) * scale;
                    a /= self.base;
                    scale *= self.base;
                }
                Scalar(out)
            }
        }
    }

    pub fn sub(&self, x: Scalar, y: Scalar) -> Scalar {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: Scalar, y: Scalar) -> Scalar {
        self.check(x);
        self.check(y);
        match self.backend {
            Backend::IntegerLocal => {
                Scalar((x.0 as u128 * y.0 as u128 % self.modulus.max(1) as u128) as u64)
            }
            Backend::PolynomialLocal => {
                let table = self.field.as_deref().expect("polynomial ring has a field table");
                let k = self.precision as usize;
                let mut da = [0u64; 64];
                let mut db = [0u64; 64];
                let (mut a, mut b) = (x.0, y.0);
                for i in 0..k {
                    da[i] = a % self.base;
                    db[i] = b % self.base;
                    a /= self.base;
                    b /= self.base;
                }
                let mut out = 0u64;
                let mut scale = 1u64;
                for j in 0..k {
                    let mut digit = 0u64;
                    for i in 0..=j {
                        if da[i] != 0 && db[j - i] != 0 {
                            digit = table.add(digit, table.mul(da[i], db[j - i]));
                        }
                    }
                    out += digit * scale;
                    scale *= self.base;
                }
                Scalar(out)
            }
        }
    }

    /// The uniformizer power `p^v` (or `t^v`); zero once `v` reaches the
    /// precision.
    pub fn uniformizer_power(&self, v: u32) -> Scalar {
        if v >= self.precision {
            Scalar(0)
        } else {
            Scalar(self.base.pow(v))
        }
    }

    /// Multiplies by `p^d`.  In the shared encoding this shifts the code's
    /// base-`q` digits upward, which is plain multiplication for both
    /// backends.
    pub fn shift_up(&self, x: Scalar, d: u32) -> Scalar {
        self.check(x);
        if d >= self.precision {
            return Scalar(0);
        }
        Scalar(x.0 * self.base.pow(d) % self.modulus.max(1))
    }

    /// The reduction of `x` modulo `p^m`.
    pub fn reduce_mod_power(&self, x: Scalar, m: u32) -> Scalar {
        self.check(x);
        if m >= self.precision {
            x
        } else {
            Scalar(x.0 % self.base.pow(m))
        }
    }

    /// The `p`-adic (or `t`-adic) valuation of `x`; infinity exactly for the
    /// zero scalar.
    pub fn valuation(&self, x: Scalar) -> Height {
        self.check(x);
        if x.0 == 0 {
            return Height::Infinite;
        }
        let mut c = x.0;
        let mut v = 0u32;
        while c % self.base == 0 {
            c /= self.base;
            v += 1;
        }
        Height::Finite(v)
    }

    pub fn is_unit(&self, x: Scalar) -> bool {
        self.valuation(x) == Height::Finite(0)
    }

    /// The unit `u` in the factorisation `x = u * p^v`; zero for the zero
    /// scalar.  In the shared encoding this shifts the digits down.
    pub fn unit_part(&self, x: Scalar) -> Scalar {
        self.check(x);
        if x.0 == 0 {
            return Scalar(0);
        }
        let mut c = x.0;
        while c % self.base == 0 {
            c /= self.base;
        }
        Scalar(c)
    }

    /// The inverse of a unit.
    ///
    /// # Panics
    /// If `x` is not a unit.
    pub fn invert_unit(&self, x: Scalar) -> Scalar {
        self.check(x);
        assert!(self.is_unit(x), "invert_unit needs a unit, got code {}", x.0);
        match self.backend {
            Backend::IntegerLocal => {
                let inv = mod_inverse(x.0 as i128, self.modulus as i128);
                Scalar(inv as u64)
            }
            Backend::PolynomialLocal => {
                let table = self.field.as_deref().expect("polynomial ring has a field table");
                // Hensel/Newton iteration y <- y + y*(1 - x*y), starting from
                // the inverse of the constant digit; precision doubles each
                // round.
                let mut y = Scalar(table.inv(x.0 % self.base));
                let mut bits = 1u32;
                while bits < self.precision {
                    let err = self.sub(self.one(), self.mul(x, y));
                    y = self.add(y, self.mul(y, err));
                    bits *= 2;
                }
                y
            }
        }
    }

    /// All residues of `R/p^m` for `m <= K`, in code order: the codes
    /// `0..q^m`.
    pub fn enumerate_residues(&self, precision: u32) -> Result<Vec<Scalar>> {
        if precision > self.precision {
            return Err(Error::InvalidRing(format!(
                "cannot enumerate at precision {precision} above working precision {}",
                self.precision
            )));
        }
        Ok((0..self.base.pow(precision)).map(Scalar).collect())
    }

    #[inline]
    fn check(&self, x: Scalar) {
        debug_assert!(
            x.0 < self.modulus.max(1),
            "scalar code {} out of range for modulus {}",
            x.0,
            self.modulus
        );
    }
}

fn is_prime_power(q: u64, p: u64) -> bool {
    let mut m = q;
    while m % p == 0 {
        m /= p;
    }
    m == 1
}

fn checked_power(base: u64, exp: u32) -> Result<u64> {
    let mut out: u64 = 1;
    for _ in 0..exp {
        out = out
            .checked_mul(base)
            .filter(|&m| m <= MAX_MODULUS)
            .ok_or_else(|| {
                Error::InvalidRing(format!(
                    "modulus {base}^{exp} exceeds the supported maximum 2^32"
                ))
            })?;
    }
    Ok(out)
}

/// Inverse of `a` modulo `m` via the extended Euclidean algorithm; `a` must
/// be coprime to `m`.
fn mod_inverse(a: i128, m: i128) -> i128 {
    let (mut old_r, mut r) = (a, m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert!(old_r == 1 || old_r == -1);
    let mut inv = old_s * old_r.signum();
    inv %= m;
    if inv < 0 {
        inv += m;
    }
    inv
}
