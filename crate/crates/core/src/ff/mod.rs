//! Exact arithmetic in prime fields `F_p` and extension fields `F_{p^m}`.
//!
//! A [`FieldSpec`] names a field: the characteristic, the degree, and the
//! monic irreducible modulus used for the power basis. A [`Field`] wraps a
//! spec with whatever lookup tables make arithmetic fast, and is the context
//! every operation goes through. Elements are [`FieldElem`] values: a packed
//! index `c_0 + c_1 p + ... + c_{m-1} p^{m-1}` of the power-basis coordinates,
//! so equality of elements is equality of coefficient sequences and the
//! enumeration order is plain integer order.

mod upoly;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field cardinality.
pub const MAX_FIELD_SIZE: u64 = 1 << 31;

/// Extension fields up to this size get exp/log/Zech tables.
const TABLE_LIMIT: u64 = 1 << 20;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    InvalidDegree(u32),
    #[error("field of size {p}^{m} exceeds the supported bound 2^31")]
    TooLarge { p: u64, m: u32 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("the zero element has no multiplicative order")]
    ZeroElement,
    #[error("operand is not an element of F_{q}")]
    SpecMismatch { q: u64 },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `(p, m)` with `q = p^m`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let p = (2..=q).find(|d| q.is_multiple_of(*d) && is_prime(*d))?;
    let mut m = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

/// Description of a finite field `F_p[t]/(modulus)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub m: u32,
    /// Monic modulus, low degree first, length `m + 1`.
    pub modulus: Vec<u64>,
    pub q: u64,
}

/// The prime field `F_p`; its modulus is the placeholder `t`.
pub fn make_prime_field(p: u64) -> Result<FieldSpec, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if p > MAX_FIELD_SIZE {
        return Err(FieldError::TooLarge { p, m: 1 });
    }
    Ok(FieldSpec {
        p,
        m: 1,
        modulus: vec![0, 1],
        q: p,
    })
}

fn checked_size(p: u64, m: u32) -> Result<u64, FieldError> {
    let mut q: u64 = 1;
    for _ in 0..m {
        q = q
            .checked_mul(p)
            .filter(|&q| q <= MAX_FIELD_SIZE)
            .ok_or(FieldError::TooLarge { p, m })?;
    }
    Ok(q)
}

/// Monic candidate number `index` of degree `m` (index order on `c_0..c_{m-1}`,
/// `c_0` least significant).
fn candidate_modulus(p: u64, m: u32, mut index: u64) -> Vec<u64> {
    let mut coeffs = Vec::with_capacity(m as usize + 1);
    for _ in 0..m {
        coeffs.push(index % p);
        index /= p;
    }
    coeffs.push(1);
    coeffs
}

/// `F_{p^m}` with the first irreducible modulus at or after candidate
/// `search_start` (wrapping around). Degree 1 delegates to [`make_prime_field`].
pub fn make_extension(p: u64, m: u32, search_start: u64) -> Result<FieldSpec, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    match m {
        0 => return Err(FieldError::InvalidDegree(0)),
        1 => return make_prime_field(p),
        _ => {}
    }
    let q = checked_size(p, m)?;
    for offset in 0..q {
        let modulus = candidate_modulus(p, m, (search_start + offset) % q);
        if modulus[0] == 0 || upoly::has_root(&modulus, p) {
            continue;
        }
        if upoly::is_irreducible(&modulus, p) {
            return Ok(FieldSpec { p, m, modulus, q });
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

impl FieldSpec {
    /// A spec with a caller-chosen modulus, validated for irreducibility.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let modulus = upoly::trim(modulus.into_iter().map(|c| c % p).collect());
        if modulus.len() < 2 || modulus.last() != Some(&1) {
            return Err(FieldError::InvalidModulus(
                "modulus must be monic of degree at least 1".into(),
            ));
        }
        let m = (modulus.len() - 1) as u32;
        if m == 1 {
            return make_prime_field(p);
        }
        let q = checked_size(p, m)?;
        if upoly::has_root(&modulus, p) || !upoly::is_irreducible(&modulus, p) {
            return Err(FieldError::InvalidModulus(format!(
                "{modulus:?} is reducible over F_{p}"
            )));
        }
        Ok(FieldSpec { p, m, modulus, q })
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m == 1 {
            return write!(f, "F_{}", self.p);
        }
        write!(f, "F_{}^{} (modulus ", self.p, self.m)?;
        let mut first = true;
        for (deg, &c) in self.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (deg, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}*t")?,
                (d, 1) => write!(f, "t^{d}")?,
                (d, c) => write!(f, "{c}*t^{d}")?,
            }
        }
        write!(f, ")")
    }
}

/// A field element, stored as the packed index of its power-basis coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn index(self) -> u64 {
        self.0 as u64
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A request for [`Field::checked`].
#[derive(Clone, Debug)]
pub enum Arith<'a> {
    Add(FieldElem, FieldElem),
    Sub(FieldElem, FieldElem),
    Mul(FieldElem, FieldElem),
    Neg(FieldElem),
    Inv(FieldElem),
    Pow(FieldElem, &'a BigInt),
}

#[derive(Debug)]
struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[d] = log(1 + g^d)`, or `NO_LOG` when `1 + g^d = 0`.
    zech: Vec<u32>,
}

/// Arithmetic context for one finite field.
#[derive(Debug)]
pub struct Field {
    spec: FieldSpec,
    tables: Option<LogTables>,
}

/// Shared handle; fields are immutable once built.
pub type FieldRef = Arc<Field>;

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Self {
        let mut field = Field { spec, tables: None };
        if field.spec.m > 1 && field.spec.q <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        field
    }

    pub fn shared(spec: FieldSpec) -> FieldRef {
        Arc::new(Field::new(spec))
    }

    pub fn prime(p: u64) -> Result<FieldRef, FieldError> {
        Ok(Field::shared(make_prime_field(p)?))
    }

    pub fn extension(p: u64, m: u32) -> Result<FieldRef, FieldError> {
        Ok(Field::shared(make_extension(p, m, 0)?))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn m(&self) -> u32 {
        self.spec.m
    }

    pub fn q(&self) -> u64 {
        self.spec.q
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    fn build_tables(&self) -> LogTables {
        let n = (self.spec.q - 1) as usize;
        let g = self.find_generator_schoolbook();
        let mut exp = Vec::with_capacity(n);
        let mut log = vec![NO_LOG; self.spec.q as usize];
        let mut x = FieldElem::ONE;
        for i in 0..n {
            exp.push(x.0);
            log[x.0 as usize] = i as u32;
            x = self.mul_schoolbook(x, g);
        }
        let zech = (0..n)
            .map(|d| {
                let s = self.add_digits(FieldElem(exp[d]), FieldElem::ONE);
                log[s.0 as usize]
            })
            .collect();
        LogTables { exp, log, zech }
    }

    fn find_generator_schoolbook(&self) -> FieldElem {
        let n = self.spec.q - 1;
        let primes = upoly::prime_divisors(n);
        (1..self.spec.q)
            .map(|i| FieldElem(i as u32))
            .find(|&x| {
                primes
                    .iter()
                    .all(|&r| self.pow_schoolbook(x, n / r) != FieldElem::ONE)
            })
            .expect("multiplicative group of a finite field is cyclic")
    }

    pub fn contains(&self, x: FieldElem) -> bool {
        x.index() < self.spec.q
    }

    /// Element from power-basis coordinates (reduced mod p, padded with zeros).
    pub fn elem(&self, coeffs: &[u64]) -> Result<FieldElem, FieldError> {
        if coeffs.len() > self.spec.m as usize {
            return Err(FieldError::SpecMismatch { q: self.spec.q });
        }
        let p = self.spec.p;
        let idx = coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + c % p);
        Ok(FieldElem(idx as u32))
    }

    /// The image of an integer in the prime subfield.
    pub fn from_i64(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.spec.p as i64) as u32)
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElem {
        let p = BigInt::from(self.spec.p);
        let r = ((n % &p) + &p) % &p;
        FieldElem(r.to_u32().expect("residue below p fits"))
    }

    /// Element number `index` of the enumeration order.
    pub fn element(&self, index: u64) -> FieldElem {
        assert!(index < self.spec.q, "element index {index} out of range");
        FieldElem(index as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (0..self.spec.q as u32).map(FieldElem)
    }

    pub fn elements_from(&self, start: u64) -> impl Iterator<Item = FieldElem> {
        (start.min(self.spec.q) as u32..self.spec.q as u32).map(FieldElem)
    }

    pub fn coeffs(&self, x: FieldElem) -> Vec<u64> {
        let p = self.spec.p;
        let mut idx = x.index();
        (0..self.spec.m)
            .map(|_| {
                let c = idx % p;
                idx /= p;
                c
            })
            .collect()
    }

    /// Is `x` in the prime subfield `F_p`?
    pub fn is_prime_subfield(&self, x: FieldElem) -> bool {
        x.index() < self.spec.p
    }

    /// Human-readable form: the residue for prime-subfield values, otherwise
    /// the coefficient tuple `[c0,...,c_{m-1}]`.
    pub fn format(&self, x: FieldElem) -> String {
        if self.spec.m == 1 {
            return x.0.to_string();
        }
        let parts: Vec<String> = self.coeffs(x).iter().map(u64::to_string).collect();
        format!("[{}]", parts.join(","))
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.spec.m == 1 {
            let s = a.0 as u64 + b.0 as u64;
            let p = self.spec.p;
            return FieldElem(if s >= p { s - p } else { s } as u32);
        }
        match &self.tables {
            Some(t) => {
                if a.0 == 0 {
                    return b;
                }
                if b.0 == 0 {
                    return a;
                }
                let n = t.exp.len() as u32;
                let la = t.log[a.0 as usize];
                let lb = t.log[b.0 as usize];
                let d = if lb >= la { lb - la } else { lb + n - la };
                let z = t.zech[d as usize];
                if z == NO_LOG {
                    return FieldElem::ZERO;
                }
                let e = la as u64 + z as u64;
                FieldElem(t.exp[(e % n as u64) as usize])
            }
            None => self.add_digits(a, b),
        }
    }

    fn add_digits(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.spec.p;
        let (mut x, mut y) = (a.index(), b.index());
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.spec.m {
            let s = (x % p + y % p) % p;
            out += s * place;
            place *= p;
            x /= p;
            y /= p;
        }
        FieldElem(out as u32)
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let p = self.spec.p;
        if self.spec.m == 1 {
            return if a.0 == 0 { a } else { FieldElem((p - a.0 as u64) as u32) };
        }
        if p == 2 {
            return a;
        }
        let mut x = a.index();
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.spec.m {
            let c = x % p;
            out += ((p - c) % p) * place;
            place *= p;
            x /= p;
        }
        FieldElem(out as u32)
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.spec.m == 1 {
            return FieldElem(upoly::mul_mod(a.index(), b.index(), self.spec.p) as u32);
        }
        match &self.tables {
            Some(t) => {
                if a.0 == 0 || b.0 == 0 {
                    return FieldElem::ZERO;
                }
                let n = t.exp.len();
                let e = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
                FieldElem(t.exp[if e >= n { e - n } else { e }])
            }
            None => self.mul_schoolbook(a, b),
        }
    }

    /// Multiplication through polynomial product and reduction by the modulus.
    pub fn mul_schoolbook(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.spec.p;
        let prod = upoly::mul(&self.coeffs(a), &self.coeffs(b), p);
        let r = upoly::rem(&prod, &self.spec.modulus, p);
        self.elem(&r).expect("remainder has degree below m")
    }

    fn pow_schoolbook(&self, mut base: FieldElem, mut exp: u64) -> FieldElem {
        let mut acc = FieldElem::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_schoolbook(acc, base);
            }
            base = self.mul_schoolbook(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn pow(&self, base: FieldElem, exp: u64) -> FieldElem {
        if exp == 0 {
            return FieldElem::ONE;
        }
        if base.is_zero() {
            return FieldElem::ZERO;
        }
        if let Some(t) = &self.tables {
            let n = t.exp.len() as u128;
            let e = (t.log[base.0 as usize] as u128 * exp as u128) % n;
            return FieldElem(t.exp[e as usize]);
        }
        let mut acc = FieldElem::ONE;
        let mut b = base;
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// Power with an arbitrary-precision exponent; negative exponents invert.
    pub fn pow_big(&self, base: FieldElem, exp: &BigInt) -> Result<FieldElem, FieldError> {
        if exp.is_zero() {
            return Ok(FieldElem::ONE);
        }
        if base.is_zero() {
            return if exp.is_negative() {
                Err(FieldError::DivisionByZero)
            } else {
                Ok(FieldElem::ZERO)
            };
        }
        let b = if exp.is_negative() { self.inv(base)? } else { base };
        // x^(q-1) = 1 for x != 0
        let order = BigInt::from(self.spec.q - 1);
        let e = (exp.abs() % order).to_u64().expect("reduced exponent fits");
        Ok(self.pow(b, e))
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.spec.m == 1 {
            return Ok(FieldElem(upoly::mod_inv(a.index(), self.spec.p) as u32));
        }
        if let Some(t) = &self.tables {
            let n = t.exp.len();
            let l = t.log[a.0 as usize] as usize;
            return Ok(FieldElem(t.exp[(n - l) % n]));
        }
        Ok(self.pow(a, self.spec.q - 2))
    }

    /// Inverse via the extended Euclidean algorithm on polynomials.
    pub fn inv_euclid(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let p = self.spec.p;
        if self.spec.m == 1 {
            return Ok(FieldElem(upoly::mod_inv(a.index(), p) as u32));
        }
        let inv = upoly::inv_mod_poly(&self.coeffs(a), &self.spec.modulus, p)
            .expect("modulus is irreducible");
        self.elem(&inv)
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Arithmetic with operand validation.
    pub fn checked(&self, op: Arith<'_>) -> Result<FieldElem, FieldError> {
        let check = |x: FieldElem| {
            if self.contains(x) {
                Ok(x)
            } else {
                Err(FieldError::SpecMismatch { q: self.spec.q })
            }
        };
        match op {
            Arith::Add(a, b) => Ok(self.add(check(a)?, check(b)?)),
            Arith::Sub(a, b) => Ok(self.sub(check(a)?, check(b)?)),
            Arith::Mul(a, b) => Ok(self.mul(check(a)?, check(b)?)),
            Arith::Neg(a) => Ok(self.neg(check(a)?)),
            Arith::Inv(a) => self.inv(check(a)?),
            Arith::Pow(a, e) => self.pow_big(check(a)?, e),
        }
    }

    /// Least `d >= 1` with `x^d = 1`, found by stripping prime factors of `q - 1`.
    pub fn element_order(&self, x: FieldElem) -> Result<u64, FieldError> {
        if x.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        let mut order = self.spec.q - 1;
        for r in upoly::prime_divisors(order) {
            while order.is_multiple_of(r) && self.pow(x, order / r) == FieldElem::ONE {
                order /= r;
            }
        }
        Ok(order)
    }

    /// First element (in enumeration order) of multiplicative order `q - 1`.
    pub fn find_generator(&self) -> FieldElem {
        let n = self.spec.q - 1;
        self.elements()
            .skip(1)
            .find(|&x| self.element_order(x) == Ok(n))
            .expect("multiplicative group of a finite field is cyclic")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields_up_to(qmax: u64) -> Vec<FieldRef> {
        let mut out = Vec::new();
        for p in 2..=qmax {
            if !is_prime(p) {
                continue;
            }
            let mut m = 1;
            while p.pow(m) <= qmax {
                out.push(Field::extension(p, m).unwrap());
                m += 1;
            }
        }
        out
    }

    #[test]
    fn prime_field_construction() {
        let f5 = make_prime_field(5).unwrap();
        assert_eq!((f5.p, f5.m, f5.q), (5, 1, 5));
        let f2 = make_prime_field(2).unwrap();
        assert_eq!((f2.p, f2.m, f2.q), (2, 1, 2));
        assert_eq!(make_prime_field(6), Err(FieldError::NotPrime(6)));
        assert_eq!(make_prime_field(1), Err(FieldError::NotPrime(1)));
    }

    #[test]
    fn first_irreducible_moduli() {
        assert_eq!(make_extension(2, 2, 0).unwrap().modulus, vec![1, 1, 1]);
        assert_eq!(make_extension(3, 2, 0).unwrap().modulus, vec![1, 0, 1]);
        assert_eq!(make_extension(5, 1, 0).unwrap(), make_prime_field(5).unwrap());
        assert_eq!(make_extension(5, 0, 0), Err(FieldError::InvalidDegree(0)));
        assert_eq!(make_extension(4, 2, 0), Err(FieldError::NotPrime(4)));
    }

    #[test]
    fn extension_search_is_deterministic() {
        for (p, m) in [(2, 5), (3, 3), (5, 2), (7, 2)] {
            assert_eq!(make_extension(p, m, 0), make_extension(p, m, 0));
            assert_eq!(make_extension(p, m, 7), make_extension(p, m, 7));
        }
    }

    #[test]
    fn search_start_skips_earlier_candidates() {
        // over F_3 the irreducible quadratics are t^2+1 (index 1), t^2+t+2 (5), t^2+2t+2 (8)
        assert_eq!(make_extension(3, 2, 2).unwrap().modulus, vec![2, 1, 1]);
        assert_eq!(make_extension(3, 2, 6).unwrap().modulus, vec![2, 2, 1]);
    }

    #[test]
    fn oversized_fields_are_rejected() {
        assert_eq!(make_extension(2, 32, 0), Err(FieldError::TooLarge { p: 2, m: 32 }));
        assert!(make_extension(2, 31, 0).is_ok());
    }

    #[test]
    fn explicit_modulus_is_validated() {
        assert!(FieldSpec::with_modulus(2, vec![1, 1, 1]).is_ok());
        assert!(matches!(
            FieldSpec::with_modulus(2, vec![1, 0, 1]),
            Err(FieldError::InvalidModulus(_))
        ));
        assert!(matches!(
            FieldSpec::with_modulus(2, vec![1, 0, 1, 0, 1]),
            Err(FieldError::InvalidModulus(_))
        ));
    }

    #[test]
    fn small_arithmetic_values() {
        let f5 = Field::prime(5).unwrap();
        assert_eq!(f5.inv(FieldElem(2)), Ok(FieldElem(3)));
        assert_eq!(f5.inv(FieldElem::ZERO), Err(FieldError::DivisionByZero));

        let f4 = Field::extension(2, 2).unwrap();
        let alpha = f4.elem(&[0, 1]).unwrap();
        let alpha1 = f4.elem(&[1, 1]).unwrap();
        assert_eq!(f4.mul(alpha, alpha1), FieldElem::ONE);

        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.pow(FieldElem(3), 6), FieldElem::ONE);
        assert_eq!(f7.pow_big(FieldElem(3), &BigInt::from(-1)), Ok(FieldElem(5)));
        assert_eq!(
            f7.pow_big(FieldElem(3), &"123456789012345678901234567890".parse().unwrap()),
            // the exponent is divisible by 6 = ord(3)
            Ok(FieldElem::ONE)
        );
        assert_eq!(
            f7.pow_big(FieldElem::ZERO, &BigInt::from(-2)),
            Err(FieldError::DivisionByZero)
        );
    }

    #[test]
    fn checked_arith_rejects_foreign_elements() {
        let f5 = Field::prime(5).unwrap();
        assert_eq!(
            f5.checked(Arith::Add(FieldElem(1), FieldElem(7))),
            Err(FieldError::SpecMismatch { q: 5 })
        );
        assert_eq!(f5.checked(Arith::Mul(FieldElem(2), FieldElem(4))), Ok(FieldElem(3)));
        assert_eq!(f5.checked(Arith::Inv(FieldElem(0))), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn enumeration_order_and_counts() {
        let f3 = Field::prime(3).unwrap();
        assert_eq!(f3.elements().collect::<Vec<_>>(), vec![FieldElem(0), FieldElem(1), FieldElem(2)]);
        let f4 = Field::extension(2, 2).unwrap();
        let coeffs: Vec<Vec<u64>> = f4.elements().map(|x| f4.coeffs(x)).collect();
        assert_eq!(coeffs, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        let f25 = Field::extension(5, 2).unwrap();
        let all: std::collections::HashSet<_> = f25.elements().map(|x| f25.coeffs(x)).collect();
        assert_eq!(all.len(), 25);
        assert_eq!(f25.elements_from(20).count(), 5);
    }

    #[test]
    fn orders_and_generators() {
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.element_order(FieldElem(3)), Ok(6));
        assert_eq!(f7.element_order(FieldElem::ONE), Ok(1));
        assert_eq!(f7.element_order(FieldElem::ZERO), Err(FieldError::ZeroElement));
        let f5 = Field::prime(5).unwrap();
        assert_eq!(f5.find_generator(), FieldElem(2));
    }

    #[test]
    fn order_matches_brute_force() {
        for f in fields_up_to(64) {
            for x in f.elements().skip(1) {
                let mut y = x;
                let mut d = 1;
                while y != FieldElem::ONE {
                    y = f.mul(y, x);
                    d += 1;
                }
                assert_eq!(f.element_order(x), Ok(d), "{} in {}", f.format(x), f.spec());
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in fields_up_to(64).into_iter().filter(|f| f.q() <= 16) {
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn inverses_and_frobenius() {
        for f in fields_up_to(64) {
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), FieldElem::ZERO);
                assert_eq!(f.pow(a, f.q()), a);
                if !a.is_zero() {
                    let inv = f.inv(a).unwrap();
                    assert_eq!(f.mul(a, inv), FieldElem::ONE);
                    assert_eq!(f.inv_euclid(a).unwrap(), inv);
                }
            }
        }
    }

    #[test]
    fn tables_agree_with_schoolbook() {
        for f in fields_up_to(125).into_iter().filter(|f| f.m() > 1) {
            assert!(f.has_tables());
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul_schoolbook(a, b));
                    assert_eq!(f.add(a, b), f.add_digits(a, b));
                }
            }
        }
    }

    #[test]
    fn untabled_extension_arithmetic() {
        // 2^21 is past the table limit
        let f = Field::extension(2, 21).unwrap();
        assert!(!f.has_tables());
        let g = f.elem(&[0, 1]).unwrap();
        let x = f.pow(g, 12345);
        assert_eq!(f.mul(x, f.inv(x).unwrap()), FieldElem::ONE);
        assert_eq!(f.inv(x).unwrap(), f.inv_euclid(x).unwrap());
        assert_eq!(f.pow(x, f.q()), x);
    }

    #[test]
    fn spec_display() {
        assert_eq!(make_prime_field(5).unwrap().to_string(), "F_5");
        assert_eq!(make_extension(2, 2, 0).unwrap().to_string(), "F_2^2 (modulus t^2 + t + 1)");
    }
}
