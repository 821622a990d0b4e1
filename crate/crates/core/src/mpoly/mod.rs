//! Sparse multivariate polynomials over the integers or a finite field.
//!
//! Terms live in a `BTreeMap` keyed by exponent vector, so two equal
//! polynomials always have identical term maps. Zero coefficients are never
//! stored.

mod parse;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;
use thiserror::Error;

use crate::ff::{FieldElem, FieldRef};

pub use parse::{parse_poly, parse_poly_with};

/// Default cap on intermediate term counts during composition.
pub const DEFAULT_TERM_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("coefficient domains differ")]
    DomainMismatch,
    #[error("expected {expected} variables/arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("composition exceeded the term budget of {budget} (reached {reached})")]
    BudgetExceeded { budget: usize, reached: usize },
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("coefficient is not in the prime subfield")]
    NotPrimeSubfield,
}

/// A ring that polynomial coefficients live in.
pub trait CoeffRing: Clone + PartialEq + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add_elems(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg_elem(&self, a: &Self::Elem) -> Self::Elem;
    fn mul_elems(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;

    fn sub_elems(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add_elems(a, &self.neg_elem(b))
    }

    /// Printed form of a coefficient and whether it should be shown with a
    /// leading minus sign (the string is then the absolute value).
    fn display_coeff(&self, a: &Self::Elem) -> (bool, String);
}

/// The integers, with arbitrary-precision coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Integers;

impl CoeffRing for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add_elems(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn neg_elem(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul_elems(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn sub_elems(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn from_bigint(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn display_coeff(&self, a: &BigInt) -> (bool, String) {
        (a.is_negative(), a.abs().to_string())
    }
}

impl CoeffRing for FieldRef {
    type Elem = FieldElem;

    fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }
    fn one(&self) -> FieldElem {
        FieldElem::ONE
    }
    fn is_zero(&self, a: &FieldElem) -> bool {
        a.is_zero()
    }
    fn add_elems(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.as_ref().add(*a, *b)
    }
    fn neg_elem(&self, a: &FieldElem) -> FieldElem {
        self.as_ref().neg(*a)
    }
    fn mul_elems(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.as_ref().mul(*a, *b)
    }
    fn sub_elems(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.as_ref().sub(*a, *b)
    }
    fn from_bigint(&self, n: &BigInt) -> FieldElem {
        self.as_ref().from_bigint(n)
    }
    fn display_coeff(&self, a: &FieldElem) -> (bool, String) {
        (false, self.format(*a))
    }
}

/// Exponent vector of one monomial, with its total degree cached.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    degree: u64,
    exps: SmallVec<[u32; 4]>,
}

impl Monomial {
    pub fn new(exps: &[u32]) -> Self {
        Monomial {
            degree: exps.iter().map(|&e| e as u64).sum(),
            exps: SmallVec::from_slice(exps),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial {
            degree: 0,
            exps: SmallVec::from_elem(0, nvars),
        }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            degree: self.degree + other.degree,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }
}

// graded lexicographic
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Total degree; the zero polynomial has degree `NegInfinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Degree {
    NegInfinity,
    Finite(u64),
}

impl Degree {
    pub fn finite(self) -> Option<u64> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly<R: CoeffRing> {
    ring: R,
    nvars: usize,
    terms: BTreeMap<Monomial, R::Elem>,
}

pub type IntPoly = MultiPoly<Integers>;
pub type FieldPoly = MultiPoly<FieldRef>;

impl<R: CoeffRing> MultiPoly<R> {
    pub fn zero(ring: R, nvars: usize) -> Self {
        MultiPoly {
            ring,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: R, nvars: usize, c: R::Elem) -> Self {
        let mut out = Self::zero(ring, nvars);
        out.add_term(Monomial::one(nvars), c);
        out
    }

    /// The variable with index `i`.
    pub fn var(ring: R, nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        let exps = Monomial::new(&e);
        let one = ring.one();
        let mut out = Self::zero(ring, nvars);
        out.add_term(exps, one);
        out
    }

    pub fn from_terms(
        ring: R,
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, R::Elem)>,
    ) -> Result<Self, PolyError> {
        let mut out = Self::zero(ring, nvars);
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(PolyError::ArityMismatch {
                    expected: nvars,
                    got: exps.len(),
                });
            }
            out.add_term(Monomial::new(&exps), c);
        }
        Ok(out)
    }

    fn add_term(&mut self, mono: Monomial, c: R::Elem) {
        if self.ring.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(existing) => {
                let sum = self.ring.add_elems(existing, &c);
                if self.ring.is_zero(&sum) {
                    self.terms.remove(&mono);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(mono, c);
            }
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &R::Elem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> R::Elem {
        self.terms
            .get(&Monomial::new(exps))
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    pub fn constant_term(&self) -> R::Elem {
        self.coeff(&vec![0; self.nvars])
    }

    fn compatible(&self, other: &Self) -> Result<(), PolyError> {
        if self.ring != other.ring {
            return Err(PolyError::DomainMismatch);
        }
        if self.nvars != other.nvars {
            return Err(PolyError::ArityMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            ring: self.ring.clone(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), self.ring.neg_elem(c)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.mul_budgeted(other, usize::MAX)
    }

    /// Product that gives up once the running term count passes `budget`.
    pub fn mul_budgeted(&self, other: &Self, budget: usize) -> Result<Self, PolyError> {
        self.compatible(other)?;
        let mut out = Self::zero(self.ring.clone(), self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), self.ring.mul_elems(ca, cb));
            }
            if out.terms.len() > budget {
                return Err(PolyError::BudgetExceeded {
                    budget,
                    reached: out.terms.len(),
                });
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.nvars);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), self.ring.mul_elems(a, c));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.ring.clone(), self.nvars, self.ring.one());
        for _ in 0..k {
            acc = acc.mul(self).expect("same domain");
        }
        acc
    }

    pub fn total_degree(&self) -> Degree {
        self.terms
            .keys()
            .map(Monomial::degree)
            .max()
            .map_or(Degree::NegInfinity, Degree::Finite)
    }

    /// Every term has the same total degree (the zero polynomial counts).
    pub fn is_homogeneous(&self) -> bool {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        match degrees.next() {
            None => true,
            Some(d) => degrees.all(|e| e == d),
        }
    }

    /// Largest exponent of each variable.
    pub fn max_exponents(&self) -> Vec<u32> {
        let mut out = vec![0; self.nvars];
        for m in self.terms.keys() {
            for (o, &e) in out.iter_mut().zip(m.exps()) {
                *o = (*o).max(e);
            }
        }
        out
    }

    /// Variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        let maxes = self.max_exponents();
        (0..self.nvars).filter(|&i| maxes[i] > 0).collect()
    }

    /// Value at `point`, term by term.
    pub fn eval(&self, point: &[R::Elem]) -> Result<R::Elem, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::ArityMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let ring = &self.ring;
        // powers[i][e] = point[i]^e
        let powers: Vec<Vec<R::Elem>> = self
            .max_exponents()
            .iter()
            .zip(point)
            .map(|(&maxe, x)| {
                let mut v = Vec::with_capacity(maxe as usize + 1);
                v.push(ring.one());
                for e in 1..=maxe as usize {
                    let next = ring.mul_elems(&v[e - 1], x);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = ring.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t = ring.mul_elems(&t, &powers[i][e as usize]);
                }
            }
            acc = ring.add_elems(&acc, &t);
        }
        Ok(acc)
    }

    /// The composition `self(g_1, ..., g_n)`, expanded, with at most
    /// `budget` terms in any intermediate product.
    pub fn substitute(&self, g: &[MultiPoly<R>], budget: usize) -> Result<Self, PolyError> {
        if g.len() != self.nvars {
            return Err(PolyError::ArityMismatch {
                expected: self.nvars,
                got: g.len(),
            });
        }
        let Some(first) = g.first() else {
            // zero-variable polynomial is a constant
            return Ok(self.clone());
        };
        let target_vars = first.nvars;
        for gi in g {
            if gi.ring != self.ring {
                return Err(PolyError::DomainMismatch);
            }
            if gi.nvars != target_vars {
                return Err(PolyError::ArityMismatch {
                    expected: target_vars,
                    got: gi.nvars,
                });
            }
        }
        let check = |p: &Self| {
            if p.num_terms() > budget {
                Err(PolyError::BudgetExceeded {
                    budget,
                    reached: p.num_terms(),
                })
            } else {
                Ok(())
            }
        };
        let one = Self::constant(self.ring.clone(), target_vars, self.ring.one());
        let mut powers: Vec<Vec<Self>> = Vec::with_capacity(g.len());
        for (gi, maxe) in g.iter().zip(self.max_exponents()) {
            let mut v = vec![one.clone()];
            for e in 1..=maxe as usize {
                let next = v[e - 1].mul_budgeted(gi, budget)?;
                check(&next)?;
                v.push(next);
            }
            powers.push(v);
        }
        let mut out = Self::zero(self.ring.clone(), target_vars);
        for (m, c) in &self.terms {
            let mut t = Self::constant(self.ring.clone(), target_vars, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t = t.mul_budgeted(&powers[i][e as usize], budget)?;
                    check(&t)?;
                }
            }
            out = out.add(&t)?;
            check(&out)?;
        }
        Ok(out)
    }

    pub fn display_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let (negative, abs) = self.ring.display_coeff(c);
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let factors: Vec<String> = m
                .exps()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(v, &e)| {
                    let name = names.get(v).map_or_else(|| format!("x{v}"), |s| s.to_string());
                    if e == 1 {
                        name
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            if factors.is_empty() {
                out.push_str(&abs);
            } else {
                if abs != "1" {
                    out.push_str(&abs);
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }
}

/// Default variable names: x, y, z for up to three variables, else x0, x1, ...
pub fn default_var_names(nvars: usize) -> Vec<String> {
    if nvars == 1 {
        vec!["t".into()]
    } else if nvars <= 3 {
        ["x", "y", "z"][..nvars].iter().map(|s| s.to_string()).collect()
    } else {
        (0..nvars).map(|i| format!("x{i}")).collect()
    }
}

impl<R: CoeffRing> fmt::Display for MultiPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_var_names(self.nvars);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.display_with(&refs))
    }
}

impl IntPoly {
    /// Reduction into the prime subfield of `field`; vanishing terms are dropped.
    pub fn reduce(&self, field: &FieldRef) -> FieldPoly {
        let ring = field.clone();
        let mut out = MultiPoly::zero(ring.clone(), self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), ring.from_bigint(c));
        }
        out
    }

    /// Evaluation over a field after reducing coefficients.
    pub fn eval_in(&self, field: &FieldRef, point: &[FieldElem]) -> Result<FieldElem, PolyError> {
        self.reduce(field).eval(point)
    }
}

impl FieldPoly {
    /// Re-read a polynomial whose coefficients lie in the prime subfield as a
    /// polynomial over another field of the same characteristic.
    pub fn lift_to(&self, target: &FieldRef) -> Result<FieldPoly, PolyError> {
        if self.ring.p() != target.p() {
            return Err(PolyError::DomainMismatch);
        }
        let mut out = MultiPoly::zero(target.clone(), self.nvars);
        for (m, c) in &self.terms {
            if !self.ring.is_prime_subfield(*c) {
                return Err(PolyError::NotPrimeSubfield);
            }
            out.add_term(m.clone(), target.from_i64(c.index() as i64));
        }
        Ok(out)
    }

    /// Parse text and reduce it into `field`.
    pub fn parse_in(field: &FieldRef, text: &str, vars: &[&str]) -> Result<FieldPoly, PolyError> {
        Ok(parse_poly(text, vars)?.reduce(field))
    }
}
