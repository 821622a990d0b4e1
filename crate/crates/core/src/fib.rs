//! Fibonacci-type recursions `a₀ = a₁`, `a_{k+2} = a_{k+1} ∘ a_k` in finite
//! cyclic groups, and the pair map `H(a, b) = (b, a ∘ b)` that drives them.
//!
//! Two groups are supported: `Z/n` under addition and `K*` for a finite field
//! `K`. Group elements are plain `u64`s: residues for `Z/n`, field element
//! indices for `K*`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ff::{FieldElem, FieldRef, FieldSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FibError {
    #[error("{element} is not an element of {group}")]
    NotInGroup { element: u64, group: String },
    #[error("no identity within {budget} terms in {group}; the recursion must hit it, so this is a bug")]
    BudgetExhausted { budget: u64, group: String },
    #[error("precondition q-1 > F_{k} fails: q-1 = {order}, F_{k} = {fib_k}")]
    PreconditionUnmet { order: u64, k: u64, fib_k: String },
    #[error("group of order {0} is too large for an exhaustive check")]
    TooLarge(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum FibGroup {
    AdditiveCyclic { n: u64 },
    Multiplicative(FieldRef),
}

/// Serializable description of a [`FibGroup`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupDesc {
    AdditiveCyclic { n: u64 },
    Multiplicative { spec: FieldSpec },
}

impl FibGroup {
    pub fn additive(n: u64) -> Self {
        assert!(n >= 1, "Z/0 is not finite");
        FibGroup::AdditiveCyclic { n }
    }

    pub fn order(&self) -> u64 {
        match self {
            FibGroup::AdditiveCyclic { n } => *n,
            FibGroup::Multiplicative(f) => f.q() - 1,
        }
    }

    pub fn identity(&self) -> u64 {
        match self {
            FibGroup::AdditiveCyclic { .. } => 0,
            FibGroup::Multiplicative(_) => FieldElem::ONE.index(),
        }
    }

    pub fn contains(&self, a: u64) -> bool {
        match self {
            FibGroup::AdditiveCyclic { n } => a < *n,
            FibGroup::Multiplicative(f) => a != 0 && a < f.q(),
        }
    }

    pub fn op(&self, a: u64, b: u64) -> u64 {
        match self {
            FibGroup::AdditiveCyclic { n } => ((a as u128 + b as u128) % *n as u128) as u64,
            FibGroup::Multiplicative(f) => f.mul(f.element(a), f.element(b)).index(),
        }
    }

    pub fn inverse(&self, a: u64) -> u64 {
        match self {
            FibGroup::AdditiveCyclic { n } => (n - a) % n,
            FibGroup::Multiplicative(f) => f.inv(f.element(a)).expect("nonzero").index(),
        }
    }

    /// The elements in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        let (lo, hi) = match self {
            FibGroup::AdditiveCyclic { n } => (0, *n),
            FibGroup::Multiplicative(f) => (1, f.q()),
        };
        lo..hi
    }

    pub fn desc(&self) -> GroupDesc {
        match self {
            FibGroup::AdditiveCyclic { n } => GroupDesc::AdditiveCyclic { n: *n },
            FibGroup::Multiplicative(f) => GroupDesc::Multiplicative { spec: f.spec().clone() },
        }
    }

    pub fn name(&self) -> String {
        match self {
            FibGroup::AdditiveCyclic { n } => format!("Z/{n}"),
            FibGroup::Multiplicative(f) => format!("{}*", f.spec()),
        }
    }

    fn check(&self, a: u64) -> Result<(), FibError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(FibError::NotInGroup {
                element: a,
                group: self.name(),
            })
        }
    }

    /// `H(a, b) = (b, a ∘ b)`.
    pub fn pair_step(&self, (a, b): (u64, u64)) -> (u64, u64) {
        (b, self.op(a, b))
    }

    /// `H⁻¹(a, b) = (b ∘ a⁻¹, a)`.
    pub fn pair_step_back(&self, (a, b): (u64, u64)) -> (u64, u64) {
        (self.op(b, self.inverse(a)), a)
    }

    /// Default term budget: `6|A|` bounds the period of the pair map on any
    /// cyclic group.
    pub fn default_budget(&self) -> u64 {
        6 * self.order()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibTrace {
    pub group: GroupDesc,
    pub seed: u64,
    /// Least `m` with `a_m` the identity.
    pub hit_index: u64,
    /// `a₀ … a_m`.
    pub prefix: Vec<u64>,
}

/// Run the recursion from `(a0, a0)` until it reaches the identity.
pub fn fib_hit_time(group: &FibGroup, a0: u64, budget: u64) -> Result<FibTrace, FibError> {
    group.check(a0)?;
    let e = group.identity();
    let mut prefix = vec![a0];
    let (mut cur, mut next) = (a0, a0);
    let mut k = 0u64;
    while cur != e {
        if k >= budget {
            return Err(FibError::BudgetExhausted {
                budget,
                group: group.name(),
            });
        }
        (cur, next) = group.pair_step((cur, next));
        k += 1;
        prefix.push(cur);
    }
    Ok(FibTrace {
        group: group.desc(),
        seed: a0,
        hit_index: k,
        prefix,
    })
}

/// Length of the cycle of `H` through `state`.
pub fn pair_map_cycle(group: &FibGroup, state: (u64, u64)) -> Result<u64, FibError> {
    group.check(state.0)?;
    group.check(state.1)?;
    let limit = group.order().saturating_mul(group.order());
    let mut cur = group.pair_step(state);
    let mut len = 1u64;
    while cur != state {
        if len > limit {
            return Err(FibError::BudgetExhausted {
                budget: limit,
                group: group.name(),
            });
        }
        cur = group.pair_step(cur);
        len += 1;
    }
    Ok(len)
}

/// `H⁻¹ ∘ H` and `H ∘ H⁻¹` are the identity on all of `A²`.
pub fn pair_map_is_bijection(group: &FibGroup) -> Result<bool, FibError> {
    let n = group.order();
    if n > 4096 {
        return Err(FibError::TooLarge(n));
    }
    for a in group.elements() {
        for b in group.elements() {
            let s = (a, b);
            if group.pair_step_back(group.pair_step(s)) != s || group.pair_step(group.pair_step_back(s)) != s {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma5Report {
    pub group: GroupDesc,
    pub seed: u64,
    /// Cycle length `L` of `H` through `(e, a0)`.
    pub cycle_len: u64,
    pub hit_index: u64,
    /// `H^{L-1}(a0, a0) = (e, a0)`.
    pub returns_to_start: bool,
    /// `a_{L-1} = e`.
    pub identity_at_l_minus_1: bool,
    pub hit_within_cycle: bool,
    pub bijective: bool,
    pub verified: bool,
}

pub fn verify_lemma5(group: &FibGroup, a0: u64) -> Result<Lemma5Report, FibError> {
    group.check(a0)?;
    let e = group.identity();
    let cycle_len = pair_map_cycle(group, (e, a0))?;
    let mut state = (a0, a0);
    for _ in 0..cycle_len - 1 {
        state = group.pair_step(state);
    }
    let returns_to_start = state == (e, a0);
    let identity_at_l_minus_1 = state.0 == e;
    let hit_index = fib_hit_time(group, a0, group.default_budget())?.hit_index;
    let hit_within_cycle = hit_index < cycle_len;
    let bijective = pair_map_is_bijection(group)?;
    Ok(Lemma5Report {
        group: group.desc(),
        seed: a0,
        cycle_len,
        hit_index,
        returns_to_start,
        identity_at_l_minus_1,
        hit_within_cycle,
        bijective,
        verified: returns_to_start && identity_at_l_minus_1 && hit_within_cycle && bijective,
    })
}

/// Classical Fibonacci numbers, `F_0 = 0`, `F_1 = F_2 = 1`.
pub fn fibonacci(n: u64) -> BigUint {
    let (mut a, mut b) = (BigUint::zero(), BigUint::one());
    for _ in 0..n {
        let c = &a + &b;
        a = std::mem::replace(&mut b, c);
    }
    a
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentIdentityReport {
    pub spec: FieldSpec,
    pub seed: Vec<u64>,
    pub k_max: u64,
    /// `a_0 … a_{k_max}` as coefficient arrays.
    pub sequence: Vec<Vec<u64>>,
    /// Indices `i` where `a_i ≠ u0^{F_{i+1}}`.
    pub mismatches: Vec<u64>,
}

impl ExponentIdentityReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compare the multiplicative recursion against `a_i = u0^{F_{i+1}}`.
pub fn exponent_identity_check(field: &FieldRef, u0: FieldElem, k_max: u64) -> Result<ExponentIdentityReport, FibError> {
    let group = FibGroup::Multiplicative(field.clone());
    group.check(u0.index())?;
    let mut sequence = Vec::new();
    let mut mismatches = Vec::new();
    let mut state = (u0.index(), u0.index());
    let (mut f_prev, mut f_cur) = (BigUint::zero(), BigUint::one());
    for i in 0..=k_max {
        let predicted = field
            .pow_big(u0, &BigInt::from(f_cur.clone()))
            .expect("u0 is a unit");
        if predicted.index() != state.0 {
            mismatches.push(i);
        }
        sequence.push(field.coeffs(field.element(state.0)));
        state = group.pair_step(state);
        let next = &f_prev + &f_cur;
        f_prev = std::mem::replace(&mut f_cur, next);
    }
    Ok(ExponentIdentityReport {
        spec: field.spec().clone(),
        seed: field.coeffs(u0),
        k_max,
        sequence,
        mismatches,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorBoundReport {
    pub spec: FieldSpec,
    pub k: u64,
    pub fib_k: String,
    pub generator: Vec<u64>,
    /// First `i ≤ k` with `a_i = 1`, if any.
    pub first_identity: Option<u64>,
}

impl GeneratorBoundReport {
    pub fn holds(&self) -> bool {
        self.first_identity.is_none()
    }
}

/// For `q - 1 > F_k` and `u0` the field's canonical generator, check that
/// `a_i ≠ 1` for every `i ≤ k`.
pub fn generator_bound_check(field: &FieldRef, k: u64) -> Result<GeneratorBoundReport, FibError> {
    let order = field.q() - 1;
    let fib_k = fibonacci(k);
    if BigUint::from(order) <= fib_k {
        return Err(FibError::PreconditionUnmet {
            order,
            k,
            fib_k: fib_k.to_string(),
        });
    }
    let g = field.find_generator();
    let group = FibGroup::Multiplicative(field.clone());
    let mut state = (g.index(), g.index());
    let mut first_identity = None;
    for i in 0..=k {
        if state.0 == group.identity() {
            first_identity = Some(i);
            break;
        }
        state = group.pair_step(state);
    }
    Ok(GeneratorBoundReport {
        spec: field.spec().clone(),
        k,
        fib_k: fib_k.to_string(),
        generator: field.coeffs(g),
        first_identity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;

    #[test]
    fn additive_hit_time_mod_5() {
        let g = FibGroup::additive(5);
        let t = fib_hit_time(&g, 1, g.default_budget()).unwrap();
        assert_eq!(t.hit_index, 4);
        assert_eq!(t.prefix, vec![1, 1, 2, 3, 0]);
        assert_eq!(fib_hit_time(&g, 0, 1).unwrap().hit_index, 0);
        assert!(matches!(fib_hit_time(&g, 5, 30), Err(FibError::NotInGroup { .. })));
        assert!(matches!(fib_hit_time(&g, 1, 2), Err(FibError::BudgetExhausted { .. })));
    }

    #[test]
    fn multiplicative_hit_time_in_f5() {
        let f5 = Field::prime(5).unwrap();
        let g = FibGroup::Multiplicative(f5.clone());
        assert_eq!(fib_hit_time(&g, 2, g.default_budget()).unwrap().hit_index, 5);
        assert_eq!(fib_hit_time(&g, 1, 1).unwrap().hit_index, 0);
        assert!(fib_hit_time(&g, 0, 10).is_err());
    }

    #[test]
    fn pair_map_cycles() {
        assert_eq!(pair_map_cycle(&FibGroup::additive(5), (0, 1)).unwrap(), 20);
        assert_eq!(pair_map_cycle(&FibGroup::additive(5), (0, 0)).unwrap(), 1);
        assert_eq!(pair_map_cycle(&FibGroup::additive(2), (0, 1)).unwrap(), 3);
    }

    #[test]
    fn lemma5_mod_5() {
        let r = verify_lemma5(&FibGroup::additive(5), 1).unwrap();
        assert_eq!((r.cycle_len, r.hit_index), (20, 4));
        assert!(r.verified);
        assert_eq!(fibonacci(20), BigUint::from(6765u32));
        let trivial = verify_lemma5(&FibGroup::additive(5), 0).unwrap();
        assert_eq!(trivial.cycle_len, 1);
        assert!(trivial.verified);
    }

    #[test]
    fn additive_hit_matches_fibonacci_residues() {
        for n in 1..=50u64 {
            let first_zero = (1..).find(|&i| (fibonacci(i) % n).is_zero()).unwrap();
            let g = FibGroup::additive(n);
            assert_eq!(fib_hit_time(&g, 1 % n, g.default_budget()).unwrap().hit_index, first_zero - 1, "n = {n}");
        }
    }

    #[test]
    fn multiplicative_hit_is_first_fibonacci_multiple_of_the_order() {
        for (p, m) in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (3, 2), (2, 3), (5, 2), (2, 4), (3, 3), (7, 2), (2, 5), (2, 6)] {
            let field = Field::extension(p, m).unwrap();
            let g = FibGroup::Multiplicative(field.clone());
            for u in field.elements().skip(1) {
                let ord = field.element_order(u).unwrap();
                let expect = (0..).find(|&k| (fibonacci(k + 1) % ord).is_zero()).unwrap();
                let t = fib_hit_time(&g, u.index(), g.default_budget()).unwrap();
                assert_eq!(t.hit_index, expect);
                let r = exponent_identity_check(&field, u, t.hit_index + 3).unwrap();
                assert!(r.holds());
            }
        }
    }

    #[test]
    fn exponent_identity_in_f7() {
        let f7 = Field::prime(7).unwrap();
        let r = exponent_identity_check(&f7, f7.from_i64(3), 4).unwrap();
        assert_eq!(r.sequence, vec![vec![3], vec![3], vec![2], vec![6], vec![5]]);
        assert!(r.holds());
        let ones = exponent_identity_check(&f7, FieldElem::ONE, 6).unwrap();
        assert!(ones.sequence.iter().all(|c| c == &vec![1]));
    }

    #[test]
    fn generator_bound_in_f7() {
        let f7 = Field::prime(7).unwrap();
        let r = generator_bound_check(&f7, 4).unwrap();
        assert_eq!(r.generator, vec![3]);
        assert!(r.holds());
        assert!(matches!(generator_bound_check(&f7, 6), Err(FibError::PreconditionUnmet { .. })));
    }

    /// The bound as stated (F_k < q−1) fails when q−1 is itself F_{k+1}; with
    /// F_{k+1} < q−1 it holds everywhere.
    #[test]
    fn generator_bound_needs_the_next_fibonacci_number() {
        for (p, m, k) in [(3, 1, 2), (2, 2, 3), (3, 2, 5)] {
            let field = Field::extension(p, m).unwrap();
            let r = generator_bound_check(&field, k).unwrap();
            assert_eq!(r.first_identity, Some(k), "q = {}", field.q());
        }
        for q in 3..=64u64 {
            let Some((p, m)) = crate::ff::prime_power(q) else { continue };
            let field = Field::extension(p, m).unwrap();
            for k in (1..).take_while(|&k| fibonacci(k + 1) < BigUint::from(q - 1)) {
                assert!(generator_bound_check(&field, k).unwrap().holds(), "q = {q}, k = {k}");
            }
        }
    }

    #[test]
    fn pair_map_is_a_bijection_on_small_groups() {
        for n in 1..=50 {
            assert!(pair_map_is_bijection(&FibGroup::additive(n)).unwrap());
        }
        let f9 = Field::extension(3, 2).unwrap();
        assert!(pair_map_is_bijection(&FibGroup::Multiplicative(f9)).unwrap());
    }
}
