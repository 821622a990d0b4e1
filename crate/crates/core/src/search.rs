//! Search over small two-variable maps for a geometrically nilpotent but
//! non-nilpotent curve.
//!
//! The space is every pair `(T, Y)` with `T = (f, g)` fixing the origin
//! (no constant terms, total degree ≤ `D`) and `Y = {h = 0}` a non-zero curve
//! through the origin (degree ≤ `d`), over a prime field `F_q`. Each pair is
//! screened over `F_{q^m}`, `m ≤ m_max`:
//!
//! 1. any orbit from a point of `Y` that cycles off the origin rejects the
//!    pair, conclusively;
//! 2. otherwise a symbolic check looks for an iterate `T^k` that kills `Y`
//!    outright (as a map, or along a graph parametrization of `Y`); failing
//!    that, pairs whose max depth never grows with `m` are set aside as
//!    uniform on a plateau, and the rest survive for human inspection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use num_bigint::BigInt;

use crate::dynmap::{DynError, FieldMap, IntMap};
use crate::ff::{is_prime, Field, FieldError, FieldRef};
use crate::mpoly::{FieldPoly, IntPoly, Integers, MultiPoly, PolyError};
use crate::orbits::{depth_profile, OrbitError, DEFAULT_ORBIT_BUDGET};

/// Term cap for the symbolic iterate check. Iterates of a degree-`D` map
/// have degree `D^k`, so this cuts the check off after a few steps; the
/// pair then falls through to the depth-growth test.
pub const SEARCH_TERM_BUDGET: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("search base q = {0} must be prime")]
    NotPrime(u64),
    #[error("{0}")]
    Invalid(String),
    #[error("enumeration of {0} pairs does not fit in u64")]
    TooLarge(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    /// `samples` pair indices drawn uniformly (with replacement) from a
    /// ChaCha8 stream seeded with `seed`.
    Random { samples: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shard {
    pub index: u64,
    pub count: u64,
}

impl Shard {
    pub const WHOLE: Shard = Shard { index: 0, count: 1 };

    /// Contiguous slice `[lo, hi)` of `0..total` owned by this shard.
    pub fn range(&self, total: u64) -> std::ops::Range<u64> {
        let cut = |i: u64| ((total as u128 * i as u128) / self.count as u128) as u64;
        cut(self.index)..cut(self.index + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub q: u64,
    pub map_degree: u32,
    pub variety_degree: u32,
    pub m_max: u32,
    pub orbit_budget: u64,
    pub term_budget: usize,
    pub shard: Shard,
    pub seed: u64,
    pub mode: SearchMode,
    /// Keep every classified pair, not just the survivors.
    pub keep_all: bool,
}

impl SearchSpace {
    pub fn new(q: u64, map_degree: u32, variety_degree: u32, m_max: u32) -> Self {
        SearchSpace {
            q,
            map_degree,
            variety_degree,
            m_max,
            orbit_budget: DEFAULT_ORBIT_BUDGET,
            term_budget: SEARCH_TERM_BUDGET,
            shard: Shard::WHOLE,
            seed: 0,
            mode: SearchMode::Exhaustive,
            keep_all: false,
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if !is_prime(self.q) {
            return Err(SearchError::NotPrime(self.q));
        }
        if self.variety_degree == 0 {
            return Err(SearchError::Invalid("variety degree cap must be positive".into()));
        }
        if self.m_max == 0 || self.orbit_budget == 0 || self.term_budget == 0 {
            return Err(SearchError::Invalid("m_max and budgets must be positive".into()));
        }
        if self.shard.count == 0 || self.shard.index >= self.shard.count {
            return Err(SearchError::Invalid(format!(
                "shard {} of {} does not exist",
                self.shard.index, self.shard.count
            )));
        }
        Ok(())
    }

    fn map_monomials(&self) -> Vec<[u32; 2]> {
        monomials(self.map_degree)
    }

    fn variety_monomials(&self) -> Vec<[u32; 2]> {
        monomials(self.variety_degree)
    }

    /// Number of origin-fixing maps.
    pub fn map_count(&self) -> Result<u64, SearchError> {
        checked_pow(self.q, 2 * self.map_monomials().len())
    }

    /// Number of non-zero curves through the origin.
    pub fn variety_count(&self) -> Result<u64, SearchError> {
        Ok(checked_pow(self.q, self.variety_monomials().len())? - 1)
    }

    /// Size of the full enumeration.
    pub fn total(&self) -> Result<u64, SearchError> {
        let (a, b) = (self.map_count()?, self.variety_count()?);
        a.checked_mul(b)
            .ok_or_else(|| SearchError::TooLarge(format!("{a}*{b}")))
    }

    /// The pair at enumeration index `i`: maps vary slowest, and within each
    /// coefficient sequence the first monomial is the most significant digit.
    pub fn pair(&self, i: u64) -> (IntMap, IntPoly) {
        let nv = self.variety_count().expect("validated space");
        let (map_idx, var_idx) = (i / nv, i % nv + 1);
        let mm = self.map_monomials();
        let digits = to_digits(map_idx, self.q, 2 * mm.len());
        let f = poly_from(&mm, &digits[..mm.len()]);
        let g = poly_from(&mm, &digits[mm.len()..]);
        let vm = self.variety_monomials();
        let h = poly_from(&vm, &to_digits(var_idx, self.q, vm.len()));
        (IntMap::new(vec![f, g]).expect("two coordinates in two variables"), h)
    }

    /// Indices this shard screens, in order.
    pub fn indices(&self) -> Result<Vec<u64>, SearchError> {
        let total = self.total()?;
        Ok(match self.mode {
            SearchMode::Exhaustive => self.shard.range(total).collect(),
            SearchMode::Random { samples } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let all: Vec<u64> = (0..samples).map(|_| rng.gen_range(0..total.max(1))).collect();
                let r = self.shard.range(samples);
                all[r.start as usize..r.end as usize].to_vec()
            }
        })
    }
}

fn checked_pow(q: u64, e: usize) -> Result<u64, SearchError> {
    (0..e)
        .try_fold(1u64, |acc, _| acc.checked_mul(q))
        .ok_or_else(|| SearchError::TooLarge(format!("{q}^{e}")))
}

/// Monomials `x^i y^j` with `1 ≤ i + j ≤ deg`, by degree then `x`-exponent descending.
fn monomials(deg: u32) -> Vec<[u32; 2]> {
    let mut out = Vec::new();
    for d in 1..=deg {
        for i in (0..=d).rev() {
            out.push([i, d - i]);
        }
    }
    out
}

fn to_digits(mut n: u64, q: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = n % q;
        n /= q;
    }
    out
}

fn poly_from(monos: &[[u32; 2]], coeffs: &[u64]) -> IntPoly {
    MultiPoly::from_terms(
        Integers,
        2,
        monos
            .iter()
            .zip(coeffs)
            .map(|(m, &c)| (m.to_vec(), BigInt::from(c))),
    )
    .expect("two variables")
}

/// Max depth and point count of one screened field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelStats {
    pub m: u32,
    pub points: u64,
    pub max_depth: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    /// A point of `Y(F_{q^m})` lies on a cycle avoiding the origin.
    RejectedCycle {
        m: u32,
        start: Vec<Vec<u64>>,
        on_cycle: Vec<Vec<u64>>,
        cycle_len: u64,
    },
    /// A single iterate contracts `Y`: `how` is `symbolic` (the map `T^k` is
    /// zero), `parametrized` (`T^k` vanishes along a graph parametrization of
    /// `Y`), or `plateau` (heuristic: max depth never grew with `m`).
    RejectedUniform { k: u64, how: String },
    /// Some orbit exhausted its budget.
    Inconclusive { m: u32 },
    Surviving { depth_growth: Vec<Option<u64>> },
}

impl Classification {
    fn bucket(&self) -> usize {
        match self {
            Classification::RejectedCycle { .. } => 0,
            Classification::RejectedUniform { .. } => 1,
            Classification::Inconclusive { .. } => 2,
            Classification::Surviving { .. } => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub index: u64,
    pub map: [String; 2],
    pub variety: String,
    pub levels: Vec<LevelStats>,
    pub classification: Classification,
}

/// Classify one pair by the two-phase screen described in the module docs.
pub fn screen(index: u64, map: &IntMap, variety: &IntPoly, space: &SearchSpace) -> Result<Candidate, SearchError> {
    let names = ["x", "y"];
    let mut cand = Candidate {
        index,
        map: [
            map.coords()[0].display_with(&names),
            map.coords()[1].display_with(&names),
        ],
        variety: variety.display_with(&names),
        levels: Vec::new(),
        classification: Classification::Inconclusive { m: 0 },
    };
    let y = crate::dynmap::IntVariety::new(vec![variety.clone()]).expect("one equation");
    let mut exhausted = None;
    for m in 1..=space.m_max {
        let field = Field::extension(space.q, m)?;
        let t = map.reduce(&field).compile();
        let yv = y.reduce(&field).compile();
        let table = depth_profile(&t, &yv, &crate::dynmap::Point::zeros(2), space.orbit_budget)?;
        cand.levels.push(LevelStats {
            m,
            points: table.point_count,
            max_depth: table.max_depth,
        });
        if let Some(cw) = table.cycle_witness() {
            cand.classification = Classification::RejectedCycle {
                m,
                start: cw.start.coords.clone(),
                on_cycle: cw.on_cycle.coords.clone(),
                cycle_len: cw.cycle_len,
            };
            return Ok(cand);
        }
        if table.budget_exhausted_count > 0 && exhausted.is_none() {
            exhausted = Some(m);
        }
    }
    if let Some(m) = exhausted {
        cand.classification = Classification::Inconclusive { m };
        return Ok(cand);
    }

    let bound = cand.levels.iter().filter_map(|l| l.max_depth).max().unwrap_or(0).max(1);
    let base = Field::prime(space.q)?;
    let t = map.reduce(&base);
    if let Some((k, how)) = uniform_iterate(&t, &variety.reduce(&base), bound, space.term_budget) {
        cand.classification = Classification::RejectedUniform { k, how: how.into() };
        return Ok(cand);
    }
    let depths: Vec<Option<u64>> = cand.levels.iter().map(|l| l.max_depth).collect();
    cand.classification = if depths.windows(2).any(|w| w[1] > w[0]) {
        Classification::Surviving { depth_growth: depths }
    } else {
        Classification::RejectedUniform {
            k: bound,
            how: "plateau".into(),
        }
    };
    Ok(cand)
}

/// Least `k ≤ bound` with `T^k` zero, or zero along `Y` when `Y` is a graph.
fn uniform_iterate(t: &FieldMap, h: &FieldPoly, bound: u64, budget: usize) -> Option<(u64, &'static str)> {
    let param = graph_parametrization(h);
    let mut acc = t.clone();
    for k in 1..=bound {
        if acc.is_zero_map() {
            return Some((k, "symbolic"));
        }
        if let Some(param) = &param {
            let along: Result<Vec<FieldPoly>, PolyError> =
                acc.coords().iter().map(|c| c.substitute(param, budget)).collect();
            match along {
                Ok(v) if v.iter().all(MultiPoly::is_zero) => return Some((k, "parametrized")),
                Ok(_) => {}
                Err(_) => return None,
            }
        }
        if k < bound {
            acc = match t.compose(&acc, budget) {
                Ok(next) => next,
                Err(DynError::Poly(PolyError::BudgetExceeded { .. })) => return None,
                Err(_) => return None,
            };
        }
    }
    None
}

/// `h = c·y − g(x)` or `h = c·x − g(y)` with `c` a non-zero constant gives
/// `t ↦ (t, g(t)/c)` or `t ↦ (g(t)/c, t)`.
fn graph_parametrization(h: &FieldPoly) -> Option<Vec<FieldPoly>> {
    let field: &FieldRef = h.ring();
    for solved in [1usize, 0] {
        let other = 1 - solved;
        let mut lin = None;
        let mut ok = true;
        for (mono, c) in h.terms() {
            let e = mono.exps();
            if e[solved] == 0 {
                continue;
            }
            if e[solved] == 1 && e[other] == 0 && lin.is_none() {
                lin = Some(*c);
            } else {
                ok = false;
            }
        }
        let (true, Some(c)) = (ok, lin) else { continue };
        let t = MultiPoly::var(field.clone(), 1, 0);
        let rest = h.sub(&MultiPoly::var(field.clone(), 2, solved).scale(&c)).ok()?;
        let scale = field.neg(field.inv(c).ok()?);
        let g = rest.scale(&scale).substitute(&[t.clone(), t.clone()], usize::MAX).ok()?;
        let mut param = vec![t.clone(), t];
        param[solved] = g;
        return Some(param);
    }
    None
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub total: u64,
    pub rejected_cycle: u64,
    pub rejected_uniform: u64,
    pub inconclusive: u64,
    pub surviving: u64,
}

impl SearchSummary {
    pub fn classified(&self) -> u64 {
        self.rejected_cycle + self.rejected_uniform + self.inconclusive + self.surviving
    }

    pub fn merge(self, o: SearchSummary) -> SearchSummary {
        SearchSummary {
            total: self.total + o.total,
            rejected_cycle: self.rejected_cycle + o.rejected_cycle,
            rejected_uniform: self.rejected_uniform + o.rejected_uniform,
            inconclusive: self.inconclusive + o.inconclusive,
            surviving: self.surviving + o.surviving,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub summary: SearchSummary,
    /// Surviving pairs, or every pair when `keep_all` is set, in index order.
    pub candidates: Vec<Candidate>,
}

impl SearchResult {
    /// Combine shard results; candidate order is restored by index.
    pub fn merge(mut self, other: SearchResult) -> SearchResult {
        self.summary = self.summary.merge(other.summary);
        self.candidates.extend(other.candidates);
        self.candidates.sort_by_key(|c| c.index);
        self
    }

    pub fn json_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.candidates {
            out.push_str(&serde_json::to_string(c).expect("candidates serialize"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&serde_json::json!({"summary": self.summary})).expect("summary"));
        out.push('\n');
        out
    }
}

/// Screen every pair this shard owns, in parallel; output is in index order.
pub fn run_search(space: &SearchSpace) -> Result<SearchResult, SearchError> {
    space.validate()?;
    let indices = space.indices()?;
    let screened: Vec<Candidate> = indices
        .par_iter()
        .map(|&i| {
            let (map, h) = space.pair(i);
            screen(i, &map, &h, space)
        })
        .collect::<Result<_, _>>()?;
    let mut summary = SearchSummary {
        total: screened.len() as u64,
        ..Default::default()
    };
    let mut candidates = Vec::new();
    for c in screened {
        match c.classification.bucket() {
            0 => summary.rejected_cycle += 1,
            1 => summary.rejected_uniform += 1,
            2 => summary.inconclusive += 1,
            _ => summary.surviving += 1,
        }
        if space.keep_all || matches!(c.classification, Classification::Surviving { .. }) {
            candidates.push(c);
        }
    }
    Ok(SearchResult { summary, candidates })
}

/// The `(T, Y)` pairs of the space as integer polynomials, in index order.
pub fn enumerate_space(space: &SearchSpace) -> Result<impl Iterator<Item = (u64, IntMap, IntPoly)> + '_, SearchError> {
    space.validate()?;
    Ok(space.indices()?.into_iter().map(|i| {
        let (m, h) = space.pair(i);
        (i, m, h)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::parse_poly;

    fn pair(coords: [&str; 2], y: &str) -> (IntMap, IntPoly) {
        let vars = ["x", "y"];
        (IntMap::parse(&coords, &vars).unwrap(), parse_poly(y, &vars).unwrap())
    }

    #[test]
    fn counting_contract_for_linear_maps() {
        let s = SearchSpace::new(2, 1, 1, 1);
        assert_eq!(s.map_count().unwrap(), 16);
        assert_eq!(s.variety_count().unwrap(), 3);
        let all: Vec<_> = enumerate_space(&s).unwrap().collect();
        assert_eq!(all.len(), 48);
        let mut seen: Vec<String> = all.iter().map(|(_, m, h)| format!("{m} | {h}")).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 48);
        for (_, m, h) in &all {
            assert!(m.coords().iter().all(|c| c.constant_term() == BigInt::from(0)));
            assert!(!h.is_zero() && h.constant_term() == BigInt::from(0));
        }
    }

    #[test]
    fn degree_zero_admits_only_the_zero_map() {
        let s = SearchSpace::new(3, 0, 1, 1);
        assert_eq!(s.map_count().unwrap(), 1);
        assert!(enumerate_space(&s).unwrap().all(|(_, m, _)| m.is_zero_map()));
    }

    #[test]
    fn shards_partition_the_enumeration() {
        let s = SearchSpace::new(2, 2, 1, 1);
        let total = s.total().unwrap();
        let mut covered = Vec::new();
        for index in 0..7 {
            covered.extend(Shard { index, count: 7 }.range(total));
        }
        assert_eq!(covered, (0..total).collect::<Vec<_>>());
    }

    #[test]
    fn screening_examples() {
        let s = SearchSpace::new(2, 2, 1, 3);
        let (t, y) = pair(["y", "0"], "x");
        let c = screen(0, &t, &y, &s).unwrap();
        assert_eq!(c.classification, Classification::RejectedUniform { k: 2, how: "symbolic".into() });

        let (t, y) = pair(["x^2", "y^2"], "x");
        match screen(0, &t, &y, &s).unwrap().classification {
            Classification::RejectedCycle { on_cycle, cycle_len, .. } => {
                assert_eq!(on_cycle, vec![vec![0], vec![1]]);
                assert_eq!(cycle_len, 1);
            }
            other => panic!("{other:?}"),
        }

        let (t, y) = pair(["0", "0"], "x + y");
        assert_eq!(
            screen(0, &t, &y, &s).unwrap().classification,
            Classification::RejectedUniform { k: 1, how: "symbolic".into() }
        );
    }

    #[test]
    fn graph_parametrization_detects_contraction_along_y() {
        // T = (x*y, x*y) is not nilpotent as a map on the plane, but on the
        // curve y = 0 one step kills everything.
        let s = SearchSpace::new(2, 2, 1, 2);
        let (t, y) = pair(["x*y", "x*y"], "y");
        assert_eq!(
            screen(0, &t, &y, &s).unwrap().classification,
            Classification::RejectedUniform {
                k: 1,
                how: "parametrized".into()
            }
        );
    }

    #[test]
    fn not_prime_base_is_rejected() {
        assert_eq!(run_search(&SearchSpace::new(4, 1, 1, 1)), Err(SearchError::NotPrime(4)));
    }

    #[test]
    fn random_mode_is_reproducible() {
        let mut s = SearchSpace::new(3, 2, 1, 2);
        s.mode = SearchMode::Random { samples: 40 };
        s.seed = 11;
        s.keep_all = true;
        let a = run_search(&s).unwrap();
        let b = run_search(&s).unwrap();
        assert_eq!(a.json_lines(), b.json_lines());
        assert_eq!(a.summary.classified(), 40);
        s.seed = 12;
        assert_ne!(run_search(&s).unwrap().json_lines(), a.json_lines());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(12))]
        #[test]
        fn any_shard_split_conserves_counts_and_candidates(count in 1u64..9) {
            let mut s = SearchSpace::new(2, 1, 2, 2);
            s.keep_all = true;
            let whole = run_search(&s).unwrap();
            let mut merged: Option<SearchResult> = None;
            for index in 0..count {
                s.shard = Shard { index, count };
                let part = run_search(&s).unwrap();
                proptest::prop_assert_eq!(part.summary.classified(), part.summary.total);
                merged = Some(match merged {
                    None => part,
                    Some(m) => m.merge(part),
                });
            }
            proptest::prop_assert_eq!(merged.unwrap(), whole);
        }
    }
}
