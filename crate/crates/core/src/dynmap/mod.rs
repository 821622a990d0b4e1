//! Polynomial self-maps of affine space, subvarieties, and the named example
//! systems.
//!
//! Maps and varieties are built symbolically (usually over the integers) and
//! then compiled for a particular field into a [`CompiledPolys`] evaluator,
//! which is what orbit iteration runs on.

mod examples;
mod point;

use std::ops::Range;

use smallvec::SmallVec;
use thiserror::Error;

use crate::ff::{FieldElem, FieldError, FieldRef};
use crate::mpoly::{CoeffRing, FieldPoly, MultiPoly, PolyError};

pub use examples::{build_example, ExampleInstance, ExampleName};
pub use point::{Point, PointSpace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynError {
    #[error("unknown example '{0}'")]
    UnknownName(String),
    #[error("example '{example}' needs parameter '{param}'")]
    MissingParam { example: String, param: String },
    #[error("a map on {nvars}-space needs {nvars} coordinates, got {got}")]
    ArityMismatch { nvars: usize, got: usize },
    #[error("a subvariety needs at least one defining polynomial")]
    EmptyVariety,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A polynomial self-map of affine `n`-space.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap<R: CoeffRing> {
    coords: Vec<MultiPoly<R>>,
}

pub type IntMap = PolyMap<crate::mpoly::Integers>;
pub type FieldMap = PolyMap<FieldRef>;

impl<R: CoeffRing> PolyMap<R> {
    pub fn new(coords: Vec<MultiPoly<R>>) -> Result<Self, DynError> {
        let n = coords.len();
        if n == 0 {
            return Err(DynError::ArityMismatch { nvars: 0, got: 0 });
        }
        for c in &coords {
            if c.nvars() != n {
                return Err(DynError::ArityMismatch { nvars: c.nvars(), got: n });
            }
            if c.ring() != coords[0].ring() {
                return Err(PolyError::DomainMismatch.into());
            }
        }
        Ok(PolyMap { coords })
    }

    pub fn identity(ring: R, n: usize) -> Self {
        PolyMap {
            coords: (0..n).map(|i| MultiPoly::var(ring.clone(), n, i)).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[MultiPoly<R>] {
        &self.coords
    }

    /// `self ∘ inner`, i.e. `P ↦ self(inner(P))`.
    pub fn compose(&self, inner: &Self, budget: usize) -> Result<Self, DynError> {
        if inner.nvars() != self.nvars() {
            return Err(DynError::ArityMismatch {
                nvars: self.nvars(),
                got: inner.nvars(),
            });
        }
        let coords = self
            .coords
            .iter()
            .map(|c| c.substitute(&inner.coords, budget))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PolyMap { coords })
    }

    /// The `k`-th iterate, `k >= 1`.
    pub fn iterate_symbolic(&self, k: u32, budget: usize) -> Result<Self, DynError> {
        assert!(k >= 1, "iterates are indexed from 1");
        let mut acc = self.clone();
        for _ in 1..k {
            acc = self.compose(&acc, budget)?;
        }
        Ok(acc)
    }

    /// Every coordinate is a constant polynomial.
    pub fn is_constant(&self) -> bool {
        self.coords.iter().all(|c| c.total_degree().finite().unwrap_or(0) == 0)
    }

    pub fn is_zero_map(&self) -> bool {
        self.coords.iter().all(MultiPoly::is_zero)
    }

    pub fn display_with(&self, names: &[&str]) -> String {
        let parts: Vec<String> = self.coords.iter().map(|c| c.display_with(names)).collect();
        format!("({})", parts.join(", "))
    }
}

impl<R: CoeffRing> std::fmt::Display for PolyMap<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl IntMap {
    pub fn parse(coords: &[&str], vars: &[&str]) -> Result<Self, DynError> {
        let polys = coords
            .iter()
            .map(|c| crate::mpoly::parse_poly(c, vars))
            .collect::<Result<Vec<_>, _>>()?;
        PolyMap::new(polys)
    }

    pub fn reduce(&self, field: &FieldRef) -> FieldMap {
        PolyMap {
            coords: self.coords.iter().map(|c| c.reduce(field)).collect(),
        }
    }
}

impl FieldMap {
    pub fn lift_to(&self, field: &FieldRef) -> Result<FieldMap, DynError> {
        let coords = self
            .coords
            .iter()
            .map(|c| c.lift_to(field))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PolyMap { coords })
    }

    pub fn compile(&self) -> CompiledPolys {
        CompiledPolys::new(&self.coords)
    }

    pub fn field(&self) -> &FieldRef {
        self.coords[0].ring()
    }

    /// Coordinatewise evaluation through the symbolic representation.
    pub fn eval_map(&self, point: &[FieldElem]) -> Result<Point, DynError> {
        let out = self
            .coords
            .iter()
            .map(|c| c.eval(point))
            .collect::<Result<SmallVec<_>, _>>()?;
        Ok(Point::from(out))
    }
}

/// The common zero set of a nonempty list of polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct Subvariety<R: CoeffRing> {
    defining: Vec<MultiPoly<R>>,
}

pub type IntVariety = Subvariety<crate::mpoly::Integers>;
pub type FieldVariety = Subvariety<FieldRef>;

impl<R: CoeffRing> Subvariety<R> {
    pub fn new(defining: Vec<MultiPoly<R>>) -> Result<Self, DynError> {
        let Some(first) = defining.first() else {
            return Err(DynError::EmptyVariety);
        };
        let n = first.nvars();
        for f in &defining {
            if f.nvars() != n {
                return Err(DynError::ArityMismatch { nvars: n, got: f.nvars() });
            }
            if f.ring() != first.ring() {
                return Err(PolyError::DomainMismatch.into());
            }
        }
        Ok(Subvariety { defining })
    }

    pub fn nvars(&self) -> usize {
        self.defining[0].nvars()
    }

    pub fn defining(&self) -> &[MultiPoly<R>] {
        &self.defining
    }
}

impl<R: CoeffRing> std::fmt::Display for Subvariety<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.defining.iter().map(|c| format!("{c} = 0")).collect();
        f.write_str(&parts.join(", "))
    }
}

impl IntVariety {
    pub fn parse(defining: &[&str], vars: &[&str]) -> Result<Self, DynError> {
        let polys = defining
            .iter()
            .map(|c| crate::mpoly::parse_poly(c, vars))
            .collect::<Result<Vec<_>, _>>()?;
        Subvariety::new(polys)
    }

    pub fn reduce(&self, field: &FieldRef) -> FieldVariety {
        Subvariety {
            defining: self.defining.iter().map(|c| c.reduce(field)).collect(),
        }
    }
}

impl FieldVariety {
    pub fn lift_to(&self, field: &FieldRef) -> Result<FieldVariety, DynError> {
        let defining = self
            .defining
            .iter()
            .map(|c| c.lift_to(field))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Subvariety { defining })
    }

    pub fn compile(&self) -> CompiledPolys {
        CompiledPolys::new(&self.defining)
    }

    /// Every defining polynomial vanishes at `point`.
    pub fn membership(&self, point: &[FieldElem]) -> Result<bool, DynError> {
        for f in &self.defining {
            if !f.eval(point)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

// (coefficient, exponent vector)
type FlatTerm = (FieldElem, SmallVec<[u32; 4]>);

/// A list of polynomials over one field, flattened for fast repeated
/// evaluation. Used both as a map (one output per coordinate) and as a
/// variety membership test (all outputs zero).
#[derive(Clone, Debug)]
pub struct CompiledPolys {
    field: FieldRef,
    nvars: usize,
    max_exp: Vec<u32>,
    // offsets[v] = start of variable v's block in the power table
    offsets: Vec<usize>,
    polys: Vec<Vec<FlatTerm>>,
}

impl CompiledPolys {
    pub fn new(polys: &[FieldPoly]) -> Self {
        assert!(!polys.is_empty(), "nothing to compile");
        let field = polys[0].ring().clone();
        let nvars = polys[0].nvars();
        let mut max_exp = vec![0u32; nvars];
        for p in polys {
            for (m, e) in max_exp.iter_mut().zip(p.max_exponents()) {
                *m = (*m).max(e);
            }
        }
        let mut offsets = Vec::with_capacity(nvars);
        let mut acc = 0;
        for &e in &max_exp {
            offsets.push(acc);
            acc += e as usize + 1;
        }
        let polys = polys
            .iter()
            .map(|p| {
                p.terms()
                    .map(|(m, c)| (*c, SmallVec::from_slice(m.exps())))
                    .collect()
            })
            .collect();
        CompiledPolys {
            field,
            nvars,
            max_exp,
            offsets,
            polys,
        }
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    fn powers(&self, point: &[FieldElem]) -> SmallVec<[FieldElem; 64]> {
        let f = &*self.field;
        let mut table = SmallVec::new();
        for (&x, &maxe) in point.iter().zip(&self.max_exp) {
            let mut acc = FieldElem::ONE;
            table.push(acc);
            for _ in 0..maxe {
                acc = f.mul(acc, x);
                table.push(acc);
            }
        }
        table
    }

    /// Value of polynomial `i` given a precomputed power table.
    fn eval_one(&self, i: usize, table: &[FieldElem]) -> FieldElem {
        let f = &*self.field;
        let mut acc = FieldElem::ZERO;
        for (c, exps) in &self.polys[i] {
            let mut t = *c;
            for (v, &e) in exps.iter().enumerate() {
                if e > 0 {
                    t = f.mul(t, table[self.offsets[v] + e as usize]);
                }
            }
            acc = f.add(acc, t);
        }
        acc
    }

    /// Evaluate every polynomial at `point` into `out`.
    pub fn eval_into(&self, point: &[FieldElem], out: &mut [FieldElem]) {
        debug_assert_eq!(point.len(), self.nvars);
        let table = self.powers(point);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.eval_one(i, &table);
        }
    }

    pub fn apply(&self, point: &Point) -> Point {
        let mut out = Point::zeros(self.polys.len());
        self.eval_into(point, out.as_mut_slice());
        out
    }

    /// All polynomials vanish at `point`.
    pub fn all_vanish(&self, point: &[FieldElem]) -> bool {
        let table = self.powers(point);
        (0..self.polys.len()).all(|i| self.eval_one(i, &table).is_zero())
    }
}

/// Members of `variety` among the points with indices in `range`, in order.
pub fn enumerate_points<'a>(
    variety: &'a CompiledPolys,
    space: PointSpace,
    range: Range<u64>,
) -> impl Iterator<Item = (u64, Point)> + 'a {
    let field = variety.field().clone();
    range.filter_map(move |idx| {
        let p = space.point(&field, idx);
        variety.all_vanish(&p).then_some((idx, p))
    })
}

/// Convenience: the full member list of `variety` over its field.
pub fn variety_points(variety: &CompiledPolys) -> Vec<Point> {
    let space = PointSpace::new(variety.field().q(), variety.nvars());
    let total = space.size().expect("point space fits in u64");
    enumerate_points(variety, space, 0..total).map(|(_, p)| p).collect()
}

/// Symbolic polynomials tied to a specific field, ready for iteration.
#[derive(Clone, Debug)]
pub struct System {
    pub map: FieldMap,
    pub variety: FieldVariety,
    pub map_eval: CompiledPolys,
    pub variety_eval: CompiledPolys,
    pub fixed_point: Point,
}

impl System {
    pub fn new(map: FieldMap, variety: FieldVariety, fixed_point: Point) -> Self {
        let map_eval = map.compile();
        let variety_eval = variety.compile();
        System {
            map,
            variety,
            map_eval,
            variety_eval,
            fixed_point,
        }
    }

    pub fn field(&self) -> &FieldRef {
        self.map.field()
    }

    pub fn nvars(&self) -> usize {
        self.map.nvars()
    }
}
