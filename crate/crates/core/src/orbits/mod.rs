//! Orbit iteration and the depth/periodicity questions asked of a map.
//!
//! Single orbits use constant-memory Brent detection ([`orbit_status`]).
//! Whole-space questions ([`is_nilpotent_on_k`], [`periodic_points`],
//! [`rho_stats`]) build the functional graph explicitly and are capped at
//! [`DEFAULT_SCAN_CAP`] nodes.

mod brent;
mod graph;

use std::collections::{BTreeMap, HashSet};
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynmap::{enumerate_points, CompiledPolys, Point, PointSpace};
use crate::ff::{Field, FieldElem, FieldSpec};
use crate::mpoly::FieldPoly;

pub use brent::{brent, naive_rho, OrbitOutcome};
pub use graph::FunctionalGraph;

pub const DEFAULT_ORBIT_BUDGET: u64 = 1_000_000;
/// Largest point count for functional-graph scans.
pub const DEFAULT_SCAN_CAP: u64 = 2_000_000;
/// Largest ambient point count enumerated when listing a variety's points.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 28;

const CHUNK: u64 = 1 << 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitError {
    #[error("scan of {size} points exceeds the cap of {cap}")]
    ScanCapExceeded { size: String, cap: u64 },
    #[error("expected a univariate polynomial, got {0} variables")]
    NotUnivariate(usize),
    #[error("map on {map}-space cannot act on points of {other}-space")]
    ArityMismatch { map: usize, other: usize },
}

fn capped_space(q: u64, n: usize, cap: u64) -> Result<PointSpace, OrbitError> {
    let space = PointSpace::new(q, n);
    match space.size() {
        Some(s) if s <= cap => Ok(space),
        Some(s) => Err(OrbitError::ScanCapExceeded { size: s.to_string(), cap }),
        None => Err(OrbitError::ScanCapExceeded {
            size: format!("{q}^{n}"),
            cap,
        }),
    }
}

/// The orbit of `point` under `map`, classified against `target`.
pub fn orbit_status(map: &CompiledPolys, point: &Point, target: &Point, budget: u64) -> OrbitOutcome<Point> {
    brent(point.clone(), Some(target), |p| map.apply(p), budget.max(1))
}

/// Every point of the orbit from `point` up to the first visit to `target`
/// or the first repeated point, at most `budget + 1` points.
pub fn trajectory(map: &CompiledPolys, point: &Point, target: &Point, budget: u64) -> Vec<Point> {
    let mut seen = HashSet::new();
    let mut out = vec![point.clone()];
    let mut cur = point.clone();
    seen.insert(cur.clone());
    for _ in 0..budget {
        if &cur == target {
            break;
        }
        cur = map.apply(&cur);
        out.push(cur.clone());
        if !seen.insert(cur.clone()) {
            break;
        }
    }
    out
}

/// A point recorded by its lexicographic index and its coordinates as
/// power-basis coefficient arrays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub index: u64,
    pub coords: Vec<Vec<u64>>,
}

impl Witness {
    pub fn new(field: &Field, space: PointSpace, point: &Point) -> Self {
        Witness {
            index: space.index(point),
            coords: point.coeffs(field),
        }
    }

    pub fn point(&self, field: &Field) -> Point {
        let coords: Vec<FieldElem> = self
            .coords
            .iter()
            .map(|c| field.elem(c).expect("witness coordinates lie in the field"))
            .collect();
        Point::from(coords)
    }

    pub(crate) fn earlier(a: Option<Self>, b: Option<Self>) -> Option<Self> {
        match (a, b) {
            (Some(a), Some(b)) => Some(if b.index < a.index { b } else { a }),
            (a, b) => a.or(b),
        }
    }
}

/// A cycle avoiding the target: `on_cycle` is its lexicographically smallest
/// point and `start` the smallest scanned point whose orbit falls into it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleWitness {
    pub start: Witness,
    pub tail: u64,
    pub cycle_len: u64,
    pub on_cycle: Witness,
}

/// Distinct cycles kept per table, smallest `on_cycle` first.
pub const MAX_CYCLE_WITNESSES: usize = 8;

/// Depth statistics of the orbits of one point set.
///
/// `non_terminating_count` covers every point that did not reach the target:
/// those certified to cycle plus those that ran out of budget, the latter
/// also counted in `budget_exhausted_count`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthTable {
    pub spec: FieldSpec,
    pub point_count: u64,
    pub depth_histogram: BTreeMap<u64, u64>,
    pub min_depth: Option<u64>,
    pub max_depth: Option<u64>,
    pub depth_sum: u64,
    pub non_terminating_count: u64,
    pub budget_exhausted_count: u64,
    pub max_depth_witness: Option<Witness>,
    pub cycles: Vec<CycleWitness>,
    pub exhausted_witness: Option<Witness>,
}

impl DepthTable {
    pub fn empty(spec: FieldSpec) -> Self {
        DepthTable {
            spec,
            point_count: 0,
            depth_histogram: BTreeMap::new(),
            min_depth: None,
            max_depth: None,
            depth_sum: 0,
            non_terminating_count: 0,
            budget_exhausted_count: 0,
            max_depth_witness: None,
            cycles: Vec::new(),
            exhausted_witness: None,
        }
    }

    /// Add one orbit. `start` and `cycle_min` are only called when the
    /// witness might be kept.
    pub fn record(
        &mut self,
        start: impl FnOnce() -> Witness,
        outcome: &OrbitOutcome<Point>,
        cycle_min: impl FnOnce(&Point) -> Witness,
    ) {
        self.point_count += 1;
        match outcome {
            OrbitOutcome::ReachedTarget { depth } => {
                let d = *depth;
                *self.depth_histogram.entry(d).or_insert(0) += 1;
                self.depth_sum += d;
                self.min_depth = Some(self.min_depth.map_or(d, |m| m.min(d)));
                match self.max_depth {
                    Some(m) if d < m => {}
                    Some(m) if d == m => {
                        self.max_depth_witness = Witness::earlier(self.max_depth_witness.take(), Some(start()));
                    }
                    _ => {
                        self.max_depth = Some(d);
                        self.max_depth_witness = Some(start());
                    }
                }
            }
            OrbitOutcome::EnteredCycle { tail, cycle_len, witness } => {
                self.non_terminating_count += 1;
                let cw = CycleWitness {
                    start: start(),
                    tail: *tail,
                    cycle_len: *cycle_len,
                    on_cycle: cycle_min(witness),
                };
                self.cycles = merge_cycles(std::mem::take(&mut self.cycles), vec![cw]);
            }
            OrbitOutcome::BudgetExhausted { .. } => {
                self.non_terminating_count += 1;
                self.budget_exhausted_count += 1;
                self.exhausted_witness = Witness::earlier(self.exhausted_witness.take(), Some(start()));
            }
        }
    }

    /// Combine tables over disjoint point sets. Associative and commutative.
    pub fn merge(mut self, other: DepthTable) -> DepthTable {
        debug_assert_eq!(self.spec, other.spec);
        self.point_count += other.point_count;
        for (d, c) in other.depth_histogram {
            *self.depth_histogram.entry(d).or_insert(0) += c;
        }
        self.depth_sum += other.depth_sum;
        self.min_depth = match (self.min_depth, other.min_depth) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        match (self.max_depth, other.max_depth) {
            (Some(a), Some(b)) if b > a => {
                self.max_depth = other.max_depth;
                self.max_depth_witness = other.max_depth_witness;
            }
            (Some(a), Some(b)) if a == b => {
                self.max_depth_witness = Witness::earlier(self.max_depth_witness, other.max_depth_witness);
            }
            (None, _) => {
                self.max_depth = other.max_depth;
                self.max_depth_witness = other.max_depth_witness;
            }
            _ => {}
        }
        self.non_terminating_count += other.non_terminating_count;
        self.budget_exhausted_count += other.budget_exhausted_count;
        self.cycles = merge_cycles(self.cycles, other.cycles);
        self.exhausted_witness = Witness::earlier(self.exhausted_witness, other.exhausted_witness);
        self
    }

    /// The first cycle witness, if any orbit cycled.
    pub fn cycle_witness(&self) -> Option<&CycleWitness> {
        self.cycles.first()
    }

    pub fn terminating_count(&self) -> u64 {
        self.depth_histogram.values().sum()
    }

    pub fn mean_depth(&self) -> Option<f64> {
        let n = self.terminating_count();
        (n > 0).then(|| self.depth_sum as f64 / n as f64)
    }

    /// Every point reached the target.
    pub fn all_terminate(&self) -> bool {
        self.non_terminating_count == 0
    }

    pub const CSV_HEADER: &'static str = "p,m,q,points,depth_min,depth_max,depth_mean,nonterminating,hist";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<u64>| v.map(|d| d.to_string()).unwrap_or_default();
        let hist: Vec<String> = self.depth_histogram.iter().map(|(d, c)| format!("{d}:{c}")).collect();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.spec.p,
            self.spec.m,
            self.spec.q,
            self.point_count,
            opt(self.min_depth),
            opt(self.max_depth),
            self.mean_depth().map(|m| format!("{m:.4}")).unwrap_or_default(),
            self.non_terminating_count,
            hist.join(";")
        )
    }
}

/// Union keyed by cycle, keeping the earliest start for each and the
/// [`MAX_CYCLE_WITNESSES`] smallest cycles.
fn merge_cycles(a: Vec<CycleWitness>, b: Vec<CycleWitness>) -> Vec<CycleWitness> {
    let mut by_cycle: BTreeMap<u64, CycleWitness> = BTreeMap::new();
    for cw in a.into_iter().chain(b) {
        match by_cycle.get(&cw.on_cycle.index) {
            Some(old) if old.start.index <= cw.start.index => {}
            _ => {
                by_cycle.insert(cw.on_cycle.index, cw);
            }
        }
    }
    by_cycle.into_values().take(MAX_CYCLE_WITNESSES).collect()
}

/// Smallest point on the cycle through `on`.
fn cycle_minimum(map: &CompiledPolys, on: &Point) -> Point {
    let mut best = on.clone();
    let mut cur = map.apply(on);
    while &cur != on {
        if cur < best {
            best = cur.clone();
        }
        cur = map.apply(&cur);
    }
    best
}

/// Depth table for the members of `variety` with lexicographic indices in
/// `range`. Runs single-threaded; see [`depth_profile`] for the full scan.
pub fn depth_profile_range(
    map: &CompiledPolys,
    variety: &CompiledPolys,
    target: &Point,
    budget: u64,
    range: Range<u64>,
) -> DepthTable {
    profile_range_with(map, variety, target, budget, range, &|_, _, _| None::<()>).0
}

fn profile_range_with<T>(
    map: &CompiledPolys,
    variety: &CompiledPolys,
    target: &Point,
    budget: u64,
    range: Range<u64>,
    inspect: &(impl Fn(u64, &Point, &OrbitOutcome<Point>) -> Option<T> + Sync),
) -> (DepthTable, Vec<T>) {
    let field = map.field();
    let space = PointSpace::new(field.q(), map.nvars());
    let mut table = DepthTable::empty(field.spec().clone());
    let mut found = Vec::new();
    for (idx, p) in enumerate_points(variety, space, range) {
        let outcome = orbit_status(map, &p, target, budget);
        table.record(
            || Witness {
                index: idx,
                coords: p.coeffs(field),
            },
            &outcome,
            |c| Witness::new(field, space, &cycle_minimum(map, c)),
        );
        found.extend(inspect(idx, &p, &outcome));
    }
    (table, found)
}

/// Depth table over every point of the variety, computed in parallel over
/// index chunks. The result does not depend on the thread count.
pub fn depth_profile(
    map: &CompiledPolys,
    variety: &CompiledPolys,
    target: &Point,
    budget: u64,
) -> Result<DepthTable, OrbitError> {
    Ok(depth_profile_with(map, variety, target, budget, |_, _, _| None::<()>)?.0)
}

/// [`depth_profile`] that also hands every `(index, point, outcome)` to
/// `inspect` and collects what it returns, in point order.
pub fn depth_profile_with<T: Send>(
    map: &CompiledPolys,
    variety: &CompiledPolys,
    target: &Point,
    budget: u64,
    inspect: impl Fn(u64, &Point, &OrbitOutcome<Point>) -> Option<T> + Sync,
) -> Result<(DepthTable, Vec<T>), OrbitError> {
    if variety.nvars() != map.nvars() {
        return Err(OrbitError::ArityMismatch {
            map: map.nvars(),
            other: variety.nvars(),
        });
    }
    let space = capped_space(map.field().q(), map.nvars(), DEFAULT_ENUM_CAP)?;
    let total = space.size().unwrap_or(0);
    let chunks = total.div_ceil(CHUNK);
    let parts: Vec<(DepthTable, Vec<T>)> = (0..chunks)
        .into_par_iter()
        .map(|c| profile_range_with(map, variety, target, budget, c * CHUNK..((c + 1) * CHUNK).min(total), &inspect))
        .collect();
    let mut table = DepthTable::empty(map.field().spec().clone());
    let mut found = Vec::new();
    for (t, f) in parts {
        table = table.merge(t);
        found.extend(f);
    }
    Ok((table, found))
}

/// The functional graph of `map` on all of `F_q^n`, nodes numbered by
/// lexicographic point index.
pub fn map_graph(map: &CompiledPolys, cap: u64) -> Result<(PointSpace, FunctionalGraph), OrbitError> {
    if map.len() != map.nvars() {
        return Err(OrbitError::ArityMismatch {
            map: map.nvars(),
            other: map.len(),
        });
    }
    let field = map.field();
    let space = capped_space(field.q(), map.nvars(), cap.min(u32::MAX as u64))?;
    let n = space.size().unwrap_or(0);
    let succ: Vec<u32> = (0..n)
        .into_par_iter()
        .map(|i| space.index(&map.apply(&space.point(field, i))) as u32)
        .collect();
    Ok((space, FunctionalGraph::new(succ)))
}

/// Whether some iterate of the map sends all of `F_q^n` to one point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Nilpotency {
    Nilpotent { exponent: u64, fixed_point: Point },
    /// `periodic_count ≥ 2` periodic points; `witnesses` holds the first few.
    NotNilpotent { periodic_count: u64, witnesses: Vec<Point> },
}

impl Nilpotency {
    pub fn is_nilpotent(&self) -> bool {
        matches!(self, Nilpotency::Nilpotent { .. })
    }
}

/// Nilpotent exactly when the functional graph has a single periodic node,
/// which is then the common fixed point; the exponent is the longest tail.
pub fn is_nilpotent_on_k(map: &CompiledPolys, cap: u64) -> Result<Nilpotency, OrbitError> {
    let (space, graph) = map_graph(map, cap)?;
    let field = map.field();
    let periodic: Vec<usize> = graph.periodic_nodes().take(2).collect();
    if periodic.len() == 1 {
        Ok(Nilpotency::Nilpotent {
            exponent: graph.max_height() as u64,
            fixed_point: space.point(field, periodic[0] as u64),
        })
    } else {
        Ok(Nilpotency::NotNilpotent {
            periodic_count: graph.periodic_nodes().count() as u64,
            witnesses: periodic.into_iter().map(|v| space.point(field, v as u64)).collect(),
        })
    }
}

/// Every point of `F_q^n` lying on a cycle of the map, in lexicographic order.
pub fn periodic_points(map: &CompiledPolys, cap: u64) -> Result<Vec<Point>, OrbitError> {
    let (space, graph) = map_graph(map, cap)?;
    let field = map.field();
    Ok(graph.periodic_nodes().map(|v| space.point(field, v as u64)).collect())
}

/// One connected component of a univariate map's functional graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoComponent {
    pub cycle_length: u64,
    /// Cycle elements as field-element indices, in orbit order from the smallest.
    pub cycle: Vec<u64>,
    pub tail_nodes: u64,
    pub max_tail: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoStats {
    pub spec: FieldSpec,
    pub components: Vec<RhoComponent>,
}

impl RhoStats {
    pub fn node_count(&self) -> u64 {
        self.components.iter().map(|c| c.cycle_length + c.tail_nodes).sum()
    }
}

/// Cycle and tail structure of `t ↦ h(t)` on the field.
pub fn rho_stats(h: &FieldPoly) -> Result<RhoStats, OrbitError> {
    if h.nvars() != 1 {
        return Err(OrbitError::NotUnivariate(h.nvars()));
    }
    let field = h.ring();
    let eval = CompiledPolys::new(std::slice::from_ref(h));
    let graph = FunctionalGraph::from_fn(field.q() as usize, |i| {
        eval.apply(&Point::from_slice(&[field.element(i as u64)]))[0].index() as usize
    });
    let mut components: Vec<RhoComponent> = (0..graph.num_components())
        .map(|_| RhoComponent {
            cycle_length: 0,
            cycle: Vec::new(),
            tail_nodes: 0,
            max_tail: 0,
        })
        .collect();
    for v in 0..graph.len() {
        let c = &mut components[graph.component(v)];
        if graph.is_periodic(v) {
            if c.cycle.is_empty() {
                let mut w = v;
                loop {
                    c.cycle.push(w as u64);
                    w = graph.successor(w);
                    if w == v {
                        break;
                    }
                }
                c.cycle_length = c.cycle.len() as u64;
            }
        } else {
            c.tail_nodes += 1;
            c.max_tail = c.max_tail.max(graph.height(v) as u64);
        }
    }
    Ok(RhoStats {
        spec: field.spec().clone(),
        components,
    })
}
