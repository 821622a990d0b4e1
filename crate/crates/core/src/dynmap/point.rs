use std::ops::{Deref, DerefMut};

use smallvec::SmallVec;

use crate::ff::{Field, FieldElem};

/// A point of affine space over some field, as plain coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Point(SmallVec<[FieldElem; 4]>);

impl Point {
    pub fn zeros(n: usize) -> Self {
        Point(SmallVec::from_elem(FieldElem::ZERO, n))
    }

    pub fn from_slice(coords: &[FieldElem]) -> Self {
        Point(SmallVec::from_slice(coords))
    }

    pub fn as_mut_slice(&mut self) -> &mut [FieldElem] {
        &mut self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Coordinates as power-basis coefficient arrays.
    pub fn coeffs(&self, field: &Field) -> Vec<Vec<u64>> {
        self.0.iter().map(|&c| field.coeffs(c)).collect()
    }

    pub fn format(&self, field: &Field) -> String {
        let parts: Vec<String> = self.0.iter().map(|&c| field.format(c)).collect();
        format!("({})", parts.join(","))
    }

    /// Parse `2,0,1` (prime-subfield residues) or `[1,0],[0,1]` (coefficient
    /// tuples); bare integers are reduced mod p.
    pub fn parse(text: &str, field: &Field) -> Result<Self, String> {
        let text = text.trim().trim_start_matches('(').trim_end_matches(')');
        let mut coords = SmallVec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let (item, tail) = if let Some(inner) = rest.strip_prefix('[') {
                let close = inner.find(']').ok_or_else(|| format!("unclosed '[' in '{text}'"))?;
                let coeffs = inner[..close]
                    .split(',')
                    .map(|s| parse_residue(s, field.p()))
                    .collect::<Result<Vec<_>, _>>()?;
                let elem = field.elem(&coeffs).map_err(|e| e.to_string())?;
                (elem, &inner[close + 1..])
            } else {
                let end = rest.find(',').unwrap_or(rest.len());
                let value = parse_residue(&rest[..end], field.p())?;
                (field.from_i64(value as i64), &rest[end..])
            };
            coords.push(item);
            rest = tail.trim_start();
            if let Some(t) = rest.strip_prefix(',') {
                rest = t.trim_start();
                if rest.is_empty() {
                    return Err(format!("trailing ',' in '{text}'"));
                }
            } else if !rest.is_empty() {
                return Err(format!("expected ',' in '{text}'"));
            }
        }
        Ok(Point(coords))
    }
}

fn parse_residue(s: &str, p: u64) -> Result<u64, String> {
    let v: i64 = s.trim().parse().map_err(|_| format!("'{}' is not an integer", s.trim()))?;
    Ok(v.rem_euclid(p as i64) as u64)
}

impl Deref for Point {
    type Target = [FieldElem];
    fn deref(&self) -> &[FieldElem] {
        &self.0
    }
}

impl DerefMut for Point {
    fn deref_mut(&mut self) -> &mut [FieldElem] {
        &mut self.0
    }
}

impl From<SmallVec<[FieldElem; 4]>> for Point {
    fn from(v: SmallVec<[FieldElem; 4]>) -> Self {
        Point(v)
    }
}

impl From<Vec<FieldElem>> for Point {
    fn from(v: Vec<FieldElem>) -> Self {
        Point(SmallVec::from_vec(v))
    }
}

/// Index addressing of `F_q^n` in lexicographic order (first coordinate most
/// significant), so that scans can be split into disjoint index ranges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PointSpace {
    pub q: u64,
    pub n: usize,
}

impl PointSpace {
    pub fn new(q: u64, n: usize) -> Self {
        PointSpace { q, n }
    }

    /// `q^n`, or `None` on overflow.
    pub fn size(&self) -> Option<u64> {
        (0..self.n).try_fold(1u64, |acc, _| acc.checked_mul(self.q))
    }

    pub fn point(&self, field: &Field, mut index: u64) -> Point {
        let mut coords: SmallVec<[FieldElem; 4]> = SmallVec::from_elem(FieldElem::ZERO, self.n);
        for slot in coords.iter_mut().rev() {
            *slot = field.element(index % self.q);
            index /= self.q;
        }
        Point(coords)
    }

    pub fn index(&self, point: &[FieldElem]) -> u64 {
        point.iter().fold(0u64, |acc, c| acc * self.q + c.index())
    }
}
