//! The three example families, each in the form printed with the
//! construction and (for the second and third) a corrected form in which the
//! projected `u = x/z`, `v = y/z` dynamics behave as the nilpotency argument
//! needs.
//!
//! | name                 | map                                                         | Y              |
//! |----------------------|-------------------------------------------------------------|----------------|
//! | `example1` (a)       | `((x²+az²)(x−y)z³, ((y²+az²)²+az⁴)(x−y)z, (x−y)z⁵)`         | `x²+az² = yz`  |
//! | `example2_literal`   | `((x+z)(x−y)z, (y+2z)(x−y)z, (x−y)z³)`                      | `x+z = y`      |
//! | `example2_corrected` | third coordinate `(x−y)z²`                                  | `x+z = y`      |
//! | `example3_literal`   | `(y(x−1)z², xy(x−1)z, (x−1)z³)`                             | `x = y`        |
//! | `example3_corrected` | every `(x−1)` replaced by `(x−z)`                           | `x = y`        |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use super::{DynError, IntMap, IntVariety, Point, System};
use crate::ff::FieldRef;
use crate::mpoly::{parse_poly_with, IntPoly};

const XYZ: &[&str] = &["x", "y", "z"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExampleName {
    Example1,
    Example2Literal,
    Example2Corrected,
    Example3Literal,
    Example3Corrected,
}

impl ExampleName {
    pub const ALL: [ExampleName; 5] = [
        ExampleName::Example1,
        ExampleName::Example2Literal,
        ExampleName::Example2Corrected,
        ExampleName::Example3Literal,
        ExampleName::Example3Corrected,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleName::Example1 => "example1",
            ExampleName::Example2Literal => "example2_literal",
            ExampleName::Example2Corrected => "example2_corrected",
            ExampleName::Example3Literal => "example3_literal",
            ExampleName::Example3Corrected => "example3_corrected",
        }
    }

    /// Coordinates, variety, and trap factor as text in `x, y, z`.
    fn text(self) -> ([&'static str; 3], &'static str, &'static str) {
        match self {
            ExampleName::Example1 => (
                [
                    "(x^2 + a*z^2)*(x - y)*z^3",
                    "((y^2 + a*z^2)^2 + a*z^4)*(x - y)*z",
                    "(x - y)*z^5",
                ],
                "x^2 + a*z^2 - y*z",
                "x - y",
            ),
            ExampleName::Example2Literal => (
                ["(x + z)*(x - y)*z", "(y + 2*z)*(x - y)*z", "(x - y)*z^3"],
                "x + z - y",
                "x - y",
            ),
            ExampleName::Example2Corrected => (
                ["(x + z)*(x - y)*z", "(y + 2*z)*(x - y)*z", "(x - y)*z^2"],
                "x + z - y",
                "x - y",
            ),
            ExampleName::Example3Literal => (
                ["y*(x - 1)*z^2", "x*y*(x - 1)*z", "(x - 1)*z^3"],
                "x - y",
                "x - 1",
            ),
            ExampleName::Example3Corrected => (
                ["y*(x - z)*z^2", "x*y*(x - z)*z", "(x - z)*z^3"],
                "x - y",
                "x - z",
            ),
        }
    }
}

impl fmt::Display for ExampleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleName {
    type Err = DynError;

    fn from_str(s: &str) -> Result<Self, DynError> {
        ExampleName::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| DynError::UnknownName(s.to_string()))
    }
}

/// A named map with its subvariety and the fixed point the orbits should reach.
#[derive(Clone, Debug, PartialEq)]
pub struct ExampleInstance {
    pub name: ExampleName,
    pub map: IntMap,
    pub variety: IntVariety,
    /// The factor shared by every coordinate; once it vanishes the next
    /// image is the origin.
    pub trap: IntPoly,
    pub fixed_point_dim: usize,
    pub params: BTreeMap<String, BigInt>,
}

/// Build a named example over the integers. `example1` needs parameter `a`.
pub fn build_example(name: &str, params: &[(&str, BigInt)]) -> Result<ExampleInstance, DynError> {
    let name: ExampleName = name.parse()?;
    let mut bound = BTreeMap::new();
    if name == ExampleName::Example1 {
        let a = params
            .iter()
            .find(|(n, _)| *n == "a")
            .ok_or_else(|| DynError::MissingParam {
                example: name.to_string(),
                param: "a".into(),
            })?;
        bound.insert("a".to_string(), a.1.clone());
    }
    let binding: Vec<(&str, BigInt)> = bound.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    let (coords, variety, trap) = name.text();
    let polys = coords
        .iter()
        .map(|c| parse_poly_with(c, XYZ, &binding))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExampleInstance {
        name,
        map: IntMap::new(polys)?,
        variety: IntVariety::new(vec![parse_poly_with(variety, XYZ, &binding)?])?,
        trap: parse_poly_with(trap, XYZ, &binding)?,
        fixed_point_dim: 3,
        params: bound,
    })
}

impl ExampleInstance {
    pub fn example1(a: i64) -> Self {
        build_example("example1", &[("a", BigInt::from(a))]).expect("built-in example")
    }

    /// A parameter-free example; `example1` needs [`ExampleInstance::example1`].
    pub fn named(name: ExampleName) -> Self {
        build_example(name.as_str(), &[]).expect("built-in example")
    }

    pub fn fixed_point(&self) -> Point {
        Point::zeros(self.fixed_point_dim)
    }

    /// The example reduced into `field` (any `F_{p^m}`).
    pub fn over(&self, field: &FieldRef) -> System {
        System::new(
            self.map.reduce(field),
            self.variety.reduce(field),
            self.fixed_point(),
        )
    }
}
