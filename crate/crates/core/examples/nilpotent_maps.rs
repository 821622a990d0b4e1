//! Whole-space nilpotency and periodic points for a few plane maps.
use geonil::dynmap::IntMap;
use geonil::ff::Field;
use geonil::orbits::{is_nilpotent_on_k, periodic_points, DEFAULT_SCAN_CAP};
use geonil::theorems::{verify_thm1, Budgets};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for coords in [["y", "0"], ["x^2", "y^2"], ["x*y", "x + y"]] {
        let map = IntMap::parse(&coords, &["x", "y"])?;
        for q in [2u64, 3] {
            let f = Field::prime(q)?;
            let compiled = map.reduce(&f).compile();
            let verdict = is_nilpotent_on_k(&compiled, DEFAULT_SCAN_CAP)?;
            let periodic = periodic_points(&compiled, DEFAULT_SCAN_CAP)?.len();
            println!("({}) over F_{q}: nilpotent={} periodic points={periodic}", coords.join(", "), verdict.is_nilpotent());
        }
        let report = verify_thm1(&coords.join(","), &map, 3, &[1, 2], 4, Budgets::default())?;
        println!("  {} -> {}", report.claim.as_str(), report.verdict);
    }
    Ok(())
}
