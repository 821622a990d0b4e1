//! Run the standard verification battery and print one JSON line per claim.
use geonil::theorems::{verify_all, Budgets};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for report in verify_all(Budgets::default())? {
        eprintln!("{:<14} {}", report.claim.as_str(), report.verdict);
        println!("{}", report.without_timing().to_json_line());
    }
    Ok(())
}
