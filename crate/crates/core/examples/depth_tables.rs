//! Depth histograms of Example 1 over F_5 and F_25: every point of Y dies,
//! but the deepest one gets deeper in the bigger field.
use geonil::dynmap::ExampleInstance;
use geonil::ff::Field;
use geonil::orbits::{depth_profile, DepthTable, DEFAULT_ORBIT_BUDGET};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ex = ExampleInstance::example1(1);
    println!("{}", DepthTable::CSV_HEADER);
    for m in 1..=2 {
        let sys = ex.over(&Field::extension(5, m)?);
        let table = depth_profile(&sys.map_eval, &sys.variety_eval, &sys.fixed_point, DEFAULT_ORBIT_BUDGET)?;
        println!("{}", table.csv_row());
        if let Some(w) = &table.max_depth_witness {
            println!("  deepest start {:?}", w.coords);
        }
    }
    Ok(())
}
