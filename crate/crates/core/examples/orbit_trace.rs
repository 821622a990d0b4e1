//! Follow one point of Example 1 (a = 1) over F_5 until it reaches the origin.
use geonil::dynmap::{ExampleInstance, Point};
use geonil::ff::Field;
use geonil::orbits::{orbit_status, trajectory, DEFAULT_ORBIT_BUDGET};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = Field::prime(5)?;
    let sys = ExampleInstance::example1(1).over(&f);
    let start = Point::parse("2,0,1", &f)?;
    assert!(sys.variety_eval.all_vanish(&start));
    let path = trajectory(&sys.map_eval, &start, &sys.fixed_point, DEFAULT_ORBIT_BUDGET);
    for (i, p) in path.iter().enumerate() {
        println!("T^{i} = {}", p.format(&f));
    }
    println!("{:?}", orbit_status(&sys.map_eval, &start, &sys.fixed_point, DEFAULT_ORBIT_BUDGET).depth());
    Ok(())
}
