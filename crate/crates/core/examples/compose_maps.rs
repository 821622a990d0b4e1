//! Symbolic composition: the shift (y, 0) dies after two steps, and the
//! second iterate of Example 1 agrees pointwise with applying it twice.
use geonil::dynmap::{ExampleInstance, IntMap, PointSpace};
use geonil::ff::Field;
use geonil::mpoly::DEFAULT_TERM_BUDGET;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let shift = IntMap::parse(&["y", "0"], &["x", "y"])?;
    for k in 1..=3 {
        let t = shift.iterate_symbolic(k, DEFAULT_TERM_BUDGET)?;
        println!("T^{k} = {}", t.display_with(&["x", "y"]));
    }

    let f = Field::prime(3)?;
    let t = ExampleInstance::example1(1).map.reduce(&f);
    let t2 = t.iterate_symbolic(2, DEFAULT_TERM_BUDGET)?;
    println!("T^2 of Example 1 has {} terms in its first coordinate", t2.coords()[0].num_terms());
    let (once, twice) = (t.compile(), t2.compile());
    let space = PointSpace::new(3, 3);
    let agree = (0..27).all(|i| {
        let p = space.point(&f, i);
        twice.apply(&p) == once.apply(&once.apply(&p))
    });
    println!("pointwise agreement on F_3^3: {agree}");
    Ok(())
}
