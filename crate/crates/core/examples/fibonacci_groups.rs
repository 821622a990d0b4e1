//! Fibonacci recursions seeded with (a0, a0) always return to the identity.
use geonil::ff::Field;
use geonil::fib::{fib_hit_time, generator_bound_check, verify_lemma5, FibGroup};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let z5 = FibGroup::additive(5);
    let r = verify_lemma5(&z5, 1)?;
    println!("Z/5, seed 1: hit at {}, pair-map cycle length {}", r.hit_index, r.cycle_len);

    for n in [10u64, 12, 30, 49] {
        let g = FibGroup::additive(n);
        let worst = g
            .elements()
            .map(|a| fib_hit_time(&g, a, g.default_budget()).map(|t| t.hit_index))
            .collect::<Result<Vec<_>, _>>()?;
        println!("Z/{n}: longest hit time {}", worst.iter().max().unwrap_or(&0));
    }

    let f = Field::extension(2, 5)?;
    for k in 1..=8 {
        match generator_bound_check(&f, k) {
            Ok(r) => println!("{} k={k}: first identity {:?}", f.spec(), r.first_identity),
            Err(e) => println!("{} k={k}: {e}", f.spec()),
        }
    }
    Ok(())
}
