//! Tail and cycle structure of t -> t^2 + a over small fields.
use geonil::ff::Field;
use geonil::mpoly::parse_poly_with;
use geonil::orbits::rho_stats;
use num_bigint::BigInt;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for q in [5u64, 7, 11, 13] {
        for a in 0..3i64 {
            let f = Field::prime(q)?;
            let h = parse_poly_with("t^2 + a", &["t"], &[("a", BigInt::from(a))])?.reduce(&f);
            let stats = rho_stats(&h)?;
            let shapes: Vec<String> = stats
                .components
                .iter()
                .map(|c| format!("{}+{}", c.cycle_length, c.tail_nodes))
                .collect();
            println!("q={q:<3} a={a}  cycle+tail per component: {}", shapes.join(" "));
        }
    }
    Ok(())
}
