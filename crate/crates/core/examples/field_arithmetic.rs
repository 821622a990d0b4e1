//! Arithmetic in GF(3^2): the chosen modulus, a generator, and inverses.
use geonil::ff::Field;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = Field::extension(3, 2)?;
    println!("{}", f.spec());
    let g = f.find_generator();
    println!("generator {} of order {}", f.format(g), f.element_order(g)?);
    for k in 0..8 {
        let x = f.pow(g, k);
        println!("g^{k} = {:>6}   inverse {:>6}", f.format(x), f.format(f.inv(x)?));
    }
    let a = f.element(5);
    let b = f.element(7);
    println!("{} * {} = {}", f.format(a), f.format(b), f.format(f.mul(a, b)));
    Ok(())
}
