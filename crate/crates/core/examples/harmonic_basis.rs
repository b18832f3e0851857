//! Homogeneous harmonic polynomial bases and a random harmonic map built
//! from them.

use qharm::polyharm::{harmonic_basis, random_harmonic_map};

fn main() -> qharm::Result<()> {
    for n in [2, 3] {
        for d in 0..=3 {
            let basis = harmonic_basis(n, d);
            println!("n={n} d={d}: {} elements", basis.len());
            for p in &basis {
                assert!(p.laplacian().is_zero());
                println!("    {p}");
            }
        }
    }
    let u = random_harmonic_map(3, 2, 1)?;
    for (j, c) in u.components().iter().enumerate() {
        println!("u{} = {c}", j + 1);
    }
    Ok(())
}
