//! Closed-form `Delta |u|^q` against a Richardson finite-difference value
//! for a few maps and exponents.

use qharm::oracles::{fd_laplacian, FdConfig};
use qharm::polyharm::{extremal_map, identity_map, random_harmonic_map, zsquared_map, Branch, HarmonicMap};
use qharm::subharm::laplacian_modulus_power;

fn modulus_power(u: &HarmonicMap, q: f64) -> impl Fn(&[f64]) -> f64 + '_ {
    move |y| u.eval(y).iter().map(|v| v * v).sum::<f64>().powf(0.5 * q)
}

fn main() -> qharm::Result<()> {
    let cases: Vec<(&str, HarmonicMap, Vec<f64>)> = vec![
        ("stretch n=2 K=2", extremal_map(2, 2.0, Branch::Stretch)?, vec![0.0, 1.0]),
        ("compress n=3 K=2", extremal_map(3, 2.0, Branch::Compress)?, vec![0.0, 0.0, 1.0]),
        ("identity n=3", identity_map(3)?, vec![0.3, -0.4, 1.2]),
        ("z^2", zsquared_map(), vec![0.8, 0.6]),
        ("random n=3 deg 3", random_harmonic_map(3, 3, 7)?, vec![0.2, 0.5, -0.3]),
    ];
    let cfg = FdConfig::default();
    for (name, u, x) in &cases {
        for q in [-2.0, -0.5, 0.5, 1.0, 2.5] {
            let exact = laplacian_modulus_power(u, x, q)?;
            let fd = fd_laplacian(modulus_power(u, q), x, &cfg)?;
            println!(
                "{name:<18} q={q:>5}: closed form {exact:>14.8e}  fd {:>14.8e}  |diff| {:.1e}",
                fd.value,
                (exact - fd.value).abs()
            );
        }
    }
    Ok(())
}
