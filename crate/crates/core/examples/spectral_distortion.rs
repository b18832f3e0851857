//! Singular values and the two distortion constants of a few maps.

use qharm::linalg::Matrix;
use qharm::polyharm::{linear_map, random_harmonic_map, zsquared_map, DomainSpec};
use qharm::spectral::{distortion_at, global_distortion, spectral_at};

fn main() -> qharm::Result<()> {
    let a = Matrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![0.0, 1.0, 0.5], vec![0.0, 0.0, 1.5]]);
    let u = linear_map(&a)?;
    let sd = spectral_at(&u, &[0.1, 0.2, 0.3]);
    let d = distortion_at(&sd)?;
    println!("singular values {:?}", sd.lambdas);
    println!("det {:.6}  product {:.6}", sd.jac_det, sd.lambdas.iter().product::<f64>());
    println!("H = {:.6}  K_OI = {:.6}", d.h_linear, d.k_outer_inner);

    let z = zsquared_map();
    let dom = DomainSpec::cube(vec![1.0, 1.0], 0.5)?;
    let g = global_distortion(&z, &dom, 1024, 42)?;
    println!("z^2 on {dom}: H = {:.12}", g.h_linear);

    let r = random_harmonic_map(3, 2, 9)?;
    let dom = DomainSpec::ball(vec![0.5, 0.5, 0.5], 0.25)?;
    let g = global_distortion(&r, &dom, 2048, 42)?;
    println!(
        "random map on {dom}: H = {:.4}, K_OI = {:.4}, excluded {}, reversed {}",
        g.h_linear, g.k_outer_inner, g.excluded_count, g.reversed_count
    );
    Ok(())
}
