//! Sub-mean-value check for the stretch map at `e_2`: it holds at and
//! above `q_plus = 0.75` and fails for small spheres below it.

use qharm::oracles::{submean_check, SphereQuadrature};
use qharm::polyharm::{extremal_map, Branch};

fn main() -> qharm::Result<()> {
    let u = extremal_map(2, 2.0, Branch::Stretch)?;
    let quad = SphereQuadrature::trapezoid(256);
    let x = [0.0, 1.0];
    for q in [0.4, 0.6, 0.75, 1.0, 2.0] {
        let f = |y: &[f64]| u.eval(y).iter().map(|v| v * v).sum::<f64>().powf(0.5 * q);
        for r in [0.05, 0.1, 0.2] {
            let c = submean_check(f, &x, r, &quad, 1e-12)?;
            println!(
                "q={q:<4} r={r:<4}: f(x) = {:.12}, mean = {:.12} +- {:.1e}  {}",
                c.center_value,
                c.mean.value,
                c.mean.err_est,
                if c.passed { "pass" } else { "fail" }
            );
        }
    }
    Ok(())
}
