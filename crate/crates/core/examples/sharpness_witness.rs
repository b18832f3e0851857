//! Witnesses across the gap for `n = 3, K = 2`, each confirmed by the
//! finite-difference oracle.

use qharm::subharm::{thresholds, witness};

fn main() -> qharm::Result<()> {
    let (n, k) = (3, 2.0);
    let th = thresholds(n, k)?;
    println!("gap ({}, {})", th.q_minus, th.q_plus);
    for q in [-6.5, -3.0, -0.1, 0.1, 0.25, 0.49] {
        let w = witness(n, k, q)?;
        println!(
            "q = {q:>5}: {:?} at {:?}, Delta = {:.6e}, oracle {:.6e} (confirms: {})",
            w.branch, w.point, w.laplacian_value, w.oracle.value, w.oracle_confirms
        );
    }
    for q in [th.q_minus, 0.0, th.q_plus] {
        println!("q = {q}: {}", witness(n, k, q).unwrap_err());
    }
    Ok(())
}
