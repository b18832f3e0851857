//! Domain verification of `|u|^q` for the stretch map on either side of
//! `q_plus`.

use qharm::polyharm::{extremal_map, Branch, DomainSpec};
use qharm::subharm::{thresholds, verify_on_domain, VerifyOptions};

fn main() -> qharm::Result<()> {
    let (n, k) = (2, 2.0);
    let th = thresholds(n, k)?;
    let u = extremal_map(n, k, Branch::Stretch)?;
    let dom: DomainSpec = "box:0,1:0.5".parse()?;
    let opts = VerifyOptions::default();
    for q in [0.25, 0.5, 0.7, th.q_plus, 1.0] {
        let r = verify_on_domain(&u, &dom, q, &opts)?;
        println!(
            "q = {q:<5} {:?}: min Delta {:>11.4e}, {} violations, sup t {:.6}",
            r.verdict,
            r.min_laplacian,
            r.violation_count,
            r.sup_t.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
