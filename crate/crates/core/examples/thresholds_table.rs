//! Critical exponents over a small grid of dimensions and distortions.

use qharm::subharm::thresholds;

fn main() -> qharm::Result<()> {
    println!("{:>2} {:>6} {:>10} {:>10}", "n", "K", "q_minus", "q_plus");
    for n in 2..=5 {
        for k in [1.0, 1.25, 1.5, 2.0, 3.0] {
            let th = thresholds(n, k)?;
            println!("{n:>2} {k:>6.2} {:>10.4} {:>10.4}", th.q_minus, th.q_plus);
        }
    }
    Ok(())
}
