//! Sharp exponents located by bisection on the sign of the Laplacian,
//! next to the threshold formulas.

use qharm::explorer::gap_bisection;
use qharm::polyharm::Branch;
use qharm::subharm::thresholds;

fn main() -> qharm::Result<()> {
    for n in [2, 3, 4] {
        for k in [1.25, 1.5, 2.0, 3.0, 5.0] {
            let th = thresholds(n, k)?;
            let plus = gap_bisection(Branch::Stretch, n, k, 256)?;
            let minus = gap_bisection(Branch::Compress, n, k, 256)?;
            println!(
                "n={n} K={k:<4}: q_plus {plus:>10.7} ({:>10.7})  q_minus {minus:>11.7} ({:>11.7})",
                th.q_plus, th.q_minus
            );
        }
    }
    Ok(())
}
