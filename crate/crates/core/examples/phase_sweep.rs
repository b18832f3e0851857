//! `(n, K, q)` sweep written as CSV. Pass a path to write there instead of
//! stdout.

use std::fs::File;
use std::io;

use qharm::explorer::{sweep, SweepConfig};

fn main() -> qharm::Result<()> {
    let cfg = SweepConfig {
        samples: 256,
        ..SweepConfig::new(vec![2, 3], vec![1.0, 1.5, 2.0])
    };
    let table = sweep(&cfg)?;
    match std::env::args().nth(1) {
        Some(path) => table.write_csv(File::create(path)?)?,
        None => table.write_csv(io::stdout().lock())?,
    }
    let failing = table.rows.iter().filter(|r| r.witness_delta.is_some()).count();
    eprintln!("{} rows, {failing} inside the gap, {} violations", table.rows.len(), table.violations());
    Ok(())
}
