//! Command-line front end for the `qharm` binary.
//!
//! Exit codes: 0 success, 1 verification found violations, 2 invalid input,
//! 3 closed form and finite-difference oracle disagree, 4 no witness exists
//! for the requested exponent, 5 a sweep row failed where
//! subharmonicity is guaranteed.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::explorer::{format_real, sweep, OutputFormat, SweepConfig, SweepTable};
use crate::oracles::{fd_laplacian, FdConfig};
use crate::polyharm::{extremal_map, identity_map, parse_vector, zsquared_map, Branch, DomainSpec, HarmonicMap};
use crate::subharm::{laplacian_modulus_power, thresholds, verify_on_domain, witness, Verdict, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_ORACLE_MISMATCH: i32 = 3;
pub const EXIT_NO_WITNESS: i32 = 4;
pub const EXIT_SWEEP_VIOLATION: i32 = 5;

/// Largest accepted gap between the closed form and the oracle.
pub const ORACLE_AGREEMENT: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "qharm", version, about = "Subharmonicity exponents of |u|^q for quasiregular harmonic maps")]
pub struct Cli {
    /// Sampling seed [default: 42]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of sample points [default: 4096]
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Violation tolerance on the Laplacian
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Output format [default: text; sweep follows its config]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical exponents q_plus and q_minus for dimension n and distortion K
    Thresholds {
        #[arg(long)]
        n: usize,
        #[arg(long = "K")]
        k: f64,
    },
    /// Closed-form Delta |u|^q at a point
    Laplacian {
        /// Map JSON file or builtin: identity[:n], stretch:n,K, compress:n,K, zsquared
        #[arg(long)]
        map: String,
        /// Comma-separated coordinates
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        /// Also compute a Richardson finite-difference value
        #[arg(long)]
        oracle: bool,
    },
    /// Sample Delta |u|^q over a domain and report violations
    Verify {
        #[arg(long)]
        map: String,
        /// box:<c1,...,cn>:<half_width> or ball:<c1,...,cn>:<radius>
        #[arg(long, allow_hyphen_values = true)]
        domain: String,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        /// Zero-exclusion radius for |u|
        #[arg(long, default_value_t = 1e-8)]
        eps_zero: f64,
        /// Exclusion threshold for the minimal stretch
        #[arg(long, default_value_t = 1e-8)]
        eps_degenerate: f64,
    },
    /// Linear counterexample for an exponent inside the gap
    Witness {
        #[arg(long)]
        n: usize,
        #[arg(long = "K")]
        k: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
    },
    /// Phase-diagram sweep from a JSON config
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    match dispatch(&cli) {
        Ok((text, code)) => match emit(&cli, &text) {
            Ok(()) => code,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INVALID
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NoWitnessRequired { .. } | Error::TriviallySubharmonic => EXIT_NO_WITNESS,
                _ => EXIT_INVALID,
            }
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("QHARM_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("QHARM_THREADS must be a nonnegative integer, got '{v}'")))?;
    if threads > 0 {
        // a pool may already exist when run() is called twice in-process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Ok(())
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Resolves a builtin map name or reads a map JSON file. `dim` supplies the
/// dimension for a bare `identity`.
pub fn load_map(spec: &str, dim: usize) -> Result<HarmonicMap> {
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let nums = || -> Result<Vec<f64>> { parse_vector(args) };
    let n_k = || -> Result<(usize, f64)> {
        let v = nums()?;
        if v.len() != 2 || v[0].fract() != 0.0 || v[0] < 0.0 {
            return Err(Error::InvalidConfig(format!("builtin '{spec}' expects <n>,<K>")));
        }
        Ok((v[0] as usize, v[1]))
    };
    match name {
        "identity" if args.is_empty() => identity_map(dim),
        "identity" => {
            let n: usize = args
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("builtin '{spec}' expects identity:<n>")))?;
            identity_map(n)
        }
        "stretch" => {
            let (n, k) = n_k()?;
            extremal_map(n, k, Branch::Stretch)
        }
        "compress" => {
            let (n, k) = n_k()?;
            extremal_map(n, k, Branch::Compress)
        }
        "zsquared" => Ok(zsquared_map()),
        _ => {
            let text = fs::read_to_string(spec)
                .map_err(|e| Error::InvalidConfig(format!("cannot read map file '{spec}': {e}")))?;
            HarmonicMap::from_json_str(&text).map_err(|e| match e {
                Error::Json(j) => Error::Schema(format!("{spec}: {j}")),
                other => other,
            })
        }
    }
}

fn check_dimension(u: &HarmonicMap, got: usize) -> Result<()> {
    if u.dimension() != got {
        return Err(Error::DimensionMismatch {
            expected: u.dimension(),
            got,
        });
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(String, i32)> {
    let fmt = cli.format.unwrap_or(Format::Text);
    match &cli.command {
        Command::Thresholds { n, k } => {
            let th = thresholds(*n, *k)?;
            let gap = if th.q_plus > th.q_minus {
                Some([th.q_minus, th.q_plus])
            } else {
                None
            };
            let text = match fmt {
                Format::Json => json!({"n": th.n, "K": th.k, "q_plus": th.q_plus, "q_minus": th.q_minus, "gap": gap})
                    .to_string()
                    + "\n",
                Format::Csv => format!(
                    "n,K,q_plus,q_minus\n{},{},{},{}\n",
                    th.n,
                    format_real(th.k),
                    format_real(th.q_plus),
                    format_real(th.q_minus)
                ),
                Format::Text => {
                    let mut s = format!("q_plus = {}\nq_minus = {}\n", th.q_plus, th.q_minus);
                    match gap {
                        Some([a, b]) => writeln!(s, "gap = ({a}, {b}) without 0").unwrap(),
                        None => s.push_str("gap = empty\n"),
                    }
                    s
                }
            };
            Ok((text, EXIT_OK))
        }
        Command::Laplacian { map, point, q, oracle } => {
            let x = parse_vector(point)?;
            let u = load_map(map, x.len())?;
            check_dimension(&u, x.len())?;
            let value = laplacian_modulus_power(&u, &x, *q)?;
            let fd = if *oracle {
                let field = |y: &[f64]| u.eval(y).iter().map(|v| v * v).sum::<f64>().powf(0.5 * q);
                Some(fd_laplacian(field, &x, &FdConfig::default())?)
            } else {
                None
            };
            let diff = fd.map(|e| (value - e.value).abs());
            let code = match diff {
                Some(d) if !(d <= ORACLE_AGREEMENT) => EXIT_ORACLE_MISMATCH,
                _ => EXIT_OK,
            };
            let text = match fmt {
                Format::Json => json!({
                    "q": q,
                    "point": x,
                    "laplacian": value,
                    "oracle": fd.map(|e| json!({"value": e.value, "err_est": e.err_est})),
                    "difference": diff,
                })
                .to_string()
                    + "\n",
                Format::Csv => {
                    let mut s = String::from("q,laplacian,oracle,oracle_err,difference\n");
                    let opt = |v: Option<f64>| v.map(format_real).unwrap_or_default();
                    writeln!(
                        s,
                        "{},{},{},{},{}",
                        format_real(*q),
                        format_real(value),
                        opt(fd.map(|e| e.value)),
                        opt(fd.map(|e| e.err_est)),
                        opt(diff)
                    )
                    .unwrap();
                    s
                }
                Format::Text => {
                    let mut s = format!("laplacian = {value}\n");
                    if let (Some(e), Some(d)) = (fd, diff) {
                        writeln!(s, "oracle = {} (err_est {:e})\ndifference = {d:e}", e.value, e.err_est).unwrap();
                    }
                    s
                }
            };
            Ok((text, code))
        }
        Command::Verify {
            map,
            domain,
            q,
            eps_zero,
            eps_degenerate,
        } => {
            let dom: DomainSpec = domain.parse()?;
            let dom = dom.with_exclusions(*eps_zero, *eps_degenerate)?;
            let u = load_map(map, dom.dimension())?;
            let opts = VerifyOptions {
                samples: cli.samples.unwrap_or(4096),
                seed: cli.seed.unwrap_or(42),
                tol: cli.tol,
                ..Default::default()
            };
            let r = verify_on_domain(&u, &dom, *q, &opts)?;
            let code = if r.verdict == Verdict::Pass { EXIT_OK } else { EXIT_VIOLATIONS };
            let verdict = if code == EXIT_OK { "pass" } else { "fail" };
            let opt = |v: Option<f64>| v.map(format_real).unwrap_or_default();
            let text = match fmt {
                Format::Json => serde_json::to_string_pretty(&r)? + "\n",
                Format::Csv => format!(
                    "q,verdict,min_laplacian,violation_count,sup_t,inf_t,sampled,excluded_zero,zero_extended,excluded_degenerate\n{},{verdict},{},{},{},{},{},{},{},{}\n",
                    format_real(r.q),
                    format_real(r.min_laplacian),
                    r.violation_count,
                    opt(r.sup_t),
                    opt(r.inf_t),
                    r.sampled,
                    r.excluded_zero,
                    r.zero_extended,
                    r.excluded_degenerate
                ),
                Format::Text => {
                    let mut s = format!(
                        "verdict = {verdict}\nmin_laplacian = {}\nviolations = {}\nsup_t = {}\ninf_t = {}\nsampled = {} (excluded: {} near zeros, {} degenerate; {} zeros extended)\n",
                        r.min_laplacian,
                        r.violation_count,
                        opt(r.sup_t),
                        opt(r.inf_t),
                        r.sampled,
                        r.excluded_zero,
                        r.excluded_degenerate,
                        r.zero_extended
                    );
                    for v in &r.violation_points {
                        writeln!(s, "  violation at {:?}: {}", v.point, v.laplacian).unwrap();
                    }
                    s
                }
            };
            Ok((text, code))
        }
        Command::Witness { n, k, q } => {
            let w = witness(*n, *k, *q)?;
            let text = match fmt {
                Format::Json => serde_json::to_string_pretty(&w)? + "\n",
                Format::Csv => format!(
                    "n,K,q,branch,laplacian,oracle,oracle_err,oracle_confirms\n{},{},{},{},{},{},{},{}\n",
                    w.n,
                    format_real(w.k),
                    format_real(w.q),
                    branch_name(w.branch),
                    format_real(w.laplacian_value),
                    format_real(w.oracle.value),
                    format_real(w.oracle.err_est),
                    w.oracle_confirms
                ),
                Format::Text => format!(
                    "branch = {}\npoint = {:?}\nlaplacian = {}\noracle = {} (err_est {:e}, confirms: {})\n",
                    branch_name(w.branch),
                    w.point,
                    w.laplacian_value,
                    w.oracle.value,
                    w.oracle.err_est,
                    w.oracle_confirms
                ),
            };
            Ok((text, EXIT_OK))
        }
        Command::Sweep { config } => {
            let raw = fs::read_to_string(config)
                .map_err(|e| Error::InvalidConfig(format!("cannot read config '{}': {e}", config.display())))?;
            let mut cfg = SweepConfig::from_json_str(&raw)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(s) = cli.samples {
                cfg.samples = s;
            }
            match cli.format {
                Some(Format::Json) => cfg.format = OutputFormat::Json,
                Some(Format::Csv) => cfg.format = OutputFormat::Csv,
                _ => {}
            }
            let table = sweep(&cfg)?;
            let text = if cli.format == Some(Format::Text) {
                sweep_text(&table)
            } else {
                table.render()?
            };
            let code = if table.violations() > 0 { EXIT_SWEEP_VIOLATION } else { EXIT_OK };
            if code != EXIT_OK {
                eprintln!("error: {} violations where subharmonicity is guaranteed", table.violations());
            }
            Ok((text, code))
        }
    }
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Stretch => "stretch",
        Branch::Compress => "compress",
    }
}

fn sweep_text(table: &SweepTable) -> String {
    let mut s = format!(
        "{:>3} {:>8} {:>12} {:>10} {:>10} {:>8} {:>8} {:>14}\n",
        "n", "K", "q", "q_plus", "q_minus", "extremal", "ensemble", "witness"
    );
    for r in &table.rows {
        let ext = if r.extremal_verdict == Verdict::Pass { "pass" } else { "fail" };
        let ens = serde_json::to_value(&r.ensemble_verdict)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        let wit = r.witness_delta.map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into());
        writeln!(
            s,
            "{:>3} {:>8.4} {:>12.6} {:>10.6} {:>10.6} {:>8} {:>8} {:>14}",
            r.n, r.k, r.q, r.q_plus, r.q_minus, ext, ens, wit
        )
        .unwrap();
    }
    s
}
