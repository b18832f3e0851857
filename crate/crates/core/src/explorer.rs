//! Parameter-space studies over `(n, K, q)`.

use std::io::Write;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::FromPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyharm::{
    coefficient_mass, extremal_map, linear_map_exact, random_harmonic_map, Branch, DomainSpec, HarmonicMap,
};
use crate::spectral::{global_distortion, spectral_at};
use crate::subharm::{
    laplacian_modulus_power, pointwise_threshold_eps, thresholds, verify_on_domain, witness, SubharmonicityReport,
    ThresholdPair, Verdict, VerifyOptions,
};

/// Slack allowed when checking ensemble exponents against the thresholds of
/// their own empirical dilatation.
pub const ENSEMBLE_SLACK: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalExponents {
    pub sup_t: f64,
    pub inf_t: f64,
    /// Largest linear dilatation `lambda_n / lambda_1` over the same points.
    pub k_emp: f64,
    pub admitted: usize,
}

/// Extremes of the pointwise threshold over the admitted sample points of
/// `dom` (away from zeros of `u` and from points with small `lambda_1`).
pub fn empirical_critical_exponents(u: &HarmonicMap, dom: &DomainSpec, samples: usize, seed: u64) -> Result<EmpiricalExponents> {
    if dom.dimension() != u.dimension() {
        return Err(Error::DimensionMismatch {
            expected: u.dimension(),
            got: dom.dimension(),
        });
    }
    let points = dom.sample_points(samples, seed);
    let per_point: Vec<Option<(f64, f64)>> = points
        .par_iter()
        .map(|x| {
            let sd = spectral_at(u, x);
            if sd.min_stretch < dom.eps_degenerate {
                return None;
            }
            let t = pointwise_threshold_eps(u, x, dom.eps_zero).ok()?;
            Some((t, sd.linear_dilatation()))
        })
        .collect();
    let mut out = EmpiricalExponents {
        sup_t: f64::NEG_INFINITY,
        inf_t: f64::INFINITY,
        k_emp: 1.0,
        admitted: 0,
    };
    for (t, h) in per_point.into_iter().flatten() {
        out.sup_t = out.sup_t.max(t);
        out.inf_t = out.inf_t.min(t);
        out.k_emp = out.k_emp.max(h);
        out.admitted += 1;
    }
    if out.admitted == 0 {
        return Err(Error::NoData { sampled: samples });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QGrid {
    /// Guaranteed points at and around both thresholds and zero, plus
    /// `points_per_gap` equispaced points strictly inside the gap.
    Auto { points_per_gap: usize, margin: f64 },
    Explicit(Vec<f64>),
}

impl Default for QGrid {
    fn default() -> Self {
        QGrid::Auto {
            points_per_gap: 5,
            margin: 0.5,
        }
    }
}

impl QGrid {
    pub fn points(&self, th: &ThresholdPair) -> Vec<f64> {
        let mut qs = match self {
            QGrid::Explicit(v) => v.clone(),
            QGrid::Auto { points_per_gap, margin } => {
                let (lo, hi) = (th.q_minus, th.q_plus);
                let mut v = vec![lo - margin, lo, hi, hi + margin];
                if lo < 0.0 {
                    v.extend([0.5 * lo, 1e-3 * lo]);
                }
                if hi > 0.0 {
                    v.extend([0.5 * hi, 1e-3 * hi]);
                }
                if hi > lo {
                    let step = (hi - lo) / (*points_per_gap as f64 + 1.0);
                    for i in 1..=*points_per_gap {
                        let q = lo + i as f64 * step;
                        // zero is trivially subharmonic; keep the point in the gap
                        v.push(if q == 0.0 { 0.5 * step } else { q });
                    }
                }
                v
            }
        };
        qs.sort_by(f64::total_cmp);
        qs.dedup();
        qs
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

fn default_samples() -> usize {
    512
}
fn default_seed() -> u64 {
    42
}
fn default_half_width() -> f64 {
    0.5
}
fn default_ensemble_size() -> usize {
    4
}
fn default_ensemble_degree() -> u32 {
    3
}
fn default_perturbation() -> f64 {
    0.05
}
fn default_tol() -> f64 {
    1e-9
}
fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

/// Sweep configuration, read from JSON. Everything except the two value
/// lists has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    #[serde(rename = "K_values")]
    pub k_values: Vec<f64>,
    #[serde(default)]
    pub q_grid: QGrid,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Half-width of the sampling box centered at `e_n`.
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_ensemble_size")]
    pub ensemble_size: usize,
    #[serde(default = "default_ensemble_degree")]
    pub ensemble_degree: u32,
    /// Relative size of the nonlinear part of each ensemble map.
    #[serde(default = "default_perturbation")]
    pub ensemble_perturbation: f64,
    /// Record per-row wall time in milliseconds. Off by default so that
    /// output files are reproducible byte for byte.
    #[serde(default)]
    pub timing: bool,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

impl SweepConfig {
    pub fn new(n_values: Vec<usize>, k_values: Vec<f64>) -> Self {
        SweepConfig {
            n_values,
            k_values,
            q_grid: QGrid::default(),
            samples: default_samples(),
            seed: default_seed(),
            tol: default_tol(),
            half_width: default_half_width(),
            ensemble_size: default_ensemble_size(),
            ensemble_degree: default_ensemble_degree(),
            ensemble_perturbation: default_perturbation(),
            timing: false,
            format: default_format(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_values.is_empty() || self.k_values.is_empty() {
            return bad("n_values and K_values must be non-empty".into());
        }
        for &n in &self.n_values {
            if n < 2 {
                return Err(Error::InvalidDimension(n));
            }
        }
        for &k in &self.k_values {
            if !(k >= 1.0) || !k.is_finite() {
                return Err(Error::InvalidDistortion(k));
            }
        }
        if self.samples == 0 {
            return bad("samples must be >= 1".into());
        }
        if !(self.half_width > 0.0 && self.half_width < 1.0) {
            // the box must stay away from the zero of the extremal maps
            return bad(format!("half_width must lie in (0, 1), got {}", self.half_width));
        }
        if !(self.tol >= 0.0) {
            return bad(format!("tol must be nonnegative, got {}", self.tol));
        }
        if !(self.ensemble_perturbation >= 0.0) || self.ensemble_degree == 0 {
            return bad("ensemble_perturbation must be >= 0 and ensemble_degree >= 1".into());
        }
        match &self.q_grid {
            QGrid::Auto { points_per_gap, margin } => {
                if *points_per_gap < 3 {
                    return bad(format!("points_per_gap must be >= 3, got {points_per_gap}"));
                }
                if !(*margin > 0.0) {
                    return bad(format!("margin must be positive, got {margin}"));
                }
            }
            QGrid::Explicit(qs) => {
                if qs.iter().any(|q| !q.is_finite()) {
                    return bad("q_grid values must be finite".into());
                }
                for &n in &self.n_values {
                    for &k in &self.k_values {
                        let th = thresholds(n, k)?;
                        let inside = qs.iter().filter(|&&q| th.in_gap(q)).count();
                        if th.q_plus > th.q_minus && inside < 3 {
                            return bad(format!(
                                "q_grid has {inside} points inside the gap ({}, {}) for n={n}, K={k}; need >= 3",
                                th.q_minus, th.q_plus
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn domain(&self, n: usize) -> DomainSpec {
        let mut c = vec![0.0; n];
        c[n - 1] = 1.0;
        DomainSpec::cube(c, self.half_width).expect("validated half_width")
    }

    fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            samples: self.samples,
            seed: self.seed,
            tol: self.tol,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleVerdict {
    Pass,
    Fail,
    /// No candidate map met the dilatation filter.
    None,
}

impl EnsembleVerdict {
    fn as_str(&self) -> &'static str {
        match self {
            EnsembleVerdict::Pass => "pass",
            EnsembleVerdict::Fail => "fail",
            EnsembleVerdict::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub seed: u64,
    pub k_emp: f64,
    pub exponents: EmpiricalExponents,
    /// `q_minus(n, k_emp) - slack <= inf_t <= sup_t <= q_plus(n, k_emp) + slack`.
    pub within_bounds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowReports {
    pub stretch: SubharmonicityReport,
    pub compress: SubharmonicityReport,
    pub ensemble: Vec<SubharmonicityReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: f64,
    pub q: f64,
    pub q_plus: f64,
    pub q_minus: f64,
    pub extremal_verdict: Verdict,
    pub ensemble_verdict: EnsembleVerdict,
    pub witness_delta: Option<f64>,
    pub ms: Option<f64>,
    /// `q` lies outside the open gap, so every map must pass.
    pub guaranteed: bool,
    pub reports: RowReports,
}

impl SweepRow {
    /// A failure where subharmonicity is guaranteed.
    pub fn is_violation(&self) -> bool {
        self.guaranteed && (self.extremal_verdict == Verdict::Fail || self.ensemble_verdict == EnsembleVerdict::Fail)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: f64,
    pub members: Vec<EnsembleMember>,
    pub rejected: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub ensembles: Vec<EnsembleSummary>,
}

pub const CSV_HEADER: [&str; 9] = [
    "n",
    "K",
    "q",
    "q_plus",
    "q_minus",
    "extremal_verdict",
    "ensemble_verdict",
    "witness_delta",
    "ms",
];

/// Reals in tabular output: 17 significant digits.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

impl SweepTable {
    /// Rows that fail where the theorem guarantees a pass, plus ensemble
    /// maps whose exponents escape their own thresholds.
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.is_violation()).count()
            + self
                .ensembles
                .iter()
                .flat_map(|e| &e.members)
                .filter(|m| !m.within_bounds)
                .count()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        wr.write_record(CSV_HEADER)?;
        for r in &self.rows {
            let verdict = match r.extremal_verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
            };
            wr.write_record([
                r.n.to_string(),
                format_real(r.k),
                format_real(r.q),
                format_real(r.q_plus),
                format_real(r.q_minus),
                verdict.to_string(),
                r.ensemble_verdict.as_str().to_string(),
                r.witness_delta.map(format_real).unwrap_or_default(),
                r.ms.map(format_real).unwrap_or_default(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is ascii"))
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn render(&self) -> Result<String> {
        match self.config.format {
            OutputFormat::Csv => self.to_csv_string(),
            OutputFormat::Json => self.to_json_string().map(|s| s + "\n"),
        }
    }
}

/// Accepted maps with their summaries, and the number of rejected candidates.
type Ensemble = (Vec<(HarmonicMap, EnsembleMember)>, usize);

fn mix_seed(seed: u64, n: usize, k_index: usize) -> u64 {
    seed ^ ((n as u64) << 48) ^ ((k_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Candidate ensemble maps: a diagonal linear map `diag(1, ..., 1, s^(+-1))`
/// with `s` uniform in `[1, K]`, plus a random harmonic polynomial map
/// rescaled to relative size `ensemble_perturbation`. Candidates whose
/// empirical dilatation on the sweep domain exceeds `K` are rejected.
fn build_ensemble(cfg: &SweepConfig, n: usize, k: f64, k_index: usize) -> Result<Ensemble> {
    let dom = cfg.domain(n);
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, n, k_index));
    let mut kept = Vec::new();
    let mut rejected = 0;
    let max_attempts = 8 * cfg.ensemble_size;
    for _ in 0..max_attempts {
        if kept.len() == cfg.ensemble_size {
            break;
        }
        let s: f64 = rng.gen_range(1.0..=k);
        let stretch: bool = rng.gen();
        let member_seed: u64 = rng.gen();
        let last = if stretch { s } else { 1.0 / s };
        let one = BigRational::from_integer(1.into());
        let zero = BigRational::from_integer(0.into());
        let a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match (i == j, j == n - 1) {
                        (true, true) => BigRational::from_f64(last).expect("finite"),
                        (true, false) => one.clone(),
                        _ => zero.clone(),
                    })
                    .collect()
            })
            .collect();
        let base = linear_map_exact(&a)?;
        let noise = random_harmonic_map(n, cfg.ensemble_degree, member_seed)?;
        let scale = cfg.ensemble_perturbation / coefficient_mass(&noise);
        let map = base.plus(&noise.scaled(&BigRational::from_f64(scale).expect("finite")))?;
        let dist = match global_distortion(&map, &dom, cfg.samples, cfg.seed) {
            Ok(d) => d,
            Err(Error::NoData { .. }) => {
                rejected += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        if dist.h_linear > k || dist.reversed_count > 0 {
            rejected += 1;
            continue;
        }
        let exponents = empirical_critical_exponents(&map, &dom, cfg.samples, cfg.seed)?;
        let own = thresholds(n, exponents.k_emp)?;
        let within_bounds = exponents.inf_t >= own.q_minus - ENSEMBLE_SLACK && exponents.sup_t <= own.q_plus + ENSEMBLE_SLACK;
        kept.push((
            map,
            EnsembleMember {
                seed: member_seed,
                k_emp: exponents.k_emp,
                exponents,
                within_bounds,
            },
        ));
    }
    Ok((kept, rejected))
}

/// Runs the full `(n, K, q)` sweep. Rows come out in `n`-major, then `K`,
/// then ascending `q` order regardless of scheduling.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for &n in &cfg.n_values {
        for (ki, &k) in cfg.k_values.iter().enumerate() {
            cells.push((n, ki, k));
        }
    }
    let built: Vec<Result<Ensemble>> = cells
        .par_iter()
        .map(|&(n, ki, k)| build_ensemble(cfg, n, k, ki))
        .collect();
    let mut ensembles = Vec::with_capacity(cells.len());
    let mut maps = Vec::with_capacity(cells.len());
    for (&(n, _, k), b) in cells.iter().zip(built) {
        let (kept, rejected) = b?;
        let (ms, members): (Vec<_>, Vec<_>) = kept.into_iter().unzip();
        maps.push(ms);
        ensembles.push(EnsembleSummary { n, k, members, rejected });
    }

    let mut specs = Vec::new();
    for (ci, &(n, _, k)) in cells.iter().enumerate() {
        let th = thresholds(n, k)?;
        for q in cfg.q_grid.points(&th) {
            specs.push((ci, th, q));
        }
    }
    let opts = cfg.verify_options();
    let rows: Vec<Result<SweepRow>> = specs
        .par_iter()
        .map(|&(ci, th, q)| {
            let start = Instant::now();
            let n = th.n;
            let dom = cfg.domain(n);
            let stretch = verify_on_domain(&extremal_map(n, th.k, Branch::Stretch)?, &dom, q, &opts)?;
            let compress = verify_on_domain(&extremal_map(n, th.k, Branch::Compress)?, &dom, q, &opts)?;
            let ensemble = maps[ci]
                .iter()
                .map(|m| verify_on_domain(m, &dom, q, &opts))
                .collect::<Result<Vec<_>>>()?;
            let extremal_verdict = if stretch.verdict == Verdict::Fail || compress.verdict == Verdict::Fail {
                Verdict::Fail
            } else {
                Verdict::Pass
            };
            let ensemble_verdict = if ensemble.is_empty() {
                EnsembleVerdict::None
            } else if ensemble.iter().any(|r| r.verdict == Verdict::Fail) {
                EnsembleVerdict::Fail
            } else {
                EnsembleVerdict::Pass
            };
            let witness_delta = match witness(n, th.k, q) {
                Ok(w) => Some(w.laplacian_value),
                Err(Error::NoWitnessRequired { .. } | Error::TriviallySubharmonic) => None,
                Err(e) => return Err(e),
            };
            let ms = cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
            Ok(SweepRow {
                n,
                k: th.k,
                q,
                q_plus: th.q_plus,
                q_minus: th.q_minus,
                extremal_verdict,
                ensemble_verdict,
                witness_delta,
                ms,
                guaranteed: th.guaranteed(q),
                reports: RowReports {
                    stretch,
                    compress,
                    ensemble,
                },
            })
        })
        .collect();
    Ok(SweepTable {
        config: cfg.clone(),
        rows: rows.into_iter().collect::<Result<Vec<_>>>()?,
        ensembles,
    })
}

/// Locates the sharp exponent of an extremal branch by bisection on the
/// sign of `Delta |u|^q`, independently of the threshold formulas.
///
/// A value of `q` counts as violating when the Laplacian is negative at
/// `e_n` or at any of `samples` points of the unit sphere. The stretch
/// branch returns the smallest nonviolating `q` in `[0, 1)`, the compress
/// branch the largest nonviolating `q <= 0`.
pub fn gap_bisection(branch: Branch, n: usize, k: f64, samples: usize) -> Result<f64> {
    let u = extremal_map(n, k, branch)?;
    let mut probes = vec![vec![0.0; n]];
    probes[0][n - 1] = 1.0;
    let cube = DomainSpec::cube(vec![0.0; n], 1.0)?;
    for x in cube.sample_points(samples, 0) {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > 1e-3 {
            probes.push(x.iter().map(|v| v / r).collect());
        }
    }
    let violated = |q: f64| -> Result<bool> {
        for x in &probes {
            if laplacian_modulus_power(&u, x, q)? < 0.0 {
                return Ok(true);
            }
        }
        Ok(false)
    };
    const WIDTH: f64 = 1e-10;
    match branch {
        Branch::Stretch => {
            // find a violating exponent just above zero, if any
            let mut bad = 0.5;
            while !violated(bad)? {
                bad *= 0.5;
                if bad < 1e-12 {
                    return Ok(0.0);
                }
            }
            let mut good = 1.0;
            while good - bad > WIDTH {
                let mid = 0.5 * (good + bad);
                if violated(mid)? {
                    bad = mid;
                } else {
                    good = mid;
                }
            }
            Ok(good)
        }
        Branch::Compress => {
            let mut bad = -0.5;
            while !violated(bad)? {
                bad *= 0.5;
                if bad > -1e-12 {
                    return Ok(0.0);
                }
            }
            let mut good = 2.0 * bad;
            while violated(good)? {
                bad = good;
                good *= 2.0;
            }
            while bad - good > WIDTH {
                let mid = 0.5 * (good + bad);
                if violated(mid)? {
                    bad = mid;
                } else {
                    good = mid;
                }
            }
            Ok(good)
        }
    }
}
