//! Independent numerical ground truth.
//!
//! Everything here works on plain scalar or vector fields `&[f64] -> f64`.
//! Nothing in this module calls into the closed-form Laplacian or the
//! spectral code, so agreement between the two is a genuine cross-check.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    /// Base step before local scaling by `max(1, |x|)`.
    pub h: f64,
    pub richardson: bool,
    /// Number of step halvings in the Richardson tableau.
    pub max_levels: usize,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            h: 1e-3,
            richardson: true,
            max_levels: 3,
        }
    }
}

impl FdConfig {
    pub fn plain(h: f64) -> Self {
        FdConfig {
            h,
            richardson: false,
            max_levels: 1,
        }
    }

    pub fn richardson(h: f64, levels: usize) -> Self {
        FdConfig {
            h,
            richardson: true,
            max_levels: levels,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub err_est: f64,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn finite(v: f64, what: &str, x: &[f64]) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("{what} at {x:?}")))
    }
}

/// Five-point-per-axis central second difference `sum_k (f(x+he_k) +
/// f(x-he_k) - 2f(x)) / h^2`.
fn central_laplacian<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64, f0: f64) -> Result<f64> {
    let mut y = x.to_vec();
    let mut acc = 0.0;
    for k in 0..x.len() {
        y[k] = x[k] + h;
        let fp = finite(f(&y), "field", &y)?;
        y[k] = x[k] - h;
        let fm = finite(f(&y), "field", &y)?;
        y[k] = x[k];
        acc += (fp - 2.0 * f0) + fm;
    }
    Ok(acc / (h * h))
}

/// Finite-difference Laplacian of `f` at `x`.
///
/// The step is `cfg.h * max(1, |x|)`. Without Richardson the value is the
/// plain central difference and the error estimate compares it with the
/// half-step difference. With Richardson a tableau over `max_levels`
/// halvings cancels successive even powers of `h`; the estimate is the
/// change between the last two diagonal entries.
pub fn fd_laplacian<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], cfg: &FdConfig) -> Result<Estimate> {
    if !(cfg.h > 0.0) {
        return Err(Error::InvalidConfig(format!("FD step must be positive, got {}", cfg.h)));
    }
    let h0 = cfg.h * norm(x).max(1.0);
    let f0 = finite(f(x), "field", x)?;

    if !cfg.richardson || cfg.max_levels < 2 {
        let d1 = central_laplacian(&f, x, h0, f0)?;
        let d2 = central_laplacian(&f, x, 0.5 * h0, f0)?;
        return Ok(Estimate {
            value: d1,
            err_est: (d1 - d2).abs() * 4.0 / 3.0,
        });
    }

    let levels = cfg.max_levels;
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels);
    for i in 0..levels {
        let h = h0 / f64::powi(2.0, i as i32);
        let mut row = vec![central_laplacian(&f, x, h, f0)?];
        for k in 1..=i {
            let factor = f64::powi(4.0, k as i32);
            let prev = row[k - 1];
            row.push(prev + (prev - table[i - 1][k - 1]) / (factor - 1.0));
        }
        table.push(row);
    }
    let last = table[levels - 1][levels - 1];
    let before = table[levels - 2][levels - 2];
    Ok(Estimate {
        value: last,
        err_est: (last - before).abs(),
    })
}

/// Central-difference gradient.
pub fn numeric_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|k| {
            y[k] = x[k] + h;
            let fp = f(&y);
            y[k] = x[k] - h;
            let fm = f(&y);
            y[k] = x[k];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Central-difference differential of a vector field, laid out like the
/// formal differential: entry `[i][j]` approximates `d v_j / d x_i`.
pub fn numeric_jacobian<F: Fn(&[f64]) -> Vec<f64>>(f: F, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            y[i] = x[i] + h;
            let fp = f(&y);
            y[i] = x[i] - h;
            let fm = f(&y);
            y[i] = x[i];
            fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        })
        .collect()
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn fitted_order(hs: &[f64], errs: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = hs.iter().zip(errs).map(|(h, e)| (h.ln(), e.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereRule {
    /// Equispaced nodes on the circle; `n = 2` only.
    Trapezoid { nodes: usize },
    /// Uniform directions from normalized Gaussians, drawn in antithetic
    /// pairs `(v, -v)`; `samples` counts points, not pairs.
    MonteCarlo { samples: usize, seed: u64 },
}

/// A rule for the mean of a function over a sphere. Weights sum to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereQuadrature {
    pub n: usize,
    pub rule: SphereRule,
}

impl SphereQuadrature {
    /// Trapezoid with 256 nodes on the circle, otherwise 20000 Monte Carlo
    /// points.
    pub fn for_dimension(n: usize, seed: u64) -> Self {
        let rule = if n == 2 {
            SphereRule::Trapezoid { nodes: 256 }
        } else {
            SphereRule::MonteCarlo { samples: 20_000, seed }
        };
        SphereQuadrature { n, rule }
    }

    pub fn trapezoid(nodes: usize) -> Self {
        SphereQuadrature {
            n: 2,
            rule: SphereRule::Trapezoid { nodes },
        }
    }

    pub fn monte_carlo(n: usize, samples: usize, seed: u64) -> Self {
        SphereQuadrature {
            n,
            rule: SphereRule::MonteCarlo { samples, seed },
        }
    }
}

/// Neumaier-compensated sum in the order given.
fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean of `f` over the sphere `S(x, r)`.
pub fn sphere_mean<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], r: f64, quad: &SphereQuadrature) -> Result<Estimate> {
    if !(r > 0.0) {
        return Err(Error::InvalidConfig(format!("sphere radius must be positive, got {r}")));
    }
    if quad.n != x.len() {
        return Err(Error::DimensionMismatch {
            expected: quad.n,
            got: x.len(),
        });
    }
    match quad.rule {
        SphereRule::Trapezoid { nodes } => {
            if x.len() != 2 {
                return Err(Error::InvalidConfig("trapezoid rule needs n = 2".into()));
            }
            if nodes < 2 || nodes % 2 != 0 {
                return Err(Error::InvalidConfig("trapezoid node count must be even and >= 2".into()));
            }
            let mut vals = Vec::with_capacity(nodes);
            for k in 0..nodes {
                let t = 2.0 * PI * k as f64 / nodes as f64;
                let y = [x[0] + r * t.cos(), x[1] + r * t.sin()];
                vals.push(finite(f(&y), "field on sphere", &y)?);
            }
            let full = compensated_sum(vals.iter().copied()) / nodes as f64;
            let half = compensated_sum(vals.iter().step_by(2).copied()) / (nodes / 2) as f64;
            Ok(Estimate {
                value: full,
                err_est: (full - half).abs(),
            })
        }
        SphereRule::MonteCarlo { samples, seed } => {
            let pairs = samples / 2;
            if pairs < 2 {
                return Err(Error::InvalidConfig("Monte Carlo needs at least 4 samples".into()));
            }
            let n = x.len();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pair_means = Vec::with_capacity(pairs);
            let mut v = vec![0.0; n];
            let mut y = vec![0.0; n];
            for _ in 0..pairs {
                let len = loop {
                    for c in v.iter_mut() {
                        *c = StandardNormal.sample(&mut rng);
                    }
                    let l = norm(&v);
                    if l > 0.0 {
                        break l;
                    }
                };
                for k in 0..n {
                    y[k] = x[k] + r * v[k] / len;
                }
                let a = finite(f(&y), "field on sphere", &y)?;
                for k in 0..n {
                    y[k] = x[k] - r * v[k] / len;
                }
                let b = finite(f(&y), "field on sphere", &y)?;
                pair_means.push(0.5 * (a + b));
            }
            let m = pairs as f64;
            let mean = compensated_sum(pair_means.iter().copied()) / m;
            let var = compensated_sum(pair_means.iter().map(|p| (p - mean) * (p - mean))) / (m - 1.0);
            Ok(Estimate {
                value: mean,
                err_est: 3.0 * (var / m).sqrt(),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubmeanCheck {
    pub passed: bool,
    pub center_value: f64,
    pub mean: Estimate,
}

/// Sub-mean-value test: passes when `f(x) <= mean + err_est + tol`.
pub fn submean_check<F: Fn(&[f64]) -> f64>(
    f: F,
    x: &[f64],
    r: f64,
    quad: &SphereQuadrature,
    tol: f64,
) -> Result<SubmeanCheck> {
    let center_value = finite(f(x), "field", x)?;
    let mean = sphere_mean(&f, x, r, quad)?;
    Ok(SubmeanCheck {
        passed: center_value <= mean.value + mean.err_est + tol,
        center_value,
        mean,
    })
}
