//! Subharmonicity of `|u|^q`.
//!
//! For a harmonic map `u` and a point with `u(x) != 0`,
//!
//! ```text
//! Delta |u|^q = q |u|^(q-4) [ |u|^2 ||Du||^2 + (q - 2) |g|^2 ],
//! g_k = sum_j u_j d u_j / d x_k        (the gradient of |u|^2 / 2)
//! ```
//!
//! The bracket is where all the cancellation happens: at a sharp exponent
//! it is exactly zero while the prefactor `|u|^(q-4)` can be enormous (for
//! `K = 3, n = 4` at `q_minus = -26` on the compress map it is `3^30`). The
//! bracket is therefore formed in double-double from double-double
//! evaluations of `u` and `Du`, and only rounded at the end.
//!
//! Writing `R = |g|^2 / (|u|^2 ||Du||^2)`, the bracket is nonnegative iff
//! `q >= t(x) = 2 - 1/R`. Since `lambda_1 |u| <= |g| <= lambda_n |u|`,
//! `t(x)` always lies in `[1 - (n-1) H^2, 1 - (n-1) / H^2]` with `H` the
//! linear dilatation at `x`, which is what makes [`thresholds`] sharp.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::oracles::{fd_laplacian, numeric_jacobian, Estimate, FdConfig};
use crate::polyharm::{extremal_map, Branch, DomainSpec, HarmonicMap, DEFAULT_EPS_ZERO};
use crate::spectral::spectral_at;

/// The two critical exponents for dimension `n` and distortion `K`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPair {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: f64,
    /// `max(1 - (n-1)/K^2, 0)`; `|u|^q` is subharmonic on the whole domain
    /// for `q >= q_plus`.
    pub q_plus: f64,
    /// `1 - (n-1) K^2`; subharmonic off the zero set for `q <= q_minus`.
    pub q_minus: f64,
}

impl ThresholdPair {
    /// Inside the open gap `(q_minus, q_plus)` and not zero: the exponents
    /// for which a counterexample exists.
    pub fn in_gap(&self, q: f64) -> bool {
        q > self.q_minus && q < self.q_plus && q != 0.0
    }

    /// Exponents for which subharmonicity is guaranteed for every
    /// `K`-quasiregular harmonic map.
    pub fn guaranteed(&self, q: f64) -> bool {
        !self.in_gap(q)
    }
}

pub fn thresholds(n: usize, k: f64) -> Result<ThresholdPair> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::InvalidDistortion(k));
    }
    let m = (n - 1) as f64;
    Ok(ThresholdPair {
        n,
        k,
        q_plus: (1.0 - m / (k * k)).max(0.0),
        q_minus: 1.0 - m * (k * k),
    })
}

/// The three scalar ingredients of the Laplacian at a point, in
/// double-double.
#[derive(Clone, Copy, Debug)]
struct PointTerms {
    modulus_sq: TwoFloat,
    hs_sq: TwoFloat,
    grad_sq: TwoFloat,
}

impl PointTerms {
    fn at(u: &HarmonicMap, x: &[f64]) -> Self {
        let val = u.eval_dd(x);
        let jac = u.jacobian_dd(x);
        let zero = TwoFloat::from(0.0);
        let modulus_sq = val.iter().fold(zero, |acc, v| acc + *v * *v);
        let hs_sq = jac.iter().flatten().fold(zero, |acc, v| acc + *v * *v);
        let grad_sq = jac
            .iter()
            .map(|row| row.iter().zip(&val).fold(zero, |acc, (d, v)| acc + *d * *v))
            .fold(zero, |acc, g| acc + g * g);
        PointTerms {
            modulus_sq,
            hs_sq,
            grad_sq,
        }
    }

    fn modulus(&self) -> f64 {
        self.modulus_sq.hi().sqrt()
    }

    fn bracket(&self, q: f64) -> f64 {
        let b = self.modulus_sq * self.hs_sq + (TwoFloat::from(q) - 2.0) * self.grad_sq;
        b.hi() + b.lo()
    }

    fn laplacian(&self, q: f64) -> f64 {
        if q == 0.0 {
            return 0.0;
        }
        let b = self.bracket(q);
        if b == 0.0 {
            return 0.0;
        }
        let m2 = self.modulus_sq.hi();
        let p = m2.powf(0.5 * (q - 4.0));
        if p.is_finite() && p > 0.0 {
            q * p * b
        } else {
            // prefactor over/underflows on its own; combine in log space
            let mag = (b.abs().ln() + 0.5 * (q - 4.0) * m2.ln()).exp();
            q.signum() * b.signum() * mag
        }
    }

    fn threshold(&self) -> Result<f64> {
        if self.hs_sq.hi() == 0.0 {
            return Err(Error::ZeroDifferential);
        }
        if self.grad_sq.hi() == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        let t = TwoFloat::from(2.0) - dd_div(self.modulus_sq * self.hs_sq, self.grad_sq);
        Ok(t.hi() + t.lo())
    }
}

/// Double-double quotient by three-step long division. twofloat's own
/// division rounds its correction term to f64 and loses the low word.
fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

/// `Delta |u|^q` at `x`, excluding points with `|u(x)| <= 1e-8`.
pub fn laplacian_modulus_power(u: &HarmonicMap, x: &[f64], q: f64) -> Result<f64> {
    laplacian_modulus_power_eps(u, x, q, DEFAULT_EPS_ZERO)
}

/// `Delta |u|^q` with an explicit zero-exclusion radius. `q = 0` returns 0
/// everywhere since `|u|^0` is constant.
pub fn laplacian_modulus_power_eps(u: &HarmonicMap, x: &[f64], q: f64, eps_zero: f64) -> Result<f64> {
    if q == 0.0 {
        return Ok(0.0);
    }
    let terms = PointTerms::at(u, x);
    let modulus = terms.modulus();
    if modulus <= eps_zero {
        return Err(Error::ZeroModulus { modulus });
    }
    Ok(terms.laplacian(q))
}

/// Continuous extension of `Delta |u|^q` to zeros of `u` for `q >= 2`: zero
/// for `q > 2`, `2 ||Du||^2` at `q = 2`.
pub fn laplacian_at_zero(u: &HarmonicMap, x: &[f64], q: f64) -> Result<f64> {
    if q < 2.0 {
        return Err(Error::InvalidConfig(format!(
            "Delta |u|^q has no continuous extension to zeros of u for q = {q} < 2"
        )));
    }
    if q > 2.0 {
        return Ok(0.0);
    }
    let j = u.jacobian(x);
    Ok(2.0 * j.frobenius_sq())
}

/// The exponent `t(x) = 2 - 1/R(x)` at which `Delta |u|^q` changes sign.
///
/// For `0 < q < 2`, `Delta |u|^q >= 0` at `x` iff `q >= t(x)`; for `q < 0`
/// iff `q <= t(x)`. Returns `-inf` when the gradient of `|u|^2` vanishes.
pub fn pointwise_threshold(u: &HarmonicMap, x: &[f64]) -> Result<f64> {
    pointwise_threshold_eps(u, x, DEFAULT_EPS_ZERO)
}

pub fn pointwise_threshold_eps(u: &HarmonicMap, x: &[f64], eps_zero: f64) -> Result<f64> {
    let terms = PointTerms::at(u, x);
    let modulus = terms.modulus();
    if modulus <= eps_zero {
        return Err(Error::ZeroModulus { modulus });
    }
    terms.threshold()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub samples: usize,
    pub seed: u64,
    /// Additive violation tolerance: a point violates when `Delta < -tol`.
    pub tol: f64,
    /// Cap on the violation points stored in the report.
    pub max_violations: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 4096,
            seed: 42,
            tol: 1e-9,
            max_violations: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub point: Vec<f64>,
    pub laplacian: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubharmonicityReport {
    pub q: f64,
    pub verdict: Verdict,
    pub min_laplacian: f64,
    /// First violations in sample order, at most `max_violations`.
    pub violation_points: Vec<Violation>,
    pub violation_count: usize,
    /// Extremes of the pointwise threshold over admitted points.
    pub sup_t: Option<f64>,
    pub inf_t: Option<f64>,
    pub sampled: usize,
    pub excluded_zero: usize,
    /// Points near a zero of `u` kept (for `q >= 2`) and evaluated through
    /// the continuous extension.
    pub zero_extended: usize,
    pub excluded_degenerate: usize,
}

enum Outcome {
    ExcludedZero,
    Extended(f64),
    ExcludedDegenerate,
    Admitted { laplacian: f64, t: f64 },
}

/// Samples `Delta |u|^q` over the domain and reports violations.
///
/// Points near a zero of `u` are excluded for `q < 2` and evaluated through
/// the continuous extension for `q >= 2`; points with
/// `lambda_1 < eps_degenerate` are excluded. All exclusions are counted.
pub fn verify_on_domain(u: &HarmonicMap, dom: &DomainSpec, q: f64, opts: &VerifyOptions) -> Result<SubharmonicityReport> {
    if opts.samples == 0 {
        return Err(Error::InvalidConfig("samples must be >= 1".into()));
    }
    if opts.max_violations == 0 {
        return Err(Error::InvalidConfig("max_violations must be >= 1".into()));
    }
    if dom.dimension() != u.dimension() {
        return Err(Error::DimensionMismatch {
            expected: u.dimension(),
            got: dom.dimension(),
        });
    }
    let points = dom.sample_points(opts.samples, opts.seed);
    let outcomes: Vec<Outcome> = points
        .par_iter()
        .map(|x| {
            let terms = PointTerms::at(u, x);
            if terms.modulus() <= dom.eps_zero {
                return if q >= 2.0 {
                    Outcome::Extended(laplacian_at_zero(u, x, q).unwrap_or(0.0))
                } else {
                    Outcome::ExcludedZero
                };
            }
            if spectral_at(u, x).min_stretch < dom.eps_degenerate {
                return Outcome::ExcludedDegenerate;
            }
            Outcome::Admitted {
                laplacian: terms.laplacian(q),
                t: terms.threshold().unwrap_or(f64::NEG_INFINITY),
            }
        })
        .collect();

    let mut report = SubharmonicityReport {
        q,
        verdict: Verdict::Pass,
        min_laplacian: f64::INFINITY,
        violation_points: Vec::new(),
        violation_count: 0,
        sup_t: None,
        inf_t: None,
        sampled: opts.samples,
        excluded_zero: 0,
        zero_extended: 0,
        excluded_degenerate: 0,
    };
    for (x, outcome) in points.iter().zip(outcomes) {
        let value = match outcome {
            Outcome::ExcludedZero => {
                report.excluded_zero += 1;
                continue;
            }
            Outcome::ExcludedDegenerate => {
                report.excluded_degenerate += 1;
                continue;
            }
            Outcome::Extended(v) => {
                report.zero_extended += 1;
                v
            }
            Outcome::Admitted { laplacian, t } => {
                report.sup_t = Some(report.sup_t.map_or(t, |s| s.max(t)));
                report.inf_t = Some(report.inf_t.map_or(t, |s| s.min(t)));
                laplacian
            }
        };
        report.min_laplacian = report.min_laplacian.min(value);
        if value < -opts.tol {
            report.violation_count += 1;
            if report.violation_points.len() < opts.max_violations {
                report.violation_points.push(Violation {
                    point: x.clone(),
                    laplacian: value,
                });
            }
        }
    }
    if report.excluded_zero + report.excluded_degenerate == report.sampled {
        return Err(Error::NoData { sampled: report.sampled });
    }
    if report.violation_count > 0 {
        report.verdict = Verdict::Fail;
    }
    Ok(report)
}

/// A linear map, point and exponent at which `|u|^q` fails to be
/// subharmonic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: f64,
    pub q: f64,
    pub branch: Branch,
    pub map: HarmonicMap,
    pub point: Vec<f64>,
    /// Closed-form `Delta |u|^q` at `point`; strictly negative.
    pub laplacian_value: f64,
    /// Richardson finite-difference value of the same Laplacian.
    pub oracle: Estimate,
    /// The oracle resolves a strictly negative value.
    pub oracle_confirms: bool,
}

/// Counterexample for an exponent in the open gap: the stretch map
/// `diag(1, ..., 1, K)` for `q > 0`, the compress map
/// `diag(1, ..., 1, 1/K)` for `q < 0`, both evaluated at `e_n`.
pub fn witness(n: usize, k: f64, q: f64) -> Result<Witness> {
    let th = thresholds(n, k)?;
    if q == 0.0 {
        return Err(Error::TriviallySubharmonic);
    }
    let no_witness = || Error::NoWitnessRequired {
        q,
        q_minus: th.q_minus,
        q_plus: th.q_plus,
    };
    if !th.in_gap(q) {
        return Err(no_witness());
    }
    let branch = if q > 0.0 { Branch::Stretch } else { Branch::Compress };
    let map = extremal_map(n, k, branch)?;
    let mut point = vec![0.0; n];
    point[n - 1] = 1.0;
    let laplacian_value = laplacian_modulus_power(&map, &point, q)?;
    if !(laplacian_value < 0.0) {
        // q sits on the boundary to working precision
        return Err(no_witness());
    }
    let field = |y: &[f64]| map.eval(y).iter().map(|v| v * v).sum::<f64>().powf(0.5 * q);
    let oracle = fd_laplacian(field, &point, &FdConfig::default())?;
    let oracle_confirms = oracle.value + oracle.err_est < 0.0;
    Ok(Witness {
        n,
        k,
        q,
        branch,
        map,
        point,
        laplacian_value,
        oracle,
        oracle_confirms,
    })
}

/// Both sides of `Delta |u| = |u| ||D(u/|u|)||^2` at `x`: the closed form
/// at `q = 1`, and `|u|` times a central-difference Hilbert-Schmidt norm of
/// the differential of `u/|u|`.
pub fn modulus_laplacian_identity_check(u: &HarmonicMap, x: &[f64]) -> Result<(f64, f64)> {
    let lhs = laplacian_modulus_power(u, x, 1.0)?;
    let normalized = |y: &[f64]| {
        let v = u.eval(y);
        let m = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.into_iter().map(|a| a / m).collect::<Vec<f64>>()
    };
    let modulus = u.eval(x).iter().map(|a| a * a).sum::<f64>().sqrt();
    let scale = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    let d = numeric_jacobian(normalized, x, 1e-5 * scale);
    let hs_sq: f64 = d.iter().flatten().map(|v| v * v).sum();
    Ok((lhs, modulus * hs_sq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyharm::{identity_map, zsquared_map};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn dd_division_is_double_double() {
        let three = TwoFloat::from(3.0);
        let q = dd_div(TwoFloat::from(1.0), three);
        assert!((q * three - 1.0).hi().abs() < 1e-31);
        let a = TwoFloat::new_add(2.0, 1e-20);
        let b = TwoFloat::new_add(7.0, -3e-19);
        assert!((dd_div(a, b) * b - a).hi().abs() < 1e-30);
    }

    #[test]
    fn threshold_examples() {
        let t = thresholds(2, 2.0).unwrap();
        assert_eq!((t.q_plus, t.q_minus), (0.75, -3.0));
        let t = thresholds(3, 1.0).unwrap();
        assert_eq!((t.q_plus, t.q_minus), (0.0, -1.0));
        let t = thresholds(2, 1.0).unwrap();
        assert_eq!((t.q_plus, t.q_minus), (0.0, 0.0));
        // K <= sqrt(n - 1) leaves no positive gap
        let t = thresholds(4, 3.0_f64.sqrt()).unwrap();
        assert_eq!(t.q_plus, 0.0);
        assert_eq!(thresholds(5, 1.9).unwrap().q_plus, 0.0);
        assert!(matches!(thresholds(2, 0.5), Err(Error::InvalidDistortion(_))));
        assert!(matches!(thresholds(1, 2.0), Err(Error::InvalidDimension(1))));
        assert!(thresholds(2, f64::NAN).is_err());
    }

    #[test]
    fn gap_membership() {
        let t = thresholds(2, 2.0).unwrap();
        assert!(t.in_gap(0.5) && t.in_gap(-2.9));
        assert!(!t.in_gap(0.0) && !t.in_gap(0.75) && !t.in_gap(-3.0) && !t.in_gap(1.0));
    }

    #[test]
    fn newtonian_kernel_is_harmonic() {
        let u = identity_map(3).unwrap();
        for x in [[1.0, 0.0, 0.0], [0.3, -0.4, 1.2], [2.0, 2.0, -1.0]] {
            let v = laplacian_modulus_power(&u, &x, -1.0).unwrap();
            assert!(v.abs() < 1e-14, "{v}");
        }
    }

    #[test]
    fn stretch_closed_form_at_last_axis() {
        for n in 2..=4usize {
            for k in [1.0, 1.5, 2.0, 3.0] {
                let u = extremal_map(n, k, Branch::Stretch).unwrap();
                let mut e = vec![0.0; n];
                e[n - 1] = 1.0;
                for q in [-2.0, -0.5, 0.3, 0.9, 1.7, 3.0] {
                    let expected = q * k.powf(q - 2.0) * ((n - 1) as f64 + (q - 1.0) * k * k);
                    let v = laplacian_modulus_power(&u, &e, q).unwrap();
                    assert!(close(v, expected, 1e-13), "n={n} k={k} q={q}: {v} vs {expected}");
                }
            }
        }
    }

    #[test]
    fn q_two_reduces_to_twice_hs() {
        let u = zsquared_map();
        let x = [0.4, -1.1];
        let v = laplacian_modulus_power(&u, &x, 2.0).unwrap();
        let hs = u.jacobian(&x).frobenius_sq();
        assert!(close(v, 2.0 * hs, 1e-15));
    }

    #[test]
    fn zero_modulus_rejected() {
        let u = identity_map(2).unwrap();
        assert!(matches!(
            laplacian_modulus_power(&u, &[0.0, 0.0], 0.5),
            Err(Error::ZeroModulus { .. })
        ));
        assert!(matches!(
            pointwise_threshold(&u, &[0.0, 0.0]),
            Err(Error::ZeroModulus { .. })
        ));
        assert_eq!(laplacian_modulus_power(&u, &[0.0, 0.0], 0.0).unwrap(), 0.0);
        assert_eq!(laplacian_at_zero(&u, &[0.0, 0.0], 3.0).unwrap(), 0.0);
        assert_eq!(laplacian_at_zero(&u, &[0.0, 0.0], 2.0).unwrap(), 4.0);
        assert!(laplacian_at_zero(&u, &[0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn pointwise_threshold_examples() {
        for n in 2..=4usize {
            for k in [1.5, 2.0, 3.0] {
                let u = extremal_map(n, k, Branch::Stretch).unwrap();
                let mut e = vec![0.0; n];
                e[n - 1] = 1.0;
                let t = pointwise_threshold(&u, &e).unwrap();
                assert!(close(t, 1.0 - (n - 1) as f64 / (k * k), 1e-15));
            }
            let id = identity_map(n).unwrap();
            let t = pointwise_threshold(&id, &vec![0.7; n]).unwrap();
            assert!(close(t, 2.0 - n as f64, 1e-15));
        }
        let z = zsquared_map();
        for x in [[1.0, 0.2], [-0.3, 0.8], [2.0, -1.5]] {
            assert!(pointwise_threshold(&z, &x).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn zero_differential() {
        // constant map has Du = 0; it is harmonic though not a useful one
        let c = crate::polyharm::Polynomial::constant(2, num_rational::BigRational::from_integer(1.into()));
        let u = HarmonicMap::new(vec![c.clone(), c]).unwrap();
        assert!(matches!(pointwise_threshold(&u, &[0.5, 0.5]), Err(Error::ZeroDifferential)));
    }

    #[test]
    fn verify_examples() {
        let u = extremal_map(2, 2.0, Branch::Stretch).unwrap();
        let dom = DomainSpec::cube(vec![0.0, 1.0], 0.5).unwrap();
        let opts = VerifyOptions {
            samples: 1024,
            ..Default::default()
        };
        let r = verify_on_domain(&u, &dom, 0.75, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.min_laplacian >= -opts.tol);
        assert!(r.sup_t.unwrap() <= 0.75 + 1e-12);

        let r = verify_on_domain(&u, &dom, 0.5, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(!r.violation_points.is_empty() && r.violation_points.len() <= 16);
        // violations cluster around the x2 axis
        for v in &r.violation_points {
            assert!(v.point[0].abs() < v.point[1].abs());
        }

        let id = identity_map(3).unwrap();
        let dom3 = DomainSpec::ball(vec![0.0, 0.0, 0.0], 1.0).unwrap();
        let r = verify_on_domain(&id, &dom3, -1.5, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.min_laplacian > 0.0);
    }

    #[test]
    fn verify_counts_exclusions() {
        let u = zsquared_map();
        // tiny box around the critical point 0: |u| < 1e-8, lambda_1 < 1e-8
        let dom = DomainSpec::cube(vec![0.0, 0.0], 1e-5).unwrap();
        let opts = VerifyOptions {
            samples: 64,
            ..Default::default()
        };
        assert!(matches!(verify_on_domain(&u, &dom, 0.5, &opts), Err(Error::NoData { sampled: 64 })));
        let r = verify_on_domain(&u, &dom, 3.0, &opts).unwrap();
        assert_eq!(r.zero_extended, 64);
        assert_eq!(r.verdict, Verdict::Pass);

        // with a tiny eps_zero the critical point is excluded as degenerate instead
        let dom = DomainSpec::cube(vec![0.0, 0.0], 1e-4).unwrap().with_exclusions(1e-12, 1e-3).unwrap();
        let r = verify_on_domain(&u, &dom, 2.5, &opts).unwrap_err();
        assert!(matches!(r, Error::NoData { .. }));
    }

    #[test]
    fn verify_rejects_bad_options() {
        let u = identity_map(2).unwrap();
        let dom = DomainSpec::cube(vec![1.0, 1.0], 0.5).unwrap();
        let bad = VerifyOptions {
            samples: 0,
            ..Default::default()
        };
        assert!(verify_on_domain(&u, &dom, 1.0, &bad).is_err());
        let dom3 = DomainSpec::cube(vec![1.0, 1.0, 1.0], 0.5).unwrap();
        assert!(verify_on_domain(&u, &dom3, 1.0, &VerifyOptions::default()).is_err());
    }

    #[test]
    fn verify_deterministic() {
        let u = crate::polyharm::random_harmonic_map(3, 2, 5).unwrap();
        let dom = DomainSpec::cube(vec![0.5, 0.5, 0.5], 1.0).unwrap();
        let opts = VerifyOptions::default();
        let a = serde_json::to_string(&verify_on_domain(&u, &dom, 0.3, &opts).unwrap()).unwrap();
        let b = serde_json::to_string(&verify_on_domain(&u, &dom, 0.3, &opts).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn witness_examples() {
        let w = witness(2, 2.0, 0.5).unwrap();
        let expected = 0.5 * 2.0_f64.powf(-1.5) * (1.0 - 2.0);
        assert!(close(w.laplacian_value, expected, 1e-14));
        assert!((w.laplacian_value + 0.17678).abs() < 1e-5);
        assert_eq!(w.branch, Branch::Stretch);
        assert_eq!(w.point, vec![0.0, 1.0]);
        assert!(w.oracle_confirms);
        assert!(close(w.oracle.value, w.laplacian_value, 1e-6));

        let w = witness(3, 2.0, -3.0).unwrap();
        assert_eq!(w.branch, Branch::Compress);
        assert!(w.laplacian_value < 0.0);
        // q K^(4-q) (q - q_minus) / K^4 with q_minus = -7
        let expected = -3.0 * 2.0_f64.powf(7.0) * (4.0 / 16.0);
        assert!(close(w.laplacian_value, expected, 1e-13));
        assert!(w.oracle_confirms);

        assert!(matches!(witness(2, 2.0, 0.75), Err(Error::NoWitnessRequired { .. })));
        assert!(matches!(witness(2, 2.0, -3.0), Err(Error::NoWitnessRequired { .. })));
        assert!(matches!(witness(2, 2.0, 0.0), Err(Error::TriviallySubharmonic)));
        assert!(matches!(witness(2, 1.0, 0.1), Err(Error::NoWitnessRequired { .. })));
    }

    #[test]
    fn identity_check_examples() {
        let u = identity_map(3).unwrap();
        let (lhs, rhs) = modulus_laplacian_identity_check(&u, &[0.0, 2.0, 0.0]).unwrap();
        assert!(close(lhs, 1.0, 1e-15));
        assert!(close(rhs, 1.0, 1e-7));
        let s = extremal_map(2, 2.0, Branch::Stretch).unwrap();
        let (lhs, rhs) = modulus_laplacian_identity_check(&s, &[0.0, 1.0]).unwrap();
        assert!(close(lhs, 0.5, 1e-15));
        assert!(close(rhs, 0.5, 1e-7));
    }
}
