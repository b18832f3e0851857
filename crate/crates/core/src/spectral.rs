//! Pointwise differential analysis: Gram matrix, singular values, the matrix
//! norms of `Du`, and distortion constants.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::polyharm::{DomainSpec, HarmonicMap};

/// Symmetry tolerance accepted by [`sym_eigenvalues`], relative to the
/// largest entry (floored at 1).
pub const SYMMETRY_TOL: f64 = 1e-12;
const JACOBI_REL_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Singular-value data of `Du(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    /// Singular values, ascending.
    pub lambdas: Vec<f64>,
    /// `|Du| = lambda_n`
    pub op_norm: f64,
    /// `l(Du) = lambda_1`
    pub min_stretch: f64,
    /// Hilbert-Schmidt norm `sqrt(trace(Du Du^T))`.
    pub hs_norm: f64,
    /// Signed Jacobian determinant.
    pub jac_det: f64,
}

impl SpectralData {
    pub fn dimension(&self) -> usize {
        self.lambdas.len()
    }

    /// `lambda_n / lambda_1`; infinite when `lambda_1 = 0`.
    pub fn linear_dilatation(&self) -> f64 {
        self.op_norm / self.min_stretch
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionEstimate {
    /// Smallest `K` with `K^-1 |Du|^n <= J_u <= K l(Du)^n`.
    pub k_outer_inner: f64,
    /// `lambda_n / lambda_1`.
    pub h_linear: f64,
    pub sample_count: usize,
    pub excluded_count: usize,
    /// Admitted points where `J_u < 0`; their outer/inner constant is taken
    /// with `|J_u|`.
    pub reversed_count: usize,
}

/// `Du Du^T` under the row = variable convention, symmetrized.
pub fn gram(j: &Matrix) -> Matrix {
    let mut g = j * &j.transpose();
    let n = g.dim();
    for i in 0..n {
        for k in i + 1..n {
            let avg = 0.5 * (g[(i, k)] + g[(k, i)]);
            g[(i, k)] = avg;
            g[(k, i)] = avg;
        }
    }
    g
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
///
/// Sweeps continue until the off-diagonal Frobenius mass drops below
/// `1e-14` times the diagonal mass.
pub fn sym_eigenvalues(s: &Matrix) -> Result<Vec<f64>> {
    let n = s.dim();
    let scale = s.max_abs().max(1.0);
    let mut asym = 0.0_f64;
    for i in 0..n {
        for k in i + 1..n {
            asym = asym.max((s[(i, k)] - s[(k, i)]).abs());
        }
    }
    if asym > SYMMETRY_TOL * scale {
        return Err(Error::NonSymmetric(asym));
    }

    let mut a = s.clone();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&k| k != i).map(move |k| (i, k)))
            .map(|(i, k)| a[(i, k)] * a[(i, k)])
            .sum::<f64>()
            .sqrt();
        let diag: f64 = (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum::<f64>().sqrt();
        if off == 0.0 || off < JACOBI_REL_TOL * diag {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    Ok(ev)
}

/// Spectral data of a given differential matrix.
pub fn spectral_of(j: &Matrix) -> SpectralData {
    let ev = sym_eigenvalues(&gram(j)).expect("Gram matrix is symmetric by construction");
    // round-off can push tiny eigenvalues of a PSD matrix below zero
    let lambdas: Vec<f64> = ev.into_iter().map(|e| e.max(0.0).sqrt()).collect();
    SpectralData {
        op_norm: *lambdas.last().unwrap_or(&0.0),
        min_stretch: *lambdas.first().unwrap_or(&0.0),
        hs_norm: j.frobenius_sq().sqrt(),
        jac_det: j.det(),
        lambdas,
    }
}

pub fn spectral_at(u: &HarmonicMap, x: &[f64]) -> SpectralData {
    spectral_of(&u.jacobian(x))
}

fn outer_inner(sd: &SpectralData, det_abs: f64) -> f64 {
    let n = sd.dimension() as i32;
    let outer = sd.op_norm.powi(n) / det_abs;
    let inner = det_abs / sd.min_stretch.powi(n);
    outer.max(inner)
}

/// Pointwise distortion. Requires a positive Jacobian and `lambda_1 > 0`.
pub fn distortion_at(sd: &SpectralData) -> Result<DistortionEstimate> {
    if !(sd.jac_det > 0.0) {
        return Err(Error::Orientation(sd.jac_det));
    }
    if !(sd.min_stretch > 0.0) {
        return Err(Error::DegeneratePoint(sd.min_stretch));
    }
    Ok(DistortionEstimate {
        k_outer_inner: outer_inner(sd, sd.jac_det),
        h_linear: sd.linear_dilatation(),
        sample_count: 1,
        excluded_count: 0,
        reversed_count: 0,
    })
}

/// Supremum of the pointwise distortion over `samples` quasi-random points
/// of `dom`, skipping points with `lambda_1 < eps_degenerate`.
pub fn global_distortion(u: &HarmonicMap, dom: &DomainSpec, samples: usize, seed: u64) -> Result<DistortionEstimate> {
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be >= 1".into()));
    }
    let points = dom.sample_points(samples, seed);
    let per_point: Vec<SpectralData> = points.par_iter().map(|x| spectral_at(u, x)).collect();

    let mut est = DistortionEstimate {
        k_outer_inner: 1.0,
        h_linear: 1.0,
        sample_count: samples,
        excluded_count: 0,
        reversed_count: 0,
    };
    for sd in &per_point {
        if sd.min_stretch < dom.eps_degenerate {
            est.excluded_count += 1;
            continue;
        }
        if sd.jac_det < 0.0 {
            est.reversed_count += 1;
        }
        est.k_outer_inner = est.k_outer_inner.max(outer_inner(sd, sd.jac_det.abs()));
        est.h_linear = est.h_linear.max(sd.linear_dilatation());
    }
    if est.excluded_count == samples {
        return Err(Error::NoData { sampled: samples });
    }
    Ok(est)
}
