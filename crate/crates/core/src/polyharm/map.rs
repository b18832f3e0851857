//! Harmonic mappings `u: R^n -> R^n` with polynomial components.

use std::collections::HashMap;

use log::warn;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use super::basis::harmonic_basis;
use super::poly::{CompiledPoly, Polynomial};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Determinants below this magnitude trigger a warning in [`linear_map`].
pub const NEAR_SINGULAR_DET: f64 = 1e-12;

/// A harmonic mapping whose components are exact polynomials.
///
/// Construction verifies that every component has identically zero
/// Laplacian. Partial derivatives are computed once, symbolically, and
/// kept alongside compiled forms for fast evaluation.
#[derive(Clone, Debug)]
pub struct HarmonicMap {
    dimension: usize,
    components: Vec<Polynomial>,
    // partials[k][j] = d u_j / d x_k
    partials: Vec<Vec<Polynomial>>,
    compiled: Vec<CompiledPoly>,
    compiled_partials: Vec<Vec<CompiledPoly>>,
}

impl PartialEq for HarmonicMap {
    fn eq(&self, other: &Self) -> bool {
        self.dimension == other.dimension && self.components == other.components
    }
}

/// Which of the two extremal linear families to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `diag(1, ..., 1, K)`
    Stretch,
    /// `diag(1, ..., 1, 1/K)`
    Compress,
}

impl HarmonicMap {
    /// Builds a map from `n` components in `n` variables, rejecting any
    /// component with a nonzero Laplacian.
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        for p in &components {
            if p.dimension() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: p.dimension(),
                });
            }
        }
        verify_harmonicity(&components)?;
        let partials: Vec<Vec<Polynomial>> = (0..n)
            .map(|k| {
                components
                    .iter()
                    .map(|p| p.partial_derivative(k).expect("axis in range"))
                    .collect()
            })
            .collect();
        let compiled = components.iter().map(CompiledPoly::new).collect();
        let compiled_partials = partials
            .iter()
            .map(|row| row.iter().map(CompiledPoly::new).collect())
            .collect();
        Ok(HarmonicMap {
            dimension: n,
            components,
            partials,
            compiled,
            compiled_partials,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    /// `d u_component / d x_axis`, exact.
    pub fn partial(&self, axis: usize, component: usize) -> &Polynomial {
        &self.partials[axis][component]
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.check_point(x);
        self.compiled.iter().map(|c| c.eval(x)).collect()
    }

    /// The formal differential at `x`: entry `(i, j)` is `d u_j / d x_i`
    /// (row = differentiation variable, column = component).
    pub fn jacobian(&self, x: &[f64]) -> Matrix {
        self.check_point(x);
        let n = self.dimension;
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.compiled_partials[i][j].eval(x);
            }
        }
        m
    }

    pub(crate) fn eval_dd(&self, x: &[f64]) -> Vec<TwoFloat> {
        self.check_point(x);
        self.compiled.iter().map(|c| c.eval_dd(x)).collect()
    }

    /// Jacobian entries in double-double, same layout as [`Self::jacobian`].
    pub(crate) fn jacobian_dd(&self, x: &[f64]) -> Vec<Vec<TwoFloat>> {
        self.check_point(x);
        self.compiled_partials
            .iter()
            .map(|row| row.iter().map(|c| c.eval_dd(x)).collect())
            .collect()
    }

    fn check_point(&self, x: &[f64]) {
        assert_eq!(
            x.len(),
            self.dimension,
            "point dimension {} does not match map dimension {}",
            x.len(),
            self.dimension
        );
    }

    /// `c * u`.
    pub fn scaled(&self, c: &BigRational) -> Self {
        Self::new(self.components.iter().map(|p| p.scale(c)).collect()).expect("scaling preserves harmonicity")
    }

    /// `Q u`, mixing the components by an exact matrix.
    pub fn compose_left(&self, q: &[Vec<BigRational>]) -> Result<Self> {
        let n = self.dimension;
        if q.len() != n || q.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: q.len(),
            });
        }
        let comps = q
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.components)
                    .fold(Polynomial::zero(n), |acc, (c, p)| &acc + &p.scale(c))
            })
            .collect();
        Self::new(comps)
    }

    /// Componentwise sum of two maps of the same dimension.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if other.dimension != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: other.dimension,
            });
        }
        Self::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// `u + (1/m, 0, ..., 0)`: shifts a zero of `u` away while keeping the
    /// map exactly harmonic.
    pub fn regularized(&self, m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidConfig("regularization index m must be >= 1".into()));
        }
        let shift = BigRational::new(BigInt::one(), BigInt::from(m));
        let mut comps = self.components.clone();
        comps[0] = &comps[0] + &Polynomial::constant(self.dimension, shift);
        Self::new(comps)
    }

    /// Largest total degree over the components.
    pub fn degree(&self) -> u32 {
        self.components.iter().filter_map(|p| p.degree()).max().unwrap_or(0)
    }

    pub fn to_map_file(&self) -> Result<MapFile> {
        let mut components = Vec::with_capacity(self.dimension);
        for (idx, p) in self.components.iter().enumerate() {
            let mut terms = Vec::with_capacity(p.num_terms());
            for (e, c) in p.terms() {
                let (Some(num), Some(den)) = (c.numer().to_i64(), c.denom().to_i64()) else {
                    return Err(Error::Schema(format!(
                        "component u{}: coefficient {c} does not fit in 64-bit integers",
                        idx + 1
                    )));
                };
                terms.push(TermRecord {
                    exps: e.clone(),
                    num,
                    den,
                });
            }
            components.push(terms);
        }
        Ok(MapFile {
            n: self.dimension,
            components,
        })
    }

    pub fn from_map_file(file: &MapFile) -> Result<Self> {
        let n = file.n;
        if n == 0 {
            return Err(Error::Schema("n must be positive".into()));
        }
        if file.components.len() != n {
            return Err(Error::Schema(format!(
                "expected {n} components, found {}",
                file.components.len()
            )));
        }
        let mut comps = Vec::with_capacity(n);
        for (idx, terms) in file.components.iter().enumerate() {
            let mut collected = Vec::with_capacity(terms.len());
            for (t_idx, t) in terms.iter().enumerate() {
                if t.exps.len() != n {
                    return Err(Error::Schema(format!(
                        "component u{}, term {}: exponent list has length {}, expected {n}",
                        idx + 1,
                        t_idx,
                        t.exps.len()
                    )));
                }
                if t.den <= 0 {
                    return Err(Error::Schema(format!(
                        "component u{}, term {}: den must be positive, got {}",
                        idx + 1,
                        t_idx,
                        t.den
                    )));
                }
                collected.push((
                    t.exps.clone(),
                    BigRational::new(BigInt::from(t.num), BigInt::from(t.den)),
                ));
            }
            comps.push(Polynomial::from_terms(n, collected)?);
        }
        Self::new(comps)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: MapFile = serde_json::from_str(s)?;
        Self::from_map_file(&file)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_map_file()?)?)
    }
}

impl Serialize for HarmonicMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_map_file()
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HarmonicMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = MapFile::deserialize(d)?;
        HarmonicMap::from_map_file(&file).map_err(serde::de::Error::custom)
    }
}

/// On-disk map format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub n: usize,
    pub components: Vec<Vec<TermRecord>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub exps: Vec<u32>,
    pub num: i64,
    pub den: i64,
}

/// Checks `laplacian(u_j) == 0` exactly for every component, reporting the
/// first nonzero Laplacian coefficient found.
pub fn verify_harmonicity(components: &[Polynomial]) -> Result<()> {
    for (idx, p) in components.iter().enumerate() {
        let lap = p.laplacian();
        let first = lap.terms().next().map(|(e, c)| (e.clone(), c.to_string()));
        if let Some((exps, coefficient)) = first {
            return Err(Error::NotHarmonic {
                component: idx,
                exps,
                coefficient,
            });
        }
    }
    Ok(())
}

fn exact_det(a: &[Vec<BigRational>]) -> BigRational {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let piv = m[col][col].clone();
        det *= &piv;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &piv;
            let pivot_row = m[col].clone();
            for (cell, p) in m[r].iter_mut().zip(&pivot_row).skip(col) {
                *cell -= &f * p;
            }
        }
    }
    det
}

/// `u(x) = A x` with exact coefficients. Row `j` of `a` holds the
/// coefficients of `u_j`, so the Jacobian (rows = variables) is `A^T`.
pub fn linear_map_exact(a: &[Vec<BigRational>]) -> Result<HarmonicMap> {
    let n = a.len();
    if n == 0 || a.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.first().map_or(0, |r| r.len()),
        });
    }
    let det = exact_det(a);
    if det.is_zero() {
        return Err(Error::RankDeficient);
    }
    let det_f = det.to_f64().unwrap_or(0.0);
    if det_f.abs() < NEAR_SINGULAR_DET {
        warn!("linear map has |det A| = {det_f:e}; it is harmonic but not quasiregular in any useful sense");
    }
    let comps = a
        .iter()
        .map(|row| {
            let terms = row.iter().enumerate().map(|(i, c)| {
                let mut e = vec![0; n];
                e[i] = 1;
                (e, c.clone())
            });
            Polynomial::from_terms(n, terms).expect("arity")
        })
        .collect();
    HarmonicMap::new(comps)
}

/// `u(x) = A x` from a floating-point matrix; entries are converted to the
/// exact rationals they represent.
pub fn linear_map(a: &Matrix) -> Result<HarmonicMap> {
    let rows: Result<Vec<Vec<BigRational>>> = a
        .rows()
        .into_iter()
        .map(|r| r.into_iter().map(exact_rational).collect())
        .collect();
    linear_map_exact(&rows?)
}

pub(crate) fn exact_rational(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::NonFinite(format!("{v}")))
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    Ok(())
}

pub fn identity_map(n: usize) -> Result<HarmonicMap> {
    if n == 0 {
        return Err(Error::InvalidDimension(n));
    }
    let a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    linear_map_exact(&a)
}

/// The extremal linear maps: `diag(1, ..., 1, K)` for [`Branch::Stretch`]
/// and `diag(1, ..., 1, 1/K)` for [`Branch::Compress`]. The reciprocal is
/// taken exactly, so `K = 3` gives the coefficient `1/3`.
pub fn extremal_map(n: usize, k: f64, branch: Branch) -> Result<HarmonicMap> {
    check_dimension(n)?;
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::InvalidDistortion(k));
    }
    let kq = exact_rational(k)?;
    let last = match branch {
        Branch::Stretch => kq,
        Branch::Compress => kq.recip(),
    };
    let a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i != j {
                        BigRational::zero()
                    } else if i == n - 1 {
                        last.clone()
                    } else {
                        BigRational::one()
                    }
                })
                .collect()
        })
        .collect();
    linear_map_exact(&a)
}

/// `(x1^2 - x2^2, 2 x1 x2)`, the map `z -> z^2` in real coordinates.
pub fn zsquared_map() -> HarmonicMap {
    let one = BigRational::one;
    let u1 = Polynomial::from_terms(2, vec![(vec![2, 0], one()), (vec![0, 2], -one())]).expect("arity");
    let u2 = Polynomial::from_terms(2, vec![(vec![1, 1], BigRational::from_integer(2.into()))]).expect("arity");
    HarmonicMap::new(vec![u1, u2]).expect("z^2 is harmonic")
}

/// Integer coefficient range for [`random_harmonic_map`].
pub const RANDOM_COEFF_BOUND: i64 = 9;

/// A random harmonic map: each component is an integer combination (with
/// coefficients in `[-9, 9]`) of the harmonic basis elements of degrees
/// `1..=max_degree`. Deterministic in `seed`.
pub fn random_harmonic_map(n: usize, max_degree: u32, seed: u64) -> Result<HarmonicMap> {
    if n == 0 {
        return Err(Error::InvalidDimension(n));
    }
    if max_degree == 0 {
        return Err(Error::InvalidConfig("max_degree must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cache: HashMap<u32, Vec<Polynomial>> = HashMap::new();
    for d in 1..=max_degree {
        cache.insert(d, harmonic_basis(n, d));
    }
    let mut comps = Vec::with_capacity(n);
    for _ in 0..n {
        loop {
            let mut p = Polynomial::zero(n);
            for d in 1..=max_degree {
                for b in &cache[&d] {
                    let c = rng.gen_range(-RANDOM_COEFF_BOUND..=RANDOM_COEFF_BOUND);
                    if c != 0 {
                        p = &p + &b.scale(&BigRational::from_integer(c.into()));
                    }
                }
            }
            if !p.is_zero() {
                comps.push(p);
                break;
            }
        }
    }
    HarmonicMap::new(comps)
}

/// Sum of absolute coefficient values over all components; a crude size
/// bound used to normalize perturbations.
pub fn coefficient_mass(u: &HarmonicMap) -> f64 {
    u.components()
        .iter()
        .flat_map(|p| p.terms().map(|(_, c)| c.abs().to_f64().unwrap_or(f64::INFINITY)))
        .sum()
}
