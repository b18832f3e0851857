//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Exponent vector of a monomial, one entry per variable.
pub type Exponents = Vec<u32>;

/// A polynomial in `dimension` variables.
///
/// Terms are kept in a `BTreeMap` so iteration order (and everything derived
/// from it, including serialized output) is deterministic. Zero coefficients
/// are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    dimension: usize,
    terms: BTreeMap<Exponents, BigRational>,
}

impl Polynomial {
    pub fn zero(dimension: usize) -> Self {
        Polynomial {
            dimension,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dimension: usize, c: BigRational) -> Self {
        let mut p = Self::zero(dimension);
        p.add_term(vec![0; dimension], c);
        p
    }

    /// The coordinate function `x_axis` (0-based).
    pub fn variable(dimension: usize, axis: usize) -> Result<Self> {
        if axis >= dimension {
            return Err(Error::AxisOutOfRange { axis, dimension });
        }
        let mut exps = vec![0; dimension];
        exps[axis] = 1;
        let mut p = Self::zero(dimension);
        p.add_term(exps, BigRational::one());
        Ok(p)
    }

    /// Collects terms, summing repeated monomials and dropping zeros.
    pub fn from_terms<I>(dimension: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, BigRational)>,
    {
        let mut p = Self::zero(dimension);
        for (exps, c) in terms {
            if exps.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: exps.len(),
                });
            }
            p.add_term(exps, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, exps: Exponents, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut p = Self::zero(self.dimension);
        for (e, v) in &self.terms {
            p.add_term(e.clone(), v * c);
        }
        p
    }

    /// Exact symbolic derivative with respect to `x_axis` (0-based).
    pub fn partial_derivative(&self, axis: usize) -> Result<Self> {
        if axis >= self.dimension {
            return Err(Error::AxisOutOfRange {
                axis,
                dimension: self.dimension,
            });
        }
        let mut p = Self::zero(self.dimension);
        for (e, c) in &self.terms {
            let k = e[axis];
            if k == 0 {
                continue;
            }
            let mut de = e.clone();
            de[axis] -= 1;
            p.add_term(de, c * BigRational::from_integer(BigInt::from(k)));
        }
        Ok(p)
    }

    /// Exact Laplacian, the sum of the unmixed second partials.
    pub fn laplacian(&self) -> Self {
        let mut p = Self::zero(self.dimension);
        for (e, c) in &self.terms {
            for axis in 0..self.dimension {
                let k = e[axis];
                if k < 2 {
                    continue;
                }
                let mut de = e.clone();
                de[axis] -= 2;
                p.add_term(de, c * BigRational::from_integer(BigInt::from(k * (k - 1))));
            }
        }
        p
    }

    /// Floating-point evaluation. Slow path; `HarmonicMap` compiles its
    /// components for repeated evaluation.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dimension, "point has wrong dimension");
        self.terms
            .iter()
            .map(|(e, c)| ratio_to_f64(c) * monomial_f64(e, x))
            .sum()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dimension, rhs.dimension);
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-BigRational::one())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest degree first reads more naturally
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let (da, db) = (a.iter().sum::<u32>(), b.iter().sum::<u32>());
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (i, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| {
                    if k == 1 {
                        format!("x{}", v + 1)
                    } else {
                        format!("x{}^{}", v + 1, k)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

pub(crate) fn ratio_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}

/// Nearest double-double: the rounded value plus the rounded exact residual.
/// (twofloat's own division loses the low word, so it is avoided here.)
fn ratio_to_dd(c: &BigRational) -> TwoFloat {
    let hi = ratio_to_f64(c);
    match BigRational::from_float(hi) {
        Some(h) => TwoFloat::new_add(hi, ratio_to_f64(&(c - h))),
        None => TwoFloat::from(hi),
    }
}

fn monomial_f64(e: &[u32], x: &[f64]) -> f64 {
    e.iter()
        .zip(x)
        .filter(|(&k, _)| k > 0)
        .map(|(&k, &xi)| xi.powi(k as i32))
        .product()
}

fn monomial_dd(e: &[u32], x: &[f64]) -> TwoFloat {
    let mut acc = TwoFloat::from(1.0);
    for (&k, &xi) in e.iter().zip(x) {
        let xi = TwoFloat::from(xi);
        for _ in 0..k {
            acc *= xi;
        }
    }
    acc
}

/// A polynomial flattened for fast repeated evaluation, both in `f64` and in
/// double-double precision.
#[derive(Clone, Debug)]
pub(crate) struct CompiledPoly {
    terms: Vec<(Exponents, f64, TwoFloat)>,
}

impl CompiledPoly {
    pub(crate) fn new(p: &Polynomial) -> Self {
        CompiledPoly {
            terms: p
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), ratio_to_f64(c), ratio_to_dd(c)))
                .collect(),
        }
    }

    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(e, c, _)| c * monomial_f64(e, x)).sum()
    }

    pub(crate) fn eval_dd(&self, x: &[f64]) -> TwoFloat {
        let mut acc = TwoFloat::from(0.0);
        for (e, _, c) in &self.terms {
            acc += *c * monomial_dd(e, x);
        }
        acc
    }
}
