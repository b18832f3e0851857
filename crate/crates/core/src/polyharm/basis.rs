//! Homogeneous harmonic polynomial bases.
//!
//! The degree-`d` harmonic polynomials in `n` variables are the kernel of the
//! Laplacian viewed as a linear map from degree-`d` coefficient vectors to
//! degree-`d - 2` coefficient vectors. The kernel is computed by fraction-free
//! elimination over the integers.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::{Exponents, Polynomial};

/// All exponent vectors of total degree `d` in `n` variables, in descending
/// lexicographic order (`x1^d` first).
pub fn homogeneous_monomials(n: usize, d: u32) -> Vec<Exponents> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Exponents>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=d).rev() {
            prefix.push(k);
            rec(n, d - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// A basis of the homogeneous harmonic polynomials of degree `d` in `n`
/// variables. Each element has coprime integer coefficients.
pub fn harmonic_basis(n: usize, d: u32) -> Vec<Polynomial> {
    let cols = homogeneous_monomials(n, d);
    if d < 2 {
        return cols
            .into_iter()
            .map(|e| Polynomial::from_terms(n, [(e, BigRational::one())]).expect("arity"))
            .collect();
    }
    let rows = homogeneous_monomials(n, d - 2);
    let row_index: HashMap<&Exponents, usize> = rows.iter().enumerate().map(|(i, e)| (e, i)).collect();

    let mut m = vec![vec![BigInt::zero(); cols.len()]; rows.len()];
    for (j, e) in cols.iter().enumerate() {
        for axis in 0..n {
            let k = e[axis];
            if k < 2 {
                continue;
            }
            let mut de = e.clone();
            de[axis] -= 2;
            m[row_index[&de]][j] += BigInt::from(k * (k - 1));
        }
    }

    let pivots = reduce_fraction_free(&mut m);
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();

    let mut basis = Vec::new();
    for free in (0..cols.len()).filter(|c| !pivot_cols.contains(c)) {
        // x_free = 1, pivots solved from their reduced rows
        let mut v = vec![BigRational::zero(); cols.len()];
        v[free] = BigRational::one();
        for &(r, c) in &pivots {
            v[c] = -BigRational::new(m[r][free].clone(), m[r][c].clone());
        }
        let lcm = v
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let terms = cols
            .iter()
            .zip(ints)
            .map(|(e, c)| (e.clone(), BigRational::from_integer(c / &g)));
        basis.push(Polynomial::from_terms(n, terms).expect("arity"));
    }
    basis
}

/// Fraction-free Gauss-Jordan elimination in place. Returns `(row, col)` for
/// each pivot; afterwards every pivot column is zero outside its pivot row.
fn reduce_fraction_free(m: &mut [Vec<BigInt>]) -> Vec<(usize, usize)> {
    let nrows = m.len();
    let ncols = if nrows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..nrows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let a = m[r][c].clone();
            let b = m[i][c].clone();
            let pivot_row = m[r].clone();
            for (cell, p) in m[i].iter_mut().zip(&pivot_row) {
                *cell = &a * &*cell - &b * p;
            }
            normalize_row(&mut m[i]);
        }
        normalize_row(&mut m[r]);
        pivots.push((r, c));
        r += 1;
    }
    pivots
}

fn normalize_row(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return;
    }
    let g = g.abs();
    for x in row.iter_mut() {
        *x = &*x / &g;
    }
}
