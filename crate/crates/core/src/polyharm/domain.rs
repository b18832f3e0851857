//! Sampling domains and exclusion radii.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_EPS_ZERO: f64 = 1e-8;
pub const DEFAULT_EPS_DEGENERATE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    /// Axis-aligned cube `|x_i - c_i| <= half_width`.
    Box { half_width: f64 },
    Ball { radius: f64 },
}

/// A bounded region together with the radii used to excise the zero set of
/// `u` (`eps_zero`) and the critical set where `Du` degenerates
/// (`eps_degenerate`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub center: Vec<f64>,
    pub region: Region,
    pub eps_zero: f64,
    pub eps_degenerate: f64,
}

impl DomainSpec {
    pub fn cube(center: Vec<f64>, half_width: f64) -> Result<Self> {
        Self::new(center, Region::Box { half_width })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        Self::new(center, Region::Ball { radius })
    }

    fn new(center: Vec<f64>, region: Region) -> Result<Self> {
        let size = match region {
            Region::Box { half_width } => half_width,
            Region::Ball { radius } => radius,
        };
        if !(size > 0.0) || !size.is_finite() {
            return Err(Error::InvalidConfig(format!("domain size must be positive, got {size}")));
        }
        if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfig("domain center must be a finite non-empty vector".into()));
        }
        Ok(DomainSpec {
            center,
            region,
            eps_zero: DEFAULT_EPS_ZERO,
            eps_degenerate: DEFAULT_EPS_DEGENERATE,
        })
    }

    pub fn with_exclusions(mut self, eps_zero: f64, eps_degenerate: f64) -> Result<Self> {
        if !(eps_zero > 0.0) || !(eps_degenerate > 0.0) {
            return Err(Error::InvalidConfig(
                "exclusion radii eps_zero and eps_degenerate must be positive".into(),
            ));
        }
        self.eps_zero = eps_zero;
        self.eps_degenerate = eps_degenerate;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self.region {
            Region::Box { half_width } => x
                .iter()
                .zip(&self.center)
                .all(|(a, c)| (a - c).abs() <= half_width),
            Region::Ball { radius } => {
                x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>() <= radius * radius
            }
        }
    }

    /// `count` quasi-random points of the domain: a Kronecker (R_d) sequence
    /// with a seeded Cranley-Patterson shift. Ball points come from the same
    /// sequence on the enclosing cube, keeping those that land inside.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let n = self.dimension();
        let alpha = kronecker_steps(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let (size, is_ball) = match self.region {
            Region::Box { half_width } => (half_width, false),
            Region::Ball { radius } => (radius, true),
        };
        let mut out = Vec::with_capacity(count);
        let mut i: u64 = 0;
        while out.len() < count {
            i += 1;
            let unit: Vec<f64> = (0..n)
                .map(|k| 2.0 * (shift[k] + i as f64 * alpha[k]).fract() - 1.0)
                .collect();
            if is_ball && unit.iter().map(|v| v * v).sum::<f64>() > 1.0 {
                continue;
            }
            out.push(unit.iter().zip(&self.center).map(|(u, c)| c + size * u).collect());
        }
        out
    }
}

/// Step vector of the R_d sequence: powers of the inverse of the unique
/// positive root of `x^(d+1) = x + 1`.
fn kronecker_steps(d: usize) -> Vec<f64> {
    let mut phi = 2.0_f64;
    for _ in 0..64 {
        let f = phi.powi(d as i32 + 1) - phi - 1.0;
        let df = (d as f64 + 1.0) * phi.powi(d as i32) - 1.0;
        phi -= f / df;
    }
    (1..=d).map(|k| phi.powi(-(k as i32))).collect()
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.center.iter().map(|v| v.to_string()).collect();
        match self.region {
            Region::Box { half_width } => write!(f, "box:{}:{}", c.join(","), half_width),
            Region::Ball { radius } => write!(f, "ball:{}:{}", c.join(","), radius),
        }
    }
}

/// Parses `box:<c1,...,cn>:<half_width>` or `ball:<c1,...,cn>:<radius>`.
impl FromStr for DomainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidConfig(format!(
                "domain '{s}' must look like box:<center>:<half_width> or ball:<center>:<radius>"
            )));
        }
        let center = parse_vector(parts[1])?;
        let size: f64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad domain size '{}'", parts[2])))?;
        match parts[0] {
            "box" => Self::cube(center, size),
            "ball" => Self::ball(center, size),
            other => Err(Error::InvalidConfig(format!("unknown domain kind '{other}'"))),
        }
    }
}

/// Parses a comma-separated list of reals.
pub fn parse_vector(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("bad number '{t}' in '{s}'")))
        })
        .collect()
}
