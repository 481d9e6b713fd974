//! Uniform sampling grids and the small value syntax used on the command line.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n` equally spaced points from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl UniformGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGrid);
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::invalid("grid bounds must be finite"));
        }
        if n > 1 && hi <= lo {
            return Err(Error::GridNotIncreasing);
        }
        Ok(UniformGrid { lo, hi, n })
    }

    pub fn step(&self) -> f64 {
        if self.n > 1 {
            (self.hi - self.lo) / (self.n - 1) as f64
        } else {
            0.0
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n && self.n > 1 {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }
}

impl FromStr for UniformGrid {
    type Err = Error;

    /// `lo:hi:n`, where `lo` and `hi` accept the [`parse_value`] syntax.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(Error::invalid(format!("grid `{s}` is not lo:hi:n")));
        };
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("grid size `{n}` is not an integer")))?;
        UniformGrid::new(parse_value(lo)?, parse_value(hi)?, n)
    }
}

/// Checks that an arbitrary grid is non-empty and strictly increasing.
pub fn check_increasing(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("grid contains non-finite points"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::GridNotIncreasing);
    }
    Ok(())
}

/// Parses a plain number or a multiple of pi: `0.3`, `pi`, `pi/8`, `3pi/8`,
/// `3*pi/8`, `-pi/4`.
pub fn parse_value(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || Error::invalid(format!("cannot parse `{s}` as a number"));
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim().parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let coeff = num.strip_suffix("pi").ok_or_else(bad)?.trim_end_matches('*').trim();
    let coeff = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    if den == 0.0 {
        return Err(bad());
    }
    Ok(coeff * PI / den)
}

/// Comma-separated list of [`parse_value`] entries.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(parse_value).collect()
}
