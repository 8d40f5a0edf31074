//! Exact lower- and upper-orthant probabilities.

use super::{Block, OrderKind, PiecewiseUniformDensity};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Orthant {
    Lower,
    Upper,
}

/// Area of `{lo <= a <= b <= hi, a <= s, b <= t}`.
fn chain2_lower(lo: f64, hi: f64, s: f64, t: f64) -> f64 {
    let s = s.clamp(lo, hi);
    let t = t.clamp(lo, hi);
    let m = s.min(t);
    (m - lo) * (t - 0.5 * (m + lo))
}

/// Area of `{lo <= a <= b <= hi, a >= s, b >= t}`.
fn chain2_upper(lo: f64, hi: f64, s: f64, t: f64) -> f64 {
    let s = s.clamp(lo, hi);
    let t = t.clamp(lo, hi);
    let m = s.max(t);
    (hi - m) * (0.5 * (hi + m) - s)
}

fn block_volume(b: &Block, point: &[f64], offset: usize, orthant: Orthant) -> Result<f64> {
    let coord = |k: usize| point[offset + b.positions[k] - 1];
    let one = |t: f64| match orthant {
        Orthant::Lower => t.clamp(b.lo, b.hi) - b.lo,
        Orthant::Upper => b.hi - t.clamp(b.lo, b.hi),
    };
    match (b.kind, b.positions.len()) {
        (OrderKind::Free, k) | (OrderKind::Chain, k @ 1) => Ok((0..k).map(|i| one(coord(i))).product()),
        (OrderKind::Chain, 2) => Ok(match orthant {
            Orthant::Lower => chain2_lower(b.lo, b.hi, coord(0), coord(1)),
            Orthant::Upper => chain2_upper(b.lo, b.hi, coord(0), coord(1)),
        }),
        (OrderKind::Chain, k) => Err(Error::UnsupportedChainLength(k)),
    }
}

impl PiecewiseUniformDensity {
    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: point.len(),
            });
        }
        if let Some(position) = point.iter().position(|v| v.is_nan()) {
            return Err(Error::NonFiniteInput { position });
        }
        Ok(())
    }

    pub(crate) fn orthant(&self, point: &[f64], orthant: Orthant) -> Result<f64> {
        self.check_point(point)?;
        let mut total = 0.0;
        for cell in &self.cells {
            let mut v = cell.value;
            for b in &cell.blocks {
                v *= block_volume(b, point, b.axis.offset(self.order), orthant)?;
            }
            total += v;
        }
        Ok(total)
    }

    /// `P(Z <= point)` componentwise. Infinite coordinates are allowed.
    pub fn cdf(&self, point: &[f64]) -> Result<f64> {
        self.orthant(point, Orthant::Lower)
    }

    /// `P(Z >= point)` componentwise.
    pub fn survival(&self, point: &[f64]) -> Result<f64> {
        self.orthant(point, Orthant::Upper)
    }
}

pub fn cdf(model: &PiecewiseUniformDensity, point: &[f64]) -> Result<f64> {
    model.cdf(point)
}

pub fn survival(model: &PiecewiseUniformDensity, point: &[f64]) -> Result<f64> {
    model.survival(point)
}
