//! Plug-in estimation of ordinal pattern dependence from a pair of series.
//!
//! Windows `(x_t, ..., x_{t+d-1})` are taken every `step` observations. A
//! window position is used only if both the x-part and the y-part are finite;
//! the coincidence frequency and both marginal pattern frequencies are computed
//! on that common set of windows.

use serde::{Deserialize, Serialize};

use crate::distribution::{opd_from_terms, PatternDistribution};
use crate::error::{Error, Result};
use crate::ordinal::{check_order, factorial, pattern_index_of, pattern_of, Pattern};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesPair {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl TimeSeriesPair {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                x: x.len(),
                y: y.len(),
            });
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Patterns of the valid windows of one series.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPatterns {
    pub patterns: Vec<Pattern>,
    /// Windows dropped because they contained a non-finite value.
    pub skipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpdEstimate {
    pub value: f64,
    pub coincidence: f64,
    pub cross_term: f64,
    pub window_count: usize,
    pub skipped_windows: usize,
}

fn window_starts(len: usize, order: usize, step: usize) -> Result<impl Iterator<Item = usize>> {
    check_order(order)?;
    if step == 0 {
        return Err(Error::InvalidStep);
    }
    if len < order {
        return Err(Error::SeriesTooShort { len, order });
    }
    Ok((0..=len - order).step_by(step))
}

fn is_finite_window(w: &[f64]) -> bool {
    w.iter().all(|v| v.is_finite())
}

pub fn sliding_patterns(series: &[f64], order: usize, step: usize) -> Result<WindowPatterns> {
    let mut patterns = Vec::new();
    let mut skipped = 0;
    for t in window_starts(series.len(), order, step)? {
        let w = &series[t..t + order];
        if is_finite_window(w) {
            patterns.push(pattern_of(w)?);
        } else {
            skipped += 1;
        }
    }
    Ok(WindowPatterns { patterns, skipped })
}

/// Relative pattern frequencies.
pub fn empirical_distribution(patterns: &[Pattern]) -> Result<PatternDistribution> {
    let first = patterns.first().ok_or(Error::EmptyInput)?;
    let order = first.order();
    let mut counts = vec![0usize; factorial(order)];
    for p in patterns {
        if p.order() != order {
            return Err(Error::OrderMismatch {
                expected: order,
                actual: p.order(),
            });
        }
        counts[p.index()] += 1;
    }
    Ok(PatternDistribution::from_counts(order, &counts))
}

pub fn empirical_opd(pair: &TimeSeriesPair, order: usize, step: usize) -> Result<OpdEstimate> {
    let n_fact = {
        check_order(order)?;
        factorial(order)
    };
    let mut x_counts = vec![0usize; n_fact];
    let mut y_counts = vec![0usize; n_fact];
    let mut coincident = 0usize;
    let mut window_count = 0usize;
    let mut skipped_windows = 0usize;

    for t in window_starts(pair.len(), order, step)? {
        let (wx, wy) = (&pair.x[t..t + order], &pair.y[t..t + order]);
        if !(is_finite_window(wx) && is_finite_window(wy)) {
            skipped_windows += 1;
            continue;
        }
        let (px, py) = (pattern_index_of(wx), pattern_index_of(wy));
        x_counts[px] += 1;
        y_counts[py] += 1;
        coincident += usize::from(px == py);
        window_count += 1;
    }
    if window_count == 0 {
        return Err(Error::EmptyInput);
    }

    let p = PatternDistribution::from_counts(order, &x_counts);
    let q = PatternDistribution::from_counts(order, &y_counts);
    let cross_term = p.cross_term(&q)?;
    let coincidence = coincident as f64 / window_count as f64;
    Ok(OpdEstimate {
        value: opd_from_terms(coincidence, cross_term)?,
        coincidence,
        cross_term,
        window_count,
        skipped_windows,
    })
}
