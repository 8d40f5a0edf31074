//! Pattern distributions and the dependence formula built on them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::{check_order, factorial, Pattern};

/// Distance from 1 below which the cross term counts as degenerate.
pub const DEGENERATE_EPS: f64 = 1e-12;

/// Probability vector over the `d!` patterns, indexed by [`Pattern::index`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternDistribution {
    order: usize,
    probs: Vec<f64>,
}

impl PatternDistribution {
    pub fn new(order: usize, probs: Vec<f64>) -> Result<Self> {
        check_order(order)?;
        if probs.len() != factorial(order) {
            return Err(Error::DimensionMismatch {
                expected: factorial(order),
                actual: probs.len(),
            });
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0 + 1e-12) {
            return Err(Error::InvalidDistribution(
                "pattern probabilities must lie in [0, 1]".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "pattern probabilities sum to {total}"
            )));
        }
        Ok(Self { order, probs })
    }

    pub(crate) fn from_counts(order: usize, counts: &[usize]) -> Self {
        let n: usize = counts.iter().sum();
        Self {
            order,
            probs: counts.iter().map(|&c| c as f64 / n as f64).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, pattern: &Pattern) -> f64 {
        if pattern.order() != self.order {
            return 0.0;
        }
        self.probs[pattern.index()]
    }

    /// `sum_pi p_pi q_pi`, summed left to right in index order.
    pub fn cross_term(&self, other: &PatternDistribution) -> Result<f64> {
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                expected: self.order,
                actual: other.order,
            });
        }
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .fold(0.0, |acc, (p, q)| acc + p * q))
    }
}

/// Joint law of the X-pattern and the Y-pattern. Only nonzero entries are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPatternDistribution {
    order: usize,
    entries: BTreeMap<(usize, usize), f64>,
}

impl JointPatternDistribution {
    pub(crate) fn new(order: usize, entries: BTreeMap<(usize, usize), f64>) -> Self {
        Self { order, entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Probability that the X-pattern is `x` and the Y-pattern is `y`.
    pub fn prob(&self, x: &Pattern, y: &Pattern) -> f64 {
        self.entries
            .get(&(x.index(), y.index()))
            .copied()
            .unwrap_or(0.0)
    }

    /// Nonzero entries as `((x_index, y_index), probability)`.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Probability of coincident patterns.
    pub fn coincidence(&self) -> f64 {
        self.entries
            .iter()
            .filter(|((x, y), _)| x == y)
            .map(|(_, p)| p)
            .fold(0.0, |acc, p| acc + p)
    }

    pub fn marginal_x(&self) -> PatternDistribution {
        let mut probs = vec![0.0; factorial(self.order)];
        for (&(x, _), p) in &self.entries {
            probs[x] += p;
        }
        PatternDistribution {
            order: self.order,
            probs,
        }
    }

    pub fn marginal_y(&self) -> PatternDistribution {
        let mut probs = vec![0.0; factorial(self.order)];
        for (&(_, y), p) in &self.entries {
            probs[y] += p;
        }
        PatternDistribution {
            order: self.order,
            probs,
        }
    }
}

/// `(coincidence - cross) / (1 - cross)`.
pub fn opd_from_terms(coincidence: f64, cross_term: f64) -> Result<f64> {
    let denominator = 1.0 - cross_term;
    if denominator <= DEGENERATE_EPS {
        return Err(Error::DegenerateDistribution);
    }
    Ok((coincidence - cross_term) / denominator)
}

/// The three terms of the dependence formula together with its value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependenceTerms {
    pub value: f64,
    pub coincidence: f64,
    pub cross_term: f64,
}

impl DependenceTerms {
    pub fn from_terms(coincidence: f64, cross_term: f64) -> Result<Self> {
        Ok(Self {
            value: opd_from_terms(coincidence, cross_term)?,
            coincidence,
            cross_term,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula() {
        assert_eq!(opd_from_terms(1.0, 0.5).unwrap(), 1.0);
        assert_eq!(opd_from_terms(0.5, 0.5).unwrap(), 0.0);
        assert_eq!(opd_from_terms(0.0, 0.5).unwrap(), -1.0);
        assert_eq!(opd_from_terms(1.0, 1.0), Err(Error::DegenerateDistribution));
    }

    #[test]
    fn distribution_checks() {
        assert!(PatternDistribution::new(2, vec![0.5, 0.5]).is_ok());
        assert!(PatternDistribution::new(2, vec![0.5, 0.6]).is_err());
        assert!(PatternDistribution::new(2, vec![1.5, -0.5]).is_err());
        assert!(PatternDistribution::new(3, vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn joint_marginals() {
        let mut e = BTreeMap::new();
        e.insert((0, 0), 0.25);
        e.insert((0, 1), 0.25);
        e.insert((1, 1), 0.5);
        let j = JointPatternDistribution::new(2, e);
        assert_eq!(j.coincidence(), 0.75);
        assert_eq!(j.marginal_x().probs(), &[0.5, 0.5]);
        assert_eq!(j.marginal_y().probs(), &[0.25, 0.75]);
        let up = Pattern::increasing(2).unwrap();
        assert_eq!(j.prob(&up, &up), 0.25);
    }
}
