//! Exact pattern laws of piecewise-uniform models.
//!
//! Inside one cell the axis coordinates are uniform on a product of simplices
//! and boxes. Blocks on disjoint intervals are ordered by their intervals;
//! blocks sharing an identical interval form a group whose coordinates are
//! exchangeable up to the chain constraints, so every total order consistent
//! with those chains has the same probability: one over the number of linear
//! extensions of a disjoint union of chains, `n! / prod(len_c!)`.

use std::collections::BTreeMap;

use super::{Axis, OrderKind, PiecewiseUniformDensity};
use crate::distribution::{DependenceTerms, JointPatternDistribution, PatternDistribution};
use crate::error::{Error, Result};
use crate::ordinal::{check_order, enumerate_patterns, factorial};

struct Group {
    offset: usize,
    positions: Vec<usize>,
    chains: Vec<Vec<usize>>,
    prob: f64,
}

impl PiecewiseUniformDensity {
    /// Dense pattern probabilities of `axis` conditional on cell `index`.
    pub fn cell_pattern_probs(&self, index: usize, axis: Axis) -> Result<Vec<f64>> {
        check_order(self.order)?;
        let groups = self.groups(index, axis)?;
        let patterns = enumerate_patterns(self.order)?;
        Ok(patterns
            .iter()
            .map(|p| {
                let ranks = p.ranks();
                let consistent = groups.iter().all(|g| {
                    g.positions
                        .iter()
                        .all(|&pos| ranks[pos - 1] > g.offset && ranks[pos - 1] <= g.offset + g.positions.len())
                        && g.chains
                            .iter()
                            .all(|c| c.windows(2).all(|w| ranks[w[0] - 1] < ranks[w[1] - 1]))
                });
                if consistent {
                    groups.iter().map(|g| g.prob).product()
                } else {
                    0.0
                }
            })
            .collect())
    }

    fn groups(&self, index: usize, axis: Axis) -> Result<Vec<Group>> {
        let cell = &self.cells[index];
        let mut blocks: Vec<_> = cell.blocks.iter().filter(|b| b.axis == axis).collect();
        blocks.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));

        let mut groups: Vec<Group> = Vec::new();
        let mut last: Option<(f64, f64)> = None;
        for b in blocks {
            let same = last == Some((b.lo, b.hi));
            if !same {
                if let Some((_, prev_hi)) = last {
                    if prev_hi > b.lo {
                        return Err(Error::AmbiguousBlockOrder { cell: index });
                    }
                }
                let offset = groups.last().map_or(0, |g| g.offset + g.positions.len());
                groups.push(Group {
                    offset,
                    positions: Vec::new(),
                    chains: Vec::new(),
                    prob: 1.0,
                });
                last = Some((b.lo, b.hi));
            }
            let g = groups.last_mut().expect("group pushed above");
            g.positions.extend_from_slice(&b.positions);
            if b.kind == OrderKind::Chain && b.positions.len() > 1 {
                g.chains.push(b.positions.clone());
            }
        }
        for g in &mut groups {
            let chain_perms: usize = g.chains.iter().map(|c| factorial(c.len())).product();
            g.prob = chain_perms as f64 / factorial(g.positions.len()) as f64;
        }
        Ok(groups)
    }
}

pub fn marginal_pattern_distribution(
    model: &PiecewiseUniformDensity,
    axis: Axis,
) -> Result<PatternDistribution> {
    let mut probs = vec![0.0; factorial(model.order)];
    for (i, cell) in model.cells.iter().enumerate() {
        let mass = cell.mass();
        for (acc, p) in probs.iter_mut().zip(model.cell_pattern_probs(i, axis)?) {
            *acc += mass * p;
        }
    }
    PatternDistribution::new(model.order, probs)
}

/// Joint law of `(Pi(X), Pi(Y))`. Within a cell the two axes are independent.
pub fn joint_pattern_distribution(model: &PiecewiseUniformDensity) -> Result<JointPatternDistribution> {
    let mut entries = BTreeMap::new();
    for (i, cell) in model.cells.iter().enumerate() {
        let mass = cell.mass();
        let px = model.cell_pattern_probs(i, Axis::X)?;
        let py = model.cell_pattern_probs(i, Axis::Y)?;
        for (a, pa) in px.iter().enumerate().filter(|(_, p)| **p > 0.0) {
            for (b, pb) in py.iter().enumerate().filter(|(_, p)| **p > 0.0) {
                *entries.entry((a, b)).or_insert(0.0) += mass * pa * pb;
            }
        }
    }
    Ok(JointPatternDistribution::new(model.order, entries))
}

/// Coincidence probability, cross term and dependence value, all exact.
pub fn exact_terms(model: &PiecewiseUniformDensity) -> Result<DependenceTerms> {
    let n = factorial(model.order);
    let mut coincidence = 0.0;
    let mut px_total = vec![0.0; n];
    let mut py_total = vec![0.0; n];
    for (i, cell) in model.cells.iter().enumerate() {
        let mass = cell.mass();
        let px = model.cell_pattern_probs(i, Axis::X)?;
        let py = model.cell_pattern_probs(i, Axis::Y)?;
        coincidence += mass * px.iter().zip(&py).fold(0.0, |acc, (a, b)| acc + a * b);
        for k in 0..n {
            px_total[k] += mass * px[k];
            py_total[k] += mass * py[k];
        }
    }
    let cross = px_total
        .iter()
        .zip(&py_total)
        .fold(0.0, |acc, (a, b)| acc + a * b);
    DependenceTerms::from_terms(coincidence, cross)
}

pub fn exact_opd(model: &PiecewiseUniformDensity) -> Result<f64> {
    exact_terms(model).map(|t| t.value)
}
