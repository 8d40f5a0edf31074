//! Finite discrete joint laws of `(X, Y)` and their conditional distribution
//! functions.
//!
//! Points are laid out as `(x_1, ..., x_d, y_1, ..., y_d)` like the density
//! models. Conditioning is exact matching on atom coordinates, which is the
//! regular conditional distribution for a finite law.

mod theorem;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::density::Samples;
use crate::distribution::{DependenceTerms, JointPatternDistribution, PatternDistribution};
use crate::error::{Error, Result};
use crate::ordinal::{check_order, factorial, pattern_index_of, MAX_ORDER};

pub use theorem::{
    check_theorem_conditions, theorem_conclusion, ConditionFamily, ConditionReport, ConditionViolation, Function,
    CoupledPair, TheoremConclusion, Variant,
};

/// Tolerance on total probability.
pub const PROB_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: Vec<f64>,
    pub prob: f64,
}

impl Atom {
    pub fn new(point: Vec<f64>, prob: f64) -> Self {
        Self { point, prob }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJoint {
    order: usize,
    atoms: Vec<Atom>,
}

fn cmp_points(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

pub(crate) fn check_atoms(dim: usize, atoms: &[Atom]) -> Result<()> {
    if atoms.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (i, a) in atoms.iter().enumerate() {
        if a.point.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: a.point.len(),
            });
        }
        if a.point.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDistribution(format!("atom {i} has a non-finite coordinate")));
        }
        if !(a.prob.is_finite() && a.prob > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "atom {i} has probability {}",
                a.prob
            )));
        }
    }
    let total: f64 = atoms.iter().map(|a| a.prob).sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
    }
    let mut sorted: Vec<&[f64]> = atoms.iter().map(|a| a.point.as_slice()).collect();
    sorted.sort_by(|a, b| cmp_points(a, b));
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidDistribution(format!("duplicate atom at {:?}", w[0])));
    }
    Ok(())
}

/// Sums the probabilities of equal points and sorts them.
pub(crate) fn merge_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| cmp_points(&a.point, &b.point));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(last) if last.point == a.point => last.prob += a.prob,
            _ => out.push(a),
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) enum Orthant {
    Lower,
    Upper,
}

impl Orthant {
    fn contains(self, value: f64, bound: f64) -> bool {
        match self {
            Orthant::Lower => value <= bound,
            Orthant::Upper => value >= bound,
        }
    }
}

/// `P(Z[target] in orthant(point) | Z[c] = v for (c, v) in cond)`.
pub(crate) fn conditional_orthant(
    atoms: &[Atom],
    cond: &[(usize, f64)],
    target: &[usize],
    point: &[f64],
    orthant: Orthant,
) -> Result<f64> {
    let mut mass = 0.0;
    let mut hit = 0.0;
    for a in atoms {
        if cond.iter().all(|&(c, v)| a.point[c] == v) {
            mass += a.prob;
            if target
                .iter()
                .zip(point)
                .all(|(&t, &b)| orthant.contains(a.point[t], b))
            {
                hit += a.prob;
            }
        }
    }
    if mass <= 0.0 {
        return Err(Error::ZeroMassCondition);
    }
    Ok(hit / mass)
}

/// A set of time indices `I ⊆ {1, ..., d}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexSubset {
    order: usize,
    positions: BTreeSet<usize>,
}

impl IndexSubset {
    pub fn new(order: usize, positions: impl IntoIterator<Item = usize>) -> Result<Self> {
        let positions: BTreeSet<usize> = positions.into_iter().collect();
        if let Some(&p) = positions.iter().find(|&&p| p == 0 || p > order) {
            return Err(Error::InvalidSubset(format!("position {p} outside 1..={order}")));
        }
        Ok(Self { order, positions })
    }

    pub fn empty(order: usize) -> Self {
        Self {
            order,
            positions: BTreeSet::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.positions.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn complement(&self) -> Self {
        Self {
            order: self.order,
            positions: (1..=self.order).filter(|p| !self.positions.contains(p)).collect(),
        }
    }

    /// Flat coordinates `(x_i for i in I, y_i for i in I)` in a `2d` layout.
    pub fn flat_coords(&self) -> Vec<usize> {
        let xs = self.positions.iter().map(|p| p - 1);
        let ys = self.positions.iter().map(|p| self.order + p - 1);
        xs.chain(ys).collect()
    }

    /// All subsets of `{1, ..., d}` in order of their bitmask.
    pub fn all(order: usize) -> impl Iterator<Item = IndexSubset> {
        (0u32..(1 << order)).map(move |mask| IndexSubset {
            order,
            positions: (1..=order).filter(|p| mask & (1 << (p - 1)) != 0).collect(),
        })
    }
}

impl DiscreteJoint {
    pub fn new(order: usize, atoms: Vec<Atom>) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidDistribution(format!("order {order} outside 1..={MAX_ORDER}")));
        }
        check_atoms(2 * order, &atoms)?;
        Ok(Self { order, atoms })
    }

    /// Convenience constructor from `(point, prob)` pairs.
    pub fn from_pairs<P: AsRef<[f64]>>(order: usize, pairs: &[(P, f64)]) -> Result<Self> {
        Self::new(
            order,
            pairs
                .iter()
                .map(|(p, q)| Atom::new(p.as_ref().to_vec(), *q))
                .collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        2 * self.order
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    fn check_dim(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: point.len(),
            });
        }
        Ok(())
    }

    fn orthant(&self, point: &[f64], orthant: Orthant) -> Result<f64> {
        self.check_dim(point)?;
        let target: Vec<usize> = (0..self.dim()).collect();
        conditional_orthant(&self.atoms, &[], &target, point, orthant)
    }

    pub fn cdf(&self, point: &[f64]) -> Result<f64> {
        self.orthant(point, Orthant::Lower)
    }

    pub fn survival(&self, point: &[f64]) -> Result<f64> {
        self.orthant(point, Orthant::Upper)
    }

    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        (0..self.dim())
            .map(|k| {
                self.atoms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
                    (lo.min(a.point[k]), hi.max(a.point[k]))
                })
            })
            .collect()
    }

    fn conditional(
        &self,
        subset: &IndexSubset,
        given: &[f64],
        point: &[f64],
        orthant: Orthant,
    ) -> Result<f64> {
        if subset.order() != self.order {
            return Err(Error::InvalidSubset(format!(
                "subset of order {} used with a law of order {}",
                subset.order(),
                self.order
            )));
        }
        let cond_coords = subset.flat_coords();
        let target = subset.complement().flat_coords();
        if given.len() != cond_coords.len() {
            return Err(Error::DimensionMismatch {
                expected: cond_coords.len(),
                actual: given.len(),
            });
        }
        if point.len() != target.len() {
            return Err(Error::DimensionMismatch {
                expected: target.len(),
                actual: point.len(),
            });
        }
        let cond: Vec<(usize, f64)> = cond_coords.into_iter().zip(given.iter().copied()).collect();
        conditional_orthant(&self.atoms, &cond, &target, point, orthant)
    }

    /// Cdf of `(X, Y)^{I^c}` given `(X, Y)^I = given`. Both `given` and
    /// `point` list the x-coordinates first, then the y-coordinates.
    pub fn conditional_cdf(&self, subset: &IndexSubset, given: &[f64], point: &[f64]) -> Result<f64> {
        self.conditional(subset, given, point, Orthant::Lower)
    }

    pub fn conditional_survival(&self, subset: &IndexSubset, given: &[f64], point: &[f64]) -> Result<f64> {
        self.conditional(subset, given, point, Orthant::Upper)
    }

    /// Law of `(X, Y)^I` as a joint of order `|I|`.
    pub fn marginal(&self, subset: &IndexSubset) -> Result<DiscreteJoint> {
        if subset.is_empty() {
            return Err(Error::InvalidSubset("marginal over the empty set".into()));
        }
        let coords = subset.flat_coords();
        let atoms = merge_atoms(
            self.atoms
                .iter()
                .map(|a| Atom::new(coords.iter().map(|&c| a.point[c]).collect(), a.prob))
                .collect(),
        );
        DiscreteJoint::new(subset.len(), atoms)
    }

    /// Law of the single coordinate `flat`, as sorted `(value, prob)` pairs.
    pub fn coordinate_pmf(&self, flat: usize) -> Vec<(f64, f64)> {
        merge_atoms(
            self.atoms
                .iter()
                .map(|a| Atom::new(vec![a.point[flat]], a.prob))
                .collect(),
        )
        .into_iter()
        .map(|a| (a.point[0], a.prob))
        .collect()
    }

    /// Law of the `X` vector (`axis_offset = 0`) or the `Y` vector (`axis_offset = d`).
    pub fn axis_pmf(&self, axis_offset: usize) -> Vec<Atom> {
        merge_atoms(
            self.atoms
                .iter()
                .map(|a| Atom::new(a.point[axis_offset..axis_offset + self.order].to_vec(), a.prob))
                .collect(),
        )
    }

    pub fn pattern_distributions(&self) -> Result<(PatternDistribution, PatternDistribution, f64)> {
        check_order(self.order)?;
        let d = self.order;
        let mut px = vec![0.0; factorial(d)];
        let mut py = vec![0.0; factorial(d)];
        let mut coincidence = 0.0;
        for a in &self.atoms {
            let (ix, iy) = (pattern_index_of(&a.point[..d]), pattern_index_of(&a.point[d..]));
            px[ix] += a.prob;
            py[iy] += a.prob;
            if ix == iy {
                coincidence += a.prob;
            }
        }
        Ok((PatternDistribution::new(d, px)?, PatternDistribution::new(d, py)?, coincidence))
    }

    pub fn joint_pattern_distribution(&self) -> Result<JointPatternDistribution> {
        check_order(self.order)?;
        let d = self.order;
        let mut entries = BTreeMap::new();
        for a in &self.atoms {
            let key = (pattern_index_of(&a.point[..d]), pattern_index_of(&a.point[d..]));
            *entries.entry(key).or_insert(0.0) += a.prob;
        }
        Ok(JointPatternDistribution::new(d, entries))
    }

    /// `n` draws, seeded like the density sampler: ChaCha8 via
    /// `seed_from_u64`, one uniform per draw against cumulative atom mass.
    pub fn sample(&self, n: usize, seed: u64) -> Samples {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = self
            .atoms
            .iter()
            .map(|a| {
                acc += a.prob;
                acc
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = Vec::with_capacity(n * self.dim());
        for _ in 0..n {
            let u = rng.gen::<f64>() * acc;
            let i = cumulative.partition_point(|&c| c <= u).min(self.atoms.len() - 1);
            data.extend_from_slice(&self.atoms[i].point);
        }
        Samples::from_data(self.dim(), data)
    }

    pub fn exact_terms(&self) -> Result<DependenceTerms> {
        let (px, py, coincidence) = self.pattern_distributions()?;
        DependenceTerms::from_terms(coincidence, px.cross_term(&py)?)
    }
}

pub fn cdf(dist: &DiscreteJoint, point: &[f64]) -> Result<f64> {
    dist.cdf(point)
}

pub fn survival(dist: &DiscreteJoint, point: &[f64]) -> Result<f64> {
    dist.survival(point)
}

pub fn conditional_cdf(dist: &DiscreteJoint, subset: &IndexSubset, given: &[f64], point: &[f64]) -> Result<f64> {
    dist.conditional_cdf(subset, given, point)
}

pub fn conditional_survival(
    dist: &DiscreteJoint,
    subset: &IndexSubset,
    given: &[f64],
    point: &[f64],
) -> Result<f64> {
    dist.conditional_survival(subset, given, point)
}

/// Pattern probabilities by summation over atoms, ties ranked by position.
pub fn exact_opd_discrete(dist: &DiscreteJoint) -> Result<f64> {
    dist.exact_terms().map(|t| t.value)
}

/// Concatenates a head point of order `h` and a tail point of order `t` into
/// `(x_head, x_tail, y_head, y_tail)`.
pub(crate) fn join_points(head: &[f64], h: usize, tail: &[f64], t: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * (h + t));
    out.extend_from_slice(&head[..h]);
    out.extend_from_slice(&tail[..t]);
    out.extend_from_slice(&head[h..]);
    out.extend_from_slice(&tail[t..]);
    out
}

pub(crate) fn check_tail_support(tail_support: &[(Vec<f64>, f64)], n_components: usize) -> Result<usize> {
    if tail_support.is_empty() {
        return Err(Error::InvalidMixture("empty tail support".into()));
    }
    if tail_support.len() != n_components {
        return Err(Error::InvalidMixture(format!(
            "{} tail points but {} conditionals",
            tail_support.len(),
            n_components
        )));
    }
    let dim = tail_support[0].0.len();
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::InvalidMixture(format!("tail point of odd dimension {dim}")));
    }
    let atoms: Vec<Atom> = tail_support
        .iter()
        .map(|(c, p)| Atom::new(c.clone(), *p))
        .collect();
    check_atoms(dim, &atoms).map_err(|e| Error::InvalidMixture(format!("tail support: {e}")))?;
    Ok(dim / 2)
}

/// Joint of `(X_1.., X_2.., Y_1.., Y_2..)` where the tail `(X_2, Y_2)` takes
/// value `c_i` with the given probability and, given `c_i`, the head follows
/// `conditionals[i]`.
pub fn mixture_from_conditionals(
    tail_support: &[(Vec<f64>, f64)],
    conditionals: &[DiscreteJoint],
) -> Result<DiscreteJoint> {
    let t = check_tail_support(tail_support, conditionals.len())?;
    let h = conditionals[0].order;
    if let Some(c) = conditionals.iter().find(|c| c.order != h) {
        return Err(Error::InvalidMixture(format!(
            "conditionals of orders {h} and {}",
            c.order
        )));
    }
    let mut atoms = Vec::new();
    for ((c, q), cond) in tail_support.iter().zip(conditionals) {
        for a in &cond.atoms {
            atoms.push(Atom::new(join_points(&a.point, h, c, t), q * a.prob));
        }
    }
    DiscreteJoint::new(h + t, atoms)
}

/// `head` and `tail` independent, laid out as `(x_head, x_tail, y_head, y_tail)`.
pub fn product_extend(head: &DiscreteJoint, tail: &DiscreteJoint) -> Result<DiscreteJoint> {
    let support: Vec<(Vec<f64>, f64)> = tail.atoms.iter().map(|a| (a.point.clone(), a.prob)).collect();
    let conditionals = vec![head.clone(); support.len()];
    mixture_from_conditionals(&support, &conditionals)
}
