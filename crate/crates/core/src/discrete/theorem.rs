//! Checkers for the two sets of conditional concordance assumptions that
//! imply `OPD(X, Y) <= OPD(X*, Y*)`.
//!
//! The assumptions compare the law of `(X, Y)^{I^c}` and of `(X*, Y*)^{I^c}`
//! given the *same* conditioning event, which is only meaningful when both
//! vectors live on a common probability space. [`CoupledPair`] is that joint
//! law: a finite distribution over `(X, Y, X*, Y*)`.

use std::convert::Infallible;

use serde::{Deserialize, Serialize};

use super::{
    check_atoms, check_tail_support, join_points, merge_atoms, Atom, DiscreteJoint, IndexSubset, Orthant,
};
use crate::concordance::Grid;
use crate::error::{Error, Result};
use crate::ordinal::MAX_ORDER;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Four families, conditioning on either vector, over `I, I^c` nonempty.
    A,
    /// Two families, conditioning on the unstarred vector, over `I != J`.
    B,
}

/// Which vector the conditioning event is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionFamily {
    Unstarred,
    Starred,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Function {
    Cdf,
    Survival,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionViolation {
    pub subset: Vec<usize>,
    pub conditioned_on: ConditionFamily,
    pub function: Function,
    /// `(x_I, y_I)`.
    pub conditioning_point: Vec<f64>,
    /// `(x_{I^c}, y_{I^c})`.
    pub evaluation_point: Vec<f64>,
    /// Conditional value for `(X, Y)^{I^c}`.
    pub lhs: f64,
    /// Conditional value for `(X*, Y*)^{I^c}`.
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub variant: Variant,
    pub holds: bool,
    pub violations: Vec<ConditionViolation>,
    pub inequalities_checked: usize,
    /// Largest `lhs - rhs` seen, or 0.
    pub max_excess: f64,
    pub tolerance: f64,
}

/// Joint law of `(X, Y, X*, Y*)` with atoms laid out as
/// `(x_1..x_d, y_1..y_d, x*_1..x*_d, y*_1..y*_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPair {
    order: usize,
    atoms: Vec<Atom>,
}

impl CoupledPair {
    pub fn from_atoms(order: usize, atoms: Vec<Atom>) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidDistribution(format!("order {order} outside 1..={MAX_ORDER}")));
        }
        check_atoms(4 * order, &atoms)?;
        Ok(Self { order, atoms })
    }

    /// `(X, Y)` and `(X*, Y*)` independent.
    pub fn independent(first: &DiscreteJoint, second: &DiscreteJoint) -> Result<Self> {
        if first.order() != second.order() {
            return Err(Error::OrderMismatch {
                expected: first.order(),
                actual: second.order(),
            });
        }
        let mut atoms = Vec::with_capacity(first.atoms().len() * second.atoms().len());
        for a in first.atoms() {
            for b in second.atoms() {
                atoms.push(Atom::new([a.point.as_slice(), &b.point].concat(), a.prob * b.prob));
            }
        }
        Self::from_atoms(first.order(), atoms)
    }

    /// Both vectors share one tail `(X_2.., Y_2..) = (X*_2.., Y*_2..) = c_i`;
    /// given `c_i` the heads are independent with laws `heads[i]` and
    /// `heads_star[i]`.
    pub fn shared_mixture(
        tail_support: &[(Vec<f64>, f64)],
        heads: &[DiscreteJoint],
        heads_star: &[DiscreteJoint],
    ) -> Result<Self> {
        let t = check_tail_support(tail_support, heads.len())?;
        if heads_star.len() != heads.len() {
            return Err(Error::InvalidMixture(format!(
                "{} conditionals but {} starred conditionals",
                heads.len(),
                heads_star.len()
            )));
        }
        let h = heads[0].order();
        if let Some(c) = heads.iter().chain(heads_star).find(|c| c.order() != h) {
            return Err(Error::InvalidMixture(format!(
                "conditionals of orders {h} and {}",
                c.order()
            )));
        }
        let mut atoms = Vec::new();
        for (((c, q), head), head_star) in tail_support.iter().zip(heads).zip(heads_star) {
            for a in head.atoms() {
                for b in head_star.atoms() {
                    let mut point = join_points(&a.point, h, c, t);
                    point.extend(join_points(&b.point, h, c, t));
                    atoms.push(Atom::new(point, q * a.prob * b.prob));
                }
            }
        }
        Self::from_atoms(h + t, atoms)
    }

    /// Fixed heads with a tail shared by both vectors.
    pub fn shared_tail(head: &DiscreteJoint, head_star: &DiscreteJoint, tail: &DiscreteJoint) -> Result<Self> {
        let support: Vec<(Vec<f64>, f64)> = tail.atoms().iter().map(|a| (a.point.clone(), a.prob)).collect();
        let n = support.len();
        Self::shared_mixture(&support, &vec![head.clone(); n], &vec![head_star.clone(); n])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    fn half(&self, offset: usize) -> DiscreteJoint {
        let w = 2 * self.order;
        let atoms = merge_atoms(
            self.atoms
                .iter()
                .map(|a| Atom::new(a.point[offset..offset + w].to_vec(), a.prob))
                .collect(),
        );
        DiscreteJoint {
            order: self.order,
            atoms,
        }
    }

    /// Law of `(X, Y)`.
    pub fn first(&self) -> DiscreteJoint {
        self.half(0)
    }

    /// Law of `(X*, Y*)`.
    pub fn second(&self) -> DiscreteJoint {
        self.half(2 * self.order)
    }

    /// Exchanges the roles of `(X, Y)` and `(X*, Y*)`.
    pub fn swapped(&self) -> Self {
        let w = 2 * self.order;
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom::new([&a.point[w..], &a.point[..w]].concat(), a.prob))
            .collect();
        Self {
            order: self.order,
            atoms,
        }
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Every atom value of coordinate `k` in either vector, plus a sentinel one
/// unit beyond each end.
fn evaluation_axis(pair: &CoupledPair, k: usize) -> Vec<f64> {
    let w = 2 * pair.order;
    let vals = sorted_unique(pair.atoms.iter().flat_map(|a| [a.point[k], a.point[w + k]]).collect());
    let (lo, hi) = (vals[0], vals[vals.len() - 1]);
    sorted_unique([vec![lo - 1.0], vals, vec![hi + 1.0]].concat())
}

fn orthant_mass(atoms: &[&Atom], coords: &[usize], point: &[f64], orthant: Orthant) -> f64 {
    atoms
        .iter()
        .filter(|a| {
            coords
                .iter()
                .zip(point)
                .all(|(&c, &b)| orthant.contains(a.point[c], b))
        })
        .map(|a| a.prob)
        .fold(0.0, |acc, p| acc + p)
}

struct Checker<'a> {
    pair: &'a CoupledPair,
    tol: f64,
    checked: usize,
    max_excess: f64,
    violations: Vec<ConditionViolation>,
}

impl Checker<'_> {
    fn family(&mut self, subset: &IndexSubset, family: ConditionFamily) {
        let w = 2 * self.pair.order;
        let source = match family {
            ConditionFamily::Unstarred => 0,
            ConditionFamily::Starred => w,
        };
        let cond: Vec<usize> = subset.flat_coords().into_iter().map(|c| c + source).collect();
        let target = subset.complement().flat_coords();
        let target_star: Vec<usize> = target.iter().map(|c| c + w).collect();
        let grid = Grid::new(target.iter().map(|&k| evaluation_axis(self.pair, k)).collect())
            .expect("I^c is nonempty and atom values are finite");

        let given_points = merge_atoms(
            self.pair
                .atoms
                .iter()
                .map(|a| Atom::new(cond.iter().map(|&c| a.point[c]).collect(), a.prob))
                .collect(),
        );
        for given in given_points {
            let matching: Vec<&Atom> = self
                .pair
                .atoms
                .iter()
                .filter(|a| cond.iter().zip(&given.point).all(|(&c, &v)| a.point[c] == v))
                .collect();
            let mass = given.prob;
            for (function, orthant) in [(Function::Cdf, Orthant::Lower), (Function::Survival, Orthant::Upper)] {
                let _ = grid.for_each_point(|point| -> std::result::Result<(), Infallible> {
                    let lhs = orthant_mass(&matching, &target, point, orthant) / mass;
                    let rhs = orthant_mass(&matching, &target_star, point, orthant) / mass;
                    self.checked += 1;
                    self.max_excess = self.max_excess.max(lhs - rhs);
                    if lhs > rhs + self.tol {
                        self.violations.push(ConditionViolation {
                            subset: subset.positions().collect(),
                            conditioned_on: family,
                            function,
                            conditioning_point: given.point.clone(),
                            evaluation_point: point.to_vec(),
                            lhs,
                            rhs,
                        });
                    }
                    Ok(())
                });
            }
        }
    }
}

/// Checks every inequality of the chosen assumption set on the grid of atom
/// coordinate values. Conditioning values are drawn from the atoms, so every
/// conditioning event has positive mass.
pub fn check_theorem_conditions(pair: &CoupledPair, variant: Variant, tol: f64) -> Result<ConditionReport> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidDistribution(format!("tolerance {tol}")));
    }
    let d = pair.order;
    let mut checker = Checker {
        pair,
        tol,
        checked: 0,
        max_excess: 0.0,
        violations: Vec::new(),
    };
    for subset in IndexSubset::all(d).filter(|s| s.len() < d) {
        match variant {
            Variant::A if !subset.is_empty() => {
                checker.family(&subset, ConditionFamily::Unstarred);
                checker.family(&subset, ConditionFamily::Starred);
            }
            Variant::A => {}
            Variant::B => checker.family(&subset, ConditionFamily::Unstarred),
        }
    }
    log::debug!(
        "variant {variant:?}: {} inequalities, {} violations",
        checker.checked,
        checker.violations.len()
    );
    Ok(ConditionReport {
        variant,
        holds: checker.violations.is_empty(),
        violations: checker.violations,
        inequalities_checked: checker.checked,
        max_excess: checker.max_excess,
        tolerance: tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremConclusion {
    pub opd: f64,
    pub opd_star: f64,
    /// `opd <= opd_star + tol`.
    pub holds: bool,
}

pub fn theorem_conclusion(pair: &CoupledPair, tol: f64) -> Result<TheoremConclusion> {
    let opd = pair.first().exact_terms()?.value;
    let opd_star = pair.second().exact_terms()?.value;
    Ok(TheoremConclusion {
        opd,
        opd_star,
        holds: opd <= opd_star + tol,
    })
}
