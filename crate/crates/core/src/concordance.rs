//! Concordance ordering: pointwise domination of the joint cdf and the joint
//! survival function, checked on a finite grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for domination checks.
pub const CONCORDANCE_TOL: f64 = 1e-12;

/// A joint law on `R^dim` that can report orthant probabilities.
pub trait OrthantProbability {
    fn dim(&self) -> usize;
    /// `P(Z <= point)`.
    fn cdf(&self, point: &[f64]) -> Result<f64>;
    /// `P(Z >= point)`.
    fn survival(&self, point: &[f64]) -> Result<f64>;
    /// Per-coordinate range of the support.
    fn bounding_box(&self) -> Vec<(f64, f64)>;
}

impl OrthantProbability for crate::density::PiecewiseUniformDensity {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn cdf(&self, point: &[f64]) -> Result<f64> {
        self.cdf(point)
    }

    fn survival(&self, point: &[f64]) -> Result<f64> {
        self.survival(point)
    }

    fn bounding_box(&self) -> Vec<(f64, f64)> {
        self.bounding_box()
    }
}

impl OrthantProbability for crate::discrete::DiscreteJoint {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn cdf(&self, point: &[f64]) -> Result<f64> {
        self.cdf(point)
    }

    fn survival(&self, point: &[f64]) -> Result<f64> {
        self.survival(point)
    }

    fn bounding_box(&self) -> Vec<(f64, f64)> {
        self.bounding_box()
    }
}

/// Cartesian product of per-coordinate point lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    axes: Vec<Vec<f64>>,
}

impl Grid {
    pub fn new(axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.is_empty() || axes.iter().any(|a| a.is_empty()) {
            return Err(Error::InvalidGrid("every axis needs at least one point".into()));
        }
        if axes.iter().flatten().any(|v| v.is_nan()) {
            return Err(Error::InvalidGrid("NaN grid point".into()));
        }
        Ok(Self { axes })
    }

    /// `counts[i]` equally spaced points on `ranges[i]`, endpoints included.
    pub fn uniform(ranges: &[(f64, f64)], counts: &[usize]) -> Result<Self> {
        if ranges.len() != counts.len() {
            return Err(Error::InvalidGrid(format!(
                "{} ranges but {} counts",
                ranges.len(),
                counts.len()
            )));
        }
        let axes = ranges
            .iter()
            .zip(counts)
            .map(|(&(lo, hi), &n)| {
                if n < 2 || !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::InvalidGrid(format!(
                        "need at least 2 points on a proper range, got {n} on [{lo}, {hi}]"
                    )));
                }
                Ok((0..n)
                    .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }

    /// `n` points per coordinate on `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::uniform(&vec![(lo, hi); dim], &vec![n; dim])
    }

    /// `counts[i]` points per coordinate over the joint bounding box of the
    /// given models, widened by `pad` on each side.
    pub fn around(boxes: &[Vec<(f64, f64)>], counts: &[usize], pad: f64) -> Result<Self> {
        let first = boxes.first().ok_or(Error::EmptyInput)?;
        let mut ranges: Vec<(f64, f64)> = first.clone();
        for b in &boxes[1..] {
            if b.len() != ranges.len() {
                return Err(Error::DimensionMismatch {
                    expected: ranges.len(),
                    actual: b.len(),
                });
            }
            for (r, &(lo, hi)) in ranges.iter_mut().zip(b) {
                r.0 = r.0.min(lo);
                r.1 = r.1.max(hi);
            }
        }
        for r in &mut ranges {
            r.0 -= pad;
            r.1 += pad;
        }
        Self::uniform(&ranges, counts)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Visits every grid point in row-major order (last coordinate fastest).
    pub fn for_each_point<E>(&self, mut f: impl FnMut(&[f64]) -> std::result::Result<(), E>) -> std::result::Result<(), E> {
        let mut idx = vec![0usize; self.axes.len()];
        let mut point: Vec<f64> = self.axes.iter().map(|a| a[0]).collect();
        loop {
            f(&point)?;
            let mut k = self.axes.len();
            loop {
                if k == 0 {
                    return Ok(());
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < self.axes[k].len() {
                    point[k] = self.axes[k][idx[k]];
                    break;
                }
                idx[k] = 0;
                point[k] = self.axes[k][0];
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcordanceReport {
    pub cdf_dominated: bool,
    pub survival_dominated: bool,
    /// `max (F_A - F_B)^+` over the grid.
    pub max_cdf_violation: f64,
    /// `max (S_A - S_B)^+` over the grid.
    pub max_survival_violation: f64,
    /// Points attaining the largest violation, cdf first, then survival.
    pub witness_points: Vec<Vec<f64>>,
    pub points_evaluated: usize,
    pub tolerance: f64,
}

impl ConcordanceReport {
    /// `A <=_C B`.
    pub fn dominated(&self) -> bool {
        self.cdf_dominated && self.survival_dominated
    }
}

/// Checks `F_A <= F_B` and `S_A <= S_B` at every grid point.
pub fn concordance_check<A, B>(a: &A, b: &B, grid: &Grid, tol: f64) -> Result<ConcordanceReport>
where
    A: OrthantProbability + ?Sized,
    B: OrthantProbability + ?Sized,
{
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    if grid.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: grid.dim(),
        });
    }
    let mut cdf_worst = (0.0, None);
    let mut surv_worst = (0.0, None);
    grid.for_each_point(|p| -> Result<()> {
        let dc = a.cdf(p)? - b.cdf(p)?;
        if dc > cdf_worst.0 {
            cdf_worst = (dc, Some(p.to_vec()));
        }
        let ds = a.survival(p)? - b.survival(p)?;
        if ds > surv_worst.0 {
            surv_worst = (ds, Some(p.to_vec()));
        }
        Ok(())
    })?;
    let cdf_dominated = cdf_worst.0 <= tol;
    let survival_dominated = surv_worst.0 <= tol;
    let mut witness_points = Vec::new();
    if !cdf_dominated {
        witness_points.extend(cdf_worst.1);
    }
    if !survival_dominated {
        witness_points.extend(surv_worst.1);
    }
    Ok(ConcordanceReport {
        cdf_dominated,
        survival_dominated,
        max_cdf_violation: cdf_worst.0,
        max_survival_violation: surv_worst.0,
        witness_points,
        points_evaluated: grid.len(),
        tolerance: tol,
    })
}
