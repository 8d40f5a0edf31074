//! Densities that are finite sums of constants on order-constrained boxes.
//!
//! A model of order `d` lives on `R^{2d}` with coordinates laid out as
//! `(x_1, ..., x_d, y_1, ..., y_d)`. Each [`Cell`] contributes a constant
//! density on a product of [`Block`]s; a block either leaves its coordinates
//! free inside `[lo, hi]` or forces them to be weakly increasing in the listed
//! order (a chain). Everything the engine computes (mass, pattern laws,
//! orthant probabilities) factorises over blocks.
//!
//! Interval endpoints are treated as closed everywhere. Strict and weak
//! inequalities only differ on null sets.

mod orthant;
mod patterns;
mod sampling;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::{factorial, MAX_ORDER};

pub use orthant::{cdf, survival};
pub use patterns::{exact_opd, exact_terms, joint_pattern_distribution, marginal_pattern_distribution};
pub use sampling::{mc_probabilities, mc_probability, sample, McEstimate, McEvent, Samples};

/// Relative tolerance on total mass.
pub const MASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    /// Offset of this axis in the flat `2d` layout.
    pub fn offset(self, order: usize) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => order,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    /// Coordinates weakly increasing in the listed order.
    Chain,
    /// No ordering constraint.
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    axis: Axis,
    positions: Vec<usize>,
    lo: f64,
    hi: f64,
    kind: OrderKind,
}

impl Block {
    /// `positions` are 1-based positions on `axis`; for a chain they are listed
    /// from smallest to largest value.
    pub fn new(axis: Axis, positions: Vec<usize>, lo: f64, hi: f64, kind: OrderKind) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidBlock("no coordinates".into()));
        }
        if positions.contains(&0) {
            return Err(Error::InvalidBlock("positions are 1-based".into()));
        }
        let mut sorted = positions.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidBlock(format!(
                "duplicate coordinate in {positions:?}"
            )));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidBlock(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Self {
            axis,
            positions,
            lo,
            hi,
            kind,
        })
    }

    pub fn chain(axis: Axis, positions: &[usize], lo: f64, hi: f64) -> Result<Self> {
        Self::new(axis, positions.to_vec(), lo, hi, OrderKind::Chain)
    }

    pub fn free(axis: Axis, positions: &[usize], lo: f64, hi: f64) -> Result<Self> {
        Self::new(axis, positions.to_vec(), lo, hi, OrderKind::Free)
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Lebesgue measure of the block's region.
    pub fn volume(&self) -> f64 {
        let k = self.positions.len();
        let side = (self.hi - self.lo).powi(k as i32);
        match self.kind {
            OrderKind::Free => side,
            OrderKind::Chain => side / factorial(k) as f64,
        }
    }

    fn flat_indices(&self, order: usize) -> impl Iterator<Item = usize> + '_ {
        let offset = self.axis.offset(order);
        self.positions.iter().map(move |p| offset + p - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    blocks: Vec<Block>,
    value: f64,
}

impl Cell {
    pub fn new(blocks: Vec<Block>, value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidCell(format!(
                "density value must be positive, got {value}"
            )));
        }
        if blocks.is_empty() {
            return Err(Error::InvalidCell("no blocks".into()));
        }
        Ok(Self { blocks, value })
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn mass(&self) -> f64 {
        cell_mass(self)
    }

    fn check_coverage(&self, order: usize) -> Result<()> {
        let mut seen = vec![false; 2 * order];
        for b in &self.blocks {
            if let Some(&p) = b.positions.iter().find(|&&p| p > order) {
                return Err(Error::InvalidCell(format!(
                    "position {p} exceeds order {order}"
                )));
            }
            for i in b.flat_indices(order) {
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidCell(format!(
                        "coordinate {} covered twice",
                        coord_name(i, order)
                    )));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidCell(format!(
                "coordinate {} not covered",
                coord_name(i, order)
            )));
        }
        Ok(())
    }

    /// Per flat coordinate, the `[lo, hi]` interval of its block.
    fn intervals(&self, order: usize) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, 0.0); 2 * order];
        for b in &self.blocks {
            for i in b.flat_indices(order) {
                out[i] = (b.lo, b.hi);
            }
        }
        out
    }
}

pub(crate) fn coord_name(flat: usize, order: usize) -> String {
    if flat < order {
        format!("x{}", flat + 1)
    } else {
        format!("y{}", flat - order + 1)
    }
}

/// `value * prod(len^k / k!)` over chains and `len^k` over free blocks.
pub fn cell_mass(cell: &Cell) -> f64 {
    cell.blocks
        .iter()
        .fold(cell.value, |acc, b| acc * b.volume())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseUniformDensity {
    order: usize,
    cells: Vec<Cell>,
}

impl PiecewiseUniformDensity {
    /// Checks the per-cell structure only. Mass and disjointness are the job
    /// of [`validate`], so unnormalised pieces can still be built and evaluated.
    pub fn new(order: usize, cells: Vec<Cell>) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidCell(format!("order {order} outside 1..={MAX_ORDER}")));
        }
        if cells.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, c) in cells.iter().enumerate() {
            c.check_coverage(order)
                .map_err(|e| Error::InvalidCell(format!("cell {i}: {e}")))?;
        }
        Ok(Self { order, cells })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of coordinates, `2d`.
    pub fn dim(&self) -> usize {
        2 * self.order
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn total_mass(&self) -> f64 {
        self.cells.iter().map(cell_mass).sum()
    }

    /// Per-coordinate `[min lo, max hi]` over all cells.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        let mut bbox = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim()];
        for c in &self.cells {
            for (b, (lo, hi)) in bbox.iter_mut().zip(c.intervals(self.order)) {
                b.0 = b.0.min(lo);
                b.1 = b.1.max(hi);
            }
        }
        bbox
    }

    /// Sum of the cells of both models; used to reassemble densities from pieces.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                expected: self.order,
                actual: other.order,
            });
        }
        let mut cells = self.cells.clone();
        cells.extend(other.cells.iter().cloned());
        Self::new(self.order, cells)
    }

    pub fn validate(&self) -> Result<()> {
        validate(self)
    }
}

/// Density of `(head, tail)` with the two parts independent. Tail time
/// positions are shifted past the head's, so the layout is
/// `(x_head, x_tail, y_head, y_tail)`.
pub fn product_extend(head: &PiecewiseUniformDensity, tail: &PiecewiseUniformDensity) -> Result<PiecewiseUniformDensity> {
    let shift = head.order;
    let mut cells = Vec::with_capacity(head.cells.len() * tail.cells.len());
    for a in &head.cells {
        for b in &tail.cells {
            let mut blocks = a.blocks.clone();
            for blk in &b.blocks {
                let positions = blk.positions.iter().map(|p| p + shift).collect();
                blocks.push(Block::new(blk.axis, positions, blk.lo, blk.hi, blk.kind)?);
            }
            cells.push(Cell::new(blocks, a.value * b.value)?);
        }
    }
    PiecewiseUniformDensity::new(head.order + tail.order, cells)
}

/// Passes iff the total mass is 1 and no two cells overlap on a set of
/// positive measure.
pub fn validate(model: &PiecewiseUniformDensity) -> Result<()> {
    let mass = model.total_mass();
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::MassNotOne(mass));
    }
    for i in 0..model.cells.len() {
        for j in i + 1..model.cells.len() {
            if cells_overlap(&model.cells[i], &model.cells[j], model.order) {
                return Err(Error::OverlappingCells(i, j));
            }
        }
    }
    Ok(())
}

/// Whether the interiors of two cells intersect.
///
/// Per axis, the intersection is `{lo_i < v_i < hi_i} ∩ {v_a < v_b for every
/// chain edge a -> b of either cell}` with intersected intervals. That open set
/// is nonempty iff the edge relation is acyclic and `lo_a < hi_b` whenever
/// `b` is reachable from `a`.
fn cells_overlap(a: &Cell, b: &Cell, order: usize) -> bool {
    let ia = a.intervals(order);
    let ib = b.intervals(order);
    let bounds: Vec<(f64, f64)> = ia
        .iter()
        .zip(&ib)
        .map(|(p, q)| (p.0.max(q.0), p.1.min(q.1)))
        .collect();
    if bounds.iter().any(|(lo, hi)| lo >= hi) {
        return false;
    }
    [Axis::X, Axis::Y].into_iter().all(|axis| {
        let offset = axis.offset(order);
        let mut reach = vec![vec![false; order]; order];
        for cell in [a, b] {
            for blk in cell.blocks.iter().filter(|b| b.axis == axis && b.kind == OrderKind::Chain) {
                for w in blk.positions.windows(2) {
                    reach[w[0] - 1][w[1] - 1] = true;
                }
            }
        }
        for k in 0..order {
            for i in 0..order {
                if reach[i][k] {
                    for j in 0..order {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        (0..order).all(|i| {
            !reach[i][i]
                && (0..order).all(|j| !reach[i][j] || bounds[offset + i].0 < bounds[offset + j].1)
        })
    })
}
