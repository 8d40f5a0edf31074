//! Seeded sampling and Monte-Carlo probability estimates.
//!
//! The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`, and
//! uniforms come from `rand`'s standard `f64` conversion (53 random mantissa
//! bits), so a given seed yields identical samples on every platform. Each
//! draw picks a cell with probability proportional to its mass, then fills
//! each block: free coordinates are iid uniform on the interval, and chain
//! coordinates are iid uniforms sorted into the listed order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{OrderKind, PiecewiseUniformDensity};
use crate::error::{Error, Result};
use crate::ordinal::{check_order, pattern_index_of};

/// `n` points of dimension `dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    dim: usize,
    data: Vec<f64>,
}

impl Samples {
    pub(crate) fn from_data(dim: usize, data: Vec<f64>) -> Self {
        debug_assert!(dim > 0 && data.len().is_multiple_of(dim));
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

struct Sampler<'a> {
    model: &'a PiecewiseUniformDensity,
    cumulative: Vec<f64>,
    rng: ChaCha8Rng,
    scratch: Vec<f64>,
}

impl<'a> Sampler<'a> {
    fn new(model: &'a PiecewiseUniformDensity, seed: u64) -> Self {
        let mut acc = 0.0;
        let cumulative = model
            .cells
            .iter()
            .map(|c| {
                acc += c.mass();
                acc
            })
            .collect();
        Self {
            model,
            cumulative,
            rng: ChaCha8Rng::seed_from_u64(seed),
            scratch: Vec::new(),
        }
    }

    fn draw(&mut self, out: &mut [f64]) {
        let total = *self.cumulative.last().expect("model has cells");
        let u = self.rng.gen::<f64>() * total;
        let idx = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1);
        let order = self.model.order;
        for b in &self.model.cells[idx].blocks {
            let width = b.hi - b.lo;
            self.scratch.clear();
            for _ in 0..b.positions.len() {
                self.scratch.push(b.lo + width * self.rng.gen::<f64>());
            }
            if b.kind == OrderKind::Chain {
                self.scratch.sort_by(f64::total_cmp);
            }
            let offset = b.axis.offset(order);
            for (p, v) in b.positions.iter().zip(&self.scratch) {
                out[offset + p - 1] = *v;
            }
        }
    }
}

pub fn sample(model: &PiecewiseUniformDensity, n: usize, seed: u64) -> Samples {
    let dim = model.dim();
    let mut data = vec![0.0; n * dim];
    let mut sampler = Sampler::new(model, seed);
    for row in data.chunks_exact_mut(dim) {
        sampler.draw(row);
    }
    Samples { dim, data }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", content = "point", rename_all = "snake_case")]
pub enum McEvent {
    /// The X-pattern equals the Y-pattern.
    PatternCoincidence,
    /// `Z <= point` componentwise.
    LowerOrthant(Vec<f64>),
    /// `Z >= point` componentwise.
    UpperOrthant(Vec<f64>),
}

impl McEvent {
    fn check(&self, model: &PiecewiseUniformDensity) -> Result<()> {
        match self {
            McEvent::PatternCoincidence => check_order(model.order),
            McEvent::LowerOrthant(p) | McEvent::UpperOrthant(p) if p.len() != model.dim() => {
                Err(Error::DimensionMismatch {
                    expected: model.dim(),
                    actual: p.len(),
                })
            }
            _ => Ok(()),
        }
    }

    fn holds(&self, z: &[f64], order: usize) -> bool {
        match self {
            McEvent::PatternCoincidence => {
                pattern_index_of(&z[..order]) == pattern_index_of(&z[order..])
            }
            McEvent::LowerOrthant(p) => z.iter().zip(p).all(|(a, b)| a <= b),
            McEvent::UpperOrthant(p) => z.iter().zip(p).all(|(a, b)| a >= b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// `sqrt(p (1 - p) / n)` at the estimate.
    pub std_error: f64,
    pub n: usize,
}

impl McEstimate {
    fn from_hits(hits: usize, n: usize) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            estimate: p,
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
            n,
        }
    }
}

pub fn mc_probability(model: &PiecewiseUniformDensity, event: &McEvent, n: usize, seed: u64) -> Result<McEstimate> {
    mc_probabilities(model, std::slice::from_ref(event), n, seed).map(|mut v| v.remove(0))
}

/// Estimates several events on one common stream of `n` draws.
pub fn mc_probabilities(
    model: &PiecewiseUniformDensity,
    events: &[McEvent],
    n: usize,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    for e in events {
        e.check(model)?;
    }
    let mut hits = vec![0usize; events.len()];
    let mut sampler = Sampler::new(model, seed);
    let mut z = vec![0.0; model.dim()];
    for _ in 0..n {
        sampler.draw(&mut z);
        for (h, e) in hits.iter_mut().zip(events) {
            *h += usize::from(e.holds(&z, model.order));
        }
    }
    Ok(hits.into_iter().map(|h| McEstimate::from_hits(h, n)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Axis, Block, Cell};

    fn unit_free() -> PiecewiseUniformDensity {
        PiecewiseUniformDensity::new(
            2,
            vec![Cell::new(
                vec![
                    Block::free(Axis::X, &[1, 2], 0.0, 1.0).unwrap(),
                    Block::free(Axis::Y, &[1, 2], 0.0, 1.0).unwrap(),
                ],
                1.0,
            )
            .unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn deterministic_given_seed() {
        let m = unit_free();
        assert_eq!(sample(&m, 100, 7), sample(&m, 100, 7));
        assert_ne!(sample(&m, 100, 7), sample(&m, 100, 8));
    }

    #[test]
    fn uniform_mean() {
        let s = sample(&unit_free(), 1_000_000, 42);
        let mean = s.rows().map(|r| r[0]).sum::<f64>() / s.len() as f64;
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
        assert!(s.rows().flatten().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn chain_samples_respect_listing() {
        let m = PiecewiseUniformDensity::new(
            2,
            vec![Cell::new(
                vec![
                    Block::chain(Axis::X, &[2, 1], 3.0, 4.0).unwrap(),
                    Block::free(Axis::Y, &[1, 2], 0.0, 1.0).unwrap(),
                ],
                2.0,
            )
            .unwrap()],
        )
        .unwrap();
        let s = sample(&m, 1000, 1);
        assert!(s.rows().all(|r| r[1] <= r[0] && r[1] >= 3.0 && r[0] < 4.0));
    }

    #[test]
    fn full_orthant_and_errors() {
        let m = unit_free();
        let e = mc_probability(&m, &McEvent::LowerOrthant(vec![f64::INFINITY; 4]), 1000, 3).unwrap();
        assert_eq!((e.estimate, e.std_error), (1.0, 0.0));
        assert!(mc_probability(&m, &McEvent::LowerOrthant(vec![0.0; 3]), 10, 3).is_err());
        assert!(mc_probability(&m, &McEvent::PatternCoincidence, 0, 3).is_err());
    }

    #[test]
    fn coincidence_under_independence() {
        let e = mc_probability(&unit_free(), &McEvent::PatternCoincidence, 200_000, 11).unwrap();
        assert!((e.estimate - 0.5).abs() < 4.0 * e.std_error);
    }
}
