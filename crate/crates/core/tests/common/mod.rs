//! Property suites shared by the `properties` test target and the acceptance
//! harness. Each runs a fixed-seed proptest runner and reports the first
//! counterexample as a string.

#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, RngSeed, TestCaseError, TestRunner};

use opdep::density::{exact_opd, Axis, Block, Cell, PiecewiseUniformDensity};
use opdep::discrete::{check_theorem_conditions, Atom, CoupledPair, DiscreteJoint, IndexSubset, Variant};
use opdep::estimator::{empirical_distribution, empirical_opd, TimeSeriesPair};
use opdep::ordinal::{factorial, pattern_of, Pattern};
use opdep::scenarios::{build_counterexample, example42_continuous, example42_continuous_tail, example43_pair};
use opdep::scenarios::{EXAMPLE43_C1, EXAMPLE43_C2};
use opdep::{Error, PatternDistribution};

pub type PropertyFn = fn(u32, u64) -> Result<(), String>;

/// `(name, suite)` for every property suite.
pub const PROPERTIES: &[(&str, PropertyFn)] = &[
    ("pattern validity against a rank oracle", pattern_validity),
    ("pattern index bijectivity", index_bijectivity),
    ("monotone-transform invariance of patterns", monotone_patterns),
    ("monotone-transform invariance of empirical_opd", monotone_opd),
    ("tie rule on constant windows", tie_rule_constants),
    ("normalization of pattern distributions", normalization),
    ("cdf/survival monotonicity", orthant_monotonicity),
    ("disintegration identity on example 4.3", disintegration),
    ("degenerate-denominator error path", degenerate_path),
    ("zero dependence of product densities", product_densities),
    ("tolerance monotonicity of the theorem checker", tolerance_monotone),
];

fn runner(cases: u32, seed: u64) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        rng_algorithm: RngAlgorithm::ChaCha,
        rng_seed: RngSeed::Fixed(seed),
        ..Config::default()
    })
}

fn run<S: Strategy>(
    cases: u32,
    seed: u64,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases, seed).run(&strategy, test).map_err(|e| e.to_string())
}

/// Stable argsort, then invert: the rank of each position with ties broken by position.
pub fn rank_oracle(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap().then(a.cmp(&b)));
    let mut ranks = vec![0; v.len()];
    for (r, &i) in idx.iter().enumerate() {
        ranks[i] = r + 1;
    }
    ranks
}

/// Integer-valued coordinates so ties are common.
fn tied_values(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-4i32..=4).prop_map(f64::from), len)
}

fn finite_values(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![tied_values(len.clone()), prop::collection::vec(-1e6f64..1e6, len)]
}

pub fn pattern_validity(cases: u32, seed: u64) -> Result<(), String> {
    run(cases, seed, finite_values(2..=8), |v| {
        let p = pattern_of(&v).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let mut sorted = p.ranks().to_vec();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (1..=v.len()).collect::<Vec<_>>());
        prop_assert_eq!(p.ranks().to_vec(), rank_oracle(&v));
        prop_assert!(p.index() < factorial(v.len()));
        Ok(())
    })
}

pub fn index_bijectivity(cases: u32, seed: u64) -> Result<(), String> {
    let s = (2usize..=8).prop_flat_map(|d| (Just(d), 0..factorial(d)));
    run(cases, seed, s, |(d, i)| {
        let p = Pattern::from_index(i, d).unwrap();
        prop_assert_eq!(p.index(), i);
        prop_assert_eq!(Pattern::from_ranks(p.ranks().to_vec()).unwrap(), p);
        Ok(())
    })
}

/// Strictly increasing maps that are exact (or at least injective) on small integers.
fn transform(kind: u8, v: f64) -> f64 {
    match kind % 4 {
        0 => 2.5 * v - 7.0,
        1 => v * v * v,
        2 => (v / 100.0).exp(),
        _ => v + 1e6,
    }
}

pub fn monotone_patterns(cases: u32, seed: u64) -> Result<(), String> {
    let s = (prop::collection::vec((-1000i32..=1000).prop_map(f64::from), 2..=8), any::<u8>());
    run(cases, seed, s, |(v, kind)| {
        let w: Vec<f64> = v.iter().map(|&x| transform(kind, x)).collect();
        prop_assert_eq!(pattern_of(&v).unwrap(), pattern_of(&w).unwrap());
        Ok(())
    })
}

pub fn monotone_opd(cases: u32, seed: u64) -> Result<(), String> {
    let s = (8usize..=60).prop_flat_map(|n| {
        (
            prop::collection::vec((-20i32..=20).prop_map(f64::from), n),
            prop::collection::vec((-20i32..=20).prop_map(f64::from), n),
            any::<u8>(),
            any::<u8>(),
            2usize..=4,
            1usize..=3,
        )
    });
    run(cases, seed, s, |(x, y, kx, ky, d, step)| {
        let a = empirical_opd(&TimeSeriesPair::new(x.clone(), y.clone()).unwrap(), d, step);
        let tx = x.iter().map(|&v| transform(kx, v)).collect();
        let ty = y.iter().map(|&v| transform(ky, v)).collect();
        let b = empirical_opd(&TimeSeriesPair::new(tx, ty).unwrap(), d, step);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
                prop_assert_eq!(a.coincidence.to_bits(), b.coincidence.to_bits());
                prop_assert_eq!(a.window_count, b.window_count);
            }
            (a, b) => prop_assert_eq!(a.err(), b.err()),
        }
        Ok(())
    })
}

pub fn tie_rule_constants(cases: u32, seed: u64) -> Result<(), String> {
    run(cases, seed, (2usize..=8, -1e9f64..1e9), |(d, c)| {
        let p = pattern_of(&vec![c; d]).unwrap();
        prop_assert_eq!(&p, &Pattern::increasing(d).unwrap());
        prop_assert_eq!(p.index(), 0);
        Ok(())
    })
}

/// Small random discrete laws of order `d` on an integer grid.
fn discrete_joint(d: usize, max_atoms: usize) -> impl Strategy<Value = DiscreteJoint> {
    prop::collection::vec((prop::collection::vec(0i32..=3, 2 * d), 1u32..=10), 1..=max_atoms).prop_map(
        move |raw| {
            let mut merged: BTreeMap<Vec<i32>, u32> = BTreeMap::new();
            for (p, w) in raw {
                *merged.entry(p).or_default() += w;
            }
            let total: u32 = merged.values().sum();
            let atoms = merged
                .into_iter()
                .map(|(p, w)| Atom::new(p.into_iter().map(f64::from).collect(), f64::from(w) / f64::from(total)))
                .collect();
            DiscreteJoint::new(d, atoms).unwrap()
        },
    )
}

pub fn normalization(cases: u32, seed: u64) -> Result<(), String> {
    let windows = (2usize..=5).prop_flat_map(|d| prop::collection::vec(finite_values(d..=d), 1..=40));
    let s = (windows, (2usize..=4).prop_flat_map(|d| discrete_joint(d, 8)));
    run(cases, seed, s, |(windows, joint)| {
        let patterns: Vec<Pattern> = windows.iter().map(|w| pattern_of(w).unwrap()).collect();
        let dist = empirical_distribution(&patterns).unwrap();
        prop_assert!((dist.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(dist.probs().iter().all(|&p| p >= 0.0));

        let j = joint.joint_pattern_distribution().unwrap();
        prop_assert!((j.total() - 1.0).abs() <= 1e-12);
        for m in [j.marginal_x(), j.marginal_y()] {
            prop_assert!((m.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
        let (px, py, c) = joint.pattern_distributions().unwrap();
        prop_assert!((c - j.coincidence()).abs() <= 1e-12);
        for (a, b) in px.probs().iter().zip(j.marginal_x().probs()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        for (a, b) in py.probs().iter().zip(j.marginal_y().probs()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        Ok(())
    })
}

fn fixture_densities() -> Vec<PiecewiseUniformDensity> {
    let ce = build_counterexample();
    let (c, cs) = example42_continuous(&example42_continuous_tail()).unwrap();
    vec![ce.f, ce.f_star, ce.h, ce.h_star, c, cs]
}

pub fn orthant_monotonicity(cases: u32, seed: u64) -> Result<(), String> {
    let models = fixture_densities();
    let discrete = example43_pair(EXAMPLE43_C1, EXAMPLE43_C2).unwrap().first();
    let s = (
        0..models.len(),
        prop::collection::vec(-0.5f64..3.5, 4),
        0usize..4,
        0.0f64..2.0,
    );
    run(cases, seed, s, |(m, p, k, delta)| {
        let model = &models[m];
        let mut q = p.clone();
        q[k] += delta;
        prop_assert!(model.cdf(&p).unwrap() <= model.cdf(&q).unwrap() + 1e-15);
        prop_assert!(model.survival(&p).unwrap() + 1e-15 >= model.survival(&q).unwrap());
        prop_assert!(discrete.cdf(&p).unwrap() <= discrete.cdf(&q).unwrap());
        prop_assert!(discrete.survival(&p).unwrap() >= discrete.survival(&q).unwrap());
        for v in [model.cdf(&p).unwrap(), model.survival(&p).unwrap()] {
            prop_assert!((-1e-15..=1.0 + 1e-12).contains(&v));
        }
        Ok(())
    })
}

/// `sum_c P((X,Y)^I = c) F^c(t) = P((X,Y)^{I^c} <= t)`, and the same for survival.
pub fn disintegration_holds(joint: &DiscreteJoint, subset: &IndexSubset, point: &[f64]) -> Result<(), String> {
    let d = joint.order();
    let cond = subset.flat_coords();
    let target = subset.complement().flat_coords();
    let conditions: Vec<(Vec<f64>, f64)> = if subset.is_empty() {
        vec![(vec![], 1.0)]
    } else {
        joint.marginal(subset).unwrap().atoms().iter().map(|a| (a.point.clone(), a.prob)).collect()
    };
    let (mut lower, mut upper) = (0.0, 0.0);
    for (c, p) in &conditions {
        lower += p * joint.conditional_cdf(subset, c, point).map_err(|e| e.to_string())?;
        upper += p * joint.conditional_survival(subset, c, point).map_err(|e| e.to_string())?;
    }
    let embed = |fill: f64| {
        let mut z = vec![fill; 2 * d];
        for (&t, &v) in target.iter().zip(point) {
            z[t] = v;
        }
        z
    };
    let (f, s) = (joint.cdf(&embed(f64::INFINITY)).unwrap(), joint.survival(&embed(f64::NEG_INFINITY)).unwrap());
    if (lower - f).abs() > 1e-12 || (upper - s).abs() > 1e-12 {
        return Err(format!(
            "I = {:?}, point {point:?}: mixture ({lower}, {upper}) vs joint ({f}, {s}); {} conditions over {:?}",
            subset.positions().collect::<Vec<_>>(),
            conditions.len(),
            cond
        ));
    }
    Ok(())
}

pub fn disintegration(cases: u32, seed: u64) -> Result<(), String> {
    let pair = example43_pair(EXAMPLE43_C1, EXAMPLE43_C2).unwrap();
    let laws = [pair.first(), pair.second()];
    let values = [0.0, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0];
    let s = (0usize..2, 0usize..3, prop::collection::vec(prop::sample::select(values.to_vec()), 4));
    run(cases, seed, s, |(law, mask, coords)| {
        let subset = IndexSubset::new(2, (1..=2).filter(|p| mask & (1 << (p - 1)) != 0)).unwrap();
        let point = &coords[..2 * subset.complement().len()];
        disintegration_holds(&laws[law], &subset, point).map_err(TestCaseError::fail)
    })
}

pub fn degenerate_path(cases: u32, seed: u64) -> Result<(), String> {
    let s = (
        prop::collection::vec(0.01f64..10.0, 4..=30),
        prop::collection::vec(0.01f64..10.0, 4..=30),
        2usize..=4,
    );
    run(cases, seed, s, |(dx, dy, d)| {
        // increasing series: every window has the same pattern in both
        let n = dx.len().min(dy.len());
        let cum = |v: &[f64]| v.iter().scan(0.0, |s, x| { *s += x; Some(*s) }).collect::<Vec<_>>();
        let (x, y) = (cum(&dx[..n]), cum(&dy[..n]));
        let result = empirical_opd(&TimeSeriesPair::new(x, y).unwrap(), d, 1);
        match n >= d {
            true => prop_assert_eq!(result.unwrap_err(), Error::DegenerateDistribution),
            false => prop_assert!(result.is_err()),
        }
        let point = PatternDistribution::new(d, {
            let mut p = vec![0.0; factorial(d)];
            p[n % factorial(d)] = 1.0;
            p
        })
        .unwrap();
        prop_assert_eq!(point.cross_term(&point).unwrap(), 1.0);
        prop_assert_eq!(opdep::distribution::opd_from_terms(1.0, 1.0), Err(Error::DegenerateDistribution));
        let atom = DiscreteJoint::from_pairs(2, &[([dx[0], dx[0] + dx[1], dy[0], dy[0] + dy[1]], 1.0)]).unwrap();
        prop_assert_eq!(atom.exact_terms().unwrap_err(), Error::DegenerateDistribution);
        Ok(())
    })
}

/// One mixture component on one axis: unit interval starting at `offset`.
#[derive(Debug, Clone)]
struct Component {
    chain: bool,
    down: bool,
    weight: u32,
}

fn axis_components() -> impl Strategy<Value = Vec<Component>> {
    prop::collection::vec(
        (any::<bool>(), any::<bool>(), 1u32..=5).prop_map(|(chain, down, weight)| Component { chain, down, weight }),
        1..=3,
    )
}

fn component_block(axis: Axis, c: &Component, k: usize) -> (Block, f64) {
    let lo = k as f64;
    let pos: &[usize] = if c.down { &[2, 1] } else { &[1, 2] };
    if c.chain {
        (Block::chain(axis, pos, lo, lo + 1.0).unwrap(), 0.5)
    } else {
        (Block::free(axis, pos, lo, lo + 1.0).unwrap(), 1.0)
    }
}

pub fn product_densities(cases: u32, seed: u64) -> Result<(), String> {
    run(cases, seed, (axis_components(), axis_components()), |(xs, ys)| {
        let (wx, wy): (u32, u32) = (xs.iter().map(|c| c.weight).sum(), ys.iter().map(|c| c.weight).sum());
        let mut cells = Vec::new();
        for (i, cx) in xs.iter().enumerate() {
            for (j, cy) in ys.iter().enumerate() {
                let (bx, vx) = component_block(Axis::X, cx, i);
                let (by, vy) = component_block(Axis::Y, cy, j);
                let mass = f64::from(cx.weight) / f64::from(wx) * f64::from(cy.weight) / f64::from(wy);
                cells.push(Cell::new(vec![bx, by], mass / (vx * vy)).unwrap());
            }
        }
        let model = PiecewiseUniformDensity::new(2, cells).unwrap();
        prop_assert!(model.validate().is_ok());
        match exact_opd(&model) {
            Ok(v) => prop_assert!(v.abs() <= 1e-12, "opd {}", v),
            Err(e) => prop_assert_eq!(e, Error::DegenerateDistribution),
        }
        Ok(())
    })
}

pub fn tolerance_monotone(cases: u32, seed: u64) -> Result<(), String> {
    let s = (discrete_joint(2, 3), discrete_joint(2, 3), 0.0f64..0.5, 0.0f64..0.5, any::<bool>());
    run(cases, seed, s, |(a, b, t1, dt, use_b)| {
        let pair = CoupledPair::independent(&a, &b).unwrap();
        let v = if use_b { Variant::B } else { Variant::A };
        let lo = check_theorem_conditions(&pair, v, t1).unwrap();
        let hi = check_theorem_conditions(&pair, v, t1 + dt).unwrap();
        prop_assert!(!lo.holds || hi.holds);
        prop_assert!(hi.violations.len() <= lo.violations.len());
        prop_assert_eq!(lo.holds, lo.violations.is_empty());
        Ok(())
    })
}
