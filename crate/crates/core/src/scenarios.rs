//! The counterexample and the two worked examples as fixed models, with
//! end-to-end verification routines that produce [`ScenarioReport`]s.
//!
//! Every check is exact; nothing on the pass/fail path is random.

use serde::{Deserialize, Serialize};

use crate::concordance::{concordance_check, Grid, OrthantProbability, CONCORDANCE_TOL};
use crate::density::{self, exact_terms, Axis, Block, Cell, PiecewiseUniformDensity};
use crate::discrete::{
    check_theorem_conditions, theorem_conclusion, CoupledPair, DiscreteJoint, IndexSubset, Variant,
};
use crate::error::Result;

/// Absolute tolerance of every equality check in a report.
pub const SCENARIO_TOL: f64 = 1e-12;

pub const SCENARIOS: [&str; 3] = ["counterexample", "example42", "example43"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioReport {
    pub scenario: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl ScenarioReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Builder {
    scenario: String,
    checks: Vec<Check>,
}

impl Builder {
    fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.into(),
            checks: Vec::new(),
        }
    }

    fn push(&mut self, name: String, expected: String, actual: String, pass: bool) {
        log::debug!("{}: {name}: expected {expected}, got {actual}", self.scenario);
        self.checks.push(Check {
            name,
            expected,
            actual,
            pass,
        });
    }

    fn value(&mut self, name: impl Into<String>, expected: f64, actual: Result<f64>) {
        match actual {
            Ok(a) => {
                let pass = (a - expected).abs() <= SCENARIO_TOL;
                self.push(name.into(), expected.to_string(), a.to_string(), pass)
            }
            Err(e) => self.push(name.into(), expected.to_string(), format!("error: {e}"), false),
        }
    }

    fn flag(&mut self, name: impl Into<String>, expected: bool, actual: Result<bool>) {
        match actual {
            Ok(a) => self.push(name.into(), expected.to_string(), a.to_string(), a == expected),
            Err(e) => self.push(name.into(), expected.to_string(), format!("error: {e}"), false),
        }
    }

    fn finish(self) -> ScenarioReport {
        let pass = self.checks.iter().all(|c| c.pass);
        ScenarioReport {
            scenario: self.scenario,
            checks: self.checks,
            pass,
        }
    }
}

fn chain(axis: Axis, positions: &[usize], lo: f64, hi: f64) -> Block {
    Block::chain(axis, positions, lo, hi).expect("fixture block")
}

fn free(axis: Axis, positions: &[usize], lo: f64, hi: f64) -> Block {
    Block::free(axis, positions, lo, hi).expect("fixture block")
}

fn model(order: usize, cells: Vec<(Vec<Block>, f64)>) -> PiecewiseUniformDensity {
    let cells = cells
        .into_iter()
        .map(|(b, v)| Cell::new(b, v).expect("fixture cell"))
        .collect();
    PiecewiseUniformDensity::new(order, cells).expect("fixture model")
}

fn joint(order: usize, pairs: &[(&[f64], f64)]) -> DiscreteJoint {
    DiscreteJoint::from_pairs(order, pairs).expect("fixture distribution")
}

/// The two densities `f`, `f*` and their differing parts `h`, `h*`.
///
/// `h` and `h*` keep density value 1 on two cells each, so they carry mass
/// 1/2 and are not normalised.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub f: PiecewiseUniformDensity,
    pub f_star: PiecewiseUniformDensity,
    pub h: PiecewiseUniformDensity,
    pub h_star: PiecewiseUniformDensity,
}

pub fn build_counterexample() -> Counterexample {
    use Axis::{X, Y};
    let (lo, hi) = ((0.0, 1.0), (1.0, 2.0));
    let up = [1, 2];
    let down = [2, 1];
    let cell = |xs: &[usize], xr: (f64, f64), ys: &[usize], yr: (f64, f64)| {
        (vec![chain(X, xs, xr.0, xr.1), chain(Y, ys, yr.0, yr.1)], 1.0)
    };
    let f = [
        cell(&up, lo, &up, hi),
        cell(&down, lo, &down, hi),
        cell(&up, hi, &up, lo),
        cell(&down, hi, &down, lo),
    ];
    let f_star = [
        cell(&up, lo, &down, lo),
        cell(&down, lo, &down, hi),
        cell(&up, hi, &up, lo),
        cell(&down, hi, &up, hi),
    ];
    Counterexample {
        h: model(2, vec![f[0].clone(), f[3].clone()]),
        h_star: model(2, vec![f_star[0].clone(), f_star[3].clone()]),
        f: model(2, f.to_vec()),
        f_star: model(2, f_star.to_vec()),
    }
}

/// Largest `|G_a - G_b|` where `G` is the cdf (and then the survival
/// function) of the sub-vector at `coords_a` / `coords_b`, over `grid`.
fn marginal_gap<A, B>(a: &A, coords_a: &[usize], b: &B, coords_b: &[usize], grid: &Grid) -> Result<f64>
where
    A: OrthantProbability + ?Sized,
    B: OrthantProbability + ?Sized,
{
    let embed = |dim: usize, coords: &[usize], p: &[f64], fill: f64| {
        let mut z = vec![fill; dim];
        for (&c, &v) in coords.iter().zip(p) {
            z[c] = v;
        }
        z
    };
    let mut gap: f64 = 0.0;
    grid.for_each_point(|p| -> Result<()> {
        let inf = f64::INFINITY;
        let fa = a.cdf(&embed(a.dim(), coords_a, p, inf))?;
        let fb = b.cdf(&embed(b.dim(), coords_b, p, inf))?;
        let sa = a.survival(&embed(a.dim(), coords_a, p, -inf))?;
        let sb = b.survival(&embed(b.dim(), coords_b, p, -inf))?;
        gap = gap.max((fa - fb).abs()).max((sa - sb).abs());
        Ok(())
    })?;
    Ok(gap)
}

pub fn verify_counterexample() -> ScenarioReport {
    let m = build_counterexample();
    let mut r = Builder::new("counterexample");

    let line = Grid::cube(1, -0.5, 2.5, 13).expect("grid");
    let plane = Grid::cube(2, -0.5, 2.5, 13).expect("grid");
    let (x, y) = ([0, 1], [2, 3]);
    r.value("X equal in law to X* (max cdf/survival gap)", 0.0, marginal_gap(&m.f, &x, &m.f_star, &x, &plane));
    r.value("Y equal in law to Y* (max cdf/survival gap)", 0.0, marginal_gap(&m.f, &y, &m.f_star, &y, &plane));
    for (name, model) in [("f", &m.f), ("f*", &m.f_star)] {
        r.value(
            format!("{name}: X1 equal in law to X2"),
            0.0,
            marginal_gap(model, &[0], model, &[1], &line),
        );
        r.value(
            format!("{name}: Y1 equal in law to Y2"),
            0.0,
            marginal_gap(model, &[2], model, &[3], &line),
        );
    }
    for (name, model) in [("f", &m.f), ("f*", &m.f_star)] {
        r.flag(format!("{name} is a valid density"), true, model.validate().map(|_| true));
    }

    let grid = Grid::cube(4, -0.5, 2.5, 9).expect("grid");
    let forward = concordance_check(&m.f, &m.f_star, &grid, CONCORDANCE_TOL);
    let dominated = forward.as_ref().map(|c| c.dominated()).unwrap_or(false);
    r.value("max (F_f - F_f*)+ on 9^4 grid", 0.0, forward.as_ref().map(|c| c.max_cdf_violation).map_err(Clone::clone));
    r.value(
        "max (S_f - S_f*)+ on 9^4 grid",
        0.0,
        forward.as_ref().map(|c| c.max_survival_violation).map_err(Clone::clone),
    );
    r.flag(
        "f <=_C f* on 9^4 grid",
        true,
        forward.as_ref().map(|c| c.dominated()).map_err(Clone::clone),
    );
    r.flag(
        "h <=_C h* on 9^4 grid",
        true,
        concordance_check(&m.h, &m.h_star, &grid, CONCORDANCE_TOL).map(|c| c.dominated()),
    );
    r.flag(
        "f* <=_C f fails on 9^4 grid",
        true,
        concordance_check(&m.f_star, &m.f, &grid, CONCORDANCE_TOL).map(|c| !c.dominated()),
    );
    let witness = [1.0, 1.0, 0.5, 1.5];
    r.value("F_h at (1, 1, 0.5, 1.5)", 0.0, m.h.cdf(&witness));
    r.value("F_h* at (1, 1, 0.5, 1.5)", 0.0625, m.h_star.cdf(&witness));

    let terms = exact_terms(&m.f);
    let terms_star = exact_terms(&m.f_star);
    r.value("P(Pi(X) = Pi(Y)) under f", 1.0, terms.as_ref().map(|t| t.coincidence).map_err(Clone::clone));
    r.value(
        "P(Pi(X*) = Pi(Y*)) under f*",
        0.5,
        terms_star.as_ref().map(|t| t.coincidence).map_err(Clone::clone),
    );
    r.value("cross term under f", 0.5, terms.as_ref().map(|t| t.cross_term).map_err(Clone::clone));
    r.value("cross term under f*", 0.5, terms_star.as_ref().map(|t| t.cross_term).map_err(Clone::clone));
    r.value("OPD under f", 1.0, terms.as_ref().map(|t| t.value).map_err(Clone::clone));
    r.value("OPD under f*", 0.0, terms_star.as_ref().map(|t| t.value).map_err(Clone::clone));
    let violated = match (&terms, &terms_star) {
        (Ok(t), Ok(s)) => Ok(dominated && t.value > s.value),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    r.flag("concordance ordering holds yet OPD decreases", true, violated);
    r.finish()
}

/// `(X1, Y1)` and `(X1*, Y1*)`.
pub fn table1_heads() -> (DiscreteJoint, DiscreteJoint) {
    (
        joint(1, &[(&[1.0, 3.0], 0.5), (&[2.0, 2.0], 0.5)]),
        joint(1, &[(&[1.0, 2.0], 0.5), (&[2.0, 3.0], 0.5)]),
    )
}

/// Default law of the shared `(X2, Y2)`. Its values sit between the head
/// values on both axes, so the pattern of `(X1, X2)` depends on the head and
/// the OPD is well defined.
pub fn example42_tail() -> DiscreteJoint {
    joint(1, &[(&[1.5, 2.5], 0.5), (&[2.5, 1.5], 0.5)])
}

/// `(X, Y) = ((X1, X2), (Y1, Y2))` and `(X*, Y*) = ((X1*, X2), (Y1*, Y2))`
/// with the tail shared and independent of both heads.
pub fn example42_pair(tail: &DiscreteJoint) -> Result<CoupledPair> {
    let (h, hs) = table1_heads();
    CoupledPair::shared_tail(&h, &hs, tail)
}

/// Head densities of `(X1, Y1)` and `(X1*, Y1*)`, each a mixture of two unit squares.
pub fn example42_continuous_heads() -> (PiecewiseUniformDensity, PiecewiseUniformDensity) {
    use Axis::{X, Y};
    let sq = |x: f64, y: f64| (vec![free(X, &[1], x, x + 1.0), free(Y, &[1], y, y + 1.0)], 0.5);
    (
        model(1, vec![sq(0.0, 2.0), sq(1.0, 1.0)]),
        model(1, vec![sq(0.0, 1.0), sq(1.0, 2.0)]),
    )
}

/// Default continuous tail: uniform on `[1,2]x[2,3]` or `[2,3]x[1,2]` with
/// probability 1/2 each.
pub fn example42_continuous_tail() -> PiecewiseUniformDensity {
    use Axis::{X, Y};
    let sq = |x: f64, y: f64| (vec![free(X, &[1], x, x + 1.0), free(Y, &[1], y, y + 1.0)], 0.5);
    model(1, vec![sq(1.0, 2.0), sq(2.0, 1.0)])
}

pub fn example42_continuous(tail: &PiecewiseUniformDensity) -> Result<(PiecewiseUniformDensity, PiecewiseUniformDensity)> {
    let (f, fs) = example42_continuous_heads();
    Ok((density::product_extend(&f, tail)?, density::product_extend(&fs, tail)?))
}

pub const EXAMPLE43_C1: [f64; 2] = [1.5, 2.5];
pub const EXAMPLE43_C2: [f64; 2] = [2.5, 1.5];

/// Conditional laws of `(X1, Y1)` and `(X1*, Y1*)` given `c1` and given `c2`.
pub fn example43_conditionals() -> [(DiscreteJoint, DiscreteJoint); 2] {
    let uniform = || {
        joint(
            1,
            &[(&[1.0, 2.0], 0.25), (&[1.0, 3.0], 0.25), (&[2.0, 2.0], 0.25), (&[2.0, 3.0], 0.25)],
        )
    };
    [table1_heads(), (uniform(), uniform())]
}

pub fn example43_pair(c1: [f64; 2], c2: [f64; 2]) -> Result<CoupledPair> {
    let [(a1, b1), (a2, b2)] = example43_conditionals();
    CoupledPair::shared_mixture(&[(c1.to_vec(), 0.5), (c2.to_vec(), 0.5)], &[a1, a2], &[b1, b2])
}

const TABLE_POINTS: [[f64; 2]; 4] = [[1.0, 2.0], [1.0, 3.0], [2.0, 2.0], [2.0, 3.0]];

/// Rows of `(F, F*, S, S*)` at [`TABLE_POINTS`].
type TableRows = [[f64; 4]; 4];

const TABLE1: TableRows = [
    [0.0, 0.5, 1.0, 1.0],
    [0.5, 0.5, 0.5, 0.5],
    [0.5, 0.5, 0.5, 0.5],
    [1.0, 1.0, 0.0, 0.5],
];

const TABLE2B: TableRows = [
    [0.25, 0.25, 1.0, 1.0],
    [0.5, 0.5, 0.5, 0.5],
    [0.5, 0.5, 0.5, 0.5],
    [1.0, 1.0, 0.25, 0.25],
];

const TABLE2C: TableRows = [
    [0.125, 0.375, 1.0, 1.0],
    [0.5, 0.5, 0.5, 0.5],
    [0.5, 0.5, 0.5, 0.5],
    [1.0, 1.0, 0.125, 0.375],
];

fn fmt_point(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn table_checks(r: &mut Builder, label: &str, rows: &TableRows, eval: impl Fn(usize, [f64; 2]) -> Result<f64>) {
    const COLUMNS: [&str; 4] = ["F", "F*", "S", "S*"];
    for (point, row) in TABLE_POINTS.iter().zip(rows) {
        for (col, (name, &expected)) in COLUMNS.iter().zip(row).enumerate() {
            r.value(format!("{label} {name}{}", fmt_point(point)), expected, eval(col, *point));
        }
    }
}

/// Evaluates column `col` of a table for the head laws `(a, b)`.
fn head_table_entry(a: &DiscreteJoint, b: &DiscreteJoint, col: usize, point: [f64; 2]) -> Result<f64> {
    match col {
        0 => a.cdf(&point),
        1 => b.cdf(&point),
        2 => a.survival(&point),
        _ => b.survival(&point),
    }
}

fn heads_of(pair: &CoupledPair) -> Result<(DiscreteJoint, DiscreteJoint)> {
    let first = IndexSubset::new(pair.order(), [1])?;
    Ok((pair.first().marginal(&first)?, pair.second().marginal(&first)?))
}

fn head_margins_check(r: &mut Builder, pair: &CoupledPair) {
    match heads_of(pair) {
        Ok((a, b)) => {
            r.flag("X1 equal in law to X1*", true, Ok(a.coordinate_pmf(0) == b.coordinate_pmf(0)));
            r.flag("Y1 equal in law to Y1*", true, Ok(a.coordinate_pmf(1) == b.coordinate_pmf(1)));
        }
        Err(e) => r.flag("head marginals", true, Err(e)),
    }
}

fn theorem_checks(r: &mut Builder, pair: &CoupledPair, opd: f64, opd_star: f64) {
    for v in [Variant::A, Variant::B] {
        r.flag(
            format!("assumption set {v:?} holds"),
            true,
            check_theorem_conditions(pair, v, SCENARIO_TOL).map(|c| c.holds),
        );
    }
    let c = theorem_conclusion(pair, SCENARIO_TOL);
    r.value("OPD(X, Y)", opd, c.as_ref().map(|c| c.opd).map_err(Clone::clone));
    r.value("OPD(X*, Y*)", opd_star, c.as_ref().map(|c| c.opd_star).map_err(Clone::clone));
    r.flag("OPD(X, Y) <= OPD(X*, Y*)", true, c.map(|c| c.holds));

    let swapped = pair.swapped();
    for v in [Variant::A, Variant::B] {
        let report = check_theorem_conditions(&swapped, v, SCENARIO_TOL);
        let name = format!("swapped pair violates assumption set {v:?}");
        match report {
            Ok(rep) => {
                let actual = match rep.violations.first() {
                    Some(w) => format!(
                        "true; I = {:?}, given {}, at {}: {} > {}",
                        w.subset,
                        fmt_point(&w.conditioning_point),
                        fmt_point(&w.evaluation_point),
                        w.lhs,
                        w.rhs
                    ),
                    None => "false".into(),
                };
                r.push(name, "true".into(), actual, !rep.holds);
            }
            Err(e) => r.flag(name, true, Err(e)),
        }
    }
}

pub fn verify_example42() -> ScenarioReport {
    let mut r = Builder::new("example42");
    let pair = match example42_pair(&example42_tail()) {
        Ok(p) => p,
        Err(e) => {
            r.flag("build models", true, Err(e));
            return r.finish();
        }
    };
    match heads_of(&pair) {
        Ok((a, b)) => table_checks(&mut r, "table 1", &TABLE1, |col, p| head_table_entry(&a, &b, col, p)),
        Err(e) => r.flag("table 1", true, Err(e)),
    }
    head_margins_check(&mut r, &pair);
    theorem_checks(&mut r, &pair, -0.6, 0.2);

    // continuous version
    let (f, fs) = example42_continuous_heads();
    let head_grid = Grid::cube(2, -0.5, 3.5, 17).expect("grid");
    r.value("continuous: X1 equal in law to X1*", 0.0, marginal_gap(&f, &[0], &fs, &[0], &Grid::cube(1, -0.5, 3.5, 17).expect("grid")));
    r.value("continuous: Y1 equal in law to Y1*", 0.0, marginal_gap(&f, &[1], &fs, &[1], &Grid::cube(1, -0.5, 3.5, 17).expect("grid")));
    r.flag(
        "continuous: (X1, Y1) <=_C (X1*, Y1*) on 17^2 grid",
        true,
        concordance_check(&f, &fs, &head_grid, CONCORDANCE_TOL).map(|c| c.dominated()),
    );
    r.flag(
        "continuous: (X1*, Y1*) <=_C (X1, Y1) fails",
        true,
        concordance_check(&fs, &f, &head_grid, CONCORDANCE_TOL).map(|c| !c.dominated()),
    );
    match example42_continuous(&example42_continuous_tail()) {
        Ok((full, full_star)) => {
            let grid = Grid::cube(4, -0.5, 3.5, 9).expect("grid");
            r.flag(
                "continuous: (X, Y) <=_C (X*, Y*) on 9^4 grid",
                true,
                concordance_check(&full, &full_star, &grid, CONCORDANCE_TOL).map(|c| c.dominated()),
            );
            let t = exact_terms(&full);
            let ts = exact_terms(&full_star);
            r.value("continuous: P(Pi(X) = Pi(Y))", 0.375, t.as_ref().map(|t| t.coincidence).map_err(Clone::clone));
            r.value(
                "continuous: P(Pi(X*) = Pi(Y*))",
                0.5,
                ts.as_ref().map(|t| t.coincidence).map_err(Clone::clone),
            );
            r.value("continuous: OPD(X, Y)", -0.25, t.as_ref().map(|t| t.value).map_err(Clone::clone));
            r.value("continuous: OPD(X*, Y*)", 0.0, ts.as_ref().map(|t| t.value).map_err(Clone::clone));
            let holds = match (t, ts) {
                (Ok(a), Ok(b)) => Ok(a.value <= b.value + SCENARIO_TOL),
                (Err(e), _) | (_, Err(e)) => Err(e),
            };
            r.flag("continuous: OPD(X, Y) <= OPD(X*, Y*)", true, holds);
        }
        Err(e) => r.flag("continuous: build models", true, Err(e)),
    }
    r.finish()
}

pub fn verify_example43() -> ScenarioReport {
    let mut r = Builder::new("example43");
    let pair = match example43_pair(EXAMPLE43_C1, EXAMPLE43_C2) {
        Ok(p) => p,
        Err(e) => {
            r.flag("build models", true, Err(e));
            return r.finish();
        }
    };
    let (first, second) = (pair.first(), pair.second());
    let tail = IndexSubset::new(2, [2]).expect("subset");
    for (label, c, rows) in [
        ("table 2(a) given c1", EXAMPLE43_C1, &TABLE1),
        ("table 2(b) given c2", EXAMPLE43_C2, &TABLE2B),
    ] {
        table_checks(&mut r, label, rows, |col, p| match col {
            0 => first.conditional_cdf(&tail, &c, &p),
            1 => second.conditional_cdf(&tail, &c, &p),
            2 => first.conditional_survival(&tail, &c, &p),
            _ => second.conditional_survival(&tail, &c, &p),
        });
    }
    match heads_of(&pair) {
        Ok((a, b)) => {
            table_checks(&mut r, "table 2(c)", &TABLE2C, |col, p| head_table_entry(&a, &b, col, p));
            let expected = [[0.125, 0.375, 0.375, 0.125], [0.375, 0.125, 0.125, 0.375]];
            for (name, law, probs) in [("(X1, Y1)", &a, expected[0]), ("(X1*, Y1*)", &b, expected[1])] {
                for (point, p) in TABLE_POINTS.iter().zip(probs) {
                    let actual = law
                        .atoms()
                        .iter()
                        .find(|atom| atom.point == point)
                        .map_or(0.0, |atom| atom.prob);
                    r.value(format!("P({name} = {})", fmt_point(point)), p, Ok(actual));
                }
            }
        }
        Err(e) => r.flag("table 2(c)", true, Err(e)),
    }
    head_margins_check(&mut r, &pair);
    r.flag(
        "assumption set B holds for I = {} (unconditional)",
        true,
        check_theorem_conditions(&pair, Variant::B, SCENARIO_TOL)
            .map(|c| c.violations.iter().all(|v| !v.subset.is_empty())),
    );
    theorem_checks(&mut r, &pair, -0.6, 0.2);
    r.finish()
}

/// Runs the named scenario; `None` for an unknown name.
pub fn verify(name: &str) -> Option<ScenarioReport> {
    match name {
        "counterexample" => Some(verify_counterexample()),
        "example42" => Some(verify_example42()),
        "example43" => Some(verify_example43()),
        _ => None,
    }
}
