mod common;

const CASES: u32 = 256;

fn check(name: &str) {
    let (_, suite) = common::PROPERTIES
        .iter()
        .find(|(n, _)| *n == name)
        .expect("known property");
    if let Err(e) = suite(CASES, 0x0dd5_eed5) {
        panic!("{name}: {e}");
    }
}

#[test]
fn pattern_validity() {
    check("pattern validity against a rank oracle");
}

#[test]
fn index_bijectivity() {
    check("pattern index bijectivity");
}

#[test]
fn monotone_patterns() {
    check("monotone-transform invariance of patterns");
}

#[test]
fn monotone_opd() {
    check("monotone-transform invariance of empirical_opd");
}

#[test]
fn tie_rule_constants() {
    check("tie rule on constant windows");
}

#[test]
fn normalization() {
    check("normalization of pattern distributions");
}

#[test]
fn orthant_monotonicity() {
    check("cdf/survival monotonicity");
}

#[test]
fn disintegration() {
    check("disintegration identity on example 4.3");
}

#[test]
fn degenerate_path() {
    check("degenerate-denominator error path");
}

#[test]
fn product_densities() {
    check("zero dependence of product densities");
}

#[test]
fn tolerance_monotone() {
    check("tolerance monotonicity of the theorem checker");
}

#[test]
fn every_suite_has_a_test() {
    assert_eq!(common::PROPERTIES.len(), 11);
}
