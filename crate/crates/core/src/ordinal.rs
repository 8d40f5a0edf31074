//! Ordinal patterns of order `d`.
//!
//! A pattern is stored in rank form: entry `i` is the rank of `x_i` within the
//! window, so `(2.3, 1.1, 5.0)` has pattern `(2, 1, 3)`. Ties are broken by
//! position, the earlier index receiving the smaller rank.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported pattern order. `8! = 40320` patterns.
pub const MAX_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Pattern {
    ranks: Vec<usize>,
}

impl Pattern {
    /// Builds a pattern from 1-based ranks, checking that they form a permutation.
    pub fn from_ranks(ranks: Vec<usize>) -> Result<Self> {
        check_permutation(&ranks)?;
        if ranks.len() < 2 {
            return Err(Error::OrderTooSmall { order: ranks.len() });
        }
        Ok(Self { ranks })
    }

    /// The identity pattern `(1, 2, ..., d)`.
    pub fn increasing(order: usize) -> Result<Self> {
        check_order(order)?;
        Ok(Self {
            ranks: (1..=order).collect(),
        })
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn order(&self) -> usize {
        self.ranks.len()
    }

    /// Position of this pattern in the lexicographic enumeration of all `d!` patterns.
    pub fn index(&self) -> usize {
        let d = self.ranks.len();
        let mut index = 0;
        for i in 0..d {
            let smaller_later = self.ranks[i + 1..]
                .iter()
                .filter(|&&r| r < self.ranks[i])
                .count();
            index += smaller_later * factorial(d - 1 - i);
        }
        index
    }

    /// Inverse of [`Pattern::index`].
    pub fn from_index(index: usize, order: usize) -> Result<Self> {
        check_order(order)?;
        let count = factorial(order);
        if index >= count {
            return Err(Error::IndexOutOfRange {
                index,
                order,
                count,
            });
        }
        let mut remaining: Vec<usize> = (1..=order).collect();
        let mut rest = index;
        let mut ranks = Vec::with_capacity(order);
        for i in 0..order {
            let block = factorial(order - 1 - i);
            let k = rest / block;
            rest %= block;
            ranks.push(remaining.remove(k));
        }
        Ok(Self { ranks })
    }
}

impl TryFrom<Vec<usize>> for Pattern {
    type Error = Error;

    fn try_from(ranks: Vec<usize>) -> Result<Self> {
        Self::from_ranks(ranks)
    }
}

impl From<Pattern> for Vec<usize> {
    fn from(p: Pattern) -> Self {
        p.ranks
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.ranks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    if order < 2 {
        return Err(Error::OrderTooSmall { order });
    }
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

fn check_permutation(perm: &[usize]) -> Result<()> {
    let d = perm.len();
    let mut seen = vec![false; d];
    for &r in perm {
        if r == 0 || r > d {
            return Err(Error::InvalidPermutation(format!(
                "entry {r} outside 1..={d}"
            )));
        }
        if std::mem::replace(&mut seen[r - 1], true) {
            return Err(Error::InvalidPermutation(format!("entry {r} repeated")));
        }
    }
    Ok(())
}

/// Ordinal pattern of a window. Equal values are ranked by position.
pub fn pattern_of(values: &[f64]) -> Result<Pattern> {
    let d = values.len();
    if d < 2 {
        return Err(Error::OrderTooSmall { order: d });
    }
    if let Some(position) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput { position });
    }
    Ok(Pattern {
        ranks: ranks_unchecked(values),
    })
}

/// Ranks of a finite window; the stable sort keeps equal values in index order.
pub(crate) fn ranks_unchecked(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| {
        values[i]
            .partial_cmp(&values[j])
            .expect("window values are finite")
    });
    let mut ranks = vec![0; values.len()];
    for (rank, &i) in order.iter().enumerate() {
        ranks[i] = rank + 1;
    }
    ranks
}

/// Dense index of the pattern of a finite window, without allocating a [`Pattern`].
pub(crate) fn pattern_index_of(values: &[f64]) -> usize {
    let d = values.len();
    let mut index = 0;
    for i in 0..d {
        let smaller_later = (i + 1..d)
            .filter(|&j| values[j] < values[i])
            .count();
        index += smaller_later * factorial(d - 1 - i);
    }
    index
}

/// All `d!` patterns in lexicographic order of their ranks.
pub fn enumerate_patterns(order: usize) -> Result<Vec<Pattern>> {
    check_order(order)?;
    (0..factorial(order))
        .map(|i| Pattern::from_index(i, order))
        .collect()
}

pub fn pattern_index(pattern: &Pattern) -> usize {
    pattern.index()
}

pub fn index_to_pattern(index: usize, order: usize) -> Result<Pattern> {
    Pattern::from_index(index, order)
}

/// Reorders `values` so that output position `k` holds `values[sigma(k)]`
/// (`sigma` given 1-based).
pub fn permute_coordinates<T: Copy>(values: &[T], sigma: &[usize]) -> Result<Vec<T>> {
    check_permutation(sigma)?;
    if sigma.len() != values.len() {
        return Err(Error::InvalidPermutation(format!(
            "permutation of length {} applied to {} values",
            sigma.len(),
            values.len()
        )));
    }
    Ok(sigma.iter().map(|&s| values[s - 1]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Rank straight from the defining relation: count the entries that must
    /// come before `x_i`.
    fn rank_oracle(x: &[f64]) -> Vec<usize> {
        (0..x.len())
            .map(|i| {
                1 + (0..x.len())
                    .filter(|&j| x[j] < x[i] || (x[j] == x[i] && j < i))
                    .count()
            })
            .collect()
    }

    #[test]
    fn pattern_examples() {
        assert_eq!(pattern_of(&[1.0, 2.0, 3.0]).unwrap().ranks(), &[1, 2, 3]);
        assert_eq!(pattern_of(&[1.0, 1.0]).unwrap().ranks(), &[1, 2]);
        assert_eq!(pattern_of(&[2.3, 1.1, 5.0]).unwrap().ranks(), &[2, 1, 3]);
        assert_eq!(rank_oracle(&[2.3, 1.1, 5.0]), vec![2, 1, 3]);
    }

    #[test]
    fn pattern_errors() {
        assert_eq!(
            pattern_of(&[1.0, f64::NAN]),
            Err(Error::NonFiniteInput { position: 1 })
        );
        assert_eq!(
            pattern_of(&[f64::INFINITY, 0.0]),
            Err(Error::NonFiniteInput { position: 0 })
        );
        assert_eq!(pattern_of(&[1.0]), Err(Error::OrderTooSmall { order: 1 }));
    }

    #[test]
    fn signed_zeros_tie() {
        assert_eq!(pattern_of(&[0.0, -0.0]).unwrap().ranks(), &[1, 2]);
        assert_eq!(pattern_of(&[-0.0, 0.0]).unwrap().ranks(), &[1, 2]);
        assert_eq!(pattern_of(&[1.0, 0.0, -0.0]).unwrap().ranks(), &[3, 1, 2]);
    }

    #[test]
    fn enumeration() {
        let two = enumerate_patterns(2).unwrap();
        assert_eq!(two[0].ranks(), &[1, 2]);
        assert_eq!(two[1].ranks(), &[2, 1]);
        let three = enumerate_patterns(3).unwrap();
        assert_eq!(three.len(), 6);
        assert_eq!(three[0].ranks(), &[1, 2, 3]);
        assert_eq!(three[5].ranks(), &[3, 2, 1]);
        assert_eq!(enumerate_patterns(4).unwrap().len(), 24);
        assert!(three.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(enumerate_patterns(1), Err(Error::OrderTooSmall { order: 1 }));
        assert!(matches!(
            enumerate_patterns(9),
            Err(Error::OrderTooLarge { order: 9, .. })
        ));
    }

    #[test]
    fn index_round_trip() {
        assert_eq!(Pattern::from_ranks(vec![1, 2]).unwrap().index(), 0);
        assert_eq!(Pattern::from_ranks(vec![2, 1]).unwrap().index(), 1);
        assert_eq!(Pattern::from_ranks(vec![1, 2, 3]).unwrap().index(), 0);
        for d in 2..=5 {
            for (i, p) in enumerate_patterns(d).unwrap().iter().enumerate() {
                assert_eq!(pattern_index(p), i);
                assert_eq!(&index_to_pattern(pattern_index(p), d).unwrap(), p);
            }
        }
        assert!(matches!(
            index_to_pattern(6, 3),
            Err(Error::IndexOutOfRange { index: 6, .. })
        ));
    }

    #[test]
    fn invalid_ranks() {
        assert!(Pattern::from_ranks(vec![1, 1]).is_err());
        assert!(Pattern::from_ranks(vec![0, 1]).is_err());
        assert!(Pattern::from_ranks(vec![1, 3]).is_err());
    }

    #[test]
    fn permute_examples() {
        assert_eq!(
            permute_coordinates(&[5.0, 6.0, 7.0], &[1, 2, 3]).unwrap(),
            vec![5.0, 6.0, 7.0]
        );
        assert_eq!(
            permute_coordinates(&[5.0, 6.0, 7.0], &[2, 1, 3]).unwrap(),
            vec![6.0, 5.0, 7.0]
        );
        assert!(matches!(
            permute_coordinates(&[5.0, 6.0], &[2, 2]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(permute_coordinates(&[5.0, 6.0], &[1, 2, 3]).is_err());
    }

    /// Every rank configuration of two distinct-valued 3-vectors, every sigma:
    /// coincidence of patterns is preserved by a simultaneous re-indexing.
    #[test]
    fn simultaneous_permutation_preserves_coincidence_exhaustive() {
        let patterns = enumerate_patterns(3).unwrap();
        let as_values = |p: &Pattern| -> Vec<f64> { p.ranks().iter().map(|&r| r as f64).collect() };
        for px in &patterns {
            for py in &patterns {
                let (x, y) = (as_values(px), as_values(py));
                for sigma in &patterns {
                    let xs = permute_coordinates(&x, sigma.ranks()).unwrap();
                    let ys = permute_coordinates(&y, sigma.ranks()).unwrap();
                    let before = pattern_of(&x).unwrap() == pattern_of(&y).unwrap();
                    let after = pattern_of(&xs).unwrap() == pattern_of(&ys).unwrap();
                    assert_eq!(before, after);
                }
            }
        }
    }

    #[test]
    fn constant_vector_is_increasing() {
        for d in 2..=MAX_ORDER {
            let p = pattern_of(&vec![4.2; d]).unwrap();
            assert_eq!(p, Pattern::increasing(d).unwrap());
        }
    }

    proptest! {
        #[test]
        fn matches_rank_oracle(x in prop::collection::vec(-3i32..3, 2..=8)) {
            // small integer range forces plenty of ties
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let p = pattern_of(&x).unwrap();
            prop_assert_eq!(p.ranks().to_vec(), rank_oracle(&x));
            prop_assert_eq!(pattern_index_of(&x), p.index());
        }

        #[test]
        fn monotone_invariance(x in prop::collection::vec(-1e3f64..1e3, 2..=8)) {
            let g: Vec<f64> = x.iter().map(|v| (v / 100.0).exp() + 3.0 * v).collect();
            prop_assert_eq!(pattern_of(&g).unwrap(), pattern_of(&x).unwrap());
        }

        #[test]
        fn reversal(x in prop::collection::hash_set(-1_000_000i64..1_000_000, 2..=8)) {
            let x: Vec<f64> = x.into_iter().map(|v| v as f64).collect();
            let d = x.len();
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            let p = pattern_of(&x).unwrap();
            let q = pattern_of(&neg).unwrap();
            for i in 0..d {
                prop_assert_eq!(q.ranks()[i], d + 1 - p.ranks()[i]);
            }
        }
    }
}
