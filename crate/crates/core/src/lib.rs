//! Ordinal pattern dependence between two time series.
//!
//! * [`estimator`]: plug-in estimate from observed series.
//! * [`density`]: exact values for piecewise-uniform densities.
//! * [`discrete`]: finite joint laws, conditional distribution functions and
//!   the conditional concordance checks.
//! * [`concordance`]: grid checks of cdf and survival domination.
//! * [`scenarios`]: the counterexample and worked examples as fixtures.

pub mod concordance;
pub mod density;
pub mod discrete;
pub mod distribution;
pub mod error;
pub mod estimator;
pub mod model_file;
pub mod ordinal;
pub mod scenarios;

pub use concordance::{concordance_check, ConcordanceReport, Grid, OrthantProbability};
pub use density::{Axis, Block, Cell, OrderKind, PiecewiseUniformDensity};
pub use discrete::{DiscreteJoint, IndexSubset};
pub use distribution::{DependenceTerms, JointPatternDistribution, PatternDistribution};
pub use error::{Error, Result};
pub use estimator::{empirical_opd, OpdEstimate, TimeSeriesPair};
pub use ordinal::{pattern_of, Pattern};
