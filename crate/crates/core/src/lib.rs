//! Fuzzy functional and multivalued dependencies over relations whose cells
//! are crisp numbers, nulls, confidence intervals or trapezoidal fuzzy numbers.
//!
//! * [`interval`]: cell values, attribute domains, α-cuts and interval size.
//! * [`proximity`]: semantic proximity between cells and tuples.
//! * [`relation`]: schemas, relations and the JSON file format.
//! * [`dependency`]: FFD and FMVD satisfaction checks with violation reports.
//! * [`inference`]: implication between dependency sets.
//! * [`decomposition`]: proximity joins and lossless-decomposition checks.
//! * [`cli`]: the `fuzzdep` command-line front end.

pub mod cli;
pub mod decomposition;
pub mod dependency;
pub mod inference;
pub mod interval;
pub mod proximity;
pub mod relation;

pub use dependency::{check_ffd, check_fmvd, CheckReport, DependencyKind, DependencyStatement};
pub use interval::{AttributeDomain, FuzzyValue, Interval};
pub use proximity::{Form, Measure, ProximityConfig};
pub use relation::{parse_relation, AttributeSet, Relation, Schema};
