//! Satisfaction checks for fuzzy functional (FFD) and fuzzy multivalued (FMVD)
//! dependencies on a relation.
//!
//! FFD `X ⇝ Y` holds when every pair of tuples is at least as close on `Y` as
//! it is on `X`. FMVD `X ↠ Y` holds when, for every ordered pair `(Tᵢ, Tⱼ)`
//! with `β = SP(Tᵢ[X], Tⱼ[X])`, some tuple `T` is β-close to both on `X`,
//! β-close to `Tᵢ` on `Y` and β-close to `Tⱼ` on `Z = U − XY`.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::proximity::{PairwiseProximity, ProximityConfig, ProximityError};
use crate::relation::{complement_set, AttributeSet, Relation, RelationError, Schema};

/// Absolute slack on every proximity comparison.
pub const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DependencyError {
    #[error(transparent)]
    Proximity(#[from] ProximityError),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error("dependency left-hand side must not be empty")]
    EmptyLhs,
    #[error("expected an {expected} statement")]
    WrongKind { expected: DependencyKind },
    #[error("attribute set mentions column {0}, which is outside the schema")]
    ColumnOutOfRange(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DependencyKind {
    Ffd,
    Fmvd,
}

impl DependencyKind {
    pub fn arrow(self) -> &'static str {
        match self {
            DependencyKind::Ffd => "->",
            DependencyKind::Fmvd => "->>",
        }
    }
}

impl fmt::Display for DependencyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DependencyKind::Ffd => "FFD",
            DependencyKind::Fmvd => "FMVD",
        })
    }
}

/// An FFD or FMVD over the columns of a schema.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DependencyStatement {
    pub kind: DependencyKind,
    pub lhs: AttributeSet,
    pub rhs: AttributeSet,
}

impl DependencyStatement {
    pub fn new(
        kind: DependencyKind,
        lhs: AttributeSet,
        rhs: AttributeSet,
    ) -> Result<Self, DependencyError> {
        if lhs.is_empty() {
            return Err(DependencyError::EmptyLhs);
        }
        Ok(DependencyStatement { kind, lhs, rhs })
    }

    pub fn ffd(lhs: AttributeSet, rhs: AttributeSet) -> Result<Self, DependencyError> {
        Self::new(DependencyKind::Ffd, lhs, rhs)
    }

    pub fn fmvd(lhs: AttributeSet, rhs: AttributeSet) -> Result<Self, DependencyError> {
        Self::new(DependencyKind::Fmvd, lhs, rhs)
    }

    /// Builds a statement from attribute names.
    pub fn from_names<S: AsRef<str>>(
        schema: &Schema,
        kind: DependencyKind,
        lhs: &[S],
        rhs: &[S],
    ) -> Result<Self, DependencyError> {
        Self::new(kind, schema.resolve(lhs)?, schema.resolve(rhs)?)
    }

    fn check_columns(&self, schema: &Schema) -> Result<(), DependencyError> {
        match self
            .lhs
            .columns()
            .chain(self.rhs.columns())
            .find(|&c| c >= schema.len())
        {
            Some(c) => Err(DependencyError::ColumnOutOfRange(c)),
            None => Ok(()),
        }
    }
}

/// The four requirements a witness tuple `T` must meet for a pair `(Tᵢ, Tⱼ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// `SP(T[X], Tᵢ[X]) ≥ β`
    #[serde(rename = "x_i")]
    XWithFirst,
    /// `SP(T[X], Tⱼ[X]) ≥ β`
    #[serde(rename = "x_j")]
    XWithSecond,
    /// `SP(T[Y], Tᵢ[Y]) ≥ β`
    #[serde(rename = "y_i")]
    YWithFirst,
    /// `SP(T[Z], Tⱼ[Z]) ≥ β`
    #[serde(rename = "z_j")]
    ZWithSecond,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::XWithFirst => "SP(T[X], Ti[X])",
            Condition::XWithSecond => "SP(T[X], Tj[X])",
            Condition::YWithFirst => "SP(T[Y], Ti[Y])",
            Condition::ZWithSecond => "SP(T[Z], Tj[Z])",
        })
    }
}

/// The closest a tuple came to witnessing a violated pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub tuple: usize,
    pub failing_condition: Condition,
    pub achieved: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub pair: (usize, usize),
    /// Proximity of the pair on the left-hand side.
    pub beta: f64,
    /// FFD only: proximity of the pair on the right-hand side.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs_proximity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub holds: bool,
    pub violations: Vec<Violation>,
    pub vacuous_pairs: usize,
}

impl CheckReport {
    fn from_violations(violations: Vec<Violation>, vacuous_pairs: usize) -> Self {
        CheckReport {
            holds: violations.is_empty(),
            violations,
            vacuous_pairs,
        }
    }
}

/// Checks an FFD over all unordered tuple pairs.
pub fn check_ffd(
    r: &Relation,
    d: &DependencyStatement,
    cfg: &ProximityConfig,
) -> Result<CheckReport, DependencyError> {
    if d.kind != DependencyKind::Ffd {
        return Err(DependencyError::WrongKind {
            expected: DependencyKind::Ffd,
        });
    }
    d.check_columns(r.schema())?;
    let lhs = PairwiseProximity::compute(r.tuples(), &d.lhs, cfg, r.schema())?;
    let rhs = PairwiseProximity::compute(r.tuples(), &d.rhs, cfg, r.schema())?;
    let n = r.len();
    let violations = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let (beta, target) = (lhs.get(i, j), rhs.get(i, j));
            (beta > target + TOLERANCE).then_some(Violation {
                pair: (i, j),
                beta,
                rhs_proximity: Some(target),
                best_witness: None,
            })
        })
        .collect();
    Ok(CheckReport::from_violations(violations, 0))
}

/// Checks an FMVD with the default vacuity threshold of 0.
pub fn check_fmvd(
    r: &Relation,
    d: &DependencyStatement,
    cfg: &ProximityConfig,
) -> Result<CheckReport, DependencyError> {
    check_fmvd_with_threshold(r, d, cfg, 0.0)
}

enum PairOutcome {
    Vacuous,
    Witnessed,
    Violated(Violation),
}

/// Checks an FMVD; pairs whose left-hand proximity is at most `vacuity_threshold`
/// are counted as vacuous and skipped.
pub fn check_fmvd_with_threshold(
    r: &Relation,
    d: &DependencyStatement,
    cfg: &ProximityConfig,
    vacuity_threshold: f64,
) -> Result<CheckReport, DependencyError> {
    if d.kind != DependencyKind::Fmvd {
        return Err(DependencyError::WrongKind {
            expected: DependencyKind::Fmvd,
        });
    }
    d.check_columns(r.schema())?;
    let schema = r.schema();
    let z = complement_set(schema, &d.lhs, &d.rhs);
    let px = PairwiseProximity::compute(r.tuples(), &d.lhs, cfg, schema)?;
    let py = PairwiseProximity::compute(r.tuples(), &d.rhs, cfg, schema)?;
    let pz = PairwiseProximity::compute(r.tuples(), &z, cfg, schema)?;
    let n = r.len();

    let outcomes: Vec<PairOutcome> = (0..n * n)
        .into_par_iter()
        .filter(|k| k / n != k % n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            let beta = px.get(i, j);
            if beta <= vacuity_threshold {
                return PairOutcome::Vacuous;
            }
            let floor = beta - TOLERANCE;
            let mut best: Option<Witness> = None;
            let mut best_min = f64::NEG_INFINITY;
            for t in 0..n {
                let conditions = [
                    (Condition::XWithFirst, px.get(t, i)),
                    (Condition::XWithSecond, px.get(t, j)),
                    (Condition::YWithFirst, py.get(t, i)),
                    (Condition::ZWithSecond, pz.get(t, j)),
                ];
                let Some(&(failing, achieved)) =
                    conditions.iter().find(|(_, value)| *value < floor)
                else {
                    return PairOutcome::Witnessed;
                };
                let min = conditions.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
                if min > best_min {
                    best_min = min;
                    best = Some(Witness {
                        tuple: t,
                        failing_condition: failing,
                        achieved,
                    });
                }
            }
            PairOutcome::Violated(Violation {
                pair: (i, j),
                beta,
                rhs_proximity: None,
                best_witness: best,
            })
        })
        .collect();

    let mut vacuous = 0;
    let mut violations = Vec::new();
    for outcome in outcomes {
        match outcome {
            PairOutcome::Vacuous => vacuous += 1,
            PairOutcome::Witnessed => {}
            PairOutcome::Violated(v) => violations.push(v),
        }
    }
    Ok(CheckReport::from_violations(violations, vacuous))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReplicationReport {
    pub ffd_holds: bool,
    pub fmvd_holds: bool,
    /// The FFD holds but the FMVD it should replicate into does not.
    pub inconsistent: bool,
}

/// Runs `X ⇝ Y` and `X ↠ Y` side by side.
pub fn check_replication(
    r: &Relation,
    x: &AttributeSet,
    y: &AttributeSet,
    cfg: &ProximityConfig,
) -> Result<ReplicationReport, DependencyError> {
    let ffd = check_ffd(r, &DependencyStatement::ffd(x.clone(), y.clone())?, cfg)?;
    let fmvd = check_fmvd(r, &DependencyStatement::fmvd(x.clone(), y.clone())?, cfg)?;
    Ok(ReplicationReport {
        ffd_holds: ffd.holds,
        fmvd_holds: fmvd.holds,
        inconsistent: ffd.holds && !fmvd.holds,
    })
}
