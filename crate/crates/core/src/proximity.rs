//! Semantic proximity between cells and between tuples.
//!
//! Three measures are available:
//!
//! * [`Measure::Liu`]: interval overlap over hull, using the modular with δ
//!   for degenerate intervals.
//! * [`Measure::Improved`]: `1 − (p(a₁,a₂) + p(b₁,b₂))` with
//!   `p(x,y) = |x−y| / max(x,y)`, forced to 0 on disjoint operands.
//! * [`Measure::Extended`]: the overlap measure applied to α-cuts, using ε
//!   for degenerate cuts.
//!
//! The overlap measures come in two forms. [`Form::Ratio`] is `‖∩‖/‖∪‖`;
//! [`Form::TwoTerm`] additionally subtracts `‖∩‖/θ`, which makes identical
//! non-degenerate operands score strictly below 1.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::interval::{
    alpha_cut, intersect, modular, to_interval, union_hull, AttributeDomain, FuzzyValue, Interval,
    IntervalError, PointSize,
};
use crate::relation::{AttributeSet, Schema};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProximityError {
    #[error("improved proximity needs a positive maximum, got p({0}, {1})")]
    NonPositiveMax(f64, f64),
    #[error(transparent)]
    Representation(#[from] IntervalError),
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("proximity over an empty attribute set is undefined")]
    EmptyAttributeSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Liu,
    Improved,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    TwoTerm,
    Ratio,
}

impl Measure {
    /// The form a measure uses when none is requested.
    pub fn default_form(self) -> Form {
        match self {
            Measure::Liu => Form::TwoTerm,
            Measure::Improved | Measure::Extended => Form::Ratio,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Liu => "liu",
            Measure::Improved => "improved",
            Measure::Extended => "extended",
        })
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "liu" => Ok(Measure::Liu),
            "improved" => Ok(Measure::Improved),
            "extended" => Ok(Measure::Extended),
            other => Err(format!(
                "unknown measure {other:?} (expected liu, improved or extended)"
            )),
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::TwoTerm => "two-term",
            Form::Ratio => "ratio",
        })
    }
}

impl FromStr for Form {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two-term" | "two_term" => Ok(Form::TwoTerm),
            "ratio" => Ok(Form::Ratio),
            other => Err(format!(
                "unknown form {other:?} (expected two-term or ratio)"
            )),
        }
    }
}

/// Selects a proximity measure and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProximityConfig {
    pub measure: Measure,
    /// Ignored by [`Measure::Improved`].
    pub form: Form,
    /// Cut degree, used by [`Measure::Extended`] only.
    pub alpha: f64,
    /// Clamp two-term results into `[0, 1]`. The improved measure is always clamped.
    pub clamp: bool,
}

impl ProximityConfig {
    pub fn new(measure: Measure) -> Self {
        ProximityConfig {
            measure,
            form: measure.default_form(),
            alpha: 0.5,
            clamp: true,
        }
    }

    pub fn liu() -> Self {
        Self::new(Measure::Liu)
    }

    pub fn improved() -> Self {
        Self::new(Measure::Improved)
    }

    pub fn extended(alpha: f64) -> Result<Self, ProximityError> {
        Self::new(Measure::Extended).with_alpha(alpha)
    }

    pub fn with_form(mut self, form: Form) -> Self {
        self.form = form;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self, ProximityError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(IntervalError::AlphaOutOfRange(alpha).into());
        }
        self.alpha = alpha;
        Ok(self)
    }

    /// True when identical operands always score exactly 1.
    pub fn is_reflexive(&self) -> bool {
        match self.measure {
            Measure::Improved => true,
            Measure::Liu | Measure::Extended => self.form == Form::Ratio,
        }
    }
}

impl Default for ProximityConfig {
    fn default() -> Self {
        Self::new(Measure::Extended)
    }
}

/// Intermediate quantities of an overlap-style proximity evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapBreakdown {
    pub left: Option<Interval>,
    pub right: Option<Interval>,
    pub intersection: Option<Interval>,
    pub hull: Option<Interval>,
    pub intersection_size: f64,
    pub hull_size: f64,
    pub value: f64,
}

fn overlap(
    left: Option<Interval>,
    right: Option<Interval>,
    domain: &AttributeDomain,
    point: PointSize,
    form: Form,
    clamp: bool,
) -> OverlapBreakdown {
    let (intersection, hull) = match (&left, &right) {
        (Some(l), Some(r)) => (intersect(l, r), Some(union_hull(l, r))),
        _ => (None, None),
    };
    let intersection_size = modular(intersection.as_ref(), domain, point);
    let hull_size = modular(hull.as_ref(), domain, point);
    let value = match (&intersection, form) {
        (None, _) => 0.0,
        (Some(_), Form::Ratio) => intersection_size / hull_size,
        (Some(_), Form::TwoTerm) => {
            let raw = intersection_size / hull_size - intersection_size / domain.theta();
            if clamp {
                raw.clamp(0.0, 1.0)
            } else {
                raw
            }
        }
    };
    OverlapBreakdown {
        left,
        right,
        intersection,
        hull,
        intersection_size,
        hull_size,
        value,
    }
}

/// Overlap proximity of two interval numbers, with δ for degenerate intervals.
pub fn sp_liu(f1: &Interval, f2: &Interval, domain: &AttributeDomain, form: Form) -> f64 {
    overlap(Some(*f1), Some(*f2), domain, PointSize::Delta, form, true).value
}

pub fn sp_liu_breakdown(
    f1: &Interval,
    f2: &Interval,
    domain: &AttributeDomain,
    form: Form,
    clamp: bool,
) -> OverlapBreakdown {
    overlap(Some(*f1), Some(*f2), domain, PointSize::Delta, form, clamp)
}

/// Relative endpoint distance `|x − y| / max(x, y)`, with `p(x, x) = 0`.
pub fn endpoint_distance(x: f64, y: f64) -> Result<f64, ProximityError> {
    if x == y {
        return Ok(0.0);
    }
    let max = x.max(y);
    if max <= 0.0 {
        return Err(ProximityError::NonPositiveMax(x, y));
    }
    Ok((x - y).abs() / max)
}

/// Complement of the summed relative endpoint distances; 0 on disjoint operands.
pub fn sp_improved(f1: &Interval, f2: &Interval) -> Result<f64, ProximityError> {
    if intersect(f1, f2).is_none() {
        return Ok(0.0);
    }
    let distance =
        endpoint_distance(f1.lower(), f2.lower())? + endpoint_distance(f1.upper(), f2.upper())?;
    Ok((1.0 - distance).clamp(0.0, 1.0))
}

/// Overlap proximity of the α-cuts of two cells, with ε for degenerate cuts.
/// An empty cut scores 0 against anything.
pub fn sp_extended(
    v1: &FuzzyValue,
    v2: &FuzzyValue,
    alpha: f64,
    domain: &AttributeDomain,
    form: Form,
) -> Result<f64, ProximityError> {
    Ok(sp_extended_breakdown(v1, v2, alpha, domain, form, true)?.value)
}

pub fn sp_extended_breakdown(
    v1: &FuzzyValue,
    v2: &FuzzyValue,
    alpha: f64,
    domain: &AttributeDomain,
    form: Form,
    clamp: bool,
) -> Result<OverlapBreakdown, ProximityError> {
    let left = alpha_cut(v1, alpha, domain)?;
    let right = alpha_cut(v2, alpha, domain)?;
    Ok(overlap(
        left,
        right,
        domain,
        PointSize::Epsilon,
        form,
        clamp,
    ))
}

/// Proximity of two cells of the same attribute under `cfg`.
pub fn sp_value(
    v1: &FuzzyValue,
    v2: &FuzzyValue,
    domain: &AttributeDomain,
    cfg: &ProximityConfig,
) -> Result<f64, ProximityError> {
    match cfg.measure {
        Measure::Liu => {
            let f1 = to_interval(v1, domain)?;
            let f2 = to_interval(v2, domain)?;
            Ok(overlap(
                Some(f1),
                Some(f2),
                domain,
                PointSize::Delta,
                cfg.form,
                cfg.clamp,
            )
            .value)
        }
        Measure::Improved => sp_improved(&to_interval(v1, domain)?, &to_interval(v2, domain)?),
        Measure::Extended => {
            Ok(sp_extended_breakdown(v1, v2, cfg.alpha, domain, cfg.form, cfg.clamp)?.value)
        }
    }
}

/// Minimum per-attribute proximity of two tuples over `attrs`.
pub fn sp_tuple(
    t1: &[FuzzyValue],
    t2: &[FuzzyValue],
    attrs: &AttributeSet,
    cfg: &ProximityConfig,
    schema: &Schema,
) -> Result<f64, ProximityError> {
    if attrs.is_empty() {
        return Err(ProximityError::EmptyAttributeSet);
    }
    sp_on(t1, t2, attrs, cfg, schema)
}

/// Like [`sp_tuple`] but the empty set scores 1 (the minimum over no terms).
pub(crate) fn sp_on(
    t1: &[FuzzyValue],
    t2: &[FuzzyValue],
    attrs: &AttributeSet,
    cfg: &ProximityConfig,
    schema: &Schema,
) -> Result<f64, ProximityError> {
    let mut best = 1.0f64;
    for col in attrs.columns() {
        let attr = schema
            .attribute(col)
            .ok_or_else(|| ProximityError::UnknownAttribute(format!("#{col}")))?;
        let (v1, v2) = match (t1.get(col), t2.get(col)) {
            (Some(v1), Some(v2)) => (v1, v2),
            _ => return Err(ProximityError::UnknownAttribute(attr.name.clone())),
        };
        best = best.min(sp_value(v1, v2, &attr.domain, cfg)?);
    }
    Ok(best)
}

/// All pairwise tuple proximities over one attribute set, row-major `n × n`.
#[derive(Debug, Clone)]
pub(crate) struct PairwiseProximity {
    n: usize,
    values: Vec<f64>,
}

impl PairwiseProximity {
    pub(crate) fn compute(
        tuples: &[Vec<FuzzyValue>],
        attrs: &AttributeSet,
        cfg: &ProximityConfig,
        schema: &Schema,
    ) -> Result<Self, ProximityError> {
        let n = tuples.len();
        let values = (0..n * n)
            .into_par_iter()
            .map(|k| sp_on(&tuples[k / n], &tuples[k % n], attrs, cfg, schema))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PairwiseProximity { n, values })
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}
