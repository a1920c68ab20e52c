//! Proximity joins and the lossless-decomposition test for `R = XY ⋈ XZ`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dependency::{check_fmvd, DependencyError, DependencyStatement, TOLERANCE};
use crate::interval::FuzzyValue;
use crate::proximity::{sp_on, sp_value, PairwiseProximity, ProximityConfig, ProximityError};
use crate::relation::{
    complement_set, dedup_tuples, AttributeSet, Relation, RelationError, Schema,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecompositionError {
    #[error("invalid schema overlap: {0}")]
    SchemaOverlapInvalid(String),
    #[error("beta_join must lie in (0, 1], got {0}")]
    InvalidBeta(f64),
    #[error(transparent)]
    Proximity(#[from] ProximityError),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Dependency(#[from] DependencyError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JoinConfig {
    pub cfg: ProximityConfig,
    beta_join: f64,
}

impl JoinConfig {
    pub fn new(cfg: ProximityConfig, beta_join: f64) -> Result<Self, DecompositionError> {
        if !(beta_join > 0.0 && beta_join <= 1.0) {
            return Err(DecompositionError::InvalidBeta(beta_join));
        }
        Ok(JoinConfig { cfg, beta_join })
    }

    pub fn beta_join(&self) -> f64 {
        self.beta_join
    }
}

/// Joins `r1` and `r2` on the columns `on` of `r1`, matched by name in `r2`.
///
/// A pair `(t1, t2)` joins when its proximity on `on` is at least
/// `beta_join`. The result has `r1`'s attributes followed by the attributes
/// only `r2` has; shared values come from `t1`. Output follows `(t1, t2)`
/// index order with exact duplicates removed.
pub fn alpha_join(
    r1: &Relation,
    r2: &Relation,
    on: &AttributeSet,
    jc: &JoinConfig,
) -> Result<Relation, DecompositionError> {
    let (s1, s2) = (r1.schema(), r2.schema());
    let mut pairs = Vec::with_capacity(on.len());
    for c in on.columns() {
        let attr = s1.attribute(c).ok_or_else(|| {
            DecompositionError::SchemaOverlapInvalid(format!(
                "column #{c} is not in the left relation"
            ))
        })?;
        let other = s2.index_of(&attr.name).ok_or_else(|| {
            DecompositionError::SchemaOverlapInvalid(format!(
                "join attribute {:?} is missing from the right relation",
                attr.name
            ))
        })?;
        pairs.push((c, other));
    }
    for (c, attr) in s1.attributes().iter().enumerate() {
        if !on.contains(c) && s2.index_of(&attr.name).is_some() {
            return Err(DecompositionError::SchemaOverlapInvalid(format!(
                "attribute {:?} is shared but not joined on",
                attr.name
            )));
        }
    }
    let right_only: Vec<usize> = (0..s2.len())
        .filter(|&c| !pairs.iter().any(|&(_, o)| o == c))
        .collect();
    let mut attributes = s1.attributes().to_vec();
    attributes.extend(right_only.iter().map(|&c| s2.attributes()[c].clone()));
    let schema = Schema::new(attributes)?;

    let (n1, n2) = (r1.len(), r2.len());
    let matches = (0..n1 * n2)
        .into_par_iter()
        .map(|k| {
            let (t1, t2) = (&r1.tuples()[k / n2], &r2.tuples()[k % n2]);
            let mut sp = 1.0f64;
            for &(c1, c2) in &pairs {
                sp = sp.min(sp_value(
                    &t1[c1],
                    &t2[c2],
                    &s1.attributes()[c1].domain,
                    &jc.cfg,
                )?);
            }
            Ok(sp >= jc.beta_join - TOLERANCE)
        })
        .collect::<Result<Vec<bool>, ProximityError>>()?;

    let tuples = matches
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(k, _)| {
            let (t1, t2) = (&r1.tuples()[k / n2], &r2.tuples()[k % n2]);
            let mut row = t1.clone();
            row.extend(right_only.iter().map(|&c| t2[c]));
            row
        })
        .collect();
    Ok(Relation::new(schema, dedup_tuples(tuples))?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LosslessReport {
    pub lossless: bool,
    /// Joined tuples with no β-close original.
    pub extra: Vec<Vec<FuzzyValue>>,
    /// Original tuples with no β-close joined tuple.
    pub missing: Vec<Vec<FuzzyValue>>,
    pub joined_count: usize,
}

/// Projects `r` onto `xy` and `xz`, rejoins on `x` and compares the result
/// with `r` up to `beta_join`-closeness over all attributes.
pub fn lossless_check(
    r: &Relation,
    x: &AttributeSet,
    y: &AttributeSet,
    jc: &JoinConfig,
) -> Result<LosslessReport, DecompositionError> {
    let schema = r.schema();
    if let Some(c) = x.union(y).columns().find(|&c| c >= schema.len()) {
        return Err(RelationError::UnknownAttribute(format!("#{c}")).into());
    }
    let y = y.difference(x);
    let z = complement_set(schema, x, &y);
    let left = r.project(&x.union(&y))?;
    let right = r.project(&x.union(&z))?;
    let on = AttributeSet::from_columns(x.columns().map(|c| {
        left.schema()
            .index_of(&schema.attributes()[c].name)
            .expect("projected")
    }));
    let joined = alpha_join(&left, &right, &on, jc)?;
    let order: Vec<usize> = schema
        .names()
        .map(|name| {
            joined
                .schema()
                .index_of(name)
                .expect("join covers the schema")
        })
        .collect();
    let joined = joined.select(&order)?;

    let all = schema.all();
    let close = |a: &[FuzzyValue], b: &[FuzzyValue]| -> Result<bool, ProximityError> {
        Ok(sp_on(a, b, &all, &jc.cfg, schema)? >= jc.beta_join - TOLERANCE)
    };
    let unmatched = |from: &[Vec<FuzzyValue>], to: &[Vec<FuzzyValue>]| {
        from.par_iter()
            .map(|t| {
                for u in to {
                    if close(t, u)? {
                        return Ok(None);
                    }
                }
                Ok(Some(t.clone()))
            })
            .collect::<Result<Vec<_>, ProximityError>>()
            .map(|v| v.into_iter().flatten().collect::<Vec<_>>())
    };
    let extra = unmatched(joined.tuples(), r.tuples())?;
    let missing = unmatched(r.tuples(), joined.tuples())?;
    Ok(LosslessReport {
        lossless: extra.is_empty() && missing.is_empty(),
        extra,
        missing,
        joined_count: joined.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeReport {
    pub fmvd: bool,
    pub lossless: bool,
    pub agree: bool,
    pub beta_join: f64,
}

/// Smallest left-hand proximity over ordered pairs that the FMVD checker
/// does not treat as vacuous; 1 when there is none.
fn min_nonvacuous_beta(
    r: &Relation,
    x: &AttributeSet,
    cfg: &ProximityConfig,
) -> Result<f64, DecompositionError> {
    let px = PairwiseProximity::compute(r.tuples(), x, cfg, r.schema())?;
    let n = r.len();
    Ok((0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| px.get(i, j))
        .filter(|&b| b > 0.0)
        .fold(1.0, f64::min))
}

/// Compares the FMVD verdict for `x ↠ y` with the lossless verdict for the
/// matching decomposition.
pub fn decomposition_probe(
    r: &Relation,
    x: &AttributeSet,
    y: &AttributeSet,
    cfg: &ProximityConfig,
) -> Result<ProbeReport, DecompositionError> {
    let fmvd = check_fmvd(r, &DependencyStatement::fmvd(x.clone(), y.clone())?, cfg)?.holds;
    let beta_join = min_nonvacuous_beta(r, x, cfg)?;
    let jc = JoinConfig::new(*cfg, beta_join)?;
    let lossless = lossless_check(r, x, y, &jc)?.lossless;
    Ok(ProbeReport {
        fmvd,
        lossless,
        agree: fmvd == lossless,
        beta_join,
    })
}

/// Rows rendered as cell text, for reports.
pub fn render_rows(rows: &[Vec<FuzzyValue>]) -> Vec<String> {
    rows.iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            format!("({})", cells.join(", "))
        })
        .collect()
}
