//! Symbolic reasoning over sets of FFDs and FMVDs.
//!
//! Attribute sets are bitmasks over a declared universe of at most
//! [`MAX_UNIVERSE`] attributes. Two independent procedures decide implication:
//!
//! * [`dependency_basis`] refines `U − X` into the coarsest partition whose
//!   block unions are exactly the derivable right-hand sides of `X ↠ ·`.
//! * [`Saturation`] applies the inference rules exhaustively over the finite
//!   attribute lattice, recording how every statement was first derived.
//!
//! [`closure_contains`] answers membership with the basis and explains
//! derivable statements with a trace taken from saturation.

mod basis;
mod saturation;

use std::fmt;

use serde::Deserialize;
use thiserror::Error;

pub use basis::{dependency_basis, ffd_closure};
pub use saturation::{RenderedStep, Rule, Saturation, TraceStep};

pub use crate::dependency::DependencyKind;

pub const MAX_UNIVERSE: usize = 30;

/// Largest universe for which traces are reconstructed by saturation.
pub const TRACE_UNIVERSE_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("universe has {0} attributes; at most {MAX_UNIVERSE} are supported")]
    UniverseTooLarge(usize),
    #[error("malformed query: {0}")]
    MalformedQuery(String),
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("duplicate attribute {0:?} in universe")]
    DuplicateAttribute(String),
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
}

/// A set of universe attributes as a bitmask; bit `i` is attribute `i`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttrMask(pub u32);

impl AttrMask {
    pub const EMPTY: AttrMask = AttrMask(0);

    pub fn bit(i: usize) -> Self {
        AttrMask(1 << i)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_subset(self, other: AttrMask) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: AttrMask) -> Self {
        AttrMask(self.0 | other.0)
    }

    pub fn intersection(self, other: AttrMask) -> Self {
        AttrMask(self.0 & other.0)
    }

    pub fn difference(self, other: AttrMask) -> Self {
        AttrMask(self.0 & !other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    /// Every subset of `self`, including the empty set and `self`.
    pub fn subsets(self) -> impl Iterator<Item = AttrMask> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let current = next?;
            next = (current != full).then(|| (current.wrapping_sub(full)) & full);
            Some(AttrMask(current))
        })
    }
}

/// Named attributes; the position of a name is its bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    names: Vec<String>,
}

impl Universe {
    pub fn new<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
    ) -> Result<Self, InferenceError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_UNIVERSE {
            return Err(InferenceError::UniverseTooLarge(names.len()));
        }
        for (i, name) in names.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(InferenceError::UnknownAttribute(name.clone()));
            }
            if names[..i].contains(name) {
                return Err(InferenceError::DuplicateAttribute(name.clone()));
            }
        }
        Ok(Universe { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn full(&self) -> AttrMask {
        AttrMask(((1u64 << self.names.len()) - 1) as u32)
    }

    pub fn mask<S: AsRef<str>>(&self, names: &[S]) -> Result<AttrMask, InferenceError> {
        names.iter().try_fold(AttrMask::EMPTY, |acc, name| {
            let name = name.as_ref();
            self.names
                .iter()
                .position(|n| n == name)
                .map(|i| acc.union(AttrMask::bit(i)))
                .ok_or_else(|| InferenceError::UnknownAttribute(name.to_string()))
        })
    }

    pub fn names_of(&self, mask: AttrMask) -> Vec<&str> {
        mask.iter()
            .filter_map(|i| self.names.get(i).map(String::as_str))
            .collect()
    }

    /// Comma-separated attribute names, `{}` for the empty set.
    pub fn render(&self, mask: AttrMask) -> String {
        if mask.is_empty() {
            "{}".to_string()
        } else {
            self.names_of(mask).join(",")
        }
    }

    /// Parses `"A,B ->> C"` (FMVD) or `"A B -> C"` (FFD).
    pub fn parse_statement(&self, text: &str) -> Result<Statement, InferenceError> {
        let (kind, lhs, rhs) = if let Some((l, r)) = text.split_once("->>") {
            (DependencyKind::Fmvd, l, r)
        } else if let Some((l, r)) = text.split_once("->") {
            (DependencyKind::Ffd, l, r)
        } else {
            return Err(InferenceError::MalformedQuery(format!(
                "{text:?} has no '->' or '->>' arrow"
            )));
        };
        let split = |side: &str| -> Vec<String> {
            side.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty() && *s != "{}")
                .map(str::to_string)
                .collect()
        };
        let lhs = self.mask(&split(lhs))?;
        let rhs = self.mask(&split(rhs))?;
        if lhs.is_empty() {
            return Err(InferenceError::MalformedQuery(format!(
                "{text:?} has an empty left-hand side"
            )));
        }
        Ok(Statement { kind, lhs, rhs })
    }
}

/// An FFD or FMVD over universe bitmasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Statement {
    pub kind: DependencyKind,
    pub lhs: AttrMask,
    pub rhs: AttrMask,
}

impl Statement {
    pub fn ffd(lhs: AttrMask, rhs: AttrMask) -> Self {
        Statement {
            kind: DependencyKind::Ffd,
            lhs,
            rhs,
        }
    }

    pub fn fmvd(lhs: AttrMask, rhs: AttrMask) -> Self {
        Statement {
            kind: DependencyKind::Fmvd,
            lhs,
            rhs,
        }
    }

    /// True when the right-hand side lies inside the left-hand side.
    pub fn is_trivial(&self) -> bool {
        self.rhs.is_subset(self.lhs)
    }

    pub fn display<'a>(&'a self, universe: &'a Universe) -> impl fmt::Display + 'a {
        StatementDisplay {
            statement: self,
            universe,
        }
    }
}

struct StatementDisplay<'a> {
    statement: &'a Statement,
    universe: &'a Universe,
}

impl fmt::Display for StatementDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}",
            self.universe.render(self.statement.lhs),
            self.statement.kind.arrow(),
            self.universe.render(self.statement.rhs)
        )
    }
}

/// Removes left-hand attributes from the right-hand side. An FMVD whose
/// right-hand side becomes empty is trivially valid.
pub fn normalize(d: &Statement) -> Statement {
    Statement {
        rhs: d.rhs.difference(d.lhs),
        ..*d
    }
}

/// Given FFDs and FMVDs over one universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencySet {
    universe: Universe,
    ffds: Vec<Statement>,
    fmvds: Vec<Statement>,
}

impl DependencySet {
    pub fn new(universe: Universe) -> Self {
        DependencySet {
            universe,
            ffds: Vec::new(),
            fmvds: Vec::new(),
        }
    }

    /// Adds a statement, ignoring exact repeats.
    pub fn add(&mut self, s: Statement) -> Result<(), InferenceError> {
        self.validate(&s)?;
        let list = match s.kind {
            DependencyKind::Ffd => &mut self.ffds,
            DependencyKind::Fmvd => &mut self.fmvds,
        };
        if !list.contains(&s) {
            list.push(s);
        }
        Ok(())
    }

    pub fn with(mut self, s: Statement) -> Result<Self, InferenceError> {
        self.add(s)?;
        Ok(self)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn ffds(&self) -> &[Statement] {
        &self.ffds
    }

    pub fn fmvds(&self) -> &[Statement] {
        &self.fmvds
    }

    pub fn statements(&self) -> impl Iterator<Item = &Statement> {
        self.ffds.iter().chain(&self.fmvds)
    }

    pub(crate) fn validate(&self, s: &Statement) -> Result<(), InferenceError> {
        let full = self.universe.full();
        if s.lhs.is_empty() {
            return Err(InferenceError::MalformedQuery(
                "left-hand side must not be empty".to_string(),
            ));
        }
        if !s.lhs.union(s.rhs).is_subset(full) {
            return Err(InferenceError::MalformedQuery(
                "statement mentions attributes outside the universe".to_string(),
            ));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StatementEntry {
    lhs: Vec<String>,
    rhs: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DependencyFile {
    universe: Vec<String>,
    #[serde(default)]
    ffds: Vec<StatementEntry>,
    #[serde(default)]
    fmvds: Vec<StatementEntry>,
}

/// Parses a dependency document:
/// `{"universe":[..],"ffds":[{"lhs":[..],"rhs":[..]}],"fmvds":[..]}`.
pub fn parse_dependency_set(bytes: &[u8]) -> Result<DependencySet, InferenceError> {
    let file: DependencyFile =
        serde_json::from_slice(bytes).map_err(|e| InferenceError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    let universe = Universe::new(file.universe)?;
    let mut set = DependencySet::new(universe);
    for (kind, entries) in [
        (DependencyKind::Ffd, file.ffds),
        (DependencyKind::Fmvd, file.fmvds),
    ] {
        for entry in entries {
            let lhs = set.universe.mask(&entry.lhs)?;
            let rhs = set.universe.mask(&entry.rhs)?;
            set.add(Statement { kind, lhs, rhs })?;
        }
    }
    Ok(set)
}

/// Answer of [`closure_contains`].
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub derivable: bool,
    pub trace: Option<Vec<TraceStep>>,
}

/// Decides whether `q` follows from `ds`.
///
/// Membership is decided with the dependency basis (and the FFD closure
/// derived from it), which does not depend on `max_depth`. For universes of
/// at most [`TRACE_UNIVERSE_LIMIT`] attributes a derivation trace is
/// reconstructed by breadth-first saturation of at most `max_depth` rounds;
/// `trace` is `None` when no derivation was found within that bound.
pub fn closure_contains(
    ds: &DependencySet,
    q: &Statement,
    max_depth: usize,
) -> Result<Membership, InferenceError> {
    ds.validate(q)?;
    let q = normalize(q);
    let derivable = match q.kind {
        DependencyKind::Fmvd => {
            let blocks = dependency_basis(ds, q.lhs)?;
            is_union_of_blocks(q.rhs, &blocks)
        }
        DependencyKind::Ffd => q.rhs.is_subset(ffd_closure(ds, q.lhs)?),
    };
    let trace = if derivable && ds.universe().len() <= TRACE_UNIVERSE_LIMIT {
        let sat = Saturation::run_until(ds, max_depth, Some(q));
        sat.trace(&q)
    } else {
        None
    };
    Ok(Membership { derivable, trace })
}

/// True when `set` is exactly a union of some of `blocks`.
pub fn is_union_of_blocks(set: AttrMask, blocks: &[AttrMask]) -> bool {
    let covered = blocks
        .iter()
        .filter(|b| !b.intersection(set).is_empty())
        .fold(AttrMask::EMPTY, |acc, b| acc.union(*b));
    covered == set
}
