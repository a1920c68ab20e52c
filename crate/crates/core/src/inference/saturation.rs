use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::{
    normalize, AttrMask, DependencyKind, DependencySet, InferenceError, Statement, Universe,
    TRACE_UNIVERSE_LIMIT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Given,
    Reflexivity,
    Complementation,
    Augmentation,
    Additivity,
    Transitivity,
    PseudoTransitivity,
    Projectivity,
    Replication,
    Coalescence,
    FfdReflexivity,
    FfdAugmentation,
    FfdTransitivity,
}

#[derive(Debug, Clone)]
struct Derivation {
    rule: Rule,
    premises: Vec<Statement>,
    depth: usize,
}

/// One rule application in a derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: Rule,
    pub premises: Vec<Statement>,
    pub conclusion: Statement,
}

/// A [`TraceStep`] with attribute names substituted in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RenderedStep {
    pub rule: Rule,
    pub premises: Vec<String>,
    pub conclusion: String,
}

impl TraceStep {
    pub fn render(&self, universe: &Universe) -> RenderedStep {
        RenderedStep {
            rule: self.rule,
            premises: self
                .premises
                .iter()
                .map(|p| p.display(universe).to_string())
                .collect(),
            conclusion: self.conclusion.display(universe).to_string(),
        }
    }
}

/// Breadth-first closure of a dependency set under the inference rules.
///
/// Statements are kept normalized (`rhs ∩ lhs = ∅`); a stored statement stands
/// for every statement that normalizes to it, and rules are applied to all
/// such representatives. Round `k` derives the statements of depth `k`.
/// Statements with an empty left-hand side are never produced.
#[derive(Debug, Clone)]
pub struct Saturation {
    universe: Universe,
    facts: HashMap<Statement, Derivation>,
    order: Vec<Statement>,
    rounds: usize,
    fixpoint: bool,
}

type Candidate = (Statement, Rule, Vec<Statement>);

#[derive(Default)]
struct Index {
    fmvd_by_lhs: HashMap<AttrMask, Vec<Statement>>,
    fmvd_by_rhs: HashMap<AttrMask, Vec<Statement>>,
    ffd_by_lhs: HashMap<AttrMask, Vec<Statement>>,
    ffd_by_rhs: HashMap<AttrMask, Vec<Statement>>,
    ffds: Vec<Statement>,
    fmvds: Vec<Statement>,
}

impl Index {
    fn build(known: &[Statement]) -> Self {
        let mut index = Index::default();
        for &s in known {
            let (by_lhs, by_rhs, all) = match s.kind {
                DependencyKind::Fmvd => (
                    &mut index.fmvd_by_lhs,
                    &mut index.fmvd_by_rhs,
                    &mut index.fmvds,
                ),
                DependencyKind::Ffd => (
                    &mut index.ffd_by_lhs,
                    &mut index.ffd_by_rhs,
                    &mut index.ffds,
                ),
            };
            by_lhs.entry(s.lhs).or_default().push(s);
            by_rhs.entry(s.rhs).or_default().push(s);
            all.push(s);
        }
        index
    }

    fn lookup(map: &HashMap<AttrMask, Vec<Statement>>, key: AttrMask) -> &[Statement] {
        map.get(&key).map(Vec::as_slice).unwrap_or(&[])
    }
}

impl Saturation {
    /// Saturates for at most `max_depth` rounds.
    pub fn run(ds: &DependencySet, max_depth: usize) -> Result<Self, InferenceError> {
        let n = ds.universe().len();
        if n > TRACE_UNIVERSE_LIMIT {
            return Err(InferenceError::UniverseTooLarge(n));
        }
        Ok(Self::run_until(ds, max_depth, None))
    }

    /// Like [`Saturation::run`] but stops after the round that derives `target`.
    pub(crate) fn run_until(
        ds: &DependencySet,
        max_depth: usize,
        target: Option<Statement>,
    ) -> Self {
        let universe = ds.universe().clone();
        let full = universe.full();
        let mut sat = Saturation {
            universe,
            facts: HashMap::new(),
            order: Vec::new(),
            rounds: 0,
            fixpoint: false,
        };
        for s in ds.statements() {
            sat.insert(normalize(s), Rule::Given, vec![], 0);
        }
        for x in full.subsets().filter(|x| !x.is_empty()) {
            sat.insert(
                Statement::fmvd(x, AttrMask::EMPTY),
                Rule::Reflexivity,
                vec![],
                0,
            );
            sat.insert(
                Statement::ffd(x, AttrMask::EMPTY),
                Rule::FfdReflexivity,
                vec![],
                0,
            );
        }

        for depth in 1..=max_depth {
            if target.is_some_and(|t| sat.facts.contains_key(&t)) {
                return sat;
            }
            let known = sat.order.clone();
            let index = Index::build(&known);
            let delta: Vec<Statement> = known
                .iter()
                .copied()
                .filter(|s| sat.facts[s].depth == depth - 1)
                .collect();
            let mut out: Vec<Candidate> = Vec::new();
            for &d in &delta {
                unary(d, full, &mut out);
                as_first_premise(d, &index, full, &mut out);
                as_second_premise(d, &index, &mut out);
            }
            let before = sat.order.len();
            for (s, rule, premises) in out {
                sat.insert(s, rule, premises, depth);
            }
            sat.rounds = depth;
            if sat.order.len() == before {
                sat.fixpoint = true;
                return sat;
            }
        }
        sat
    }

    fn insert(&mut self, s: Statement, rule: Rule, premises: Vec<Statement>, depth: usize) {
        if s.lhs.is_empty() || self.facts.contains_key(&s) {
            return;
        }
        self.facts.insert(
            s,
            Derivation {
                rule,
                premises,
                depth,
            },
        );
        self.order.push(s);
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn contains(&self, s: &Statement) -> bool {
        self.facts.contains_key(&normalize(s))
    }

    pub fn depth_of(&self, s: &Statement) -> Option<usize> {
        self.facts.get(&normalize(s)).map(|d| d.depth)
    }

    /// Every derived statement, in derivation order.
    pub fn statements(&self) -> &[Statement] {
        &self.order
    }

    /// Number of rounds performed.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// True when the last round derived nothing new.
    pub fn is_fixpoint(&self) -> bool {
        self.fixpoint
    }

    /// A derivation of `s`, premises before conclusions, ending in `s`.
    pub fn trace(&self, s: &Statement) -> Option<Vec<TraceStep>> {
        let target = normalize(s);
        if !self.facts.contains_key(&target) {
            return None;
        }
        let mut steps = Vec::new();
        let mut visited = HashSet::new();
        self.collect(target, &mut visited, &mut steps);
        Some(steps)
    }

    fn collect(&self, s: Statement, visited: &mut HashSet<Statement>, steps: &mut Vec<TraceStep>) {
        if !visited.insert(s) {
            return;
        }
        let derivation = &self.facts[&s];
        for &p in &derivation.premises {
            self.collect(p, visited, steps);
        }
        steps.push(TraceStep {
            rule: derivation.rule,
            premises: derivation.premises.clone(),
            conclusion: s,
        });
    }
}

fn nonempty_subsets(m: AttrMask) -> impl Iterator<Item = AttrMask> {
    m.subsets().filter(|s| !s.is_empty())
}

fn unary(d: Statement, full: AttrMask, out: &mut Vec<Candidate>) {
    let outside = full.difference(d.lhs);
    match d.kind {
        DependencyKind::Fmvd => {
            out.push((
                Statement::fmvd(d.lhs, outside.difference(d.rhs)),
                Rule::Complementation,
                vec![d],
            ));
            // X ↠ Y, V ⊆ W gives XW ↠ YV, which normalizes to XW ↠ Y − W.
            for w in nonempty_subsets(outside) {
                out.push((
                    Statement::fmvd(d.lhs.union(w), d.rhs.difference(w)),
                    Rule::Augmentation,
                    vec![d],
                ));
            }
        }
        DependencyKind::Ffd => {
            out.push((Statement::fmvd(d.lhs, d.rhs), Rule::Replication, vec![d]));
            for w in nonempty_subsets(outside) {
                out.push((
                    Statement::ffd(d.lhs.union(w), d.rhs.difference(w)),
                    Rule::FfdAugmentation,
                    vec![d],
                ));
            }
        }
    }
}

/// Binary rules with `a` as the first premise and `b` as the second.
fn combine(a: Statement, b: Statement, out: &mut Vec<Candidate>) {
    use DependencyKind::{Ffd, Fmvd};
    let premises = || vec![a, b];
    match (a.kind, b.kind) {
        (Fmvd, Fmvd) => {
            if a.lhs == b.lhs {
                let x = a.lhs;
                out.push((
                    Statement::fmvd(x, a.rhs.union(b.rhs)),
                    Rule::Additivity,
                    premises(),
                ));
                for rhs in [
                    a.rhs.intersection(b.rhs),
                    a.rhs.difference(b.rhs),
                    b.rhs.difference(a.rhs),
                ] {
                    out.push((Statement::fmvd(x, rhs), Rule::Projectivity, premises()));
                }
            }
            // The left side of `b` must be some representative Y ∪ X' (X' ⊆ X) of `a`'s rhs.
            if a.rhs.is_subset(b.lhs) && b.lhs.is_subset(a.rhs.union(a.lhs)) {
                out.push((
                    Statement::fmvd(a.lhs, b.rhs.difference(a.lhs)),
                    Rule::Transitivity,
                    premises(),
                ));
            }
            // X ↠ Y, YW ↠ Z gives XW ↠ Z − YW for every W with Y ∪ X' ∪ W = lhs(b).
            if a.rhs.is_subset(b.lhs) {
                let forced = b.lhs.difference(a.rhs).difference(a.lhs);
                for extra in b.lhs.intersection(a.rhs.union(a.lhs)).subsets() {
                    let w = forced.union(extra);
                    if w.is_empty() {
                        continue;
                    }
                    let lhs = a.lhs.union(w);
                    out.push((
                        Statement::fmvd(lhs, b.rhs.difference(lhs)),
                        Rule::PseudoTransitivity,
                        premises(),
                    ));
                }
            }
        }
        (Fmvd, Ffd) => {
            // X ↠ Y, Z ⇝ W with W ⊆ Y ∪ X' (X' ⊆ X − Z) and Z ∩ Y = ∅ gives X ⇝ W.
            if b.lhs.intersection(a.rhs).is_empty()
                && b.rhs.difference(a.rhs).is_subset(a.lhs.difference(b.lhs))
            {
                out.push((
                    Statement::ffd(a.lhs, b.rhs.difference(a.lhs)),
                    Rule::Coalescence,
                    premises(),
                ));
            }
        }
        (Ffd, Ffd) => {
            if a.rhs.is_subset(b.lhs) && b.lhs.is_subset(a.rhs.union(a.lhs)) {
                let base = b.rhs.difference(a.lhs);
                for extra in a.rhs.subsets() {
                    out.push((
                        Statement::ffd(a.lhs, base.union(extra)),
                        Rule::FfdTransitivity,
                        premises(),
                    ));
                }
            }
        }
        (Ffd, Fmvd) => {}
    }
}

fn supersets_within(m: AttrMask, full: AttrMask) -> impl Iterator<Item = AttrMask> {
    full.difference(m)
        .subsets()
        .map(move |extra| m.union(extra))
}

fn as_first_premise(d: Statement, index: &Index, full: AttrMask, out: &mut Vec<Candidate>) {
    match d.kind {
        DependencyKind::Fmvd => {
            let mut seen = HashSet::new();
            for &b in Index::lookup(&index.fmvd_by_lhs, d.lhs) {
                seen.insert(b);
                combine(d, b, out);
            }
            for lhs in supersets_within(d.rhs, full) {
                for &b in Index::lookup(&index.fmvd_by_lhs, lhs) {
                    if !seen.contains(&b) {
                        combine(d, b, out);
                    }
                }
            }
            for &b in &index.ffds {
                combine(d, b, out);
            }
        }
        DependencyKind::Ffd => {
            for extra in d.lhs.subsets() {
                for &b in Index::lookup(&index.ffd_by_lhs, d.rhs.union(extra)) {
                    combine(d, b, out);
                }
            }
        }
    }
}

fn as_second_premise(d: Statement, index: &Index, out: &mut Vec<Candidate>) {
    match d.kind {
        DependencyKind::Fmvd => {
            let mut seen = HashSet::new();
            for &a in Index::lookup(&index.fmvd_by_lhs, d.lhs) {
                seen.insert(a);
                combine(a, d, out);
            }
            // Transitivity and pseudo-transitivity need rhs(a) ⊆ lhs(d).
            for rhs in d.lhs.subsets() {
                for &a in Index::lookup(&index.fmvd_by_rhs, rhs) {
                    if !seen.contains(&a) {
                        combine(a, d, out);
                    }
                }
            }
        }
        DependencyKind::Ffd => {
            for &a in &index.fmvds {
                combine(a, d, out);
            }
            for rhs in d.lhs.subsets() {
                for &a in Index::lookup(&index.ffd_by_rhs, rhs) {
                    combine(a, d, out);
                }
            }
        }
    }
}
