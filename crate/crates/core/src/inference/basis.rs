use super::{normalize, AttrMask, DependencySet, InferenceError, Statement, MAX_UNIVERSE};

/// FMVDs used for refinement: the given ones plus `V ↠ A` for every FFD
/// `V ⇝ W` and `A ∈ W − V` (FFD decomposition followed by replication).
fn refining_fmvds(ds: &DependencySet) -> Vec<Statement> {
    let mut out: Vec<Statement> = ds.fmvds().iter().map(normalize).collect();
    for f in ds.ffds().iter().map(normalize) {
        out.extend(
            f.rhs
                .iter()
                .map(|a| Statement::fmvd(f.lhs, AttrMask::bit(a))),
        );
    }
    out.retain(|s| !s.rhs.is_empty());
    out
}

/// The dependency basis of `x`: the coarsest partition of `U − x` such that
/// `x ↠ W` is derivable iff `W − x` is a union of blocks.
///
/// Blocks are returned ordered by their lowest attribute.
pub fn dependency_basis(ds: &DependencySet, x: AttrMask) -> Result<Vec<AttrMask>, InferenceError> {
    let universe = ds.universe();
    if universe.len() > MAX_UNIVERSE {
        return Err(InferenceError::UniverseTooLarge(universe.len()));
    }
    if !x.is_subset(universe.full()) {
        return Err(InferenceError::MalformedQuery(
            "attribute set lies outside the universe".to_string(),
        ));
    }
    let rest = universe.full().difference(x);
    let mut blocks = if rest.is_empty() { vec![] } else { vec![rest] };
    let fmvds = refining_fmvds(ds);

    let mut changed = true;
    while changed {
        changed = false;
        for s in &fmvds {
            let mut next = Vec::with_capacity(blocks.len() + 1);
            for &b in &blocks {
                let inside = b.intersection(s.rhs);
                let outside = b.difference(s.rhs);
                if b.intersection(s.lhs).is_empty() && !inside.is_empty() && !outside.is_empty() {
                    next.push(inside);
                    next.push(outside);
                    changed = true;
                } else {
                    next.push(b);
                }
            }
            blocks = next;
        }
    }
    blocks.sort_by_key(|b| b.0.trailing_zeros());
    Ok(blocks)
}

/// Attributes functionally determined by `x`: `x` itself plus every singleton
/// block `{A}` of the basis for which some FFD `V ⇝ W` has `A ∈ W − V`.
pub fn ffd_closure(ds: &DependencySet, x: AttrMask) -> Result<AttrMask, InferenceError> {
    let blocks = dependency_basis(ds, x)?;
    let determined = ds
        .ffds()
        .iter()
        .map(normalize)
        .fold(AttrMask::EMPTY, |acc, f| acc.union(f.rhs));
    Ok(blocks
        .iter()
        .filter(|b| b.len() == 1 && b.is_subset(determined))
        .fold(x, |acc, b| acc.union(*b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::Universe;

    fn setup(names: &[&str], deps: &[&str]) -> (Universe, DependencySet) {
        let u = Universe::new(names.iter().copied()).unwrap();
        let mut ds = DependencySet::new(u.clone());
        for d in deps {
            ds.add(u.parse_statement(d).unwrap()).unwrap();
        }
        (u, ds)
    }

    fn blocks(u: &Universe, ds: &DependencySet, x: &str) -> Vec<String> {
        let x = u.mask(&[x]).unwrap();
        dependency_basis(ds, x)
            .unwrap()
            .into_iter()
            .map(|b| u.render(b))
            .collect()
    }

    #[test]
    fn single_fmvd_splits_complement() {
        let (u, ds) = setup(&["A", "B", "C", "D"], &["A ->> B"]);
        assert_eq!(blocks(&u, &ds, "A"), ["B", "C,D"]);
    }

    #[test]
    fn no_dependencies_single_block() {
        let (u, ds) = setup(&["A", "B", "C"], &[]);
        assert_eq!(blocks(&u, &ds, "A"), ["B,C"]);
    }

    #[test]
    fn two_fmvds_refine_to_singletons() {
        let (u, ds) = setup(&["A", "B", "C", "D"], &["A ->> B", "A ->> C"]);
        assert_eq!(blocks(&u, &ds, "A"), ["B", "C", "D"]);
    }

    #[test]
    fn ffds_split_into_singletons() {
        let (u, ds) = setup(&["A", "B", "C", "D"], &["A -> B C"]);
        assert_eq!(blocks(&u, &ds, "A"), ["B", "C", "D"]);
        let closure = ffd_closure(&ds, u.mask(&["A"]).unwrap()).unwrap();
        assert_eq!(u.render(closure), "A,B,C");
    }

    #[test]
    fn overlapping_lhs_blocks_split() {
        let (u, ds) = setup(&["A", "B", "C"], &["B -> C"]);
        assert_eq!(blocks(&u, &ds, "A"), ["B,C"]);
        assert_eq!(
            u.render(ffd_closure(&ds, u.mask(&["A"]).unwrap()).unwrap()),
            "A"
        );
    }

    #[test]
    fn coalescence_via_closure() {
        // A ->> B with C -> B gives A -> B.
        let (u, ds) = setup(&["A", "B", "C", "D"], &["A ->> B", "C -> B"]);
        let closure = ffd_closure(&ds, u.mask(&["A"]).unwrap()).unwrap();
        assert_eq!(u.render(closure), "A,B");
    }

    #[test]
    fn whole_universe_lhs_has_empty_basis() {
        let (u, ds) = setup(&["A", "B"], &["A ->> B"]);
        assert!(dependency_basis(&ds, u.full()).unwrap().is_empty());
    }
}
