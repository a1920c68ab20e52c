#![allow(dead_code)]

use fuzzdep::inference::{AttrMask, DependencySet, Statement, Universe};
use fuzzdep::relation::Attribute;
use fuzzdep::{AttributeDomain, AttributeSet, FuzzyValue, Relation, Schema};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NAMES: [&str; 8] = ["A", "B", "C", "D", "E", "F", "G", "H"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn schema(arity: usize) -> Schema {
    let attrs = NAMES[..arity]
        .iter()
        .map(|n| Attribute::new(*n, AttributeDomain::new(0.0, 10.0).unwrap()))
        .collect();
    Schema::new(attrs).unwrap()
}

pub fn crisp_relation(arity: usize, rows: &[Vec<i64>]) -> Relation {
    let tuples = rows
        .iter()
        .map(|r| r.iter().map(|&v| FuzzyValue::Crisp(v as f64)).collect())
        .collect();
    Relation::new(schema(arity), tuples).unwrap()
}

/// Integer rows with `1..=max_tuples` rows, values in `0..values`, no duplicates.
pub fn random_rows(
    rng: &mut ChaCha8Rng,
    arity: usize,
    max_tuples: usize,
    values: i64,
) -> Vec<Vec<i64>> {
    let n = rng.random_range(1..=max_tuples);
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for _ in 0..n {
        let row: Vec<i64> = (0..arity).map(|_| rng.random_range(0..values)).collect();
        if !rows.contains(&row) {
            rows.push(row);
        }
    }
    rows
}

/// A crisp, null or (full-confidence) interval cell inside `[0, 10]`.
pub fn random_cell(rng: &mut ChaCha8Rng) -> FuzzyValue {
    match rng.random_range(0..10) {
        0 => FuzzyValue::Null,
        1..=4 => FuzzyValue::Crisp(rng.random_range(0..6) as f64),
        _ => {
            let a = rng.random_range(0..6);
            let b = rng.random_range(a..=a + 4);
            FuzzyValue::interval(a as f64, b as f64).unwrap()
        }
    }
}

pub fn random_mixed_relation(rng: &mut ChaCha8Rng, arity: usize, max_tuples: usize) -> Relation {
    let n = rng.random_range(1..=max_tuples);
    let tuples = (0..n)
        .map(|_| (0..arity).map(|_| random_cell(rng)).collect())
        .collect();
    Relation::new(schema(arity), tuples).unwrap()
}

pub fn random_subset(rng: &mut ChaCha8Rng, arity: usize) -> AttributeSet {
    AttributeSet::from_columns((0..arity).filter(|_| rng.random_bool(0.5)))
}

pub fn random_nonempty_subset(rng: &mut ChaCha8Rng, arity: usize) -> AttributeSet {
    loop {
        let s = random_subset(rng, arity);
        if !s.is_empty() {
            return s;
        }
    }
}

fn agree(a: &[i64], b: &[i64], cols: &[usize]) -> bool {
    cols.iter().all(|&c| a[c] == b[c])
}

/// Classical MVD `x ↠ y` by brute force over integer rows.
pub fn classical_mvd(rows: &[Vec<i64>], arity: usize, x: &[usize], y: &[usize]) -> bool {
    let z: Vec<usize> = (0..arity)
        .filter(|c| !x.contains(c) && !y.contains(c))
        .collect();
    rows.iter().all(|t1| {
        rows.iter().all(|t2| {
            !agree(t1, t2, x)
                || rows
                    .iter()
                    .any(|t| agree(t, t1, x) && agree(t, t1, y) && agree(t, t2, &z))
        })
    })
}

/// Classical FD `x → y` by brute force over integer rows.
pub fn classical_fd(rows: &[Vec<i64>], x: &[usize], y: &[usize]) -> bool {
    rows.iter()
        .all(|t1| rows.iter().all(|t2| !agree(t1, t2, x) || agree(t1, t2, y)))
}

/// Natural join of the projections onto `x ∪ y` and `x ∪ z`, as full rows.
pub fn classical_rejoin(
    rows: &[Vec<i64>],
    arity: usize,
    x: &[usize],
    y: &[usize],
) -> Vec<Vec<i64>> {
    let left: Vec<usize> = (0..arity)
        .filter(|c| x.contains(c) || y.contains(c))
        .collect();
    let mut out: Vec<Vec<i64>> = Vec::new();
    for t1 in rows {
        for t2 in rows {
            if agree(t1, t2, x) {
                let row: Vec<i64> = (0..arity)
                    .map(|c| if left.contains(&c) { t1[c] } else { t2[c] })
                    .collect();
                if !out.contains(&row) {
                    out.push(row);
                }
            }
        }
    }
    out
}

pub fn classical_lossless(rows: &[Vec<i64>], arity: usize, x: &[usize], y: &[usize]) -> bool {
    let joined = classical_rejoin(rows, arity, x, y);
    joined.iter().all(|r| rows.contains(r)) && rows.iter().all(|r| joined.contains(r))
}

pub fn universe(n: usize) -> Universe {
    Universe::new(NAMES[..n].iter().copied()).unwrap()
}

pub fn random_mask(rng: &mut ChaCha8Rng, n: usize, nonempty: bool) -> AttrMask {
    loop {
        let m = AttrMask(rng.random_range(0..(1u32 << n)));
        if !nonempty || !m.is_empty() {
            return m;
        }
    }
}

/// Up to `max_statements` random FFDs and FMVDs over an `n`-attribute universe.
pub fn random_dependency_set(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_statements: usize,
    ffd_share: f64,
) -> DependencySet {
    let mut ds = DependencySet::new(universe(n));
    let k = rng.random_range(1..=max_statements);
    for _ in 0..k {
        let lhs = random_mask(rng, n, true);
        let rhs = random_mask(rng, n, true);
        let s = if rng.random_bool(ffd_share) {
            Statement::ffd(lhs, rhs)
        } else {
            Statement::fmvd(lhs, rhs)
        };
        ds.add(s).unwrap();
    }
    ds
}

pub fn mask_to_set(m: AttrMask) -> AttributeSet {
    AttributeSet::from_columns(m.iter())
}
