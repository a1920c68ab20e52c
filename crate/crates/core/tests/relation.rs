mod common;

use fuzzdep::parse_relation;
use fuzzdep::relation::RelationError;
use proptest::prelude::*;

proptest! {
    #[test]
    fn json_round_trip(seed in any::<u64>(), arity in 1usize..=4) {
        let mut rng = common::rng(seed);
        let r = common::random_mixed_relation(&mut rng, arity, 6);
        let back = parse_relation(r.to_json().as_bytes()).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn projection_is_duplicate_free_and_ordered(seed in any::<u64>(), arity in 1usize..=4) {
        let mut rng = common::rng(seed);
        let rows = common::random_rows(&mut rng, arity, 6, 2);
        let r = common::crisp_relation(arity, &rows);
        let attrs = common::random_nonempty_subset(&mut rng, arity);
        let p = r.project(&attrs).unwrap();
        let cols: Vec<usize> = attrs.columns().collect();
        let mut expected: Vec<Vec<i64>> = Vec::new();
        for row in &rows {
            let proj: Vec<i64> = cols.iter().map(|&c| row[c]).collect();
            if !expected.contains(&proj) {
                expected.push(proj);
            }
        }
        prop_assert_eq!(p.len(), expected.len());
        for (t, e) in p.tuples().iter().zip(&expected) {
            let got: Vec<String> = t.iter().map(|v| v.to_string()).collect();
            let want: Vec<String> = e.iter().map(|v| v.to_string()).collect();
            prop_assert_eq!(got, want);
        }
        let names: Vec<String> = p.schema().names().map(String::from).collect();
        prop_assert_eq!(names, r.schema().names_of(&attrs));
    }
}

#[test]
fn rejects_bad_documents() {
    let cases = [
        (r#"{"attributes": [], "tuples": []}"#, "empty"),
        (
            r#"{"attributes": [{"name": "A", "domain": {"lower": 0, "upper": 10}}], "tuples": [["11"]]}"#,
            "domain",
        ),
        (
            r#"{"attributes": [{"name": "A", "domain": {"lower": 0, "upper": 10}}], "tuples": [["1", "2"]]}"#,
            "arity",
        ),
        (
            r#"{"attributes": [{"name": "A", "domain": {"lower": 5, "upper": 1}}], "tuples": []}"#,
            "bounds",
        ),
        (
            r#"{"attributes": [{"name": "A", "domain": {"lower": 0, "upper": 10}}], "tuples": [["[1,"]]}"#,
            "cell",
        ),
    ];
    for (doc, what) in cases {
        assert!(parse_relation(doc.as_bytes()).is_err(), "{what}");
    }
    let dup = r#"{"attributes": [{"name": "A", "domain": {"lower": 0, "upper": 1}},
                                 {"name": "A", "domain": {"lower": 0, "upper": 1}}], "tuples": []}"#;
    assert!(matches!(
        parse_relation(dup.as_bytes()),
        Err(RelationError::DuplicateAttribute(_))
    ));
}
