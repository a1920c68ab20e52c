//! Schemas, fuzzy relations and the JSON relation file format.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{AttributeDomain, FuzzyValue, IntervalError, POINT_SIZE_DIVISOR};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RelationError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("tuple {tuple}: value {value} of attribute {attr:?} lies outside its domain")]
    DomainViolation {
        attr: String,
        tuple: usize,
        value: String,
    },
    #[error("duplicate attribute {0:?}")]
    DuplicateAttribute(String),
    #[error("attribute names must be non-empty")]
    EmptyAttributeName,
    #[error("a relation needs at least one attribute")]
    EmptySchema,
    #[error("attribute {attr:?}: {source}")]
    InvalidDomain {
        attr: String,
        #[source]
        source: IntervalError,
    },
    #[error("tuple {tuple} has {found} cells, expected {expected}")]
    Arity {
        tuple: usize,
        expected: usize,
        found: usize,
    },
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub domain: AttributeDomain,
}

impl Attribute {
    pub fn new(name: impl Into<String>, domain: AttributeDomain) -> Self {
        Attribute {
            name: name.into(),
            domain,
        }
    }
}

/// An ordered list of uniquely named attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    attributes: Vec<Attribute>,
}

impl Schema {
    pub fn new(attributes: Vec<Attribute>) -> Result<Self, RelationError> {
        if attributes.is_empty() {
            return Err(RelationError::EmptySchema);
        }
        let mut seen = HashSet::new();
        for attr in &attributes {
            if attr.name.trim().is_empty() {
                return Err(RelationError::EmptyAttributeName);
            }
            if !seen.insert(attr.name.as_str()) {
                return Err(RelationError::DuplicateAttribute(attr.name.clone()));
            }
        }
        Ok(Schema { attributes })
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, column: usize) -> Option<&Attribute> {
        self.attributes.get(column)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.attributes.iter().map(|a| a.name.as_str())
    }

    /// Resolves attribute names into a set of columns.
    pub fn resolve<S: AsRef<str>>(&self, names: &[S]) -> Result<AttributeSet, RelationError> {
        names
            .iter()
            .map(|n| {
                let n = n.as_ref();
                self.index_of(n)
                    .ok_or_else(|| RelationError::UnknownAttribute(n.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(AttributeSet::from_columns)
    }

    pub fn all(&self) -> AttributeSet {
        AttributeSet::from_columns(0..self.len())
    }

    pub fn names_of(&self, set: &AttributeSet) -> Vec<String> {
        set.columns()
            .filter_map(|c| self.attribute(c).map(|a| a.name.clone()))
            .collect()
    }
}

/// A set of schema columns. Equality ignores the order the set was built in.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AttributeSet {
    columns: Vec<usize>,
}

impl AttributeSet {
    pub fn empty() -> Self {
        AttributeSet::default()
    }

    pub fn from_columns(columns: impl IntoIterator<Item = usize>) -> Self {
        let mut columns: Vec<usize> = columns.into_iter().collect();
        columns.sort_unstable();
        columns.dedup();
        AttributeSet { columns }
    }

    pub fn columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.columns.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn contains(&self, column: usize) -> bool {
        self.columns.binary_search(&column).is_ok()
    }

    pub fn is_subset(&self, other: &AttributeSet) -> bool {
        self.columns.iter().all(|c| other.contains(*c))
    }

    pub fn union(&self, other: &AttributeSet) -> AttributeSet {
        AttributeSet::from_columns(self.columns().chain(other.columns()))
    }

    pub fn intersection(&self, other: &AttributeSet) -> AttributeSet {
        AttributeSet::from_columns(self.columns().filter(|c| other.contains(*c)))
    }

    pub fn difference(&self, other: &AttributeSet) -> AttributeSet {
        AttributeSet::from_columns(self.columns().filter(|c| !other.contains(*c)))
    }
}

/// `U − (X ∪ Y)`
pub fn complement_set(schema: &Schema, x: &AttributeSet, y: &AttributeSet) -> AttributeSet {
    schema.all().difference(&x.union(y))
}

/// A schema with an ordered list of tuples. Tuple indices are stable and are
/// what reports refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    schema: Schema,
    tuples: Vec<Vec<FuzzyValue>>,
}

impl Relation {
    /// Validates arity and that every cell lies inside its attribute domain.
    pub fn new(schema: Schema, tuples: Vec<Vec<FuzzyValue>>) -> Result<Self, RelationError> {
        for (i, tuple) in tuples.iter().enumerate() {
            if tuple.len() != schema.len() {
                return Err(RelationError::Arity {
                    tuple: i,
                    expected: schema.len(),
                    found: tuple.len(),
                });
            }
            for (value, attr) in tuple.iter().zip(schema.attributes()) {
                if !attr.domain.admits(value) {
                    return Err(RelationError::DomainViolation {
                        attr: attr.name.clone(),
                        tuple: i,
                        value: value.to_string(),
                    });
                }
            }
        }
        Ok(Relation { schema, tuples })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn tuples(&self) -> &[Vec<FuzzyValue>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Restricts to `attrs` (kept in schema order) and drops exact duplicates,
    /// keeping the first occurrence.
    pub fn project(&self, attrs: &AttributeSet) -> Result<Relation, RelationError> {
        let columns: Vec<usize> = attrs.columns().collect();
        self.select(&columns)
    }

    /// Like [`Relation::project`] but with an explicit column order.
    pub fn select(&self, columns: &[usize]) -> Result<Relation, RelationError> {
        let attributes = columns
            .iter()
            .map(|&c| {
                self.schema
                    .attribute(c)
                    .cloned()
                    .ok_or_else(|| RelationError::UnknownAttribute(format!("#{c}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let schema = Schema::new(attributes)?;
        let tuples = self
            .tuples
            .iter()
            .map(|t| columns.iter().map(|&c| t[c]).collect())
            .collect();
        Ok(Relation {
            schema,
            tuples: dedup_tuples(tuples),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&RelationFile::from(self)).expect("relation serializes")
    }
}

fn cell_key(value: &FuzzyValue) -> (u8, [u64; 4]) {
    // +0.0 and -0.0 compare equal, so they must hash equal too.
    let bits = |x: f64| if x == 0.0 { 0 } else { x.to_bits() };
    match value {
        FuzzyValue::Crisp(x) => (0, [bits(*x), 0, 0, 0]),
        FuzzyValue::Null => (1, [0; 4]),
        FuzzyValue::ConfidenceInterval {
            interval,
            confidence,
        } => (
            2,
            [
                bits(interval.lower()),
                bits(interval.upper()),
                bits(*confidence),
                0,
            ],
        ),
        FuzzyValue::Trapezoid(t) => {
            let (a, b, c, d) = t.points();
            (3, [bits(a), bits(b), bits(c), bits(d)])
        }
    }
}

pub(crate) fn dedup_tuples(tuples: Vec<Vec<FuzzyValue>>) -> Vec<Vec<FuzzyValue>> {
    let mut seen = HashSet::new();
    tuples
        .into_iter()
        .filter(|t| seen.insert(t.iter().map(cell_key).collect::<Vec<_>>()))
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainBounds {
    lower: f64,
    upper: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttributeEntry {
    name: String,
    domain: DomainBounds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationFile {
    attributes: Vec<AttributeEntry>,
    tuples: Vec<Vec<FuzzyValue>>,
}

impl From<&Relation> for RelationFile {
    fn from(r: &Relation) -> Self {
        let attributes = r
            .schema
            .attributes()
            .iter()
            .map(|a| {
                let d = &a.domain;
                let default_epsilon = d.theta() / POINT_SIZE_DIVISOR;
                AttributeEntry {
                    name: a.name.clone(),
                    domain: DomainBounds {
                        lower: d.lower(),
                        upper: d.upper(),
                    },
                    theta: Some(d.theta()),
                    epsilon: (d.epsilon() != default_epsilon).then_some(d.epsilon()),
                }
            })
            .collect();
        RelationFile {
            attributes,
            tuples: r.tuples.clone(),
        }
    }
}

/// Parses and validates a relation document.
pub fn parse_relation(bytes: &[u8]) -> Result<Relation, RelationError> {
    let file: RelationFile = serde_json::from_slice(bytes).map_err(|e| RelationError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let attributes = file
        .attributes
        .into_iter()
        .map(|entry| {
            let invalid = |source| RelationError::InvalidDomain {
                attr: entry.name.clone(),
                source,
            };
            let mut domain =
                AttributeDomain::new(entry.domain.lower, entry.domain.upper).map_err(invalid)?;
            if let Some(theta) = entry.theta {
                domain = domain.with_theta(theta).map_err(invalid)?;
            }
            if let Some(epsilon) = entry.epsilon {
                domain = domain.with_epsilon(epsilon).map_err(invalid)?;
            }
            Ok(Attribute::new(entry.name.clone(), domain))
        })
        .collect::<Result<Vec<_>, RelationError>>()?;
    Relation::new(Schema::new(attributes)?, file.tuples)
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.schema.names().collect::<Vec<_>>().join("\t"))?;
        for t in &self.tuples {
            let cells: Vec<String> = t.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", cells.join("\t"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAIR: &str = r#"{
      "attributes": [
        {"name": "X", "domain": {"lower": 0, "upper": 100}},
        {"name": "Y", "domain": {"lower": 0, "upper": 100}},
        {"name": "Z", "domain": {"lower": 0, "upper": 100}, "theta": 100}
      ],
      "tuples": [["5", "7", "[1,9]"], ["5", "7", "[1,8]"]]
    }"#;

    #[test]
    fn parses_pair() {
        let r = parse_relation(PAIR.as_bytes()).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.schema().names().collect::<Vec<_>>(), ["X", "Y", "Z"]);
        assert_eq!(r.tuples()[1][2], FuzzyValue::interval(1.0, 8.0).unwrap());
    }

    #[test]
    fn inverted_interval_is_a_syntax_error() {
        let doc = PAIR.replace("[1,9]", "[9,1]");
        match parse_relation(doc.as_bytes()) {
            Err(RelationError::Syntax { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn null_cell_parses() {
        let doc = PAIR.replace("\"[1,8]\"", "\"null\"");
        let r = parse_relation(doc.as_bytes()).unwrap();
        assert_eq!(r.tuples()[1][2], FuzzyValue::Null);
    }

    #[test]
    fn rejects_bad_documents() {
        let out_of_domain = PAIR.replace("[1,8]", "[1,800]");
        assert!(matches!(
            parse_relation(out_of_domain.as_bytes()),
            Err(RelationError::DomainViolation { tuple: 1, .. })
        ));
        let dup = PAIR.replace("\"name\": \"Y\"", "\"name\": \"X\"");
        assert_eq!(
            parse_relation(dup.as_bytes()),
            Err(RelationError::DuplicateAttribute("X".into()))
        );
        let short = PAIR.replace("[\"5\", \"7\", \"[1,8]\"]", "[\"5\", \"7\"]");
        assert!(matches!(
            parse_relation(short.as_bytes()),
            Err(RelationError::Arity {
                tuple: 1,
                expected: 3,
                found: 2
            })
        ));
        let negative = PAIR.replacen("\"lower\": 0", "\"lower\": -1", 1);
        assert!(matches!(
            parse_relation(negative.as_bytes()),
            Err(RelationError::InvalidDomain { .. })
        ));
        assert!(matches!(
            parse_relation(b"{\"attributes\": ["),
            Err(RelationError::Syntax { .. })
        ));
    }

    #[test]
    fn projection() {
        let r = parse_relation(PAIR.as_bytes()).unwrap();
        let xy = r.schema().resolve(&["Y", "X"]).unwrap();
        let p = r.project(&xy).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.schema().names().collect::<Vec<_>>(), ["X", "Y"]);
        assert_eq!(
            p.tuples()[0],
            vec![FuzzyValue::Crisp(5.0), FuzzyValue::Crisp(7.0)]
        );
        assert_eq!(r.project(&r.schema().all()).unwrap(), r);
        assert!(matches!(
            r.schema().resolve(&["W"]),
            Err(RelationError::UnknownAttribute(_))
        ));
    }

    #[test]
    fn projection_keeps_distinct_rows() {
        let d = AttributeDomain::new(0.0, 10.0).unwrap();
        let schema = Schema::new(vec![Attribute::new("A", d), Attribute::new("B", d)]).unwrap();
        let r = Relation::new(
            schema,
            vec![
                vec![FuzzyValue::Crisp(1.0), FuzzyValue::Crisp(3.0)],
                vec![FuzzyValue::Crisp(2.0), FuzzyValue::Crisp(3.0)],
            ],
        )
        .unwrap();
        let a = r.schema().resolve(&["A"]).unwrap();
        assert_eq!(r.project(&a).unwrap().len(), 2);
    }

    #[test]
    fn complement() {
        let d = AttributeDomain::new(0.0, 1.0).unwrap();
        let schema = Schema::new(
            ["A", "B", "C", "D"]
                .iter()
                .map(|n| Attribute::new(*n, d))
                .collect(),
        )
        .unwrap();
        let set = |names: &[&str]| schema.resolve(names).unwrap();
        assert_eq!(
            complement_set(&schema, &set(&["A"]), &set(&["B"])),
            set(&["C", "D"])
        );
        assert!(complement_set(&schema, &set(&["A"]), &set(&["B", "C", "D"])).is_empty());
        assert_eq!(complement_set(&schema, &set(&[]), &set(&[])), schema.all());
    }

    #[test]
    fn attribute_set_is_order_free() {
        assert_eq!(
            AttributeSet::from_columns([2, 0, 2]),
            AttributeSet::from_columns([0, 2])
        );
    }

    #[test]
    fn json_round_trip_keeps_overrides() {
        let doc = r#"{"attributes":[{"name":"A","domain":{"lower":1,"upper":3},"theta":50,"epsilon":0.25}],
                      "tuples":[["tz(1,1.5,2,3)"],["[1,2]/0.3"],["null"],["2.5"]]}"#;
        let r = parse_relation(doc.as_bytes()).unwrap();
        let again = parse_relation(r.to_json().as_bytes()).unwrap();
        assert_eq!(again, r);
        assert_eq!(again.schema().attributes()[0].domain.epsilon(), 0.25);
    }
}
