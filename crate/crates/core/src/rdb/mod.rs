//! Building a data graph from a relational database.
//!
//! Every non-auxiliary row becomes a node; foreign keys become edges, with
//! significantly-named foreign keys reified as explicit connector nodes so
//! the attribute name (e.g. `river1`, `grader`) is not lost. How a relation
//! is treated depends on how its primary key overlaps its foreign keys, see
//! [`classify_relation`].

mod build;
mod io;

pub use build::{build_graph, RdbBuild};
pub use io::{load_rows_csv_dir, load_rows_json, load_rows_json_file, load_schema};

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::Deserialize;
use thiserror::Error;

use crate::graph::{GraphError, WeightPolicy};
use crate::naming::{normalize_attr_name, NamePreference};
use crate::{DanglingPolicy, Significance};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForeignKey {
    /// Referencing attributes, in an order that lines up with `target_key`.
    pub attrs: Vec<String>,
    /// Referenced relation.
    pub target: String,
    /// Attributes of the target matched positionally against `attrs`;
    /// defaults to the target's primary key in declared order. Must name
    /// the target's primary key either way.
    #[serde(default)]
    pub target_key: Option<Vec<String>>,
}

impl ForeignKey {
    /// Short display name: the attribute list joined with `_`.
    pub fn display_name(&self) -> String {
        self.attrs.join("_")
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Relation {
    pub name: String,
    pub attributes: Vec<String>,
    pub primary_key: Vec<String>,
    #[serde(default)]
    pub foreign_keys: Vec<ForeignKey>,
}

impl Relation {
    pub fn is_fk_attribute(&self, attr: &str) -> bool {
        self.foreign_keys
            .iter()
            .any(|fk| fk.attrs.iter().any(|a| a == attr))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationalSchema {
    pub relations: Vec<Relation>,
}

impl RelationalSchema {
    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.name == name)
    }

    /// Structural checks on the descriptor itself; row data is checked by
    /// [`build_graph`].
    pub fn check(&self) -> Result<(), RdbError> {
        let mut seen = BTreeSet::new();
        for relation in &self.relations {
            if relation.name.is_empty() {
                return Err(RdbError::Schema("relation with empty name".into()));
            }
            if !seen.insert(relation.name.clone()) {
                return Err(RdbError::Schema(format!(
                    "relation `{}` declared twice",
                    relation.name
                )));
            }
            let attrs: BTreeSet<&str> = relation.attributes.iter().map(String::as_str).collect();
            if attrs.len() != relation.attributes.len() || attrs.contains("") {
                return Err(RdbError::Schema(format!(
                    "relation `{}` has duplicate or empty attribute names",
                    relation.name
                )));
            }
            if relation.primary_key.is_empty() {
                return Err(RdbError::Schema(format!(
                    "relation `{}` has no primary key",
                    relation.name
                )));
            }
            for key_attr in &relation.primary_key {
                if !attrs.contains(key_attr.as_str()) {
                    return Err(RdbError::Schema(format!(
                        "relation `{}`: primary-key attribute `{key_attr}` is not declared",
                        relation.name
                    )));
                }
            }
            let mut fk_sets: Vec<BTreeSet<&str>> = Vec::new();
            for fk in &relation.foreign_keys {
                if fk.attrs.is_empty() {
                    return Err(RdbError::Schema(format!(
                        "relation `{}`: foreign key without attributes",
                        relation.name
                    )));
                }
                for attr in &fk.attrs {
                    if !attrs.contains(attr.as_str()) {
                        return Err(RdbError::Schema(format!(
                            "relation `{}`: foreign-key attribute `{attr}` is not declared",
                            relation.name
                        )));
                    }
                }
                let set: BTreeSet<&str> = fk.attrs.iter().map(String::as_str).collect();
                if set.len() != fk.attrs.len() {
                    return Err(RdbError::Schema(format!(
                        "relation `{}`: foreign key `{}` repeats an attribute",
                        relation.name,
                        fk.display_name()
                    )));
                }
                if fk_sets.contains(&set) {
                    return Err(RdbError::Schema(format!(
                        "relation `{}`: two foreign keys over the same attributes",
                        relation.name
                    )));
                }
                fk_sets.push(set);
                let Some(target) = self.relation(&fk.target) else {
                    return Err(RdbError::UnknownTarget {
                        relation: relation.name.clone(),
                        fk: fk.display_name(),
                        target: fk.target.clone(),
                    });
                };
                let target_key = fk.target_key.as_ref().unwrap_or(&target.primary_key);
                let key_set: BTreeSet<&str> = target_key.iter().map(String::as_str).collect();
                let pk_set: BTreeSet<&str> =
                    target.primary_key.iter().map(String::as_str).collect();
                if target_key.len() != fk.attrs.len() || key_set != pk_set {
                    return Err(RdbError::Schema(format!(
                        "relation `{}`: foreign key `{}` does not match the primary key of `{}`",
                        relation.name,
                        fk.display_name(),
                        fk.target
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One row: attribute name to value. Values are uninterpreted strings;
/// an empty string stands for null.
pub type Row = BTreeMap<String, String>;

/// Rows per relation, in source order.
pub type RowSet = BTreeMap<String, Vec<Row>>;

#[derive(Debug, Clone)]
pub struct RelationalDatabase {
    pub schema: RelationalSchema,
    pub rows: RowSet,
}

/// A foreign key is insignificantly named when every one of its attributes,
/// normalized, matches the target's primary-key attributes or the target's
/// relation name. Anything else (e.g. `river1` pointing at `river`, or
/// `grader` pointing at `lecturer`) carries meaning of its own.
pub fn fk_significance(schema: &RelationalSchema, fk: &ForeignKey) -> Significance {
    let Some(target) = schema.relation(&fk.target) else {
        return Significance::Significant;
    };
    let mut plain: BTreeSet<String> = target
        .primary_key
        .iter()
        .map(|a| normalize_attr_name(a))
        .collect();
    plain.insert(normalize_attr_name(&target.name));
    if fk
        .attrs
        .iter()
        .all(|attr| plain.contains(&normalize_attr_name(attr)))
    {
        Significance::Insignificant
    } else {
        Significance::Significant
    }
}

/// How a relation is turned into graph parts, decided by the overlap of its
/// primary key with its foreign keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationCase {
    /// Primary key shares no attribute with any foreign key: a free-standing
    /// entity.
    Entity,
    /// Primary key includes exactly one foreign key plus extra attributes,
    /// or a significantly named one: still an object (weak entities,
    /// specializations), with the foreign keys becoming edges.
    WeakEntity,
    /// Primary key spans two or more foreign keys: the row stands for a
    /// relationship and becomes a connector when every foreign key is
    /// insignificantly named (and nothing references the relation), an
    /// object otherwise.
    Relationship,
    /// Single insignificant foreign key equal to the primary key: an
    /// auxiliary table whose rows fold into the referenced object as a
    /// nested property named after the relation.
    Auxiliary,
}

pub fn classify_relation(schema: &RelationalSchema, relation: &Relation) -> RelationCase {
    let pk: BTreeSet<&str> = relation.primary_key.iter().map(String::as_str).collect();
    let in_some_fk = |attr: &str| relation.is_fk_attribute(attr);
    if !relation.primary_key.iter().any(|a| in_some_fk(a)) {
        return RelationCase::Entity;
    }
    if let [fk] = relation.foreign_keys.as_slice() {
        let fk_set: BTreeSet<&str> = fk.attrs.iter().map(String::as_str).collect();
        if fk_set == pk && fk_significance(schema, fk) == Significance::Insignificant {
            return RelationCase::Auxiliary;
        }
    }
    let keys_inside_pk = relation
        .foreign_keys
        .iter()
        .filter(|fk| fk.attrs.iter().all(|a| pk.contains(a.as_str())))
        .count();
    if keys_inside_pk >= 2 {
        RelationCase::Relationship
    } else {
        RelationCase::WeakEntity
    }
}

/// Whether any relation in the schema (including itself) references `name`.
pub fn is_referenced(schema: &RelationalSchema, name: &str) -> bool {
    schema
        .relations
        .iter()
        .flat_map(|r| &r.foreign_keys)
        .any(|fk| fk.target == name)
}

#[derive(Debug, Clone)]
pub struct RdbConfig {
    pub weight_policy: WeightPolicy,
    pub name_preference: NamePreference,
    /// Give nameless relationship objects a name joined from the names of
    /// the objects they reference.
    pub synthesize_names: bool,
    pub dangling: DanglingPolicy,
}

impl Default for RdbConfig {
    fn default() -> Self {
        RdbConfig {
            weight_policy: WeightPolicy::default(),
            name_preference: NamePreference::default(),
            synthesize_names: false,
            dangling: DanglingPolicy::Fail,
        }
    }
}

#[derive(Debug, Error)]
pub enum RdbError {
    #[error("schema descriptor rejected: {0}")]
    Schema(String),
    #[error("relation `{relation}`: foreign key `{fk}` targets unknown relation `{target}`")]
    UnknownTarget {
        relation: String,
        fk: String,
        target: String,
    },
    #[error("rows supplied for undeclared relation `{0}`")]
    UnknownRelation(String),
    #[error("row data rejected: {0}")]
    Data(String),
    #[error("relation `{relation}` row {row}: {message}")]
    Row {
        relation: String,
        row: usize,
        message: String,
    },
    #[error(
        "relation `{relation}` row {row}: foreign key `{fk}` = ({values}) matches no row of `{target}`"
    )]
    DanglingReference {
        relation: String,
        row: usize,
        fk: String,
        values: String,
        target: String,
    },
    #[error("auxiliary relations `{0}` fold into each other in a cycle")]
    AuxiliaryCycle(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cannot read row data: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot read descriptor: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}
