//! Two-pass construction: nodes for every non-auxiliary row, then foreign-key
//! edges (with connectors for significantly named keys), auxiliary folding and
//! opposite edges.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::graph::{
    DataGraph, DataGraphBuilder, EdgeRole, GraphNode, NodeId, Orientation, PropertyNode,
};
use crate::naming::choose_object_name;
use crate::rdb::{
    classify_relation, fk_significance, is_referenced, ForeignKey, RdbConfig, RdbError, Relation,
    RelationCase, RelationalDatabase, Row,
};
use crate::{DanglingPolicy, Significance};

/// Result of a build: the graph plus everything a caller needs to report on
/// how the schema was interpreted.
#[derive(Debug)]
pub struct RdbBuild {
    pub graph: DataGraph,
    /// Non-fatal oddities in the data (null references, skipped rows), each
    /// with enough context to locate the source row.
    pub warnings: Vec<String>,
    /// How each relation was classified, keyed by relation name.
    pub case_tally: BTreeMap<String, RelationCase>,
}

pub fn build_graph(db: &RelationalDatabase, config: &RdbConfig) -> Result<RdbBuild, RdbError> {
    db.schema.check()?;
    let ctx = Context::prepare(db, config)?;
    let mut warnings = Vec::new();
    let mut builder = DataGraphBuilder::new(config.weight_policy.clone());

    // Pass 1: a node per row of every non-auxiliary relation.
    for relation in &db.schema.relations {
        if ctx.case_of(&relation.name) == RelationCase::Auxiliary {
            continue;
        }
        let as_connector = ctx.builds_connectors(&relation.name);
        for (index, row) in ctx.rows_of(&relation.name).iter().enumerate() {
            // A connector links rows together; when none of its references
            // resolves it would sit in the graph with no outgoing edge, so
            // the row is dropped instead.
            if as_connector && !row_links_anything(&ctx, relation, row, index)? {
                warnings.push(format!(
                    "{}: no reference resolves, relationship row dropped",
                    Locator::new(&relation.name, index)
                ));
                continue;
            }
            let id = ctx.node_id(relation, row);
            let properties = plain_properties(relation, row);
            let node = if as_connector {
                GraphNode::connector(id, &relation.name).with_properties(properties)
            } else {
                let name = choose_object_name(&properties, &config.name_preference);
                let mut node =
                    GraphNode::object(id, &relation.name).with_properties(properties);
                node.name = name;
                node
            };
            builder.add_node(node)?;
        }
    }

    // Auxiliary rows fold into the object they reference as one nested
    // property named after the relation.
    for relation in &db.schema.relations {
        if ctx.case_of(&relation.name) != RelationCase::Auxiliary {
            continue;
        }
        for (index, row) in ctx.rows_of(&relation.name).iter().enumerate() {
            let at = Locator::new(&relation.name, index);
            let Some(target) =
                ctx.resolve(row, &relation.foreign_keys[0], &at, &mut warnings)?
            else {
                continue;
            };
            let children = plain_properties(relation, row);
            if children.is_empty() {
                warnings.push(format!("{at}: nothing to fold, row carries only key values"));
                continue;
            }
            let target_node = builder
                .node_mut(&target)
                .expect("resolved targets exist as nodes");
            target_node
                .properties
                .push(PropertyNode::nested(&relation.name, children));
        }
    }

    // Pass 2: an edge per resolvable foreign key of every remaining row,
    // reified through a fresh connector when the key's name is significant.
    let mut pending_names: Vec<(NodeId, Vec<NodeId>)> = Vec::new();
    for relation in &db.schema.relations {
        if ctx.case_of(&relation.name) == RelationCase::Auxiliary {
            continue;
        }
        let wants_synthetic_name = config.synthesize_names
            && ctx.case_of(&relation.name) == RelationCase::Relationship
            && !ctx.builds_connectors(&relation.name);
        for (index, row) in ctx.rows_of(&relation.name).iter().enumerate() {
            let at = Locator::new(&relation.name, index);
            let source = ctx.node_id(relation, row);
            if !builder.has_node(&source) {
                continue; // dropped in pass 1
            }
            let mut referenced = Vec::new();
            for fk in &relation.foreign_keys {
                let Some(target) = ctx.resolve(row, fk, &at, &mut warnings)? else {
                    continue;
                };
                referenced.push(target.clone());
                match fk_significance(&db.schema, fk) {
                    Significance::Insignificant => {
                        if source == target {
                            warnings.push(format!(
                                "{at}: foreign key `{}` points back at its own row, edge dropped",
                                fk.display_name()
                            ));
                            continue;
                        }
                        builder.add_edge(
                            source.clone(),
                            target,
                            Orientation::Original,
                            EdgeRole::ForeignKey,
                        );
                    }
                    Significance::Significant => {
                        let connector = NodeId::new(format!(
                            "{}:{}",
                            source.as_str(),
                            fk.display_name()
                        ));
                        builder.add_node(GraphNode::connector(
                            connector.clone(),
                            fk.display_name(),
                        ))?;
                        builder.add_edge(
                            source.clone(),
                            connector.clone(),
                            Orientation::Original,
                            EdgeRole::ForeignKey,
                        );
                        builder.add_edge(connector, target, Orientation::Original, EdgeRole::ForeignKey);
                    }
                }
            }
            if wants_synthetic_name && !referenced.is_empty() {
                pending_names.push((source, referenced));
            }
        }
    }

    for (id, referenced) in pending_names {
        let parts: Vec<String> = referenced
            .iter()
            .filter_map(|target| builder.node_mut(target).and_then(|n| n.name.clone()))
            .collect();
        let node = builder.node_mut(&id).expect("named nodes exist");
        if node.name.is_none() && !parts.is_empty() {
            node.name = Some(parts.join("/"));
        }
    }

    let graph = builder
        .build()
        .add_opposite_edges(|role| role == EdgeRole::ForeignKey);
    Ok(RdbBuild {
        graph,
        warnings,
        case_tally: ctx.cases,
    })
}

/// Leaf properties from the non-foreign-key attributes of a row, in declared
/// attribute order; empty values stand for null and are dropped.
fn plain_properties(relation: &Relation, row: &Row) -> Vec<PropertyNode> {
    relation
        .attributes
        .iter()
        .filter(|attr| !relation.is_fk_attribute(attr))
        .filter_map(|attr| {
            let value = row.get(attr).map(String::as_str).unwrap_or_default();
            (!value.is_empty()).then(|| PropertyNode::leaf(attr, value))
        })
        .collect()
}

/// Whether any foreign key of the row would yield an edge in pass 2.
/// Resolution warnings are discarded here; pass 2 repeats them for rows
/// that survive. Fatal conditions (dangling references under the fail
/// policy, auxiliary cycles) still abort the build.
fn row_links_anything(
    ctx: &Context<'_>,
    relation: &Relation,
    row: &Row,
    index: usize,
) -> Result<bool, RdbError> {
    let at = Locator::new(&relation.name, index);
    let mut discarded = Vec::new();
    for fk in &relation.foreign_keys {
        if ctx.resolve(row, fk, &at, &mut discarded)?.is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

struct Locator<'a> {
    relation: &'a str,
    /// Zero-based row index; rendered one-based.
    index: usize,
}

impl<'a> Locator<'a> {
    fn new(relation: &'a str, index: usize) -> Self {
        Locator { relation, index }
    }
}

impl std::fmt::Display for Locator<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "relation `{}` row {}", self.relation, self.index + 1)
    }
}

struct Context<'a> {
    db: &'a RelationalDatabase,
    config: &'a RdbConfig,
    cases: BTreeMap<String, RelationCase>,
    /// Primary-key tuple (in declared key order) to row index, per relation.
    key_index: BTreeMap<&'a str, BTreeMap<Vec<&'a str>, usize>>,
    empty: Vec<Row>,
}

impl<'a> Context<'a> {
    fn prepare(db: &'a RelationalDatabase, config: &'a RdbConfig) -> Result<Self, RdbError> {
        for name in db.rows.keys() {
            if db.schema.relation(name).is_none() {
                return Err(RdbError::UnknownRelation(name.clone()));
            }
        }
        let mut cases = BTreeMap::new();
        let mut key_index = BTreeMap::new();
        for relation in &db.schema.relations {
            cases.insert(
                relation.name.clone(),
                classify_relation(&db.schema, relation),
            );
            let declared: BTreeSet<&str> =
                relation.attributes.iter().map(String::as_str).collect();
            let mut index = BTreeMap::new();
            let rows = db.rows.get(&relation.name).map(Vec::as_slice).unwrap_or(&[]);
            for (i, row) in rows.iter().enumerate() {
                let bound: BTreeSet<&str> = row.keys().map(String::as_str).collect();
                if bound != declared {
                    return Err(RdbError::Row {
                        relation: relation.name.clone(),
                        row: i + 1,
                        message: "attributes do not match the declaration".into(),
                    });
                }
                let key: Vec<&str> = relation
                    .primary_key
                    .iter()
                    .map(|attr| row[attr].as_str())
                    .collect();
                if key.iter().any(|v| v.is_empty()) {
                    return Err(RdbError::Row {
                        relation: relation.name.clone(),
                        row: i + 1,
                        message: "primary-key value is empty".into(),
                    });
                }
                if index.insert(key, i).is_some() {
                    return Err(RdbError::Row {
                        relation: relation.name.clone(),
                        row: i + 1,
                        message: "duplicate primary key".into(),
                    });
                }
            }
            key_index.insert(relation.name.as_str(), index);
        }
        Ok(Context {
            db,
            config,
            cases,
            key_index,
            empty: Vec::new(),
        })
    }

    fn case_of(&self, relation: &str) -> RelationCase {
        self.cases[relation]
    }

    /// Relationship rows become connectors only when every key is
    /// insignificant and no relation references this one.
    fn builds_connectors(&self, relation: &str) -> bool {
        self.case_of(relation) == RelationCase::Relationship
            && !is_referenced(&self.db.schema, relation)
            && self
                .db
                .schema
                .relation(relation)
                .map(|r| {
                    r.foreign_keys
                        .iter()
                        .all(|fk| fk_significance(&self.db.schema, fk) == Significance::Insignificant)
                })
                .unwrap_or(false)
    }

    fn rows_of(&self, relation: &str) -> &[Row] {
        self.db
            .rows
            .get(relation)
            .unwrap_or(&self.empty)
            .as_slice()
    }

    fn node_id(&self, relation: &Relation, row: &Row) -> NodeId {
        let key: Vec<&str> = relation
            .primary_key
            .iter()
            .map(|attr| row[attr].as_str())
            .collect();
        NodeId::new(format!("{}:{}", relation.name, key.join(",")))
    }

    /// Follow a foreign key of `row` to the node its target row stands for,
    /// looking through auxiliary relations. `None` means the reference is
    /// null or was skipped (a warning is recorded); dangling references are
    /// fatal or skipped per configuration.
    fn resolve(
        &self,
        row: &Row,
        fk: &ForeignKey,
        at: &Locator<'_>,
        warnings: &mut Vec<String>,
    ) -> Result<Option<NodeId>, RdbError> {
        let values: Vec<&str> = fk.attrs.iter().map(|attr| row[attr].as_str()).collect();
        if values.iter().any(|v| v.is_empty()) {
            warnings.push(format!(
                "{at}: foreign key `{}` is null, no edge",
                fk.display_name()
            ));
            return Ok(None);
        }
        let mut relation = self
            .db
            .schema
            .relation(&fk.target)
            .expect("checked by schema.check");
        let mut key = arrange_key(relation, fk, &values);
        let mut seen: BTreeSet<(String, Vec<String>)> = BTreeSet::new();
        loop {
            let Some(&row_index) = self.key_index[relation.name.as_str()]
                .get(&key.iter().map(String::as_str).collect::<Vec<_>>())
            else {
                let detail = RdbError::DanglingReference {
                    relation: at.relation.to_string(),
                    row: at.index + 1,
                    fk: fk.display_name(),
                    values: values.join(","),
                    target: relation.name.clone(),
                };
                return match self.config.dangling {
                    DanglingPolicy::Fail => Err(detail),
                    DanglingPolicy::Skip => {
                        warnings.push(format!("{detail}; skipped"));
                        Ok(None)
                    }
                };
            };
            if self.case_of(&relation.name) != RelationCase::Auxiliary {
                return Ok(Some(NodeId::new(format!(
                    "{}:{}",
                    relation.name,
                    key.join(",")
                ))));
            }
            if !seen.insert((relation.name.clone(), key.clone())) {
                return Err(RdbError::AuxiliaryCycle(relation.name.clone()));
            }
            let hop = &relation.foreign_keys[0];
            let hop_row = &self.rows_of(&relation.name)[row_index];
            let hop_values: Vec<&str> =
                hop.attrs.iter().map(|attr| hop_row[attr].as_str()).collect();
            if hop_values.iter().any(|v| v.is_empty()) {
                warnings.push(format!(
                    "{at}: reference resolves into `{}` whose own key is null; skipped",
                    relation.name
                ));
                return Ok(None);
            }
            let next = self
                .db
                .schema
                .relation(&hop.target)
                .expect("checked by schema.check");
            key = arrange_key(next, hop, &hop_values);
            relation = next;
        }
    }
}

/// Rearranges foreign-key values (given in `fk.attrs` order) into the target
/// relation's declared primary-key order.
fn arrange_key(target: &Relation, fk: &ForeignKey, values: &[&str]) -> Vec<String> {
    let matched = fk.target_key.as_ref().unwrap_or(&target.primary_key);
    target
        .primary_key
        .iter()
        .map(|pk_attr| {
            let slot = matched
                .iter()
                .position(|a| a == pk_attr)
                .expect("checked by schema.check");
            values[slot].to_string()
        })
        .collect()
}
