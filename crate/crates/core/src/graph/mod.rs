//! The object/connector/property graph model.
//!
//! Graphs are immutable once built: construction goes through
//! [`DataGraphBuilder`], and the only post-construction operation,
//! [`DataGraph::add_opposite_edges`], consumes the graph and returns a new
//! one.

mod dot;
mod json;
mod validate;

pub use dot::DotOptions;
pub use validate::{Violation, ViolationKind};

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque identifier of a node. Transforms derive these from provenance
/// (relation name + key values, document order, subject IRI) so repeated
/// builds of the same input produce identical ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

/// A property is a named value, a named group of nested properties, or both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertyNode {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<PropertyNode>,
}

impl PropertyNode {
    /// A plain `name: value` leaf.
    pub fn leaf(name: impl Into<String>, value: impl Into<String>) -> Self {
        PropertyNode {
            name: name.into(),
            value: Some(value.into()),
            children: Vec::new(),
        }
    }

    /// A named group of nested properties without a value of its own.
    pub fn nested(name: impl Into<String>, children: Vec<PropertyNode>) -> Self {
        PropertyNode {
            name: name.into(),
            value: None,
            children,
        }
    }

    /// Copy with children (recursively) sorted by name and value, for
    /// order-insensitive comparison.
    pub fn normalized(&self) -> PropertyNode {
        let mut children: Vec<PropertyNode> =
            self.children.iter().map(PropertyNode::normalized).collect();
        children.sort_by(|a, b| (&a.name, &a.value).cmp(&(&b.name, &b.value)));
        PropertyNode {
            name: self.name.clone(),
            value: self.value.clone(),
            children,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Object,
    /// A relationship reified as a node: typed, never named, entered by
    /// exactly one original edge.
    Connector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub node_type: String,
    pub name: Option<String>,
    pub properties: Vec<PropertyNode>,
}

impl GraphNode {
    pub fn object(id: impl Into<NodeId>, node_type: impl Into<String>) -> Self {
        GraphNode {
            id: id.into(),
            kind: NodeKind::Object,
            node_type: node_type.into(),
            name: None,
            properties: Vec::new(),
        }
    }

    pub fn connector(id: impl Into<NodeId>, node_type: impl Into<String>) -> Self {
        GraphNode {
            id: id.into(),
            kind: NodeKind::Connector,
            node_type: node_type.into(),
            name: None,
            properties: Vec::new(),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_property(mut self, property: PropertyNode) -> Self {
        self.properties.push(property);
        self
    }

    pub fn with_properties(mut self, properties: Vec<PropertyNode>) -> Self {
        self.properties = properties;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Original,
    Opposite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeRole {
    Hierarchical,
    Reference,
    ForeignKey,
    RdfLink,
}

impl fmt::Display for EdgeRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EdgeRole::Hierarchical => "hierarchical",
            EdgeRole::Reference => "reference",
            EdgeRole::ForeignKey => "foreign_key",
            EdgeRole::RdfLink => "rdf_link",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub orientation: Orientation,
    pub role: EdgeRole,
    pub weight: f64,
}

impl Edge {
    /// Identity of an edge: everything except the weight.
    pub fn key(&self) -> EdgeKey {
        (
            self.from.clone(),
            self.to.clone(),
            self.orientation,
            self.role,
        )
    }
}

pub type EdgeKey = (NodeId, NodeId, Orientation, EdgeRole);

/// Edge weights used during construction. Node weights are fixed at zero and
/// have no representation. Opposite edges must never be cheaper than the
/// original edges they mirror.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightPolicy {
    pub original_weight: f64,
    pub opposite_weight: f64,
    /// Per-role overrides as `(original, opposite)` pairs.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_role: BTreeMap<EdgeRole, (f64, f64)>,
}

impl Default for WeightPolicy {
    fn default() -> Self {
        WeightPolicy {
            original_weight: 1.0,
            opposite_weight: 2.0,
            per_role: BTreeMap::new(),
        }
    }
}

impl WeightPolicy {
    pub fn new(original_weight: f64, opposite_weight: f64) -> Result<Self, GraphError> {
        let policy = WeightPolicy {
            original_weight,
            opposite_weight,
            per_role: BTreeMap::new(),
        };
        policy.check()?;
        Ok(policy)
    }

    pub fn with_role(
        mut self,
        role: EdgeRole,
        original: f64,
        opposite: f64,
    ) -> Result<Self, GraphError> {
        self.per_role.insert(role, (original, opposite));
        self.check()?;
        Ok(self)
    }

    pub fn weight_of(&self, role: EdgeRole, orientation: Orientation) -> f64 {
        let (original, opposite) = self
            .per_role
            .get(&role)
            .copied()
            .unwrap_or((self.original_weight, self.opposite_weight));
        match orientation {
            Orientation::Original => original,
            Orientation::Opposite => opposite,
        }
    }

    /// All weights positive and finite, opposite >= original for every role.
    pub fn check(&self) -> Result<(), GraphError> {
        let mut pairs = vec![(self.original_weight, self.opposite_weight)];
        pairs.extend(self.per_role.values().copied());
        for (original, opposite) in pairs {
            if !(original.is_finite() && opposite.is_finite()) || original <= 0.0 || opposite <= 0.0
            {
                return Err(GraphError::BadWeightPolicy(
                    "weights must be positive and finite".into(),
                ));
            }
            if opposite < original {
                return Err(GraphError::BadWeightPolicy(format!(
                    "opposite weight {opposite} is below original weight {original}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("duplicate node id `{0}`")]
    DuplicateNodeId(NodeId),
    #[error("invalid weight policy: {0}")]
    BadWeightPolicy(String),
    #[error("graph document is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("graph document rejected: {0}")]
    BadDocument(String),
}

/// An immutable data graph.
#[derive(Debug, Clone, PartialEq)]
pub struct DataGraph {
    nodes: BTreeMap<NodeId, GraphNode>,
    edges: Vec<Edge>,
    weight_policy: WeightPolicy,
}

impl DataGraph {
    pub fn nodes(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes.values()
    }

    pub fn node(&self, id: &NodeId) -> Option<&GraphNode> {
        self.nodes.get(id)
    }

    pub fn contains_node(&self, id: &NodeId) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weight_policy(&self) -> &WeightPolicy {
        &self.weight_policy
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, from: &NodeId, to: &NodeId, orientation: Orientation) -> bool {
        self.edges
            .iter()
            .any(|e| &e.from == from && &e.to == to && e.orientation == orientation)
    }

    /// Add the missing reverse edges for every original edge whose role the
    /// selector accepts.
    ///
    /// An opposite edge `(v, u)` is added for an original edge `(u, v)`
    /// unless the reverse direction is already represented: by an original
    /// edge `(v, u)` of the same role, or by a symmetric connector chain
    /// (`u → c → v` mirrored by `v → c' → u` through another connector of
    /// the same type). Running the operation twice changes nothing.
    pub fn add_opposite_edges(self, selector: impl Fn(EdgeRole) -> bool) -> DataGraph {
        let originals: HashSet<(NodeId, NodeId, EdgeRole)> = self
            .edges
            .iter()
            .filter(|e| e.orientation == Orientation::Original)
            .map(|e| (e.from.clone(), e.to.clone(), e.role))
            .collect();
        let mut existing_opposites: HashSet<(NodeId, NodeId, EdgeRole)> = self
            .edges
            .iter()
            .filter(|e| e.orientation == Orientation::Opposite)
            .map(|e| (e.from.clone(), e.to.clone(), e.role))
            .collect();
        let symmetric = self.symmetric_chain_edges();

        let mut edges = self.edges.clone();
        for edge in self
            .edges
            .iter()
            .filter(|e| e.orientation == Orientation::Original && selector(e.role))
        {
            let reverse = (edge.to.clone(), edge.from.clone(), edge.role);
            if originals.contains(&reverse)
                || existing_opposites.contains(&reverse)
                || symmetric.contains(&(edge.from.clone(), edge.to.clone(), edge.role))
            {
                continue;
            }
            edges.push(Edge {
                from: edge.to.clone(),
                to: edge.from.clone(),
                orientation: Orientation::Opposite,
                role: edge.role,
                weight: self.weight_policy.weight_of(edge.role, Orientation::Opposite),
            });
            existing_opposites.insert(reverse);
        }

        DataGraph {
            nodes: self.nodes,
            edges,
            weight_policy: self.weight_policy,
        }
    }

    /// Original edges that belong to a symmetric pair of connector chains:
    /// `a → c → b` and `b → c' → a` where `c` and `c'` are distinct
    /// connectors of the same type with exactly one incoming and one
    /// outgoing original edge each. Such relationships already exist in
    /// both directions, so they get no opposite edges.
    fn symmetric_chain_edges(&self) -> HashSet<(NodeId, NodeId, EdgeRole)> {
        // (source, target, type) -> chains realizing it
        let mut chains: BTreeMap<(NodeId, NodeId, String), Vec<[Edge; 2]>> = BTreeMap::new();
        for node in self.nodes.values().filter(|n| n.kind == NodeKind::Connector) {
            let incoming: Vec<&Edge> = self
                .edges
                .iter()
                .filter(|e| e.orientation == Orientation::Original && e.to == node.id)
                .collect();
            let outgoing: Vec<&Edge> = self
                .edges
                .iter()
                .filter(|e| e.orientation == Orientation::Original && e.from == node.id)
                .collect();
            if let ([enter], [leave]) = (incoming.as_slice(), outgoing.as_slice()) {
                chains
                    .entry((
                        enter.from.clone(),
                        leave.to.clone(),
                        node.node_type.clone(),
                    ))
                    .or_default()
                    .push([(*enter).clone(), (*leave).clone()]);
            }
        }

        let mut skip = HashSet::new();
        for ((a, b, ty), realizations) in &chains {
            let mirrored = (b.clone(), a.clone(), ty.clone());
            if a != b && chains.contains_key(&mirrored) {
                for [enter, leave] in realizations {
                    skip.insert((enter.from.clone(), enter.to.clone(), enter.role));
                    skip.insert((leave.from.clone(), leave.to.clone(), leave.role));
                }
            }
        }
        skip
    }
}

/// Builds a [`DataGraph`]. The builder checks id uniqueness only; every
/// other structural rule is reported by [`validate`](validate::validate) on
/// the finished graph, so tests can construct deliberately broken graphs.
#[derive(Debug, Clone)]
pub struct DataGraphBuilder {
    nodes: BTreeMap<NodeId, GraphNode>,
    edges: Vec<Edge>,
    edge_keys: HashSet<EdgeKey>,
    weight_policy: WeightPolicy,
}

impl DataGraphBuilder {
    pub fn new(weight_policy: WeightPolicy) -> Self {
        DataGraphBuilder {
            nodes: BTreeMap::new(),
            edges: Vec::new(),
            edge_keys: HashSet::new(),
            weight_policy,
        }
    }

    pub fn add_node(&mut self, node: GraphNode) -> Result<(), GraphError> {
        if self.nodes.contains_key(&node.id) {
            return Err(GraphError::DuplicateNodeId(node.id));
        }
        self.nodes.insert(node.id.clone(), node);
        Ok(())
    }

    pub fn has_node(&self, id: &NodeId) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn node(&self, id: &NodeId) -> Option<&GraphNode> {
        self.nodes.get(id)
    }

    pub fn node_mut(&mut self, id: &NodeId) -> Option<&mut GraphNode> {
        self.nodes.get_mut(id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes.values()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Removes the node and every edge touching it; the same edges may be
    /// added again afterwards. Returns whether the node existed.
    pub fn remove_node(&mut self, id: &NodeId) -> bool {
        if self.nodes.remove(id).is_none() {
            return false;
        }
        let edge_keys = &mut self.edge_keys;
        self.edges.retain(|edge| {
            let keep = &edge.from != id && &edge.to != id;
            if !keep {
                edge_keys.remove(&edge.key());
            }
            keep
        });
        true
    }

    /// Add an edge weighted by the builder's policy. Exact duplicates
    /// (same endpoints, orientation and role) are collapsed silently.
    pub fn add_edge(
        &mut self,
        from: impl Into<NodeId>,
        to: impl Into<NodeId>,
        orientation: Orientation,
        role: EdgeRole,
    ) {
        let weight = self.weight_policy.weight_of(role, orientation);
        self.add_edge_weighted(from, to, orientation, role, weight);
    }

    pub fn add_edge_weighted(
        &mut self,
        from: impl Into<NodeId>,
        to: impl Into<NodeId>,
        orientation: Orientation,
        role: EdgeRole,
        weight: f64,
    ) {
        let edge = Edge {
            from: from.into(),
            to: to.into(),
            orientation,
            role,
            weight,
        };
        if self.edge_keys.insert(edge.key()) {
            self.edges.push(edge);
        }
    }

    pub fn build(self) -> DataGraph {
        DataGraph {
            nodes: self.nodes,
            edges: self.edges,
            weight_policy: self.weight_policy,
        }
    }
}

/// Structural equality that ignores property order.
pub fn isomorphic(a: &DataGraph, b: &DataGraph) -> bool {
    if a.weight_policy != b.weight_policy || a.nodes.len() != b.nodes.len() {
        return false;
    }
    for (id, node) in &a.nodes {
        let Some(other) = b.nodes.get(id) else {
            return false;
        };
        let normalize = |n: &GraphNode| {
            let mut props: Vec<PropertyNode> =
                n.properties.iter().map(PropertyNode::normalized).collect();
            props.sort_by(|x, y| (&x.name, &x.value).cmp(&(&y.name, &y.value)));
            (n.kind, n.node_type.clone(), n.name.clone(), props)
        };
        if normalize(node) != normalize(other) {
            return false;
        }
    }
    let edge_set = |g: &DataGraph| {
        let mut set: Vec<(EdgeKey, u64)> = g
            .edges
            .iter()
            .map(|e| (e.key(), e.weight.to_bits()))
            .collect();
        set.sort();
        set
    };
    edge_set(a) == edge_set(b)
}

pub use validate::validate;
