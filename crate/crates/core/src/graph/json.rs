//! The on-disk graph document: a single JSON object with `nodes`, `edges`
//! and `weight_policy`. Unknown fields are rejected so typos fail loudly.

use serde::{Deserialize, Serialize};

use super::{
    DataGraph, DataGraphBuilder, Edge, EdgeRole, GraphError, GraphNode, NodeId, NodeKind,
    Orientation, PropertyNode, WeightPolicy,
};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    nodes: Vec<NodeDoc>,
    edges: Vec<EdgeDoc>,
    weight_policy: WeightPolicy,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: NodeId,
    kind: NodeKind,
    #[serde(rename = "type")]
    node_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    properties: Vec<PropertyNode>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    from: NodeId,
    to: NodeId,
    orientation: Orientation,
    role: EdgeRole,
    weight: f64,
}

impl DataGraph {
    /// Serialize to the JSON document format. Nodes are ordered by id and
    /// edges canonically, so the same graph always produces the same bytes.
    pub fn to_json(&self) -> String {
        let mut edges: Vec<&Edge> = self.edges().iter().collect();
        edges.sort_by_key(|e| e.key());
        let doc = GraphDoc {
            nodes: self
                .nodes()
                .map(|n| NodeDoc {
                    id: n.id.clone(),
                    kind: n.kind,
                    node_type: n.node_type.clone(),
                    name: n.name.clone(),
                    properties: n.properties.clone(),
                })
                .collect(),
            edges: edges
                .into_iter()
                .map(|e| EdgeDoc {
                    from: e.from.clone(),
                    to: e.to.clone(),
                    orientation: e.orientation,
                    role: e.role,
                    weight: e.weight,
                })
                .collect(),
            weight_policy: self.weight_policy().clone(),
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("graph document serializes");
        text.push('\n');
        text
    }

    /// Parse a JSON graph document. Rejects malformed JSON, unknown fields,
    /// unknown kinds/roles/orientations, duplicate node ids, dangling edge
    /// endpoints and negative or non-finite weights.
    pub fn from_json(text: &str) -> Result<DataGraph, GraphError> {
        let doc: GraphDoc = serde_json::from_str(text)?;
        doc.weight_policy.check()?;
        let mut builder = DataGraphBuilder::new(doc.weight_policy);
        for node in doc.nodes {
            builder.add_node(GraphNode {
                id: node.id,
                kind: node.kind,
                node_type: node.node_type,
                name: node.name,
                properties: node.properties,
            })?;
        }
        for edge in &doc.edges {
            if !builder.has_node(&edge.from) {
                return Err(GraphError::BadDocument(format!(
                    "edge endpoint `{}` is not a node",
                    edge.from
                )));
            }
            if !builder.has_node(&edge.to) {
                return Err(GraphError::BadDocument(format!(
                    "edge endpoint `{}` is not a node",
                    edge.to
                )));
            }
            if !edge.weight.is_finite() || edge.weight < 0.0 {
                return Err(GraphError::BadDocument(format!(
                    "edge {} -> {} has invalid weight {}",
                    edge.from, edge.to, edge.weight
                )));
            }
            builder.add_edge_weighted(
                edge.from.clone(),
                edge.to.clone(),
                edge.orientation,
                edge.role,
                edge.weight,
            );
        }
        Ok(builder.build())
    }
}
