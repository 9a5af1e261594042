//! Structural invariant checks. Violations are data, not errors: callers
//! decide whether a non-empty report is fatal.

use std::collections::HashMap;
use std::fmt;

use super::{DataGraph, Edge, NodeKind, Orientation, PropertyNode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    EmptyNodeType,
    ConnectorWithName,
    BadProperty(String),
    DanglingEndpoint,
    SelfLoop,
    BadWeight,
    OppositeWithoutOriginal,
    ConnectorAdjacency,
    ConnectorIncoming(usize),
    ConnectorWithoutOutgoing,
    BadWeightPolicy(String),
}

/// One violated invariant, naming the node or edge it concerns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub subject: String,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::EmptyNodeType => write!(f, "{}: node type is empty", self.subject),
            ViolationKind::ConnectorWithName => {
                write!(f, "{}: connectors must not carry a name", self.subject)
            }
            ViolationKind::BadProperty(path) => write!(
                f,
                "{}: property `{path}` needs a non-empty name and a value or children",
                self.subject
            ),
            ViolationKind::DanglingEndpoint => {
                write!(f, "{}: edge endpoint is not a node", self.subject)
            }
            ViolationKind::SelfLoop => write!(f, "{}: self-loop", self.subject),
            ViolationKind::BadWeight => {
                write!(f, "{}: weight must be finite and non-negative", self.subject)
            }
            ViolationKind::OppositeWithoutOriginal => write!(
                f,
                "{}: opposite edge has no original edge in the other direction",
                self.subject
            ),
            ViolationKind::ConnectorAdjacency => write!(
                f,
                "{}: original edge directly joins two connectors",
                self.subject
            ),
            ViolationKind::ConnectorIncoming(n) => write!(
                f,
                "{}: connector has {n} incoming original edges, expected at most 1",
                self.subject
            ),
            ViolationKind::ConnectorWithoutOutgoing => {
                write!(f, "{}: connector has no outgoing original edge", self.subject)
            }
            ViolationKind::BadWeightPolicy(msg) => {
                write!(f, "{}: {msg}", self.subject)
            }
        }
    }
}

fn edge_subject(edge: &Edge) -> String {
    format!(
        "edge {} -> {} ({:?}, {})",
        edge.from, edge.to, edge.orientation, edge.role
    )
}

fn check_property(
    node_subject: &str,
    prefix: &str,
    property: &PropertyNode,
    out: &mut Vec<Violation>,
) {
    let path = if prefix.is_empty() {
        property.name.clone()
    } else {
        format!("{prefix}.{}", property.name)
    };
    if property.name.is_empty() || (property.value.is_none() && property.children.is_empty()) {
        out.push(Violation {
            subject: node_subject.to_owned(),
            kind: ViolationKind::BadProperty(path.clone()),
        });
    }
    for child in &property.children {
        check_property(node_subject, &path, child, out);
    }
}

/// Check every structural invariant of the graph and report each breach.
/// A clean graph yields an empty vector.
pub fn validate(graph: &DataGraph) -> Vec<Violation> {
    let mut out = Vec::new();

    if let Err(err) = graph.weight_policy().check() {
        out.push(Violation {
            subject: "weight policy".to_owned(),
            kind: ViolationKind::BadWeightPolicy(err.to_string()),
        });
    }

    for node in graph.nodes() {
        let subject = format!("node {}", node.id);
        if node.node_type.is_empty() {
            out.push(Violation {
                subject: subject.clone(),
                kind: ViolationKind::EmptyNodeType,
            });
        }
        if node.kind == NodeKind::Connector && node.name.is_some() {
            out.push(Violation {
                subject: subject.clone(),
                kind: ViolationKind::ConnectorWithName,
            });
        }
        for property in &node.properties {
            check_property(&subject, "", property, &mut out);
        }
    }

    let mut incoming: HashMap<&str, usize> = HashMap::new();
    let mut outgoing: HashMap<&str, usize> = HashMap::new();
    for edge in graph.edges() {
        let subject = edge_subject(edge);
        let from = graph.node(&edge.from);
        let to = graph.node(&edge.to);
        if from.is_none() || to.is_none() {
            out.push(Violation {
                subject: subject.clone(),
                kind: ViolationKind::DanglingEndpoint,
            });
        }
        if edge.from == edge.to {
            out.push(Violation {
                subject: subject.clone(),
                kind: ViolationKind::SelfLoop,
            });
        }
        if !edge.weight.is_finite() || edge.weight < 0.0 {
            out.push(Violation {
                subject: subject.clone(),
                kind: ViolationKind::BadWeight,
            });
        }
        match edge.orientation {
            Orientation::Original => {
                if let (Some(f), Some(t)) = (from, to) {
                    if f.kind == NodeKind::Connector && t.kind == NodeKind::Connector {
                        out.push(Violation {
                            subject: subject.clone(),
                            kind: ViolationKind::ConnectorAdjacency,
                        });
                    }
                }
                *incoming.entry(edge.to.as_str()).or_default() += 1;
                *outgoing.entry(edge.from.as_str()).or_default() += 1;
            }
            Orientation::Opposite => {
                let mirrored = graph.edges().iter().any(|e| {
                    e.orientation == Orientation::Original
                        && e.role == edge.role
                        && e.from == edge.to
                        && e.to == edge.from
                });
                if !mirrored {
                    out.push(Violation {
                        subject: subject.clone(),
                        kind: ViolationKind::OppositeWithoutOriginal,
                    });
                }
            }
        }
    }

    // Connectors reifying an n-ary relationship point at every participant
    // and have no incoming original edge at all, so only a surplus is wrong.
    for node in graph.nodes().filter(|n| n.kind == NodeKind::Connector) {
        let subject = format!("node {}", node.id);
        let n_in = incoming.get(node.id.as_str()).copied().unwrap_or(0);
        if n_in > 1 {
            out.push(Violation {
                subject: subject.clone(),
                kind: ViolationKind::ConnectorIncoming(n_in),
            });
        }
        if outgoing.get(node.id.as_str()).copied().unwrap_or(0) == 0 {
            out.push(Violation {
                subject,
                kind: ViolationKind::ConnectorWithoutOutgoing,
            });
        }
    }

    out
}
