//! Graphviz output. Objects are boxes, connectors rounded boxes, opposite
//! edges dashed. Statements are ordered deterministically so repeated
//! exports of the same graph are byte-identical.

use std::fmt::Write;

use super::{DataGraph, NodeKind, Orientation, PropertyNode};

#[derive(Debug, Clone, Default)]
pub struct DotOptions {
    /// Render property trees inside node labels.
    pub show_properties: bool,
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn property_lines(props: &[PropertyNode], indent: usize, out: &mut String) {
    for p in props {
        let pad = "  ".repeat(indent);
        match &p.value {
            Some(v) => {
                let _ = write!(out, "\\n{pad}{} : {}", escape(&p.name), escape(v));
            }
            None => {
                let _ = write!(out, "\\n{pad}{} :", escape(&p.name));
            }
        }
        property_lines(&p.children, indent + 1, out);
    }
}

impl DataGraph {
    pub fn to_dot(&self, options: &DotOptions) -> String {
        let mut out = String::from("digraph datagraph {\n");
        for node in self.nodes() {
            let mut label = match (&node.name, node.kind) {
                (Some(name), _) => format!("{} ({})", escape(name), escape(&node.node_type)),
                (None, NodeKind::Connector) => escape(&node.node_type),
                (None, NodeKind::Object) => format!("({})", escape(&node.node_type)),
            };
            if options.show_properties {
                property_lines(&node.properties, 0, &mut label);
            }
            let shape = match node.kind {
                NodeKind::Object => "shape=box",
                NodeKind::Connector => "shape=box, style=rounded",
            };
            let _ = writeln!(out, "  \"{}\" [{shape}, label=\"{label}\"];", escape(node.id.as_str()));
        }
        let mut edges: Vec<_> = self.edges().iter().collect();
        edges.sort_by_key(|e| e.key());
        for edge in edges {
            let style = match edge.orientation {
                Orientation::Original => "",
                Orientation::Opposite => " [style=dashed]",
            };
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\"{style};",
                escape(edge.from.as_str()),
                escape(edge.to.as_str())
            );
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{DataGraphBuilder, EdgeRole, GraphNode, WeightPolicy};

    fn border_graph() -> DataGraph {
        let mut b = DataGraphBuilder::new(WeightPolicy::default());
        b.add_node(GraphNode::object("country:Ukraine", "country").with_name("Ukraine"))
            .unwrap();
        b.add_node(GraphNode::object("country:Russia", "country").with_name("Russia"))
            .unwrap();
        b.add_node(GraphNode::connector("border:1", "border")).unwrap();
        b.add_edge("country:Ukraine", "border:1", Orientation::Original, EdgeRole::Reference);
        b.add_edge("border:1", "country:Russia", Orientation::Original, EdgeRole::Reference);
        b.build().add_opposite_edges(|_| true)
    }

    #[test]
    fn single_object_renders_one_box() {
        let mut b = DataGraphBuilder::new(WeightPolicy::default());
        b.add_node(GraphNode::object("country:Ukraine", "country").with_name("Ukraine"))
            .unwrap();
        let dot = b.build().to_dot(&DotOptions::default());
        assert!(dot.contains("\"country:Ukraine\" [shape=box, label=\"Ukraine (country)\"];"));
        assert_eq!(dot.matches("shape=box").count(), 1);
    }

    #[test]
    fn border_graph_has_three_nodes_and_dashed_opposites() {
        let dot = border_graph().to_dot(&DotOptions::default());
        assert_eq!(dot.matches("label=").count(), 3);
        assert_eq!(dot.matches(" -> ").count(), 4);
        assert_eq!(dot.matches("[style=dashed]").count(), 2);
        assert!(dot.contains("style=rounded"));
    }

    #[test]
    fn output_is_deterministic() {
        let a = border_graph().to_dot(&DotOptions::default());
        let b = border_graph().to_dot(&DotOptions::default());
        assert_eq!(a, b);
    }

    #[test]
    fn properties_render_when_asked() {
        let mut b = DataGraphBuilder::new(WeightPolicy::default());
        b.add_node(
            GraphNode::object("country:F", "country")
                .with_name("France")
                .with_property(PropertyNode::leaf("code", "F")),
        )
        .unwrap();
        let dot = b.build().to_dot(&DotOptions { show_properties: true });
        assert!(dot.contains("code : F"));
    }
}
