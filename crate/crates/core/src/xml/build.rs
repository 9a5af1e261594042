//! Stage two: walk the document and build the graph.
//!
//! Every element whose type is not a property becomes a node. Plain
//! attributes and property children fold into the node's property tree;
//! containment becomes a hierarchical edge to an object child or a
//! reference edge to a connector child; reference attributes become
//! reference edges, routed through a fresh connector when the attribute
//! name is significant. Property elements are transparent: anything
//! non-property nested beneath them hangs off the nearest enclosing node —
//! in particular, an undeclared envelope element around the real content
//! produces no node at all.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::graph::{
    DataGraph, DataGraphBuilder, EdgeRole, GraphNode, NodeId, NodeKind, Orientation, PropertyNode,
    WeightPolicy,
};
use crate::naming::{choose_object_name, NamePreference};
use crate::xml::{
    AttrKind, Dtd, ElementClass, ElementClasses, SignificanceTable, XmlDocument, XmlElement,
    XmlError,
};
use crate::{DanglingPolicy, Significance};

#[derive(Debug, Clone)]
pub struct XmlConfig {
    pub weight_policy: WeightPolicy,
    pub name_preference: NamePreference,
    /// Name of the synthetic attribute that receives lifted character data.
    pub pcdata_attr: String,
    pub dangling: DanglingPolicy,
}

impl Default for XmlConfig {
    fn default() -> Self {
        XmlConfig {
            weight_policy: WeightPolicy::default(),
            name_preference: NamePreference::default(),
            pcdata_attr: "text".to_string(),
            dangling: DanglingPolicy::Fail,
        }
    }
}

#[derive(Debug)]
pub struct XmlBuild {
    pub graph: DataGraph,
    pub warnings: Vec<String>,
}

/// Moves character data that shares an element with attributes or children
/// into a synthetic plain attribute, recursively. Elements holding only
/// text keep it: they become leaf properties named after their type.
pub fn pcdata_lift(mut element: XmlElement, synthetic: &str) -> Result<XmlElement, XmlError> {
    let text = element.pcdata.trim().to_string();
    if !text.is_empty() && !(element.attributes.is_empty() && element.children.is_empty()) {
        if element.attribute(synthetic).is_some() {
            return Err(XmlError::NameClash {
                element_type: element.element_type,
                attr: synthetic.to_string(),
            });
        }
        element.attributes.push((synthetic.to_string(), text));
        element.pcdata.clear();
    }
    element.children = element
        .children
        .into_iter()
        .map(|child| pcdata_lift(child, synthetic))
        .collect::<Result<_, _>>()?;
    Ok(element)
}

pub fn build_graph(
    doc: &XmlDocument,
    dtd: &Dtd,
    classes: &ElementClasses,
    sig: &SignificanceTable,
    config: &XmlConfig,
) -> Result<XmlBuild, XmlError> {
    let root = pcdata_lift(doc.root.clone(), &config.pcdata_attr)?;
    let mut walker = Walker {
        dtd,
        classes,
        sig,
        config,
        builder: DataGraphBuilder::new(config.weight_policy.clone()),
        counters: BTreeMap::new(),
        ids: BTreeMap::new(),
        pending: Vec::new(),
        warnings: Vec::new(),
        warned: BTreeSet::new(),
    };
    walker.walk(&root, None)?;
    walker.resolve_references()?;
    walker.prune_unlinked_connectors();
    let graph = walker
        .builder
        .build()
        .add_opposite_edges(|role| role == EdgeRole::Reference);
    Ok(XmlBuild {
        graph,
        warnings: walker.warnings,
    })
}

/// A reference attribute occurrence, kept until every node exists (IDs may
/// point forward in the document).
struct PendingRef {
    owner: NodeId,
    owner_type: String,
    attr: String,
    ids: Vec<String>,
}

struct Walker<'a> {
    dtd: &'a Dtd,
    classes: &'a ElementClasses,
    sig: &'a SignificanceTable,
    config: &'a XmlConfig,
    builder: DataGraphBuilder,
    counters: BTreeMap<String, usize>,
    ids: BTreeMap<String, NodeId>,
    pending: Vec<PendingRef>,
    warnings: Vec<String>,
    warned: BTreeSet<String>,
}

impl Walker<'_> {
    fn class_of(&mut self, element_type: &str) -> Result<ElementClass, XmlError> {
        if let Some(class) = self.classes.get(element_type) {
            return Ok(*class);
        }
        if self.dtd.decls.contains_key(element_type) {
            return Err(XmlError::UnclassifiedType(element_type.to_string()));
        }
        self.warn_once(format!(
            "element type `{element_type}` is not declared; treated as an all-plain property"
        ));
        Ok(ElementClass::PropertyClass)
    }

    fn warn_once(&mut self, message: String) {
        if self.warned.insert(message.clone()) {
            self.warnings.push(message);
        }
    }

    fn fresh_id(&mut self, element_type: &str) -> NodeId {
        let counter = self.counters.entry(element_type.to_string()).or_insert(0);
        *counter += 1;
        NodeId::new(format!("{element_type}@{counter}"))
    }

    fn walk(&mut self, element: &XmlElement, enclosing: Option<&NodeId>) -> Result<(), XmlError> {
        let class = self.class_of(&element.element_type)?;
        if class == ElementClass::PropertyClass {
            // Transparent: contained objects attach to the enclosing node
            // (or float free at the root); the property content itself is
            // folded by whoever encloses this element.
            for child in &element.children {
                self.walk(child, enclosing)?;
            }
            return Ok(());
        }

        let id = self.fresh_id(&element.element_type);
        let decl = self.dtd.decl(&element.element_type);
        let mut properties = Vec::new();
        for (name, value) in &element.attributes {
            let kind = match decl.and_then(|d| d.attr(name)) {
                Some(attr) => attr.kind,
                None => {
                    if name != &self.config.pcdata_attr {
                        self.warn_once(format!(
                            "attribute `{name}` of `{}` is not declared; treated as plain",
                            element.element_type
                        ));
                    }
                    AttrKind::Plain
                }
            };
            match kind {
                AttrKind::Plain => {
                    if !value.is_empty() {
                        properties.push(PropertyNode::leaf(name, value));
                    }
                }
                AttrKind::Id => {
                    let value = value.trim();
                    if value.is_empty() {
                        self.warnings.push(format!(
                            "empty ID on `{}` ignored",
                            element.element_type
                        ));
                    } else if self.ids.insert(value.to_string(), id.clone()).is_some() {
                        return Err(XmlError::DuplicateId(value.to_string()));
                    }
                }
                AttrKind::IdRef | AttrKind::IdRefs => {
                    let mut referenced: Vec<String> = Vec::new();
                    for id in value.split_whitespace() {
                        if !referenced.iter().any(|seen| seen == id) {
                            referenced.push(id.to_string());
                        }
                    }
                    if referenced.is_empty() {
                        self.warnings.push(format!(
                            "`{}` attribute `{name}` is empty; no edge",
                            element.element_type
                        ));
                        continue;
                    }
                    if kind == AttrKind::IdRef && referenced.len() > 1 {
                        self.warnings.push(format!(
                            "`{}` attribute `{name}` holds several IDs but is declared IDREF; \
                             using all of them",
                            element.element_type
                        ));
                    }
                    self.pending.push(PendingRef {
                        owner: id.clone(),
                        owner_type: element.element_type.clone(),
                        attr: name.clone(),
                        ids: referenced,
                    });
                }
            }
        }
        for child in &element.children {
            if self.class_of(&child.element_type)? == ElementClass::PropertyClass {
                if let Some(property) = self.property_of(child)? {
                    properties.push(property);
                }
            }
        }

        let node = match class {
            ElementClass::ObjectClass => {
                let name = choose_object_name(&properties, &self.config.name_preference);
                let mut node = GraphNode::object(id.clone(), &element.element_type)
                    .with_properties(properties);
                node.name = name;
                node
            }
            ElementClass::ConnectorClass => {
                GraphNode::connector(id.clone(), &element.element_type)
                    .with_properties(properties)
            }
            ElementClass::PropertyClass => unreachable!("handled above"),
        };
        self.builder.add_node(node)?;

        if let Some(parent) = enclosing {
            let role = match class {
                ElementClass::ObjectClass => EdgeRole::Hierarchical,
                _ => EdgeRole::Reference,
            };
            self.builder
                .add_edge(parent.clone(), id.clone(), Orientation::Original, role);
        }
        for child in &element.children {
            self.walk(child, Some(&id))?;
        }
        Ok(())
    }

    /// Folds a property-classified element into a property subtree: its type
    /// names the property, attributes and property children nest below it,
    /// bare character data becomes the value. Anything non-property nested
    /// inside is left to the walk. Empty content folds to nothing.
    fn property_of(&mut self, element: &XmlElement) -> Result<Option<PropertyNode>, XmlError> {
        let text = element.pcdata.trim();
        if element.attributes.is_empty() && element.children.is_empty() {
            return Ok((!text.is_empty())
                .then(|| PropertyNode::leaf(&element.element_type, text)));
        }
        let mut children = Vec::new();
        for (name, value) in &element.attributes {
            if !value.is_empty() {
                children.push(PropertyNode::leaf(name, value));
            }
        }
        for child in &element.children {
            if self.class_of(&child.element_type)? == ElementClass::PropertyClass {
                if let Some(property) = self.property_of(child)? {
                    children.push(property);
                }
            }
        }
        Ok((!children.is_empty())
            .then(|| PropertyNode::nested(&element.element_type, children)))
    }

    /// A connector element whose reference attributes are absent, empty or
    /// all unresolvable ends up with no outgoing edge; it relates nothing,
    /// so it is dropped along with the containment edge pointing at it.
    fn prune_unlinked_connectors(&mut self) {
        let with_outgoing: BTreeSet<NodeId> = self
            .builder
            .edges()
            .iter()
            .map(|edge| edge.from.clone())
            .collect();
        let unlinked: Vec<NodeId> = self
            .builder
            .nodes()
            .filter(|n| n.kind == NodeKind::Connector && !with_outgoing.contains(&n.id))
            .map(|n| n.id.clone())
            .collect();
        for id in unlinked {
            self.warnings.push(format!(
                "connector `{id}` references nothing that resolves; dropped"
            ));
            self.builder.remove_node(&id);
        }
    }

    fn resolve_references(&mut self) -> Result<(), XmlError> {
        let pending = std::mem::take(&mut self.pending);
        for reference in pending {
            let verdict = self
                .sig
                .verdict(&reference.owner_type, &reference.attr)
                .expect("significance table covers every reference attribute");
            let mut targets = Vec::new();
            for id in &reference.ids {
                let Some(target) = self.ids.get(id.as_str()) else {
                    match self.config.dangling {
                        DanglingPolicy::Fail => {
                            return Err(XmlError::DanglingIdRef {
                                element_type: reference.owner_type.clone(),
                                attr: reference.attr.clone(),
                                id: id.clone(),
                            })
                        }
                        DanglingPolicy::Skip => {
                            self.warnings.push(format!(
                                "`{}` attribute `{}` references unknown ID `{id}`; skipped",
                                reference.owner_type, reference.attr
                            ));
                            continue;
                        }
                    }
                };
                let kind = self.builder.node(target).map(|n| n.kind);
                if kind != Some(NodeKind::Object) {
                    return Err(XmlError::TargetNotAnObject {
                        attr: reference.attr.clone(),
                        id: id.clone(),
                    });
                }
                targets.push(target.clone());
            }
            match verdict {
                Significance::Insignificant => {
                    for target in targets {
                        if target == reference.owner {
                            self.warnings.push(format!(
                                "`{}` attribute `{}` references its own element; edge dropped",
                                reference.owner_type, reference.attr
                            ));
                            continue;
                        }
                        self.builder.add_edge(
                            reference.owner.clone(),
                            target,
                            Orientation::Original,
                            EdgeRole::Reference,
                        );
                    }
                }
                Significance::Significant => {
                    if targets.is_empty() {
                        self.warnings.push(format!(
                            "`{}` attribute `{}` resolved to nothing; connector not created",
                            reference.owner_type, reference.attr
                        ));
                        continue;
                    }
                    let connector =
                        NodeId::new(format!("{}:{}", reference.owner.as_str(), reference.attr));
                    self.builder
                        .add_node(GraphNode::connector(connector.clone(), &reference.attr))?;
                    self.builder.add_edge(
                        reference.owner.clone(),
                        connector.clone(),
                        Orientation::Original,
                        EdgeRole::Reference,
                    );
                    for target in targets {
                        self.builder.add_edge(
                            connector.clone(),
                            target,
                            Orientation::Original,
                            EdgeRole::Reference,
                        );
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xml::{
        classify_element_types, parse_document, parse_dtd, parse_overrides, ref_attr_significance,
    };
    use crate::graph::validate;

    fn build(dtd_text: &str, doc_text: &str) -> XmlBuild {
        build_with(dtd_text, doc_text, "[]", &XmlConfig::default()).unwrap()
    }

    fn build_with(
        dtd_text: &str,
        doc_text: &str,
        overrides_json: &str,
        config: &XmlConfig,
    ) -> Result<XmlBuild, XmlError> {
        let (dtd, _) = parse_dtd(dtd_text)?;
        let doc = parse_document(doc_text)?;
        let overrides = parse_overrides(overrides_json)?;
        let (sig, _) = ref_attr_significance(&dtd, &doc, &overrides, config.dangling)?;
        let classes = classify_element_types(&dtd, &sig);
        build_graph(&doc, &dtd, &classes, &sig, config)
    }

    const COURSE_DTD: &str = r#"
        <!ELEMENT db (course*, student*, enrolled*)>
        <!ELEMENT course (#PCDATA)>
        <!ATTLIST course cid ID #REQUIRED>
        <!ELEMENT student (#PCDATA)>
        <!ATTLIST student sid ID #REQUIRED>
        <!ELEMENT enrolled EMPTY>
        <!ATTLIST enrolled grade CDATA #IMPLIED
                           student IDREF #REQUIRED
                           course IDREF #REQUIRED>
    "#;

    const COURSE_DOC: &str = r#"
        <db>
          <course cid="c1">Databases</course>
          <student sid="s1">Smith</student>
          <student sid="s2">Jones</student>
          <enrolled grade="80" student="s1" course="c1"/>
          <enrolled grade="90" student="s2" course="c1"/>
        </db>
    "#;

    #[test]
    fn containment_and_references_build_the_expected_shape() {
        let build = build(COURSE_DTD, COURSE_DOC);
        let graph = &build.graph;
        assert_eq!(graph.node_count(), 6);
        let db = NodeId::new("db@1");
        let course = NodeId::new("course@1");
        let first = NodeId::new("enrolled@1");
        // db contains course hierarchically, enrolled connectors by reference.
        assert!(graph.edges().iter().any(|e| {
            e.from == db
                && e.to == course
                && e.role == EdgeRole::Hierarchical
                && e.orientation == Orientation::Original
        }));
        assert!(graph.edges().iter().any(|e| {
            e.from == db && e.to == first && e.role == EdgeRole::Reference
        }));
        assert!(graph.has_edge(&first, &NodeId::new("student@1"), Orientation::Original));
        assert!(graph.has_edge(&first, &course, Orientation::Original));
        // Connectors keep their plain content.
        let connector = graph.node(&first).unwrap();
        assert_eq!(connector.kind, NodeKind::Connector);
        assert_eq!(connector.properties[0].name, "grade");
        assert_eq!(connector.properties[0].value.as_deref(), Some("80"));
        assert!(validate(graph).is_empty());
    }

    #[test]
    fn hierarchical_edges_get_no_opposites() {
        let build = build(COURSE_DTD, COURSE_DOC);
        for edge in build.graph.edges() {
            if edge.orientation == Orientation::Opposite {
                assert_eq!(edge.role, EdgeRole::Reference);
            }
        }
        // 3 hierarchical + 6 reference originals, reference ones mirrored.
        assert_eq!(build.graph.edge_count(), 15);
    }

    #[test]
    fn lifted_character_data_becomes_a_text_property() {
        let build = build(COURSE_DTD, COURSE_DOC);
        let course = build.graph.node(&NodeId::new("course@1")).unwrap();
        assert!(course
            .properties
            .iter()
            .any(|p| p.name == "text" && p.value.as_deref() == Some("Databases")));
    }

    #[test]
    fn significant_references_get_one_connector_with_fan_out() {
        let build = build(
            r#"<!ELEMENT db (river*, confluence*)>
               <!ELEMENT river (#PCDATA)>
               <!ATTLIST river id ID #REQUIRED>
               <!ELEMENT confluence EMPTY>
               <!ATTLIST confluence rivers IDREFS #REQUIRED>"#,
            r#"<db>
                 <river id="r1">Rhone</river>
                 <river id="r2">Saone</river>
                 <confluence rivers="r1 r2"/>
               </db>"#,
        );
        let graph = &build.graph;
        let connector = NodeId::new("confluence@1:rivers");
        let node = graph.node(&connector).unwrap();
        assert_eq!(node.kind, NodeKind::Connector);
        assert_eq!(node.node_type, "rivers");
        assert!(node.properties.is_empty());
        assert!(graph.has_edge(&NodeId::new("confluence@1"), &connector, Orientation::Original));
        assert!(graph.has_edge(&connector, &NodeId::new("river@1"), Orientation::Original));
        assert!(graph.has_edge(&connector, &NodeId::new("river@2"), Orientation::Original));
        assert!(validate(graph).is_empty());
    }

    #[test]
    fn undeclared_envelope_roots_are_transparent() {
        let build = build(
            r#"<!ELEMENT country (name)>
               <!ATTLIST country code ID #REQUIRED>
               <!ELEMENT name (#PCDATA)>"#,
            r#"<world>
                 <country code="F"><name>France</name></country>
                 <country code="D"><name>Germany</name></country>
               </world>"#,
        );
        let graph = &build.graph;
        assert_eq!(graph.node_count(), 2, "the envelope makes no node");
        assert_eq!(graph.edge_count(), 0, "and no edges");
        assert!(build
            .warnings
            .iter()
            .any(|w| w.contains("`world`") && w.contains("not declared")));
        let france = graph.node(&NodeId::new("country@1")).unwrap();
        assert_eq!(france.name.as_deref(), Some("France"));
    }

    #[test]
    fn property_elements_fold_with_nesting() {
        let build = build(
            r#"<!ELEMENT country (name, economy?)>
               <!ATTLIST country code ID #REQUIRED>
               <!ELEMENT name (#PCDATA)>
               <!ELEMENT economy (gdp, inflation)>
               <!ELEMENT gdp (#PCDATA)>
               <!ELEMENT inflation (#PCDATA)>"#,
            r#"<country code="F">
                 <name>France</name>
                 <economy><gdp>$37,728</gdp><inflation>1.7%</inflation></economy>
               </country>"#,
        );
        let country = build.graph.node(&NodeId::new("country@1")).unwrap();
        let economy = country
            .properties
            .iter()
            .find(|p| p.name == "economy")
            .expect("nested property");
        assert_eq!(economy.children.len(), 2);
        assert_eq!(economy.children[0].name, "gdp");
        assert_eq!(economy.children[0].value.as_deref(), Some("$37,728"));
    }

    #[test]
    fn id_and_reference_attributes_never_become_properties() {
        let build = build(COURSE_DTD, COURSE_DOC);
        for node in build.graph.nodes() {
            for property in &node.properties {
                assert!(!matches!(
                    property.name.as_str(),
                    "cid" | "sid" | "student" | "course"
                ));
            }
        }
    }

    #[test]
    fn dangling_references_respect_the_policy() {
        let dtd = r#"<!ELEMENT db (a*)>
                     <!ELEMENT a EMPTY>
                     <!ATTLIST a id ID #IMPLIED friend IDREF #IMPLIED>"#;
        let doc = r#"<db><a id="x" friend="ghost"/></db>"#;
        let strict = build_with(dtd, doc, "[]", &XmlConfig::default());
        assert!(matches!(strict, Err(XmlError::DanglingIdRef { .. })));
        let lenient = XmlConfig {
            dangling: DanglingPolicy::Skip,
            ..XmlConfig::default()
        };
        let build = build_with(dtd, doc, "[]", &lenient).unwrap();
        assert_eq!(build.graph.node_count(), 2);
        assert!(build.graph.edges().iter().all(|e| e.role != EdgeRole::Reference
            || build.graph.node(&e.to).unwrap().node_type != "friend"));
        assert!(build.warnings.iter().any(|w| w.contains("ghost")));
    }

    #[test]
    fn empty_reference_values_warn_and_drop() {
        let build = build_with(
            r#"<!ELEMENT db (a*, b*)>
               <!ELEMENT a EMPTY>
               <!ATTLIST a id ID #IMPLIED>
               <!ELEMENT b EMPTY>
               <!ATTLIST b id ID #IMPLIED friend IDREF #IMPLIED>"#,
            r#"<db><a id="x"/><b id="y" friend=""/></db>"#,
            "[]",
            &XmlConfig::default(),
        )
        .unwrap();
        assert!(build.warnings.iter().any(|w| w.contains("is empty")));
        // No connector is created for the empty significant reference, and
        // the only edges are the two containment ones.
        assert!(build.graph.node(&NodeId::new("b@1:friend")).is_none());
        assert_eq!(
            build
                .graph
                .edges()
                .iter()
                .filter(|e| e.role == EdgeRole::Reference)
                .count(),
            0
        );
    }

    #[test]
    fn overrides_can_force_a_connector_into_an_object() {
        let dtd = r#"<!ELEMENT db (teacher*, lesson*)>
                     <!ELEMENT teacher EMPTY>
                     <!ATTLIST teacher id ID #REQUIRED>
                     <!ELEMENT lesson EMPTY>
                     <!ATTLIST lesson teacher IDREF #REQUIRED>"#;
        let doc = r#"<db><teacher id="t1"/><lesson teacher="t1"/></db>"#;
        let scanned = build(dtd, doc);
        assert_eq!(
            scanned.graph.node(&NodeId::new("lesson@1")).unwrap().kind,
            NodeKind::Connector
        );
        let pinned = build_with(
            dtd,
            doc,
            r#"[{"element": "lesson", "attribute": "teacher", "verdict": "significant"}]"#,
            &XmlConfig::default(),
        )
        .unwrap();
        let lesson = pinned.graph.node(&NodeId::new("lesson@1")).unwrap();
        assert_eq!(lesson.kind, NodeKind::Object);
        assert!(pinned
            .graph
            .node(&NodeId::new("lesson@1:teacher"))
            .is_some());
    }

    #[test]
    fn a_fully_plain_document_folds_to_one_node() {
        let build = build(
            r#"<!ELEMENT book (title, meta)>
               <!ATTLIST book isbn ID #REQUIRED>
               <!ELEMENT title (#PCDATA)>
               <!ELEMENT meta (pages, year)>
               <!ELEMENT pages (#PCDATA)>
               <!ELEMENT year (#PCDATA)>"#,
            r#"<book isbn="i1"><title>Q</title><meta><pages>10</pages><year>1999</year></meta></book>"#,
        );
        assert_eq!(build.graph.node_count(), 1);
        assert_eq!(build.graph.edge_count(), 0);
        let book = build.graph.nodes().next().unwrap();
        assert_eq!(book.properties.len(), 2);
    }

    #[test]
    fn build_is_deterministic() {
        let a = build(COURSE_DTD, COURSE_DOC);
        let b = build(COURSE_DTD, COURSE_DOC);
        assert_eq!(a.graph.to_json(), b.graph.to_json());
    }

    #[test]
    fn connector_resolving_nothing_is_dropped() {
        let doc = r#"
            <db>
              <course cid="c1">Databases</course>
              <student sid="s1">Smith</student>
              <enrolled grade="80" student="s1" course="c1"/>
              <enrolled grade="55" student="ghost" course="gone"/>
            </db>
        "#;
        let config = XmlConfig {
            dangling: DanglingPolicy::Skip,
            ..XmlConfig::default()
        };
        let build = build_with(COURSE_DTD, doc, "[]", &config).unwrap();
        let dropped = NodeId::new("enrolled@2");
        assert!(build.graph.node(&dropped).is_none());
        assert!(!build.graph.edges().iter().any(|e| e.to == dropped));
        assert!(build
            .warnings
            .iter()
            .any(|w| w.contains("references nothing that resolves")));
        assert!(validate(&build.graph).is_empty());
    }
}
