//! Collapsing a triple set into a data graph.

use std::collections::{BTreeMap, BTreeSet};

use super::{label_of, RdfConfig, RdfTerm, Triple};
use crate::graph::{DataGraph, DataGraphBuilder, EdgeRole, GraphNode, Orientation, PropertyNode};

/// Result of folding triples: the graph plus non-fatal notes (duplicate
/// triples collapse silently; self-links and the like are reported here).
#[derive(Debug)]
pub struct RdfBuild {
    pub graph: DataGraph,
    pub warnings: Vec<String>,
}

/// Per-subject content accumulated from its outgoing triples.
#[derive(Debug, Default)]
struct SubjectContent {
    type_labels: BTreeSet<String>,
    /// (priority index of the name predicate, literal), so the best-ranked
    /// predicate wins and ties break on the smaller literal.
    names: BTreeSet<(usize, String)>,
    properties: Vec<PropertyNode>,
    links: Vec<(String, String)>,
}

/// Builds one Object node per distinct subject, with literal-object triples
/// as properties and the remaining links as edges (plus their opposites).
///
/// A subject that is the object of exactly one link, links to nothing
/// itself, and has at least one property folds into the linking node as a
/// nested property named after the linking predicate — applied bottom-up
/// until stable, so a chain of such resources collapses into one node. IRIs
/// that never appear as a subject become bare nodes named by [`label_of`].
///
/// The input is treated as a set: duplicates are dropped, and the result
/// does not depend on triple order.
pub fn fold_triples(triples: &[Triple], config: &RdfConfig) -> RdfBuild {
    let mut warnings = Vec::new();
    let deduped: BTreeSet<&Triple> = triples.iter().collect();

    // Split each subject's triples into type/name metadata, literal
    // properties, and links. Name literals stay properties as well, so
    // every input literal survives as a property value.
    let mut contents: BTreeMap<String, SubjectContent> = BTreeMap::new();
    for triple in deduped {
        if triple.subject.trim().is_empty() || triple.predicate.trim().is_empty() {
            warnings.push(format!(
                "ignoring triple with an empty subject or predicate (object {:?})",
                triple.object
            ));
            continue;
        }
        let content = contents.entry(triple.subject.clone()).or_default();
        let predicate_label = label_of(&triple.predicate).expect("predicate is nonempty");
        match &triple.object {
            RdfTerm::Iri(iri) => {
                if config.type_predicates.contains(&triple.predicate) {
                    content.type_labels.extend(label_of(iri).ok());
                } else if iri == &triple.subject {
                    warnings.push(format!("dropping self-link on `{}`", triple.subject));
                } else {
                    content.links.push((triple.predicate.clone(), iri.clone()));
                }
            }
            RdfTerm::Literal(value) => {
                if let Some(rank) = name_rank(config, &triple.predicate) {
                    content.names.insert((rank, value.clone()));
                }
                content
                    .properties
                    .push(PropertyNode::leaf(predicate_label, value.clone()));
            }
        }
    }

    fold_chains(&mut contents);

    let mut builder = DataGraphBuilder::new(config.weight_policy.clone());

    // Bare nodes for link targets that never appear as a subject.
    for (_, target) in contents.values().flat_map(|c| &c.links) {
        if !contents.contains_key(target) && !builder.has_node(&target.as_str().into()) {
            let name = label_of(target).expect("link target is nonempty");
            builder
                .add_node(GraphNode::object(target.as_str(), "resource").with_name(name))
                .expect("bare node ids are distinct");
        }
    }

    for (subject, content) in &contents {
        let mut properties = content.properties.clone();
        sort_properties(&mut properties);
        let mut node = GraphNode::object(
            subject.as_str(),
            content
                .type_labels
                .first()
                .cloned()
                .unwrap_or_else(|| "resource".to_string()),
        )
        .with_properties(properties);
        if let Some((_, name)) = content.names.first() {
            node = node.with_name(name.clone());
        }
        builder.add_node(node).expect("subjects are distinct");
    }

    for (subject, content) in &contents {
        for (_, target) in &content.links {
            builder.add_edge(
                subject.as_str(),
                target.as_str(),
                Orientation::Original,
                EdgeRole::RdfLink,
            );
        }
    }

    let graph = builder.build().add_opposite_edges(|role| role == EdgeRole::RdfLink);
    RdfBuild { graph, warnings }
}

fn name_rank(config: &RdfConfig, predicate: &str) -> Option<usize> {
    config.name_predicates.iter().position(|p| p == predicate)
}

/// Repeatedly folds subjects that are linked to exactly once, link to
/// nothing, and carry at least one property into their single referrer.
fn fold_chains(contents: &mut BTreeMap<String, SubjectContent>) {
    loop {
        let mut incoming: BTreeMap<&str, usize> = BTreeMap::new();
        for content in contents.values() {
            for (_, target) in &content.links {
                *incoming.entry(target).or_default() += 1;
            }
        }

        let candidate = contents.iter().find_map(|(subject, content)| {
            let foldable = incoming.get(subject.as_str()) == Some(&1)
                && content.links.is_empty()
                && !content.properties.is_empty();
            foldable.then(|| subject.clone())
        });
        let Some(folded) = candidate else { break };

        let content = contents.remove(&folded).expect("candidate came from the map");
        let mut children = content.properties;
        sort_properties(&mut children);

        let (owner, predicate) = contents
            .iter()
            .find_map(|(subject, c)| {
                c.links
                    .iter()
                    .find(|(_, target)| target == &folded)
                    .map(|(predicate, _)| (subject.clone(), predicate.clone()))
            })
            .expect("exactly one link points at the folded subject");

        let owner_content = contents.get_mut(&owner).expect("owner is a subject");
        owner_content.links.retain(|(_, target)| target != &folded);
        let name = label_of(&predicate).expect("predicate is nonempty");
        owner_content
            .properties
            .push(PropertyNode::nested(name, children));
    }
}

fn sort_properties(properties: &mut [PropertyNode]) {
    for property in properties.iter_mut() {
        sort_properties(&mut property.children);
    }
    properties.sort_by(|a, b| (&a.name, &a.value).cmp(&(&b.name, &b.value)));
}
