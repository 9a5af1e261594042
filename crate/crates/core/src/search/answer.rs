//! Answer trees: validity, non-redundancy, and canonical keys for
//! duplicate elimination.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{node_matches, DedupConfig, DedupMode, Query, SearchError};
use crate::graph::{DataGraph, Edge, NodeId, NodeKind};

/// A directed subtree of the graph whose nodes collectively contain every
/// query keyword.
#[derive(Debug, Clone, PartialEq)]
pub struct AnswerTree {
    pub root: NodeId,
    /// Tree edges, parent to child, sorted by edge key.
    pub edges: Vec<Edge>,
    /// Which tree nodes matched each keyword.
    pub cover: BTreeMap<String, BTreeSet<NodeId>>,
    /// Sum of the member edge weights.
    pub total_weight: f64,
}

impl AnswerTree {
    pub fn node_ids(&self) -> BTreeSet<NodeId> {
        let mut ids = BTreeSet::from([self.root.clone()]);
        for edge in &self.edges {
            ids.insert(edge.from.clone());
            ids.insert(edge.to.clone());
        }
        ids
    }

    pub fn node_count(&self) -> usize {
        self.node_ids().len()
    }
}

/// True iff the tree covers every keyword and cannot shrink: removing any
/// leaf loses some keyword, and when the root has exactly one child, the
/// root itself matches a keyword nothing else in the tree matches.
///
/// The edges must form a directed tree rooted at `tree.root` using edges
/// present in `graph`; anything else is reported as [`SearchError::NotASubtree`].
pub fn is_nonredundant(
    tree: &AnswerTree,
    query: &Query,
    graph: &DataGraph,
) -> Result<bool, SearchError> {
    let children = check_tree_shape(tree, graph)?;

    // Recompute coverage from the graph; the tree's own cover map is not
    // trusted here since this function is the checker.
    let nodes = tree.node_ids();
    let mut cover: BTreeMap<&str, BTreeSet<&NodeId>> = BTreeMap::new();
    for keyword in query.keywords() {
        let matching: BTreeSet<&NodeId> = nodes
            .iter()
            .filter(|id| graph.node(id).is_some_and(|n| node_matches(n, keyword)))
            .collect();
        if matching.is_empty() {
            return Ok(false);
        }
        cover.insert(keyword, matching);
    }

    let uniquely_covers = |id: &NodeId| {
        cover
            .values()
            .any(|matching| matching.len() == 1 && matching.contains(id))
    };

    for id in &nodes {
        let is_leaf = *id != tree.root && children.get(id).is_none_or(Vec::is_empty);
        if is_leaf && !uniquely_covers(id) {
            return Ok(false);
        }
    }
    if children.get(&tree.root).map_or(0, Vec::len) == 1 && !uniquely_covers(&tree.root) {
        return Ok(false);
    }
    Ok(true)
}

/// Verifies the edges form a directed tree rooted at `tree.root` and exist
/// in the graph; returns the child map.
fn check_tree_shape(
    tree: &AnswerTree,
    graph: &DataGraph,
) -> Result<BTreeMap<NodeId, Vec<NodeId>>, SearchError> {
    let fail = |reason: String| SearchError::NotASubtree {
        root: tree.root.clone(),
        reason,
    };

    let graph_keys: BTreeSet<_> = graph.edges().iter().map(Edge::key).collect();
    let mut children: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    children.entry(tree.root.clone()).or_default();
    let mut parents: BTreeMap<&NodeId, &NodeId> = BTreeMap::new();
    let mut keys = BTreeSet::new();
    for edge in &tree.edges {
        if !graph_keys.contains(&edge.key()) {
            return Err(fail(format!(
                "edge {} -> {} is not in the graph",
                edge.from, edge.to
            )));
        }
        if !keys.insert(edge.key()) {
            return Err(fail(format!("duplicate edge {} -> {}", edge.from, edge.to)));
        }
        if parents.insert(&edge.to, &edge.from).is_some() {
            return Err(fail(format!("node {} has two parents", edge.to)));
        }
        children.entry(edge.from.clone()).or_default();
        children.entry(edge.to.clone()).or_default();
        children.get_mut(&edge.from).unwrap().push(edge.to.clone());
    }
    if parents.contains_key(&tree.root) {
        return Err(fail(format!("root {} has an incoming edge", tree.root)));
    }
    if !graph.contains_node(&tree.root) {
        return Err(fail(format!("root {} is not in the graph", tree.root)));
    }

    // Every node must hang off the root; a parent map plus no incoming
    // edge at the root leaves only disconnected cycles to rule out.
    let mut reachable = BTreeSet::from([tree.root.clone()]);
    let mut frontier = vec![tree.root.clone()];
    while let Some(node) = frontier.pop() {
        for child in children.get(&node).into_iter().flatten() {
            if reachable.insert(child.clone()) {
                frontier.push(child.clone());
            }
        }
    }
    if let Some(stranded) = children.keys().find(|id| !reachable.contains(*id)) {
        return Err(fail(format!("node {stranded} is not reachable from the root")));
    }
    Ok(children)
}

/// Identity of an answer for duplicate elimination: its undirected edges,
/// sorted, with each endpoint rendered per the dedup mode. Two answers are
/// duplicates iff their keys are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<(String, String)>);

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, b) in &self.0 {
            if !first {
                f.write_str("; ")?;
            }
            first = false;
            write!(f, "{a} -- {b}")?;
        }
        Ok(())
    }
}

/// Computes the answer's identity under the given dedup mode. Object
/// endpoints always render as their node id; connector endpoints render as
/// their id under [`DedupMode::ByEdgeSet`] or as their canonical type under
/// [`DedupMode::ByConnectorType`] (a type paired with an inverse renders as
/// the lexicographically smaller of the two). An edgeless answer is keyed
/// by its root alone.
pub fn canonical_form(tree: &AnswerTree, dedup: &DedupConfig, graph: &DataGraph) -> CanonicalKey {
    let render = |id: &NodeId| -> String {
        let Some(node) = graph.node(id) else {
            return id.to_string();
        };
        match (node.kind, dedup.mode) {
            (NodeKind::Object, _) | (NodeKind::Connector, DedupMode::ByEdgeSet) => id.to_string(),
            (NodeKind::Connector, DedupMode::ByConnectorType) => {
                match dedup.inverse_of(&node.node_type) {
                    Some(inverse) if inverse < node.node_type.as_str() => inverse.to_string(),
                    _ => node.node_type.clone(),
                }
            }
        }
    };

    if tree.edges.is_empty() {
        let root = render(&tree.root);
        return CanonicalKey(vec![(root.clone(), root)]);
    }
    let mut edges: Vec<(String, String)> = tree
        .edges
        .iter()
        .map(|edge| {
            let (a, b) = (render(&edge.from), render(&edge.to));
            if a <= b { (a, b) } else { (b, a) }
        })
        .collect();
    edges.sort();
    CanonicalKey(edges)
}
