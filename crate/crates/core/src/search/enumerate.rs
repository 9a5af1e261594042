//! Weight-ordered, duplicate-free enumeration of answers.
//!
//! The engine grows rooted partial trees: every graph node seeds a
//! singleton tree, and each expansion attaches one graph edge leading to a
//! node outside the tree. A priority queue keyed on (weight, edge keys,
//! root) pops states lightest-first, so answers surface in nondecreasing
//! total weight with a reproducible tie-break. Once a tree covers every
//! keyword it is emitted (if non-redundant and not a duplicate) and never
//! grown further — any extension would add a removable leaf.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use serde_json::json;

use super::{canonical_form, node_matches, AnswerTree, DedupConfig, Query, SearchError};
use crate::graph::{DataGraph, Edge, EdgeKey, NodeId};

/// Upper bound on explored candidate trees before the search gives up.
pub const DEFAULT_SEARCH_BUDGET: usize = 250_000;

/// Enumerates up to `limit` answers with the default exploration budget.
pub fn enumerate_answers(
    graph: &DataGraph,
    query: &Query,
    limit: usize,
    dedup: &DedupConfig,
) -> Result<Vec<AnswerTree>, SearchError> {
    enumerate_answers_with_budget(graph, query, limit, dedup, DEFAULT_SEARCH_BUDGET)
}

/// Enumerates answers in nondecreasing total weight; ties break on the
/// sorted edge-key list, then the root. The stream is exhaustive up to
/// `limit` after duplicate suppression: every answer lighter than the last
/// emitted one has been emitted or deduplicated. A keyword matching no
/// node yields an empty result, not an error; exceeding `budget` explored
/// states is [`SearchError::GraphTooLarge`].
pub fn enumerate_answers_with_budget(
    graph: &DataGraph,
    query: &Query,
    limit: usize,
    dedup: &DedupConfig,
    budget: usize,
) -> Result<Vec<AnswerTree>, SearchError> {
    if limit == 0 {
        return Ok(Vec::new());
    }

    // Which keywords each node matches, by keyword index.
    let keywords: Vec<&str> = query.keywords().collect();
    let mut matched: BTreeMap<&NodeId, BTreeSet<usize>> = BTreeMap::new();
    for node in graph.nodes() {
        let hits: BTreeSet<usize> = keywords
            .iter()
            .enumerate()
            .filter(|(_, k)| node_matches(node, k))
            .map(|(i, _)| i)
            .collect();
        if !hits.is_empty() {
            matched.insert(&node.id, hits);
        }
    }
    for index in 0..keywords.len() {
        if !matched.values().any(|hits| hits.contains(&index)) {
            return Ok(Vec::new());
        }
    }

    let edges = graph.edges();
    let mut outgoing: BTreeMap<&NodeId, Vec<usize>> = BTreeMap::new();
    for (index, edge) in edges.iter().enumerate() {
        outgoing.entry(&edge.from).or_default().push(index);
    }

    let mut heap: BinaryHeap<std::cmp::Reverse<State>> = BinaryHeap::new();
    let mut visited: BTreeSet<(NodeId, Vec<usize>)> = BTreeSet::new();
    let mut explored = 0usize;
    let mut push = |state: State,
                    heap: &mut BinaryHeap<std::cmp::Reverse<State>>,
                    visited: &mut BTreeSet<(NodeId, Vec<usize>)>|
     -> Result<(), SearchError> {
        if visited.insert((state.root.clone(), state.edge_indices.clone())) {
            explored += 1;
            if explored > budget {
                return Err(SearchError::GraphTooLarge { budget });
            }
            heap.push(std::cmp::Reverse(state));
        }
        Ok(())
    };

    for node in graph.nodes() {
        let state = State {
            weight: 0.0,
            keys: Vec::new(),
            root: node.id.clone(),
            nodes: BTreeSet::from([node.id.clone()]),
            edge_indices: Vec::new(),
        };
        push(state, &mut heap, &mut visited)?;
    }

    let mut answers = Vec::new();
    let mut seen_keys = BTreeSet::new();
    while let Some(std::cmp::Reverse(state)) = heap.pop() {
        let covered: BTreeSet<usize> = state
            .nodes
            .iter()
            .flat_map(|id| matched.get(id).into_iter().flatten().copied())
            .collect();

        if covered.len() == keywords.len() {
            // Covering: emit if it cannot shrink, and never grow it —
            // anything added would itself be removable.
            if nonredundant(&state, edges, &matched, keywords.len()) {
                let tree = assemble(&state, edges, &keywords, &matched);
                if seen_keys.insert(canonical_form(&tree, dedup, graph)) {
                    answers.push(tree);
                    if answers.len() == limit {
                        break;
                    }
                }
            }
            continue;
        }

        for &node in state.nodes.iter().collect::<Vec<_>>().iter() {
            for &edge_index in outgoing.get(node).into_iter().flatten() {
                let edge = &edges[edge_index];
                if state.nodes.contains(&edge.to) {
                    continue;
                }
                let mut next = state.clone();
                next.weight += edge.weight;
                next.nodes.insert(edge.to.clone());
                next.edge_indices.push(edge_index);
                next.edge_indices.sort_unstable();
                next.keys.push(edge.key());
                next.keys.sort();
                push(next, &mut heap, &mut visited)?;
            }
        }
    }
    Ok(answers)
}

#[derive(Debug, Clone)]
struct State {
    weight: f64,
    /// Sorted keys of the member edges; the tie-break ordering.
    keys: Vec<EdgeKey>,
    root: NodeId,
    nodes: BTreeSet<NodeId>,
    /// Sorted indices into the graph's edge list; the identity for
    /// visited-state dedup.
    edge_indices: Vec<usize>,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for State {}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then_with(|| self.keys.cmp(&other.keys))
            .then_with(|| self.root.cmp(&other.root))
    }
}

/// Redundancy check on the raw state, using the precomputed match sets:
/// every leaf must be the only cover of some keyword, and a root with a
/// single child must be too.
fn nonredundant(
    state: &State,
    edges: &[Edge],
    matched: &BTreeMap<&NodeId, BTreeSet<usize>>,
    keyword_count: usize,
) -> bool {
    let mut child_count: BTreeMap<&NodeId, usize> = BTreeMap::new();
    for &index in &state.edge_indices {
        *child_count.entry(&edges[index].from).or_default() += 1;
    }

    let mut cover: Vec<BTreeSet<&NodeId>> = vec![BTreeSet::new(); keyword_count];
    for id in &state.nodes {
        for &keyword in matched.get(id).into_iter().flatten() {
            cover[keyword].insert(id);
        }
    }
    let uniquely_covers =
        |id: &NodeId| cover.iter().any(|c| c.len() == 1 && c.contains(id));

    for id in &state.nodes {
        let is_leaf = *id != state.root && !child_count.contains_key(id);
        if is_leaf && !uniquely_covers(id) {
            return false;
        }
    }
    if child_count.get(&state.root) == Some(&1) && !uniquely_covers(&state.root) {
        return false;
    }
    true
}

fn assemble(
    state: &State,
    edges: &[Edge],
    keywords: &[&str],
    matched: &BTreeMap<&NodeId, BTreeSet<usize>>,
) -> AnswerTree {
    let mut tree_edges: Vec<Edge> = state
        .edge_indices
        .iter()
        .map(|&index| edges[index].clone())
        .collect();
    tree_edges.sort_by_key(Edge::key);

    let mut cover: BTreeMap<String, BTreeSet<NodeId>> = BTreeMap::new();
    for id in &state.nodes {
        for &keyword in matched.get(id).into_iter().flatten() {
            cover
                .entry(keywords[keyword].to_string())
                .or_default()
                .insert(id.clone());
        }
    }

    AnswerTree {
        root: state.root.clone(),
        edges: tree_edges,
        cover,
        total_weight: state.weight,
    }
}

/// Renders one answer as the JSON-lines record used for query output.
pub fn answer_to_json(graph: &DataGraph, tree: &AnswerTree, rank: usize) -> serde_json::Value {
    let nodes: Vec<serde_json::Value> = tree
        .node_ids()
        .iter()
        .map(|id| {
            let node = graph.node(id);
            let mut record = json!({
                "id": id.as_str(),
                "type": node.map(|n| n.node_type.as_str()).unwrap_or_default(),
            });
            if let Some(name) = node.and_then(|n| n.name.as_deref()) {
                record["name"] = json!(name);
            }
            record
        })
        .collect();
    let edges: Vec<serde_json::Value> = tree
        .edges
        .iter()
        .map(|edge| {
            json!({
                "from": edge.from.as_str(),
                "to": edge.to.as_str(),
                "orientation": edge.orientation,
            })
        })
        .collect();
    let matches: BTreeMap<&str, Vec<&str>> = tree
        .cover
        .iter()
        .map(|(keyword, ids)| {
            (
                keyword.as_str(),
                ids.iter().map(NodeId::as_str).collect(),
            )
        })
        .collect();
    json!({
        "rank": rank,
        "total_weight": tree.total_weight,
        "root": tree.root.as_str(),
        "nodes": nodes,
        "edges": edges,
        "matches": matches,
    })
}
