//! Keyword search over a data graph.
//!
//! A query is a set of keywords; an answer is a non-redundant directed
//! subtree whose nodes collectively contain every keyword. Answers stream
//! out in nondecreasing total edge weight, with duplicates suppressed
//! under a configurable notion of sameness (exact undirected edge sets,
//! or edge sets up to connector identity).

mod answer;
mod enumerate;

pub use answer::{canonical_form, is_nonredundant, AnswerTree, CanonicalKey};
pub use enumerate::{
    answer_to_json, enumerate_answers, enumerate_answers_with_budget, DEFAULT_SEARCH_BUDGET,
};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{GraphNode, NodeId, PropertyNode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    keywords: BTreeSet<String>,
}

impl Query {
    /// Builds a query from raw keywords, trimming whitespace. Empty or
    /// all-blank input is rejected: a query must ask for something.
    pub fn new<I, S>(keywords: I) -> Result<Query, SearchError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let keywords: BTreeSet<String> = keywords
            .into_iter()
            .map(|k| k.as_ref().trim().to_string())
            .filter(|k| !k.is_empty())
            .collect();
        if keywords.is_empty() {
            return Err(SearchError::EmptyQuery);
        }
        Ok(Query { keywords })
    }

    pub fn keywords(&self) -> impl Iterator<Item = &str> {
        self.keywords.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.keywords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keywords.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DedupMode {
    /// Answers are the same iff they have the same undirected edges, with
    /// every endpoint identified by node id.
    ByEdgeSet,
    /// As above, but connector endpoints are identified by their type (or
    /// the canonical member of an inverse-type pair), so parallel
    /// connectors carrying the same relationship collapse.
    ByConnectorType,
}

/// How to decide that two answers carry the same information.
#[derive(Debug, Clone)]
pub struct DedupConfig {
    pub mode: DedupMode,
    /// Pairs of connector types that are inverses of each other (say,
    /// `cite` and `cited_by`); symmetric, each type in at most one pair.
    inverse_types: BTreeMap<String, String>,
}

impl Default for DedupConfig {
    fn default() -> Self {
        DedupConfig {
            mode: DedupMode::ByConnectorType,
            inverse_types: BTreeMap::new(),
        }
    }
}

impl DedupConfig {
    pub fn by_edge_set() -> Self {
        DedupConfig {
            mode: DedupMode::ByEdgeSet,
            inverse_types: BTreeMap::new(),
        }
    }

    pub fn by_connector_type() -> Self {
        DedupConfig::default()
    }

    /// Declares `a` and `b` as inverse connector types (recorded in both
    /// directions). Fails if either type is already paired differently.
    pub fn with_inverse(
        mut self,
        a: impl Into<String>,
        b: impl Into<String>,
    ) -> Result<Self, SearchError> {
        let (a, b) = (a.into(), b.into());
        for (first, second) in [(&a, &b), (&b, &a)] {
            match self.inverse_types.get(first) {
                Some(existing) if existing != second => {
                    return Err(SearchError::ConflictingInverse {
                        connector_type: first.clone(),
                        existing: existing.clone(),
                        proposed: second.clone(),
                    });
                }
                _ => {}
            }
        }
        self.inverse_types.insert(a.clone(), b.clone());
        self.inverse_types.insert(b, a);
        Ok(self)
    }

    pub fn inverse_of(&self, connector_type: &str) -> Option<&str> {
        self.inverse_types.get(connector_type).map(String::as_str)
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("a query needs at least one non-blank keyword")]
    EmptyQuery,
    #[error("connector type `{connector_type}` already has inverse `{existing}`, cannot also pair it with `{proposed}`")]
    ConflictingInverse {
        connector_type: String,
        existing: String,
        proposed: String,
    },
    #[error("edges do not form a directed tree rooted at `{root}`: {reason}")]
    NotASubtree { root: NodeId, reason: String },
    #[error("search stopped: more than {budget} candidate trees explored")]
    GraphTooLarge { budget: usize },
}

/// True when the node's text contains the keyword: every token of the
/// keyword appears, case-insensitively, among the tokens of the node's
/// type, name, and property names and values (nested properties included).
/// Tokens are maximal alphanumeric runs, so "Saint Petersburg" matches a
/// node whose name yields both tokens, and "burg" matches nothing there.
pub fn node_matches(node: &GraphNode, keyword: &str) -> bool {
    let wanted = tokenize(keyword);
    if wanted.is_empty() {
        return false;
    }
    let bag = token_bag(node);
    wanted.iter().all(|token| bag.contains(token))
}

fn token_bag(node: &GraphNode) -> BTreeSet<String> {
    let mut bag = tokenize(&node.node_type);
    if let Some(name) = &node.name {
        bag.extend(tokenize(name));
    }
    fn walk(property: &PropertyNode, bag: &mut BTreeSet<String>) {
        bag.extend(tokenize(&property.name));
        if let Some(value) = &property.value {
            bag.extend(tokenize(value));
        }
        for child in &property.children {
            walk(child, bag);
        }
    }
    for property in &node.properties {
        walk(property, &mut bag);
    }
    bag
}

fn tokenize(text: &str) -> BTreeSet<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn queries_trim_and_reject_blank_keywords() {
        let query = Query::new(["  Dnepr ", "Russia"]).unwrap();
        let keywords: Vec<&str> = query.keywords().collect();
        assert_eq!(keywords, ["Dnepr", "Russia"]);
        assert!(matches!(Query::new(["  ", ""]), Err(SearchError::EmptyQuery)));
        assert!(matches!(Query::new(Vec::<&str>::new()), Err(SearchError::EmptyQuery)));
    }

    #[test]
    fn matching_is_whole_token_and_case_insensitive() {
        let node = GraphNode::object("country@1", "country").with_name("Ukraine");
        assert!(node_matches(&node, "ukraine"));
        assert!(node_matches(&node, "UKRAINE"));
        assert!(node_matches(&node, "country"));
        assert!(!node_matches(&node, "ukr"));
        assert!(!node_matches(&node, "ukraines"));
    }

    #[test]
    fn property_names_and_values_match_recursively() {
        let node = GraphNode::connector("enrolled@1", "enrolled").with_property(
            PropertyNode::nested("record", vec![PropertyNode::leaf("grade", "90")]),
        );
        assert!(node_matches(&node, "90"));
        assert!(node_matches(&node, "grade"));
        assert!(node_matches(&node, "record"));
        assert!(!node_matches(&node, "91"));
    }

    #[test]
    fn multi_token_keywords_need_every_token() {
        let node = GraphNode::object("city@1", "city").with_name("Saint Petersburg");
        assert!(node_matches(&node, "saint petersburg"));
        assert!(node_matches(&node, "petersburg"));
        assert!(!node_matches(&node, "saint moritz"));
        assert!(!node_matches(&node, "--"));
    }

    #[test]
    fn inverse_pairs_are_symmetric_and_exclusive() {
        let dedup = DedupConfig::by_connector_type()
            .with_inverse("cite", "cited_by")
            .unwrap();
        assert_eq!(dedup.inverse_of("cite"), Some("cited_by"));
        assert_eq!(dedup.inverse_of("cited_by"), Some("cite"));
        assert!(dedup.inverse_of("border").is_none());

        let err = DedupConfig::by_connector_type()
            .with_inverse("cite", "cited_by")
            .unwrap()
            .with_inverse("cite", "other");
        assert!(matches!(err, Err(SearchError::ConflictingInverse { .. })));
    }
}
