//! Building a data graph from RDF triples.
//!
//! Triples sharing a subject collapse into one node: literal objects become
//! properties, configured type/name predicates become the node's type and
//! name, and the remaining links become edges. A subject referenced exactly
//! once whose own content is all literals folds into its referrer as a
//! nested property, so shallow auxiliary resources (an address, say) do not
//! clutter the graph with nodes.

mod fold;
mod ntriples;

pub use fold::{fold_triples, RdfBuild};
pub use ntriples::parse_ntriples;

use thiserror::Error;

use crate::graph::WeightPolicy;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum RdfTerm {
    Iri(String),
    /// Lexical form only; datatypes and language tags are dropped on input.
    Literal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: RdfTerm,
}

impl Triple {
    pub fn link(subject: impl Into<String>, predicate: impl Into<String>, object: impl Into<String>) -> Self {
        Triple {
            subject: subject.into(),
            predicate: predicate.into(),
            object: RdfTerm::Iri(object.into()),
        }
    }

    pub fn literal(subject: impl Into<String>, predicate: impl Into<String>, value: impl Into<String>) -> Self {
        Triple {
            subject: subject.into(),
            predicate: predicate.into(),
            object: RdfTerm::Literal(value.into()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RdfConfig {
    pub weight_policy: WeightPolicy,
    /// Predicates whose object names the node's type.
    pub type_predicates: Vec<String>,
    /// Predicates whose object names the node, tried in order.
    pub name_predicates: Vec<String>,
}

impl Default for RdfConfig {
    fn default() -> Self {
        RdfConfig {
            weight_policy: WeightPolicy::default(),
            type_predicates: vec![
                "http://www.w3.org/1999/02/22-rdf-syntax-ns#type".to_string(),
            ],
            name_predicates: vec![
                "http://www.w3.org/2000/01/rdf-schema#label".to_string(),
                "http://xmlns.com/foaf/0.1/name".to_string(),
            ],
        }
    }
}

#[derive(Debug, Error)]
pub enum RdfError {
    #[error("cannot label an empty IRI")]
    EmptyIri,
}

/// Human-readable text for an IRI: the fragment if there is one, else the
/// last path segment, with camelCase and snake_case split into lowercase
/// words — `…/contact#fullName` becomes "full name".
pub fn label_of(iri: &str) -> Result<String, RdfError> {
    let iri = iri.trim();
    if iri.is_empty() {
        return Err(RdfError::EmptyIri);
    }
    let raw = match iri.rsplit_once('#') {
        Some((_, fragment)) if !fragment.is_empty() => fragment,
        _ => iri
            .trim_end_matches('/')
            .rsplit('/')
            .next()
            .filter(|segment| !segment.is_empty())
            .unwrap_or(iri),
    };
    let words = split_words(raw);
    if words.is_empty() {
        // Nothing alphanumeric to work with; fall back to the raw text.
        return Ok(raw.to_lowercase());
    }
    Ok(words.join(" "))
}

fn split_words(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut words = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            if !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
            continue;
        }
        if c.is_uppercase() && !current.is_empty() {
            let after_lower = chars[i - 1].is_lowercase() || chars[i - 1].is_numeric();
            let before_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if after_lower || before_lower {
                words.push(std::mem::take(&mut current));
            }
        }
        current.extend(c.to_lowercase());
    }
    if !current.is_empty() {
        words.push(current);
    }
    words
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fragments_win_over_path_segments() {
        assert_eq!(
            label_of("http://www.w3.org/2000/10/swap/pim/contact#fullName").unwrap(),
            "full name"
        );
    }

    #[test]
    fn plain_segments_pass_through() {
        assert_eq!(label_of("http://x.org/name").unwrap(), "name");
    }

    #[test]
    fn camel_case_splits_into_words() {
        assert_eq!(
            label_of("http://x.org/onto/hasCapitalCity").unwrap(),
            "has capital city"
        );
    }

    #[test]
    fn snake_and_kebab_case_split_too() {
        assert_eq!(label_of("http://x.org/first_name").unwrap(), "first name");
        assert_eq!(label_of("http://x.org/first-name").unwrap(), "first name");
    }

    #[test]
    fn acronym_runs_stay_together() {
        assert_eq!(label_of("http://x.org/GDPValue").unwrap(), "gdp value");
    }

    #[test]
    fn trailing_slashes_do_not_blank_the_label() {
        assert_eq!(label_of("http://example.org/people/").unwrap(), "people");
    }

    #[test]
    fn empty_iris_are_rejected() {
        assert!(matches!(label_of("  "), Err(RdfError::EmptyIri)));
    }

    #[test]
    fn blank_node_labels_survive() {
        assert_eq!(label_of("_:b42").unwrap(), "b42");
    }
}
