//! Data graphs built around the object/connector/property model.
//!
//! A data graph has two kinds of nodes: *objects* (typed, usually named
//! entities) and *explicit connectors* (typed, unnamed relationship nodes).
//! Both carry trees of properties. Edges are directed, carry an orientation
//! (an `Original` edge from the source, or an `Opposite` edge added in the
//! reverse direction so that search can traverse relationships both ways)
//! and a role describing where they came from.
//!
//! The crate provides:
//!
//! * [`graph`] — the graph model itself, validation, JSON and DOT output;
//! * [`rdb`] — building a graph from a relational schema plus rows;
//! * [`xml`] — building a graph from an XML document plus its DTD;
//! * [`rdf`] — building a graph from triples;
//! * [`search`] — ranked enumeration of keyword-search answer trees.

#![forbid(unsafe_code)]

pub mod graph;
pub mod naming;
pub mod rdb;
pub mod rdf;
pub mod search;
pub mod xml;

pub use graph::{
    DataGraph, DataGraphBuilder, Edge, EdgeRole, GraphError, GraphNode, NodeId, NodeKind,
    Orientation, PropertyNode, WeightPolicy,
};

use serde::{Deserialize, Serialize};

/// Whether a reference's name (a foreign key, an IDREF attribute) carries
/// information beyond the identity of what it points at. Insignificant names
/// collapse to plain edges; significant ones are kept as connector nodes so
/// the name survives in the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Significance {
    Significant,
    Insignificant,
}

/// What to do with a reference whose target does not exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DanglingPolicy {
    /// Treat unresolved references as fatal.
    #[default]
    Fail,
    /// Drop the edge, record a warning.
    Skip,
}
