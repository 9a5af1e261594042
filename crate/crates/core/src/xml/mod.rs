//! Building a data graph from an XML document and its DTD.
//!
//! The pipeline has two stages. Stage one looks only at declarations: decide
//! for every IDREF/IDREFS attribute whether its name is significant
//! ([`ref_attr_significance`]), then classify every element type as an
//! object, a connector or a property ([`classify_element_types`]). Stage two
//! walks the document and builds the graph ([`build_graph`]): property
//! elements fold into their enclosing object, parent–child containment
//! becomes hierarchical edges, and reference attributes become reference
//! edges — through a fresh connector node when the attribute name is
//! significant, so the name is not lost.

mod build;
mod classify;
mod cursor;
mod dtd;
mod parse;
mod significance;

pub use build::{build_graph, pcdata_lift, XmlBuild, XmlConfig};
pub use classify::classify_element_types;
pub use dtd::parse_dtd;
pub use parse::parse_document;
pub use significance::{
    parse_overrides, ref_attr_significance, SignificanceEntry, SignificanceOverride,
    SignificanceSource, SignificanceTable,
};

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::GraphError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttrKind {
    /// Character data or an enumerated type: becomes a property.
    Plain,
    /// Document-wide identifier; the handle reference attributes point at.
    Id,
    /// Reference to a single ID.
    IdRef,
    /// Whitespace-separated set of references.
    IdRefs,
}

impl AttrKind {
    pub fn is_reference(self) -> bool {
        matches!(self, AttrKind::IdRef | AttrKind::IdRefs)
    }
}

#[derive(Debug, Clone)]
pub struct AttrDecl {
    pub name: String,
    pub kind: AttrKind,
}

#[derive(Debug, Clone)]
pub struct ElementDecl {
    pub element_type: String,
    /// Element types mentioned anywhere in the content model, with
    /// repetition and nesting flattened away.
    pub child_types: BTreeSet<String>,
    pub has_pcdata: bool,
    pub attributes: Vec<AttrDecl>,
}

impl ElementDecl {
    pub fn attr(&self, name: &str) -> Option<&AttrDecl> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn id_attr(&self) -> Option<&AttrDecl> {
        self.attributes.iter().find(|a| a.kind == AttrKind::Id)
    }

    pub fn reference_attrs(&self) -> impl Iterator<Item = &AttrDecl> {
        self.attributes.iter().filter(|a| a.kind.is_reference())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Dtd {
    pub decls: BTreeMap<String, ElementDecl>,
    /// Root element named by the document's DOCTYPE, when known.
    pub root_hint: Option<String>,
}

impl Dtd {
    pub fn decl(&self, element_type: &str) -> Option<&ElementDecl> {
        self.decls.get(element_type)
    }

    /// Child types mentioned in some content model but never declared.
    pub fn undeclared_children(&self) -> BTreeSet<&str> {
        self.decls
            .values()
            .flat_map(|d| d.child_types.iter())
            .filter(|c| !self.decls.contains_key(c.as_str()))
            .map(String::as_str)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct XmlElement {
    pub element_type: String,
    /// Attributes in document order.
    pub attributes: Vec<(String, String)>,
    /// Element children in document order; character data is kept separately.
    pub children: Vec<XmlElement>,
    /// Concatenated character data (text and CDATA), untrimmed.
    pub pcdata: String,
}

impl XmlElement {
    pub fn new(element_type: impl Into<String>) -> Self {
        XmlElement {
            element_type: element_type.into(),
            attributes: Vec::new(),
            children: Vec::new(),
            pcdata: String::new(),
        }
    }

    pub fn attribute(&self, name: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct Doctype {
    pub name: String,
    /// Raw text between `[` and `]`, parseable with [`parse_dtd`].
    pub internal_subset: Option<String>,
}

#[derive(Debug, Clone)]
pub struct XmlDocument {
    pub root: XmlElement,
    pub doctype: Option<Doctype>,
}

/// Stage-one verdict for an element type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementClass {
    ObjectClass,
    ConnectorClass,
    PropertyClass,
}

pub type ElementClasses = BTreeMap<String, ElementClass>;

#[derive(Debug, Error)]
pub enum XmlError {
    #[error("line {line}, column {col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("element type `{0}` declares more than one ID attribute")]
    DuplicateIdAttr(String),
    #[error("ID `{0}` is used by more than one element")]
    DuplicateId(String),
    #[error("`{element_type}` attribute `{attr}` references unknown ID `{id}`")]
    DanglingIdRef {
        element_type: String,
        attr: String,
        id: String,
    },
    #[error(
        "cannot lift character data of `{element_type}`: attribute `{attr}` already exists"
    )]
    NameClash { element_type: String, attr: String },
    #[error("attribute `{attr}` references `{id}`, which is not an object")]
    TargetNotAnObject { attr: String, id: String },
    #[error("element type `{0}` was never classified")]
    UnclassifiedType(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cannot read overrides: {0}")]
    Json(#[from] serde_json::Error),
}
