//! Deciding whether reference attributes are significantly named.
//!
//! An attribute like `rivers` on `confluence` says more than "points at a
//! river", so it deserves a connector of its own; an attribute `teacher`
//! whose targets are all `teacher` elements does not. The safe automatic
//! rule fires when no element type shares the attribute's name; otherwise
//! the document is scanned and the verdict is flagged for confirmation.
//! Explicit overrides win over both.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::xml::{Dtd, XmlDocument, XmlElement, XmlError};
use crate::{DanglingPolicy, Significance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignificanceSource {
    /// No element type shares the attribute's name; significant by
    /// construction.
    AutoSafe,
    /// Verdict from scanning the document's actual targets.
    AutoScan,
    HumanOverride,
}

#[derive(Debug, Clone, Copy)]
pub struct SignificanceEntry {
    pub verdict: Significance,
    pub source: SignificanceSource,
    /// Scanned verdicts rest on one document; a human should look at them.
    pub needs_confirmation: bool,
}

/// One verdict per reference attribute of the DTD, keyed by
/// (element type, attribute name).
#[derive(Debug, Clone, Default)]
pub struct SignificanceTable {
    entries: BTreeMap<(String, String), SignificanceEntry>,
}

impl SignificanceTable {
    pub fn get(&self, element_type: &str, attr: &str) -> Option<&SignificanceEntry> {
        self.entries
            .get(&(element_type.to_string(), attr.to_string()))
    }

    pub fn verdict(&self, element_type: &str, attr: &str) -> Option<Significance> {
        self.get(element_type, attr).map(|e| e.verdict)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, String), &SignificanceEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignificanceOverride {
    pub element: String,
    pub attribute: String,
    pub verdict: Significance,
}

pub fn parse_overrides(json: &str) -> Result<Vec<SignificanceOverride>, XmlError> {
    Ok(serde_json::from_str(json)?)
}

pub fn ref_attr_significance(
    dtd: &Dtd,
    doc: &XmlDocument,
    overrides: &[SignificanceOverride],
    dangling: DanglingPolicy,
) -> Result<(SignificanceTable, Vec<String>), XmlError> {
    let mut warnings = Vec::new();
    let ids = id_types(dtd, doc)?;
    let mut occurrences: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    collect_references(dtd, &doc.root, &mut occurrences);

    for over in overrides {
        let declared = dtd
            .decl(&over.element)
            .and_then(|d| d.attr(&over.attribute))
            .is_some_and(|a| a.kind.is_reference());
        if !declared {
            warnings.push(format!(
                "override for `{}`/`{}` matches no reference attribute; ignored",
                over.element, over.attribute
            ));
        }
    }

    let mut table = SignificanceTable::default();
    for (element_type, decl) in &dtd.decls {
        for attr in decl.reference_attrs() {
            let key = (element_type.clone(), attr.name.clone());
            let entry = if let Some(over) = overrides
                .iter()
                .find(|o| o.element == *element_type && o.attribute == attr.name)
            {
                SignificanceEntry {
                    verdict: over.verdict,
                    source: SignificanceSource::HumanOverride,
                    needs_confirmation: false,
                }
            } else if !dtd.decls.contains_key(&attr.name) {
                SignificanceEntry {
                    verdict: Significance::Significant,
                    source: SignificanceSource::AutoSafe,
                    needs_confirmation: false,
                }
            } else {
                let mut insignificant = true;
                for id in occurrences.get(&key).into_iter().flatten() {
                    match ids.get(id.as_str()) {
                        Some(target_type) => {
                            if target_type != &attr.name {
                                insignificant = false;
                            }
                        }
                        None => match dangling {
                            DanglingPolicy::Fail => {
                                return Err(XmlError::DanglingIdRef {
                                    element_type: element_type.clone(),
                                    attr: attr.name.clone(),
                                    id: id.clone(),
                                })
                            }
                            DanglingPolicy::Skip => warnings.push(format!(
                                "`{element_type}` attribute `{}` references unknown ID `{id}`; \
                                 ignored while scanning",
                                attr.name
                            )),
                        },
                    }
                }
                SignificanceEntry {
                    verdict: if insignificant {
                        Significance::Insignificant
                    } else {
                        Significance::Significant
                    },
                    source: SignificanceSource::AutoScan,
                    needs_confirmation: true,
                }
            };
            table.entries.insert(key, entry);
        }
    }
    Ok((table, warnings))
}

/// Maps every ID value in the document to the element type carrying it.
/// IDs are document-global, so a value appearing twice is fatal.
pub(super) fn id_types<'a>(
    dtd: &Dtd,
    doc: &'a XmlDocument,
) -> Result<BTreeMap<&'a str, &'a str>, XmlError> {
    let mut ids = BTreeMap::new();
    let mut stack = vec![&doc.root];
    while let Some(element) = stack.pop() {
        if let Some(id_attr) = dtd.decl(&element.element_type).and_then(|d| d.id_attr()) {
            if let Some(value) = element.attribute(&id_attr.name) {
                let value = value.trim();
                if !value.is_empty()
                    && ids.insert(value, element.element_type.as_str()).is_some()
                {
                    return Err(XmlError::DuplicateId(value.to_string()));
                }
            }
        }
        stack.extend(element.children.iter());
    }
    Ok(ids)
}

/// Referenced IDs per (element type, reference attribute), document-wide.
fn collect_references(
    dtd: &Dtd,
    element: &XmlElement,
    into: &mut BTreeMap<(String, String), Vec<String>>,
) {
    if let Some(decl) = dtd.decl(&element.element_type) {
        for (name, value) in &element.attributes {
            let Some(attr) = decl.attr(name) else { continue };
            if !attr.kind.is_reference() {
                continue;
            }
            let ids = value.split_whitespace().map(str::to_string);
            into.entry((element.element_type.clone(), name.clone()))
                .or_default()
                .extend(ids);
        }
    }
    for child in &element.children {
        collect_references(dtd, child, into);
    }
}
