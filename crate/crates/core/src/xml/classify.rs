//! Element-type classification: which types become objects, connectors or
//! properties. Base rules decide the leaves (plain content is a property; an
//! ID or significant reference makes an object; insignificant references
//! alone make a connector), a fixpoint folds plain wrappers of properties
//! into properties, a generalized rule catches connectors with property
//! content, and everything left is an object.

use crate::xml::{AttrKind, Dtd, ElementClass, ElementClasses, SignificanceTable};
use crate::Significance;

pub fn classify_element_types(dtd: &Dtd, sig: &SignificanceTable) -> ElementClasses {
    let mut classes = ElementClasses::new();
    // Mentioned-but-undeclared types behave like all-plain leaves.
    for child in dtd.undeclared_children() {
        classes.insert(child.to_string(), ElementClass::PropertyClass);
    }

    let insignificant = |element_type: &str, attr: &str| {
        sig.verdict(element_type, attr)
            .expect("significance table covers every reference attribute")
            == Significance::Insignificant
    };

    for (name, decl) in &dtd.decls {
        let all_plain = decl.attributes.iter().all(|a| a.kind == AttrKind::Plain);
        let has_id = decl.id_attr().is_some();
        let mut refs = decl.reference_attrs().peekable();
        let has_refs = refs.peek().is_some();
        let all_refs_insignificant = refs.all(|a| insignificant(name, &a.name));
        let leaf = decl.child_types.is_empty();

        let is_property = leaf && all_plain;
        let is_object = has_id || (has_refs && !all_refs_insignificant);
        let is_connector = leaf && !has_id && has_refs && all_refs_insignificant;
        debug_assert!(
            !(is_object && is_connector),
            "object and connector conditions exclude each other"
        );
        if is_property {
            classes.insert(name.clone(), ElementClass::PropertyClass);
        } else if is_object {
            classes.insert(name.clone(), ElementClass::ObjectClass);
        } else if is_connector {
            classes.insert(name.clone(), ElementClass::ConnectorClass);
        }
    }

    // A type whose attributes are plain and whose children all turned out to
    // be properties is itself a property; repeat until nothing moves.
    loop {
        let mut changed = false;
        for (name, decl) in &dtd.decls {
            if classes.contains_key(name) {
                continue;
            }
            let all_plain = decl.attributes.iter().all(|a| a.kind == AttrKind::Plain);
            let children_are_properties = decl
                .child_types
                .iter()
                .all(|c| classes.get(c) == Some(&ElementClass::PropertyClass));
            if all_plain && children_are_properties {
                classes.insert(name.clone(), ElementClass::PropertyClass);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // Insignificant references plus property content: still a connector.
    for (name, decl) in &dtd.decls {
        if classes.contains_key(name) {
            continue;
        }
        let has_id = decl.id_attr().is_some();
        let mut refs = decl.reference_attrs().peekable();
        let has_refs = refs.peek().is_some();
        let all_refs_insignificant = refs.all(|a| insignificant(name, &a.name));
        let children_are_properties = decl
            .child_types
            .iter()
            .all(|c| classes.get(c) == Some(&ElementClass::PropertyClass));
        if !has_id && has_refs && all_refs_insignificant && children_are_properties {
            classes.insert(name.clone(), ElementClass::ConnectorClass);
        }
    }

    for name in dtd.decls.keys() {
        classes
            .entry(name.clone())
            .or_insert(ElementClass::ObjectClass);
    }
    classes
}
