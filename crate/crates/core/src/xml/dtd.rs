//! Parser for the DTD subset the transform needs: ELEMENT declarations
//! (content models flattened to the set of mentioned child types plus a
//! PCDATA flag) and ATTLIST declarations (attribute kinds). ENTITY and
//! NOTATION declarations are skipped with a warning.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::xml::cursor::Cursor;
use crate::xml::{AttrDecl, AttrKind, Dtd, ElementDecl, XmlError};

pub fn parse_dtd(text: &str) -> Result<(Dtd, Vec<String>), XmlError> {
    let mut cur = Cursor::new(text);
    let mut decls: BTreeMap<String, ElementDecl> = BTreeMap::new();
    // ATTLIST may precede its ELEMENT declaration; attach at the end.
    let mut attlists: Vec<(String, Vec<AttrDecl>)> = Vec::new();
    let mut any_content: Vec<String> = Vec::new();
    let mut warnings = Vec::new();

    loop {
        cur.skip_ws();
        if cur.at_end() {
            break;
        }
        if cur.eat_str("<!--") {
            cur.skip_until("-->", "comment")?;
        } else if cur.eat_str("<?") {
            cur.skip_until("?>", "processing instruction")?;
        } else if cur.eat_str("<!ELEMENT") {
            let (decl, any) = parse_element_decl(&mut cur)?;
            if decls.contains_key(&decl.element_type) {
                return Err(cur.error(format!(
                    "element type `{}` declared twice",
                    decl.element_type
                )));
            }
            if any {
                any_content.push(decl.element_type.clone());
            }
            decls.insert(decl.element_type.clone(), decl);
        } else if cur.eat_str("<!ATTLIST") {
            attlists.push(parse_attlist(&mut cur)?);
        } else if cur.starts_with("<!ENTITY") || cur.starts_with("<!NOTATION") {
            let kind = if cur.starts_with("<!ENTITY") { "entity" } else { "notation" };
            warnings.push(format!("{kind} declaration ignored"));
            skip_markup_decl(&mut cur)?;
        } else {
            return Err(cur.error(format!(
                "expected a declaration, found `{}`",
                cur.peek().map(String::from).unwrap_or_default()
            )));
        }
    }

    for (element_type, attrs) in attlists {
        let decl = decls.entry(element_type.clone()).or_insert_with(|| {
            warnings.push(format!(
                "attribute list for undeclared element type `{element_type}`"
            ));
            ElementDecl {
                element_type: element_type.clone(),
                child_types: BTreeSet::new(),
                has_pcdata: false,
                attributes: Vec::new(),
            }
        });
        for attr in attrs {
            if decl.attr(&attr.name).is_some() {
                // XML semantics: the first binding of an attribute counts.
                warnings.push(format!(
                    "attribute `{}` of `{element_type}` declared twice; first declaration kept",
                    attr.name
                ));
                continue;
            }
            decl.attributes.push(attr);
        }
    }

    for decl in decls.values() {
        let ids = decl.attributes.iter().filter(|a| a.kind == AttrKind::Id);
        if ids.count() > 1 {
            return Err(XmlError::DuplicateIdAttr(decl.element_type.clone()));
        }
    }

    // ANY content admits every declared element type as a child.
    let all_types: BTreeSet<String> = decls.keys().cloned().collect();
    for name in any_content {
        let decl = decls.get_mut(&name).unwrap();
        decl.child_types = all_types.clone();
        decl.child_types.remove(&name);
        decl.has_pcdata = true;
    }

    let dtd = Dtd {
        decls,
        root_hint: None,
    };
    for child in dtd.undeclared_children() {
        warnings.push(format!("child element type `{child}` is never declared"));
    }
    Ok((dtd, warnings))
}

/// Parses from just after `<!ELEMENT` to the closing `>`. The second value
/// reports an `ANY` content model, resolved by the caller once every
/// declaration is known.
fn parse_element_decl(cur: &mut Cursor) -> Result<(ElementDecl, bool), XmlError> {
    cur.skip_ws();
    let element_type = cur.read_name()?;
    cur.skip_ws();
    let mut child_types = BTreeSet::new();
    let mut has_pcdata = false;
    let mut any = false;
    if cur.eat_str("EMPTY") {
        // no content
    } else if cur.eat_str("ANY") {
        any = true;
    } else if cur.peek() == Some('(') {
        parse_content_group(cur, &mut child_types, &mut has_pcdata)?;
        if matches!(cur.peek(), Some('?' | '*' | '+')) {
            cur.bump();
        }
    } else {
        return Err(cur.error(format!(
            "expected a content model for `{element_type}`"
        )));
    }
    cur.skip_ws();
    cur.expect('>', "after content model")?;
    Ok((
        ElementDecl {
            element_type,
            child_types,
            has_pcdata,
            attributes: Vec::new(),
        },
        any,
    ))
}

/// Flattens one parenthesized group: sequence/choice structure and
/// repetition markers are discarded, only the mentioned names (and whether
/// `#PCDATA` appears) matter downstream.
fn parse_content_group(
    cur: &mut Cursor,
    names: &mut BTreeSet<String>,
    has_pcdata: &mut bool,
) -> Result<(), XmlError> {
    cur.expect('(', "to open a content group")?;
    loop {
        cur.skip_ws();
        if cur.eat_str("#PCDATA") {
            *has_pcdata = true;
        } else if cur.peek() == Some('(') {
            parse_content_group(cur, names, has_pcdata)?;
        } else {
            names.insert(cur.read_name()?);
        }
        if matches!(cur.peek(), Some('?' | '*' | '+')) {
            cur.bump();
        }
        cur.skip_ws();
        match cur.bump() {
            Some(',' | '|') => continue,
            Some(')') => return Ok(()),
            _ => return Err(cur.error("expected `,`, `|` or `)` in content model".into())),
        }
    }
}

fn parse_attlist(cur: &mut Cursor) -> Result<(String, Vec<AttrDecl>), XmlError> {
    cur.skip_ws();
    let element_type = cur.read_name()?;
    let mut attrs = Vec::new();
    loop {
        cur.skip_ws();
        if cur.eat('>') {
            return Ok((element_type, attrs));
        }
        let name = cur.read_name()?;
        cur.skip_ws();
        let kind = parse_attr_kind(cur)?;
        cur.skip_ws();
        parse_default_decl(cur)?;
        attrs.push(AttrDecl { name, kind });
    }
}

fn parse_attr_kind(cur: &mut Cursor) -> Result<AttrKind, XmlError> {
    if cur.peek() == Some('(') {
        // Enumerated type: the possible values are irrelevant here.
        cur.skip_until(")", "enumerated attribute type")?;
        return Ok(AttrKind::Plain);
    }
    let word = cur.read_name()?;
    match word.as_str() {
        "CDATA" | "NMTOKEN" | "NMTOKENS" | "ENTITY" | "ENTITIES" => Ok(AttrKind::Plain),
        "ID" => Ok(AttrKind::Id),
        "IDREF" => Ok(AttrKind::IdRef),
        "IDREFS" => Ok(AttrKind::IdRefs),
        "NOTATION" => {
            cur.skip_ws();
            cur.skip_until(")", "notation attribute type")?;
            Ok(AttrKind::Plain)
        }
        other => Err(cur.error(format!("unknown attribute type `{other}`"))),
    }
}

fn parse_default_decl(cur: &mut Cursor) -> Result<(), XmlError> {
    if cur.eat_str("#REQUIRED") || cur.eat_str("#IMPLIED") {
        return Ok(());
    }
    if cur.eat_str("#FIXED") {
        cur.skip_ws();
    }
    // Default values are not applied to instances; parse and discard.
    cur.read_quoted()?;
    Ok(())
}

/// Skips a declaration body up to its closing `>`, honoring quotes (system
/// literals may contain `>`).
fn skip_markup_decl(cur: &mut Cursor) -> Result<(), XmlError> {
    while let Some(c) = cur.bump() {
        match c {
            '>' => return Ok(()),
            '"' | '\'' => {
                let quote = c;
                loop {
                    match cur.bump() {
                        Some(c) if c == quote => break,
                        Some(_) => continue,
                        None => return Err(cur.error("unterminated quoted string".into())),
                    }
                }
            }
            _ => {}
        }
    }
    Err(cur.error("unterminated declaration".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_and_attlist_round_trip() {
        let (dtd, warnings) = parse_dtd(
            r#"<!ELEMENT river (#PCDATA)>
               <!ATTLIST river id ID #REQUIRED
                               length CDATA #IMPLIED>"#,
        )
        .unwrap();
        assert!(warnings.is_empty());
        let river = dtd.decl("river").unwrap();
        assert!(river.has_pcdata);
        assert!(river.child_types.is_empty());
        assert_eq!(river.attr("id").unwrap().kind, AttrKind::Id);
        assert_eq!(river.attr("length").unwrap().kind, AttrKind::Plain);
    }

    #[test]
    fn content_models_flatten_to_child_sets() {
        let (dtd, _) = parse_dtd(
            r#"<!ELEMENT country (name, (province | city)*, economy?)>
               <!ELEMENT name (#PCDATA)>
               <!ELEMENT province EMPTY>
               <!ELEMENT city EMPTY>
               <!ELEMENT economy EMPTY>"#,
        )
        .unwrap();
        let country = dtd.decl("country").unwrap();
        let children: Vec<&str> = country.child_types.iter().map(String::as_str).collect();
        assert_eq!(children, ["city", "economy", "name", "province"]);
        assert!(!country.has_pcdata);
    }

    #[test]
    fn mixed_content_sets_the_pcdata_flag() {
        let (dtd, _) = parse_dtd(
            r#"<!ELEMENT para (#PCDATA | emph)*>
               <!ELEMENT emph (#PCDATA)>"#,
        )
        .unwrap();
        let para = dtd.decl("para").unwrap();
        assert!(para.has_pcdata);
        assert_eq!(para.child_types.len(), 1);
    }

    #[test]
    fn reference_kinds_are_kept_apart() {
        let (dtd, _) = parse_dtd(
            r#"<!ELEMENT confluence EMPTY>
               <!ATTLIST confluence rivers IDREFS #REQUIRED
                                    province IDREF #IMPLIED
                                    lng CDATA #IMPLIED>"#,
        )
        .unwrap();
        let confluence = dtd.decl("confluence").unwrap();
        assert_eq!(confluence.attr("rivers").unwrap().kind, AttrKind::IdRefs);
        assert_eq!(confluence.attr("province").unwrap().kind, AttrKind::IdRef);
        assert_eq!(confluence.attr("lng").unwrap().kind, AttrKind::Plain);
    }

    #[test]
    fn two_id_attributes_are_rejected() {
        let err = parse_dtd(
            r#"<!ELEMENT x EMPTY>
               <!ATTLIST x a ID #REQUIRED b ID #REQUIRED>"#,
        )
        .unwrap_err();
        assert!(matches!(err, XmlError::DuplicateIdAttr(t) if t == "x"));
    }

    #[test]
    fn entities_are_skipped_with_a_warning() {
        let (dtd, warnings) = parse_dtd(
            r#"<!ENTITY copy "©">
               <!ELEMENT doc (#PCDATA)>"#,
        )
        .unwrap();
        assert!(dtd.decl("doc").is_some());
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("entity"));
    }

    #[test]
    fn undeclared_children_are_flagged() {
        let (dtd, warnings) = parse_dtd(r#"<!ELEMENT a (b, c)>
                                           <!ELEMENT b EMPTY>"#)
            .unwrap();
        assert_eq!(dtd.undeclared_children().len(), 1);
        assert!(warnings.iter().any(|w| w.contains("`c`")));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_dtd("<!ELEMENT a (b,\n c >").unwrap_err();
        match err {
            XmlError::Syntax { line, col, .. } => {
                assert_eq!(line, 2);
                assert!(col > 1);
            }
            other => panic!("expected a syntax error, got {other}"),
        }
    }

    #[test]
    fn duplicate_element_declarations_are_rejected() {
        let err = parse_dtd("<!ELEMENT a EMPTY><!ELEMENT a EMPTY>").unwrap_err();
        assert!(matches!(err, XmlError::Syntax { .. }));
        assert!(err.to_string().contains("declared twice"));
    }

    #[test]
    fn any_content_admits_every_declared_type() {
        let (dtd, _) = parse_dtd(
            r#"<!ELEMENT wrapper ANY>
               <!ELEMENT a EMPTY>
               <!ELEMENT b EMPTY>"#,
        )
        .unwrap();
        let wrapper = dtd.decl("wrapper").unwrap();
        assert!(wrapper.has_pcdata);
        let children: Vec<&str> = wrapper.child_types.iter().map(String::as_str).collect();
        assert_eq!(children, ["a", "b"]);
    }
}
