//! Minimal well-formed XML parser: prolog, DOCTYPE (its internal subset is
//! captured verbatim for [`crate::xml::parse_dtd`]), elements, attributes,
//! character data with the five predefined entities and character
//! references, CDATA sections. Comments and processing instructions are
//! skipped. No namespaces, no external entity expansion.

use crate::xml::cursor::Cursor;
use crate::xml::{Doctype, XmlDocument, XmlElement, XmlError};

pub fn parse_document(text: &str) -> Result<XmlDocument, XmlError> {
    let mut cur = Cursor::new(text);
    if cur.starts_with("<?xml") {
        cur.skip_until("?>", "XML declaration")?;
    }
    let mut doctype = None;
    loop {
        cur.skip_ws();
        if cur.eat_str("<!--") {
            cur.skip_until("-->", "comment")?;
        } else if cur.starts_with("<?") {
            cur.skip_until("?>", "processing instruction")?;
        } else if cur.eat_str("<!DOCTYPE") {
            if doctype.is_some() {
                return Err(cur.error("more than one DOCTYPE".into()));
            }
            doctype = Some(parse_doctype(&mut cur)?);
        } else {
            break;
        }
    }
    let root = parse_element(&mut cur)?;
    loop {
        cur.skip_ws();
        if cur.eat_str("<!--") {
            cur.skip_until("-->", "comment")?;
        } else if cur.starts_with("<?") {
            cur.skip_until("?>", "processing instruction")?;
        } else if cur.at_end() {
            return Ok(XmlDocument { root, doctype });
        } else {
            return Err(cur.error("content after the document element".into()));
        }
    }
}

fn parse_doctype(cur: &mut Cursor) -> Result<Doctype, XmlError> {
    cur.skip_ws();
    let name = cur.read_name()?;
    cur.skip_ws();
    if cur.eat_str("SYSTEM") {
        cur.skip_ws();
        cur.read_quoted()?;
    } else if cur.eat_str("PUBLIC") {
        cur.skip_ws();
        cur.read_quoted()?;
        cur.skip_ws();
        cur.read_quoted()?;
    }
    cur.skip_ws();
    let mut internal_subset = None;
    if cur.eat('[') {
        internal_subset = Some(read_internal_subset(cur)?);
        cur.skip_ws();
    }
    cur.expect('>', "to close DOCTYPE")?;
    Ok(Doctype {
        name,
        internal_subset,
    })
}

/// Collects raw text up to the `]` closing the internal subset; quoted
/// strings and comments may contain an unrelated `]`.
fn read_internal_subset(cur: &mut Cursor) -> Result<String, XmlError> {
    let mut subset = String::new();
    loop {
        if cur.eat_str("<!--") {
            subset.push_str("<!--");
            loop {
                if cur.eat_str("-->") {
                    subset.push_str("-->");
                    break;
                }
                match cur.bump() {
                    Some(c) => subset.push(c),
                    None => return Err(cur.error("unterminated comment".into())),
                }
            }
            continue;
        }
        match cur.bump() {
            Some(']') => return Ok(subset),
            Some(q @ ('"' | '\'')) => {
                subset.push(q);
                loop {
                    match cur.bump() {
                        Some(c) => {
                            subset.push(c);
                            if c == q {
                                break;
                            }
                        }
                        None => return Err(cur.error("unterminated quoted string".into())),
                    }
                }
            }
            Some(c) => subset.push(c),
            None => return Err(cur.error("unterminated internal subset".into())),
        }
    }
}

fn parse_element(cur: &mut Cursor) -> Result<XmlElement, XmlError> {
    cur.expect('<', "to open an element")?;
    let name = cur.read_name()?;
    let mut element = XmlElement::new(&name);
    loop {
        cur.skip_ws();
        match cur.peek() {
            Some('/') => {
                cur.bump();
                cur.expect('>', "to close an empty element")?;
                return Ok(element);
            }
            Some('>') => {
                cur.bump();
                break;
            }
            _ => {
                let attr = cur.read_name()?;
                if element.attribute(&attr).is_some() {
                    return Err(cur.error(format!(
                        "attribute `{attr}` appears twice on `{name}`"
                    )));
                }
                cur.skip_ws();
                cur.expect('=', "after attribute name")?;
                cur.skip_ws();
                let value = read_attr_value(cur)?;
                element.attributes.push((attr, value));
            }
        }
    }
    loop {
        if cur.eat_str("</") {
            let closing = cur.read_name()?;
            if closing != name {
                return Err(cur.error(format!(
                    "`</{closing}>` closes `<{name}>`"
                )));
            }
            cur.skip_ws();
            cur.expect('>', "to close the element")?;
            return Ok(element);
        } else if cur.eat_str("<![CDATA[") {
            let mut data = String::new();
            loop {
                if cur.eat_str("]]>") {
                    break;
                }
                match cur.bump() {
                    Some(c) => data.push(c),
                    None => return Err(cur.error("unterminated CDATA section".into())),
                }
            }
            element.pcdata.push_str(&data);
        } else if cur.eat_str("<!--") {
            cur.skip_until("-->", "comment")?;
        } else if cur.starts_with("<?") {
            cur.skip_until("?>", "processing instruction")?;
        } else if cur.peek() == Some('<') {
            element.children.push(parse_element(cur)?);
        } else if cur.at_end() {
            return Err(cur.error(format!("`<{name}>` is never closed")));
        } else {
            let c = cur.bump().unwrap();
            if c == '&' {
                element.pcdata.push(read_entity(cur)?);
            } else {
                element.pcdata.push(c);
            }
        }
    }
}

fn read_attr_value(cur: &mut Cursor) -> Result<String, XmlError> {
    let quote = match cur.peek() {
        Some(q @ ('"' | '\'')) => q,
        _ => return Err(cur.error("expected a quoted attribute value".into())),
    };
    cur.bump();
    let mut value = String::new();
    loop {
        match cur.bump() {
            Some(c) if c == quote => return Ok(value),
            Some('<') => return Err(cur.error("`<` inside an attribute value".into())),
            Some('&') => value.push(read_entity(cur)?),
            Some(c) => value.push(c),
            None => return Err(cur.error("unterminated attribute value".into())),
        }
    }
}

/// Resolves the reference after a consumed `&`: the five predefined
/// entities, or a decimal/hex character reference.
fn read_entity(cur: &mut Cursor) -> Result<char, XmlError> {
    let mut body = String::new();
    loop {
        match cur.bump() {
            Some(';') => break,
            Some(c) if body.len() < 12 => body.push(c),
            _ => return Err(cur.error("unterminated entity reference".into())),
        }
    }
    match body.as_str() {
        "amp" => Ok('&'),
        "lt" => Ok('<'),
        "gt" => Ok('>'),
        "apos" => Ok('\''),
        "quot" => Ok('"'),
        _ => {
            let code = body
                .strip_prefix("#x")
                .or_else(|| body.strip_prefix("#X"))
                .map(|hex| u32::from_str_radix(hex, 16))
                .or_else(|| body.strip_prefix('#').map(|dec| dec.parse::<u32>()));
            match code {
                Some(Ok(n)) => char::from_u32(n)
                    .ok_or_else(|| cur.error(format!("invalid character reference &{body};"))),
                _ => Err(cur.error(format!("unknown entity &{body};"))),
            }
        }
    }
}
