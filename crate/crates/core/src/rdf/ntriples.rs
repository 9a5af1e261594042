//! Line-oriented triple parser.
//!
//! Accepts the N-Triples shape: one triple per line, IRIs in angle
//! brackets, blank nodes as `_:name`, literals in double quotes with
//! optional `^^<datatype>` or `@lang` suffix (both discarded — only the
//! lexical form is kept). Lines that fail to parse are reported with
//! their line number and skipped rather than aborting the load.

use super::{RdfTerm, Triple};

/// Parses triples from `text`, returning whatever parsed cleanly plus one
/// message per rejected line.
pub fn parse_ntriples(text: &str) -> (Vec<Triple>, Vec<String>) {
    let mut triples = Vec::new();
    let mut issues = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match parse_line(trimmed) {
            Ok(triple) => triples.push(triple),
            Err(message) => issues.push(format!("line {}: {message}", index + 1)),
        }
    }
    (triples, issues)
}

fn parse_line(line: &str) -> Result<Triple, String> {
    let mut rest = line;

    let subject = match read_term(&mut rest)? {
        RdfTerm::Iri(iri) => iri,
        RdfTerm::Literal(_) => return Err("subject cannot be a literal".to_string()),
    };
    skip_ws(&mut rest);
    let predicate = match read_term(&mut rest)? {
        RdfTerm::Iri(iri) if !iri.starts_with("_:") => iri,
        RdfTerm::Iri(_) => return Err("predicate cannot be a blank node".to_string()),
        RdfTerm::Literal(_) => return Err("predicate cannot be a literal".to_string()),
    };
    skip_ws(&mut rest);
    let object = read_term(&mut rest)?;
    skip_ws(&mut rest);

    let Some(after_dot) = rest.strip_prefix('.') else {
        return Err("expected `.` after the object".to_string());
    };
    let tail = after_dot.trim_start();
    if !tail.is_empty() && !tail.starts_with('#') {
        return Err(format!("unexpected trailing text `{tail}`"));
    }

    Ok(Triple { subject, predicate, object })
}

fn skip_ws(rest: &mut &str) {
    *rest = rest.trim_start();
}

fn read_term(rest: &mut &str) -> Result<RdfTerm, String> {
    if let Some(after) = rest.strip_prefix('<') {
        let Some(end) = after.find('>') else {
            return Err("unterminated IRI (missing `>`)".to_string());
        };
        let iri = &after[..end];
        if iri.is_empty() {
            return Err("empty IRI".to_string());
        }
        if iri.chars().any(|c| c.is_whitespace() || c == '<' || c == '"') {
            return Err(format!("invalid character in IRI `{iri}`"));
        }
        *rest = &after[end + 1..];
        return Ok(RdfTerm::Iri(iri.to_string()));
    }
    if let Some(after) = rest.strip_prefix("_:") {
        let end = after
            .find(|c: char| !c.is_alphanumeric() && c != '_' && c != '-' && c != '.')
            .unwrap_or(after.len());
        let name = after[..end].trim_end_matches('.');
        if name.is_empty() {
            return Err("blank node needs a label after `_:`".to_string());
        }
        *rest = &after[name.len()..];
        return Ok(RdfTerm::Iri(format!("_:{name}")));
    }
    if rest.starts_with('"') {
        let (value, after) = read_quoted(rest)?;
        *rest = after;
        // Datatype and language tag are noted and dropped; the graph only
        // carries the lexical form.
        if let Some(stripped) = rest.strip_prefix("^^") {
            *rest = stripped;
            match read_term(rest)? {
                RdfTerm::Iri(_) => {}
                RdfTerm::Literal(_) => return Err("datatype must be an IRI".to_string()),
            }
        } else if let Some(stripped) = rest.strip_prefix('@') {
            let end = stripped
                .find(|c: char| !c.is_alphanumeric() && c != '-')
                .unwrap_or(stripped.len());
            if end == 0 {
                return Err("empty language tag".to_string());
            }
            *rest = &stripped[end..];
        }
        return Ok(RdfTerm::Literal(value));
    }
    Err(format!(
        "expected `<iri>`, `_:blank`, or a quoted literal at `{}`",
        rest.chars().take(20).collect::<String>()
    ))
}

/// Reads a double-quoted literal with backslash escapes, returning the
/// decoded value and the remaining input.
fn read_quoted(input: &str) -> Result<(String, &str), String> {
    let mut chars = input.char_indices();
    chars.next(); // the opening quote
    let mut value = String::new();
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => return Ok((value, &input[i + 1..])),
            '\\' => {
                let Some((_, esc)) = chars.next() else {
                    return Err("dangling backslash in literal".to_string());
                };
                match esc {
                    't' => value.push('\t'),
                    'n' => value.push('\n'),
                    'r' => value.push('\r'),
                    'b' => value.push('\u{0008}'),
                    'f' => value.push('\u{000C}'),
                    '"' => value.push('"'),
                    '\'' => value.push('\''),
                    '\\' => value.push('\\'),
                    'u' | 'U' => {
                        let len = if esc == 'u' { 4 } else { 8 };
                        let mut code = String::new();
                        for _ in 0..len {
                            let Some((_, h)) = chars.next() else {
                                return Err(format!("truncated \\{esc} escape"));
                            };
                            code.push(h);
                        }
                        let point = u32::from_str_radix(&code, 16)
                            .map_err(|_| format!("bad hex in \\{esc} escape `{code}`"))?;
                        let Some(decoded) = char::from_u32(point) else {
                            return Err(format!("\\{esc} escape `{code}` is not a character"));
                        };
                        value.push(decoded);
                    }
                    other => return Err(format!("unknown escape `\\{other}`")),
                }
            }
            _ => value.push(c),
        }
    }
    Err("unterminated literal (missing closing quote)".to_string())
}
