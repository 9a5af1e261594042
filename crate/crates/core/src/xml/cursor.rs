//! Character-level cursor shared by the DTD and document parsers: position
//! tracking for error messages, names, quoted strings.

use crate::xml::XmlError;

pub(super) struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

pub(super) fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == ':'
}

pub(super) fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '-' | '_' | ':' | '.')
}

impl Cursor {
    pub fn new(text: &str) -> Self {
        Cursor {
            chars: text.strip_prefix('\u{feff}').unwrap_or(text).chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    pub fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    pub fn eat(&mut self, expected: char) -> bool {
        if self.peek() == Some(expected) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn starts_with(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(i, c)| self.chars.get(self.pos + i) == Some(&c))
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        if self.starts_with(s) {
            for _ in s.chars() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, expected: char, context: &str) -> Result<(), XmlError> {
        if self.eat(expected) {
            Ok(())
        } else {
            Err(self.error(format!(
                "expected `{expected}` {context}, found {}",
                self.describe_here()
            )))
        }
    }

    pub fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.bump();
        }
    }

    /// Consumes everything up to and including `end`.
    pub fn skip_until(&mut self, end: &str, what: &str) -> Result<(), XmlError> {
        while !self.at_end() {
            if self.eat_str(end) {
                return Ok(());
            }
            self.bump();
        }
        Err(self.error(format!("unterminated {what}, expected `{end}`")))
    }

    pub fn read_name(&mut self) -> Result<String, XmlError> {
        match self.peek() {
            Some(c) if is_name_start(c) => {}
            _ => {
                return Err(self.error(format!("expected a name, found {}", self.describe_here())))
            }
        }
        let mut name = String::new();
        while matches!(self.peek(), Some(c) if is_name_char(c)) {
            name.push(self.bump().unwrap());
        }
        Ok(name)
    }

    /// Reads a single- or double-quoted string, without entity expansion.
    pub fn read_quoted(&mut self) -> Result<String, XmlError> {
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => {
                return Err(self.error(format!(
                    "expected a quoted string, found {}",
                    self.describe_here()
                )))
            }
        };
        self.bump();
        let mut value = String::new();
        loop {
            match self.bump() {
                Some(c) if c == quote => return Ok(value),
                Some(c) => value.push(c),
                None => return Err(self.error("unterminated quoted string".to_string())),
            }
        }
    }

    pub fn error(&self, message: String) -> XmlError {
        XmlError::Syntax {
            line: self.line,
            col: self.col,
            message,
        }
    }

    fn describe_here(&self) -> String {
        match self.peek() {
            Some(c) => format!("`{c}`"),
            None => "end of input".to_string(),
        }
    }
}
