//! Recursive-descent parser for the formula grammar.
//!
//! Errors carry the byte offset of the failure and the set of tokens that
//! would have been accepted there.

use super::{Formula, PredicateId};
use crate::error::{Error, Result};

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

fn name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '+' | '-' | '.')
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { text, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(c) => format!("{c:?}"),
            None => "end of input".to_string(),
        }
    }

    fn error(&self, expected: &[&str]) -> Error {
        Error::Syntax {
            offset: self.pos,
            found: self.found(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, c: char, expected: &[&str]) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn name(&mut self) -> Result<String> {
        let start = self.pos;
        while self.peek().is_some_and(name_char) {
            self.bump();
        }
        if self.pos == start {
            return Err(self.error(&["name"]));
        }
        Ok(self.text[start..self.pos].to_string())
    }

    fn atom(&mut self) -> Result<Formula> {
        let sigil = match self.peek() {
            Some('S') => 'S',
            Some('P') => 'P',
            _ => return Err(self.error(&["'S:'", "'P:'", "'!'", "'('"])),
        };
        self.bump();
        self.expect(':', &["':'"])?;
        let name = self.name()?;
        let pred = if sigil == 'S' {
            PredicateId::state(name)
        } else {
            self.expect('@', &["'@'"])?;
            let ctx = self.name()?;
            PredicateId::property(name, ctx)
        };
        self.expect('(', &["'('"])?;
        self.expect('x', &["'x'"])?;
        self.expect(')', &["')'"])?;
        Ok(Formula::Atom(pred))
    }

    fn primary(&mut self) -> Result<Formula> {
        self.skip_ws();
        if self.eat('(') {
            let inner = self.or_expr()?;
            self.skip_ws();
            self.expect(')', &["')'", "'&'", "'|'"])?;
            Ok(inner)
        } else {
            self.atom()
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        self.skip_ws();
        if self.eat('!') {
            Ok(self.unary()?.not())
        } else {
            self.primary()
        }
    }

    fn and_expr(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        loop {
            self.skip_ws();
            let mark = self.pos;
            if self.eat('&') {
                left = left.and(self.unary()?);
            } else {
                self.pos = mark;
                return Ok(left);
            }
        }
    }

    fn or_expr(&mut self) -> Result<Formula> {
        let mut left = self.and_expr()?;
        loop {
            self.skip_ws();
            let mark = self.pos;
            if self.eat('|') {
                left = left.or(self.and_expr()?);
            } else {
                self.pos = mark;
                return Ok(left);
            }
        }
    }
}

/// Parses a formula. The grammar is LL(1); `&` binds tighter than `|`, `!`
/// tightest, both binary operators associate to the left.
pub fn parse(text: &str) -> Result<Formula> {
    let mut cur = Cursor::new(text);
    let f = cur.or_expr()?;
    cur.skip_ws();
    if cur.pos != text.len() {
        return Err(cur.error(&["'&'", "'|'", "end of input"]));
    }
    Ok(f)
}

/// Parses the bare predicate key form `S:<name>` / `P:<name>@<ctx>` used in
/// scenario files (no `(x)` application).
pub fn parse_predicate_key(text: &str) -> Result<PredicateId> {
    let mut cur = Cursor::new(text.trim());
    let sigil = match cur.peek() {
        Some('S') => 'S',
        Some('P') => 'P',
        _ => return Err(cur.error(&["'S:'", "'P:'"])),
    };
    cur.bump();
    cur.expect(':', &["':'"])?;
    let name = cur.name()?;
    let pred = if sigil == 'S' {
        PredicateId::state(name)
    } else {
        cur.expect('@', &["'@'"])?;
        PredicateId::property(name, cur.name()?)
    };
    if cur.pos != cur.text.len() {
        return Err(cur.error(&["end of input"]));
    }
    Ok(pred)
}
