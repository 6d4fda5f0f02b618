//! Recursive-descent parser for the walk-expression grammar.
//!
//! ```text
//! expr := "path2"
//!       | "complete(" int ")"
//!       | "bipartite(" int "," int ")"
//!       | "star(" int ")"
//!       | "hypercube(" int ")"
//!       | "book(" int ")"
//!       | "cartesian(" expr "," expr ")"
//!       | "interdep_id(" expr ")"
//!       | "interdep_complete(" expr "," expr ")"
//! ```
//!
//! Whitespace-insensitive; integers decimal. Diagnostics carry the byte
//! offset and the expected-token set; node preconditions (argument ranges)
//! are checked as soon as a node is built.

use crate::error::{Result, WalkError};
use crate::synth::WalkExpr;

pub fn parse_expr(text: &str) -> Result<WalkExpr> {
    let mut p = Parser { src: text, pos: 0 };
    p.skip_ws();
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.expected("end of input"));
    }
    Ok(expr)
}

impl std::str::FromStr for WalkExpr {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        parse_expr(s)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

const EXPR_HEADS: &str = "one of `path2`, `complete(`, `bipartite(`, `star(`, `hypercube(`, \
                          `book(`, `cartesian(`, `interdep_id(`, `interdep_complete(`";

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn found(&self) -> String {
        let rest = self.rest();
        if rest.is_empty() {
            "end of input".to_string()
        } else {
            let end = rest
                .char_indices()
                .take(12)
                .last()
                .map(|(i, c)| i + c.len_utf8())
                .unwrap_or(rest.len());
            format!("`{}`", &rest[..end])
        }
    }

    fn expected(&self, what: &str) -> WalkError {
        WalkError::Parse {
            offset: self.pos,
            expected: what.to_string(),
            found: self.found(),
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.expected(&format!("`{token}`")))
        }
    }

    fn int(&mut self) -> Result<u32> {
        self.skip_ws();
        let rest = self.rest();
        let digits: usize = rest.bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.expected("a decimal integer"));
        }
        let value = rest[..digits]
            .parse::<u32>()
            .map_err(|_| self.expected("an integer within range"))?;
        self.pos += digits;
        Ok(value)
    }

    fn expr(&mut self) -> Result<WalkExpr> {
        self.skip_ws();
        let at = self.pos;
        let node = if self.eat("path2") {
            WalkExpr::Path2
        } else if self.eat("complete") {
            self.expect("(")?;
            let m = self.int()?;
            self.expect(")")?;
            WalkExpr::Complete(m)
        } else if self.eat("bipartite") {
            self.expect("(")?;
            let m1 = self.int()?;
            self.expect(",")?;
            let m2 = self.int()?;
            self.expect(")")?;
            WalkExpr::Bipartite(m1, m2)
        } else if self.eat("star") {
            self.expect("(")?;
            let m = self.int()?;
            self.expect(")")?;
            WalkExpr::Star(m)
        } else if self.eat("hypercube") {
            self.expect("(")?;
            let n = self.int()?;
            self.expect(")")?;
            WalkExpr::Hypercube(n)
        } else if self.eat("book") {
            self.expect("(")?;
            let m = self.int()?;
            self.expect(")")?;
            WalkExpr::Book(m)
        } else if self.eat("cartesian") {
            self.expect("(")?;
            let a = self.expr()?;
            self.expect(",")?;
            let b = self.expr()?;
            self.expect(")")?;
            WalkExpr::cartesian(a, b)
        } else if self.eat("interdep_id") {
            self.expect("(")?;
            let e = self.expr()?;
            self.expect(")")?;
            WalkExpr::interdep_identity(e)
        } else if self.eat("interdep_complete") {
            self.expect("(")?;
            let a = self.expr()?;
            self.expect(",")?;
            let b = self.expr()?;
            self.expect(")")?;
            WalkExpr::interdep_complete(a, b)
        } else {
            return Err(self.expected(EXPR_HEADS));
        };
        node.validate_node().map_err(|e| match e {
            WalkError::InvalidArgument(msg) => {
                WalkError::InvalidArgument(format!("{msg} (at byte {at})"))
            }
            other => other,
        })?;
        Ok(node)
    }
}
