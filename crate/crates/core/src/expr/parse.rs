// Grammar:
//   expr  := or ('?' expr ':' expr)?
//   or    := and ('|' and)*
//   and   := unary ('&' unary)*
//   unary := '!' unary | atom
//   atom  := '0' | '1' | 'x' digits | '(' expr ')'
// `h ? c1 : c0` builds Ite(h, c0, c1). Whitespace is ignored.

use std::fmt;

use thiserror::Error;

use super::Expr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: expected {}, found {}", join(.expected), found_str(.found))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
        found: Option<char>,
    },
    #[error("undeclared variable {name} at offset {offset} (arity is {arity})")]
    UndeclaredVariable {
        name: String,
        offset: usize,
        arity: usize,
    },
    #[error("invalid variable name {name} at offset {offset}; variables are x1, x2, ...")]
    BadVariable { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UndeclaredVariable { offset, .. }
            | ParseError::BadVariable { offset, .. } => *offset,
        }
    }
}

fn join(expected: &[&'static str]) -> String {
    match expected {
        [one] => one.to_string(),
        _ => format!("one of {}", expected.join(", ")),
    }
}

fn found_str(found: &Option<char>) -> impl fmt::Display {
    match found {
        Some(c) => format!("'{c}'"),
        None => "end of input".to_string(),
    }
}

const ATOM_START: &[&str] = &["'!'", "'('", "'0'", "'1'", "variable"];

/// Parses an expression; any variable `x1, x2, ...` is accepted.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    Parser::new(text, None).parse()
}

/// Parses an expression, rejecting variables beyond `x{arity}`.
pub fn parse_with_arity(text: &str, arity: usize) -> Result<Expr, ParseError> {
    Parser::new(text, Some(arity)).parse()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    arity: Option<usize>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, arity: Option<usize>) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            arity,
        }
    }

    fn parse(mut self) -> Result<Expr, ParseError> {
        let e = self.expr()?;
        if self.peek().is_some() {
            return Err(self.error(&["'&'", "'|'", "'?'", "end of input"]));
        }
        Ok(e)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&mut self, expected: &[&'static str]) -> ParseError {
        self.skip_ws();
        // Report the full character, not a stray UTF-8 byte.
        let found = std::str::from_utf8(&self.src[self.pos..])
            .ok()
            .and_then(|s| s.chars().next())
            .or_else(|| self.src.get(self.pos).map(|&b| b as char));
        ParseError::Syntax {
            offset: self.pos,
            expected: expected.to_vec(),
            found,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let h = self.or()?;
        if !self.eat(b'?') {
            return Ok(h);
        }
        let c1 = self.expr()?;
        if !self.eat(b':') {
            return Err(self.error(&["'&'", "'|'", "'?'", "':'"]));
        }
        let c0 = self.expr()?;
        Ok(Expr::ite(h, c0, c1))
    }

    fn or(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.and()?;
        while self.eat(b'|') {
            lhs = Expr::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(b'&') {
            lhs = Expr::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'!') {
            return Ok(Expr::not(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'0') => {
                self.pos += 1;
                Ok(Expr::Const(false))
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Expr::Const(true))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error(&["'&'", "'|'", "'?'", "')'"]));
                }
                Ok(e)
            }
            Some(b'x') => self.variable(),
            _ => Err(self.error(ATOM_START)),
        }
    }

    fn variable(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        self.pos += 1;
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(ParseError::Syntax {
                offset: self.pos,
                expected: vec!["digit"],
                found: self.src.get(self.pos).map(|&b| b as char),
            });
        }
        // identifiers are ASCII by construction
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        let index = match name[1..].parse::<usize>() {
            Ok(k) if k >= 1 => k - 1,
            _ => {
                return Err(ParseError::BadVariable {
                    name: name.to_string(),
                    offset: start,
                })
            }
        };
        if let Some(arity) = self.arity.filter(|&a| index >= a) {
            return Err(ParseError::UndeclaredVariable {
                name: name.to_string(),
                offset: start,
                arity,
            });
        }
        Ok(Expr::Var(index))
    }
}
