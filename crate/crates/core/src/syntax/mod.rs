//! Concrete syntax of `.bff` sources.

mod lexer;
mod parser;
mod pretty;

use std::fmt;

use serde::Serialize;

pub use lexer::{lex, Tok, Token};
pub use parser::{parse_expr, parse_procedure, parse_program, parse_stmt, parse_term};
pub use pretty::{pretty, pretty_expr, pretty_procedure, pretty_stmt, pretty_term};

use crate::span::Span;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseError {
    pub span: Span,
    pub expected: String,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected {}, found {}", self.span, self.expected, self.found)
    }
}

impl std::error::Error for ParseError {}
