//! C frontend: a competitive-programming subset of C99.
//!
//! `parse` turns source text into an [`Ast`]; `print` turns an [`Ast`] back
//! into compilable source. Operators and literals are stored in canonical
//! spelling so that `0x10` and `16` compare equal.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use sha2::{Digest, Sha256};

use crate::ast::{Ast, Span};

pub use lexer::{canonical_float, canonical_int};
pub use printer::expr as print_expr;

/// Input outside the supported grammar.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct SyntaxError {
    pub message: String,
    pub span: Span,
}

impl SyntaxError {
    pub fn new(message: impl Into<String>, span: Span) -> Self {
        SyntaxError { message: message.into(), span }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}: {}", self.span, self.message)
    }
}

/// Parse C source into an [`Ast`].
pub fn parse(source: &str) -> Result<Ast, SyntaxError> {
    let lexed = lexer::lex(source)?;
    let mut p = parser::Parser::new(lexed.tokens);
    let root = p.parse_unit()?;
    Ok(Ast {
        root,
        preamble: lexed.includes,
        source_digest: Some(hex::encode(Sha256::digest(source.as_bytes()))),
    })
}

/// Render an [`Ast`] as C source. `#include` lines come first.
pub fn print(ast: &Ast) -> String {
    printer::print_ast(ast)
}
