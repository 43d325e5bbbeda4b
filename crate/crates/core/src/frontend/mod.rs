//! Lexing, parsing and name resolution of `.flo` programs.
//!
//! ```text
//! const vector_length = 4;
//! channel chan1;
//! image in_img(1024, 1024) = input("input.pgm");
//! image tmp(1024, 1024) = virtual(chan1);
//! task blur local(3, [1, 2, 1, 2, 4, 2, 1, 2, 1] / 16) reads in_img writes tmp;
//! ```
//!
//! The full grammar is in `docs/dsl.md` at the repository root.

pub mod ast;
pub mod expr;
mod lexer;
mod parser;
mod pretty;
pub mod program;
mod resolve;

use alloc::string::String;
use alloc::vec::Vec;

use crate::Span;

pub use ast::Ast;
pub use expr::{Expr, Func};
pub use parser::parse_program;
pub use pretty::pretty_print;
pub use program::*;
pub use resolve::resolve;

/// Parses and resolves in one step.
pub fn compile_source(source: &str) -> Result<Program, FrontendError> {
    let ast = parse_program(source)?;
    Ok(resolve(&ast)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub expected: Vec<String>,
    pub found: String,
    /// Set for lexical errors that have no expected-token set.
    pub message: Option<String>,
}

impl ParseError {
    pub(crate) fn message(span: Span, msg: impl Into<String>) -> Self {
        ParseError {
            line: span.line,
            col: span.col,
            expected: Vec::new(),
            found: String::new(),
            message: Some(msg.into()),
        }
    }

    pub fn span(&self) -> Span {
        Span::new(self.line, self.col)
    }
}

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if let Some(m) = &self.message {
            return f.write_str(m);
        }
        match self.expected.as_slice() {
            [one] => write!(f, "expected {one}, found {}", self.found),
            many => write!(f, "expected one of {}, found {}", many.join(", "), self.found),
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("unbound name `{name}`")]
    UnboundName { name: String, span: Span },
    #[error("`{name}` is already declared at {first}")]
    DuplicateName { name: String, span: Span, first: Span },
    #[error("{kind} task `{task}` needs {rule}, found {reads} read(s) and {writes} write(s)")]
    ArityMismatch { task: String, kind: &'static str, rule: &'static str, reads: usize, writes: usize, span: Span },
    #[error("virtual image `{image}` must bind a declared channel, `{channel}` is not one")]
    VirtualWithoutChannel { image: String, channel: String, span: Span },
    #[error("division by zero in task `{task}`")]
    DivisionByZero { task: String, span: Span },
    #[error("invalid stencil in task `{task}`: {reason}")]
    InvalidStencil { task: String, reason: String, span: Span },
    #[error("vector_length must be a positive 32-bit integer, found {value}")]
    InvalidVectorLength { value: u64, span: Span },
    #[error("channel `{channel}` has depth {depth}, FIFOs need at least 2 slots")]
    InvalidDepth { channel: String, depth: u64, span: Span },
    #[error("image `{image}`: {reason}")]
    ImageSize { image: String, reason: String, span: Span },
    #[error("task `{task}` {reason} `{image}`")]
    ImageDirection { task: String, image: String, reason: &'static str, span: Span },
    #[error("call to `{name}`: {reason}")]
    BadCall { name: String, reason: String, span: Span },
    #[error("integer literal does not fit in 32 bits")]
    IntegerOutOfRange { span: Span },
}

impl ResolveError {
    pub fn span(&self) -> Span {
        use ResolveError::*;
        match self {
            UnboundName { span, .. }
            | DuplicateName { span, .. }
            | ArityMismatch { span, .. }
            | VirtualWithoutChannel { span, .. }
            | DivisionByZero { span, .. }
            | InvalidStencil { span, .. }
            | InvalidVectorLength { span, .. }
            | InvalidDepth { span, .. }
            | ImageSize { span, .. }
            | ImageDirection { span, .. }
            | BadCall { span, .. }
            | IntegerOutOfRange { span } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrontendError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

impl FrontendError {
    pub fn span(&self) -> Span {
        match self {
            FrontendError::Parse(e) => e.span(),
            FrontendError::Resolve(e) => e.span(),
        }
    }
}
