//! Unresolved syntax tree, one node per source construct, in source order.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use crate::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: Span) -> Self {
        Ident { name: name.into(), span }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ast {
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    VectorLength { value: u64, span: Span },
    Channel { name: Ident, depth: Option<u64> },
    Image { name: Ident, width: u64, height: u64, binding: Binding },
    Task { name: Ident, kind: Kind, reads: Vec<Ident>, writes: Vec<Ident> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Input(String),
    Output(String),
    Virtual(Ident),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kind {
    Point(AstExpr),
    Point2(AstExpr),
    Local { size: u64, size_span: Span, coeffs: Vec<i64>, divisor: Option<i64>, divisor_span: Span },
    Split { fanout: u64, span: Span },
    Read,
    Write,
}

impl Kind {
    pub fn keyword(&self) -> &'static str {
        match self {
            Kind::Point(_) => "point",
            Kind::Point2(_) => "point2",
            Kind::Local { .. } => "local",
            Kind::Split { .. } => "split",
            Kind::Read => "read",
            Kind::Write => "write",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AstExpr {
    Int(u64, Span),
    Var(Ident),
    Neg(Box<AstExpr>, Span),
    Binary(BinOp, Box<AstExpr>, Box<AstExpr>),
    Call(Ident, Vec<AstExpr>),
}

impl AstExpr {
    pub fn span(&self) -> Span {
        match self {
            AstExpr::Int(_, s) | AstExpr::Neg(_, s) => *s,
            AstExpr::Var(id) | AstExpr::Call(id, _) => id.span,
            AstExpr::Binary(_, lhs, _) => lhs.span(),
        }
    }
}
