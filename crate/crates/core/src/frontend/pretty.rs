use alloc::string::String;
use core::fmt::Write;

use super::ast::{AstExpr, BinOp, Binding, Item, Kind};
use super::Ast;

/// Prints `ast` in canonical form. Parsing the output yields the same tree
/// (modulo source positions).
pub fn pretty_print(ast: &Ast) -> String {
    let mut out = String::new();
    for item in &ast.items {
        match item {
            Item::VectorLength { value, .. } => {
                let _ = writeln!(out, "const vector_length = {value};");
            }
            Item::Channel { name, depth } => match depth {
                Some(d) => {
                    let _ = writeln!(out, "channel {} depth {d};", name.name);
                }
                None => {
                    let _ = writeln!(out, "channel {};", name.name);
                }
            },
            Item::Image { name, width, height, binding } => {
                let binding = match binding {
                    Binding::Input(p) => alloc::format!("input(\"{p}\")"),
                    Binding::Output(p) => alloc::format!("output(\"{p}\")"),
                    Binding::Virtual(c) => alloc::format!("virtual({})", c.name),
                };
                let _ = writeln!(out, "image {}({width}, {height}) = {binding};", name.name);
            }
            Item::Task { name, kind, reads, writes } => {
                let _ = write!(out, "task {} ", name.name);
                print_kind(&mut out, kind);
                let list = |ids: &[super::ast::Ident]| {
                    ids.iter().map(|i| i.name.as_str()).collect::<alloc::vec::Vec<_>>().join(", ")
                };
                let _ = writeln!(out, " reads {} writes {};", list(reads), list(writes));
            }
        }
    }
    out
}

fn print_kind(out: &mut String, kind: &Kind) {
    match kind {
        Kind::Point(e) | Kind::Point2(e) => {
            let _ = write!(out, "{}(", kind.keyword());
            print_expr(out, e, 0);
            out.push(')');
        }
        Kind::Local { size, coeffs, divisor, .. } => {
            let _ = write!(out, "local({size}, [");
            for (i, c) in coeffs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{c}");
            }
            out.push(']');
            if let Some(d) = divisor {
                let _ = write!(out, " / {d}");
            }
            out.push(')');
        }
        Kind::Split { fanout, .. } => {
            let _ = write!(out, "split({fanout})");
        }
        Kind::Read => out.push_str("read"),
        Kind::Write => out.push_str("write"),
    }
}

fn precedence(op: BinOp) -> u8 {
    match op {
        BinOp::Add | BinOp::Sub => 1,
        BinOp::Mul | BinOp::Div => 2,
    }
}

// `ctx` is the binding strength the surrounding position demands.
fn print_expr(out: &mut String, e: &AstExpr, ctx: u8) {
    match e {
        AstExpr::Int(n, _) => {
            let _ = write!(out, "{n}");
        }
        AstExpr::Var(id) => out.push_str(&id.name),
        AstExpr::Neg(inner, _) => {
            out.push('-');
            print_expr(out, inner, 3);
        }
        AstExpr::Binary(op, a, b) => {
            let p = precedence(*op);
            let parens = p < ctx;
            if parens {
                out.push('(');
            }
            print_expr(out, a, p);
            let _ = write!(out, " {} ", op.symbol());
            // Left-associative: the right operand needs strictly higher strength.
            print_expr(out, b, p + 1);
            if parens {
                out.push(')');
            }
        }
        AstExpr::Call(id, args) => {
            out.push_str(&id.name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                print_expr(out, a, 0);
            }
            out.push(')');
        }
    }
}
