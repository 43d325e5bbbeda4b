//! Resolved pixel expressions and their 32-bit integer semantics.
//!
//! Arithmetic wraps on overflow. Division truncates toward zero, a zero
//! divisor yields 0 and `i32::MIN / -1` wraps to `i32::MIN`; the emitted C++
//! helpers implement the same rules.

use alloc::boxed::Box;
use alloc::vec::Vec;

pub use super::ast::BinOp;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Min,
    Max,
    Abs,
    Clamp,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "min" => Func::Min,
            "max" => Func::Max,
            "abs" => Func::Abs,
            "clamp" => Func::Clamp,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Min => "min",
            Func::Max => "max",
            Func::Abs => "abs",
            Func::Clamp => "clamp",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            Func::Abs => 1,
            Func::Clamp => 3,
        }
    }
}

/// Expression tree over the task's input pixels. `Operand(i)` is the pixel
/// read from the task's i-th input.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(i32),
    Operand(u8),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn eval(&self, operands: &[i32]) -> i32 {
        match self {
            Expr::Lit(v) => *v,
            Expr::Operand(i) => operands[usize::from(*i)],
            Expr::Neg(e) => e.eval(operands).wrapping_neg(),
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(operands), b.eval(operands));
                match op {
                    BinOp::Add => a.wrapping_add(b),
                    BinOp::Sub => a.wrapping_sub(b),
                    BinOp::Mul => a.wrapping_mul(b),
                    BinOp::Div => div(a, b),
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].eval(operands);
                match f {
                    Func::Abs => a.wrapping_abs(),
                    Func::Min => a.min(args[1].eval(operands)),
                    Func::Max => a.max(args[1].eval(operands)),
                    Func::Clamp => {
                        let lo = args[1].eval(operands);
                        let hi = args[2].eval(operands);
                        a.max(lo).min(hi)
                    }
                }
            }
        }
    }

    /// Highest operand index used plus one.
    pub fn operand_count(&self) -> usize {
        match self {
            Expr::Lit(_) => 0,
            Expr::Operand(i) => usize::from(*i) + 1,
            Expr::Neg(e) => e.operand_count(),
            Expr::Binary(_, a, b) => a.operand_count().max(b.operand_count()),
            Expr::Call(_, args) => args.iter().map(Expr::operand_count).max().unwrap_or(0),
        }
    }
}

/// Total integer division used by pixel expressions and stencil normalization.
pub fn div(a: i32, b: i32) -> i32 {
    if b == 0 {
        0
    } else {
        a.wrapping_div(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    #[test]
    fn arithmetic_wraps_and_division_is_total() {
        let p = Expr::Operand(0);
        assert_eq!(bin(BinOp::Mul, p.clone(), Expr::Lit(2)).eval(&[i32::MAX]), -2);
        assert_eq!(bin(BinOp::Div, p.clone(), Expr::Operand(1)).eval(&[7, 0]), 0);
        assert_eq!(bin(BinOp::Div, p.clone(), Expr::Lit(-1)).eval(&[i32::MIN]), i32::MIN);
        assert_eq!(bin(BinOp::Div, p, Expr::Lit(2)).eval(&[-7]), -3);
    }

    #[test]
    fn calls() {
        let clamp = Expr::Call(Func::Clamp, vec![Expr::Operand(0), Expr::Lit(0), Expr::Lit(255)]);
        assert_eq!(clamp.eval(&[300]), 255);
        assert_eq!(clamp.eval(&[-3]), 0);
        let abs = Expr::Call(Func::Abs, vec![Expr::Operand(1)]);
        assert_eq!(abs.eval(&[0, -9]), 9);
        assert_eq!(abs.operand_count(), 2);
    }
}
