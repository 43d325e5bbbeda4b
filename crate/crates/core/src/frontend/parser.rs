//! Recursive-descent parser for `.flo` sources. Keywords are contextual:
//! they are ordinary identifiers everywhere except in the position that
//! expects them.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::ast::{AstExpr, BinOp, Binding, Ident, Item, Kind};
use super::lexer::{tokenize, Tok, Token};
use super::{Ast, ParseError};
use crate::Span;

pub fn parse_program(source: &str) -> Result<Ast, ParseError> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut items = Vec::new();
    while !p.at_eof() {
        items.push(p.item()?);
    }
    Ok(Ast { items })
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError {
            line: t.span.line,
            col: t.span.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
            message: None,
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Span, ParseError> {
        if self.peek().tok == tok {
            Ok(self.advance().span)
        } else {
            let sym = format!("`{}`", tok.symbol());
            Err(self.error(&[sym.as_str()]))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<Span, ParseError> {
        if self.is_keyword(kw) {
            Ok(self.advance().span)
        } else {
            let want = format!("`{kw}`");
            Err(self.error(&[want.as_str()]))
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        match &self.peek().tok {
            Tok::Ident(name) => {
                let name = name.clone();
                let span = self.advance().span;
                Ok(Ident::new(name, span))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn int(&mut self) -> Result<(u64, Span), ParseError> {
        match self.peek().tok {
            Tok::Int(n) => {
                let span = self.advance().span;
                Ok((n, span))
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    fn signed_int(&mut self) -> Result<(i64, Span), ParseError> {
        let neg_span = if self.peek().tok == Tok::Minus { Some(self.advance().span) } else { None };
        let (n, span) = self.int()?;
        let span = neg_span.unwrap_or(span);
        let value = i64::try_from(n).map_err(|_| ParseError::message(span, "integer literal too large"))?;
        Ok((if neg_span.is_some() { -value } else { value }, span))
    }

    fn string(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                self.advance();
                Ok(s)
            }
            _ => Err(self.error(&["string"])),
        }
    }

    fn end_of_item(&mut self) {
        self.eat(&Tok::Semi);
    }

    fn item(&mut self) -> Result<Item, ParseError> {
        let item = match &self.peek().tok {
            Tok::Ident(kw) if kw == "const" => self.const_item()?,
            Tok::Ident(kw) if kw == "channel" => self.channel_item()?,
            Tok::Ident(kw) if kw == "image" => self.image_item()?,
            Tok::Ident(kw) if kw == "task" => self.task_item()?,
            _ => return Err(self.error(&["`const`", "`channel`", "`image`", "`task`"])),
        };
        self.end_of_item();
        Ok(item)
    }

    fn const_item(&mut self) -> Result<Item, ParseError> {
        self.expect_keyword("const")?;
        let span = self.expect_keyword("vector_length")?;
        self.expect(Tok::Eq)?;
        let (value, _) = self.int()?;
        Ok(Item::VectorLength { value, span })
    }

    fn channel_item(&mut self) -> Result<Item, ParseError> {
        self.expect_keyword("channel")?;
        let name = self.ident()?;
        let depth = if self.is_keyword("depth") {
            self.advance();
            Some(self.int()?.0)
        } else {
            None
        };
        Ok(Item::Channel { name, depth })
    }

    fn image_item(&mut self) -> Result<Item, ParseError> {
        self.expect_keyword("image")?;
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        let (width, _) = self.int()?;
        self.expect(Tok::Comma)?;
        let (height, _) = self.int()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Eq)?;
        let binding = match &self.peek().tok {
            Tok::Ident(kw) if kw == "input" || kw == "output" => {
                let input = kw == "input";
                self.advance();
                self.expect(Tok::LParen)?;
                let path = self.string()?;
                self.expect(Tok::RParen)?;
                if input {
                    Binding::Input(path)
                } else {
                    Binding::Output(path)
                }
            }
            Tok::Ident(kw) if kw == "virtual" => {
                self.advance();
                self.expect(Tok::LParen)?;
                let chan = self.ident()?;
                self.expect(Tok::RParen)?;
                Binding::Virtual(chan)
            }
            _ => return Err(self.error(&["`input`", "`output`", "`virtual`"])),
        };
        Ok(Item::Image { name, width, height, binding })
    }

    fn task_item(&mut self) -> Result<Item, ParseError> {
        self.expect_keyword("task")?;
        let name = self.ident()?;
        let kind = self.kind()?;
        self.expect_keyword("reads")?;
        let reads = self.ident_list()?;
        self.expect_keyword("writes")?;
        let writes = self.ident_list()?;
        Ok(Item::Task { name, kind, reads, writes })
    }

    fn ident_list(&mut self) -> Result<Vec<Ident>, ParseError> {
        let mut out = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn kind(&mut self) -> Result<Kind, ParseError> {
        let kw = match &self.peek().tok {
            Tok::Ident(s) => s.clone(),
            _ => return Err(self.error(KIND_KEYWORDS)),
        };
        let kind = match kw.as_str() {
            "point" | "point2" => {
                self.advance();
                self.expect(Tok::LParen)?;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                if kw == "point" {
                    Kind::Point(e)
                } else {
                    Kind::Point2(e)
                }
            }
            "local" => {
                self.advance();
                self.expect(Tok::LParen)?;
                let (size, size_span) = self.int()?;
                self.expect(Tok::Comma)?;
                self.expect(Tok::LBracket)?;
                let mut coeffs = Vec::new();
                if self.peek().tok != Tok::RBracket {
                    coeffs.push(self.signed_int()?.0);
                    while self.eat(&Tok::Comma) {
                        coeffs.push(self.signed_int()?.0);
                    }
                }
                self.expect(Tok::RBracket)?;
                let (divisor, divisor_span) = if self.eat(&Tok::Slash) {
                    let (d, s) = self.signed_int()?;
                    (Some(d), s)
                } else {
                    (None, Span::NONE)
                };
                self.expect(Tok::RParen)?;
                Kind::Local { size, size_span, coeffs, divisor, divisor_span }
            }
            "split" => {
                self.advance();
                self.expect(Tok::LParen)?;
                let (fanout, span) = self.int()?;
                self.expect(Tok::RParen)?;
                Kind::Split { fanout, span }
            }
            "read" => {
                self.advance();
                Kind::Read
            }
            "write" => {
                self.advance();
                Kind::Write
            }
            _ => return Err(self.error(KIND_KEYWORDS)),
        };
        Ok(kind)
    }

    fn expr(&mut self) -> Result<AstExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term()?;
            lhs = AstExpr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<AstExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = AstExpr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<AstExpr, ParseError> {
        if self.peek().tok == Tok::Minus {
            let span = self.advance().span;
            let inner = self.unary()?;
            return Ok(AstExpr::Neg(Box::new(inner), span));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<AstExpr, ParseError> {
        match self.peek().tok.clone() {
            Tok::Int(n) => {
                let span = self.advance().span;
                Ok(AstExpr::Int(n, span))
            }
            Tok::Ident(_) => {
                let id = self.ident()?;
                if self.eat(&Tok::LParen) {
                    let mut args = Vec::new();
                    if self.peek().tok != Tok::RParen {
                        args.push(self.expr()?);
                        while self.eat(&Tok::Comma) {
                            args.push(self.expr()?);
                        }
                    }
                    self.expect(Tok::RParen)?;
                    Ok(AstExpr::Call(id, args))
                } else {
                    Ok(AstExpr::Var(id))
                }
            }
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.error(&["integer", "identifier", "`(`", "`-`"])),
        }
    }
}

const KIND_KEYWORDS: &[&str] = &["`point`", "`point2`", "`local`", "`split`", "`read`", "`write`"];
