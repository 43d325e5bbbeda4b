use alloc::string::String;
use alloc::vec::Vec;

use super::ParseError;
use crate::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        use alloc::format;
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Eof => "end of file".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Eq => "=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Ident(_) => "identifier",
            Tok::Int(_) => "integer",
            Tok::Str(_) => "string",
            Tok::Eof => "end of file",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = source.char_indices().peekable();
    let (mut line, mut col) = (1u32, 1u32);

    // Advances the cursor, keeping line/col in sync.
    macro_rules! bump {
        () => {{
            let c = chars.next();
            if let Some((_, ch)) = c {
                if ch == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
            }
            c
        }};
    }

    while let Some(&(_, c)) = chars.peek() {
        let span = Span::new(line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' {
            let mut ahead = chars.clone();
            ahead.next();
            if matches!(ahead.peek(), Some((_, '/'))) {
                while let Some(&(_, ch)) = chars.peek() {
                    if ch == '\n' {
                        break;
                    }
                    bump!();
                }
                continue;
            }
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&(_, ch)) = chars.peek() {
                if ch.is_ascii_alphanumeric() || ch == '_' {
                    s.push(ch);
                    bump!();
                } else {
                    break;
                }
            }
            Tok::Ident(s)
        } else if c.is_ascii_digit() {
            let mut value: u64 = 0;
            while let Some(&(_, ch)) = chars.peek() {
                if let Some(d) = ch.to_digit(10) {
                    value = value
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(u64::from(d)))
                        .ok_or_else(|| ParseError::message(span, "integer literal too large"))?;
                    bump!();
                } else {
                    break;
                }
            }
            if let Some(&(_, ch)) = chars.peek() {
                if ch.is_ascii_alphabetic() || ch == '_' {
                    return Err(ParseError::message(
                        Span::new(line, col),
                        "identifier cannot start right after a number",
                    ));
                }
            }
            Tok::Int(value)
        } else if c == '"' {
            bump!();
            let mut s = String::new();
            loop {
                match bump!() {
                    Some((_, '"')) => break,
                    Some((_, '\n')) | None => return Err(ParseError::message(span, "unterminated string literal")),
                    Some((_, ch)) => s.push(ch),
                }
            }
            Tok::Str(s)
        } else {
            bump!();
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                '=' => Tok::Eq,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                other => return Err(ParseError::message(span, alloc::format!("unexpected character `{other}`"))),
            }
        };
        out.push(Token { tok, span });
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(line, col) });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracks_positions_and_skips_comments() {
        let toks = tokenize("// header\nchannel c1;\n  task").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("channel".into()));
        assert_eq!(toks[0].span, Span::new(2, 1));
        assert_eq!(toks[1].span, Span::new(2, 9));
        assert_eq!(toks[2].tok, Tok::Semi);
        assert_eq!(toks[3].span, Span::new(3, 3));
        assert_eq!(toks.last().unwrap().tok, Tok::Eof);
    }

    #[test]
    fn rejects_glued_number_and_identifier() {
        let err = tokenize("1024x1024").unwrap_err();
        assert_eq!((err.line, err.col), (1, 5));
    }

    #[test]
    fn rejects_unterminated_string() {
        assert!(tokenize("\"abc").is_err());
    }
}
