//! Tokenizer and Pratt parser for the expression grammar.
//!
//! Precedence, tightest first: `^` (right associative), unary `-`,
//! `*` `/`, `+` `-` (all left associative). Symbols must appear in the
//! declared list passed to [`parse`]; names followed by `(` must be one of
//! the known elementary functions.

use super::{Expr, ExprError, Func};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push(Token { tok: Tok::Plus, offset: i });
                i += 1;
            }
            b'-' => {
                out.push(Token { tok: Tok::Minus, offset: i });
                i += 1;
            }
            b'*' => {
                out.push(Token { tok: Tok::Star, offset: i });
                i += 1;
            }
            b'/' => {
                out.push(Token { tok: Tok::Slash, offset: i });
                i += 1;
            }
            b'^' => {
                out.push(Token { tok: Tok::Caret, offset: i });
                i += 1;
            }
            b'(' => {
                out.push(Token { tok: Tok::LParen, offset: i });
                i += 1;
            }
            b')' => {
                out.push(Token { tok: Tok::RParen, offset: i });
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value = text.parse::<f64>().map_err(|_| ExprError::Syntax {
                    offset: start,
                    message: format!("invalid number literal `{text}`"),
                })?;
                out.push(Token { tok: Tok::Num(value), offset: start });
            }
            b'A'..=b'Z' | b'a'..=b'z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(src[start..i].to_string()),
                    offset: start,
                });
            }
            _ => {
                return Err(ExprError::Syntax {
                    offset: i,
                    message: format!("unexpected character `{}`", &src[i..i + 1]),
                })
            }
        }
    }
    out.push(Token { tok: Tok::Eof, offset: src.len() });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    declared: &'a [&'a str],
}

// Binding powers: (left, right). Left-associative pairs have left < right,
// the right-associative `^` has left > right. Unary minus binds its operand
// at UNARY_BP, below `^` so that -x^2 reads as -(x^2).
const BP_ADD: (u8, u8) = (1, 2);
const BP_MUL: (u8, u8) = (3, 4);
const UNARY_BP: u8 = 5;
const BP_POW: (u8, u8) = (8, 7);

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ExprError> {
        let t = self.advance();
        let mut lhs = match t.tok {
            Tok::Num(v) => Expr::Num(v),
            Tok::Ident(name) => {
                if self.peek().tok == Tok::LParen {
                    let func = Func::from_name(&name).ok_or(ExprError::UnknownFunction {
                        name: name.clone(),
                        offset: t.offset,
                    })?;
                    self.advance(); // (
                    let arg = self.expr(0)?;
                    self.expect_rparen()?;
                    Expr::Call(func, Box::new(arg))
                } else if self.declared.iter().any(|d| *d == name) {
                    Expr::Sym(name)
                } else {
                    return Err(ExprError::UnknownSymbol { name, offset: t.offset });
                }
            }
            Tok::Minus => {
                let operand = self.expr(UNARY_BP)?;
                Expr::Neg(Box::new(operand))
            }
            Tok::LParen => {
                let inner = self.expr(0)?;
                self.expect_rparen()?;
                inner
            }
            other => {
                return Err(ExprError::Syntax {
                    offset: t.offset,
                    message: format!("expected an operand, found {}", describe(&other)),
                })
            }
        };

        loop {
            let (l_bp, r_bp, build): (u8, u8, fn(Box<Expr>, Box<Expr>) -> Expr) =
                match self.peek().tok {
                    Tok::Plus => (BP_ADD.0, BP_ADD.1, Expr::Add),
                    Tok::Minus => (BP_ADD.0, BP_ADD.1, Expr::Sub),
                    Tok::Star => (BP_MUL.0, BP_MUL.1, Expr::Mul),
                    Tok::Slash => (BP_MUL.0, BP_MUL.1, Expr::Div),
                    Tok::Caret => (BP_POW.0, BP_POW.1, Expr::Pow),
                    _ => break,
                };
            if l_bp < min_bp {
                break;
            }
            self.advance();
            let rhs = self.expr(r_bp)?;
            lhs = build(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        let t = self.advance();
        if t.tok == Tok::RParen {
            Ok(())
        } else {
            Err(ExprError::Syntax {
                offset: t.offset,
                message: format!("expected `)`, found {}", describe(&t.tok)),
            })
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number `{v}`"),
        Tok::Ident(s) => format!("name `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parse a formula against a list of declared symbol names.
pub fn parse(source: &str, declared: &[&str]) -> Result<Expr, ExprError> {
    if source.trim().is_empty() {
        return Err(ExprError::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let tokens = tokenize(source)?;
    let mut parser = Parser { tokens, pos: 0, declared };
    let expr = parser.expr(0)?;
    let t = parser.advance();
    if t.tok != Tok::Eof {
        return Err(ExprError::Syntax {
            offset: t.offset,
            message: format!("unexpected trailing {}", describe(&t.tok)),
        });
    }
    Ok(expr)
}
