use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{ParseError, SourceSpan};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number(Rational),
    /// Integer literal text, kept for exponents.
    Int(u64),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Semi,
    Eq,
    Eof,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => alloc::format!("identifier `{}`", s),
        Tok::Number(_) | Tok::Int(_) => "number".to_string(),
        Tok::Plus => "`+`".to_string(),
        Tok::Minus => "`-`".to_string(),
        Tok::Star => "`*`".to_string(),
        Tok::Slash => "`/`".to_string(),
        Tok::Caret => "`^`".to_string(),
        Tok::LParen => "`(`".to_string(),
        Tok::RParen => "`)`".to_string(),
        Tok::Comma => "`,`".to_string(),
        Tok::Semi => "`;`".to_string(),
        Tok::Eq => "`=`".to_string(),
        Tok::Eof => "end of input".to_string(),
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1usize, 0usize);
    let span = |start: usize, end: usize, line: usize, line_start: usize| SourceSpan {
        line,
        column: src[line_start..start].chars().count() + 1,
        start,
        end,
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Ident(src[start..i].to_string())
        } else if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit())) {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let int_end = i;
            let mut frac = "";
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                let fs = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                frac = &src[fs..i];
            }
            if i < bytes.len() && (bytes[i].is_ascii_alphabetic() || bytes[i] == b'_' || bytes[i] == b'.') {
                return Err(ParseError::Syntax {
                    span: span(start, i + 1, line, line_start),
                    message: "malformed number".to_string(),
                });
            }
            let int_part = &src[start..int_end];
            if frac.is_empty() && i == int_end {
                match int_part.parse::<u64>() {
                    Ok(v) => Tok::Int(v),
                    Err(_) => Tok::Number(Rational::from_integer(int_part.parse::<BigInt>().unwrap())),
                }
            } else {
                let digits: String = [int_part, frac].concat();
                let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().unwrap() };
                let mut d = BigInt::one();
                for _ in 0..frac.len() {
                    d *= 10;
                }
                Tok::Number(Rational::new(n, d))
            }
        } else {
            i += 1;
            match c {
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'/' => Tok::Slash,
                b'^' => Tok::Caret,
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b';' => Tok::Semi,
                b'=' => Tok::Eq,
                _ => {
                    let ch = src[start..].chars().next().unwrap();
                    let end = start + ch.len_utf8();
                    return Err(ParseError::Syntax {
                        span: span(start, end, line, line_start),
                        message: alloc::format!("unexpected character `{}`", ch),
                    });
                }
            }
        };
        out.push(Token { tok, span: span(start, i, line, line_start) });
    }
    out.push(Token { tok: Tok::Eof, span: span(bytes.len(), bytes.len(), line, line_start) });
    Ok(out)
}
