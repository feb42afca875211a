use std::collections::HashMap;

use crate::ast::Span;
use crate::frontend::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(String),
    Float(String),
    Char(String),
    Str(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Longest first, so that maximal munch falls out of a linear scan.
const PUNCTS: &[&str] = &[
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "+", "-", "*", "/", "%", "<", ">", "=", "!", "~",
    "&", "|", "^", "?", ":", ";", ",", ".", "(", ")", "[", "]", "{", "}",
];

pub struct Lexed {
    pub tokens: Vec<Token>,
    pub includes: Vec<String>,
}

/// Tokenize `source`, recording `#include` lines and expanding object-like
/// `#define`s in place.
pub fn lex(source: &str) -> Result<Lexed, SyntaxError> {
    let mut lx = Lexer { src: source.as_bytes(), pos: 0, line: 1, col: 1, at_line_start: true };
    let mut raw = Vec::new();
    let mut includes = Vec::new();
    let mut defines: HashMap<String, Vec<Token>> = HashMap::new();

    loop {
        lx.skip_trivia()?;
        if lx.at_end() {
            break;
        }
        if lx.at_line_start && lx.peek() == b'#' {
            let start = lx.here();
            let line = lx.take_line();
            handle_directive(&line, start, &mut includes, &mut defines)?;
            continue;
        }
        lx.at_line_start = false;
        raw.push(lx.next_token()?);
    }

    let mut tokens = Vec::with_capacity(raw.len() + 1);
    for t in raw {
        expand(t, &defines, &mut Vec::new(), &mut tokens);
    }
    let eof_span = tokens.last().map(|t: &Token| t.span).unwrap_or_default();
    tokens.push(Token { tok: Tok::Eof, span: eof_span });
    Ok(Lexed { tokens, includes })
}

fn expand(t: Token, defines: &HashMap<String, Vec<Token>>, active: &mut Vec<String>, out: &mut Vec<Token>) {
    if let Tok::Ident(name) = &t.tok {
        if let Some(body) = defines.get(name) {
            if !active.contains(name) {
                active.push(name.clone());
                for b in body {
                    let mut b = b.clone();
                    b.span = t.span;
                    expand(b, defines, active, out);
                }
                active.pop();
                return;
            }
        }
    }
    out.push(t);
}

fn handle_directive(
    line: &str,
    span: Span,
    includes: &mut Vec<String>,
    defines: &mut HashMap<String, Vec<Token>>,
) -> Result<(), SyntaxError> {
    let body = line.trim_start().trim_start_matches('#').trim_start();
    let (word, rest) = match body.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')) {
        Some(i) => (&body[..i], &body[i..]),
        None => (body, ""),
    };
    match word {
        "include" => {
            includes.push(line.trim().to_string());
            Ok(())
        }
        "define" => {
            let rest = rest.trim_start();
            let name_end = rest
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .unwrap_or(rest.len());
            let name = &rest[..name_end];
            if name.is_empty() || name.as_bytes()[0].is_ascii_digit() {
                return Err(SyntaxError::new("malformed #define", span));
            }
            let after = &rest[name_end..];
            if after.starts_with('(') {
                return Err(SyntaxError::new("function-like macros are not supported", span));
            }
            let lexed = lex(after).map_err(|e| SyntaxError::new(format!("in #define {name}: {}", e.message), span))?;
            if !lexed.includes.is_empty() {
                return Err(SyntaxError::new("malformed #define", span));
            }
            let mut toks = lexed.tokens;
            toks.pop(); // Eof
            defines.insert(name.to_string(), toks);
            Ok(())
        }
        other => Err(SyntaxError::new(format!("unsupported preprocessor directive `#{other}`"), span)),
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
    at_line_start: bool,
}

impl<'a> Lexer<'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> u8 {
        self.src.get(self.pos).copied().unwrap_or(0)
    }

    fn peek_at(&self, k: usize) -> u8 {
        self.src.get(self.pos + k).copied().unwrap_or(0)
    }

    fn here(&self) -> Span {
        Span::point(self.line, self.col)
    }

    fn bump(&mut self) -> u8 {
        let c = self.peek();
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
            self.at_line_start = true;
        } else {
            self.col += 1;
        }
        c
    }

    fn skip_trivia(&mut self) -> Result<(), SyntaxError> {
        loop {
            match self.peek() {
                b' ' | b'\t' | b'\r' | b'\n' | 0x0b | 0x0c if !self.at_end() => {
                    self.bump();
                }
                b'\\' if self.peek_at(1) == b'\n' => {
                    self.bump();
                    self.bump();
                }
                b'/' if self.peek_at(1) == b'/' => {
                    while !self.at_end() && self.peek() != b'\n' {
                        self.bump();
                    }
                }
                b'/' if self.peek_at(1) == b'*' => {
                    let start = self.here();
                    let keep = self.at_line_start;
                    self.bump();
                    self.bump();
                    loop {
                        if self.at_end() {
                            return Err(SyntaxError::new("unterminated comment", start));
                        }
                        if self.peek() == b'*' && self.peek_at(1) == b'/' {
                            self.bump();
                            self.bump();
                            break;
                        }
                        self.bump();
                    }
                    // a block comment does not end the line for directive purposes
                    if keep {
                        self.at_line_start = true;
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn take_line(&mut self) -> String {
        let mut out = Vec::new();
        while !self.at_end() && self.peek() != b'\n' {
            if self.peek() == b'\\' && self.peek_at(1) == b'\n' {
                self.bump();
                self.bump();
                out.push(b' ');
                continue;
            }
            if self.peek() == b'/' && self.peek_at(1) == b'/' {
                while !self.at_end() && self.peek() != b'\n' {
                    self.bump();
                }
                break;
            }
            out.push(self.bump());
        }
        String::from_utf8_lossy(&out).into_owned()
    }

    fn next_token(&mut self) -> Result<Token, SyntaxError> {
        let start = self.here();
        let c = self.peek();
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            let s = self.pos;
            while self.peek().is_ascii_alphanumeric() || self.peek() == b'_' {
                self.bump();
            }
            let text = std::str::from_utf8(&self.src[s..self.pos]).unwrap().to_string();
            // L"..." and L'x' prefixes are not supported
            Tok::Ident(text)
        } else if c.is_ascii_digit() || (c == b'.' && self.peek_at(1).is_ascii_digit()) {
            self.number(start)?
        } else if c == b'\'' {
            Tok::Char(self.quoted(b'\'', start)?)
        } else if c == b'"' {
            Tok::Str(self.quoted(b'"', start)?)
        } else {
            let rest = &self.src[self.pos..];
            let p = PUNCTS
                .iter()
                .find(|p| rest.starts_with(p.as_bytes()))
                .ok_or_else(|| SyntaxError::new(format!("unexpected character `{}`", c as char), start))?;
            for _ in 0..p.len() {
                self.bump();
            }
            Tok::Punct(p)
        };
        let end = Span::point(self.line, self.col);
        Ok(Token { tok, span: start.to(end) })
    }

    fn number(&mut self, start: Span) -> Result<Tok, SyntaxError> {
        let s = self.pos;
        let mut is_float = false;
        if self.peek() == b'0' && matches!(self.peek_at(1), b'x' | b'X') {
            self.bump();
            self.bump();
            while self.peek().is_ascii_hexdigit() {
                self.bump();
            }
        } else {
            while self.peek().is_ascii_digit() {
                self.bump();
            }
            if self.peek() == b'.' {
                is_float = true;
                self.bump();
                while self.peek().is_ascii_digit() {
                    self.bump();
                }
            }
            if matches!(self.peek(), b'e' | b'E')
                && (self.peek_at(1).is_ascii_digit()
                    || (matches!(self.peek_at(1), b'+' | b'-') && self.peek_at(2).is_ascii_digit()))
            {
                is_float = true;
                self.bump();
                if matches!(self.peek(), b'+' | b'-') {
                    self.bump();
                }
                while self.peek().is_ascii_digit() {
                    self.bump();
                }
            }
        }
        while self.peek().is_ascii_alphabetic() {
            self.bump();
        }
        let text = std::str::from_utf8(&self.src[s..self.pos]).unwrap();
        if is_float {
            canonical_float(text).map(Tok::Float).ok_or_else(|| SyntaxError::new(format!("bad number `{text}`"), start))
        } else {
            canonical_int(text).map(Tok::Int).ok_or_else(|| SyntaxError::new(format!("bad number `{text}`"), start))
        }
    }

    fn quoted(&mut self, q: u8, start: Span) -> Result<String, SyntaxError> {
        let s = self.pos;
        self.bump();
        loop {
            if self.at_end() || self.peek() == b'\n' {
                return Err(SyntaxError::new("unterminated literal", start));
            }
            let c = self.bump();
            if c == b'\\' {
                if self.at_end() {
                    return Err(SyntaxError::new("unterminated literal", start));
                }
                self.bump();
            } else if c == q {
                break;
            }
        }
        Ok(String::from_utf8_lossy(&self.src[s..self.pos]).into_owned())
    }
}

/// Integer literal in canonical spelling: decimal digits plus an upper-case
/// suffix (`U`, `L`, `LL`, `UL`, `ULL`).
pub fn canonical_int(text: &str) -> Option<String> {
    let hex = text.starts_with("0x") || text.starts_with("0X");
    let digits_end = if hex {
        2 + text[2..].find(|c: char| !c.is_ascii_hexdigit()).unwrap_or(text.len() - 2)
    } else {
        text.find(|c: char| !c.is_ascii_digit()).unwrap_or(text.len())
    };
    let (num, suffix) = text.split_at(digits_end);
    let value: u128 = if let Some(h) = num.strip_prefix("0x").or_else(|| num.strip_prefix("0X")) {
        u128::from_str_radix(h, 16).ok()?
    } else if num.len() > 1 && num.starts_with('0') {
        u128::from_str_radix(&num[1..], 8).ok()?
    } else {
        num.parse().ok()?
    };
    let up = suffix.to_ascii_uppercase();
    let unsigned = up.contains('U');
    let longs = up.matches('L').count();
    if up.len() != usize::from(unsigned) + longs || longs > 2 {
        return None;
    }
    let mut out = value.to_string();
    if unsigned {
        out.push('U');
    }
    for _ in 0..longs {
        out.push('L');
    }
    Some(out)
}

/// Floating literal in canonical spelling: shortest round-trip decimal with a
/// `.0` or exponent so it stays a floating constant, plus `f`/`L` suffix.
pub fn canonical_float(text: &str) -> Option<String> {
    let (num, suffix) = match text.chars().last()? {
        'f' | 'F' => (&text[..text.len() - 1], "f"),
        'l' | 'L' => (&text[..text.len() - 1], "L"),
        _ => (text, ""),
    };
    let v: f64 = num.parse().ok()?;
    let mut s = format!("{v:?}");
    if !(s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN")) {
        s.push_str(".0");
    }
    s.push_str(suffix);
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_ints() {
        assert_eq!(canonical_int("0x10").as_deref(), Some("16"));
        assert_eq!(canonical_int("16").as_deref(), Some("16"));
        assert_eq!(canonical_int("010").as_deref(), Some("8"));
        assert_eq!(canonical_int("1000000007ll").as_deref(), Some("1000000007LL"));
        assert_eq!(canonical_int("5uLL").as_deref(), Some("5ULL"));
        assert_eq!(canonical_int("0").as_deref(), Some("0"));
        assert_eq!(canonical_int("12q"), None);
    }

    #[test]
    fn canonical_floats() {
        assert_eq!(canonical_float("1e9").as_deref(), Some("1000000000.0"));
        assert_eq!(canonical_float("0.50").as_deref(), Some("0.5"));
        assert_eq!(canonical_float("2.f").as_deref(), Some("2.0f"));
        assert_eq!(canonical_float("1e20").as_deref(), Some("1e20"));
    }

    #[test]
    fn directives() {
        let l = lex("#include <stdio.h>\n#define N 10\nint a[N];").unwrap();
        assert_eq!(l.includes, vec!["#include <stdio.h>".to_string()]);
        let toks: Vec<_> = l.tokens.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(toks[3], Tok::Int("10".into()));
        assert!(lex("#ifdef X\n#endif\n").is_err());
        assert!(lex("#define F(x) x\n").is_err());
    }

    #[test]
    fn comments_and_maximal_munch() {
        let l = lex("a /* c */ +++ b // tail\n").unwrap();
        let toks: Vec<_> = l.tokens.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            toks,
            vec![
                Tok::Ident("a".into()),
                Tok::Punct("++"),
                Tok::Punct("+"),
                Tok::Ident("b".into()),
                Tok::Eof
            ]
        );
    }
}
