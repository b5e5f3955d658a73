//! Polynomial text syntax: a small lexer shared with the script language and
//! a recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr   := sign? term (('+' | '-') term)*
//! term   := factor ('*'? factor)*
//! factor := atom ('^' integer)?
//! atom   := integer | variable | '(' expr ')'
//! ```
//!
//! An identifier that is not a declared variable is split greedily into
//! declared variable names, so `zw^18` reads as `z*w^18`.

use crate::error::{CoreError, ParseError};
use crate::field::FieldSpec;
use crate::gfpoly::{Polynomial, MAX_VARS};

/// Field plus variable names: the context every polynomial of a chart lives in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    pub field: FieldSpec,
    pub names: Vec<String>,
}

impl Ring {
    pub fn new(p: u64, names: &[&str]) -> Result<Self, CoreError> {
        Self::from_names(p, names.iter().map(|s| s.to_string()).collect())
    }

    pub fn from_names(p: u64, names: Vec<String>) -> Result<Self, CoreError> {
        let field = FieldSpec::new(p)?;
        if names.len() > MAX_VARS {
            return Err(CoreError::TooManyVariables {
                max: MAX_VARS,
                got: names.len(),
            });
        }
        Ok(Ring { field, names })
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn var(&self, i: usize) -> Polynomial {
        Polynomial::var(self.field, self.nvars(), i)
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero(self.field, self.nvars())
    }

    pub fn one(&self) -> Polynomial {
        Polynomial::one(self.field, self.nvars())
    }

    pub fn constant(&self, c: i64) -> Polynomial {
        Polynomial::constant(self.field, self.nvars(), c)
    }

    /// Parses a polynomial; the whole input must be consumed.
    pub fn parse(&self, text: &str) -> Result<Polynomial, ParseError> {
        let tokens = tokenize(text)?;
        let mut stream = TokenStream::new(&tokens);
        let p = parse_expr(&mut stream, self)?;
        match stream.peek() {
            Tok::Eof => Ok(p),
            other => Err(stream.error(format!("unexpected {} after polynomial", other.describe()))),
        }
    }

    /// Parses, panicking on malformed input; for literals in tests and fixtures.
    pub fn poly(&self, text: &str) -> Polynomial {
        self.parse(text)
            .unwrap_or_else(|e| panic!("bad polynomial {text:?}: {e}"))
    }

    pub fn show(&self, p: &Polynomial) -> String {
        p.to_text(&self.names)
    }

    pub fn var_name(&self, i: usize) -> &str {
        &self.names[i]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u64),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
    Semi,
    Bang,
    Colon,
    Equals,
    LBracket,
    RBracket,
    Slash,
    Ellipsis,
    Str(String),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Caret => "^",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Bang => "!",
            Tok::Colon => ":",
            Tok::Equals => "=",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Slash => "/",
            Tok::Ellipsis => "...",
            _ => "?",
        }
    }
}

/// A token with its 1-based source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

/// Splits text into tokens; `#` starts a comment running to the end of the line.
pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let ch = chars.next().unwrap();
            if ch == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            ch
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&d) = chars.peek() {
                if d == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                s.push(bump(&mut chars));
            }
            let n = s.parse::<u64>().map_err(|_| ParseError {
                line: tl,
                column: tc,
                message: format!("integer `{s}` is too large"),
            })?;
            Tok::Int(n)
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if !(d.is_alphanumeric() || d == '_') {
                    break;
                }
                s.push(bump(&mut chars));
            }
            Tok::Ident(s)
        } else if c == '"' {
            bump(&mut chars);
            let mut s = String::new();
            loop {
                match chars.peek() {
                    None | Some('\n') => {
                        return Err(ParseError {
                            line: tl,
                            column: tc,
                            message: "unterminated string".into(),
                        })
                    }
                    Some('"') => {
                        bump(&mut chars);
                        break;
                    }
                    Some(_) => s.push(bump(&mut chars)),
                }
            }
            Tok::Str(s)
        } else if c == '.' {
            for _ in 0..3 {
                if chars.peek() != Some(&'.') {
                    return Err(ParseError {
                        line: tl,
                        column: tc,
                        message: "expected `...`".into(),
                    });
                }
                bump(&mut chars);
            }
            Tok::Ellipsis
        } else {
            let t = match c {
                '+' => Tok::Plus,
                '-' | '\u{2212}' => Tok::Minus,
                '*' | '\u{b7}' => Tok::Star,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                '!' => Tok::Bang,
                ':' => Tok::Colon,
                '=' => Tok::Equals,
                '[' => Tok::LBracket,
                '/' => Tok::Slash,
                ']' => Tok::RBracket,
                other => {
                    return Err(ParseError {
                        line: tl,
                        column: tc,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            };
            bump(&mut chars);
            t
        };
        out.push(Token {
            tok,
            line: tl,
            column: tc,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

/// Cursor over a token slice (always terminated by `Eof`).
pub struct TokenStream<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> TokenStream<'a> {
    pub fn new(tokens: &'a [Token]) -> Self {
        assert!(matches!(tokens.last(), Some(Token { tok: Tok::Eof, .. })));
        TokenStream { tokens, pos: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    pub fn peek_token(&self) -> &Token {
        &self.tokens[self.pos]
    }

    pub fn advance(&mut self) -> &Token {
        let t = &self.tokens[self.pos];
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, message: String) -> ParseError {
        let t = self.peek_token();
        ParseError {
            line: t.line,
            column: t.column,
            message,
        }
    }

    pub fn error_at(&self, t: &Token, message: String) -> ParseError {
        ParseError {
            line: t.line,
            column: t.column,
            message,
        }
    }

    pub fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.advance();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    pub fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == want {
            self.advance();
            true
        } else {
            false
        }
    }
}

pub fn parse_expr(s: &mut TokenStream<'_>, ring: &Ring) -> Result<Polynomial, ParseError> {
    let mut negate = false;
    if s.eat(&Tok::Minus) {
        negate = true;
    } else {
        s.eat(&Tok::Plus);
    }
    let mut acc = parse_term(s, ring)?;
    if negate {
        acc = -&acc;
    }
    loop {
        match s.peek() {
            Tok::Plus => {
                s.advance();
                acc = &acc + &parse_term(s, ring)?;
            }
            Tok::Minus => {
                s.advance();
                acc = &acc - &parse_term(s, ring)?;
            }
            _ => return Ok(acc),
        }
    }
}

fn starts_factor(t: &Tok) -> bool {
    matches!(t, Tok::Ident(_) | Tok::Int(_) | Tok::LParen)
}

fn parse_term(s: &mut TokenStream<'_>, ring: &Ring) -> Result<Polynomial, ParseError> {
    let mut acc = parse_factor(s, ring)?;
    loop {
        // An explicit `*`, or juxtaposition.
        if s.eat(&Tok::Star) || starts_factor(s.peek()) {
            acc = &acc * &parse_factor(s, ring)?;
        } else {
            return Ok(acc);
        }
    }
}

fn parse_factor(s: &mut TokenStream<'_>, ring: &Ring) -> Result<Polynomial, ParseError> {
    let (prefix, base) = parse_atom(s, ring)?;
    if s.eat(&Tok::Caret) {
        let t = s.advance().clone();
        match t.tok.clone() {
            Tok::Int(e) => Ok(&prefix * &base.pow(e)),
            other => Err(s.error_at(&t, format!("expected exponent, found {}", other.describe()))),
        }
    } else {
        Ok(&prefix * &base)
    }
}

/// Returns `(prefix, base)` so that an exponent binds only to `base`
/// (the last variable of a split identifier).
fn parse_atom(
    s: &mut TokenStream<'_>,
    ring: &Ring,
) -> Result<(Polynomial, Polynomial), ParseError> {
    let t = s.advance().clone();
    match t.tok.clone() {
        Tok::Int(n) => Ok((
            ring.one(),
            Polynomial::constant(ring.field, ring.nvars(), (n % ring.p()) as i64),
        )),
        Tok::Ident(name) => {
            let vars = split_identifier(&name, ring)
                .ok_or_else(|| s.error_at(&t, format!("unknown variable `{name}`")))?;
            let (last, init) = vars.split_last().unwrap();
            let mut prefix = ring.one();
            for &v in init {
                prefix = &prefix * &ring.var(v);
            }
            Ok((prefix, ring.var(*last)))
        }
        Tok::LParen => {
            let e = parse_expr(s, ring)?;
            s.expect(Tok::RParen)?;
            Ok((ring.one(), e))
        }
        other => Err(s.error_at(
            &t,
            format!("expected a polynomial, found {}", other.describe()),
        )),
    }
}

/// Splits an identifier into declared variable names (exact match first, then greedy longest prefix).
pub fn split_identifier(name: &str, ring: &Ring) -> Option<Vec<usize>> {
    if let Some(i) = ring.var_index(name) {
        return Some(vec![i]);
    }
    let mut out = Vec::new();
    let mut rest = name;
    while !rest.is_empty() {
        let (i, len) = ring
            .names
            .iter()
            .enumerate()
            .filter(|(_, n)| rest.starts_with(n.as_str()))
            .map(|(i, n)| (i, n.len()))
            .max_by_key(|&(_, len)| len)?;
        out.push(i);
        rest = &rest[len..];
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints_canonically() {
        let r = Ring::new(3, &["x", "y", "z", "w"]).unwrap();
        let p = r.poly("x^3 + z^13 - z*w^18");
        assert_eq!(r.show(&p), "x^3+z^13-z*w^18");
        assert_eq!(r.poly("zw^18"), r.poly("z*w^18"));
        assert_eq!(r.poly("2 x y"), r.poly("-x*y"));
        assert_eq!(r.poly("(z^6-w^6)^2"), r.poly("z^12+z^6w^6+w^12"));
    }

    #[test]
    fn reports_positions() {
        let r = Ring::new(3, &["x", "y"]).unwrap();
        let e = r.parse("x + \n  q^2").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(e.message.contains("unknown variable"));
        let e = r.parse("x^").unwrap_err();
        assert!(e.message.contains("exponent"));
    }

    #[test]
    fn comments_are_skipped() {
        let t = tokenize("x # comment\n+ y").unwrap();
        assert_eq!(t.len(), 4);
    }
}
