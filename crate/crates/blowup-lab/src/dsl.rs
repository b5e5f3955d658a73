//! The experiment-script language: abstract syntax, an LL(1) parser and a
//! canonical printer. The grammar is documented in `docs/dsl.md`.

use std::fmt::Write as _;

use blowup_core::charts::{BlowupSpec, TransformKind};
use blowup_core::family::{Order, Q};
use blowup_core::kangaroo::Role;
use blowup_core::text::{parse_expr, tokenize, Tok, TokenStream};
use blowup_core::{ParseError, Polynomial, Ring};

/// A parsed script: the ring, the initial ideal and the ordered statements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Script {
    pub ring: Ring,
    pub ideal: Vec<Polynomial>,
    pub body: Vec<Statement>,
}

/// A statement with the line it starts on.
///
/// Positions are diagnostics only: equality compares the statement content.
#[derive(Clone, Debug, Eq)]
pub struct Statement {
    pub line: usize,
    pub kind: StatementKind,
}

impl PartialEq for Statement {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StatementKind {
    Blowup {
        spec: BlowupSpec,
        kind: TransformKind,
    },
    /// `var ↦ var + c`, with `c` as written.
    Translate {
        var: usize,
        c: i64,
    },
    /// Override of flag level `level` (1-based).
    Hypersurface {
        level: usize,
        poly: Polynomial,
    },
    Flag(FlagSetting),
    /// Settle the flag now (`flag!`).
    FlagNow,
    /// Record a read-only diagnostic of the current state (`analyze!`).
    Analyze,
    Expect(Expectation),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlagSetting {
    Search,
    Inherit,
    /// Maximal number of levels; `None` descends until the dimension is exhausted.
    Depth(Option<usize>),
    Degree(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precondition {
    A,
    ARefined,
    B,
}

impl Precondition {
    pub fn name(&self) -> &'static str {
        match self {
            Precondition::A => "a",
            Precondition::ARefined => "a_refined",
            Precondition::B => "b",
        }
    }
}

/// An integer order that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Literal {
    Finite(u64),
    Infinite,
}

impl std::fmt::Display for Literal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Literal::Finite(n) => write!(f, "{n}"),
            Literal::Infinite => f.write_str("inf"),
        }
    }
}

/// `expect <key> = <value>;` — the key fixes the value's shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expectation {
    /// Order of the ideal at the origin.
    Order(u64),
    /// Literal order of `J_level` (level ≥ 1).
    LevelOrder {
        level: usize,
        value: Literal,
    },
    /// Normalized order `ρ_level`.
    Ratio {
        level: usize,
        value: Order,
    },
    /// Literal invariant vector.
    Invariant(Vec<Literal>),
    /// Normalized invariant vector.
    Ratios(Vec<Order>),
    /// The current ideal, generator by generator.
    Ideal(Vec<Polynomial>),
    /// Defining polynomial of flag level `level`.
    HypersurfaceIs {
        level: usize,
        poly: Polynomial,
    },
    /// Pivot variables of the flag, top level first; with `prefix` (a trailing
    /// `...`) only the leading levels are compared.
    Pivots {
        vars: Vec<usize>,
        prefix: bool,
    },
    /// Role of every flag level, top level first; `prefix` as for `Pivots`.
    Roles {
        roles: Vec<Role>,
        prefix: bool,
    },
    /// Ridge of the initial forms of every generator of `J_level`.
    Ridge {
        level: usize,
        basis: Vec<Polynomial>,
    },
    /// n-ridge of `J_level` (lowest literal generators).
    NRidge {
        level: usize,
        basis: Vec<Polynomial>,
    },
    /// Degree profile of the n-ridge of `J_level`.
    Profile {
        level: usize,
        degrees: Vec<u64>,
    },
    /// Live exceptional variables in birth order.
    Exceptionals(Vec<usize>),
    /// Phenomenon level of the last transition (`None`: no phenomenon).
    Kangaroo(Option<usize>),
    DivisorsLeft(u64),
    Precondition {
        which: Precondition,
        pass: bool,
    },
}

impl Expectation {
    /// The key as written in scripts, e.g. `order 2` or `precondition a_refined`.
    pub fn key(&self) -> String {
        match self {
            Expectation::Order(_) => "order".into(),
            Expectation::LevelOrder { level, .. } => format!("order {level}"),
            Expectation::Ratio { level, .. } => format!("ratio {level}"),
            Expectation::Invariant(_) => "invariant".into(),
            Expectation::Ratios(_) => "ratios".into(),
            Expectation::Ideal(_) => "ideal".into(),
            Expectation::HypersurfaceIs { level, .. } => format!("hypersurface {level}"),
            Expectation::Pivots { .. } => "pivots".into(),
            Expectation::Roles { .. } => "roles".into(),
            Expectation::Ridge { level, .. } => format!("ridge {level}"),
            Expectation::NRidge { level, .. } => format!("nridge {level}"),
            Expectation::Profile { level, .. } => format!("profile {level}"),
            Expectation::Exceptionals(_) => "exceptionals".into(),
            Expectation::Kangaroo(_) => "kangaroo".into(),
            Expectation::DivisorsLeft(_) => "divisors_left".into(),
            Expectation::Precondition { which, .. } => format!("precondition {}", which.name()),
        }
    }

    /// The expected value in script syntax.
    pub fn value_text(&self, ring: &Ring) -> String {
        let names = |vs: &[usize]| -> String {
            if vs.is_empty() {
                "none".into()
            } else {
                vs.iter()
                    .map(|&v| ring.var_name(v))
                    .collect::<Vec<_>>()
                    .join(", ")
            }
        };
        let basis = |b: &[Polynomial]| -> String {
            let items: Vec<String> = b.iter().map(|p| format!("\"{}\"", ring.show(p))).collect();
            format!("[{}]", items.join(","))
        };
        match self {
            Expectation::Order(n) | Expectation::DivisorsLeft(n) => n.to_string(),
            Expectation::LevelOrder { value, .. } => value.to_string(),
            Expectation::Ratio { value, .. } => value.to_string(),
            Expectation::Invariant(v) => format!("({})", join(v.iter().map(|l| l.to_string()))),
            Expectation::Ratios(v) => format!("({})", join(v.iter().map(|o| o.to_string()))),
            Expectation::Ideal(gens) => join(gens.iter().map(|g| ring.show(g))),
            Expectation::HypersurfaceIs { poly, .. } => ring.show(poly),
            Expectation::Exceptionals(vs) => names(vs),
            Expectation::Pivots { vars, prefix } => open_list(names(vars), *prefix),
            Expectation::Roles { roles, prefix } => {
                open_list(join(roles.iter().map(|r| r.to_string())), *prefix)
            }
            Expectation::Ridge { basis: b, .. } | Expectation::NRidge { basis: b, .. } => basis(b),
            Expectation::Profile { degrees, .. } => format!(
                "[{}]",
                degrees
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            Expectation::Kangaroo(None) => "none".into(),
            Expectation::Kangaroo(Some(l)) => l.to_string(),
            Expectation::Precondition { pass, .. } => if *pass { "pass" } else { "fail" }.into(),
        }
    }

    /// Whether checking this expectation needs the current flag.
    pub fn needs_flag(&self) -> bool {
        !matches!(
            self,
            Expectation::Order(_) | Expectation::Ideal(_) | Expectation::Exceptionals(_)
        )
    }
}

fn join<I: Iterator<Item = String>>(items: I) -> String {
    items.collect::<Vec<_>>().join(", ")
}

impl Script {
    /// Statements other than expectations.
    pub fn operations(&self) -> impl Iterator<Item = &Statement> {
        self.body
            .iter()
            .filter(|s| !matches!(s.kind, StatementKind::Expect(_)))
    }

    /// All statements, counting the ring and ideal declarations.
    pub fn statement_count(&self) -> usize {
        self.body.len() + 2
    }

    /// Canonical text; parsing it again yields an equal script.
    pub fn to_text(&self) -> String {
        let ring = &self.ring;
        let mut out = String::new();
        let _ = writeln!(out, "ring {} {};", ring.p(), ring.names.join(","));
        let _ = writeln!(
            out,
            "ideal {};",
            join(self.ideal.iter().map(|g| ring.show(g)))
        );
        for s in &self.body {
            out.push_str(&statement_text(&s.kind, ring));
            out.push('\n');
        }
        out
    }
}

/// One statement in canonical syntax, including the terminating `;`.
pub fn statement_text(kind: &StatementKind, ring: &Ring) -> String {
    match kind {
        StatementKind::Blowup { spec, kind } => {
            let center: Vec<&str> = spec.center.iter().map(|&i| ring.var_name(i)).collect();
            let mut s = format!(
                "blowup ({}) chart {}",
                center.join(","),
                ring.var_name(spec.chart)
            );
            if *kind != TransformKind::Weak {
                let _ = write!(s, " {kind}");
            }
            s.push(';');
            s
        }
        StatementKind::Translate { var, c } => format!("translate {} {c};", ring.var_name(*var)),
        StatementKind::Hypersurface { level, poly } => {
            format!("hypersurface {level} {};", ring.show(poly))
        }
        StatementKind::Flag(FlagSetting::Search) => "flag search;".into(),
        StatementKind::Flag(FlagSetting::Inherit) => "flag inherit;".into(),
        StatementKind::Flag(FlagSetting::Depth(None)) => "flag depth all;".into(),
        StatementKind::Flag(FlagSetting::Depth(Some(d))) => format!("flag depth {d};"),
        StatementKind::Flag(FlagSetting::Degree(d)) => format!("flag degree {d};"),
        StatementKind::FlagNow => "flag!;".into(),
        StatementKind::Analyze => "analyze!;".into(),
        StatementKind::Expect(e) => format!("expect {} = {};", e.key(), e.value_text(ring)),
    }
}

/// Parses a complete script; the first error is reported with its position.
pub fn parse_script(text: &str) -> Result<Script, ParseError> {
    let tokens = tokenize(text)?;
    let mut s = TokenStream::new(&tokens);
    let ring = parse_ring(&mut s)?;
    keyword(&mut s, "ideal")?;
    let ideal = poly_list(&mut s, &ring)?;
    s.expect(Tok::Semi)?;
    let mut body = Vec::new();
    while *s.peek() != Tok::Eof {
        let line = s.peek_token().line;
        let kind = parse_statement(&mut s, &ring)?;
        body.push(Statement { line, kind });
    }
    Ok(Script { ring, ideal, body })
}

fn parse_ring(s: &mut TokenStream<'_>) -> Result<Ring, ParseError> {
    keyword(s, "ring")?;
    let at = s.peek_token().clone();
    let p = integer(s)?;
    let mut names = vec![ident(s)?];
    while s.eat(&Tok::Comma) {
        names.push(ident(s)?);
    }
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(s.error_at(&at, format!("variable `{n}` declared twice")));
        }
    }
    let ring = Ring::from_names(p, names).map_err(|e| s.error_at(&at, e.to_string()))?;
    s.expect(Tok::Semi)?;
    Ok(ring)
}

fn parse_statement(s: &mut TokenStream<'_>, ring: &Ring) -> Result<StatementKind, ParseError> {
    let head = s.peek_token().clone();
    let word = match &head.tok {
        Tok::Ident(w) => w.clone(),
        other => return Err(s.error(format!("expected a statement, found {}", other.describe()))),
    };
    s.advance();
    let kind = match word.as_str() {
        "blowup" => {
            s.expect(Tok::LParen)?;
            let mut center = vec![variable(s, ring)?];
            while s.eat(&Tok::Comma) {
                center.push(variable(s, ring)?);
            }
            s.expect(Tok::RParen)?;
            keyword(s, "chart")?;
            let chart = variable(s, ring)?;
            let kind = match s.peek().clone() {
                Tok::Ident(w) if w == "total" => {
                    s.advance();
                    TransformKind::Total
                }
                Tok::Ident(w) if w == "weak" => {
                    s.advance();
                    TransformKind::Weak
                }
                Tok::Ident(w) if w == "strict" => {
                    s.advance();
                    TransformKind::Strict
                }
                Tok::Ident(w) if w == "controlled" => {
                    s.advance();
                    TransformKind::Controlled(integer(s)?)
                }
                _ => TransformKind::Weak,
            };
            let spec =
                BlowupSpec::new(center, chart).map_err(|e| s.error_at(&head, e.to_string()))?;
            StatementKind::Blowup { spec, kind }
        }
        "translate" => {
            let var = variable(s, ring)?;
            let negative = s.eat(&Tok::Minus);
            let c = integer(s)? as i64;
            StatementKind::Translate {
                var,
                c: if negative { -c } else { c },
            }
        }
        "hypersurface" => {
            let level = level_index(s, 1)?;
            let poly = parse_expr(s, ring)?;
            StatementKind::Hypersurface { level, poly }
        }
        "flag" => {
            if s.eat(&Tok::Bang) {
                StatementKind::FlagNow
            } else {
                let at = s.peek_token().clone();
                let setting = match ident(s)?.as_str() {
                    "search" => FlagSetting::Search,
                    "inherit" => FlagSetting::Inherit,
                    "depth" => {
                        if matches!(s.peek(), Tok::Ident(w) if w == "all") {
                            s.advance();
                            FlagSetting::Depth(None)
                        } else {
                            FlagSetting::Depth(Some(level_index(s, 1)?))
                        }
                    }
                    "degree" => FlagSetting::Degree(integer(s)?),
                    other => {
                        return Err(s.error_at(
                            &at,
                            format!("unknown flag setting `{other}` (expected !, search, inherit, depth or degree)"),
                        ))
                    }
                };
                StatementKind::Flag(setting)
            }
        }
        "analyze" => {
            s.expect(Tok::Bang)?;
            StatementKind::Analyze
        }
        "expect" => StatementKind::Expect(parse_expectation(s, ring)?),
        other => return Err(s.error_at(&head, format!("unknown statement `{other}`"))),
    };
    s.expect(Tok::Semi)?;
    Ok(kind)
}

fn parse_expectation(s: &mut TokenStream<'_>, ring: &Ring) -> Result<Expectation, ParseError> {
    let at = s.peek_token().clone();
    let key = ident(s)?;
    let e = match key.as_str() {
        "order" => {
            if matches!(s.peek(), Tok::Int(_)) {
                let level = level_index(s, 1)?;
                equals(s)?;
                Expectation::LevelOrder {
                    level,
                    value: literal(s)?,
                }
            } else {
                equals(s)?;
                Expectation::Order(integer(s)?)
            }
        }
        "ratio" => {
            let level = level_index(s, 0)?;
            equals(s)?;
            Expectation::Ratio {
                level,
                value: rational(s)?,
            }
        }
        "invariant" => {
            equals(s)?;
            Expectation::Invariant(tuple(s, literal)?)
        }
        "ratios" => {
            equals(s)?;
            Expectation::Ratios(tuple(s, rational)?)
        }
        "ideal" => {
            equals(s)?;
            Expectation::Ideal(poly_list(s, ring)?)
        }
        "hypersurface" => {
            let level = level_index(s, 1)?;
            equals(s)?;
            Expectation::HypersurfaceIs {
                level,
                poly: parse_expr(s, ring)?,
            }
        }
        "pivots" => {
            equals(s)?;
            let vars = variable_list(s, ring)?;
            let prefix = !vars.is_empty() && trailing_ellipsis(s);
            Expectation::Pivots { vars, prefix }
        }
        "exceptionals" => {
            equals(s)?;
            Expectation::Exceptionals(variable_list(s, ring)?)
        }
        "roles" => {
            equals(s)?;
            let mut roles = vec![role(s)?];
            let mut prefix = false;
            while s.eat(&Tok::Comma) {
                if s.eat(&Tok::Ellipsis) {
                    prefix = true;
                    break;
                }
                roles.push(role(s)?);
            }
            Expectation::Roles { roles, prefix }
        }
        "ridge" | "nridge" => {
            let level = level_index(s, 0)?;
            equals(s)?;
            let basis = string_polys(s, ring)?;
            if key == "ridge" {
                Expectation::Ridge { level, basis }
            } else {
                Expectation::NRidge { level, basis }
            }
        }
        "profile" => {
            let level = level_index(s, 0)?;
            equals(s)?;
            s.expect(Tok::LBracket)?;
            let mut degrees = Vec::new();
            if !s.eat(&Tok::RBracket) {
                degrees.push(integer(s)?);
                while s.eat(&Tok::Comma) {
                    degrees.push(integer(s)?);
                }
                s.expect(Tok::RBracket)?;
            }
            Expectation::Profile { level, degrees }
        }
        "kangaroo" => {
            equals(s)?;
            if matches!(s.peek(), Tok::Ident(w) if w == "none") {
                s.advance();
                Expectation::Kangaroo(None)
            } else {
                Expectation::Kangaroo(Some(level_index(s, 1)?))
            }
        }
        "divisors_left" => {
            equals(s)?;
            Expectation::DivisorsLeft(integer(s)?)
        }
        "precondition" => {
            let at = s.peek_token().clone();
            let which = match ident(s)?.as_str() {
                "a" => Precondition::A,
                "a_refined" => Precondition::ARefined,
                "b" => Precondition::B,
                other => {
                    return Err(s.error_at(
                        &at,
                        format!("unknown precondition `{other}` (expected a, a_refined or b)"),
                    ))
                }
            };
            equals(s)?;
            let at = s.peek_token().clone();
            let pass = match ident(s)?.as_str() {
                "pass" => true,
                "fail" => false,
                other => {
                    return Err(s.error_at(&at, format!("expected pass or fail, found `{other}`")))
                }
            };
            Expectation::Precondition { which, pass }
        }
        other => return Err(s.error_at(&at, format!("unknown expectation key `{other}`"))),
    };
    Ok(e)
}

fn keyword(s: &mut TokenStream<'_>, word: &str) -> Result<(), ParseError> {
    match s.peek() {
        Tok::Ident(w) if w == word => {
            s.advance();
            Ok(())
        }
        other => Err(s.error(format!("expected `{word}`, found {}", other.describe()))),
    }
}

fn equals(s: &mut TokenStream<'_>) -> Result<(), ParseError> {
    s.expect(Tok::Equals)
}

fn ident(s: &mut TokenStream<'_>) -> Result<String, ParseError> {
    match s.peek().clone() {
        Tok::Ident(w) => {
            s.advance();
            Ok(w)
        }
        other => Err(s.error(format!(
            "expected an identifier, found {}",
            other.describe()
        ))),
    }
}

fn integer(s: &mut TokenStream<'_>) -> Result<u64, ParseError> {
    match *s.peek() {
        Tok::Int(n) => {
            s.advance();
            Ok(n)
        }
        ref other => Err(s.error(format!("expected an integer, found {}", other.describe()))),
    }
}

fn level_index(s: &mut TokenStream<'_>, min: usize) -> Result<usize, ParseError> {
    let at = s.peek_token().clone();
    let n = integer(s)? as usize;
    if n < min {
        return Err(s.error_at(&at, format!("level must be at least {min}")));
    }
    Ok(n)
}

fn variable(s: &mut TokenStream<'_>, ring: &Ring) -> Result<usize, ParseError> {
    let at = s.peek_token().clone();
    let name = ident(s)?;
    ring.var_index(&name)
        .ok_or_else(|| s.error_at(&at, format!("unknown variable `{name}`")))
}

/// Consumes `, ...` after a list.
fn trailing_ellipsis(s: &mut TokenStream<'_>) -> bool {
    s.eat(&Tok::Ellipsis)
}

fn open_list(text: String, prefix: bool) -> String {
    if prefix {
        format!("{text}, ...")
    } else {
        text
    }
}

fn variable_list(s: &mut TokenStream<'_>, ring: &Ring) -> Result<Vec<usize>, ParseError> {
    if matches!(s.peek(), Tok::Ident(w) if w == "none") {
        s.advance();
        return Ok(Vec::new());
    }
    let mut out = vec![variable(s, ring)?];
    while s.eat(&Tok::Comma) {
        if matches!(s.peek(), Tok::Ellipsis) {
            break;
        }
        out.push(variable(s, ring)?);
    }
    Ok(out)
}

fn poly_list(s: &mut TokenStream<'_>, ring: &Ring) -> Result<Vec<Polynomial>, ParseError> {
    let mut out = vec![parse_expr(s, ring)?];
    while s.eat(&Tok::Comma) {
        out.push(parse_expr(s, ring)?);
    }
    Ok(out)
}

/// `["z^3","w^3"]`, the serialized form of a ridge basis.
fn string_polys(s: &mut TokenStream<'_>, ring: &Ring) -> Result<Vec<Polynomial>, ParseError> {
    s.expect(Tok::LBracket)?;
    let mut out = Vec::new();
    if s.eat(&Tok::RBracket) {
        return Ok(out);
    }
    loop {
        let at = s.peek_token().clone();
        match s.peek().clone() {
            Tok::Str(text) => {
                s.advance();
                let p = ring
                    .parse(&text)
                    .map_err(|e| s.error_at(&at, format!("in string {text:?}: {}", e.message)))?;
                out.push(p);
            }
            other => {
                return Err(s.error(format!(
                    "expected a quoted polynomial, found {}",
                    other.describe()
                )))
            }
        }
        if !s.eat(&Tok::Comma) {
            break;
        }
    }
    s.expect(Tok::RBracket)?;
    Ok(out)
}

fn literal(s: &mut TokenStream<'_>) -> Result<Literal, ParseError> {
    if matches!(s.peek(), Tok::Ident(w) if w == "inf") {
        s.advance();
        return Ok(Literal::Infinite);
    }
    Ok(Literal::Finite(integer(s)?))
}

fn rational(s: &mut TokenStream<'_>) -> Result<Order, ParseError> {
    if matches!(s.peek(), Tok::Ident(w) if w == "inf") {
        s.advance();
        return Ok(Order::Infinite);
    }
    let at = s.peek_token().clone();
    let n = integer(s)? as i64;
    let d = if s.eat(&Tok::Slash) {
        integer(s)? as i64
    } else {
        1
    };
    if d == 0 {
        return Err(s.error_at(&at, "zero denominator".into()));
    }
    Ok(Order::Finite(Q::new(n, d)))
}

fn tuple<T>(
    s: &mut TokenStream<'_>,
    item: fn(&mut TokenStream<'_>) -> Result<T, ParseError>,
) -> Result<Vec<T>, ParseError> {
    s.expect(Tok::LParen)?;
    let mut out = vec![item(s)?];
    while s.eat(&Tok::Comma) {
        out.push(item(s)?);
    }
    s.expect(Tok::RParen)?;
    Ok(out)
}

fn role(s: &mut TokenStream<'_>) -> Result<Role, ParseError> {
    let at = s.peek_token().clone();
    match ident(s)?.as_str() {
        "neutral" => Ok(Role::Neutral),
        "active" => Ok(Role::Active),
        "dormant" => Ok(Role::Dormant),
        "unclassified" => Ok(Role::Unclassified),
        other => Err(s.error_at(&at, format!("unknown role `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_statement_script() {
        let s = parse_script("ring 3 x,y,z,w; ideal x^3+z^13-z*w^18; blowup (x,y,z,w) chart w;")
            .unwrap();
        assert_eq!(s.statement_count(), 3);
        assert_eq!(s.ring.p(), 3);
        match &s.body[0].kind {
            StatementKind::Blowup { spec, kind } => {
                assert_eq!(spec.center, vec![0, 1, 2, 3]);
                assert_eq!(spec.chart, 3);
                assert_eq!(*kind, TransformKind::Weak);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_prime_characteristic() {
        let e = parse_script("ring 4 x;").unwrap_err();
        assert_eq!(e.message, "4 is not prime");
        assert_eq!((e.line, e.column), (1, 6));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_script("ring 3 x,y;\nideal x^2+q;").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("q"), "{}", e.message);
        let e = parse_script("ring 3 x,y;\nideal x^2;\nblowup (x,t) chart x;").unwrap_err();
        assert_eq!((e.line, e.message.as_str()), (3, "unknown variable `t`"));
        let e = parse_script("ring 3 x,y;\nideal x^2;\nblowup (x) chart x;").unwrap_err();
        assert!(e.message.contains("at least two"), "{}", e.message);
        let e = parse_script("ring 3 x,y;\nideal x^2;\nblowup (x,y) chart x").unwrap_err();
        assert!(e.message.contains("expected `;`"), "{}", e.message);
        let e = parse_script("ring 3 x,y; ideal (x+;").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn comments_and_whitespace() {
        let s = parse_script("# header\nring 2 x , y ;# trailing\n ideal x^2 + y^3 ;\n\n flag ! ;")
            .unwrap();
        assert_eq!(s.body.len(), 1);
        assert_eq!(s.body[0].kind, StatementKind::FlagNow);
    }

    #[test]
    fn expectations_round_trip() {
        let text = "ring 3 x,y,z,w;\nideal x^3+z^14*w^10*(z^6-w^6);\n\
            translate z -1;\nhypersurface 1 x+z^2*w^9;\nflag inherit;\nflag depth all;\nflag depth 2;\nflag degree 30;\n\
            flag!;\nanalyze!;\n\
            expect order = 3;\nexpect order 1 = 12;\nexpect order 2 = inf;\nexpect ratio 1 = 4/3;\n\
            expect invariant = (3, 12);\nexpect ratios = (3, 2, inf);\nexpect ideal = x^3, z*w;\n\
            expect hypersurface 1 = x+z*w^9;\nexpect pivots = x, w;\nexpect exceptionals = none;\n\
            expect roles = active, neutral;\nexpect ridge 1 = [\"z^3\",\"w^3\"];\nexpect nridge 0 = [];\n\
            expect profile 1 = [3,3];\nexpect kangaroo = none;\nexpect kangaroo = 2;\nexpect divisors_left = 1;\n\
            expect precondition a_refined = fail;\nblowup (x,z,w) chart w controlled 3;\n";
        let s = parse_script(text).unwrap();
        let printed = s.to_text();
        let again = parse_script(&printed).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.to_text(), printed);
        assert_eq!(s.operations().count(), 9);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = parse_script("ring 3 x,y; ideal x^3; expect colour = 3;").unwrap_err();
        assert!(e.message.contains("colour"));
        let e = parse_script("ring 3 x,y; ideal x^3; expect roles = busy;").unwrap_err();
        assert!(e.message.contains("busy"));
    }
}
