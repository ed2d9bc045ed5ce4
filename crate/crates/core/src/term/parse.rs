//! Recursive-descent parser for the term grammar.
//!
//! ```text
//! term  := number
//!        | "E" "(" var "," var ")" | "eq" "(" var "," var ")"
//!        | name [ "[" params "]" ] "(" term { "," term } ")"
//!        | ("sum" | "max" | "min" | "mean") var "." term
//!        | "lmean" var "~" var "." term
//! ```

use super::{AggKind, Term};
use crate::connective::Registry;
use crate::error::{Error, Result};

const KEYWORDS: [&str; 7] = ["sum", "max", "min", "mean", "lmean", "E", "eq"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Params(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Tilde,
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let advance = |i: &mut usize, col: &mut usize, k: usize| {
            *i += k;
            *col += k;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(&mut i, &mut col, 1);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '~' => Some(Tok::Tilde),
            '.' if !chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, line: l0, col: c0 });
            advance(&mut i, &mut col, 1);
            continue;
        }
        if c == '[' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j] != ']' {
                if chars[j] == '\n' || chars[j] == '[' {
                    return Err(err(l0, c0, "unterminated or nested parameter bracket"));
                }
                j += 1;
            }
            if j == chars.len() {
                return Err(err(l0, c0, "unterminated parameter bracket"));
            }
            let body: String = chars[start..j].iter().collect();
            out.push(Spanned { tok: Tok::Params(body), line: l0, col: c0 });
            let k = j + 1 - i;
            advance(&mut i, &mut col, k);
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                j += 1;
            }
            if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                let mut k = j + 1;
                if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    j = k;
                }
            }
            let s: String = chars[start..j].iter().collect();
            let v: f64 = s.parse().map_err(|_| err(l0, c0, format!("bad number {s:?}")))?;
            if !v.is_finite() {
                return Err(err(l0, c0, format!("constant {s} is not finite")));
            }
            out.push(Spanned { tok: Tok::Num(v), line: l0, col: c0 });
            advance(&mut i, &mut col, j - start);
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                j += 1;
            }
            out.push(Spanned {
                tok: Tok::Ident(chars[start..j].iter().collect()),
                line: l0,
                col: c0,
            });
            advance(&mut i, &mut col, j - start);
            continue;
        }
        if c == '-' {
            return Err(err(l0, c0, "constants must be nonnegative"));
        }
        return Err(err(l0, c0, format!("unexpected character {c:?}")));
    }
    out.push(Spanned { tok: Tok::End, line, col });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    registry: &'a Registry,
    scope: Vec<String>,
    binders: Vec<(String, usize, usize)>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Spanned> {
        let t = self.next();
        if t.tok == want {
            Ok(t)
        } else {
            Err(err(t.line, t.col, format!("expected {what}, found {}", describe(&t.tok))))
        }
    }

    fn var(&mut self) -> Result<(String, usize, usize)> {
        let t = self.next();
        match t.tok {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => Ok((name, t.line, t.col)),
            Tok::Ident(name) => Err(err(t.line, t.col, format!("keyword {name:?} cannot be a variable"))),
            other => Err(err(t.line, t.col, format!("expected a variable, found {}", describe(&other)))),
        }
    }

    fn bind(&mut self, v: &str, line: usize, col: usize) -> Result<()> {
        if self.scope.iter().any(|s| s == v) {
            return Err(err(line, col, format!("variable {v:?} shadows an enclosing binder")));
        }
        self.scope.push(v.to_string());
        self.binders.push((v.to_string(), line, col));
        Ok(())
    }

    fn term(&mut self) -> Result<Term> {
        let t = self.next();
        match t.tok {
            Tok::Num(v) => Ok(Term::Const(v)),
            Tok::Ident(name) => match name.as_str() {
                "E" | "eq" => {
                    self.expect(Tok::LParen, "'('")?;
                    let (x, _, _) = self.var()?;
                    self.expect(Tok::Comma, "','")?;
                    let (y, _, _) = self.var()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(if name == "E" { Term::Edge(x, y) } else { Term::Eq(x, y) })
                }
                "sum" | "max" | "min" | "mean" => {
                    let kind = match name.as_str() {
                        "sum" => AggKind::Sum,
                        "max" => AggKind::Max,
                        "min" => AggKind::Min,
                        _ => AggKind::Mean,
                    };
                    let (v, l, c) = self.var()?;
                    self.expect(Tok::Dot, "'.' after the bound variable")?;
                    self.bind(&v, l, c)?;
                    let body = self.term()?;
                    self.scope.pop();
                    Ok(Term::Agg(kind, v, Box::new(body)))
                }
                "lmean" => {
                    let (anchor, _, _) = self.var()?;
                    self.expect(Tok::Tilde, "'~' between anchor and bound variable")?;
                    let (v, l, c) = self.var()?;
                    if v == anchor {
                        return Err(err(l, c, "lmean bound variable must differ from its anchor"));
                    }
                    self.expect(Tok::Dot, "'.' after the bound variable")?;
                    self.bind(&v, l, c)?;
                    let body = self.term()?;
                    self.scope.pop();
                    Ok(Term::LMean {
                        anchor,
                        bound: v,
                        body: Box::new(body),
                    })
                }
                _ => self.application(name, t.line, t.col),
            },
            other => Err(err(t.line, t.col, format!("expected a term, found {}", describe(&other)))),
        }
    }

    fn application(&mut self, name: String, line: usize, col: usize) -> Result<Term> {
        let params = match &self.peek().tok {
            Tok::Params(p) => {
                let p = p.clone();
                self.next();
                Some(p)
            }
            _ => None,
        };
        if self.peek().tok != Tok::LParen {
            let t = self.peek();
            let msg = if params.is_none() && !self.registry.contains(&name) {
                format!("{name:?} is not a term (variables only appear inside E(.,.) and eq(.,.))")
            } else {
                format!("expected '(' after connective {name}")
            };
            return Err(err(t.line, t.col, msg));
        }
        self.next();
        let mut args = vec![self.term()?];
        loop {
            let t = self.next();
            match t.tok {
                Tok::Comma => args.push(self.term()?),
                Tok::RParen => break,
                other => {
                    return Err(err(t.line, t.col, format!("expected ',' or ')', found {}", describe(&other))))
                }
            }
        }
        let c = self
            .registry
            .resolve(&name, params.as_deref(), args.len())
            .map_err(|e| err(line, col, e.to_string()))?;
        Ok(Term::Apply(c, args))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("{s:?}"),
        Tok::Params(p) => format!("[{p}]"),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Comma => "','".into(),
        Tok::Dot => "'.'".into(),
        Tok::Tilde => "'~'".into(),
        Tok::End => "end of input".into(),
    }
}

/// Parses against the builtin registry.
pub fn parse(text: &str) -> Result<Term> {
    parse_with(text, &Registry::builtin())
}

pub fn parse_with(text: &str, registry: &Registry) -> Result<Term> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        registry,
        scope: Vec::new(),
        binders: Vec::new(),
    };
    let t = p.term()?;
    let end = p.next();
    if end.tok != Tok::End {
        return Err(err(end.line, end.col, format!("unexpected {} after the term", describe(&end.tok))));
    }
    let free = t.free_vars();
    if let Some((v, l, c)) = p.binders.iter().find(|(v, _, _)| free.contains(v)) {
        return Err(err(*l, *c, format!("bound variable {v:?} also occurs free in the term")));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        let t = parse("sum u . sum v . E(u,v)").unwrap();
        assert_eq!(t, Term::sum("u", Term::sum("v", Term::edge("u", "v"))));
        let t = parse("mul(E(u,v), 2.0)").unwrap();
        match &t {
            Term::Apply(c, args) => {
                assert_eq!(c.name(), "mul");
                assert_eq!(args, &vec![Term::edge("u", "v"), Term::Const(2.0)]);
            }
            _ => panic!(),
        }
        assert!(parse("lmean u~v . mul(E(u,v), 1e-3)").is_ok());
    }

    #[test]
    fn errors_carry_positions() {
        match parse("sum u .\n  foo(E(u,u))") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("inv(1, 2)"), Err(Error::Parse { .. })));
        assert!(matches!(parse("sum u . sum u . E(u,u)"), Err(Error::Parse { .. })));
        assert!(matches!(parse("mul(E(u,u), sum u . 1)"), Err(Error::Parse { .. })));
        assert!(matches!(parse("lmean u~u . 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse("sum v . v"), Err(Error::Parse { .. })));
        assert!(matches!(parse("-1"), Err(Error::Parse { .. })));
        assert!(matches!(parse("sum v . 1 1"), Err(Error::Parse { .. })));
    }

    #[test]
    fn parametric_connectives() {
        let t = parse("poly[x1*x2 + 3](E(u,v), 1)").unwrap();
        let back = parse(&t.to_string()).unwrap();
        assert_eq!(t, back);
        assert_eq!(t.to_string(), "poly[x1*x2 + 3](E(u,v), 1)");
    }
}
