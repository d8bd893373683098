use std::collections::HashMap;

use crate::algebra::{parse_decimal, Dag, Interval, NodeId, Polynomial, Rational, Scalar};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub lo: Rational,
    pub hi: Rational,
}

/// A side constraint `0 <= g(x)`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub expr: NodeId,
    pub poly: Polynomial<Rational>,
}

/// A straight-line program over boxed inputs, with optional polynomial side
/// constraints.
#[derive(Clone, Debug)]
pub struct Program {
    pub name: String,
    pub vars: Vec<VarDecl>,
    pub constraints: Vec<Constraint>,
    pub dag: Dag,
    pub body: NodeId,
}

impl Program {
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn input_box<S: Scalar>(&self) -> Vec<Interval<S>> {
        self.vars.iter().map(|v| Interval::from_rational(&v.lo, &v.hi)).collect()
    }

    pub fn is_rational(&self) -> bool {
        self.dag.has_division(self.body)
    }

    pub fn has_constraints(&self) -> bool {
        !self.constraints.is_empty()
    }
}

/// Parse a program in the `name:` / `vars:` / `constraints:` / `expr:`
/// format. A `let:` section (`t1 = expr; t2 = expr`) may precede `expr:`;
/// bindings are inlined.
pub fn parse_program(text: &str) -> Result<Program> {
    Parser::new(text).program()
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Section(String),
    Sym(char),
    Le,
    Eof,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
    peeked: Option<(Tok, usize, usize, usize)>,
    dag: Dag,
    vars: HashMap<String, usize>,
    lets: HashMap<String, NodeId>,
}

const SECTIONS: [&str; 5] = ["name", "vars", "constraints", "let", "expr"];

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
            peeked: None,
            dag: Dag::new(),
            vars: HashMap::new(),
            lets: HashMap::new(),
        }
    }

    fn err<T>(&self, line: usize, col: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { line, col, msg: msg.into() })
    }

    fn bump(&mut self) -> Option<u8> {
        let c = *self.src.get(self.pos)?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(&c) = self.src.get(self.pos) {
            if c == b'#' {
                while let Some(&c) = self.src.get(self.pos) {
                    if c == b'\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_ascii_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn lex(&mut self) -> Result<(Tok, usize, usize, usize)> {
        self.skip_ws();
        let (line, col, start) = (self.line, self.col, self.pos);
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::Eof, line, col, start));
        };
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
                self.bump();
            }
            let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
            if SECTIONS.contains(&word.as_str()) && self.src.get(self.pos) == Some(&b':') {
                self.bump();
                return Ok((Tok::Section(word), line, col, start));
            }
            return Ok((Tok::Ident(word), line, col, start));
        }
        if c.is_ascii_digit() || c == b'.' {
            while self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit() || *c == b'.') {
                self.bump();
            }
            if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
                let save = (self.pos, self.line, self.col);
                self.bump();
                if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                    self.bump();
                }
                if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                        self.bump();
                    }
                } else {
                    (self.pos, self.line, self.col) = save;
                }
            }
            let lit = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
            return Ok((Tok::Number(lit), line, col, start));
        }
        if c == b'<' && self.src.get(self.pos + 1) == Some(&b'=') {
            self.bump();
            self.bump();
            return Ok((Tok::Le, line, col, start));
        }
        if b"+-*/^()[],;=".contains(&c) {
            self.bump();
            return Ok((Tok::Sym(c as char), line, col, start));
        }
        self.err(line, col, format!("unexpected character `{}`", c as char))
    }

    fn peek(&mut self) -> Result<&Tok> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lex()?);
        }
        Ok(&self.peeked.as_ref().unwrap().0)
    }

    fn next(&mut self) -> Result<(Tok, usize, usize)> {
        let (t, l, c, _) = match self.peeked.take() {
            Some(p) => p,
            None => self.lex()?,
        };
        Ok((t, l, c))
    }

    fn here(&mut self) -> Result<(usize, usize)> {
        self.peek()?;
        let p = self.peeked.as_ref().unwrap();
        Ok((p.1, p.2))
    }

    fn expect_sym(&mut self, s: char) -> Result<()> {
        match self.next()? {
            (Tok::Sym(c), ..) if c == s => Ok(()),
            (t, l, c) => self.err(l, c, format!("expected `{s}`, found {}", describe(&t))),
        }
    }

    /// `;` continues a list unless the next token opens a new section.
    fn list_continues(&mut self) -> Result<bool> {
        if !self.eat_sym(';')? {
            return Ok(false);
        }
        Ok(!matches!(self.peek()?, Tok::Section(_) | Tok::Eof))
    }

    fn eat_sym(&mut self, s: char) -> Result<bool> {
        if *self.peek()? == Tok::Sym(s) {
            self.next()?;
            return Ok(true);
        }
        Ok(false)
    }

    /// Program names may contain `-` and `.` (e.g. `ex-2-2-5`), so they are
    /// read raw rather than tokenised.
    fn raw_name(&mut self) -> Result<String> {
        debug_assert!(self.peeked.is_none());
        while self.src.get(self.pos).is_some_and(|c| *c == b' ' || *c == b'\t') {
            self.bump();
        }
        let (line, col, start) = (self.line, self.col, self.pos);
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || b"_-.".contains(c)) {
            self.bump();
        }
        if self.pos == start {
            return self.err(line, col, "expected a program name");
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string())
    }

    fn program(mut self) -> Result<Program> {
        let mut name = String::from("program");
        let mut decls: Vec<VarDecl> = Vec::new();
        let mut constraint_roots: Vec<(NodeId, usize, usize)> = Vec::new();
        let mut body = None;
        let mut seen_vars = false;
        loop {
            let (tok, line, col) = self.next()?;
            match tok {
                Tok::Eof => break,
                Tok::Section(s) if s == "name" => name = self.raw_name()?,
                Tok::Section(s) if s == "vars" => {
                    if seen_vars {
                        return self.err(line, col, "duplicate `vars:` section");
                    }
                    seen_vars = true;
                    loop {
                        decls.push(self.vardecl(decls.len())?);
                        if !self.list_continues()? {
                            break;
                        }
                    }
                }
                Tok::Section(s) if s == "constraints" => loop {
                    let (l, c) = self.here()?;
                    match self.next()? {
                        (Tok::Number(z), ..) if parse_decimal(&z).is_some_and(|v| v == Rational::from_integer(0.into())) => {}
                        (t, l, c) => return self.err(l, c, format!("expected `0 <=`, found {}", describe(&t))),
                    }
                    match self.next()? {
                        (Tok::Le, ..) => {}
                        (t, l, c) => return self.err(l, c, format!("expected `<=`, found {}", describe(&t))),
                    }
                    let g = self.expression()?;
                    constraint_roots.push((g, l, c));
                    if !self.list_continues()? {
                        break;
                    }
                },
                Tok::Section(s) if s == "let" => loop {
                    let (t, l, c) = self.next()?;
                    let Tok::Ident(id) = t else {
                        return self.err(l, c, format!("expected a binding name, found {}", describe(&t)));
                    };
                    if self.vars.contains_key(&id) || self.lets.contains_key(&id) {
                        return self.err(l, c, format!("`{id}` is already defined"));
                    }
                    self.expect_sym('=')?;
                    let e = self.expression()?;
                    self.lets.insert(id, e);
                    if !self.list_continues()? {
                        break;
                    }
                },
                Tok::Section(s) if s == "expr" => {
                    if body.is_some() {
                        return self.err(line, col, "duplicate `expr:` section");
                    }
                    if *self.peek()? == Tok::Eof {
                        let (l, c) = self.here()?;
                        return self.err(l, c, "empty expression");
                    }
                    body = Some(self.expression()?);
                    self.eat_sym(';')?;
                }
                other => return self.err(line, col, format!("expected a section keyword, found {}", describe(&other))),
            }
        }
        if !seen_vars {
            return self.err(1, 1, "missing `vars:` section");
        }
        let Some(body) = body else {
            let (l, c) = (self.line, self.col);
            return self.err(l, c, "missing `expr:` section");
        };
        let n = decls.len();
        let mut constraints = Vec::new();
        for (root, l, c) in constraint_roots {
            let rf = self.dag.to_rational_function(root, n).map_err(|_| Error::Syntax {
                line: l,
                col: c,
                msg: "constraint is not a polynomial".into(),
            })?;
            let poly = rf.as_polynomial().ok_or_else(|| Error::Syntax {
                line: l,
                col: c,
                msg: "constraint is not a polynomial".into(),
            })?;
            constraints.push(Constraint { expr: root, poly });
        }
        Ok(Program { name, vars: decls, constraints, dag: self.dag, body })
    }

    fn vardecl(&mut self, index: usize) -> Result<VarDecl> {
        let (t, l, c) = self.next()?;
        let Tok::Ident(name) = t else {
            return self.err(l, c, format!("expected a variable name, found {}", describe(&t)));
        };
        if self.vars.contains_key(&name) {
            return self.err(l, c, format!("variable `{name}` declared twice"));
        }
        match self.next()? {
            (Tok::Ident(kw), ..) if kw == "in" => {}
            (t, l, c) => return self.err(l, c, format!("expected `in`, found {}", describe(&t))),
        }
        self.expect_sym('[')?;
        let lo = self.signed_number()?;
        self.expect_sym(',')?;
        let hi = self.signed_number()?;
        self.expect_sym(']')?;
        if lo >= hi {
            return Err(Error::BoundInversion { line: l, col: c, name });
        }
        self.vars.insert(name.clone(), index);
        Ok(VarDecl { name, lo, hi })
    }

    fn signed_number(&mut self) -> Result<Rational> {
        let neg = if self.eat_sym('-')? {
            true
        } else {
            self.eat_sym('+')?;
            false
        };
        match self.next()? {
            (Tok::Number(s), l, c) => {
                let v = parse_decimal(&s).ok_or(Error::Syntax { line: l, col: c, msg: format!("malformed number `{s}`") })?;
                Ok(if neg { -v } else { v })
            }
            (t, l, c) => self.err(l, c, format!("expected a number, found {}", describe(&t))),
        }
    }

    fn expression(&mut self) -> Result<NodeId> {
        let mut acc = self.term()?;
        loop {
            if self.eat_sym('+')? {
                let rhs = self.term()?;
                acc = self.dag.add(acc, rhs);
            } else if self.eat_sym('-')? {
                let rhs = self.term()?;
                acc = self.dag.sub(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<NodeId> {
        let mut acc = self.unary()?;
        loop {
            if self.eat_sym('*')? {
                let rhs = self.unary()?;
                acc = self.dag.mul(acc, rhs);
            } else if self.eat_sym('/')? {
                let rhs = self.unary()?;
                acc = self.dag.div(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    /// Unary minus binds tighter than `*` but looser than `^`. A minus sign
    /// applied directly to a numeric literal is folded into the constant.
    fn unary(&mut self) -> Result<NodeId> {
        if self.eat_sym('-')? {
            if let Tok::Number(_) = self.peek()? {
                let (t, l, c) = self.next()?;
                let Tok::Number(s) = t else { unreachable!() };
                let v = parse_decimal(&s).ok_or(Error::Syntax { line: l, col: c, msg: format!("malformed number `{s}`") })?;
                if *self.peek()? != Tok::Sym('^') {
                    return Ok(self.dag.constant(-v));
                }
                let base = self.dag.constant(v);
                let p = self.power_suffix(base)?;
                return Ok(self.dag.neg(p));
            }
            let inner = self.unary()?;
            return Ok(self.dag.neg(inner));
        }
        if self.eat_sym('+')? {
            return self.unary();
        }
        let a = self.atom()?;
        self.power_suffix(a)
    }

    fn power_suffix(&mut self, base: NodeId) -> Result<NodeId> {
        if !self.eat_sym('^')? {
            return Ok(base);
        }
        match self.next()? {
            (Tok::Number(s), l, c) => {
                let k: u32 = s.parse().map_err(|_| Error::Syntax { line: l, col: c, msg: format!("exponent must be a non-negative integer, found `{s}`") })?;
                Ok(match k {
                    0 => self.dag.constant(Rational::from_integer(1.into())),
                    1 => base,
                    _ => self.dag.pow(base, k),
                })
            }
            (t, l, c) => self.err(l, c, format!("expected an integer exponent, found {}", describe(&t))),
        }
    }

    fn atom(&mut self) -> Result<NodeId> {
        let (t, l, c) = self.next()?;
        match t {
            Tok::Number(s) => {
                let v = parse_decimal(&s).ok_or(Error::Syntax { line: l, col: c, msg: format!("malformed number `{s}`") })?;
                Ok(self.dag.constant(v))
            }
            Tok::Ident(id) => {
                if *self.peek()? == Tok::Sym('(') {
                    return Err(Error::UnsupportedOperator(id));
                }
                if let Some(&i) = self.vars.get(&id) {
                    return Ok(self.dag.var(i));
                }
                if let Some(&e) = self.lets.get(&id) {
                    return Ok(e);
                }
                Err(Error::UnknownIdentifier { line: l, col: c, name: id })
            }
            Tok::Sym('(') => {
                let e = self.expression()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            other => self.err(l, c, format!("expected an operand, found {}", describe(&other))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Number(s) => format!("number `{s}`"),
        Tok::Section(s) => format!("`{s}:`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Le => "`<=`".into(),
        Tok::Eof => "end of input".into(),
    }
}
