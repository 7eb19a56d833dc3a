//! Plain-text expressions over the five chart coordinates, and a small
//! line-based chart description format built on them.
//!
//! ```text
//! # comments start with '#'
//! coords = x y p q z
//! metric x z = -3/2          # entry g_xz (= g_zx)
//! metric p p = -2
//! scale sigma = cosh(x/sqrt(3))
//! vector D1 = 0; 0; 0; 1; 0
//! domain x = -1 1
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::linalg::Matrix;
use crate::scalars::Scalar;

use super::{Chart, ChartError, Domain, Field, Jet, ScalarField, VectorField, DIM};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Sqrt,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Base raised to a coordinate-independent exponent.
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, ChartError> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            if i < cs.len() && (cs[i] == 'e' || cs[i] == 'E') {
                let save = i;
                i += 1;
                if i < cs.len() && (cs[i] == '+' || cs[i] == '-') {
                    i += 1;
                }
                if i < cs.len() && cs[i].is_ascii_digit() {
                    while i < cs.len() && cs[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().map_err(|_| ChartError::Expr(format!("bad number '{t}'")))?));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(ChartError::Expr(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ChartError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ChartError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ChartError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.unary()?;
            let p = e.constant().ok_or_else(|| ChartError::Expr("exponent must not depend on coordinates".into()))?;
            return Ok(Expr::Pow(Box::new(base), p));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ChartError> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(ChartError::Expr("missing ')'".into()));
                }
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let f = match name.as_str() {
                    "exp" => Some(Func::Exp),
                    "log" | "ln" => Some(Func::Log),
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "sinh" => Some(Func::Sinh),
                    "cosh" => Some(Func::Cosh),
                    "sqrt" => Some(Func::Sqrt),
                    _ => None,
                };
                if let Some(f) = f {
                    if !self.eat('(') {
                        return Err(ChartError::Expr(format!("'{name}' needs an argument")));
                    }
                    let e = self.expr()?;
                    if !self.eat(')') {
                        return Err(ChartError::Expr("missing ')'".into()));
                    }
                    return Ok(Expr::Call(f, Box::new(e)));
                }
                if name == "pi" {
                    return Ok(Expr::Num(std::f64::consts::PI));
                }
                self.names
                    .iter()
                    .position(|n| *n == name)
                    .map(Expr::Var)
                    .ok_or_else(|| ChartError::Expr(format!("unknown name '{name}'")))
            }
            Some(t) => Err(ChartError::Expr(format!("unexpected token {t:?}"))),
            None => Err(ChartError::Expr("unexpected end of input".into())),
        }
    }
}

/// Values an expression can be evaluated in.
pub trait ExprValue: Copy + Scalar {
    fn lift(v: f64) -> Self;
    fn apply(self, f: Func) -> Self;
    fn powf(self, p: f64) -> Self;
}

impl ExprValue for f64 {
    fn lift(v: f64) -> Self {
        v
    }

    fn apply(self, f: Func) -> Self {
        match f {
            Func::Exp => self.exp(),
            Func::Log => self.ln(),
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Sinh => self.sinh(),
            Func::Cosh => self.cosh(),
            Func::Sqrt => self.sqrt(),
        }
    }

    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
}

impl ExprValue for Jet {
    fn lift(v: f64) -> Self {
        Jet::constant(v)
    }

    fn apply(self, f: Func) -> Self {
        match f {
            Func::Exp => self.exp(),
            Func::Log => self.ln(),
            Func::Sin => self.sin(),
            Func::Cos => self.cos(),
            Func::Sinh => self.sinh(),
            Func::Cosh => self.cosh(),
            Func::Sqrt => self.sqrt(),
        }
    }

    fn powf(self, p: f64) -> Self {
        Jet::powf(&self, p)
    }
}

impl Expr {
    pub fn parse(src: &str, names: &[String]) -> Result<Expr, ChartError> {
        let mut p = Parser { toks: lex(src)?, pos: 0, names };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(ChartError::Expr(format!("trailing input in '{src}'")));
        }
        Ok(e)
    }

    /// Value when the expression has no coordinate dependence.
    pub fn constant(&self) -> Option<f64> {
        let none: [f64; 0] = [];
        (!self.depends()).then(|| self.eval_with(&none))
    }

    fn depends(&self) -> bool {
        use Expr::*;
        match self {
            Num(_) => false,
            Var(_) => true,
            Neg(a) | Pow(a, _) | Call(_, a) => a.depends(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.depends() || b.depends(),
        }
    }

    fn eval_with<T: ExprValue>(&self, x: &[T]) -> T {
        use Expr::*;
        match self {
            Num(v) => T::lift(*v),
            Var(i) => x[*i],
            Neg(a) => -a.eval_with(x),
            Add(a, b) => a.eval_with(x) + b.eval_with(x),
            Sub(a, b) => a.eval_with(x) - b.eval_with(x),
            Mul(a, b) => a.eval_with(x) * b.eval_with(x),
            Div(a, b) => {
                let d = b.eval_with(x);
                a.eval_with(x) * d.try_recip().unwrap_or_else(|| T::lift(f64::NAN))
            }
            Pow(a, p) => {
                let b = a.eval_with(x);
                if p.fract() == 0.0 && p.abs() <= 64.0 {
                    let mut acc = T::one();
                    for _ in 0..p.abs() as u32 {
                        acc = acc * b;
                    }
                    if *p < 0.0 {
                        acc.try_recip().unwrap_or_else(|| T::lift(f64::NAN))
                    } else {
                        acc
                    }
                } else {
                    b.powf(*p)
                }
            }
            Call(f, a) => a.eval_with(x).apply(*f),
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.eval_with(x)
    }

    pub fn eval_jet(&self, x: &[Jet]) -> Jet {
        self.eval_with(x)
    }

    pub fn field(self) -> ScalarField {
        let e = Arc::new(self);
        Field::new(move |x| e.eval_jet(x))
    }
}

/// A chart read from the line format, with its named fields.
pub struct ChartFile {
    pub chart: Chart,
    pub scales: BTreeMap<String, ScalarField>,
    pub vectors: BTreeMap<String, VectorField>,
}

pub fn parse_chart(src: &str) -> Result<ChartFile, ChartError> {
    let mut names: Option<Vec<String>> = None;
    let mut metric: Vec<((usize, usize), Expr)> = Vec::new();
    let mut scales = BTreeMap::new();
    let mut vectors = BTreeMap::new();
    let mut lo = [-1.0; DIM];
    let mut hi = [1.0; DIM];
    for (ln, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| ChartError::Expr(format!("line {}: {m}", ln + 1));
        let (head, rhs) = line.split_once('=').ok_or_else(|| err("expected '='".into()))?;
        let words: Vec<&str> = head.split_whitespace().collect();
        if words == ["coords"] {
            let ns: Vec<String> = rhs.split_whitespace().map(String::from).collect();
            if ns.len() != DIM {
                return Err(err(format!("need {DIM} coordinate names")));
            }
            names = Some(ns);
            continue;
        }
        let ns = names.as_ref().ok_or_else(|| err("'coords' must come first".into()))?;
        let idx = |w: &str| ns.iter().position(|n| n == w).ok_or_else(|| err(format!("unknown coordinate '{w}'")));
        match words.as_slice() {
            ["metric", a, b] => metric.push(((idx(a)?, idx(b)?), Expr::parse(rhs, ns).map_err(|e| err(e.to_string()))?)),
            ["scale", n] => {
                scales.insert(n.to_string(), Expr::parse(rhs, ns).map_err(|e| err(e.to_string()))?.field());
            }
            ["vector", n] => {
                let comps = rhs
                    .split(';')
                    .map(|c| Expr::parse(c, ns).map_err(|e| err(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                if comps.len() != DIM {
                    return Err(err(format!("vector needs {DIM} components")));
                }
                let comps = Arc::new(comps);
                vectors.insert(n.to_string(), Field::new(move |x: &[Jet]| comps.iter().map(|c| c.eval_jet(x)).collect()));
            }
            ["domain", a] => {
                let i = idx(a)?;
                let b: Vec<f64> = rhs.split_whitespace().map(|t| t.parse::<f64>()).collect::<Result<_, _>>().map_err(|_| err("bad bounds".into()))?;
                if b.len() != 2 || b[0] >= b[1] {
                    return Err(err("domain needs 'lo hi' with lo < hi".into()));
                }
                lo[i] = b[0];
                hi[i] = b[1];
            }
            _ => return Err(err(format!("unrecognized key '{}'", head.trim()))),
        }
    }
    let ns = names.ok_or_else(|| ChartError::Expr("missing 'coords'".into()))?;
    let metric = Arc::new(metric);
    let g = Field::new(move |x: &[Jet]| {
        let mut m = Matrix::from_fn(DIM, DIM, |_, _| Jet::zero());
        for ((a, b), e) in metric.iter() {
            let v = e.eval_jet(x);
            m.set(*a, *b, v);
            m.set(*b, *a, v);
        }
        m
    });
    let names: Vec<&str> = ns.iter().map(|s| s.as_str()).collect();
    let chart = Chart::new(names.try_into().expect("five names"), g, Domain::boxed(lo, hi));
    Ok(ChartFile { chart, scales, vectors })
}
