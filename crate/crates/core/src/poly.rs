//! Sparse multivariate polynomials over a coefficient ring, with named indeterminates.

use std::borrow::Cow;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{needs_parens, split_sign, Coeff};

/// Sorted, duplicate-free list of indeterminate names.
pub type Universe = Arc<Vec<String>>;

/// Build a universe from names, sorting and removing duplicates.
pub fn universe<I, S>(names: I) -> Universe
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let set: BTreeSet<String> = names.into_iter().map(Into::into).collect();
    Arc::new(set.into_iter().collect())
}

fn same_universe(a: &Universe, b: &Universe) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Monomial as sorted `(variable index, exponent)` pairs with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Mono {
    deg: u32,
    exps: Vec<(u32, u32)>,
}

impl Mono {
    pub fn one() -> Self {
        Mono::default()
    }

    pub fn var(idx: u32) -> Self {
        Mono { deg: 1, exps: vec![(idx, 1)] }
    }

    pub fn from_pairs(mut pairs: Vec<(u32, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_unstable();
        let mut exps: Vec<(u32, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match exps.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => exps.push((v, e)),
            }
        }
        let deg = exps.iter().map(|p| p.1).sum();
        Mono { deg, exps }
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.exps
    }

    pub fn exponent(&self, idx: u32) -> u32 {
        self.exps.binary_search_by_key(&idx, |p| p.0).map(|k| self.exps[k].1).unwrap_or(0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            let (a, b) = (self.exps[i], other.exps[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.exps[i..]);
        out.extend_from_slice(&other.exps[j..]);
        Mono { deg: self.deg + other.deg, exps: out }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        if other.deg > self.deg {
            return None;
        }
        let mut out = Vec::with_capacity(self.exps.len());
        let mut j = 0;
        for &(v, e) in &self.exps {
            if j < other.exps.len() && other.exps[j].0 == v {
                let f = other.exps[j].1;
                if f > e {
                    return None;
                }
                if e > f {
                    out.push((v, e - f));
                }
                j += 1;
            } else if j < other.exps.len() && other.exps[j].0 < v {
                return None;
            } else {
                out.push((v, e));
            }
        }
        if j < other.exps.len() {
            return None;
        }
        Some(Mono { deg: self.deg - other.deg, exps: out })
    }

    /// Lower the exponent of `idx` by one; returns the old exponent.
    pub fn lower(&self, idx: u32) -> Option<(u32, Mono)> {
        let k = self.exps.binary_search_by_key(&idx, |p| p.0).ok()?;
        let e = self.exps[k].1;
        let mut exps = self.exps.clone();
        if e == 1 {
            exps.remove(k);
        } else {
            exps[k].1 -= 1;
        }
        Some((e, Mono { deg: self.deg - 1, exps }))
    }

    fn remap(&self, map: &[u32]) -> Mono {
        Mono { deg: self.deg, exps: self.exps.iter().map(|&(v, e)| (map[v as usize], e)).collect() }
    }

    /// Multinomial weight `prod e!` used by polarization.
    pub fn factorial_weight(&self) -> u64 {
        self.exps.iter().map(|&(_, e)| (1..=e as u64).product::<u64>()).product()
    }

    pub fn render(&self, vars: &[String]) -> String {
        self.exps
            .iter()
            .map(|&(v, e)| if e == 1 { vars[v as usize].clone() } else { format!("{}^{}", vars[v as usize], e) })
            .collect::<Vec<_>>()
            .join(" * ")
    }
}

impl Ord for Mono {
    /// Graded lexicographic order on dense exponent vectors.
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg.cmp(&other.deg).then_with(|| {
            let (mut i, mut j) = (0, 0);
            loop {
                match (self.exps.get(i), other.exps.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(a), Some(b)) => match a.0.cmp(&b.0) {
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal => {
                            if a.1 != b.1 {
                                return a.1.cmp(&b.1);
                            }
                            i += 1;
                            j += 1;
                        }
                    },
                }
            }
        })
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with coefficients in `F` over a named universe of indeterminates.
#[derive(Clone, Debug)]
pub struct Poly<F> {
    vars: Universe,
    terms: BTreeMap<Mono, F>,
}

impl<F: Coeff> Poly<F> {
    pub fn zero_in(vars: &Universe) -> Self {
        Poly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant_in(vars: &Universe, c: F) -> Self {
        let mut p = Self::zero_in(vars);
        if !c.is_zero() {
            p.terms.insert(Mono::one(), c);
        }
        p
    }

    pub fn constant(c: F) -> Self {
        Self::constant_in(&Arc::new(Vec::new()), c)
    }

    /// The indeterminate with index `idx` in `vars`.
    pub fn var_in(vars: &Universe, idx: usize) -> Self {
        let mut p = Self::zero_in(vars);
        p.terms.insert(Mono::var(idx as u32), F::one());
        p
    }

    /// Indeterminate `name` of `vars`; errors when undeclared.
    pub fn named_in(vars: &Universe, name: &str) -> Result<Self> {
        let idx = index_of(vars, name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(Self::var_in(vars, idx))
    }

    /// A single indeterminate in its own one-element universe.
    pub fn var(name: &str) -> Self {
        Self::var_in(&universe([name]), 0)
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, F)>>(vars: &Universe, terms: I) -> Self {
        let mut p = Self::zero_in(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Universe {
        &self.vars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &F)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Mono) -> F {
        self.terms.get(m).cloned().unwrap_or_else(F::zero)
    }

    pub fn add_term(&mut self, m: Mono, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Mono::degree).max()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Mono::is_one)
    }

    pub fn constant_term(&self) -> F {
        self.coeff(&Mono::one())
    }

    /// Names of indeterminates that actually occur.
    pub fn support(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for &(v, _) in m.pairs() {
                out.insert(self.vars[v as usize].clone());
            }
        }
        out
    }

    /// Re-express over a universe containing every occurring name.
    pub fn in_universe(&self, vars: &Universe) -> Result<Self> {
        if same_universe(&self.vars, vars) {
            return Ok(Poly { vars: vars.clone(), terms: self.terms.clone() });
        }
        let mut map = vec![u32::MAX; self.vars.len()];
        for (i, name) in self.vars.iter().enumerate() {
            if let Some(j) = index_of(vars, name) {
                map[i] = j as u32;
            }
        }
        let mut out = Self::zero_in(vars);
        for (m, c) in &self.terms {
            for &(v, _) in m.pairs() {
                if map[v as usize] == u32::MAX {
                    return Err(Error::UnknownVariable(self.vars[v as usize].clone()));
                }
            }
            out.terms.insert(m.remap(&map), c.clone());
        }
        Ok(out)
    }

    fn aligned<'a>(&'a self, other: &'a Self) -> (Universe, Cow<'a, Self>, Cow<'a, Self>) {
        if same_universe(&self.vars, &other.vars) {
            return (self.vars.clone(), Cow::Borrowed(self), Cow::Borrowed(other));
        }
        if self.vars.is_empty() && self.is_constant() {
            let lifted = Poly { vars: other.vars.clone(), terms: self.terms.clone() };
            return (other.vars.clone(), Cow::Owned(lifted), Cow::Borrowed(other));
        }
        if other.vars.is_empty() && other.is_constant() {
            let lifted = Poly { vars: self.vars.clone(), terms: other.terms.clone() };
            return (self.vars.clone(), Cow::Borrowed(self), Cow::Owned(lifted));
        }
        let u = universe(self.vars.iter().chain(other.vars.iter()).cloned());
        let a = self.in_universe(&u).expect("union universe");
        let b = other.in_universe(&u).expect("union universe");
        (u, Cow::Owned(a), Cow::Owned(b))
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero_in(&self.vars);
        }
        let mut out = Self::zero_in(&self.vars);
        for (m, a) in &self.terms {
            let v = a.clone() * c.clone();
            if !v.is_zero() {
                out.terms.insert(m.clone(), v);
            }
        }
        out
    }

    pub fn mul_mono(&self, m: &Mono, c: &F) -> Self {
        let mut out = Self::zero_in(&self.vars);
        for (n, a) in &self.terms {
            out.add_term(n.mul(m), a.clone() * c.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant_in(&self.vars, F::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative by indeterminate index.
    pub fn partial_idx(&self, idx: usize) -> Self {
        let mut out = Self::zero_in(&self.vars);
        for (m, c) in &self.terms {
            if let Some((e, rest)) = m.lower(idx as u32) {
                out.add_term(rest, c.scale_int(e as i64));
            }
        }
        out
    }

    /// Formal partial derivative; the name must be declared in the universe.
    pub fn partial(&self, name: &str) -> Result<Self> {
        let idx = index_of(&self.vars, name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(self.partial_idx(idx))
    }

    /// Replace every occurring indeterminate by the assigned polynomial.
    pub fn substitute(&self, assignment: &HashMap<String, Poly<F>>) -> Result<Self> {
        let mut images: Vec<Option<&Poly<F>>> = vec![None; self.vars.len()];
        for m in self.terms.keys() {
            for &(v, _) in m.pairs() {
                let name = &self.vars[v as usize];
                if images[v as usize].is_none() {
                    images[v as usize] =
                        Some(assignment.get(name).ok_or_else(|| Error::MissingAssignment(name.clone()))?);
                }
            }
        }
        let target = match assignment.values().next() {
            Some(p) => p.vars.clone(),
            None => Arc::new(Vec::new()),
        };
        let mut powers: HashMap<(u32, u32), Poly<F>> = HashMap::new();
        let mut out = Self::zero_in(&target);
        for (m, c) in &self.terms {
            let mut t = Self::constant_in(&target, c.clone());
            for &(v, e) in m.pairs() {
                let pw = powers.entry((v, e)).or_insert_with(|| images[v as usize].expect("checked").pow(e)).clone();
                t = &t * &pw;
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Apply `f` to every coefficient.
    pub fn map_coeffs<G: Coeff>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        let mut out = Poly::<G>::zero_in(&self.vars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Highest-first rendering in the text grammar.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let (neg, mag) = split_sign(c);
            let body = if m.is_one() {
                mag
            } else if *c == F::one() || *c == -F::one() {
                m.render(&self.vars)
            } else if needs_parens(&mag) {
                format!("({}) * {}", mag, m.render(&self.vars))
            } else {
                format!("{} * {}", mag, m.render(&self.vars))
            };
            match (k, neg) {
                (0, false) => out.push_str(&body),
                (0, true) => {
                    out.push('-');
                    out.push_str(&body)
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&body)
                }
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&body)
                }
            }
        }
        out
    }
}

pub(crate) fn index_of(vars: &[String], name: &str) -> Option<usize> {
    vars.binary_search_by(|v| v.as_str().cmp(name)).ok()
}

impl<F: Coeff> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl<F: Coeff> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        if same_universe(&self.vars, &other.vars) {
            return self.terms == other.terms;
        }
        let (_, a, b) = self.aligned(other);
        a.terms == b.terms
    }
}

impl<'a, F: Coeff> Add<&'a Poly<F>> for &'a Poly<F> {
    type Output = Poly<F>;
    fn add(self, rhs: &'a Poly<F>) -> Poly<F> {
        let (u, a, b) = self.aligned(rhs);
        let mut out = Poly { vars: u, terms: a.terms.clone() };
        for (m, c) in &b.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a, F: Coeff> Sub<&'a Poly<F>> for &'a Poly<F> {
    type Output = Poly<F>;
    fn sub(self, rhs: &'a Poly<F>) -> Poly<F> {
        let (u, a, b) = self.aligned(rhs);
        let mut out = Poly { vars: u, terms: a.terms.clone() };
        for (m, c) in &b.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a, F: Coeff> Mul<&'a Poly<F>> for &'a Poly<F> {
    type Output = Poly<F>;
    fn mul(self, rhs: &'a Poly<F>) -> Poly<F> {
        let (u, a, b) = self.aligned(rhs);
        let mut out = Poly::zero_in(&u);
        for (m, c) in &a.terms {
            for (n, d) in &b.terms {
                out.add_term(m.mul(n), c.clone() * d.clone());
            }
        }
        out
    }
}

impl<F: Coeff> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        self.scale(&-F::one())
    }
}

impl<F: Coeff> Add for Poly<F> {
    type Output = Poly<F>;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<F: Coeff> Sub for Poly<F> {
    type Output = Poly<F>;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl<F: Coeff> Mul for Poly<F> {
    type Output = Poly<F>;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<F: Coeff> Neg for Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Self {
        -&self
    }
}

impl<F: Coeff> Zero for Poly<F> {
    fn zero() -> Self {
        Poly::zero_in(&Arc::new(Vec::new()))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<F: Coeff> One for Poly<F> {
    fn one() -> Self {
        Poly::constant(F::one())
    }
}

// ---------------------------------------------------------------- parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' => {
                out.push(Tok::Star);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/' || chars[i] == '.') {
                    i += 1;
                }
                out.push(Tok::Num(chars[start..i].iter().collect()));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '[' {
                    while i < chars.len() && chars[i] != ']' {
                        i += 1;
                    }
                    if i == chars.len() {
                        return Err(Error::Parse(format!("unclosed `[` in {s:?}")));
                    }
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character {other:?} in {s:?}"))),
        }
    }
    Ok(out)
}

/// Parse tree over names and coefficient literals.
#[derive(Debug, Clone)]
enum Expr {
    Num(String),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at token {} in {:?}", self.pos, self.src))
    }
    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Expr::Neg(Box::new(self.term()?))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }
    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }
    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.peek() {
                Some(Tok::Num(n)) => {
                    let e: u32 = n.parse().map_err(|_| self.err("bad exponent"))?;
                    self.pos += 1;
                    return Ok(Expr::Pow(Box::new(base), e));
                }
                _ => return Err(self.err("expected exponent")),
            }
        }
        Ok(base)
    }
    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(v)) => {
                self.pos += 1;
                Ok(Expr::Var(v))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err(self.err("expected `)`")),
                }
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            _ => Err(self.err("expected a number, name or `(`")),
        }
    }
}

fn parse_expr(s: &str) -> Result<Expr> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut p = Parser { toks: &toks, pos: 0, src: s };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

fn collect_names(e: &Expr, out: &mut BTreeSet<String>) {
    match e {
        Expr::Num(_) => {}
        Expr::Var(v) => {
            out.insert(v.clone());
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            collect_names(a, out);
            collect_names(b, out);
        }
        Expr::Neg(a) | Expr::Pow(a, _) => collect_names(a, out),
    }
}

fn eval_expr<F: Coeff + FromStr>(e: &Expr, vars: &Universe) -> Result<Poly<F>> {
    Ok(match e {
        Expr::Num(n) => {
            let c = F::from_str(n).map_err(|_| Error::Parse(format!("bad coefficient {n:?}")))?;
            Poly::constant_in(vars, c)
        }
        Expr::Var(v) => Poly::named_in(vars, v)?,
        Expr::Add(a, b) => &eval_expr::<F>(a, vars)? + &eval_expr(b, vars)?,
        Expr::Sub(a, b) => &eval_expr::<F>(a, vars)? - &eval_expr(b, vars)?,
        Expr::Mul(a, b) => &eval_expr::<F>(a, vars)? * &eval_expr(b, vars)?,
        Expr::Neg(a) => -&eval_expr::<F>(a, vars)?,
        Expr::Pow(a, k) => eval_expr::<F>(a, vars)?.pow(*k),
    })
}

impl<F: Coeff + FromStr> Poly<F> {
    /// Parse over the universe of names occurring in `s`.
    pub fn parse(s: &str) -> Result<Self> {
        let e = parse_expr(s)?;
        let mut names = BTreeSet::new();
        collect_names(&e, &mut names);
        eval_expr(&e, &Arc::new(names.into_iter().collect()))
    }

    /// Parse over a fixed universe; names outside it are rejected.
    pub fn parse_in(vars: &Universe, s: &str) -> Result<Self> {
        eval_expr(&parse_expr(s)?, vars)
    }
}

impl<F: Coeff + FromStr> FromStr for Poly<F> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Poly::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, q_frac};
    use crate::QPoly;

    fn p(s: &str) -> QPoly {
        QPoly::parse(s).unwrap()
    }

    #[test]
    fn add_examples() {
        assert_eq!(&p("T1 + T2") + &p("-T2"), p("T1"));
        assert_eq!(&QPoly::zero() + &p("T1^2 - 3"), p("T1^2 - 3"));
        assert_eq!(&p("1/2 * T1^2") + &p("1/2 * T1^2"), p("T1^2"));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&p("T1") * &p("T2"), p("T1 * T2"));
        assert_eq!(&p("T1 + T2") * &p("T1 - T2"), p("T1^2 - T2^2"));
        assert!((&p("T1 + 7") * &QPoly::zero()).is_zero());
    }

    #[test]
    fn partial_examples() {
        assert_eq!(p("T1^2 * T2").partial("T1").unwrap(), p("2 * T1 * T2"));
        let t2 = QPoly::parse_in(&universe(["T1", "T2"]), "T2").unwrap();
        assert!(t2.partial("T1").unwrap().is_zero());
        assert_eq!(p("T1 * T2 + T1^3").partial("T1").unwrap(), p("T2 + 3 * T1^2"));
        assert!(matches!(p("T1").partial("T9"), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn substitute_examples() {
        let w12 = p("T3");
        let mut a = HashMap::new();
        a.insert("T3".to_string(), p("psi3"));
        assert_eq!(w12.substitute(&a).unwrap(), p("psi3"));

        let id: HashMap<String, QPoly> = ["T1", "T2"].iter().map(|n| (n.to_string(), p(n))).collect();
        assert_eq!(p("T1^2 * T2 - 4").substitute(&id).unwrap(), p("T1^2 * T2 - 4"));

        let mut s = HashMap::new();
        s.insert("T1".to_string(), p("a + b"));
        assert_eq!(p("T1^2").substitute(&s).unwrap(), p("a^2 + 2 * a * b + b^2"));
        assert!(matches!(p("T1 * T2").substitute(&s), Err(Error::MissingAssignment(_))));
    }

    #[test]
    fn render_is_canonical() {
        let r = p("3/2 * T1^2 * T2 - T3 + 1 - 2/4 * T1");
        assert_eq!(r.render(), "3/2 * T1^2 * T2 - 1/2 * T1 - T3 + 1");
        assert_eq!(p("-T1 + T2").render(), "-T1 + T2");
        assert_eq!(QPoly::zero().render(), "0");
        assert_eq!(p("-7/3").render(), "-7/3");
        assert_eq!(p("u[psi1;x0,x1] * u[h1_0;]").render(), "u[h1_0;] * u[psi1;x0,x1]");
    }

    #[test]
    fn grlex_order() {
        // x0 > x1 at equal degree; higher degree first
        let r = p("x1^2 + x0 * x1 + x0^2 + x0^3");
        assert_eq!(r.render(), "x0^3 + x0^2 + x0 * x1 + x1^2");
    }

    #[test]
    fn mono_division() {
        let a = Mono::from_pairs(vec![(0, 2), (3, 1)]);
        let b = Mono::from_pairs(vec![(0, 1)]);
        assert_eq!(a.div(&b), Some(Mono::from_pairs(vec![(0, 1), (3, 1)])));
        assert_eq!(b.div(&a), None);
        assert_eq!(a.div(&Mono::from_pairs(vec![(1, 1)])), None);
        assert_eq!(a.div(&a), Some(Mono::one()));
    }

    #[test]
    fn equality_across_universes() {
        let a = QPoly::parse_in(&universe(["x", "y", "z"]), "x + y").unwrap();
        assert_eq!(a, p("y + x"));
        assert_eq!(QPoly::constant(q(2)), p("2"));
        assert_ne!(p("x"), p("y"));
        assert_eq!(p("x").scale(&q_frac(1, 2)), p("1/2 * x"));
    }

    #[test]
    fn parse_errors() {
        assert!(QPoly::parse("x +").is_err());
        assert!(QPoly::parse("").is_err());
        assert!(QPoly::parse("(x").is_err());
        assert!(QPoly::parse("x ^ y").is_err());
        assert!(QPoly::parse_in(&universe(["x"]), "y").is_err());
    }
}
