//! Multivariate polynomials with integer coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

pub type VarId = u32;

/// Product of variables with positive exponents, sorted by variable.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(VarId, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(v: VarId) -> Monomial {
        Monomial(vec![(v, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(VarId, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: BTreeMap<VarId, u32> = self.0.iter().copied().collect();
        for &(v, e) in &other.0 {
            *out.entry(v).or_default() += e;
        }
        Monomial(out.into_iter().collect())
    }

    /// Split into the factors below `offset` and those at or above it.
    pub fn split(&self, offset: VarId) -> (Monomial, Monomial) {
        let (lo, hi): (Vec<_>, Vec<_>) = self.0.iter().partition(|(v, _)| *v < offset);
        (Monomial(lo), Monomial(hi))
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Monomial, i128>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: i128) -> Poly {
        Poly::monomial(Monomial::one(), c)
    }

    pub fn var(v: VarId) -> Poly {
        Poly::monomial(Monomial::var(v), 1)
    }

    pub fn monomial(m: Monomial, c: i128) -> Poly {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i128)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn coeff(&self, m: &Monomial) -> i128 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> i128 {
        self.coeff(&Monomial::one())
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn vars(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = self.terms.keys().flat_map(|m| m.0.iter().map(|(v, _)| *v)).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    fn add_term(&mut self, m: Monomial, c: i128) {
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn scale(&self, k: i128) -> Poly {
        if k == 0 {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    /// Replace every variable by a polynomial.
    pub fn substitute(&self, f: &mut impl FnMut(VarId) -> Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(*c);
            for &(v, e) in &m.0 {
                let p = f(v);
                for _ in 0..e {
                    t = &t * &p;
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Value under an assignment; `None` on overflow.
    pub fn eval(&self, f: &impl Fn(VarId) -> i128) -> Option<i128> {
        let mut sum: i128 = 0;
        for (m, c) in &self.terms {
            let mut t = *c;
            for &(v, e) in &m.0 {
                t = t.checked_mul(f(v).checked_pow(e)?)?;
            }
            sum = sum.checked_add(t)?;
        }
        Some(sum)
    }

    pub fn all_coefficients_nonneg(&self) -> bool {
        self.terms.values().all(|c| *c >= 0)
    }

    /// Pretty-print with the given variable names, highest degree first.
    pub fn display_with(&self, name: &impl Fn(VarId) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut ordered: Vec<(&Monomial, &i128)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(a.0.cmp(b.0)));
        let mut s = String::new();
        for (k, (m, c)) in ordered.into_iter().enumerate() {
            let (sign, abs) = if *c < 0 { ("-", -c) } else { ("+", *c) };
            if k == 0 {
                if sign == "-" {
                    s.push('-');
                }
            } else {
                let _ = write!(s, " {sign} ");
            }
            let factors: Vec<String> =
                m.0.iter().map(|(v, e)| if *e == 1 { name(*v) } else { format!("{}^{e}", name(*v)) }).collect();
            match (abs, factors.is_empty()) {
                (a, true) => {
                    let _ = write!(s, "{a}");
                }
                (1, false) => s.push_str(&factors.join("*")),
                (a, false) => {
                    let _ = write!(s, "{a}*{}", factors.join("*"));
                }
            }
        }
        s
    }

    /// Parse `+`, `-`, `*`, `^`, parentheses, integers and identifiers.
    pub fn parse(text: &str, resolve: &mut impl FnMut(&str) -> Option<VarId>) -> Result<Poly, String> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0, resolve };
        let poly = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(format!("unexpected `{}`", p.tokens[p.pos]));
        }
        Ok(poly)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &rhs.scale(-1)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

fn tokenize(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if "+-*^()".contains(c) {
            out.push(c.to_string());
            chars.next();
        } else if c.is_alphanumeric() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_alphanumeric() || d == '_' || d == '\'' {
                    s.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(s);
        } else {
            return Err(format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

struct Parser<'r, R> {
    tokens: Vec<String>,
    pos: usize,
    resolve: &'r mut R,
}

impl<R: FnMut(&str) -> Option<VarId>> Parser<'_, R> {
    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.pos).map(String::as_str)
    }

    fn next(&mut self) -> Option<String> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Poly, String> {
        let mut acc = if self.peek() == Some("-") {
            self.pos += 1;
            -&self.term()?
        } else {
            self.term()?
        };
        while let Some(op) = self.peek() {
            match op {
                "+" => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                "-" => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, String> {
        let mut acc = self.factor()?;
        while self.peek() == Some("*") {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, String> {
        let base = match self.next() {
            None => return Err("unexpected end of polynomial".into()),
            Some(t) if t == "(" => {
                let e = self.expr()?;
                if self.next().as_deref() != Some(")") {
                    return Err("expected `)`".into());
                }
                e
            }
            Some(t) if t.chars().all(|c| c.is_ascii_digit()) => {
                Poly::constant(t.parse().map_err(|_| format!("bad integer `{t}`"))?)
            }
            Some(t) if t.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_') => {
                Poly::var((self.resolve)(&t).ok_or_else(|| format!("unknown variable `{t}`"))?)
            }
            Some(t) => return Err(format!("unexpected `{t}`")),
        };
        if self.peek() == Some("^") {
            self.pos += 1;
            let e: u32 = self.next().and_then(|t| t.parse().ok()).ok_or_else(|| "expected exponent".to_string())?;
            let mut out = Poly::constant(1);
            for _ in 0..e {
                out = &out * &base;
            }
            return Ok(out);
        }
        Ok(base)
    }
}
