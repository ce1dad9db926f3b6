//! Polynomial interpretations, their text format, and certificate checking.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::poly::{Monomial, Poly, VarId};
use crate::repmap::ReplacementMap;
use crate::term::{Name, Term, Trs, Var};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertError {
    #[error("no interpretation for `{0}`")]
    MissingSymbol(Name),
    #[error("interpretation of `{symbol}` has arity {found}, expected {expected}")]
    ArityMismatch { symbol: Name, expected: usize, found: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// [f] as a polynomial over argument variables 0..arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolPoly {
    pub arity: usize,
    pub poly: Poly,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interpretation {
    polys: BTreeMap<Name, SymbolPoly>,
    /// Symbols in insertion order, for printing.
    order: Vec<Name>,
}

impl Interpretation {
    pub fn new() -> Interpretation {
        Interpretation::default()
    }

    pub fn insert(&mut self, symbol: Name, arity: usize, poly: Poly) {
        if !self.polys.contains_key(&symbol) {
            self.order.push(symbol.clone());
        }
        self.polys.insert(symbol, SymbolPoly { arity, poly });
    }

    pub fn get(&self, symbol: &str) -> Option<&SymbolPoly> {
        self.polys.get(symbol)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&Name, &SymbolPoly)> {
        self.order.iter().map(|n| (n, &self.polys[n]))
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// [t] with variables numbered by `ids`.
    pub fn interpret(&self, t: &Term, ids: &BTreeMap<Var, VarId>) -> Result<Poly, CertError> {
        match t {
            Term::Var(v) => Ok(Poly::var(ids[v])),
            Term::App(f, args) => {
                let sp = self.polys.get(f).ok_or_else(|| CertError::MissingSymbol(f.clone()))?;
                if sp.arity != args.len() {
                    return Err(CertError::ArityMismatch { symbol: f.clone(), expected: args.len(), found: sp.arity });
                }
                let args: Vec<Poly> = args.iter().map(|a| self.interpret(a, ids)).collect::<Result<_, _>>()?;
                Ok(sp.poly.substitute(&mut |v| match args.get(v as usize) {
                    Some(p) => p.clone(),
                    None => Poly::var(v),
                }))
            }
        }
    }

    /// [l] − [r], numbering variables in order of first occurrence in l then r.
    pub fn difference(&self, lhs: &Term, rhs: &Term) -> Result<Poly, CertError> {
        let ids = var_ids(lhs, rhs);
        Ok(&self.interpret(lhs, &ids)? - &self.interpret(rhs, &ids)?)
    }

    /// Value of a term with every variable mapped by `value`; `None` on overflow.
    pub fn evaluate(&self, t: &Term, value: &impl Fn(&Var) -> i128) -> Option<i128> {
        match t {
            Term::Var(v) => Some(value(v)),
            Term::App(f, args) => {
                let sp = self.polys.get(f)?;
                let vals: Vec<i128> = args.iter().map(|a| self.evaluate(a, value)).collect::<Option<_>>()?;
                sp.poly.eval(&|v| vals[v as usize])
            }
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (f, sp) in self.symbols() {
            s.push_str(&format!("{}\n", symbol_line(f, sp)));
        }
        s
    }

    /// Parse lines `f(x1,..,xk) = poly` (or `c = poly`); `;` starts a comment.
    pub fn parse(text: &str) -> Result<Interpretation, CertError> {
        Self::parse_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
    }

    pub(crate) fn parse_lines<'a>(lines: impl Iterator<Item = (usize, &'a str)>) -> Result<Interpretation, CertError> {
        let mut out = Interpretation::new();
        for (line, raw) in lines {
            let text = raw.split(';').next().unwrap_or_default().trim();
            if text.is_empty() {
                continue;
            }
            let err = |message: String| CertError::Syntax { line, message };
            let (lhs, rhs) = text.rsplit_once('=').ok_or_else(|| err("expected `=`".into()))?;
            let lhs = lhs.trim();
            let (name, params): (&str, Vec<&str>) = match lhs.find('(') {
                Some(open) => {
                    let inner = lhs[open + 1..].strip_suffix(')').ok_or_else(|| err("expected `)`".into()))?;
                    let params = inner.split(',').map(str::trim).filter(|p| !p.is_empty()).collect();
                    (lhs[..open].trim(), params)
                }
                None => (lhs, Vec::new()),
            };
            if name.is_empty() {
                return Err(err("missing symbol name".into()));
            }
            let poly = Poly::parse(rhs, &mut |v: &str| params.iter().position(|p| *p == v).map(|i| i as VarId))
                .map_err(err)?;
            out.insert(name.into(), params.len(), poly);
        }
        Ok(out)
    }
}

fn symbol_line(f: &Name, sp: &SymbolPoly) -> String {
    let body = sp.poly.display_with(&|v| format!("x{}", v + 1));
    if sp.arity == 0 {
        format!("{f} = {body}")
    } else {
        let params: Vec<String> = (1..=sp.arity).map(|i| format!("x{i}")).collect();
        format!("{f}({}) = {body}", params.join(", "))
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Serialize for Interpretation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.symbols().map(|(f, sp)| symbol_line(f, sp)))
    }
}

pub(crate) fn var_ids(lhs: &Term, rhs: &Term) -> BTreeMap<Var, VarId> {
    let mut ids = BTreeMap::new();
    for v in lhs.vars().into_iter().chain(rhs.vars()) {
        let next = ids.len() as VarId;
        ids.entry(v).or_insert(next);
    }
    ids
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertCheck {
    pub ok: bool,
    pub diagnostics: Vec<String>,
}

impl CertCheck {
    pub(crate) fn from_diagnostics(diagnostics: Vec<String>) -> CertCheck {
        CertCheck { ok: diagnostics.is_empty(), diagnostics }
    }
}

/// Linear coefficient of argument `i` (1-based) in [f].
pub fn linear_coefficient(sp: &SymbolPoly, i: usize) -> i128 {
    sp.poly.coeff(&Monomial::var((i - 1) as VarId))
}

/// Check a direct certificate: non-negative coefficients, strict monotonicity
/// on every μ-replacing argument, and [l] − [r] − 1 absolutely positive for
/// every rule.
pub fn check_certificate(trs: &Trs, mu: &ReplacementMap, cert: &Interpretation) -> Result<CertCheck, CertError> {
    let mut diags = Vec::new();
    for d in trs.signature().symbols() {
        let sp = cert.get(&d.name).ok_or_else(|| CertError::MissingSymbol(d.name.clone()))?;
        if sp.arity != d.arity() {
            return Err(CertError::ArityMismatch { symbol: d.name.clone(), expected: d.arity(), found: sp.arity });
        }
        if !sp.poly.all_coefficients_nonneg() {
            diags.push(format!("[{}] has a negative coefficient", d.name));
        }
        for &i in mu.get(&d.name) {
            if linear_coefficient(sp, i) < 1 {
                diags.push(format!("[{}] is not strictly monotone in argument {i}", d.name));
            }
        }
    }
    for r in trs.rules() {
        let diff = &cert.difference(&r.lhs, &r.rhs)? - &Poly::constant(1);
        if !diff.all_coefficients_nonneg() {
            let ids = var_ids(&r.lhs, &r.rhs);
            let names: BTreeMap<VarId, String> = ids.iter().map(|(v, i)| (*i, v.name.to_string())).collect();
            let shown = (&diff + &Poly::constant(1)).display_with(&|v| names[&v].clone());
            diags.push(format!("rule {} ({r}) is not oriented: [l] - [r] = {shown}", r.label));
        }
    }
    Ok(CertCheck::from_diagnostics(diags))
}
