//! Replacement maps and the notions built on them: μ-replacing positions,
//! minimum compatible maps, the canonical map and μ_Δ.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::term::{Name, Position, Signature, SortKind, Term, Trs, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepMapError {
    #[error("replacement maps are over different signatures")]
    SignatureMismatch,
    #[error("unknown symbol `{0}` in replacement map")]
    UnknownSymbol(Name),
    #[error("index {index} out of range for `{symbol}` of arity {arity}")]
    IndexOutOfRange { symbol: Name, index: usize, arity: usize },
    #[error("sorts required")]
    Unsorted,
    #[error("malformed replacement map: {0}")]
    Syntax(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    symbol: Name,
    arity: usize,
    args: BTreeSet<usize>,
}

/// μ: F → ℘(ℕ), stored for every symbol of a signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementMap {
    entries: Vec<Entry>,
    index: HashMap<Name, usize>,
}

static EMPTY: BTreeSet<usize> = BTreeSet::new();

impl ReplacementMap {
    fn with(sig: &Signature, full: bool) -> ReplacementMap {
        let entries: Vec<Entry> = sig
            .symbols()
            .iter()
            .map(|d| Entry {
                symbol: d.name.clone(),
                arity: d.arity(),
                args: if full { (1..=d.arity()).collect() } else { BTreeSet::new() },
            })
            .collect();
        let index = entries.iter().enumerate().map(|(i, e)| (e.symbol.clone(), i)).collect();
        ReplacementMap { entries, index }
    }

    /// μ_⊥
    pub fn bottom(sig: &Signature) -> ReplacementMap {
        ReplacementMap::with(sig, false)
    }

    /// μ_⊤
    pub fn top(sig: &Signature) -> ReplacementMap {
        ReplacementMap::with(sig, true)
    }

    /// Start from μ_⊥ and set the listed entries.
    pub fn from_entries<'a, I>(sig: &Signature, entries: I) -> Result<ReplacementMap, RepMapError>
    where
        I: IntoIterator<Item = (&'a str, Vec<usize>)>,
    {
        let mut mu = ReplacementMap::bottom(sig);
        for (f, args) in entries {
            mu.set(f, args)?;
        }
        Ok(mu)
    }

    /// Add an entry for a symbol outside the original signature.
    pub fn extend(&mut self, symbol: Name, arity: usize, args: BTreeSet<usize>) {
        if let Some(&i) = self.index.get(&symbol) {
            self.entries[i] = Entry { symbol, arity, args };
        } else {
            self.index.insert(symbol.clone(), self.entries.len());
            self.entries.push(Entry { symbol, arity, args });
        }
    }

    pub fn set(&mut self, f: &str, args: impl IntoIterator<Item = usize>) -> Result<(), RepMapError> {
        let &i = self.index.get(f).ok_or_else(|| RepMapError::UnknownSymbol(f.into()))?;
        let entry = &mut self.entries[i];
        let mut set = BTreeSet::new();
        for a in args {
            if a == 0 || a > entry.arity {
                return Err(RepMapError::IndexOutOfRange { symbol: f.into(), index: a, arity: entry.arity });
            }
            set.insert(a);
        }
        entry.args = set;
        Ok(())
    }

    /// μ(f); ∅ for symbols outside the map.
    pub fn get(&self, f: &str) -> &BTreeSet<usize> {
        self.index.get(f).map(|&i| &self.entries[i].args).unwrap_or(&EMPTY)
    }

    pub fn contains(&self, f: &str, i: usize) -> bool {
        self.get(f).contains(&i)
    }

    pub fn arity(&self, f: &str) -> Option<usize> {
        self.index.get(f).map(|&i| self.entries[i].arity)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&Name, &BTreeSet<usize>)> {
        self.entries.iter().map(|e| (&e.symbol, &e.args))
    }

    fn same_domain(&self, other: &ReplacementMap) -> bool {
        self.entries.len() == other.entries.len()
            && self.entries.iter().all(|e| other.arity(&e.symbol) == Some(e.arity))
    }

    /// μ ⊔ μ'
    pub fn join(&self, other: &ReplacementMap) -> Result<ReplacementMap, RepMapError> {
        if !self.same_domain(other) {
            return Err(RepMapError::SignatureMismatch);
        }
        let mut out = self.clone();
        for e in &mut out.entries {
            e.args.extend(other.get(&e.symbol).iter().copied());
        }
        Ok(out)
    }

    /// μ ⊓ μ'
    pub fn meet(&self, other: &ReplacementMap) -> Result<ReplacementMap, RepMapError> {
        if !self.same_domain(other) {
            return Err(RepMapError::SignatureMismatch);
        }
        let mut out = self.clone();
        for e in &mut out.entries {
            let keep = other.get(&e.symbol);
            e.args.retain(|i| keep.contains(i));
        }
        Ok(out)
    }

    /// μ ⊑ μ'
    pub fn leq(&self, other: &ReplacementMap) -> Result<bool, RepMapError> {
        if !self.same_domain(other) {
            return Err(RepMapError::SignatureMismatch);
        }
        Ok(self.entries.iter().all(|e| e.args.is_subset(other.get(&e.symbol))))
    }

    /// Parse the textual form `(f 1 2) (g) (cons 1)`; omitted symbols map to ∅.
    pub fn parse(sig: &Signature, text: &str) -> Result<ReplacementMap, RepMapError> {
        let mut mu = ReplacementMap::bottom(sig);
        let spaced = text.replace('(', " ( ").replace(')', " ) ");
        let mut toks = spaced.split_whitespace().peekable();
        while let Some(tok) = toks.next() {
            if tok != "(" {
                return Err(RepMapError::Syntax(format!("expected `(`, found `{tok}`")));
            }
            let f = toks
                .next()
                .filter(|t| *t != ")" && *t != "(")
                .ok_or_else(|| RepMapError::Syntax("expected a symbol after `(`".into()))?;
            let mut args = Vec::new();
            loop {
                match toks.next() {
                    Some(")") => break,
                    Some(n) => {
                        args.push(n.parse::<usize>().map_err(|_| RepMapError::Syntax(format!("bad index `{n}`")))?)
                    }
                    None => return Err(RepMapError::Syntax("unterminated entry".into())),
                }
            }
            mu.set(f, args)?;
        }
        Ok(mu)
    }

    /// Human form `f ↦ {1, 2}` lines.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!("μ({}) = {}\n", e.symbol, fmt_set(&e.args)));
        }
        out
    }
}

pub fn fmt_set(s: &BTreeSet<usize>) -> String {
    if s.is_empty() {
        "∅".into()
    } else {
        let items: Vec<String> = s.iter().map(usize::to_string).collect();
        format!("{{{}}}", items.join(","))
    }
}

impl fmt::Display for ReplacementMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.entries.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "({}", e.symbol)?;
            for a in &e.args {
                write!(f, " {a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl Serialize for ReplacementMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.entries.len()))?;
        for e in &self.entries {
            m.serialize_entry(&*e.symbol, &e.args)?;
        }
        m.end()
    }
}

/// Is `p` a μ-replacing position of `t`?
pub fn is_replacing(t: &Term, p: &Position, mu: &ReplacementMap) -> bool {
    let mut cur = t;
    for &i in p.indices() {
        let Term::App(f, args) = cur else { return false };
        if !mu.contains(f, i) {
            return false;
        }
        match args.get(i - 1) {
            Some(a) => cur = a,
            None => return false,
        }
    }
    true
}

/// Pos^μ(t), in pre-order.
pub fn replacing_positions(t: &Term, mu: &ReplacementMap) -> Vec<Position> {
    let mut out = Vec::new();
    fn go(t: &Term, mu: &ReplacementMap, path: &mut Vec<usize>, out: &mut Vec<Position>) {
        out.push(Position::from(path.clone()));
        if let Term::App(f, args) = t {
            for &i in mu.get(f) {
                path.push(i);
                go(&args[i - 1], mu, path, out);
                path.pop();
            }
        }
    }
    go(t, mu, &mut Vec::new(), &mut out);
    out
}

/// Pos^μ_s(t) = Pos^μ(t) ∩ Pos_s(t)
pub fn replacing_positions_of(s: &Term, t: &Term, mu: &ReplacementMap) -> Vec<Position> {
    replacing_positions(t, mu).into_iter().filter(|p| t.get(p) == Some(s)).collect()
}

/// Var^μ(t): variables occurring at μ-replacing positions.
pub fn replacing_vars(t: &Term, mu: &ReplacementMap) -> BTreeSet<Var> {
    replacing_positions(t, mu).iter().filter_map(|p| t.get(p).and_then(Term::as_var).cloned()).collect()
}

/// μ_t: the least map compatible with `t`.
pub fn minimum_compatible_map(t: &Term, sig: &Signature) -> ReplacementMap {
    let mut mu = ReplacementMap::bottom(sig);
    add_minimum(t, &mut mu);
    mu
}

fn add_minimum(t: &Term, mu: &mut ReplacementMap) {
    if let Term::App(f, args) = t {
        for a in args.iter() {
            add_minimum(a, mu);
        }
        let mut set = mu.get(f).clone();
        set.extend(args.iter().enumerate().filter(|(_, a)| !a.is_var()).map(|(i, _)| i + 1));
        mu.set(f, set).expect("term symbols belong to the signature");
    }
}

/// μcan_R = ⊔ μ_l over the left-hand sides.
pub fn canonical_map(trs: &Trs) -> ReplacementMap {
    let mut mu = ReplacementMap::bottom(trs.signature());
    for l in trs.lhss() {
        add_minimum(l, &mut mu);
    }
    mu
}

/// μcan_R by the direct calculus: i ∈ μcan(f) iff some lhs has a
/// non-variable position p rooted by f with p.i non-variable.
pub fn canonical_map_direct(trs: &Trs) -> ReplacementMap {
    let mut sets: HashMap<Name, BTreeSet<usize>> = HashMap::new();
    for l in trs.lhss() {
        let pf: BTreeSet<Position> = l.positions_f().into_iter().collect();
        for p in &pf {
            let f = l.get(p).and_then(Term::root).expect("non-variable position");
            for i in 1..=l.get(p).map_or(0, |s| s.args().len()) {
                if pf.contains(&p.child(i)) {
                    sets.entry(f.clone()).or_default().insert(i);
                }
            }
        }
    }
    let mut mu = ReplacementMap::bottom(trs.signature());
    for (f, s) in sets {
        mu.set(&f, s).expect("lhs symbols belong to the signature");
    }
    mu
}

/// μ ∈ CM_R, i.e. μcan_R ⊑ μ.
pub fn is_canonical_for(mu: &ReplacementMap, trs: &Trs) -> bool {
    canonical_map(trs).leq(mu).unwrap_or(false)
}

/// μ_Δ: data arguments of data constructors are replacing, nothing else.
pub fn mu_delta(trs: &Trs) -> Result<ReplacementMap, RepMapError> {
    let sig = trs.signature();
    if !sig.is_sorted() {
        return Err(RepMapError::Unsorted);
    }
    let mut mu = ReplacementMap::bottom(sig);
    for d in sig.symbols() {
        if !trs.is_defined(&d.name) && sig.sort_kind(&d.result) == Some(SortKind::Data) {
            mu.set(&d.name, sig.data_args(&d.name))?;
        }
    }
    Ok(mu)
}

/// The map of Zantema and Raffelsieper: every argument of a defined symbol,
/// the data arguments of every constructor.
pub fn zr10_map(trs: &Trs) -> Result<ReplacementMap, RepMapError> {
    let sig = trs.signature();
    if !sig.is_sorted() {
        return Err(RepMapError::Unsorted);
    }
    let mut mu = ReplacementMap::bottom(sig);
    for d in sig.symbols() {
        if trs.is_defined(&d.name) {
            mu.set(&d.name, 1..=d.arity())?;
        } else {
            mu.set(&d.name, sig.data_args(&d.name))?;
        }
    }
    Ok(mu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Compatibility {
    Incompatible,
    Compatible,
    StronglyCompatible,
}

/// Compare Pos_F(t) with Pos^μ(t).
pub fn compatibility(mu: &ReplacementMap, t: &Term) -> Compatibility {
    let pf: BTreeSet<Position> = t.positions_f().into_iter().collect();
    let pmu: BTreeSet<Position> = replacing_positions(t, mu).into_iter().collect();
    if pf == pmu {
        Compatibility::StronglyCompatible
    } else if pf.is_subset(&pmu) {
        Compatibility::Compatible
    } else {
        Compatibility::Incompatible
    }
}

/// The weakest classification over a set of terms.
pub fn compatibility_all<'a>(mu: &ReplacementMap, ts: impl IntoIterator<Item = &'a Term>) -> Compatibility {
    ts.into_iter().map(|t| compatibility(mu, t)).min().unwrap_or(Compatibility::StronglyCompatible)
}
