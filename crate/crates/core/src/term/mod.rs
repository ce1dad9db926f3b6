//! First-order sorted terms, positions and substitutions.

mod critical;
mod position;
mod signature;
mod subst;
mod trs;

pub use critical::{critical_pairs, CriticalPair};
pub use position::Position;
pub use signature::{Signature, Sort, SortKind, SymbolDecl, UNSORTED};
pub use subst::{match_pattern, unify, Substitution};
pub use trs::{Classification, Rule, Trs};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Interned-ish symbol, sort and variable names.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("position {position} is not valid in {term}")]
    InvalidPosition { position: Position, term: String },
    #[error("sort mismatch: expected {expected}, found {found}")]
    SortMismatch { expected: Name, found: Name },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(Name),
    #[error("unknown sort `{0}`")]
    UnknownSort(Name),
    #[error("symbol `{symbol}` expects {expected} arguments, got {found}")]
    ArityMismatch { symbol: Name, expected: usize, found: usize },
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(Name),
    #[error("rule {0}: left-hand side is a variable")]
    VariableLhs(Name),
    #[error("rule {label}: variable `{var}` of the right-hand side does not occur on the left")]
    UnboundVariable { label: Name, var: Name },
    #[error("rule {label}: left-hand side has sort {lhs}, right-hand side has sort {rhs}")]
    RuleSortMismatch { label: Name, lhs: Name, rhs: Name },
    #[error("variable `{0}` used with two different sorts")]
    VariableSortClash(Name),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Name,
    pub sort: Name,
}

impl Var {
    pub fn new(name: &str, sort: &str) -> Var {
        Var { name: name.into(), sort: sort.into() }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A finite term. Arguments are shared, so cloning and rebuilding along a
/// path are cheap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App(Name, Arc<[Term]>),
}

impl Term {
    pub fn var(name: &str, sort: &str) -> Term {
        Term::Var(Var::new(name, sort))
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(f.into(), args.into())
    }

    pub fn app_name(f: Name, args: Vec<Term>) -> Term {
        Term::App(f, args.into())
    }

    pub fn constant(c: &str) -> Term {
        Term::App(c.into(), Arc::from(Vec::new()))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    /// Root symbol, `None` for variables.
    pub fn root(&self) -> Option<&Name> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.visit_vars(&mut |v| {
            if !out.contains(v) {
                out.push(v.clone());
            }
        });
        out
    }

    pub fn var_set(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    fn visit_vars<'a>(&'a self, f: &mut impl FnMut(&'a Var)) {
        match self {
            Term::Var(v) => f(v),
            Term::App(_, args) => args.iter().for_each(|a| a.visit_vars(f)),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// No variable occurs twice.
    pub fn is_linear(&self) -> bool {
        let mut seen = BTreeSet::new();
        let mut linear = true;
        self.visit_vars(&mut |v| linear &= seen.insert(v.clone()));
        linear
    }

    /// Function symbols occurring in the term.
    pub fn symbols(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for (_, t) in self.subterms() {
            if let Some(f) = t.root() {
                out.insert(f.clone());
            }
        }
        out
    }

    /// All subterms with their positions, in pre-order.
    pub fn subterms(&self) -> Vec<(Position, &Term)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        fn go<'a>(t: &'a Term, path: &mut Vec<usize>, out: &mut Vec<(Position, &'a Term)>) {
            out.push((Position::from(path.clone()), t));
            for (i, a) in t.args().iter().enumerate() {
                path.push(i + 1);
                go(a, path, out);
                path.pop();
            }
        }
        go(self, &mut path, &mut out);
        out
    }

    /// Pos(t).
    pub fn positions(&self) -> Vec<Position> {
        self.subterms().into_iter().map(|(p, _)| p).collect()
    }

    /// Pos_F(t): positions of function symbols.
    pub fn positions_f(&self) -> Vec<Position> {
        self.subterms().into_iter().filter(|(_, t)| !t.is_var()).map(|(p, _)| p).collect()
    }

    /// Pos_X(t): positions of variables.
    pub fn positions_x(&self) -> Vec<Position> {
        self.subterms().into_iter().filter(|(_, t)| t.is_var()).map(|(p, _)| p).collect()
    }

    /// Positions where `s` occurs as a subterm.
    pub fn positions_of(&self, s: &Term) -> Vec<Position> {
        self.subterms().into_iter().filter(|(_, t)| *t == s).map(|(p, _)| p).collect()
    }

    pub fn get(&self, p: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in p.indices() {
            t = t.args().get(i.checked_sub(1)?)?;
        }
        Some(t)
    }

    /// t|_p
    pub fn subterm_at(&self, p: &Position) -> Result<&Term, TermError> {
        self.get(p).ok_or_else(|| TermError::InvalidPosition { position: p.clone(), term: self.to_string() })
    }

    /// t[s]_p without sort checking; see [`Signature::replace_at`] for the checked form.
    pub fn replace_at(&self, p: &Position, s: Term) -> Result<Term, TermError> {
        fn go(t: &Term, path: &[usize], s: Term) -> Option<Term> {
            let Some((&i, rest)) = path.split_first() else {
                return Some(s);
            };
            let Term::App(f, args) = t else { return None };
            let child = args.get(i.checked_sub(1)?)?;
            let new_child = go(child, rest, s)?;
            let mut new_args = args.to_vec();
            new_args[i - 1] = new_child;
            Some(Term::App(f.clone(), new_args.into()))
        }
        go(self, p.indices(), s)
            .ok_or_else(|| TermError::InvalidPosition { position: p.clone(), term: self.to_string() })
    }

    /// Apply `f` to every variable.
    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Term) -> Term {
        match self {
            Term::Var(v) => f(v),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.map_vars(f)).collect::<Vec<_>>().into()),
        }
    }

    /// Rename every symbol through `f`, keeping the shape.
    pub fn map_symbols(&self, f: &mut impl FnMut(&Name) -> Name) -> Term {
        match self {
            Term::Var(v) => Term::Var(v.clone()),
            Term::App(g, args) => Term::App(f(g), args.iter().map(|a| a.map_symbols(f)).collect::<Vec<_>>().into()),
        }
    }

    /// Append `suffix` to every variable name.
    pub fn rename_vars(&self, suffix: &str) -> Term {
        self.map_vars(&mut |v| Term::Var(Var { name: format!("{}{}", v.name, suffix).into(), sort: v.sort.clone() }))
    }

    /// True if the two terms are equal up to a bijective renaming of variables.
    pub fn is_variant(&self, other: &Term) -> bool {
        match (match_pattern(self, other), match_pattern(other, self)) {
            (Some(a), Some(b)) => a.is_renaming() && b.is_renaming(),
            _ => false,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(&v.name),
            Term::App(g, args) => {
                f.write_str(g)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
