use std::collections::HashMap;

use serde::Serialize;

use super::{Name, Term, TermError};
use crate::term::Position;

/// Name of the single sort given to unsorted input.
pub const UNSORTED: &str = "U";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SortKind {
    Data,
    Codata,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sort {
    pub name: Name,
    pub kind: SortKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolDecl {
    pub name: Name,
    pub arg_sorts: Vec<Name>,
    pub result: Name,
}

impl SymbolDecl {
    pub fn arity(&self) -> usize {
        self.arg_sorts.len()
    }
}

/// Sorts and function symbols, in declaration order.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    sorted: bool,
    sorts: Vec<Sort>,
    symbols: Vec<SymbolDecl>,
    index: HashMap<Name, usize>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.sorted == other.sorted && self.sorts == other.sorts && self.symbols == other.symbols
    }
}

impl Eq for Signature {}

impl Signature {
    /// An empty sorted signature.
    pub fn sorted() -> Signature {
        Signature { sorted: true, ..Signature::default() }
    }

    /// An unsorted signature: everything lives in the data sort `U`.
    pub fn unsorted() -> Signature {
        Signature {
            sorted: false,
            sorts: vec![Sort { name: UNSORTED.into(), kind: SortKind::Data }],
            ..Signature::default()
        }
    }

    pub fn is_sorted(&self) -> bool {
        self.sorted
    }

    pub fn add_sort(&mut self, name: &str, kind: SortKind) -> Result<(), TermError> {
        if self.sort(name).is_some() {
            return Err(TermError::DuplicateSymbol(name.into()));
        }
        self.sorts.push(Sort { name: name.into(), kind });
        Ok(())
    }

    pub fn declare(&mut self, name: &str, arg_sorts: &[&str], result: &str) -> Result<(), TermError> {
        let decl = SymbolDecl {
            name: name.into(),
            arg_sorts: arg_sorts.iter().map(|s| Name::from(*s)).collect(),
            result: result.into(),
        };
        self.declare_decl(decl)
    }

    pub fn declare_decl(&mut self, decl: SymbolDecl) -> Result<(), TermError> {
        if self.index.contains_key(&decl.name) {
            return Err(TermError::DuplicateSymbol(decl.name));
        }
        for s in decl.arg_sorts.iter().chain(std::iter::once(&decl.result)) {
            if self.sort(s).is_none() {
                return Err(TermError::UnknownSort(s.clone()));
            }
        }
        self.index.insert(decl.name.clone(), self.symbols.len());
        self.symbols.push(decl);
        Ok(())
    }

    /// Declare an unsorted symbol of the given arity.
    pub fn declare_unsorted(&mut self, name: &str, arity: usize) -> Result<(), TermError> {
        let args = vec![UNSORTED; arity];
        self.declare(name, &args, UNSORTED)
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn sort(&self, name: &str) -> Option<&Sort> {
        self.sorts.iter().find(|s| &*s.name == name)
    }

    pub fn sort_kind(&self, name: &str) -> Option<SortKind> {
        self.sort(name).map(|s| s.kind)
    }

    pub fn symbols(&self) -> &[SymbolDecl] {
        &self.symbols
    }

    pub fn symbol(&self, name: &str) -> Option<&SymbolDecl> {
        self.index.get(name).map(|&i| &self.symbols[i])
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbol(name).map(SymbolDecl::arity)
    }

    /// 1-based indices of the data-sorted arguments of `f`.
    pub fn data_args(&self, f: &str) -> Vec<usize> {
        let Some(decl) = self.symbol(f) else { return Vec::new() };
        decl.arg_sorts
            .iter()
            .enumerate()
            .filter(|(_, s)| self.sort_kind(s) == Some(SortKind::Data))
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// ar_Δ(f)
    pub fn data_arity(&self, f: &str) -> usize {
        self.data_args(f).len()
    }

    /// ar_Γ(f)
    pub fn codata_arity(&self, f: &str) -> usize {
        self.arity(f).unwrap_or(0) - self.data_arity(f)
    }

    /// Sort of a term, checking the whole term is well-sorted.
    pub fn sort_of(&self, t: &Term) -> Result<Name, TermError> {
        match t {
            Term::Var(v) => {
                if self.sort(&v.sort).is_none() {
                    return Err(TermError::UnknownSort(v.sort.clone()));
                }
                Ok(v.sort.clone())
            }
            Term::App(f, args) => {
                let decl = self.symbol(f).ok_or_else(|| TermError::UnknownSymbol(f.clone()))?;
                if decl.arity() != args.len() {
                    return Err(TermError::ArityMismatch {
                        symbol: f.clone(),
                        expected: decl.arity(),
                        found: args.len(),
                    });
                }
                for (a, expected) in args.iter().zip(&decl.arg_sorts) {
                    let found = self.sort_of(a)?;
                    if &found != expected {
                        return Err(TermError::SortMismatch { expected: expected.clone(), found });
                    }
                }
                Ok(decl.result.clone())
            }
        }
    }

    /// t[s]_p, requiring s to have the sort of t|_p.
    pub fn replace_at(&self, t: &Term, p: &Position, s: Term) -> Result<Term, TermError> {
        let old = self.sort_of(t.subterm_at(p)?)?;
        let new = self.sort_of(&s)?;
        if old != new {
            return Err(TermError::SortMismatch { expected: old, found: new });
        }
        t.replace_at(p, s)
    }
}
