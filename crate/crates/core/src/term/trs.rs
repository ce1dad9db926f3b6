use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{Name, Signature, Term, TermError, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Constructor,
    Defined,
}

/// A rewrite rule l → r.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
    pub label: Name,
}

impl Rule {
    /// Checks that the lhs is not a variable and Var(r) ⊆ Var(l).
    pub fn new(label: &str, lhs: Term, rhs: Term) -> Result<Rule, TermError> {
        if lhs.is_var() {
            return Err(TermError::VariableLhs(label.into()));
        }
        let lvars = lhs.var_set();
        if let Some(v) = rhs.vars().into_iter().find(|v| !lvars.contains(v)) {
            return Err(TermError::UnboundVariable { label: label.into(), var: v.name });
        }
        Ok(Rule { lhs, rhs, label: label.into() })
    }

    pub fn root(&self) -> &Name {
        self.lhs.root().expect("rule lhs is never a variable")
    }

    pub fn is_collapsing(&self) -> bool {
        self.rhs.is_var()
    }

    /// Same rule with every variable renamed by `suffix`.
    pub fn renamed(&self, suffix: &str) -> Rule {
        Rule { lhs: self.lhs.rename_vars(suffix), rhs: self.rhs.rename_vars(suffix), label: self.label.clone() }
    }

    /// Equal up to variable renaming, ignoring labels.
    pub fn is_variant(&self, other: &Rule) -> bool {
        let pair = |r: &Rule| Term::app("→", vec![r.lhs.clone(), r.rhs.clone()]);
        pair(self).is_variant(&pair(other))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// A term rewriting system over a signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trs {
    sig: Signature,
    rules: Vec<Rule>,
    defined: BTreeSet<Name>,
}

impl Trs {
    /// Validates every rule against the signature.
    pub fn new(sig: Signature, rules: Vec<Rule>) -> Result<Trs, TermError> {
        for r in &rules {
            check_var_sorts(r)?;
            let ls = sig.sort_of(&r.lhs)?;
            let rs = sig.sort_of(&r.rhs)?;
            if ls != rs {
                return Err(TermError::RuleSortMismatch { label: r.label.clone(), lhs: ls, rhs: rs });
            }
        }
        let defined = rules.iter().map(|r| r.root().clone()).collect();
        Ok(Trs { sig, rules, defined })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, label: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| &*r.label == label)
    }

    pub fn is_sorted(&self) -> bool {
        self.sig.is_sorted()
    }

    /// D
    pub fn defined(&self) -> &BTreeSet<Name> {
        &self.defined
    }

    pub fn is_defined(&self, f: &str) -> bool {
        self.defined.contains(f)
    }

    pub fn classify(&self, f: &str) -> Classification {
        if self.is_defined(f) {
            Classification::Defined
        } else {
            Classification::Constructor
        }
    }

    /// C = F − D, in declaration order.
    pub fn constructors(&self) -> Vec<Name> {
        self.sig.symbols().iter().filter(|d| !self.is_defined(&d.name)).map(|d| d.name.clone()).collect()
    }

    /// Constructors whose result sort is `sort`, in declaration order.
    pub fn constructors_of(&self, sort: &str) -> Vec<Name> {
        self.sig
            .symbols()
            .iter()
            .filter(|d| &*d.result == sort && !self.is_defined(&d.name))
            .map(|d| d.name.clone())
            .collect()
    }

    /// L(R)
    pub fn lhss(&self) -> Vec<&Term> {
        self.rules.iter().map(|r| &r.lhs).collect()
    }

    pub fn rules_for(&self, f: &str) -> Vec<&Rule> {
        self.rules.iter().filter(|r| &**r.root() == f).collect()
    }

    /// Term built only from constructors and variables.
    pub fn is_constructor_term(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(f, args) => !self.is_defined(f) && args.iter().all(|a| self.is_constructor_term(a)),
        }
    }

    /// Same signature, different rules.
    pub fn with_rules(&self, rules: Vec<Rule>) -> Result<Trs, TermError> {
        Trs::new(self.sig.clone(), rules)
    }
}

fn check_var_sorts(r: &Rule) -> Result<(), TermError> {
    let mut seen: BTreeMap<Name, Name> = BTreeMap::new();
    for Var { name, sort } in r.lhs.vars().into_iter().chain(r.rhs.vars()) {
        if let Some(prev) = seen.insert(name.clone(), sort.clone()) {
            if prev != sort {
                return Err(TermError::VariableSortClash(name));
            }
        }
    }
    Ok(())
}

impl fmt::Display for Trs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}
