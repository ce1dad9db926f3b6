use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Term, Var};

/// A finite map from variables to terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn insert(&mut self, v: Var, t: Term) {
        self.map.insert(v, t);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// σ(t)
    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        t.map_vars(&mut |v| self.map.get(v).cloned().unwrap_or_else(|| Term::Var(v.clone())))
    }

    /// Injective and maps variables to variables.
    pub fn is_renaming(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.map.values().all(|t| matches!(t, Term::Var(v) if seen.insert(v.clone())))
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        Substitution { map: iter.into_iter().collect() }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}↦{t}")?;
        }
        f.write_str("}")
    }
}

impl serde::Serialize for Substitution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.map.len()))?;
        for (v, t) in &self.map {
            m.serialize_entry(&*v.name, &t.to_string())?;
        }
        m.end()
    }
}

/// Syntactic matching: σ with σ(pattern) = subject. Variables of the
/// subject are treated as constants.
pub fn match_pattern(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    match_into(pattern, subject, &mut sigma).then_some(sigma)
}

pub(crate) fn match_into(pattern: &Term, subject: &Term, sigma: &mut Substitution) -> bool {
    match pattern {
        Term::Var(v) => match sigma.map.get(v) {
            Some(bound) => bound == subject,
            None => {
                sigma.map.insert(v.clone(), subject.clone());
                true
            }
        },
        Term::App(f, pargs) => match subject {
            Term::App(g, sargs) if f == g && pargs.len() == sargs.len() => {
                pargs.iter().zip(sargs.iter()).all(|(p, s)| match_into(p, s, sigma))
            }
            _ => false,
        },
    }
}

/// Most general unifier with occurs check. The result is idempotent.
pub fn unify(a: &Term, b: &Term) -> Option<Substitution> {
    let mut bind: BTreeMap<Var, Term> = BTreeMap::new();
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((s, t)) = stack.pop() {
        let s = walk(&s, &bind);
        let t = walk(&t, &bind);
        match (&s, &t) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), _) => {
                if occurs(x, &t, &bind) {
                    return None;
                }
                bind.insert(x.clone(), t.clone());
            }
            (_, Term::Var(y)) => {
                if occurs(y, &s, &bind) {
                    return None;
                }
                bind.insert(y.clone(), s.clone());
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return None;
                }
                stack.extend(fa.iter().cloned().zip(ga.iter().cloned()));
            }
        }
    }
    let keys: Vec<Var> = bind.keys().cloned().collect();
    Some(
        keys.into_iter()
            .map(|v| {
                let t = resolve(&Term::Var(v.clone()), &bind);
                (v, t)
            })
            .collect(),
    )
}

fn walk(t: &Term, bind: &BTreeMap<Var, Term>) -> Term {
    let mut t = t.clone();
    while let Term::Var(v) = &t {
        match bind.get(v) {
            Some(next) => t = next.clone(),
            None => break,
        }
    }
    t
}

fn occurs(x: &Var, t: &Term, bind: &BTreeMap<Var, Term>) -> bool {
    match walk(t, bind) {
        Term::Var(y) => &y == x,
        Term::App(_, args) => args.iter().any(|a| occurs(x, a, bind)),
    }
}

fn resolve(t: &Term, bind: &BTreeMap<Var, Term>) -> Term {
    match walk(t, bind) {
        Term::Var(v) => Term::Var(v),
        Term::App(f, args) => Term::App(f, args.iter().map(|a| resolve(a, bind)).collect::<Vec<_>>().into()),
    }
}
