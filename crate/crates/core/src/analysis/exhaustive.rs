//! Coverage of constructor-term arguments by left-hand side patterns.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::term::{Name, Term, Trs};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "answer")]
pub enum Exhaustiveness {
    Yes {
        warnings: Vec<String>,
    },
    /// `witnesses` are disjoint uncovered prefixes; the first is reported.
    No {
        witness: Term,
        witnesses: Vec<Term>,
    },
    Unknown {
        reason: String,
    },
}

impl Exhaustiveness {
    pub fn is_yes(&self) -> bool {
        matches!(self, Exhaustiveness::Yes { .. })
    }
}

/// Sorts inhabited by possibly infinite constructor terms (greatest fixpoint).
pub fn inhabited_sorts(trs: &Trs) -> BTreeSet<Name> {
    let sig = trs.signature();
    let mut inhabited: BTreeSet<Name> = sig.sorts().iter().map(|s| s.name.clone()).collect();
    loop {
        let next: BTreeSet<Name> = inhabited
            .iter()
            .filter(|s| {
                trs.constructors_of(s).iter().any(|c| {
                    let decl = sig.symbol(c).expect("constructor is declared");
                    decl.arg_sorts.iter().all(|a| inhabited.contains(a))
                })
            })
            .cloned()
            .collect();
        if next == inhabited {
            return inhabited;
        }
        inhabited = next;
    }
}

/// A smallest finite ground constructor term for every sort that has one.
pub fn finite_ground_terms(trs: &Trs) -> BTreeMap<Name, Term> {
    let sig = trs.signature();
    let mut out: BTreeMap<Name, Term> = BTreeMap::new();
    loop {
        let mut changed = false;
        for d in sig.symbols() {
            if trs.is_defined(&d.name) {
                continue;
            }
            let Some(args) = d.arg_sorts.iter().map(|s| out.get(s).cloned()).collect::<Option<Vec<_>>>() else {
                continue;
            };
            let t = Term::app_name(d.name.clone(), args);
            let better = out.get(&d.result).is_none_or(|old| t.size() < old.size());
            if better {
                out.insert(d.result.clone(), t);
                changed = true;
            }
        }
        if !changed {
            return out;
        }
    }
}

struct Ctx<'a> {
    trs: &'a Trs,
    inhabited: BTreeSet<Name>,
    warnings: BTreeSet<String>,
    fresh: usize,
}

#[derive(Clone)]
enum Cell<'a> {
    Any,
    Con(&'a Name, &'a [Term]),
}

fn cell(t: &Term) -> Cell<'_> {
    match t {
        Term::Var(_) => Cell::Any,
        Term::App(f, args) => Cell::Con(f, args),
    }
}

impl<'a> Ctx<'a> {
    fn wildcard(&mut self, sort: &Name) -> Term {
        self.fresh += 1;
        Term::var(&format!("_{}", self.fresh), sort)
    }

    fn inhabited_constructors(&mut self, sort: &Name) -> Vec<Name> {
        let sig = self.trs.signature();
        let cs: Vec<Name> = self
            .trs
            .constructors_of(sort)
            .into_iter()
            .filter(|c| sig.symbol(c).expect("declared").arg_sorts.iter().all(|a| self.inhabited.contains(a)))
            .collect();
        cs
    }

    /// Value vectors of the given sorts matched by no row, as disjoint
    /// prefix patterns (at most `WITNESS_CAP`).
    fn uncovered(&mut self, rows: Vec<Vec<&'a Term>>, sorts: &[Name]) -> Vec<Vec<Term>> {
        let Some((sort, rest_sorts)) = sorts.split_first() else {
            return if rows.is_empty() { vec![Vec::new()] } else { Vec::new() };
        };
        if !self.inhabited.contains(sort) {
            self.warnings.insert(format!("sort {sort} is uninhabited; its arguments are covered vacuously"));
            return Vec::new();
        }
        let heads: BTreeSet<&Name> = rows
            .iter()
            .filter_map(|r| match cell(r[0]) {
                Cell::Con(f, _) => Some(f),
                Cell::Any => None,
            })
            .collect();
        let all = self.inhabited_constructors(sort);
        let sig = self.trs.signature();
        let mut out = Vec::new();
        if heads.is_empty() {
            let default: Vec<Vec<&'a Term>> = rows.iter().map(|r| r[1..].to_vec()).collect();
            for w in self.uncovered(default, rest_sorts) {
                let mut v = vec![self.wildcard(sort)];
                v.extend(w);
                out.push(v);
            }
            return out;
        }
        for c in &all {
            if out.len() >= WITNESS_CAP {
                break;
            }
            let arg_sorts = sig.symbol(c).expect("declared").arg_sorts.clone();
            let arity = arg_sorts.len();
            let spec: Vec<Vec<&'a Term>> = rows
                .iter()
                .filter_map(|r| match cell(r[0]) {
                    Cell::Con(f, args) if f == c => Some(args.iter().chain(r[1..].iter().copied()).collect()),
                    Cell::Con(..) => None,
                    Cell::Any => {
                        let mut v: Vec<&'a Term> = vec![r[0]; arity];
                        v.extend(r[1..].iter().copied());
                        Some(v)
                    }
                })
                .collect();
            let mut sorts2 = arg_sorts.clone();
            sorts2.extend(rest_sorts.iter().cloned());
            for mut w in self.uncovered(spec, &sorts2) {
                let rest = w.split_off(arity);
                let mut v = vec![Term::app_name(c.clone(), w)];
                v.extend(rest);
                out.push(v);
            }
        }
        out.truncate(WITNESS_CAP);
        out
    }
}

const WITNESS_CAP: usize = 64;

/// Decide whether every defined symbol applied to constructor terms is a redex.
pub fn is_exhaustive(trs: &Trs) -> Exhaustiveness {
    if !super::is_constructor_system(trs) {
        return Exhaustiveness::Unknown { reason: "not a constructor system".into() };
    }
    let mut ctx = Ctx { trs, inhabited: inhabited_sorts(trs), warnings: BTreeSet::new(), fresh: 0 };
    let mut witnesses = Vec::new();
    for r in trs.rules() {
        let f = r.root();
        if witnesses.iter().any(|w: &Term| w.root() == Some(f)) || trs.rules_for(f)[0].label != r.label {
            continue;
        }
        let decl = trs.signature().symbol(f).expect("defined symbols are declared");
        let rows: Vec<Vec<&Term>> = trs.rules_for(f).iter().map(|r| r.lhs.args().iter().collect()).collect();
        witnesses.extend(ctx.uncovered(rows, &decl.arg_sorts).into_iter().map(|w| Term::app_name(f.clone(), w)));
    }
    if let Some(first) = witnesses.first() {
        return Exhaustiveness::No { witness: first.clone(), witnesses };
    }
    if !super::is_left_linear(trs) {
        return Exhaustiveness::Unknown {
            reason: "repeated variables in left-hand sides; coverage treats them as independent".into(),
        };
    }
    Exhaustiveness::Yes { warnings: ctx.warnings.into_iter().collect() }
}
