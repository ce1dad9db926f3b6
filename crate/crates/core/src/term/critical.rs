use std::collections::BTreeMap;

use serde::Serialize;

use super::{unify, Name, Position, Term, Trs, Var};

/// A critical pair ⟨left, right⟩ from the overlap of `inner` into `outer`
/// at `position`; `peak` is the overlapped term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalPair {
    pub left: Term,
    pub right: Term,
    pub peak: Term,
    pub outer: Name,
    pub inner: Name,
    pub position: Position,
}

/// All critical pairs of the rules, excluding root overlaps of a rule with itself.
pub fn critical_pairs(trs: &Trs) -> Vec<CriticalPair> {
    let mut out = Vec::new();
    for (i, outer) in trs.rules().iter().enumerate() {
        let outer = outer.renamed("#1");
        for (j, inner) in trs.rules().iter().enumerate() {
            let inner = inner.renamed("#2");
            for p in outer.lhs.positions_f() {
                if i == j && p.is_root() {
                    continue;
                }
                let sub = outer.lhs.get(&p).expect("position from positions_f");
                let Some(theta) = unify(sub, &inner.lhs) else { continue };
                let peak = theta.apply(&outer.lhs);
                let left = theta.apply(&outer.lhs.replace_at(&p, inner.rhs.clone()).expect("valid position"));
                let right = theta.apply(&outer.rhs);
                let [peak, left, right] = tidy([peak, left, right]);
                out.push(CriticalPair {
                    left,
                    right,
                    peak,
                    outer: outer.label.clone(),
                    inner: inner.label.clone(),
                    position: p,
                });
            }
        }
    }
    out
}

/// Strip renaming suffixes where that causes no clash.
fn tidy(terms: [Term; 3]) -> [Term; 3] {
    let mut by_base: BTreeMap<String, Vec<Var>> = BTreeMap::new();
    for t in &terms {
        for v in t.vars() {
            let base = v.name.split('#').next().unwrap_or_default().to_string();
            let entry = by_base.entry(base).or_default();
            if !entry.contains(&v) {
                entry.push(v);
            }
        }
    }
    let mut rename: BTreeMap<Var, Term> = BTreeMap::new();
    for (base, vars) in by_base {
        for (k, v) in vars.iter().enumerate() {
            let name = format!("{base}{}", "'".repeat(k));
            rename.insert(v.clone(), Term::Var(Var { name: name.into(), sort: v.sort.clone() }));
        }
    }
    terms.map(|t| t.map_vars(&mut |v| rename[v].clone()))
}
