//! Definitional trees for constructor systems.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::term::{match_pattern, Name, Position, Term, Trs, Var};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "node")]
pub enum DefTree {
    /// `pattern` is a variant of the lhs of rule `rule`.
    Leaf { pattern: Term, rule: usize },
    /// No rule covers `pattern`.
    Exempt { pattern: Term },
    /// Case split on the variable at `position`, one child per constructor.
    Branch { pattern: Term, position: Position, children: Vec<(Name, DefTree)> },
}

impl DefTree {
    pub fn pattern(&self) -> &Term {
        match self {
            DefTree::Leaf { pattern, .. } | DefTree::Exempt { pattern } | DefTree::Branch { pattern, .. } => pattern,
        }
    }

    fn fmt_indent(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match self {
            DefTree::Leaf { pattern, rule } => writeln!(f, "{pad}{pattern}  [rule {}]", rule + 1),
            DefTree::Exempt { pattern } => writeln!(f, "{pad}{pattern}  [exempt]"),
            DefTree::Branch { pattern, position, children } => {
                writeln!(f, "{pad}{pattern}  [split at {position}]")?;
                children.iter().try_for_each(|(_, c)| c.fmt_indent(f, depth + 1))
            }
        }
    }
}

impl fmt::Display for DefTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indent(f, 0)
    }
}

/// A definitional tree for `f`, if one exists. Inductive positions are tried
/// left to right, with backtracking.
pub fn definitional_tree(trs: &Trs, f: &str) -> Option<DefTree> {
    let decl = trs.signature().symbol(f)?;
    let rules: Vec<usize> = (0..trs.rules().len()).filter(|&i| &**trs.rules()[i].root() == f).collect();
    if rules.iter().any(|&i| !trs.rules()[i].lhs.args().iter().all(|a| trs.is_constructor_term(a))) {
        return None;
    }
    let mut used = BTreeSet::new();
    let args = decl
        .arg_sorts
        .iter()
        .enumerate()
        .map(|(k, sort)| {
            let hint = rules.iter().find_map(|&i| trs.rules()[i].lhs.args()[k].as_var().map(|v| v.name.clone()));
            let name = pick_name(hint, &used, k);
            used.insert(name.clone());
            Term::Var(Var { name, sort: sort.clone() })
        })
        .collect();
    build(trs, Term::app_name(decl.name.clone(), args), &rules)
}

fn pick_name(hint: Option<Name>, used: &BTreeSet<Name>, k: usize) -> Name {
    if let Some(h) = hint.filter(|h| !used.contains(h)) {
        return h;
    }
    let base = ["x", "y", "z", "u", "v", "w"];
    (0..)
        .flat_map(|n| base.iter().map(move |b| if n == 0 { b.to_string() } else { format!("{b}{n}") }))
        .skip(k % base.len())
        .map(|s| Name::from(s.as_str()))
        .find(|s| !used.contains(s))
        .expect("infinite supply")
}

fn build(trs: &Trs, pattern: Term, rules: &[usize]) -> Option<DefTree> {
    if rules.is_empty() {
        return Some(DefTree::Exempt { pattern });
    }
    let lhs = |i: usize| &trs.rules()[i].lhs;
    if let Some(&i) = rules.iter().find(|&&i| lhs(i).is_variant(&pattern)) {
        return (rules.len() == 1).then_some(DefTree::Leaf { pattern, rule: i });
    }
    let candidates: Vec<Position> = pattern
        .positions_x()
        .into_iter()
        .filter(|p| rules.iter().all(|&i| lhs(i).get(p).is_some_and(|t| !t.is_var())))
        .collect();
    'next: for o in candidates {
        let Term::Var(split) = pattern.get(&o).expect("variable position") else { unreachable!() };
        let mut children = Vec::new();
        for c in trs.constructors_of(&split.sort) {
            let cdecl = trs.signature().symbol(&c).expect("declared");
            let sub: Vec<usize> =
                rules.iter().copied().filter(|&i| lhs(i).get(&o).and_then(Term::root) == Some(&c)).collect();
            let mut used: BTreeSet<Name> = pattern.vars().into_iter().filter(|v| v != split).map(|v| v.name).collect();
            let mut reusable = Some(split.name.clone());
            let args = cdecl
                .arg_sorts
                .iter()
                .enumerate()
                .map(|(k, sort)| {
                    let at = o.child(k + 1);
                    let hint =
                        sub.iter().find_map(|&i| lhs(i).get(&at).and_then(|t| t.as_var()).map(|v| v.name.clone()));
                    let hint = hint.filter(|h| !used.contains(h)).or_else(|| {
                        if *sort == split.sort {
                            reusable.take()
                        } else {
                            None
                        }
                    });
                    let name = pick_name(hint, &used, k);
                    if Some(&name) == reusable.as_ref() {
                        reusable = None;
                    }
                    used.insert(name.clone());
                    Term::Var(Var { name, sort: sort.clone() })
                })
                .collect();
            let child_pattern = pattern.replace_at(&o, Term::app_name(c.clone(), args)).expect("valid position");
            let Some(child) = build(trs, child_pattern, &sub) else { continue 'next };
            children.push((c, child));
        }
        return Some(DefTree::Branch { pattern, position: o, children });
    }
    None
}

/// Every defined symbol has a definitional tree. Requires a constructor system.
pub fn is_inductively_sequential(trs: &Trs) -> bool {
    trs.defined().iter().all(|f| definitional_tree(trs, f).is_some())
}

/// Renaming θ with θ(lhs) = pattern for a leaf.
pub fn leaf_renaming(trs: &Trs, pattern: &Term, rule: usize) -> crate::term::Substitution {
    match_pattern(&trs.rules()[rule].lhs, pattern).expect("leaf pattern is a variant of its rule")
}
