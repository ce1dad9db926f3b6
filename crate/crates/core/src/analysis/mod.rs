//! Structural properties of a TRS.

mod deftree;
mod exhaustive;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

pub use deftree::{definitional_tree, is_inductively_sequential, leaf_renaming, DefTree};
pub use exhaustive::{finite_ground_terms, inhabited_sorts, is_exhaustive, Exhaustiveness};

use crate::repmap::{canonical_map, compatibility, compatibility_all, minimum_compatible_map, Compatibility};
use crate::term::{critical_pairs, Name, Term, Trs};

pub fn is_left_linear(trs: &Trs) -> bool {
    trs.rules().iter().all(|r| r.lhs.is_linear())
}

/// Every lhs has the form f(t1,..,tk) with constructor terms ti.
pub fn is_constructor_system(trs: &Trs) -> bool {
    trs.rules().iter().all(|r| r.lhs.args().iter().all(|a| trs.is_constructor_term(a)))
}

pub fn is_collapsing_free(trs: &Trs) -> bool {
    trs.rules().iter().all(|r| !r.is_collapsing())
}

/// Left-linear without critical pairs.
pub fn is_orthogonal(trs: &Trs) -> bool {
    is_left_linear(trs) && critical_pairs(trs).is_empty()
}

/// Every lhs argument is a variable or a constructor applied to variables.
pub fn is_proper(trs: &Trs) -> bool {
    trs.rules().iter().all(|r| r.lhs.args().iter().all(|a| is_flat_pattern(trs, a)))
}

fn is_flat_pattern(trs: &Trs, t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App(c, args) => !trs.is_defined(c) && args.iter().all(Term::is_var),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ShallowInfo {
    pub shallow: bool,
    /// I_f: the pattern-matching argument indices of each defined symbol.
    pub index_sets: BTreeMap<Name, BTreeSet<usize>>,
    pub reason: Option<String>,
}

fn pattern_indices(trs: &Trs, lhs: &Term) -> Option<BTreeSet<usize>> {
    let mut out = BTreeSet::new();
    for (i, a) in lhs.args().iter().enumerate() {
        if !is_flat_pattern(trs, a) {
            return None;
        }
        if !a.is_var() {
            out.insert(i + 1);
        }
    }
    Some(out)
}

/// Left-linear constructor system in which every rule of f matches flat
/// constructor patterns exactly on the arguments I_f.
pub fn shallow_info(trs: &Trs) -> ShallowInfo {
    let mut index_sets = BTreeMap::new();
    let mut reason = None;
    if !is_left_linear(trs) {
        reason = Some("not left-linear".to_string());
    }
    for f in trs.defined() {
        let mut set: Option<BTreeSet<usize>> = None;
        for r in trs.rules_for(f) {
            let Some(ix) = pattern_indices(trs, &r.lhs) else {
                reason.get_or_insert_with(|| format!("rule {} has a nested pattern", r.label));
                continue;
            };
            match &set {
                None => set = Some(ix),
                Some(s) if *s != ix => {
                    reason.get_or_insert_with(|| format!("rules for {f} match on different arguments"));
                }
                Some(_) => {}
            }
        }
        index_sets.insert(f.clone(), set.unwrap_or_default());
    }
    ShallowInfo { shallow: reason.is_none(), index_sets, reason }
}

pub fn is_shallow(trs: &Trs) -> bool {
    shallow_info(trs).shallow
}

/// Whether a single defined symbol's rules are shallow.
pub fn is_symbol_shallow(trs: &Trs, f: &str) -> bool {
    let rules = trs.rules_for(f);
    let Some(first) = rules.first() else { return true };
    let Some(ix) = pattern_indices(trs, &first.lhs) else { return false };
    rules.iter().all(|r| r.lhs.is_linear() && pattern_indices(trs, &r.lhs).as_ref() == Some(&ix))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CompatibilityClass {
    /// Every lhs is strongly compatible with the canonical map.
    Strong,
    /// Every lhs is strongly compatible with its own minimum map only.
    Weak,
    None,
}

/// Each lhs is strongly compatible with its own minimum map.
pub fn is_weakly_compatible(trs: &Trs) -> bool {
    trs.lhss()
        .into_iter()
        .all(|l| compatibility(&minimum_compatible_map(l, trs.signature()), l) == Compatibility::StronglyCompatible)
}

pub fn compatibility_class(trs: &Trs) -> CompatibilityClass {
    let mu = canonical_map(trs);
    if compatibility_all(&mu, trs.lhss()) == Compatibility::StronglyCompatible {
        return CompatibilityClass::Strong;
    }
    if is_weakly_compatible(trs) {
        CompatibilityClass::Weak
    } else {
        CompatibilityClass::None
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisReport {
    pub sorted: bool,
    pub defined: Vec<Name>,
    pub constructors: Vec<Name>,
    pub left_linear: bool,
    pub constructor_system: bool,
    pub orthogonal: bool,
    pub critical_pairs: usize,
    pub collapsing_free: bool,
    pub proper: bool,
    pub shallow: ShallowInfo,
    pub inductively_sequential: bool,
    pub compatibility: CompatibilityClass,
    pub strong_compat: bool,
    pub weak_compat: bool,
    pub exhaustive: Exhaustiveness,
    /// Sorted, orthogonal, exhaustive constructor system.
    pub tree_specification: bool,
    pub notes: Vec<String>,
}

pub fn analyze(trs: &Trs) -> AnalysisReport {
    let cps = critical_pairs(trs);
    let constructor_system = is_constructor_system(trs);
    let orthogonal = is_left_linear(trs) && cps.is_empty();
    let exhaustive = is_exhaustive(trs);
    let compatibility = compatibility_class(trs);
    let mut notes = Vec::new();
    let inductively_sequential = constructor_system && {
        let missing: Vec<String> =
            trs.defined().iter().filter(|f| definitional_tree(trs, f).is_none()).map(|f| f.to_string()).collect();
        if !missing.is_empty() {
            notes.push(format!("no definitional tree for {}", missing.join(", ")));
        }
        missing.is_empty()
    };
    if !constructor_system {
        notes.push("not a constructor system: inductive sequentiality does not apply".into());
    }
    AnalysisReport {
        sorted: trs.is_sorted(),
        defined: trs.defined().iter().cloned().collect(),
        constructors: trs.constructors(),
        left_linear: is_left_linear(trs),
        constructor_system,
        orthogonal,
        critical_pairs: cps.len(),
        collapsing_free: is_collapsing_free(trs),
        proper: is_proper(trs),
        shallow: shallow_info(trs),
        inductively_sequential,
        compatibility,
        strong_compat: compatibility == CompatibilityClass::Strong,
        weak_compat: is_weakly_compatible(trs),
        tree_specification: trs.is_sorted() && orthogonal && exhaustive.is_yes() && constructor_system,
        exhaustive,
        notes,
    }
}

impl AnalysisReport {
    pub fn to_text(&self) -> String {
        let yn = |b: bool| if b { "yes" } else { "no" };
        let mut s = String::new();
        let mut line = |k: &str, v: String| s.push_str(&format!("{k:<24}{v}\n"));
        line("sorted", yn(self.sorted).into());
        line("defined", join(&self.defined));
        line("constructors", join(&self.constructors));
        line("left-linear", yn(self.left_linear).into());
        line("constructor system", yn(self.constructor_system).into());
        line("orthogonal", format!("{} ({} critical pairs)", yn(self.orthogonal), self.critical_pairs));
        line("collapsing-free", yn(self.collapsing_free).into());
        line("proper", yn(self.proper).into());
        let mut sh = yn(self.shallow.shallow).to_string();
        if let Some(r) = &self.shallow.reason {
            sh.push_str(&format!(" ({r})"));
        }
        line("shallow", sh);
        for (f, ix) in &self.shallow.index_sets {
            line(&format!("  I({f})"), crate::repmap::fmt_set(ix));
        }
        line("inductively sequential", yn(self.inductively_sequential).into());
        line("compatibility", format!("{:?}", self.compatibility).to_lowercase());
        let ex = match &self.exhaustive {
            Exhaustiveness::Yes { warnings } if warnings.is_empty() => "yes".to_string(),
            Exhaustiveness::Yes { warnings } => format!("yes (warning: {})", warnings.join("; ")),
            Exhaustiveness::No { witness, witnesses } if witnesses.len() == 1 => format!("no (witness {witness})"),
            Exhaustiveness::No { witnesses, .. } => {
                format!("no (witnesses {})", witnesses.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", "))
            }
            Exhaustiveness::Unknown { reason } => format!("unknown ({reason})"),
        };
        line("exhaustive", ex);
        line("tree specification", yn(self.tree_specification).into());
        for n in &self.notes {
            line("note", n.clone());
        }
        s
    }
}

fn join(names: &[Name]) -> String {
    names.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ")
}
