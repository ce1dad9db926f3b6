//! The μ-rewriting engine.
//!
//! Redexes are enumerated in post-order over μ-replacing positions
//! (leftmost-innermost first), then by rule order. With
//! [`ReplacementMap::top`] this is ordinary rewriting.

use std::fmt;

use serde::Serialize;

use crate::repmap::ReplacementMap;
use crate::term::{match_pattern, Name, Position, Substitution, Term, Trs};

/// A μ-replacing redex occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Redex {
    pub position: Position,
    /// Index into `Trs::rules`.
    pub rule: usize,
    pub subst: Substitution,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub enum RedexChoice {
    #[default]
    LeftmostInnermost,
    LeftmostOutermost,
}

impl fmt::Display for RedexChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RedexChoice::LeftmostInnermost => "leftmost-innermost",
            RedexChoice::LeftmostOutermost => "leftmost-outermost",
        })
    }
}

/// One μ-step s ↪ t at `position`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StepRecord {
    pub position: Position,
    pub rule_label: Name,
    pub before: Term,
    pub after: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Rewrote(StepRecord),
    NormalForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopReason {
    NormalForm,
    FuelExhausted,
    SizeBlowup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub initial: Term,
    pub steps: Vec<StepRecord>,
    pub strategy: RedexChoice,
    pub stop: StopReason,
}

impl Trace {
    pub fn exhausted_fuel(&self) -> bool {
        self.stop == StopReason::FuelExhausted
    }

    pub fn final_term(&self) -> &Term {
        self.steps.last().map_or(&self.initial, |s| &s.after)
    }

    /// One `<pos> <rule-label> <term-after>` line per step.
    pub fn to_lines(&self) -> String {
        self.steps.iter().map(|s| format!("{} {} {}\n", s.position, s.rule_label, s.after)).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NormalizeOptions {
    pub fuel: usize,
    pub choice: RedexChoice,
    /// Abort once a term exceeds this many nodes.
    pub max_size: usize,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions { fuel: 10_000, choice: RedexChoice::LeftmostInnermost, max_size: 100_000 }
    }
}

fn redexes_at(t: &Term, pos: &Position, trs: &Trs, out: &mut Vec<Redex>) {
    if t.is_var() {
        return;
    }
    for (k, rule) in trs.rules().iter().enumerate() {
        if let Some(subst) = match_pattern(&rule.lhs, t) {
            out.push(Redex { position: pos.clone(), rule: k, subst });
        }
    }
}

/// All μ-replacing redexes, leftmost-innermost first.
pub fn mu_redexes(t: &Term, trs: &Trs, mu: &ReplacementMap) -> Vec<Redex> {
    let mut out = Vec::new();
    fn go(t: &Term, pos: Position, trs: &Trs, mu: &ReplacementMap, out: &mut Vec<Redex>) {
        if let Term::App(f, args) = t {
            for &i in mu.get(f) {
                go(&args[i - 1], pos.child(i), trs, mu, out);
            }
        }
        redexes_at(t, &pos, trs, out);
    }
    go(t, Position::root(), trs, mu, &mut out);
    out
}

fn first_redex(t: &Term, trs: &Trs, mu: &ReplacementMap, choice: RedexChoice) -> Option<Redex> {
    fn go(t: &Term, pos: &mut Vec<usize>, trs: &Trs, mu: &ReplacementMap, outer: bool) -> Option<Redex> {
        let here = |pos: &Vec<usize>| {
            let mut v = Vec::new();
            redexes_at(t, &Position::from(pos.clone()), trs, &mut v);
            v.into_iter().next()
        };
        if outer {
            if let Some(r) = here(pos) {
                return Some(r);
            }
        }
        if let Term::App(f, args) = t {
            for &i in mu.get(f) {
                pos.push(i);
                let r = go(&args[i - 1], pos, trs, mu, outer);
                pos.pop();
                if r.is_some() {
                    return r;
                }
            }
        }
        if outer {
            None
        } else {
            here(pos)
        }
    }
    go(t, &mut Vec::new(), trs, mu, choice == RedexChoice::LeftmostOutermost)
}

/// Contract a redex.
pub fn contract(t: &Term, trs: &Trs, redex: &Redex) -> StepRecord {
    let rule = &trs.rules()[redex.rule];
    let after = t.replace_at(&redex.position, redex.subst.apply(&rule.rhs)).expect("redex position is valid");
    StepRecord { position: redex.position.clone(), rule_label: rule.label.clone(), before: t.clone(), after }
}

/// Apply rule `rule` at `position` if it matches there.
pub fn rewrite_at(t: &Term, trs: &Trs, rule: usize, position: &Position) -> Option<Term> {
    let r = trs.rules().get(rule)?;
    let subst = match_pattern(&r.lhs, t.get(position)?)?;
    t.replace_at(position, subst.apply(&r.rhs)).ok()
}

/// One μ-step with the chosen redex, or `NormalForm`.
pub fn step(t: &Term, trs: &Trs, mu: &ReplacementMap, choice: RedexChoice) -> Step {
    match first_redex(t, trs, mu, choice) {
        Some(r) => Step::Rewrote(contract(t, trs, &r)),
        None => Step::NormalForm,
    }
}

/// Iterate `step` until a μ-normal form, fuel exhaustion, or size blowup.
pub fn normalize(t: &Term, trs: &Trs, mu: &ReplacementMap, fuel: usize) -> Trace {
    normalize_with(t, trs, mu, &NormalizeOptions { fuel, ..NormalizeOptions::default() })
}

pub fn normalize_with(t: &Term, trs: &Trs, mu: &ReplacementMap, opts: &NormalizeOptions) -> Trace {
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut cur = t.clone();
    let stop = loop {
        if steps.len() >= opts.fuel {
            break if is_mu_normal_form(&cur, trs, mu) { StopReason::NormalForm } else { StopReason::FuelExhausted };
        }
        match step(&cur, trs, mu, opts.choice) {
            Step::NormalForm => break StopReason::NormalForm,
            Step::Rewrote(rec) => {
                if rec.after.size() > opts.max_size {
                    break StopReason::SizeBlowup;
                }
                cur = rec.after.clone();
                steps.push(rec);
            }
        }
    };
    Trace { initial: t.clone(), steps, strategy: opts.choice, stop }
}

/// t ∈ NF^μ_R
pub fn is_mu_normal_form(t: &Term, trs: &Trs, mu: &ReplacementMap) -> bool {
    first_redex(t, trs, mu, RedexChoice::LeftmostOutermost).is_none()
}

/// All one-step μ-reducts, in redex order.
pub fn reducts(t: &Term, trs: &Trs, mu: &ReplacementMap) -> Vec<StepRecord> {
    mu_redexes(t, trs, mu).iter().map(|r| contract(t, trs, r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, parse_term, SpecFile};

    fn corpus(name: &str) -> SpecFile {
        let path = format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"));
        parse(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    fn term(f: &SpecFile, s: &str) -> Term {
        parse_term(s, f.trs.signature(), &f.vars).unwrap()
    }

    #[test]
    fn frozen_redex_is_invisible() {
        let f = corpus("wallis.trs");
        let mu = f.strategy.clone().unwrap();
        let t = term(&f, "cons(0, incr(oddNs))");
        assert!(mu_redexes(&t, &f.trs, &mu).is_empty());
        assert!(is_mu_normal_form(&t, &f.trs, &mu));
        let top = ReplacementMap::top(f.trs.signature());
        let rs = mu_redexes(&t, &f.trs, &top);
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].position.to_string(), "2.1");
        assert_eq!(&*f.trs.rules()[rs[0].rule].label, "r2");
    }

    #[test]
    fn root_redex() {
        let f = corpus("wallis.trs");
        let mu = f.strategy.clone().unwrap();
        let t = term(&f, "evenNs");
        let rs = mu_redexes(&t, &f.trs, &mu);
        assert_eq!(rs.len(), 1);
        assert!(rs[0].position.is_root());
        assert_eq!(rs[0].rule, 0);
        assert!(rs[0].subst.is_empty());
        assert!(!is_mu_normal_form(&t, &f.trs, &mu));
    }

    #[test]
    fn single_steps() {
        let f = corpus("wallis.trs");
        let mu = f.strategy.clone().unwrap();
        match step(&term(&f, "oddNs"), &f.trs, &mu, RedexChoice::default()) {
            Step::Rewrote(r) => {
                assert!(r.position.is_root());
                assert_eq!(r.after.to_string(), "incr(evenNs)");
            }
            Step::NormalForm => panic!("oddNs is a redex"),
        }
        assert_eq!(step(&term(&f, "0"), &f.trs, &mu, RedexChoice::default()), Step::NormalForm);
        let z = corpus("zip_alt_p.trs");
        let zmu = z.strategy.clone().unwrap();
        match step(&term(&z, "p"), &z.trs, &zmu, RedexChoice::default()) {
            Step::Rewrote(r) => assert_eq!(r.after.to_string(), "zip(alt, p)"),
            Step::NormalForm => panic!("p is a redex"),
        }
    }

    #[test]
    fn zip_alt_p_normalizes() {
        let z = corpus("zip_alt_p.trs");
        let mu = z.strategy.clone().unwrap();
        let tr = normalize(&term(&z, "p"), &z.trs, &mu, 50);
        assert!(!tr.exhausted_fuel());
        assert_eq!(tr.final_term().to_string(), ":(0, zip(p, :(1, alt)))");
        assert_eq!(tr.steps.len(), 3);
    }

    #[test]
    fn evenns_lazy_and_eager() {
        let f = corpus("wallis.trs");
        let mu = f.strategy.clone().unwrap();
        let t = term(&f, "evenNs");
        let tr = normalize(&t, &f.trs, &mu, 50);
        assert_eq!(tr.stop, StopReason::NormalForm);
        assert_eq!(tr.final_term().to_string(), "cons(0, incr(oddNs))");
        let top = ReplacementMap::top(f.trs.signature());
        let tr = normalize(&t, &f.trs, &top, 5);
        assert!(tr.exhausted_fuel());
        assert_eq!(tr.steps.len(), 5);
    }

    #[test]
    fn variables_are_normal_forms() {
        let f = corpus("wallis.trs");
        let mu = f.strategy.clone().unwrap();
        assert!(is_mu_normal_form(&term(&f, "x"), &f.trs, &mu));
    }

    #[test]
    fn size_blowup_is_flagged() {
        let f = corpus("ordinals.trs");
        let top = ReplacementMap::top(f.trs.signature());
        let opts = NormalizeOptions { fuel: 1000, max_size: 30, ..NormalizeOptions::default() };
        let tr = normalize_with(&term(&f, "omega"), &f.trs, &top, &opts);
        assert_eq!(tr.stop, StopReason::SizeBlowup);
        assert!(tr.final_term().size() <= 30);
    }

    #[test]
    fn trace_lines() {
        let z = corpus("zip_alt_p.trs");
        let mu = z.strategy.clone().unwrap();
        let tr = normalize(&term(&z, "p"), &z.trs, &mu, 1);
        assert_eq!(tr.to_lines(), "e r1 zip(alt, p)\n");
        assert!(tr.exhausted_fuel());
    }

    #[test]
    fn innermost_and_outermost_choices() {
        let f = corpus("wallis.trs");
        let top = ReplacementMap::top(f.trs.signature());
        let t = term(&f, "tail(cons(0, oddNs))");
        let Step::Rewrote(inner) = step(&t, &f.trs, &top, RedexChoice::LeftmostInnermost) else { panic!() };
        assert_eq!(inner.position.to_string(), "1.2");
        let Step::Rewrote(outer) = step(&t, &f.trs, &top, RedexChoice::LeftmostOutermost) else { panic!() };
        assert!(outer.position.is_root());
        assert_eq!(mu_redexes(&t, &f.trs, &top)[0].position, inner.position);
    }
}
