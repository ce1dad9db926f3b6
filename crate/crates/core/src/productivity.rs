//! Verdicts on constructor normalization and productivity, assembled from
//! theorem applications whose premises are recorded and re-checkable.

use std::fmt;

use serde::Serialize;

use crate::analysis::{
    compatibility_class, finite_ground_terms, is_collapsing_free, is_exhaustive, is_inductively_sequential,
    is_left_linear, is_orthogonal, is_shallow, CompatibilityClass, Exhaustiveness,
};
use crate::repmap::{canonical_map, is_canonical_for, mu_delta, ReplacementMap};
use crate::term::{match_pattern, Term, Trs};
use crate::termination::{prove, SearchBudget, TerminationOutcome};
use crate::transform::{shallow_transform, ShallowingResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Question {
    ConstructorNormalizing,
    Productive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

/// The results a verdict can rest on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// μ-terminating, exhaustive, left-linear, μ ∈ CM_R ⇒ constructor normalizing.
    TerminationImpliesNormalizing,
    /// μ-terminating, exhaustive, left-linear, μcan ⊔ μ_Δ ⊑ μ ⇒ productive.
    TerminationImpliesProductive,
    /// Constructor normalizing ⇒ exhaustive.
    NormalizingImpliesExhaustive,
    /// Orthogonal, strongly compatible, constructor side condition:
    /// constructor normalizing ⇒ μcan-terminating.
    NormalizingImpliesCanonicalTermination,
    /// Shallow tree specifications: constructor normalizing ⇔ μcan-terminating.
    ShallowCharacterization,
    /// Strongly compatible tree specifications without collapsing rules:
    /// constructor normalizing ⇔ μcan-terminating.
    CompatibleCharacterization,
    /// Shallowing preserves productivity.
    Shallowing,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::TerminationImpliesNormalizing => "termination-implies-normalizing",
            Theorem::TerminationImpliesProductive => "termination-implies-productive",
            Theorem::NormalizingImpliesExhaustive => "normalizing-implies-exhaustive",
            Theorem::NormalizingImpliesCanonicalTermination => "normalizing-implies-canonical-termination",
            Theorem::ShallowCharacterization => "shallow-characterization",
            Theorem::CompatibleCharacterization => "compatible-characterization",
            Theorem::Shallowing => "shallowing",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "check", rename_all = "camelCase")]
pub enum Premise {
    Sorted,
    Exhaustive,
    /// A ground term in normal form that is not constructor-rooted.
    StuckTerm {
        term: Term,
    },
    LeftLinear,
    Orthogonal,
    StronglyCompatible,
    CollapsingFree,
    /// μcan ⊑ μ
    CanonicalBelow,
    /// μcan ⊔ μ_Δ ⊑ μ
    ProductiveMapBelow,
    /// μcan(c) = ∅ for every constructor.
    ConstructorsFrozen,
    /// No collapsing rule and μcan(c) = ∅ for constructors at rhs roots.
    RootConstructorsFrozen,
    Shallow,
    TreeSpecification,
    InductivelySequential,
    Terminating,
    Nonterminating,
}

impl fmt::Display for Premise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Premise::Sorted => f.write_str("sorted"),
            Premise::Exhaustive => f.write_str("exhaustive"),
            Premise::StuckTerm { term } => write!(f, "{term} is a stuck ground normal form"),
            Premise::LeftLinear => f.write_str("left-linear"),
            Premise::Orthogonal => f.write_str("orthogonal"),
            Premise::StronglyCompatible => f.write_str("strongly compatible"),
            Premise::CollapsingFree => f.write_str("no collapsing rules"),
            Premise::CanonicalBelow => f.write_str("μcan ⊑ μ"),
            Premise::ProductiveMapBelow => f.write_str("μcan ⊔ μ_Δ ⊑ μ"),
            Premise::ConstructorsFrozen => f.write_str("μcan(c) = ∅ for all constructors"),
            Premise::RootConstructorsFrozen => {
                f.write_str("no collapsing rules and μcan(c) = ∅ for constructors at rhs roots")
            }
            Premise::Shallow => f.write_str("shallow"),
            Premise::TreeSpecification => f.write_str("tree specification"),
            Premise::InductivelySequential => f.write_str("inductively sequential"),
            Premise::Terminating => f.write_str("μ-terminating"),
            Premise::Nonterminating => f.write_str("not μ-terminating"),
        }
    }
}

fn constructors_frozen(trs: &Trs, only_rhs_roots: bool) -> bool {
    let can = canonical_map(trs);
    trs.constructors().iter().all(|c| {
        let at_root = trs.rules().iter().any(|r| r.rhs.root() == Some(c));
        (only_rhs_roots && !at_root) || can.get(c).is_empty()
    })
}

fn is_stuck(trs: &Trs, t: &Term) -> bool {
    let Term::App(f, args) = t else { return false };
    t.is_ground()
        && trs.is_defined(f)
        && trs.signature().sort_of(t).is_ok()
        && args.iter().all(|a| trs.is_constructor_term(a))
        && trs.rules_for(f).iter().all(|r| match_pattern(&r.lhs, t).is_none())
}

fn is_tree_specification(trs: &Trs) -> bool {
    trs.is_sorted() && is_orthogonal(trs) && is_exhaustive(trs).is_yes() && crate::analysis::is_constructor_system(trs)
}

impl Premise {
    /// Re-evaluate against the system, the map the verdict used and its
    /// termination evidence.
    pub fn check(&self, trs: &Trs, mu: &ReplacementMap, evidence: Option<&TerminationOutcome>) -> bool {
        let verified = |want: fn(&TerminationOutcome) -> bool| evidence.is_some_and(|e| want(e) && e.verify(trs, mu));
        match self {
            Premise::Sorted => trs.is_sorted(),
            Premise::Exhaustive => is_exhaustive(trs).is_yes(),
            Premise::StuckTerm { term } => is_stuck(trs, term),
            Premise::LeftLinear => is_left_linear(trs),
            Premise::Orthogonal => is_orthogonal(trs),
            Premise::StronglyCompatible => compatibility_class(trs) == CompatibilityClass::Strong,
            Premise::CollapsingFree => is_collapsing_free(trs),
            Premise::CanonicalBelow => is_canonical_for(mu, trs),
            Premise::ProductiveMapBelow => {
                mu_delta(trs).and_then(|d| canonical_map(trs).join(&d)).and_then(|least| least.leq(mu)).unwrap_or(false)
            }
            Premise::ConstructorsFrozen => constructors_frozen(trs, false),
            Premise::RootConstructorsFrozen => is_collapsing_free(trs) && constructors_frozen(trs, true),
            Premise::Shallow => is_shallow(trs),
            Premise::TreeSpecification => is_tree_specification(trs),
            Premise::InductivelySequential => is_inductively_sequential(trs),
            Premise::Terminating => verified(TerminationOutcome::is_terminating),
            Premise::Nonterminating => verified(TerminationOutcome::is_nonterminating),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct JustificationStep {
    pub theorem: Theorem,
    pub premise: Premise,
    pub holds: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

/// Answer for the shallowed system, with the renaming that produced it.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ShallowRoute {
    pub transform: ShallowingResult,
    pub verdict: Box<Verdict>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdict {
    pub question: Question,
    pub answer: Answer,
    pub chain: Vec<JustificationStep>,
    pub used_map: ReplacementMap,
    pub evidence: Option<TerminationOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub via_shallowing: Option<ShallowRoute>,
}

struct Builder<'a> {
    trs: &'a Trs,
    question: Question,
    mu: ReplacementMap,
    chain: Vec<JustificationStep>,
    evidence: Option<TerminationOutcome>,
}

impl<'a> Builder<'a> {
    fn new(trs: &'a Trs, question: Question, mu: ReplacementMap) -> Builder<'a> {
        Builder { trs, question, mu, chain: Vec::new(), evidence: None }
    }

    fn step(&mut self, theorem: Theorem, premise: Premise, detail: impl Into<String>) -> bool {
        let holds = premise.check(self.trs, &self.mu, self.evidence.as_ref());
        self.chain.push(JustificationStep { theorem, premise, holds, detail: detail.into() });
        holds
    }

    fn done(self, answer: Answer, reason: Option<String>) -> Verdict {
        Verdict {
            question: self.question,
            answer,
            chain: self.chain,
            used_map: self.mu,
            evidence: self.evidence,
            reason,
            via_shallowing: None,
        }
    }

    fn unknown(self, reason: impl Into<String>) -> Verdict {
        self.done(Answer::Unknown, Some(reason.into()))
    }
}

fn exhaustive_detail(e: &Exhaustiveness) -> String {
    match e {
        Exhaustiveness::Yes { warnings } => warnings.join("; "),
        Exhaustiveness::No { witness, .. } => format!("uncovered {witness}"),
        Exhaustiveness::Unknown { reason } => reason.clone(),
    }
}

/// A ground, stuck instance of an exhaustiveness witness, when every
/// variable sort has a finite constructor term.
fn ground_witness(trs: &Trs, e: &Exhaustiveness) -> Option<Term> {
    let Exhaustiveness::No { witnesses, .. } = e else { return None };
    let ground = finite_ground_terms(trs);
    witnesses.iter().find_map(|w| {
        let mut ok = true;
        let t = w.map_vars(&mut |v| match ground.get(&v.sort) {
            Some(g) => g.clone(),
            None => {
                ok = false;
                Term::Var(v.clone())
            }
        });
        (ok && is_stuck(trs, &t)).then_some(t)
    })
}

fn outcome_detail(o: &TerminationOutcome) -> String {
    match o {
        TerminationOutcome::Terminating { certificate } => match certificate {
            crate::termination::Certificate::Direct(_) => "polynomial interpretation".into(),
            crate::termination::Certificate::DependencyPairs(p) => match p.stages.len() {
                1 => "dependency pairs, 1 stage".into(),
                n => format!("dependency pairs, {n} stages"),
            },
        },
        TerminationOutcome::Nonterminating { witness } => {
            format!("loop {} ↪+ {} at {}", witness.start, witness.end(), witness.reentry_position)
        }
        TerminationOutcome::Unknown { reason } => reason.clone(),
    }
}

/// Constructor normalization by μ-termination (default μ = μcan); falls
/// back to the converse theorem for a disproof when a loop is found.
pub fn prove_constructor_normalizing(trs: &Trs, mu: Option<&ReplacementMap>, budget: &SearchBudget) -> Verdict {
    let mu = mu.cloned().unwrap_or_else(|| canonical_map(trs));
    let mut b = Builder::new(trs, Question::ConstructorNormalizing, mu);
    let th = Theorem::TerminationImpliesNormalizing;
    let exhaustive = is_exhaustive(trs);
    if !b.step(th, Premise::Sorted, "") {
        b.step(th, Premise::Exhaustive, exhaustive_detail(&exhaustive));
        return b.unknown("sorts required");
    }
    if !b.step(th, Premise::Exhaustive, exhaustive_detail(&exhaustive)) {
        if let Some(term) = ground_witness(trs, &exhaustive) {
            b.step(Theorem::NormalizingImpliesExhaustive, Premise::StuckTerm { term }, "");
            return b.done(Answer::No, None);
        }
        return b.unknown("not exhaustive");
    }
    if !b.step(th, Premise::LeftLinear, "") {
        return b.unknown("not left-linear");
    }
    if !b.step(th, Premise::CanonicalBelow, "") {
        return b.unknown("μ is not a canonical replacement map");
    }
    let outcome = prove(trs, &b.mu, budget);
    let detail = outcome_detail(&outcome);
    b.evidence = Some(outcome);
    if b.step(th, Premise::Terminating, detail) {
        return b.done(Answer::Yes, None);
    }
    if b.evidence.as_ref().is_some_and(TerminationOutcome::is_nonterminating) {
        let d = disprove_constructor_normalizing(trs, budget);
        if d.answer == Answer::No {
            let mut chain = b.chain;
            chain.extend(d.chain);
            return Verdict { chain, ..d };
        }
        return b.unknown(format!("not μ-terminating; disproof inapplicable: {}", d.reason.unwrap_or_default()));
    }
    b.unknown("μ-termination not established")
}

/// Contrapositive of: constructor normalizing ⇒ μcan-terminating.
pub fn disprove_constructor_normalizing(trs: &Trs, budget: &SearchBudget) -> Verdict {
    let mut b = Builder::new(trs, Question::ConstructorNormalizing, canonical_map(trs));
    let th = Theorem::NormalizingImpliesCanonicalTermination;
    if !b.step(th, Premise::Orthogonal, "") {
        return b.unknown("not orthogonal");
    }
    if !b.step(th, Premise::StronglyCompatible, "") {
        return b.unknown("not strongly compatible");
    }
    if !Premise::ConstructorsFrozen.check(trs, &b.mu, None) && !b.step(th, Premise::RootConstructorsFrozen, "") {
        b.step(th, Premise::ConstructorsFrozen, "");
        return b.unknown("constructor side condition fails");
    }
    if Premise::ConstructorsFrozen.check(trs, &b.mu, None) {
        b.step(th, Premise::ConstructorsFrozen, "");
    }
    let outcome = prove(trs, &b.mu, budget);
    let detail = outcome_detail(&outcome);
    b.evidence = Some(outcome);
    if b.step(th, Premise::Nonterminating, detail) {
        return b.done(Answer::No, None);
    }
    b.unknown("no μcan-loop found")
}

/// Productivity by μ-termination (default μ = μcan ⊔ μ_Δ). Never answers No.
pub fn prove_productive(trs: &Trs, mu: Option<&ReplacementMap>, budget: &SearchBudget) -> Verdict {
    let th = Theorem::TerminationImpliesProductive;
    let default = mu_delta(trs).and_then(|d| canonical_map(trs).join(&d));
    let mu = match (mu, default) {
        (Some(m), _) => m.clone(),
        (None, Ok(m)) => m,
        (None, Err(_)) => canonical_map(trs),
    };
    let mut b = Builder::new(trs, Question::Productive, mu);
    if !b.step(th, Premise::Sorted, "") {
        return b.unknown("sorts required");
    }
    if !b.step(th, Premise::ProductiveMapBelow, "") {
        return b.unknown("μ does not include μcan ⊔ μ_Δ");
    }
    let exhaustive = is_exhaustive(trs);
    if !b.step(th, Premise::Exhaustive, exhaustive_detail(&exhaustive)) {
        return b.unknown("not exhaustive");
    }
    if !b.step(th, Premise::LeftLinear, "") {
        return b.unknown("not left-linear");
    }
    let outcome = prove(trs, &b.mu, budget);
    let detail = outcome_detail(&outcome);
    let nonterminating = outcome.is_nonterminating();
    b.evidence = Some(outcome);
    if b.step(th, Premise::Terminating, detail) {
        return b.done(Answer::Yes, None);
    }
    b.unknown(if nonterminating { "not μ-terminating" } else { "μ-termination not established" })
}

/// `prove_productive`, retried on the shallowed system when the input is
/// inductively sequential but not shallow.
pub fn prove_productive_with_shallowing(trs: &Trs, mu: Option<&ReplacementMap>, budget: &SearchBudget) -> Verdict {
    let direct = prove_productive(trs, mu, budget);
    if direct.answer != Answer::Unknown || !trs.is_sorted() || is_shallow(trs) || !is_inductively_sequential(trs) {
        return direct;
    }
    let Ok(transform) = shallow_transform(trs) else { return direct };
    let inner = prove_productive(&transform.output, None, budget);
    let mut verdict = direct;
    let mut b = Builder::new(trs, Question::Productive, verdict.used_map.clone());
    b.step(Theorem::Shallowing, Premise::InductivelySequential, "");
    verdict.chain.extend(b.chain);
    if inner.answer == Answer::Yes {
        verdict.answer = Answer::Yes;
        verdict.reason = None;
    } else {
        verdict.reason = Some(format!(
            "{}; after shallowing: {}",
            verdict.reason.unwrap_or_default(),
            inner.reason.clone().unwrap_or_default()
        ));
    }
    verdict.via_shallowing = Some(ShallowRoute { transform, verdict: Box::new(inner) });
    verdict
}

/// Constructor normalization of shallow (or strongly compatible,
/// collapsing-free) tree specifications, decided by μcan-termination.
pub fn shallow_characterization(trs: &Trs, budget: &SearchBudget) -> Verdict {
    let mut b = Builder::new(trs, Question::ConstructorNormalizing, canonical_map(trs));
    let tree = Premise::TreeSpecification.check(trs, &b.mu, None);
    let th = if tree && is_shallow(trs) {
        Theorem::ShallowCharacterization
    } else if tree
        && Premise::StronglyCompatible.check(trs, &b.mu, None)
        && Premise::CollapsingFree.check(trs, &b.mu, None)
    {
        Theorem::CompatibleCharacterization
    } else {
        let mut v = prove_constructor_normalizing(trs, None, budget);
        v.chain.insert(
            0,
            JustificationStep {
                theorem: Theorem::ShallowCharacterization,
                premise: Premise::TreeSpecification,
                holds: tree,
                detail: "characterization inapplicable".into(),
            },
        );
        return v;
    };
    b.step(th, Premise::TreeSpecification, "");
    if th == Theorem::ShallowCharacterization {
        b.step(th, Premise::Shallow, "");
    } else {
        b.step(th, Premise::StronglyCompatible, "");
        b.step(th, Premise::CollapsingFree, "");
    }
    let outcome = prove(trs, &b.mu, budget);
    let detail = outcome_detail(&outcome);
    b.evidence = Some(outcome);
    if b.evidence.as_ref().is_some_and(TerminationOutcome::is_terminating) {
        b.step(th, Premise::Terminating, detail);
        return b.done(Answer::Yes, None);
    }
    if b.evidence.as_ref().is_some_and(TerminationOutcome::is_nonterminating) {
        b.step(th, Premise::Nonterminating, detail);
        return b.done(Answer::No, None);
    }
    b.step(th, Premise::Terminating, detail);
    b.unknown("μcan-termination not established")
}

impl Verdict {
    /// Re-run every premise check and re-verify the embedded evidence.
    pub fn replay(&self, trs: &Trs) -> Result<(), String> {
        for s in &self.chain {
            if s.premise.check(trs, &self.used_map, self.evidence.as_ref()) != s.holds {
                return Err(format!("[{}] {}: recorded {}", s.theorem, s.premise, s.holds));
            }
        }
        if let Some(e) = &self.evidence {
            if !e.verify(trs, &self.used_map) {
                return Err("termination evidence does not verify".into());
            }
        }
        if let Some(route) = &self.via_shallowing {
            let again = shallow_transform(trs).map_err(|e| e.to_string())?;
            if again.output.rules() != route.transform.output.rules() {
                return Err("shallowing is not reproducible".into());
            }
            route.verdict.replay(&again.output)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let q = match self.question {
            Question::ConstructorNormalizing => "constructor normalizing",
            Question::Productive => "productive",
        };
        let a = match self.answer {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Unknown => "unknown",
        };
        let mut s = format!("{q}: {a}\n");
        if self.via_shallowing.is_some() {
            s.push_str("direct: unknown\n");
        }
        if let Some(r) = &self.reason {
            s.push_str(&format!("reason: {r}\n"));
        }
        s.push_str(&format!("map: {}\n", self.used_map));
        for st in &self.chain {
            let mark = if st.holds { "+" } else { "-" };
            s.push_str(&format!("  {mark} [{}] {}", st.theorem, st.premise));
            if !st.detail.is_empty() {
                s.push_str(&format!(" ({})", st.detail));
            }
            s.push('\n');
        }
        if let Some(e) = &self.evidence {
            s.push_str(&e.to_text());
        }
        if let Some(route) = &self.via_shallowing {
            let inner = match route.verdict.answer {
                Answer::Yes => "yes",
                Answer::No => "no",
                Answer::Unknown => "unknown",
            };
            s.push_str(&format!("via shallowing: {inner}\n"));
            for line in route.verdict.to_text().lines() {
                s.push_str(&format!("  {line}\n"));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, SpecFile};

    fn corpus(name: &str) -> SpecFile {
        let path = format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"));
        parse(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    fn budget() -> SearchBudget {
        SearchBudget::with_time_ms(20_000)
    }

    #[test]
    fn zip_alt_p_is_productive_with_its_map() {
        let spec = corpus("zip_alt_p.trs");
        let mu = spec.strategy.unwrap();
        let v = prove_productive(&spec.trs, Some(&mu), &budget());
        assert_eq!(v.answer, Answer::Yes, "{}", v.to_text());
        assert_eq!(v.used_map.get("zip").iter().copied().collect::<Vec<_>>(), [1]);
        assert_eq!(v.used_map.get(":").iter().copied().collect::<Vec<_>>(), [1]);
        v.replay(&spec.trs).unwrap();
    }

    #[test]
    fn zip_alt_p_is_constructor_normalizing() {
        let spec = corpus("zip_alt_p.trs");
        let v = prove_constructor_normalizing(&spec.trs, None, &budget());
        assert_eq!(v.answer, Answer::Yes, "{}", v.to_text());
        let premises: Vec<&Premise> = v.chain.iter().map(|s| &s.premise).collect();
        assert_eq!(
            premises,
            [
                &Premise::Sorted,
                &Premise::Exhaustive,
                &Premise::LeftLinear,
                &Premise::CanonicalBelow,
                &Premise::Terminating
            ]
        );
        v.replay(&spec.trs).unwrap();
    }

    #[test]
    fn zr10_map_loses_the_proof() {
        let spec = corpus("zip_alt_p.trs");
        let zr = crate::repmap::zr10_map(&spec.trs).unwrap();
        let v = prove_productive_with_shallowing(&spec.trs, Some(&zr), &budget());
        assert_eq!(v.answer, Answer::Unknown);
        assert!(v.evidence.as_ref().unwrap().is_nonterminating());
    }

    #[test]
    fn ordinals_are_productive() {
        let spec = corpus("ordinals.trs");
        let v = prove_productive(&spec.trs, spec.strategy.as_ref(), &budget());
        assert_eq!(v.answer, Answer::Yes, "{}", v.to_text());
        v.replay(&spec.trs).unwrap();
    }

    #[test]
    fn ex53_needs_shallowing() {
        let t = corpus("ex5_3.trs").trs;
        let direct = prove_productive(&t, None, &budget());
        assert_eq!(direct.answer, Answer::Unknown);
        let Some(TerminationOutcome::Nonterminating { witness }) = &direct.evidence else { panic!() };
        assert_eq!(witness.end().to_string(), ":(b, s)");
        let v = prove_productive_with_shallowing(&t, None, &budget());
        assert_eq!(v.answer, Answer::Yes, "{}", v.to_text());
        assert_eq!(v.via_shallowing.as_ref().unwrap().verdict.answer, Answer::Yes);
        v.replay(&t).unwrap();
        assert!(v.to_text().contains("via shallowing: yes"));
    }

    #[test]
    fn ex53_disproof_is_inapplicable() {
        let t = corpus("ex5_3.trs").trs;
        let v = disprove_constructor_normalizing(&t, &budget());
        assert_eq!(v.answer, Answer::Unknown);
        assert_eq!(v.reason.as_deref(), Some("not strongly compatible"));
    }

    #[test]
    fn shallow_ex53_characterized() {
        let t = corpus("ex5_3_shallow.trs").trs;
        let v = shallow_characterization(&t, &budget());
        assert_eq!(v.answer, Answer::Yes, "{}", v.to_text());
        assert!(v.chain.iter().all(|s| s.theorem == Theorem::ShallowCharacterization && s.holds));
        v.replay(&t).unwrap();
        assert_eq!(disprove_constructor_normalizing(&t, &budget()).answer, Answer::Unknown);
    }

    #[test]
    fn shallow_spec_with_self_loop_is_not_normalizing() {
        let src = std::fs::read_to_string(format!("{}/../../corpus/ex5_3_shallow.trs", env!("CARGO_MANIFEST_DIR")))
            .unwrap()
            .replace("(s -> S)", "(s -> S) (s' -> S)")
            .replace("s -> :(b, s)", "s -> :(b, s)\n  s' -> s'");
        let t = parse(&src).unwrap().trs;
        let v = shallow_characterization(&t, &budget());
        assert_eq!(v.answer, Answer::No, "{}", v.to_text());
        v.replay(&t).unwrap();
        assert_ne!(prove_constructor_normalizing(&t, None, &budget()).answer, Answer::Yes);
    }

    #[test]
    fn root_self_loop_disproves() {
        let t = parse("(SORTS (S codata)) (SIG (p -> S)) (RULES p -> p)").unwrap().trs;
        let v = disprove_constructor_normalizing(&t, &budget());
        assert_eq!(v.answer, Answer::No, "{}", v.to_text());
        v.replay(&t).unwrap();
    }

    #[test]
    fn missing_case_disproves_by_exhaustiveness() {
        let t = parse("(SORTS (D data)) (SIG (a -> D) (b -> D) (f D -> D)) (RULES f(a) -> a)").unwrap().trs;
        let v = prove_constructor_normalizing(&t, None, &budget());
        assert_eq!(v.answer, Answer::No);
        let last = v.chain.last().unwrap();
        assert_eq!(last.theorem, Theorem::NormalizingImpliesExhaustive);
        assert_eq!(last.premise, Premise::StuckTerm { term: parse_ground(&t, "f(b)") });
        v.replay(&t).unwrap();
    }

    fn parse_ground(t: &Trs, s: &str) -> Term {
        crate::syntax::parse_term(s, t.signature(), &Default::default()).unwrap()
    }

    #[test]
    fn unsorted_input_needs_sorts() {
        let t = corpus("wallis.trs").trs;
        let v = prove_constructor_normalizing(&t, None, &budget());
        assert_eq!(v.answer, Answer::Unknown);
        assert_eq!(v.reason.as_deref(), Some("sorts required"));
        assert!(v.chain.iter().any(|s| s.premise == Premise::Exhaustive && !s.holds));
        assert_eq!(prove_productive(&t, None, &budget()).answer, Answer::Unknown);
    }

    #[test]
    fn non_shallow_input_defers() {
        let t = corpus("ex5_3.trs").trs;
        let v = shallow_characterization(&t, &budget());
        assert_eq!(v.chain[0].detail, "characterization inapplicable");
        assert_ne!(v.answer, Answer::No);
    }

    #[test]
    fn tampered_chain_fails_replay() {
        let spec = corpus("zip_alt_p.trs");
        let mut v = prove_productive(&spec.trs, spec.strategy.as_ref(), &budget());
        v.chain[0].holds = false;
        assert!(v.replay(&spec.trs).is_err());
    }
}
