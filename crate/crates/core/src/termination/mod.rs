//! μ-termination: polynomial certificates, dependency-pair proofs, loops.

pub mod dp;
mod interp;
mod loops;
pub mod poly;
mod search;
mod solver;

use serde::Serialize;

pub use interp::{check_certificate, CertCheck, CertError, Interpretation, SymbolPoly};
pub use loops::{find_loop, replay_loop, unroll, LoopBounds, LoopWitness};
pub use search::{find_certificate, find_direct, find_dp, find_proof, Certificate, SearchBudget, Shape};
pub use solver::Meter;

use crate::repmap::ReplacementMap;
use crate::term::Trs;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "camelCase")]
pub enum TerminationOutcome {
    Terminating { certificate: Certificate },
    Nonterminating { witness: LoopWitness },
    Unknown { reason: String },
}

impl TerminationOutcome {
    pub fn is_terminating(&self) -> bool {
        matches!(self, TerminationOutcome::Terminating { .. })
    }

    pub fn is_nonterminating(&self) -> bool {
        matches!(self, TerminationOutcome::Nonterminating { .. })
    }

    pub fn to_text(&self) -> String {
        match self {
            TerminationOutcome::Terminating { certificate } => {
                format!("terminating\ncertificate:\n{}", certificate.to_text())
            }
            TerminationOutcome::Nonterminating { witness } => format!("nonterminating\nloop:\n{}", witness.to_text()),
            TerminationOutcome::Unknown { reason } => format!("unknown: {reason}\n"),
        }
    }

    /// Re-check the embedded evidence.
    pub fn verify(&self, trs: &Trs, mu: &ReplacementMap) -> bool {
        match self {
            TerminationOutcome::Terminating { certificate } => certificate.check(trs, mu).is_ok_and(|c| c.ok),
            TerminationOutcome::Nonterminating { witness } => replay_loop(trs, mu, witness).is_ok(),
            TerminationOutcome::Unknown { .. } => true,
        }
    }
}

/// Bounded loop search first, then certificates within the budget.
pub fn prove(trs: &Trs, mu: &ReplacementMap, budget: &SearchBudget) -> TerminationOutcome {
    if budget.is_zero() {
        return TerminationOutcome::Unknown { reason: "search budget is zero".into() };
    }
    if let Some(witness) = find_loop(trs, mu, &LoopBounds::default()) {
        return TerminationOutcome::Nonterminating { witness };
    }
    match find_proof(trs, mu, budget) {
        Some(certificate) => TerminationOutcome::Terminating { certificate },
        None => TerminationOutcome::Unknown {
            reason: format!(
                "no loop within depth {} and no certificate within {} ms",
                LoopBounds::default().max_depth,
                budget.time_ms
            ),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repmap::{canonical_map, mu_delta};
    use crate::syntax::{parse, SpecFile};

    fn corpus(name: &str) -> SpecFile {
        let path = format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"));
        parse(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    #[test]
    fn zip_alt_p_terminates_directly() {
        let spec = corpus("zip_alt_p.trs");
        let mu = spec.strategy.unwrap();
        let cert = find_certificate(&spec.trs, &mu, &SearchBudget::default()).unwrap();
        assert!(check_certificate(&spec.trs, &mu, &cert).unwrap().ok);
        let out = prove(&spec.trs, &mu, &SearchBudget::default());
        assert!(out.is_terminating() && out.verify(&spec.trs, &mu));
    }

    #[test]
    fn self_loop_has_no_certificate() {
        let t = parse("(VAR x) (RULES f(x) -> f(x))").unwrap().trs;
        let mu = ReplacementMap::top(t.signature());
        assert!(find_certificate(&t, &mu, &SearchBudget::with_time_ms(2_000)).is_none());
        assert!(prove(&t, &mu, &SearchBudget::default()).is_nonterminating());
    }

    #[test]
    fn ex53_is_nonterminating_under_canonical_map() {
        let t = corpus("ex5_3.trs").trs;
        let mu = canonical_map(&t);
        let TerminationOutcome::Nonterminating { witness } = prove(&t, &mu, &SearchBudget::default()) else { panic!() };
        assert_eq!(witness.reentry_position.to_string(), "2");
    }

    #[test]
    fn shallow_ex53_terminates() {
        let t = corpus("ex5_3_shallow.trs").trs;
        let mu = canonical_map(&t).join(&mu_delta(&t).unwrap()).unwrap();
        let out = prove(&t, &mu, &SearchBudget::default());
        assert!(out.is_terminating(), "{out:?}");
        assert!(out.verify(&t, &mu));
    }

    #[test]
    fn ordinals_terminate() {
        let spec = corpus("ordinals.trs");
        let mu = spec.strategy.unwrap();
        let start = std::time::Instant::now();
        let out = prove(&spec.trs, &mu, &SearchBudget::default());
        eprintln!("ordinals: {:?}", start.elapsed());
        assert!(out.is_terminating(), "{out:?}");
        assert!(out.verify(&spec.trs, &mu));
    }

    #[test]
    fn zero_budget_is_unknown() {
        let spec = corpus("ordinals.trs");
        let mu = spec.strategy.unwrap();
        let budget = SearchBudget { max_nodes: 0, time_ms: 1000 };
        assert!(matches!(prove(&spec.trs, &mu, &budget), TerminationOutcome::Unknown { .. }));
    }
}
