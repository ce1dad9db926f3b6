//! Randomized properties and theorem-based oracles, shared by the core test
//! suite and the acceptance harness.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

use csr_core::analysis::{finite_ground_terms, is_exhaustive, Exhaustiveness};
use csr_core::csr::{normalize, reducts, StopReason};
use csr_core::repmap::{
    canonical_map, compatibility, minimum_compatible_map, replacing_positions, Compatibility, ReplacementMap,
};
use csr_core::syntax::{parse, SpecFile};
use csr_core::term::{match_pattern, Position, Rule, Signature, SortKind, Term, Trs, UNSORTED};
use csr_core::termination::{find_loop, replay_loop, unroll, Interpretation, LoopBounds};

pub const CASES: u32 = 1000;
const SEED: u64 = 0x5eed_c0de;

pub fn corpus_dir() -> String {
    format!("{}/../../corpus", env!("CARGO_MANIFEST_DIR"))
}

pub fn corpus(name: &str) -> SpecFile {
    let text = std::fs::read_to_string(format!("{}/{name}", corpus_dir())).expect("corpus file");
    parse(&text).expect("corpus parses")
}

fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    })
}

fn run<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    runner().run(&strategy, test).map_err(|e| e.to_string())
}

/// Reads choices from a byte string, wrapping around.
struct Dice<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl Dice<'_> {
    fn new(bytes: &[u8]) -> Dice<'_> {
        Dice { bytes, at: 0 }
    }

    fn pick(&mut self, n: usize) -> usize {
        let b = self.bytes[self.at % self.bytes.len()] as usize + self.at / self.bytes.len();
        self.at += 1;
        b % n
    }
}

const SYMBOLS: [(&str, usize); 5] = [("a", 0), ("b", 0), ("g", 1), ("h", 1), ("f", 2)];

fn small_signature() -> Signature {
    let mut sig = Signature::unsorted();
    for (f, n) in SYMBOLS {
        sig.declare_unsorted(f, n).unwrap();
    }
    sig
}

fn random_term(d: &mut Dice, depth: usize, vars: &[&str]) -> Term {
    if depth == 0 || d.pick(3) == 0 {
        if !vars.is_empty() && d.pick(2) == 0 {
            return Term::var(vars[d.pick(vars.len())], UNSORTED);
        }
        return Term::constant(SYMBOLS[d.pick(2)].0);
    }
    let (f, n) = SYMBOLS[2 + d.pick(3)];
    Term::app(f, (0..n).map(|_| random_term(d, depth - 1, vars)).collect())
}

fn random_map(d: &mut Dice, sig: &Signature) -> ReplacementMap {
    let mut mu = ReplacementMap::bottom(sig);
    for decl in sig.symbols() {
        let args: Vec<usize> = (1..=decl.arity()).filter(|_| d.pick(2) == 0).collect();
        mu.set(&decl.name, args).unwrap();
    }
    mu
}

fn random_trs(d: &mut Dice) -> Option<Trs> {
    let mut rules = Vec::new();
    for k in 0..1 + d.pick(3) {
        let lhs = random_term(d, 2, &["x", "y"]);
        if lhs.is_var() {
            continue;
        }
        let lvars: Vec<String> = lhs.vars().iter().map(|v| v.name.to_string()).collect();
        let lv: Vec<&str> = lvars.iter().map(String::as_str).collect();
        let rhs = random_term(d, 3, &lv);
        rules.push(Rule::new(&format!("r{}", k + 1), lhs, rhs).ok()?);
    }
    Trs::new(small_signature(), rules).ok()
}

/// Pos^μ(t) straight from the definition.
fn replacing_oracle(t: &Term, mu: &ReplacementMap) -> BTreeSet<Position> {
    t.positions()
        .into_iter()
        .filter(|p| {
            let mut cur = t;
            p.indices().iter().all(|&i| {
                let ok = mu.contains(cur.root().expect("inner position"), i);
                cur = &cur.args()[i - 1];
                ok
            })
        })
        .collect()
}

pub fn lattice_laws() -> Result<(), String> {
    let sig = small_signature();
    run(vec(any::<u8>(), 16), |bytes| {
        let mut d = Dice::new(&bytes);
        let (a, b, c) = (random_map(&mut d, &sig), random_map(&mut d, &sig), random_map(&mut d, &sig));
        let j = |x: &ReplacementMap, y: &ReplacementMap| x.join(y).unwrap();
        let m = |x: &ReplacementMap, y: &ReplacementMap| x.meet(y).unwrap();
        prop_assert_eq!(j(&a, &b), j(&b, &a));
        prop_assert_eq!(m(&a, &b), m(&b, &a));
        prop_assert_eq!(j(&j(&a, &b), &c), j(&a, &j(&b, &c)));
        prop_assert_eq!(m(&m(&a, &b), &c), m(&a, &m(&b, &c)));
        prop_assert_eq!(j(&a, &a), a.clone());
        prop_assert_eq!(m(&a, &a), a.clone());
        prop_assert_eq!(j(&a, &m(&a, &b)), a.clone());
        prop_assert_eq!(m(&a, &j(&a, &b)), a.clone());
        prop_assert!(ReplacementMap::bottom(&sig).leq(&a).unwrap());
        prop_assert!(a.leq(&ReplacementMap::top(&sig)).unwrap());
        prop_assert!(a.leq(&j(&a, &b)).unwrap());
        prop_assert_eq!(a.leq(&b).unwrap(), j(&a, &b) == b);
        Ok(())
    })
}

pub fn replacing_positions_are_positions() -> Result<(), String> {
    let sig = small_signature();
    run(vec(any::<u8>(), 32), |bytes| {
        let mut d = Dice::new(&bytes);
        let t = random_term(&mut d, 4, &["x"]);
        let mu = random_map(&mut d, &sig);
        let got: BTreeSet<Position> = replacing_positions(&t, &mu).into_iter().collect();
        let all: BTreeSet<Position> = t.positions().into_iter().collect();
        prop_assert!(got.contains(&Position::root()));
        prop_assert!(got.is_subset(&all));
        prop_assert_eq!(got, replacing_oracle(&t, &mu));
        Ok(())
    })
}

pub fn replacing_positions_are_monotone() -> Result<(), String> {
    let sig = small_signature();
    run(vec(any::<u8>(), 32), |bytes| {
        let mut d = Dice::new(&bytes);
        let t = random_term(&mut d, 4, &["x"]);
        let mu = random_map(&mut d, &sig);
        let bigger = mu.join(&random_map(&mut d, &sig)).unwrap();
        let small: BTreeSet<Position> = replacing_positions(&t, &mu).into_iter().collect();
        let large: BTreeSet<Position> = replacing_positions(&t, &bigger).into_iter().collect();
        prop_assert!(small.is_subset(&large));
        Ok(())
    })
}

pub fn top_map_is_unrestricted() -> Result<(), String> {
    run(vec(any::<u8>(), 48), |bytes| {
        let mut d = Dice::new(&bytes);
        let Some(trs) = random_trs(&mut d) else { return Ok(()) };
        let t = random_term(&mut d, 4, &[]);
        let top = ReplacementMap::top(trs.signature());
        let got: BTreeSet<(Position, String, Term)> =
            reducts(&t, &trs, &top).into_iter().map(|s| (s.position, s.rule_label.to_string(), s.after)).collect();
        let mut want = BTreeSet::new();
        for p in t.positions() {
            let sub = t.get(&p).unwrap();
            for r in trs.rules() {
                if let Some(sigma) = match_pattern(&r.lhs, sub) {
                    let after = t.replace_at(&p, sigma.apply(&r.rhs)).unwrap();
                    want.insert((p.clone(), r.label.to_string(), after));
                }
            }
        }
        prop_assert_eq!(got, want);
        Ok(())
    })
}

fn all_maps(sig: &Signature) -> Vec<ReplacementMap> {
    let slots: Vec<(String, usize)> =
        sig.symbols().iter().flat_map(|d| (1..=d.arity()).map(move |i| (d.name.to_string(), i))).collect();
    (0..1u32 << slots.len())
        .map(|bits| {
            let mut mu = ReplacementMap::bottom(sig);
            for d in sig.symbols() {
                let args: Vec<usize> = slots
                    .iter()
                    .enumerate()
                    .filter(|(k, (f, _))| bits >> k & 1 == 1 && **f == *d.name)
                    .map(|(_, (_, i))| *i)
                    .collect();
                mu.set(&d.name, args).unwrap();
            }
            mu
        })
        .collect()
}

pub fn minimum_map_is_least() -> Result<(), String> {
    let sig = small_signature();
    let maps = all_maps(&sig);
    run(vec(any::<u8>(), 24), |bytes| {
        let mut d = Dice::new(&bytes);
        let t = random_term(&mut d, 3, &["x", "y"]);
        let least = minimum_compatible_map(&t, &sig);
        let compatible = |mu: &ReplacementMap| compatibility(mu, &t) != Compatibility::Incompatible;
        prop_assert!(compatible(&least));
        for mu in maps.iter().filter(|m| compatible(m)) {
            prop_assert!(least.leq(mu).unwrap(), "{} not below {}", least, mu);
        }
        Ok(())
    })
}

fn nat_signature() -> Signature {
    let mut sig = Signature::sorted();
    sig.add_sort("N", SortKind::Data).unwrap();
    sig.declare("z", &[], "N").unwrap();
    sig.declare("s", &["N"], "N").unwrap();
    sig.declare("c", &["N", "N"], "N").unwrap();
    sig.declare("f", &["N", "N"], "N").unwrap();
    sig
}

fn random_pattern(d: &mut Dice, depth: usize, fresh: &mut usize) -> Term {
    if depth == 0 || d.pick(3) == 0 {
        *fresh += 1;
        return Term::var(&format!("v{fresh}"), "N");
    }
    match d.pick(3) {
        0 => Term::constant("z"),
        1 => Term::app("s", vec![random_pattern(d, depth - 1, fresh)]),
        _ => Term::app("c", vec![random_pattern(d, depth - 1, fresh), random_pattern(d, depth - 1, fresh)]),
    }
}

/// Ground constructor terms over z, s, c of depth at most `depth`.
fn ground_terms(depth: usize) -> Vec<Term> {
    if depth == 1 {
        return vec![Term::constant("z")];
    }
    let below = ground_terms(depth - 1);
    let mut out = vec![Term::constant("z")];
    out.extend(below.iter().map(|t| Term::app("s", vec![t.clone()])));
    for a in &below {
        for b in &below {
            out.push(Term::app("c", vec![a.clone(), b.clone()]));
        }
    }
    out
}

pub fn exhaustiveness_matches_enumeration() -> Result<(), String> {
    let ground = ground_terms(3);
    run(vec(any::<u8>(), 40), |bytes| {
        let mut d = Dice::new(&bytes);
        let mut fresh = 0;
        let rules: Vec<Rule> = (0..1 + d.pick(4))
            .map(|k| {
                let lhs =
                    Term::app("f", vec![random_pattern(&mut d, 2, &mut fresh), random_pattern(&mut d, 2, &mut fresh)]);
                Rule::new(&format!("r{}", k + 1), lhs, Term::constant("z")).unwrap()
            })
            .collect();
        let trs = Trs::new(nat_signature(), rules).unwrap();
        let covered = |t: &Term| trs.rules().iter().any(|r| match_pattern(&r.lhs, t).is_some());
        let brute = ground.iter().all(|a| ground.iter().all(|b| covered(&Term::app("f", vec![a.clone(), b.clone()]))));
        let got = is_exhaustive(&trs);
        prop_assert_eq!(got.is_yes(), brute, "{:?}", got);
        if let Exhaustiveness::No { witnesses, .. } = got {
            for w in witnesses {
                let instance = w.map_vars(&mut |_| Term::constant("z"));
                prop_assert!(!covered(&instance), "witness {} is covered", w);
            }
        }
        Ok(())
    })
}

/// Steps of μ-derivations from every left-hand side, with the map used.
pub fn corpus_steps(spec: &SpecFile, fuel: usize) -> Vec<(Term, Term)> {
    let mu = spec.strategy.clone().unwrap_or_else(|| canonical_map(&spec.trs));
    let mut out = Vec::new();
    for r in spec.trs.rules() {
        let trace = normalize(&r.lhs, &spec.trs, &mu, fuel);
        out.extend(trace.steps.into_iter().map(|s| (s.before, s.after)));
        out.extend(reducts(&r.lhs, &spec.trs, &mu).into_iter().map(|s| (s.before, s.after)));
    }
    out
}

pub fn certificates_decrease_along_steps() -> Result<(), String> {
    let systems: Vec<(Interpretation, Vec<(Term, Term)>)> =
        [("zip_alt_p", "zip_alt_p.cert"), ("ordinals", "ordinals.cert"), ("ordinals", "ordinals.hand.cert")]
            .iter()
            .map(|(sys, cert)| {
                let spec = corpus(&format!("{sys}.trs"));
                let text = std::fs::read_to_string(format!("{}/golden/{cert}", corpus_dir())).unwrap();
                (Interpretation::parse(&text).unwrap(), corpus_steps(&spec, 30))
            })
            .collect();
    run((0..systems.len(), any::<prop::sample::Index>(), vec(0i128..50, 10 * 8)), |(k, step, values)| {
        let (interp, steps) = &systems[k];
        let (s, t) = &steps[step.index(steps.len())];
        let vars: Vec<_> = s.var_set().into_iter().collect();
        for round in 0..10 {
            let value = |v: &csr_core::term::Var| {
                let i = vars.iter().position(|w| w == v).unwrap_or(0);
                values[(round * 8 + i) % values.len()]
            };
            let (a, b) = (interp.evaluate(s, &value).unwrap(), interp.evaluate(t, &value).unwrap());
            prop_assert!(a > b, "[{}] = {} is not above [{}] = {}", s, a, t, b);
        }
        Ok(())
    })
}

pub fn loop_witnesses_replay() -> Result<(), String> {
    let bounds = LoopBounds { max_depth: 4, max_term_size: 30, max_frontier: 300 };
    run(vec(any::<u8>(), 48), |bytes| {
        let mut d = Dice::new(&bytes);
        let Some(trs) = random_trs(&mut d) else { return Ok(()) };
        let mu = random_map(&mut d, trs.signature());
        if let Some(w) = find_loop(&trs, &mu, &bounds) {
            prop_assert!(replay_loop(&trs, &mu, &w).is_ok());
            let once = unroll(&trs, &mu, &w, 1).map_err(TestCaseError::fail)?;
            let twice = unroll(&trs, &mu, &w, 2).map_err(TestCaseError::fail)?;
            prop_assert!(twice.len() > once.len());
        }
        Ok(())
    })
}

/// Ground seeds: every left-hand side with variables replaced by a smallest
/// ground constructor term of their sort.
pub fn seeds(trs: &Trs) -> Vec<Term> {
    let ground = finite_ground_terms(trs);
    let mut out: Vec<Term> = Vec::new();
    for r in trs.rules() {
        let mut ok = true;
        let t = r.lhs.map_vars(&mut |v| match ground.get(&v.sort) {
            Some(g) => g.clone(),
            None => {
                ok = false;
                Term::Var(v.clone())
            }
        });
        if ok && !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

fn is_root_redex(t: &Term, trs: &Trs) -> bool {
    trs.rules().iter().any(|r| match_pattern(&r.lhs, t).is_some())
}

/// Terms reachable by unrestricted rewriting within `depth` steps.
fn reachable(t: &Term, trs: &Trs, depth: usize, cap: usize) -> Vec<Term> {
    let top = ReplacementMap::top(trs.signature());
    let mut seen: HashSet<Term> = HashSet::from([t.clone()]);
    let mut order = vec![t.clone()];
    let mut queue = VecDeque::from([(t.clone(), 0)]);
    while let Some((u, k)) = queue.pop_front() {
        if k == depth {
            continue;
        }
        for s in reducts(&u, trs, &top) {
            if seen.len() >= cap {
                return order;
            }
            if seen.insert(s.after.clone()) {
                order.push(s.after.clone());
                queue.push_back((s.after, k + 1));
            }
        }
    }
    order
}

#[derive(Debug, Default)]
pub struct OracleStats {
    pub normal_forms: usize,
    pub prefixes: usize,
}

/// Every μcan-normal form reached from the corpus seeds is a head-normal
/// form: no unrestricted derivation of length ≤ 8 reaches a root redex.
pub fn head_normal_form_oracle(names: &[&str]) -> Result<OracleStats, String> {
    let mut stats = OracleStats::default();
    for name in names {
        let trs = corpus(name).trs;
        let mu = canonical_map(&trs);
        for s in seeds(&trs) {
            let trace = normalize(&s, &trs, &mu, 500);
            if trace.stop != StopReason::NormalForm {
                continue;
            }
            let nf = trace.final_term();
            stats.normal_forms += 1;
            if let Some(bad) = reachable(nf, &trs, 8, 20_000).iter().find(|u| is_root_redex(u, &trs)) {
                return Err(format!("{name}: μ-normal form {nf} of {s} reaches root redex {bad}"));
            }
        }
    }
    Ok(stats)
}

/// Whenever unrestricted rewriting reaches a constructor-rooted term, the
/// μcan-normal form has the same head constructor.
pub fn constructor_prefix_oracle(names: &[&str]) -> Result<OracleStats, String> {
    let mut stats = OracleStats::default();
    for name in names {
        let trs = corpus(name).trs;
        let mu = canonical_map(&trs);
        for s in seeds(&trs) {
            let heads: BTreeSet<_> = reachable(&s, &trs, 8, 20_000)
                .into_iter()
                .filter_map(|u| u.root().filter(|f| !trs.is_defined(f)).cloned())
                .collect();
            if heads.is_empty() {
                continue;
            }
            let trace = normalize(&s, &trs, &mu, 500);
            let reached = std::iter::once(&s)
                .chain(trace.steps.iter().map(|st| &st.after))
                .find(|u| u.root().is_some_and(|f| !trs.is_defined(f)));
            let Some(u) = reached else {
                return Err(format!("{name}: {s} reaches {heads:?} but no μ-derivation reaches a constructor"));
            };
            if heads.len() != 1 || u.root() != heads.first() {
                return Err(format!("{name}: {s} has heads {heads:?} but the μ-derivation reaches {u}"));
            }
            stats.prefixes += 1;
        }
    }
    Ok(stats)
}

pub const CORPUS: [&str; 5] = ["wallis.trs", "ordinals.trs", "zip_alt_p.trs", "ex5_3.trs", "ex5_3_shallow.trs"];

pub fn by_name() -> BTreeMap<&'static str, fn() -> Result<(), String>> {
    BTreeMap::from([
        ("lattice laws", lattice_laws as fn() -> Result<(), String>),
        ("root replacing and Pos^μ(t) ⊆ Pos(t)", replacing_positions_are_positions),
        ("Pos^μ monotone in μ", replacing_positions_are_monotone),
        ("μ_⊤ is unrestricted rewriting", top_map_is_unrestricted),
        ("μ_t least compatible map", minimum_map_is_least),
        ("exhaustiveness vs ground enumeration", exhaustiveness_matches_enumeration),
        ("certificates decrease along μ-steps", certificates_decrease_along_steps),
        ("loop witnesses replay", loop_witnesses_replay),
    ])
}
