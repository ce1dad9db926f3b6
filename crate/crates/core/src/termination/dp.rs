//! Context-sensitive dependency pairs with collapsing pairs and unhiding
//! rules, the estimated dependency graph, and stage-wise proof checking.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use super::interp::{CertCheck, CertError, Interpretation};
use super::poly::Poly;
use crate::repmap::{replacing_positions, replacing_vars, ReplacementMap};
use crate::term::{unify, Name, Term, Trs, UNSORTED};

/// Root symbol of collapsing pairs and unhiding rules.
pub const UNHIDE: &str = "#U";

pub fn marked(f: &str) -> Name {
    format!("{f}#").into()
}

fn mark(t: &Term) -> Term {
    match t {
        Term::App(f, args) => Term::app_name(marked(f), args.to_vec()),
        Term::Var(_) => t.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyPair {
    pub lhs: Term,
    pub rhs: Term,
    /// rhs is U(x) for a migrating variable x.
    pub collapsing: bool,
    pub rule: Name,
}

impl fmt::Display for DependencyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone)]
pub struct DpProblem {
    pub pairs: Vec<DependencyPair>,
    /// Defined-rooted subterms at frozen positions of right-hand sides.
    pub hidden: Vec<Term>,
    pub unhiding: Vec<(Term, Term)>,
    /// Some hidden term has a variable reachable through hiding contexts.
    open_hidden: bool,
    capped: Vec<Term>,
}

/// `f` hides `i` when some frozen occurrence `f(..ti..)` in a right-hand
/// side has a defined symbol in `ti`, or a variable at an active position.
fn hiding_contexts(trs: &Trs, mu: &ReplacementMap) -> BTreeSet<(Name, usize)> {
    let mut out = BTreeSet::new();
    for r in trs.rules() {
        let active = replacing_positions(&r.rhs, mu);
        for (p, s) in r.rhs.subterms() {
            let Term::App(f, args) = s else { continue };
            if active.contains(&p) {
                continue;
            }
            for &i in mu.get(f) {
                let ti = &args[i - 1];
                if ti.symbols().iter().any(|g| trs.is_defined(g)) || !replacing_vars(ti, mu).is_empty() {
                    out.insert((f.clone(), i));
                }
            }
        }
    }
    out
}

fn open_through(t: &Term, hides: &BTreeSet<(Name, usize)>) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App(f, args) => {
            args.iter().enumerate().any(|(i, a)| hides.contains(&(f.clone(), i + 1)) && open_through(a, hides))
        }
    }
}

pub fn dependency_pairs(trs: &Trs, mu: &ReplacementMap) -> DpProblem {
    let mut pairs = Vec::new();
    let mut hidden: Vec<Term> = Vec::new();
    for r in trs.rules() {
        let strict_subterms: Vec<&Term> = replacing_positions(&r.lhs, mu)
            .into_iter()
            .filter(|p| !p.is_root())
            .filter_map(|p| r.lhs.get(&p))
            .collect();
        let active = replacing_positions(&r.rhs, mu);
        for p in &active {
            let s = r.rhs.get(p).expect("position of rhs");
            let Some(g) = s.root() else { continue };
            if trs.is_defined(g) && !strict_subterms.contains(&s) {
                let pair = DependencyPair { lhs: mark(&r.lhs), rhs: mark(s), collapsing: false, rule: r.label.clone() };
                if !pairs.contains(&pair) {
                    pairs.push(pair);
                }
            }
        }
        let lvars = replacing_vars(&r.lhs, mu);
        for x in replacing_vars(&r.rhs, mu).into_iter().filter(|x| !lvars.contains(x)) {
            pairs.push(DependencyPair {
                lhs: mark(&r.lhs),
                rhs: Term::app(UNHIDE, vec![Term::Var(x)]),
                collapsing: true,
                rule: r.label.clone(),
            });
        }
        for (p, s) in r.rhs.subterms() {
            if let Some(g) = s.root() {
                if trs.is_defined(g) && !active.contains(&p) && !hidden.iter().any(|h| h.is_variant(s)) {
                    hidden.push(s.clone());
                }
            }
        }
    }
    let hides = hiding_contexts(trs, mu);
    let mut unhiding = Vec::new();
    for (f, i) in &hides {
        let d = trs.signature().symbol(f).expect("declared symbol");
        let xs: Vec<Term> = d.arg_sorts.iter().enumerate().map(|(k, s)| Term::var(&format!("x{}", k + 1), s)).collect();
        let lhs = Term::app(UNHIDE, vec![Term::app_name(f.clone(), xs.clone())]);
        unhiding.push((lhs, Term::app(UNHIDE, vec![xs[i - 1].clone()])));
    }
    for t in &hidden {
        unhiding.push((Term::app(UNHIDE, vec![t.clone()]), mark(t)));
    }
    let open_hidden = hidden.iter().any(|t| open_through(t, &hides));
    let capped = hidden.iter().map(|t| cap_marked(trs, mu, t)).collect();
    DpProblem { pairs, hidden, unhiding, open_hidden, capped }
}

/// Marked `t` with every variable renamed apart and every defined-rooted
/// active proper subterm replaced by a fresh variable.
fn cap_marked(trs: &Trs, mu: &ReplacementMap, t: &Term) -> Term {
    fn go(trs: &Trs, mu: &ReplacementMap, t: &Term, n: &mut usize) -> Term {
        let mut fresh = |s: &Term| {
            *n += 1;
            let sort = trs.signature().sort_of(s).unwrap_or_else(|_| UNSORTED.into());
            Term::var(&format!("_cap{n}"), &sort)
        };
        match t {
            Term::Var(_) => fresh(t),
            Term::App(f, _) if trs.is_defined(f) => fresh(t),
            Term::App(f, args) => Term::app_name(
                f.clone(),
                args.iter()
                    .enumerate()
                    .map(|(i, a)| if mu.contains(f, i + 1) { go(trs, mu, a, n) } else { frozen(a, n) })
                    .collect(),
            ),
        }
    }
    fn frozen(t: &Term, n: &mut usize) -> Term {
        t.map_vars(&mut |v| {
            *n += 1;
            Term::var(&format!("_cap{n}"), &v.sort)
        })
    }
    let mut n = 0;
    match t {
        Term::App(f, args) => Term::app_name(
            marked(f),
            args.iter()
                .enumerate()
                .map(|(i, a)| if mu.contains(f, i + 1) { go(trs, mu, a, &mut n) } else { frozen(a, &mut n) })
                .collect(),
        ),
        Term::Var(_) => t.clone(),
    }
}

impl DpProblem {
    fn edge(&self, i: usize, j: usize) -> bool {
        let target = &self.pairs[j].lhs;
        if self.pairs[i].collapsing {
            let target = target.rename_vars("'");
            self.open_hidden || self.capped.iter().any(|c| unify(c, &target).is_some())
        } else {
            self.pairs[i].rhs.root() == target.root()
        }
    }

    /// Non-trivial strongly connected components among `alive` pairs,
    /// each sorted, ordered by smallest member.
    pub fn sccs(&self, alive: &[usize]) -> Vec<Vec<usize>> {
        let mut g = DiGraph::<usize, ()>::new();
        let nodes: Vec<_> = alive.iter().map(|&i| g.add_node(i)).collect();
        for (a, &i) in alive.iter().enumerate() {
            for (b, &j) in alive.iter().enumerate() {
                if self.edge(i, j) {
                    g.add_edge(nodes[a], nodes[b], ());
                }
            }
        }
        let mut out: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|n| g[n]).collect();
                v.sort_unstable();
                v
            })
            .filter(|c| c.len() > 1 || self.edge(c[0], c[0]))
            .collect();
        out.sort();
        out
    }

    pub fn all(&self) -> Vec<usize> {
        (0..self.pairs.len()).collect()
    }

    fn index_of(&self, text: &str) -> Option<usize> {
        self.pairs.iter().position(|p| p.to_string() == text)
    }
}

/// One application of the reduction-pair processor to an SCC.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpStage {
    pub pairs: Vec<String>,
    pub interpretation: Interpretation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DpProof {
    pub stages: Vec<DpStage>,
}

pub const DP_HEADER: &str = "DEPENDENCY-PAIRS";

impl DpProof {
    pub fn to_text(&self) -> String {
        let mut s = format!("{DP_HEADER}\n");
        for st in &self.stages {
            s.push_str("STAGE\n");
            for p in &st.pairs {
                s.push_str(&format!("PAIR {p}\n"));
            }
            s.push_str(&st.interpretation.to_text());
        }
        s
    }

    pub fn parse(text: &str) -> Result<DpProof, CertError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
        while lines.peek().is_some_and(|(_, l)| l.trim().is_empty() || l.trim_start().starts_with(';')) {
            lines.next();
        }
        match lines.next() {
            Some((_, l)) if l.trim() == DP_HEADER => {}
            Some((line, _)) => return Err(CertError::Syntax { line, message: format!("expected {DP_HEADER}") }),
            None => return Err(CertError::Syntax { line: 1, message: "empty certificate".into() }),
        }
        let mut stages: Vec<(Vec<String>, Vec<(usize, &str)>)> = Vec::new();
        for (line, l) in lines {
            let t = l.trim();
            if t == "STAGE" {
                stages.push((Vec::new(), Vec::new()));
                continue;
            }
            if t.is_empty() || t.starts_with(';') {
                continue;
            }
            let Some(cur) = stages.last_mut() else {
                return Err(CertError::Syntax { line, message: "expected STAGE".into() });
            };
            match t.strip_prefix("PAIR ") {
                Some(p) => cur.0.push(p.trim().to_string()),
                None => cur.1.push((line, l)),
            }
        }
        let stages = stages
            .into_iter()
            .map(|(pairs, body)| Ok(DpStage { pairs, interpretation: Interpretation::parse_lines(body.into_iter())? }))
            .collect::<Result<_, CertError>>()?;
        Ok(DpProof { stages })
    }
}

/// Verify one processor application: R, the unhiding rules (when the SCC
/// has collapsing pairs) and all SCC pairs weakly decreasing, with
/// non-negative coefficients. Returns the strictly decreasing pairs.
pub fn check_stage(
    trs: &Trs,
    problem: &DpProblem,
    scc: &[usize],
    interp: &Interpretation,
) -> Result<(Vec<usize>, Vec<String>), CertError> {
    let mut diags = Vec::new();
    for (f, sp) in interp.symbols() {
        if !sp.poly.all_coefficients_nonneg() {
            diags.push(format!("[{f}] has a negative coefficient"));
        }
    }
    for r in trs.rules() {
        if !interp.difference(&r.lhs, &r.rhs)?.all_coefficients_nonneg() {
            diags.push(format!("rule {} ({r}) is not weakly oriented", r.label));
        }
    }
    if scc.iter().any(|&i| problem.pairs[i].collapsing) {
        for (l, r) in &problem.unhiding {
            if !interp.difference(l, r)?.all_coefficients_nonneg() {
                diags.push(format!("unhiding rule {l} -> {r} is not weakly oriented"));
            }
        }
    }
    let mut strict = Vec::new();
    for &i in scc {
        let p = &problem.pairs[i];
        let d = interp.difference(&p.lhs, &p.rhs)?;
        if !d.all_coefficients_nonneg() {
            diags.push(format!("pair {p} is not weakly oriented"));
        } else if (&d - &Poly::constant(1)).all_coefficients_nonneg() {
            strict.push(i);
        }
    }
    if strict.is_empty() && diags.is_empty() {
        diags.push("no pair is strictly oriented".into());
    }
    Ok((strict, diags))
}

/// Replay a staged proof: every SCC that arises must be handled by a stage
/// listing exactly its pairs.
pub fn check_dp_proof(trs: &Trs, mu: &ReplacementMap, proof: &DpProof) -> Result<CertCheck, CertError> {
    let problem = dependency_pairs(trs, mu);
    let mut stages: BTreeMap<BTreeSet<usize>, &DpStage> = BTreeMap::new();
    for st in &proof.stages {
        let mut set = BTreeSet::new();
        for p in &st.pairs {
            match problem.index_of(p) {
                Some(i) => {
                    set.insert(i);
                }
                None => return Ok(CertCheck::from_diagnostics(vec![format!("unknown pair {p}")])),
            }
        }
        stages.insert(set, st);
    }
    let mut work = problem.sccs(&problem.all());
    while let Some(scc) = work.pop() {
        let key: BTreeSet<usize> = scc.iter().copied().collect();
        let Some(stage) = stages.get(&key) else {
            let shown: Vec<String> = scc.iter().map(|&i| problem.pairs[i].to_string()).collect();
            return Ok(CertCheck::from_diagnostics(vec![format!("no stage for cycle {{{}}}", shown.join("; "))]));
        };
        let (strict, diags) = check_stage(trs, &problem, &scc, &stage.interpretation)?;
        if !diags.is_empty() {
            return Ok(CertCheck::from_diagnostics(diags));
        }
        let rest: Vec<usize> = scc.into_iter().filter(|i| !strict.contains(i)).collect();
        work.extend(problem.sccs(&rest));
    }
    Ok(CertCheck::from_diagnostics(Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repmap::canonical_map;
    use crate::syntax::parse;

    fn corpus(name: &str) -> crate::syntax::SpecFile {
        let path = format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"));
        parse(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    #[test]
    fn shallow_ex53_pairs() {
        let t = corpus("ex5_3_shallow.trs").trs;
        let mu = canonical_map(&t);
        let dp = dependency_pairs(&t, &mu);
        let shown: Vec<String> = dp.pairs.iter().map(|p| p.to_string()).collect();
        assert!(shown.contains(&"f#(a, sigma) -> f_a#(sigma)".to_string()), "{shown:?}");
        assert!(shown.contains(&"f_a#(sigma) -> #U(sigma)".to_string()), "{shown:?}");
        let hidden: Vec<String> = dp.hidden.iter().map(|t| t.to_string()).collect();
        assert_eq!(hidden, ["s", "f(b, :(y, sigma))"]);
        // The only hidden f-term has b first, so no collapsing pair reaches
        // f#(a, sigma).
        let sccs = dp.sccs(&dp.all());
        assert_eq!(sccs.len(), 1);
        assert!(sccs[0].iter().all(|&i| !dp.pairs[i].lhs.to_string().starts_with("f#(a")));
    }

    #[test]
    fn frozen_recursion_has_no_pairs() {
        let spec = corpus("zip_alt_p.trs");
        let mu = spec.strategy.unwrap();
        let dp = dependency_pairs(&spec.trs, &mu);
        assert!(dp.pairs.iter().all(|p| !p.rhs.root().is_some_and(|r| &**r == "p#")));
    }

    #[test]
    fn self_loop_is_an_scc() {
        let t = parse("(RULES p -> p)").unwrap().trs;
        let mu = ReplacementMap::top(t.signature());
        let dp = dependency_pairs(&t, &mu);
        assert_eq!(dp.sccs(&dp.all()), vec![vec![0]]);
    }

    #[test]
    fn proof_text_round_trip() {
        let mut interp = Interpretation::new();
        interp.insert("p#".into(), 0, Poly::constant(1));
        let proof = DpProof { stages: vec![DpStage { pairs: vec!["p# -> q#".into()], interpretation: interp }] };
        assert_eq!(DpProof::parse(&proof.to_text()).unwrap(), proof);
    }
}
