//! Coefficient search for polynomial interpretations.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::dp::{check_stage, dependency_pairs, DpProblem, DpProof, DpStage, UNHIDE};
use super::interp::{check_certificate, CertError, Interpretation};
use super::poly::{Monomial, Poly, VarId};
use super::solver::{solve, Constraint, Meter, Outcome, Problem};
use crate::repmap::ReplacementMap;
use crate::term::{Name, Term, Trs};

/// Unknown coefficients are variables numbered from here; term variables
/// stay below.
const UNKNOWN_BASE: VarId = 1 << 20;
const MAX_COEFFICIENT: i64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchBudget {
    /// Solver nodes across all phases; 0 disables the search.
    pub max_nodes: u64,
    pub time_ms: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 50_000_000, time_ms: 30_000 }
    }
}

impl SearchBudget {
    pub fn with_time_ms(time_ms: u64) -> SearchBudget {
        SearchBudget { time_ms, ..SearchBudget::default() }
    }

    pub fn is_zero(&self) -> bool {
        self.max_nodes == 0 || self.time_ms == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Constant and linear monomials.
    Linear,
    /// Linear plus pairwise products of distinct arguments.
    Mixed,
}

/// Interpretations whose coefficients are unknowns.
struct Template {
    interp: Interpretation,
    lo: Vec<i64>,
}

impl Template {
    fn new() -> Template {
        Template { interp: Interpretation::new(), lo: Vec::new() }
    }

    fn unknown(&mut self) -> Poly {
        let u = UNKNOWN_BASE + self.lo.len() as VarId;
        self.lo.push(0);
        Poly::var(u)
    }

    /// Add [f] with one unknown per monomial; returns the unknown index of
    /// each linear coefficient.
    fn add(&mut self, f: Name, arity: usize, shape: Shape) -> Vec<usize> {
        let mut p = self.unknown();
        let mut linear = Vec::new();
        for i in 0..arity {
            linear.push(self.lo.len());
            p = &p + &(&self.unknown() * &Poly::var(i as VarId));
        }
        if shape == Shape::Mixed {
            for i in 0..arity {
                for j in i + 1..arity {
                    let m = Poly::monomial(Monomial::var(i as VarId).mul(&Monomial::var(j as VarId)), 1);
                    p = &p + &(&self.unknown() * &m);
                }
            }
        }
        self.interp.insert(f, arity, p);
        linear
    }

    fn problem(&self, constraints: Vec<Constraint>) -> Problem {
        Problem { lo: self.lo.clone(), hi: vec![MAX_COEFFICIENT; self.lo.len()], constraints }
    }

    fn instantiate(&self, values: &[i64]) -> Interpretation {
        let mut out = Interpretation::new();
        for (f, sp) in self.interp.symbols() {
            let p = sp.poly.substitute(&mut |v| {
                if v >= UNKNOWN_BASE {
                    Poly::constant(values[(v - UNKNOWN_BASE) as usize] as i128)
                } else {
                    Poly::var(v)
                }
            });
            out.insert(f.clone(), sp.arity, p);
        }
        out
    }
}

/// Coefficient-wise constraints for `diff ≥ strict` (absolute positiveness).
fn orient(diff: &Poly, strict: bool, out: &mut Vec<Constraint>) {
    let mut groups: BTreeMap<Monomial, Vec<(i128, Vec<(usize, u32)>)>> = BTreeMap::new();
    for (m, c) in diff.terms() {
        let (x, u) = m.split(UNKNOWN_BASE);
        let factors = u.factors().iter().map(|&(v, e)| ((v - UNKNOWN_BASE) as usize, e)).collect();
        groups.entry(x).or_default().push((c, factors));
    }
    if strict {
        groups.entry(Monomial::one()).or_default();
    }
    for (x, terms) in groups {
        let bound = i128::from(strict && x.is_one());
        out.push(Constraint { terms, bound });
    }
}

fn meter_for(share: Duration, nodes: u64) -> Meter {
    Meter::new(nodes, Some(Instant::now() + share))
}

fn direct_template(trs: &Trs, mu: &ReplacementMap, shape: Shape) -> Template {
    let mut t = Template::new();
    for d in trs.signature().symbols() {
        let linear = t.add(d.name.clone(), d.arity(), shape);
        for &i in mu.get(&d.name) {
            t.lo[linear[i - 1]] = 1;
        }
    }
    t
}

/// Search for a direct μ-monotone certificate of the given shape.
pub fn find_direct(trs: &Trs, mu: &ReplacementMap, shape: Shape, meter: &mut Meter) -> Option<Interpretation> {
    let t = direct_template(trs, mu, shape);
    let mut constraints = Vec::new();
    for r in trs.rules() {
        let diff = t.interp.difference(&r.lhs, &r.rhs).expect("template covers the signature");
        orient(&diff, true, &mut constraints);
    }
    constraints.sort();
    constraints.dedup();
    let Outcome::Sat(values) = solve(&t.problem(constraints), meter) else { return None };
    let cert = t.instantiate(&values);
    check_certificate(trs, mu, &cert).ok().filter(|c| c.ok).map(|_| cert)
}

fn stage_template(trs: &Trs, problem: &DpProblem, scc: &[usize], shape: Shape) -> Template {
    let mut t = Template::new();
    for d in trs.signature().symbols() {
        t.add(d.name.clone(), d.arity(), shape);
    }
    for &i in scc {
        let p = &problem.pairs[i];
        for side in [&p.lhs, &p.rhs] {
            if let Term::App(f, args) = side {
                if t.interp.get(f).is_none() {
                    t.add(f.clone(), args.len(), shape);
                }
            }
        }
    }
    if scc.iter().any(|&i| problem.pairs[i].collapsing) && t.interp.get(UNHIDE).is_none() {
        t.add(UNHIDE.into(), 1, Shape::Linear);
    }
    for (_, r) in &problem.unhiding {
        if let Term::App(f, args) = r {
            if t.interp.get(f).is_none() && scc.iter().any(|&i| problem.pairs[i].collapsing) {
                t.add(f.clone(), args.len(), shape);
            }
        }
    }
    t
}

fn solve_stage(
    trs: &Trs,
    problem: &DpProblem,
    scc: &[usize],
    shape: Shape,
    meter: &mut Meter,
) -> Result<Option<(Interpretation, Vec<usize>)>, ()> {
    let t = stage_template(trs, problem, scc, shape);
    let diff = |l: &Term, r: &Term| t.interp.difference(l, r).expect("template covers every symbol");
    let mut base = Vec::new();
    for r in trs.rules() {
        orient(&diff(&r.lhs, &r.rhs), false, &mut base);
    }
    if scc.iter().any(|&i| problem.pairs[i].collapsing) {
        for (l, r) in &problem.unhiding {
            orient(&diff(l, r), false, &mut base);
        }
    }
    let pair_diffs: Vec<Poly> = scc.iter().map(|&i| diff(&problem.pairs[i].lhs, &problem.pairs[i].rhs)).collect();
    for d in &pair_diffs {
        orient(d, false, &mut base);
    }
    for d in &pair_diffs {
        let mut cs = base.clone();
        orient(d, true, &mut cs);
        cs.sort();
        cs.dedup();
        match solve(&t.problem(cs), meter) {
            Outcome::Sat(values) => {
                let interp = t.instantiate(&values);
                return match check_stage(trs, problem, scc, &interp) {
                    Ok((strict, diags)) if diags.is_empty() => Ok(Some((interp, strict))),
                    _ => Ok(None),
                };
            }
            Outcome::Unsat => {}
            Outcome::Exhausted => return Err(()),
        }
    }
    Ok(None)
}

/// Dependency-pair proof: repeatedly orient each cycle of the estimated
/// graph and drop its strictly decreasing pairs.
pub fn find_dp(trs: &Trs, mu: &ReplacementMap, shape: Shape, meter: &mut Meter) -> Option<DpProof> {
    let problem = dependency_pairs(trs, mu);
    let mut stages = Vec::new();
    let mut work = problem.sccs(&problem.all());
    while let Some(scc) = work.pop() {
        let (interp, strict) = solve_stage(trs, &problem, &scc, shape, meter).ok()??;
        stages.push(DpStage {
            pairs: scc.iter().map(|&i| problem.pairs[i].to_string()).collect(),
            interpretation: interp,
        });
        let rest: Vec<usize> = scc.into_iter().filter(|i| !strict.contains(i)).collect();
        work.extend(problem.sccs(&rest));
    }
    Some(DpProof { stages })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "text", rename_all = "camelCase")]
pub enum Certificate {
    Direct(Interpretation),
    DependencyPairs(DpProof),
}

impl Certificate {
    pub fn to_text(&self) -> String {
        match self {
            Certificate::Direct(i) => i.to_text(),
            Certificate::DependencyPairs(p) => p.to_text(),
        }
    }

    /// Dependency-pair proofs start with their header line; anything else is
    /// read as a direct interpretation.
    pub fn parse(text: &str) -> Result<Certificate, CertError> {
        let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with(';'));
        if first == Some(super::dp::DP_HEADER) {
            DpProof::parse(text).map(Certificate::DependencyPairs)
        } else {
            Interpretation::parse(text).map(Certificate::Direct)
        }
    }

    pub fn check(&self, trs: &Trs, mu: &ReplacementMap) -> Result<super::interp::CertCheck, CertError> {
        match self {
            Certificate::Direct(i) => check_certificate(trs, mu, i),
            Certificate::DependencyPairs(p) => super::dp::check_dp_proof(trs, mu, p),
        }
    }
}

/// Direct certificates only, linear shapes first.
pub fn find_certificate(trs: &Trs, mu: &ReplacementMap, budget: &SearchBudget) -> Option<Interpretation> {
    if budget.is_zero() {
        return None;
    }
    let total = Duration::from_millis(budget.time_ms);
    let start = Instant::now();
    let mut nodes = budget.max_nodes;
    for (k, shape) in [Shape::Linear, Shape::Mixed].into_iter().enumerate() {
        let left = total.saturating_sub(start.elapsed());
        let mut meter = meter_for(if k == 0 { left / 2 } else { left }, nodes);
        let found = find_direct(trs, mu, shape, &mut meter);
        nodes = meter.nodes_left;
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Direct linear, then dependency pairs linear, then the mixed shapes; each
/// phase gets an even share of the remaining time.
pub fn find_proof(trs: &Trs, mu: &ReplacementMap, budget: &SearchBudget) -> Option<Certificate> {
    if budget.is_zero() {
        return None;
    }
    let total = Duration::from_millis(budget.time_ms);
    let start = Instant::now();
    let mut nodes = budget.max_nodes;
    let phases: [(bool, Shape); 4] =
        [(false, Shape::Linear), (true, Shape::Linear), (false, Shape::Mixed), (true, Shape::Mixed)];
    for (k, (dp, shape)) in phases.into_iter().enumerate() {
        let left = total.saturating_sub(start.elapsed());
        let share = left / (phases.len() - k) as u32;
        let mut meter = meter_for(share, nodes);
        let found = if dp {
            find_dp(trs, mu, shape, &mut meter).map(Certificate::DependencyPairs)
        } else {
            find_direct(trs, mu, shape, &mut meter).map(Certificate::Direct)
        };
        nodes = meter.nodes_left;
        if found.is_some() {
            return found;
        }
        if nodes == 0 {
            break;
        }
    }
    None
}
