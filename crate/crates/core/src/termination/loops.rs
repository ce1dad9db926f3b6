//! Bounded search for μ-loops: derivations t ↪+ u with σ(t) at a
//! μ-replacing position of u.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::csr::{reducts, rewrite_at, StepRecord};
use crate::repmap::{is_replacing, replacing_positions, ReplacementMap};
use crate::term::{match_pattern, Position, Substitution, Term, Trs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LoopBounds {
    pub max_depth: usize,
    pub max_term_size: usize,
    /// Terms explored per start term.
    pub max_frontier: usize,
}

impl Default for LoopBounds {
    fn default() -> Self {
        LoopBounds { max_depth: 12, max_term_size: 60, max_frontier: 20_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LoopWitness {
    pub start: Term,
    pub steps: Vec<StepRecord>,
    pub reentry_position: Position,
    pub matcher: Substitution,
}

impl LoopWitness {
    pub fn end(&self) -> &Term {
        self.steps.last().map_or(&self.start, |s| &s.after)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("start {}\n", self.start);
        for st in &self.steps {
            s.push_str(&format!("  {} {} {}\n", st.position, st.rule_label, st.after));
        }
        s.push_str(&format!("re-enters at {} with {}\n", self.reentry_position, self.matcher));
        s
    }
}

struct Node {
    term: Term,
    parent: Option<usize>,
    step: Option<StepRecord>,
    depth: usize,
}

fn path(nodes: &[Node], mut i: usize) -> Vec<usize> {
    let mut out = vec![i];
    while let Some(p) = nodes[i].parent {
        out.push(p);
        i = p;
    }
    out.reverse();
    out
}

/// Breadth-first μ-rewriting from every left-hand side; variables are
/// rigid. Returns the first re-entry found, after replaying it.
pub fn find_loop(trs: &Trs, mu: &ReplacementMap, bounds: &LoopBounds) -> Option<LoopWitness> {
    for r in trs.rules() {
        if let Some(w) = search_from(trs, mu, &r.lhs, bounds) {
            if replay_loop(trs, mu, &w).is_ok() {
                return Some(w);
            }
        }
    }
    None
}

fn search_from(trs: &Trs, mu: &ReplacementMap, start: &Term, bounds: &LoopBounds) -> Option<LoopWitness> {
    let mut nodes = vec![Node { term: start.clone(), parent: None, step: None, depth: 0 }];
    let mut seen: HashSet<Term> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if nodes[i].depth >= bounds.max_depth {
            continue;
        }
        let chain = path(&nodes, i);
        for rec in reducts(&nodes[i].term, trs, mu) {
            if nodes.len() >= bounds.max_frontier {
                return None;
            }
            if rec.after.size() > bounds.max_term_size {
                continue;
            }
            let u = &rec.after;
            for p in replacing_positions(u, mu) {
                let sub = u.get(&p).expect("position of u");
                for (a, &anc) in chain.iter().enumerate() {
                    if let Some(sigma) = match_pattern(&nodes[anc].term, sub) {
                        let mut steps: Vec<StepRecord> =
                            chain[a + 1..].iter().map(|&n| nodes[n].step.clone().expect("non-root")).collect();
                        steps.push(rec.clone());
                        return Some(LoopWitness {
                            start: nodes[anc].term.clone(),
                            steps,
                            reentry_position: p,
                            matcher: sigma,
                        });
                    }
                }
            }
            if !seen.insert(rec.after.clone()) {
                continue;
            }
            let depth = nodes[i].depth + 1;
            nodes.push(Node { term: rec.after.clone(), parent: Some(i), step: Some(rec), depth });
            queue.push_back(nodes.len() - 1);
        }
    }
    None
}

fn rule_index(trs: &Trs, label: &str) -> Result<usize, String> {
    trs.rules().iter().position(|r| &*r.label == label).ok_or_else(|| format!("unknown rule {label}"))
}

/// Check that the recorded steps are μ-steps from `start` and that the
/// matcher instance of `start` sits at a μ-replacing position of the end.
pub fn replay_loop(trs: &Trs, mu: &ReplacementMap, w: &LoopWitness) -> Result<(), String> {
    if w.steps.is_empty() {
        return Err("a loop needs at least one step".into());
    }
    let mut cur = w.start.clone();
    for (k, st) in w.steps.iter().enumerate() {
        if st.before != cur {
            return Err(format!("step {}: expected source {cur}, recorded {}", k + 1, st.before));
        }
        if !is_replacing(&cur, &st.position, mu) {
            return Err(format!("step {}: position {} is not μ-replacing", k + 1, st.position));
        }
        let rule = rule_index(trs, &st.rule_label)?;
        let next = rewrite_at(&cur, trs, rule, &st.position)
            .ok_or_else(|| format!("step {}: rule {} does not apply at {}", k + 1, st.rule_label, st.position))?;
        if next != st.after {
            return Err(format!("step {}: got {next}, recorded {}", k + 1, st.after));
        }
        cur = next;
    }
    if !is_replacing(&cur, &w.reentry_position, mu) {
        return Err(format!("re-entry position {} is not μ-replacing", w.reentry_position));
    }
    if cur.get(&w.reentry_position) != Some(&w.matcher.apply(&w.start)) {
        return Err(format!("no instance of {} at {}", w.start, w.reentry_position));
    }
    Ok(())
}

/// The derivation obtained by running the loop `times` times, each round
/// one level deeper at the re-entry position.
pub fn unroll(trs: &Trs, mu: &ReplacementMap, w: &LoopWitness, times: usize) -> Result<Vec<StepRecord>, String> {
    replay_loop(trs, mu, w)?;
    let mut out = Vec::new();
    let mut cur = w.start.clone();
    let mut prefix = Position::root();
    for _ in 0..times {
        for st in &w.steps {
            let pos = prefix.concat(&st.position);
            if !is_replacing(&cur, &pos, mu) {
                return Err(format!("position {pos} is not μ-replacing"));
            }
            let rule = rule_index(trs, &st.rule_label)?;
            let next =
                rewrite_at(&cur, trs, rule, &pos).ok_or_else(|| format!("rule {} fails at {pos}", st.rule_label))?;
            out.push(StepRecord { position: pos, rule_label: st.rule_label.clone(), before: cur, after: next.clone() });
            cur = next;
        }
        prefix = prefix.concat(&w.reentry_position);
    }
    Ok(out)
}
