//! Depth-first search over small integer domains for polynomial
//! inequalities `Σ c·Π u^e ≥ bound`.

use std::collections::BTreeSet;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub terms: Vec<(i128, Vec<(usize, u32)>)>,
    pub bound: i128,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Sat(Vec<i64>),
    Unsat,
    /// Node or time budget ran out.
    Exhausted,
}

/// Shared node and wall-clock allowance.
#[derive(Debug, Clone)]
pub struct Meter {
    pub nodes_left: u64,
    pub deadline: Option<Instant>,
    expired: bool,
}

impl Meter {
    pub fn new(nodes: u64, deadline: Option<Instant>) -> Meter {
        Meter { nodes_left: nodes, deadline, expired: false }
    }

    pub fn expired(&self) -> bool {
        self.expired || self.nodes_left == 0
    }

    fn tick(&mut self) -> bool {
        if self.expired() {
            return false;
        }
        self.nodes_left -= 1;
        if self.nodes_left.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.expired = true;
        }
        !self.expired()
    }
}

type Domains = (Vec<i64>, Vec<i64>);

struct Search<'a> {
    p: &'a Problem,
    uses: Vec<Vec<usize>>,
    meter: &'a mut Meter,
}

fn pow(v: i64, e: u32) -> i128 {
    (v as i128).saturating_pow(e)
}

/// Range of one term over the current domains (all domains are
/// non-negative).
fn term_range(coef: i128, factors: &[(usize, u32)], d: &Domains) -> (i128, i128) {
    let lo = factors.iter().fold(1i128, |acc, &(u, e)| acc.saturating_mul(pow(d.0[u], e)));
    let hi = factors.iter().fold(1i128, |acc, &(u, e)| acc.saturating_mul(pow(d.1[u], e)));
    if coef >= 0 {
        (coef.saturating_mul(lo), coef.saturating_mul(hi))
    } else {
        (coef.saturating_mul(hi), coef.saturating_mul(lo))
    }
}

impl Search<'_> {
    /// Tighten domains with constraint `ci`; false on a wipe-out.
    fn revise(&self, ci: usize, d: &mut Domains, changed: &mut Vec<usize>) -> bool {
        let c = &self.p.constraints[ci];
        let ranges: Vec<(i128, i128)> = c.terms.iter().map(|(k, f)| term_range(*k, f, d)).collect();
        let max: i128 = ranges.iter().fold(0i128, |a, r| a.saturating_add(r.1));
        if max < c.bound {
            return false;
        }
        for (t, (coef, factors)) in c.terms.iter().enumerate() {
            // term t must reach at least `need`
            let need = c.bound.saturating_sub(max.saturating_sub(ranges[t].1));
            for (k, &(u, e)) in factors.iter().enumerate() {
                if e != 1 || d.0[u] == d.1[u] {
                    continue;
                }
                let others = |pick: &dyn Fn(usize) -> i64| {
                    factors
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != k)
                        .fold(1i128, |acc, (_, &(v, ev))| acc.saturating_mul(pow(pick(v), ev)))
                };
                if *coef > 0 {
                    let m = coef.saturating_mul(others(&|v| d.1[v]));
                    if need > 0 {
                        if m == 0 {
                            return false;
                        }
                        let lb = (need + m - 1) / m;
                        if lb > d.0[u] as i128 {
                            if lb > d.1[u] as i128 {
                                return false;
                            }
                            d.0[u] = lb as i64;
                            changed.push(u);
                        }
                    }
                } else {
                    let m = coef.saturating_neg().saturating_mul(others(&|v| d.0[v]));
                    // -m * u >= need
                    if m > 0 {
                        let ub = (-need).div_euclid(m);
                        if ub < d.1[u] as i128 {
                            if ub < d.0[u] as i128 {
                                return false;
                            }
                            d.1[u] = ub as i64;
                            changed.push(u);
                        }
                    }
                }
            }
        }
        true
    }

    fn propagate(&self, d: &mut Domains, mut queue: Vec<usize>) -> bool {
        let mut queued = vec![false; self.p.constraints.len()];
        for &c in &queue {
            queued[c] = true;
        }
        while let Some(ci) = queue.pop() {
            queued[ci] = false;
            let mut changed = Vec::new();
            if !self.revise(ci, d, &mut changed) {
                return false;
            }
            for u in changed {
                for &cj in &self.uses[u] {
                    if !queued[cj] {
                        queued[cj] = true;
                        queue.push(cj);
                    }
                }
            }
        }
        true
    }

    /// Smallest open domain, ties broken by number of constraints.
    fn choose(&self, d: &Domains) -> Option<usize> {
        (0..d.0.len())
            .filter(|&u| d.0[u] < d.1[u])
            .min_by_key(|&u| (d.1[u] - d.0[u], usize::MAX - self.uses[u].len(), u))
    }

    fn run(&mut self, d: &Domains) -> Option<Option<Vec<i64>>> {
        let Some(u) = self.choose(d) else { return Some(Some(d.0.clone())) };
        for v in d.0[u]..=d.1[u] {
            if !self.meter.tick() {
                return None;
            }
            let mut next = d.clone();
            next.0[u] = v;
            next.1[u] = v;
            if self.propagate(&mut next, self.uses[u].clone()) {
                if let Some(found) = self.run(&next)? {
                    return Some(Some(found));
                }
            }
        }
        Some(None)
    }
}

pub fn solve(p: &Problem, meter: &mut Meter) -> Outcome {
    let n = p.lo.len();
    let mut uses = vec![Vec::new(); n];
    for (ci, c) in p.constraints.iter().enumerate() {
        let vars: BTreeSet<usize> = c.terms.iter().flat_map(|(_, f)| f.iter().map(|(u, _)| *u)).collect();
        for u in vars {
            uses[u].push(ci);
        }
    }
    let mut s = Search { p, uses, meter };
    let mut d = (p.lo.clone(), p.hi.clone());
    if !s.propagate(&mut d, (0..p.constraints.len()).collect()) {
        return Outcome::Unsat;
    }
    match s.run(&d) {
        Some(Some(v)) => Outcome::Sat(v),
        Some(None) => Outcome::Unsat,
        None => Outcome::Exhausted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meter() -> Meter {
        Meter::new(1_000_000, None)
    }

    #[test]
    fn finds_smallest_product_solution() {
        // u0 * u1 - u2 >= 4, u2 >= 1
        let p = Problem {
            lo: vec![0, 0, 0],
            hi: vec![3, 3, 3],
            constraints: vec![
                Constraint { terms: vec![(1, vec![(0, 1), (1, 1)]), (-1, vec![(2, 1)])], bound: 4 },
                Constraint { terms: vec![(1, vec![(2, 1)])], bound: 1 },
            ],
        };
        let Outcome::Sat(v) = solve(&p, &mut meter()) else { panic!() };
        assert!(v[0] * v[1] - v[2] >= 4 && v[2] >= 1);
    }

    #[test]
    fn detects_unsat() {
        let p = Problem {
            lo: vec![0],
            hi: vec![3],
            constraints: vec![Constraint { terms: vec![(1, vec![(0, 2)])], bound: 10 }],
        };
        assert_eq!(solve(&p, &mut meter()), Outcome::Unsat);
    }

    #[test]
    fn zero_budget_is_exhausted() {
        let p = Problem {
            lo: vec![0, 0],
            hi: vec![3, 3],
            constraints: vec![Constraint { terms: vec![(1, vec![(0, 1)]), (1, vec![(1, 1)])], bound: 5 }],
        };
        assert_eq!(solve(&p, &mut Meter::new(0, None)), Outcome::Exhausted);
    }
}
