//! Shallowing: case-splitting along definitional trees with fresh symbols.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{
    definitional_tree, is_constructor_system, is_symbol_shallow, leaf_renaming, shallow_info, DefTree,
};
use crate::term::{Name, Rule, Signature, SymbolDecl, Term, TermError, Trs};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("sorts required")]
    Unsorted,
    #[error("not a constructor system")]
    NotConstructorSystem,
    #[error("`{0}` has no definitional tree")]
    NotInductivelySequential(Name),
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ShallowingResult {
    #[serde(skip)]
    pub output: Trs,
    /// Fresh symbol ↦ (origin symbol, constructor path).
    pub symbol_map: BTreeMap<Name, (Name, Vec<Name>)>,
    pub log: Vec<String>,
}

struct Emitter<'a> {
    input: &'a Trs,
    sig: Signature,
    rules: Vec<(Option<Name>, Term, Term)>,
    symbol_map: BTreeMap<Name, (Name, Vec<Name>)>,
    log: Vec<String>,
}

impl Emitter<'_> {
    fn fresh(&mut self, origin: &Name, path: &[Name], args: &[Term]) -> Result<Name, TransformError> {
        let mut name = format!("{origin}_{}", path.iter().map(|c| c.to_string()).collect::<String>());
        while self.sig.contains(&name) {
            name.push('\'');
        }
        let result = self.input.signature().symbol(origin).expect("declared").result.clone();
        let arg_sorts = args.iter().map(|a| a.as_var().expect("pattern variable").sort.clone()).collect();
        let name: Name = name.into();
        self.sig.declare_decl(SymbolDecl { name: name.clone(), arg_sorts, result })?;
        self.symbol_map.insert(name.clone(), (origin.clone(), path.to_vec()));
        Ok(name)
    }

    /// Emit the rules for a branch node whose pattern is represented by
    /// `g(args)`, with `args` the pattern variables in order.
    fn branch(
        &mut self,
        origin: &Name,
        g: &Name,
        args: &[Term],
        node: &DefTree,
        path: &[Name],
    ) -> Result<(), TransformError> {
        let DefTree::Branch { pattern, position, children } = node else { unreachable!("branch node") };
        let split = pattern.get(position).expect("split position");
        let idx = args.iter().position(|a| a == split).expect("split variable is an argument");
        self.log.push(format!(
            "{g}: split argument {} on {}",
            idx + 1,
            children
                .iter()
                .filter(|(_, c)| !matches!(c, DefTree::Exempt { .. }))
                .map(|(c, _)| c.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ));
        let is_root = g == origin && path.is_empty();
        for (c, child) in children {
            let inserted = child.pattern().get(position).expect("split position").clone();
            let mut lhs_args = args.to_vec();
            lhs_args[idx] = inserted;
            let lhs = Term::app_name(g.clone(), lhs_args);
            let mut child_path = path.to_vec();
            child_path.push(c.clone());
            match child {
                DefTree::Exempt { .. } => {}
                DefTree::Leaf { pattern, rule } if !is_root => {
                    let rhs = leaf_renaming(self.input, pattern, *rule).apply(&self.input.rules()[*rule].rhs);
                    self.rules.push((None, lhs, rhs));
                }
                DefTree::Leaf { pattern, rule } => {
                    let vars: Vec<Term> = pattern.vars().into_iter().map(Term::Var).collect();
                    let h = self.fresh(origin, &child_path, &vars)?;
                    let call = Term::app_name(h, vars);
                    self.rules.push((None, lhs, call.clone()));
                    let rhs = leaf_renaming(self.input, pattern, *rule).apply(&self.input.rules()[*rule].rhs);
                    self.rules.push((None, call, rhs));
                }
                DefTree::Branch { pattern, .. } => {
                    let vars: Vec<Term> = pattern.vars().into_iter().map(Term::Var).collect();
                    let h = self.fresh(origin, &child_path, &vars)?;
                    self.rules.push((None, lhs, Term::app_name(h.clone(), vars.clone())));
                    self.branch(origin, &h, &vars, child, &child_path)?;
                }
            }
        }
        Ok(())
    }
}

/// Replace the rules of every non-shallow defined symbol by a chain of
/// dispatcher rules over fresh symbols. Shallow symbols keep their rules.
pub fn shallow_transform(trs: &Trs) -> Result<ShallowingResult, TransformError> {
    if !trs.is_sorted() {
        return Err(TransformError::Unsorted);
    }
    if !is_constructor_system(trs) {
        return Err(TransformError::NotConstructorSystem);
    }
    let mut em = Emitter {
        input: trs,
        sig: trs.signature().clone(),
        rules: Vec::new(),
        symbol_map: BTreeMap::new(),
        log: Vec::new(),
    };
    let mut done: BTreeSet<Name> = BTreeSet::new();
    for r in trs.rules() {
        let f = r.root();
        if is_symbol_shallow(trs, f) {
            em.rules.push((Some(r.label.clone()), r.lhs.clone(), r.rhs.clone()));
            continue;
        }
        if !done.insert(f.clone()) {
            continue;
        }
        let tree = definitional_tree(trs, f).ok_or_else(|| TransformError::NotInductivelySequential(f.clone()))?;
        let args = tree.pattern().args().to_vec();
        em.branch(f, f, &args, &tree, &[])?;
    }
    let kept: BTreeSet<Name> = em.rules.iter().filter_map(|(l, _, _)| l.clone()).collect();
    let mut rules = Vec::new();
    for (k, (label, lhs, rhs)) in em.rules.into_iter().enumerate() {
        let label = label.unwrap_or_else(|| {
            let mut l = format!("r{}", k + 1);
            while kept.contains(l.as_str()) {
                l.push('\'');
            }
            l.into()
        });
        rules.push(Rule::new(&label, lhs, rhs)?);
    }
    let output = Trs::new(em.sig, rules)?;
    debug_assert!(shallow_info(&output).shallow);
    Ok(ShallowingResult { output, symbol_map: em.symbol_map, log: em.log })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::is_shallow;
    use crate::csr::reducts;
    use crate::repmap::ReplacementMap;
    use crate::syntax::{parse, print};

    fn corpus(name: &str) -> Trs {
        let path = format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"));
        parse(&std::fs::read_to_string(path).unwrap()).unwrap().trs
    }

    /// Is `to` reachable from `from` in at most `depth` unrestricted steps?
    fn reaches(trs: &Trs, from: &Term, to: &Term, depth: usize) -> bool {
        let top = ReplacementMap::top(trs.signature());
        let mut frontier = vec![from.clone()];
        for _ in 0..=depth {
            if frontier.contains(to) {
                return true;
            }
            frontier = frontier.iter().flat_map(|t| reducts(t, trs, &top)).map(|s| s.after).collect();
        }
        false
    }

    #[test]
    fn ex53_matches_displayed_system() {
        let out = shallow_transform(&corpus("ex5_3.trs")).unwrap();
        let expected = corpus("ex5_3_shallow.trs");
        let got: Vec<String> = out.output.rules().iter().map(|r| r.to_string()).collect();
        let want: Vec<String> = expected.rules().iter().map(|r| r.to_string()).collect();
        assert_eq!(got, want);
        assert_eq!(out.symbol_map.len(), 3);
        assert_eq!(out.symbol_map["f_b:"], (Name::from("f"), vec![Name::from("b"), Name::from(":")]));
        assert!(is_shallow(&out.output));
    }

    #[test]
    fn shallow_input_is_unchanged() {
        let t = corpus("zip_alt_p.trs");
        let out = shallow_transform(&t).unwrap();
        assert_eq!(out.output.rules(), t.rules());
        assert!(out.symbol_map.is_empty());
        let t = corpus("ex5_3_shallow.trs");
        assert_eq!(shallow_transform(&t).unwrap().output.rules(), t.rules());
    }

    #[test]
    fn nested_successor_chain() {
        let t = parse("(SORTS (N data)) (SIG (0 -> N) (s N -> N) (g N -> N)) (VAR (x N)) (RULES g(s(s(x))) -> x)")
            .unwrap()
            .trs;
        let out = shallow_transform(&t).unwrap();
        let got: Vec<String> = out.output.rules().iter().map(|r| r.to_string()).collect();
        assert_eq!(got, ["g(s(x)) -> g_s(x)", "g_s(s(x)) -> x"]);
        let two = Term::app("s", vec![Term::app("s", vec![Term::constant("0")])]);
        assert!(reaches(&out.output, &Term::app("g", vec![two]), &Term::constant("0"), 3));
    }

    #[test]
    fn original_rules_are_simulated() {
        let t = corpus("ex5_3.trs");
        let out = shallow_transform(&t).unwrap();
        for r in t.rules() {
            assert!(reaches(&out.output, &r.lhs, &r.rhs, 4), "{r}");
        }
    }

    #[test]
    fn output_round_trips_through_printer() {
        let out = shallow_transform(&corpus("ex5_3.trs")).unwrap();
        let text = print(&out.output, None);
        let back = parse(&text).unwrap().trs;
        assert_eq!(back.rules(), out.output.rules());
    }

    #[test]
    fn rejects_unsorted_and_parallel_input() {
        assert!(matches!(shallow_transform(&corpus("wallis.trs")), Err(TransformError::Unsorted)));
        let t = parse(
            "(SORTS (A data)) (SIG (a -> A) (b -> A) (f A A -> A)) (VAR (x A)) (RULES f(a, x) -> a f(x, a) -> a)",
        )
        .unwrap()
        .trs;
        assert!(matches!(shallow_transform(&t), Err(TransformError::NotInductivelySequential(_))));
    }

    #[test]
    fn fresh_names_avoid_existing_symbols() {
        let t = parse(
            "(SORTS (N data)) (SIG (0 -> N) (s N -> N) (g N -> N) (g_s N -> N)) (VAR (x N)) \
             (RULES g(s(s(x))) -> x g_s(x) -> x)",
        )
        .unwrap()
        .trs;
        let out = shallow_transform(&t).unwrap();
        assert!(out.symbol_map.contains_key("g_s'"));
        assert!(is_shallow(&out.output));
    }
}
