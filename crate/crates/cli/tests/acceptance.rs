//! End-to-end acceptance run. One PASS/FAIL line per criterion; exits
//! nonzero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use csr_core::analysis::{compatibility_class, is_shallow, CompatibilityClass};
use csr_core::productivity::{prove_productive, Answer};
use csr_core::repmap::{canonical_map, mu_delta, ReplacementMap};
use csr_core::syntax::parse;
use csr_core::termination::{SearchBudget, TerminationOutcome};

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn path(name: &str) -> String {
    format!("{}/{name}", common::corpus_dir())
}

fn csr(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_csr")).args(args).output().expect("run csr");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn expect(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn lines_present(out: &str, want: &[&str]) -> Result<(), String> {
    for w in want {
        expect(out.lines().any(|l| l.trim() == *w), format!("missing line `{w}`"))?;
    }
    Ok(())
}

fn canonical_maps() -> Outcome {
    let (code, out) = csr(&["canonical", &path("ordinals.trs")]);
    expect(code == 0, format!("exit {code}"))?;
    lines_present(
        &out,
        &[
            "μcan(S) = ∅",
            "μcan(L) = ∅",
            "μcan(nats) = ∅",
            "μcan(:) = ∅",
            "μcan(+) = {2}",
            "μcan(+_L) = {2}",
            "μcan(×) = {2}",
            "μcan(×_L) = {2}",
        ],
    )?;
    let (code, out) = csr(&["canonical", &path("wallis.trs")]);
    expect(code == 0, format!("exit {code}"))?;
    lines_present(&out, &["μcan(cons) = ∅", "isCanonicalFor(strategy) = true"])?;
    Ok("ordinals and wallis maps exact".into())
}

fn productivity_verdicts() -> Outcome {
    let (code, out) = csr(&["prove-productivity", &path("zip_alt_p.trs")]);
    expect(code == 0, format!("zip/alt/p exit {code}"))?;
    lines_present(&out, &["productive: yes", "map: (0) (1) (: 1) (zip 1) (alt) (p)"])?;

    let (code, out) = csr(&["prove-productivity", &path("ordinals.trs")]);
    expect(code == 0, format!("ordinals exit {code}"))?;
    lines_present(&out, &["productive: yes", "map: (0) (S 1) (L) (:) (+ 2) (× 2) (+_L 2) (×_L 2) (nats) (omega)"])?;
    for cert in ["ordinals.cert", "ordinals.hand.cert"] {
        let (code, out) = csr(&["check-cert", &path("ordinals.trs"), "--cert", &path(&format!("golden/{cert}"))]);
        expect(code == 0, format!("golden {cert} rejected: {out}"))?;
    }

    let spec = common::corpus("ex5_3.trs");
    let direct = prove_productive(&spec.trs, None, &SearchBudget::with_time_ms(60_000));
    expect(direct.answer == Answer::Unknown, format!("ex5_3 direct answer {:?}", direct.answer))?;
    expect(direct.used_map == canonical_map(&spec.trs), "ex5_3 map is not μcan")?;
    let Some(TerminationOutcome::Nonterminating { witness }) = &direct.evidence else {
        return Err("ex5_3 has no loop witness".into());
    };
    expect(
        witness.start.to_string() == "s"
            && witness.end().to_string() == ":(b, s)"
            && witness.reentry_position.to_string() == "2",
        format!("unexpected loop {}", witness.to_text()),
    )?;
    let (code, out) = csr(&["prove-productivity", &path("ex5_3.trs")]);
    expect(code == 0, format!("ex5_3 pipeline exit {code}"))?;
    lines_present(
        &out,
        &[
            "direct: unknown",
            "- [termination-implies-productive] μ-terminating (loop s ↪+ :(b, s) at 2)",
            "via shallowing: yes",
        ],
    )?;

    let shallow = common::corpus("ex5_3_shallow.trs");
    let delta = mu_delta(&shallow.trs).map_err(|e| e.to_string())?;
    expect(delta == ReplacementMap::bottom(shallow.trs.signature()), "μ_Δ is not μ_⊥")?;
    let (code, out) = csr(&["prove-productivity", &path("ex5_3_shallow.trs")]);
    expect(code == 0, format!("transformed ex5_3 exit {code}"))?;
    let map_line = format!("map: {}", canonical_map(&shallow.trs));
    lines_present(&out, &["productive: yes", &map_line])?;
    Ok("zip/alt/p yes, ordinals yes, ex5_3 unknown with loop at 2, transformed yes".into())
}

fn zr10_separation() -> Outcome {
    let (code, out) = csr(&["prove-productivity", &path("zip_alt_p.trs"), "--mode", "zr10"]);
    expect(code == 2, format!("zr10 exit {code}"))?;
    lines_present(&out, &["productive: unknown", "nonterminating"])?;
    let (code, _) = csr(&["prove-productivity", &path("zip_alt_p.trs")]);
    expect(code == 0, format!("default exit {code}"))?;
    Ok("zr10 loops, default proves".into())
}

fn shallowing_golden() -> Outcome {
    let (code, out) = csr(&["transform-shallow", &path("ex5_3.trs")]);
    expect(code == 0, format!("exit {code}"))?;
    let got = parse(&out).map_err(|e| format!("output does not parse: {e}"))?.trs;
    let want = common::corpus("ex5_3_shallow.trs").trs;
    let rules = |t: &csr_core::term::Trs| {
        let mut v: Vec<String> = t.rules().iter().map(|r| format!("{} -> {}", r.lhs, r.rhs)).collect();
        v.sort();
        v
    };
    expect(got.rules().len() == 6, format!("{} rules", got.rules().len()))?;
    expect(rules(&got) == rules(&want), format!("rules differ: {:?}", rules(&got)))?;
    expect(is_shallow(&got), "not shallow")?;
    expect(compatibility_class(&got) == CompatibilityClass::Strong, "not strongly compatible")?;
    let mu = canonical_map(&got);
    expect(got.constructors().iter().all(|c| mu.get(c).is_empty()), "a constructor is replacing under μcan")?;
    Ok("six rules, shallow, strongly compatible, constructors frozen".into())
}

fn property_suites() -> Outcome {
    let suites = common::by_name();
    for (name, run) in &suites {
        run().map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{} suites × {} cases", suites.len(), common::CASES))
}

fn theorem_oracles() -> Outcome {
    let hnf = common::head_normal_form_oracle(&common::CORPUS)?;
    let prefix = common::constructor_prefix_oracle(&common::CORPUS)?;
    expect(hnf.normal_forms > 0 && prefix.prefixes > 0, "no seeds checked")?;
    Ok(format!("{} μ-normal forms head-normal, {} constructor prefixes agree", hnf.normal_forms, prefix.prefixes))
}

fn fig1_sanity() -> Outcome {
    let wallis = path("wallis.trs");
    let (code, out) = csr(&["normalize", &wallis, "--term", "evenNs", "--fuel", "50"]);
    expect(code == 0, format!("exit {code}"))?;
    expect(out.lines().last().is_some_and(|l| l.ends_with(": cons(0, incr(oddNs))")), format!("got {out}"))?;
    let (code, out) = csr(&["normalize", &wallis, "--term", "evenNs", "--fuel", "5", "--map", "top"]);
    expect(code == 2, format!("μ_⊤ exit {code}"))?;
    expect(out.lines().last().is_some_and(|l| l.starts_with("fuel 5 exhausted")), format!("got {out}"))?;
    Ok("cons(0, incr(oddNs)) under the strategy, fuel exhausted under μ_⊤".into())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("canonical maps", 1, canonical_maps),
        ("productivity verdicts", 240, productivity_verdicts),
        ("zr10 separation", 10, zr10_separation),
        ("shallowing golden", 1, shallowing_golden),
        ("property suites", 120, property_suites),
        ("theorem oracles", 120, theorem_oracles),
        ("evenNs sanity", 1, fig1_sanity),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let result = match result {
            Ok(msg) if took > Duration::from_secs(*limit) => Err(format!("{msg}, but took {took:.2?} > {limit}s")),
            r => r,
        };
        match result {
            Ok(msg) => println!("criterion {}: PASS {name} ({msg}; {took:.2?})", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({msg}; {took:.2?})", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
