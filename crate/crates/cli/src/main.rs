//! `csr`: analyses, μ-termination and productivity proofs for `.trs` files.
//!
//! Exit codes: 0 yes/proved, 1 no/disproved, 2 unknown, 3 usage or input
//! errors.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use csr_core::analysis::{analyze, is_shallow, CompatibilityClass};
use csr_core::csr::{normalize, StopReason};
use csr_core::productivity::{prove_productive_with_shallowing, Answer, Verdict};
use csr_core::repmap::{canonical_map, fmt_set, is_canonical_for, mu_delta, zr10_map, ReplacementMap};
use csr_core::syntax::{parse, parse_term, print, SpecFile};
use csr_core::termination::{prove, CertCheck, Certificate, SearchBudget, TerminationOutcome};
use csr_core::transform::shallow_transform;

use report::Report;

#[derive(Parser)]
#[command(name = "csr", version, about = "Context-sensitive rewriting prover")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Input `.trs` file.
    file: PathBuf,
    /// Write a JSON report to PATH, or to standard output without a PATH.
    #[arg(long, num_args = 0..=1, value_name = "PATH")]
    json: Option<Option<PathBuf>>,
}

#[derive(Args)]
struct MapArg {
    /// canonical | delta | canonical+delta | top | bottom | strategy | file:PATH
    #[arg(long)]
    map: Option<String>,
}

#[derive(Args)]
struct BudgetArg {
    /// Wall-clock budget for certificate search.
    #[arg(long, default_value_t = SearchBudget::default().time_ms)]
    budget_ms: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Default,
    Zr10,
}

#[derive(Subcommand)]
enum Command {
    /// Structural properties of the system.
    Analyze(Common),
    /// The canonical map, μ_Δ and whether the file's strategy is canonical.
    Canonical(Common),
    /// μ-normalize a term.
    Normalize {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        map: MapArg,
        #[arg(long)]
        term: String,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
    /// μ-termination by certificate, or non-termination by a loop.
    ProveTermination {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// Productivity verdict with its justification chain.
    ProveProductivity {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        map: MapArg,
        #[command(flatten)]
        budget: BudgetArg,
        #[arg(long, value_enum, default_value_t = Mode::Default)]
        mode: Mode,
    },
    /// Print the shallowed system.
    TransformShallow(Common),
    /// Check a certificate file against the system.
    CheckCert {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        map: MapArg,
        #[arg(long)]
        cert: PathBuf,
    },
}

struct Input {
    bytes: Vec<u8>,
    spec: SpecFile,
}

fn load(path: &Path) -> Result<Input> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let text = String::from_utf8(bytes.clone()).context("input is not UTF-8")?;
    let spec = parse(&text).map_err(|e| anyhow!("{}:{e}", path.display()))?;
    Ok(Input { bytes, spec })
}

/// Resolve `--map`; without it use the file's strategy, else `fallback`.
fn resolve_map(
    arg: &MapArg,
    spec: &SpecFile,
    fallback: impl FnOnce() -> Result<ReplacementMap>,
) -> Result<ReplacementMap> {
    let trs = &spec.trs;
    let Some(m) = arg.map.as_deref() else {
        return match &spec.strategy {
            Some(s) => Ok(s.clone()),
            None => fallback(),
        };
    };
    Ok(match m {
        "canonical" => canonical_map(trs),
        "delta" => mu_delta(trs)?,
        "canonical+delta" => canonical_map(trs).join(&mu_delta(trs)?)?,
        "top" => ReplacementMap::top(trs.signature()),
        "bottom" => ReplacementMap::bottom(trs.signature()),
        "strategy" => spec.strategy.clone().ok_or_else(|| anyhow!("the file has no STRATEGY block"))?,
        other => match other.strip_prefix("file:") {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {p}"))?;
                let text = text.lines().filter(|l| !l.trim_start().starts_with(';')).collect::<Vec<_>>().join("\n");
                ReplacementMap::parse(trs.signature(), &text)?
            }
            None => bail!("unknown map `{other}`"),
        },
    })
}

fn emit(json: &Option<Option<PathBuf>>, human: &str, report: &Report) -> Result<()> {
    match json {
        None => print!("{human}"),
        Some(None) => println!("{}", serde_json::to_string_pretty(report)?),
        Some(Some(path)) => {
            print!("{human}");
            std::fs::write(path, serde_json::to_string_pretty(report)? + "\n")
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
    }
    Ok(())
}

fn outcome_code(o: &TerminationOutcome) -> u8 {
    match o {
        TerminationOutcome::Terminating { .. } => 0,
        TerminationOutcome::Nonterminating { .. } => 1,
        TerminationOutcome::Unknown { .. } => 2,
    }
}

fn verdict_code(v: &Verdict) -> u8 {
    match v.answer {
        Answer::Yes => 0,
        Answer::No => 1,
        Answer::Unknown => 2,
    }
}

fn run(cli: Cli) -> Result<u8> {
    let start = Instant::now();
    match cli.command {
        Command::Analyze(c) => {
            let input = load(&c.file)?;
            let a = analyze(&input.spec.trs);
            let report = Report::new("analyze", &input.bytes, &input.spec.trs, None, start.elapsed());
            emit(&c.json, &a.to_text(), &report)?;
            Ok(0)
        }
        Command::Canonical(c) => {
            let input = load(&c.file)?;
            let trs = &input.spec.trs;
            let can = canonical_map(trs);
            let mut out = String::new();
            for (f, set) in can.symbols() {
                out.push_str(&format!("μcan({f}) = {}\n", fmt_set(set)));
            }
            if let Ok(d) = mu_delta(trs) {
                for (f, set) in d.symbols().filter(|(_, s)| !s.is_empty()) {
                    out.push_str(&format!("μΔ({f}) = {}\n", fmt_set(set)));
                }
            }
            let mut details = serde_json::Map::new();
            if let Some(s) = &input.spec.strategy {
                let ok = is_canonical_for(s, trs);
                out.push_str(&format!("isCanonicalFor(strategy) = {ok}\n"));
                details.insert("strategyIsCanonical".into(), ok.into());
            }
            let mut report = Report::new("canonical", &input.bytes, trs, input.spec.strategy.as_ref(), start.elapsed());
            report.details = details.into();
            emit(&c.json, &out, &report)?;
            Ok(0)
        }
        Command::Normalize { common, map, term, fuel } => {
            let input = load(&common.file)?;
            let trs = &input.spec.trs;
            let mu = resolve_map(&map, &input.spec, || Ok(canonical_map(trs)))?;
            let t = parse_term(&term, trs.signature(), &input.spec.vars).map_err(|e| anyhow!("--term: {e}"))?;
            let trace = normalize(&t, trs, &mu, fuel);
            let mut out = format!("{}\n{}", trace.initial, trace.to_lines());
            let code = match trace.stop {
                StopReason::NormalForm => {
                    let n = trace.steps.len();
                    let steps = if n == 1 { "step" } else { "steps" };
                    out.push_str(&format!("μ-normal form after {n} {steps}: {}\n", trace.final_term()));
                    0
                }
                StopReason::FuelExhausted => {
                    out.push_str(&format!("fuel {fuel} exhausted at {}\n", trace.final_term()));
                    2
                }
                StopReason::SizeBlowup => {
                    out.push_str(&format!("term size limit reached at {}\n", trace.final_term()));
                    2
                }
            };
            let mut report = Report::new("normalize", &input.bytes, trs, Some(&mu), start.elapsed());
            report.details = serde_json::to_value(&trace)?;
            emit(&common.json, &out, &report)?;
            Ok(code)
        }
        Command::ProveTermination { common, map, budget } => {
            let input = load(&common.file)?;
            let trs = &input.spec.trs;
            let mu = resolve_map(&map, &input.spec, || Ok(canonical_map(trs)))?;
            let outcome = prove(trs, &mu, &SearchBudget::with_time_ms(budget.budget_ms));
            let code = outcome_code(&outcome);
            let human = format!("map: {mu}\n{}", outcome.to_text());
            let mut report = Report::new("prove-termination", &input.bytes, trs, Some(&mu), start.elapsed());
            report.outcome = Some(outcome);
            emit(&common.json, &human, &report)?;
            Ok(code)
        }
        Command::ProveProductivity { common, map, budget, mode } => {
            let input = load(&common.file)?;
            let trs = &input.spec.trs;
            let mu = match mode {
                Mode::Zr10 => zr10_map(trs).ok(),
                Mode::Default if map.map.is_some() || input.spec.strategy.is_some() => {
                    Some(resolve_map(&map, &input.spec, || unreachable!())?)
                }
                Mode::Default => None,
            };
            let verdict =
                prove_productive_with_shallowing(trs, mu.as_ref(), &SearchBudget::with_time_ms(budget.budget_ms));
            let code = verdict_code(&verdict);
            let mut human = verdict.to_text();
            if verdict.answer == Answer::Unknown && verdict.via_shallowing.is_none() && !is_shallow(trs) {
                human.push_str("hint: try transform-shallow\n");
            }
            let mut report =
                Report::new("prove-productivity", &input.bytes, trs, Some(&verdict.used_map), start.elapsed());
            report.verdict = Some(verdict);
            emit(&common.json, &human, &report)?;
            Ok(code)
        }
        Command::TransformShallow(c) => {
            let input = load(&c.file)?;
            let trs = &input.spec.trs;
            let res = shallow_transform(trs)?;
            let out = &res.output;
            let a = analyze(out);
            let can = canonical_map(out);
            let frozen = out.constructors().iter().all(|k| can.get(k).is_empty());
            let mut human = String::new();
            for (f, (origin, path)) in &res.symbol_map {
                let path: Vec<String> = path.iter().map(|p| p.to_string()).collect();
                human.push_str(&format!("; {f} = {origin}[{}]\n", path.join(" ")));
            }
            human.push_str(&format!(
                "; shallow: {}, strongly compatible: {}, constructors frozen: {frozen}\n",
                a.shallow.shallow,
                a.compatibility == CompatibilityClass::Strong
            ));
            human.push_str(&print(out, None));
            let mut report = Report::new("transform-shallow", &input.bytes, trs, None, start.elapsed());
            report.details = serde_json::json!({
                "shallowing": res,
                "output": print(out, None),
                "outputAnalysis": a,
            });
            emit(&c.json, &human, &report)?;
            Ok(0)
        }
        Command::CheckCert { common, map, cert } => {
            let input = load(&common.file)?;
            let trs = &input.spec.trs;
            let mu = resolve_map(&map, &input.spec, || Ok(canonical_map(trs)))?;
            let text = std::fs::read_to_string(&cert).with_context(|| format!("cannot read {}", cert.display()))?;
            let certificate = Certificate::parse(&text).map_err(|e| anyhow!("{}: {e}", cert.display()))?;
            let check = certificate
                .check(trs, &mu)
                .unwrap_or_else(|e| CertCheck { ok: false, diagnostics: vec![e.to_string()] });
            let mut human = format!("map: {mu}\n");
            if check.ok {
                human.push_str("certificate accepted\n");
            } else {
                human.push_str("certificate rejected\n");
                for d in &check.diagnostics {
                    human.push_str(&format!("  {d}\n"));
                }
            }
            let mut report = Report::new("check-cert", &input.bytes, trs, Some(&mu), start.elapsed());
            report.details = serde_json::to_value(&check)?;
            emit(&common.json, &human, &report)?;
            Ok(if check.ok { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
