//! Reader and printer for the parenthesized `.trs` format.
//!
//! ```text
//! (SORTS (Ord data) (Str codata))
//! (SIG (0 -> Ord) (S Ord -> Ord) (: Ord Str -> Str))
//! (VAR (x Ord) (sigma Str))
//! (RULES
//!   nats(x) -> :(x, nats(S(x)))
//! )
//! (STRATEGY CONTEXTSENSITIVE (S 1) (nats))
//! ```
//!
//! Without a SORTS block the file is unsorted: `(VAR x y)`, optional
//! `(SIG (f 2) (a 0))`, and symbol arities are inferred from the rules.
//! `;` starts a line comment and `(COMMENT ...)` blocks are skipped.
//! A rule may carry a label as `[name] l -> r`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::repmap::{RepMapError, ReplacementMap};
use crate::term::{Name, Rule, Signature, SortKind, Term, TermError, Trs, UNSORTED};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown block `{0}`")]
    UnknownBlock(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` expects {expected} arguments, got {found}")]
    ArityMismatch { symbol: String, expected: usize, found: usize },
    #[error("unsorted rule: {0}")]
    UnsortedRule(String),
    #[error("{0}")]
    Term(TermError),
    #[error("{0}")]
    Map(RepMapError),
}

/// A parsed file: the system, the optional strategy map, and declared variables.
#[derive(Debug, Clone)]
pub struct SpecFile {
    pub trs: Trs,
    pub strategy: Option<ReplacementMap>,
    pub vars: BTreeMap<Name, Name>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Comma,
    Arrow,
    Label(String),
    Ident(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const RESERVED: &[char] = &['(', ')', ',', '[', ']', ';', '#'];

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| ParseError { line, col, kind: ParseErrorKind::Syntax(msg) };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(1, &mut i);
        } else if c == ';' {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i);
            }
        } else if c == '(' || c == ')' || c == ',' {
            let tok = match c {
                '(' => Tok::Open,
                ')' => Tok::Close,
                _ => Tok::Comma,
            };
            out.push(Token { tok, line: l0, col: c0 });
            advance(1, &mut i);
        } else if c == '[' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j] != ']' && chars[j] != '\n' {
                j += 1;
            }
            if j >= chars.len() || chars[j] != ']' {
                return Err(err(l0, c0, "unterminated rule label".into()));
            }
            let label: String = chars[start..j].iter().collect::<String>().trim().to_string();
            if label.is_empty() || label.contains(RESERVED) {
                return Err(err(l0, c0, format!("bad rule label `{label}`")));
            }
            out.push(Token { tok: Tok::Label(label), line: l0, col: c0 });
            advance(j + 1 - i, &mut i);
        } else if c == '#' || c == ']' {
            return Err(err(l0, c0, format!("reserved character `{c}`")));
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Token { tok: Tok::Arrow, line: l0, col: c0 });
            advance(2, &mut i);
        } else {
            let start = i;
            let mut j = i;
            while j < chars.len()
                && !chars[j].is_whitespace()
                && !RESERVED.contains(&chars[j])
                && !(chars[j] == '-' && chars.get(j + 1) == Some(&'>'))
            {
                j += 1;
            }
            let s: String = chars[start..j].iter().collect();
            out.push(Token { tok: Tok::Ident(s), line: l0, col: c0 });
            advance(j - i, &mut i);
        }
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Cursor {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map_or(self.end, |t| (t.line, t.col))
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        let (line, col) = self.here();
        ParseError { line, col, kind }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error(ParseErrorKind::Syntax(msg.into()))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ParseError> {
        match self.peek() {
            Some(t) if t.tok == tok => Ok(self.next().expect("peeked")),
            Some(t) => Err(self.syntax(format!("expected {what}, found {}", describe(&t.tok)))),
            None => Err(self.syntax(format!("expected {what}, found end of input"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), line, col }) => {
                let r = (s.clone(), *line, *col);
                self.pos += 1;
                Ok(r)
            }
            Some(t) => Err(self.syntax(format!("expected {what}, found {}", describe(&t.tok)))),
            None => Err(self.syntax(format!("expected {what}, found end of input"))),
        }
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek().is_some_and(|t| &t.tok == tok)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Open => "`(`".into(),
        Tok::Close => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Label(l) => format!("label `[{l}]`"),
        Tok::Ident(s) => format!("`{s}`"),
    }
}

/// A term before symbols are resolved.
#[derive(Debug, Clone)]
struct Raw {
    name: String,
    args: Vec<Raw>,
    applied: bool,
    line: usize,
    col: usize,
}

fn raw_term(cur: &mut Cursor) -> Result<Raw, ParseError> {
    let (name, line, col) = cur.ident("a term")?;
    let mut args = Vec::new();
    let applied = cur.at(&Tok::Open);
    if applied {
        cur.next();
        if !cur.at(&Tok::Close) {
            loop {
                args.push(raw_term(cur)?);
                if cur.at(&Tok::Comma) {
                    cur.next();
                } else {
                    break;
                }
            }
        }
        cur.expect(Tok::Close, "`)` or `,`")?;
    }
    Ok(Raw { name, args, applied, line, col })
}

fn skip_balanced(cur: &mut Cursor) -> Result<(), ParseError> {
    let mut depth = 1;
    while depth > 0 {
        match cur.next() {
            Some(Token { tok: Tok::Open, .. }) => depth += 1,
            Some(Token { tok: Tok::Close, .. }) => depth -= 1,
            Some(_) => {}
            None => return Err(cur.syntax("unbalanced parentheses")),
        }
    }
    Ok(())
}

struct RawRule {
    label: Option<String>,
    lhs: Raw,
    rhs: Raw,
}

#[derive(Default)]
struct RawFile {
    sorts: Option<Vec<(String, SortKind)>>,
    sig: Vec<(String, Vec<String>, Option<String>, usize, usize)>,
    vars: Vec<(String, Option<String>, usize, usize)>,
    rules: Vec<RawRule>,
    strategy: Option<(Vec<(String, Vec<usize>)>, usize, usize)>,
}

fn read_blocks(cur: &mut Cursor) -> Result<RawFile, ParseError> {
    let mut file = RawFile::default();
    while cur.peek().is_some() {
        cur.expect(Tok::Open, "`(` opening a block")?;
        let (kw, line, col) = cur.ident("a block keyword")?;
        match kw.as_str() {
            "SORTS" => {
                let mut sorts = Vec::new();
                while cur.at(&Tok::Open) {
                    cur.next();
                    let (s, ..) = cur.ident("a sort name")?;
                    let (k, ..) = cur.ident("`data` or `codata`")?;
                    let kind = match k.as_str() {
                        "data" => SortKind::Data,
                        "codata" => SortKind::Codata,
                        _ => return Err(cur.syntax(format!("sort kind must be data or codata, found `{k}`"))),
                    };
                    cur.expect(Tok::Close, "`)`")?;
                    sorts.push((s, kind));
                }
                file.sorts = Some(sorts);
            }
            "SIG" => {
                while cur.at(&Tok::Open) {
                    cur.next();
                    let (f, l, c) = cur.ident("a symbol")?;
                    let mut args = Vec::new();
                    let mut result = None;
                    loop {
                        match cur.peek().map(|t| t.tok.clone()) {
                            Some(Tok::Ident(s)) => {
                                cur.next();
                                args.push(s);
                            }
                            Some(Tok::Arrow) => {
                                cur.next();
                                result = Some(cur.ident("a result sort")?.0);
                                break;
                            }
                            _ => break,
                        }
                    }
                    cur.expect(Tok::Close, "`)`")?;
                    file.sig.push((f, args, result, l, c));
                }
            }
            "VAR" => loop {
                match cur.peek().map(|t| t.tok.clone()) {
                    Some(Tok::Ident(_)) => {
                        let (x, l, c) = cur.ident("a variable")?;
                        file.vars.push((x, None, l, c));
                    }
                    Some(Tok::Open) => {
                        cur.next();
                        let (x, l, c) = cur.ident("a variable")?;
                        let (s, ..) = cur.ident("a sort")?;
                        cur.expect(Tok::Close, "`)`")?;
                        file.vars.push((x, Some(s), l, c));
                    }
                    _ => break,
                }
            },
            "RULES" => {
                while !cur.at(&Tok::Close) {
                    if cur.peek().is_none() {
                        return Err(cur.syntax("unterminated RULES block"));
                    }
                    let label = match cur.peek().map(|t| t.tok.clone()) {
                        Some(Tok::Label(l)) => {
                            cur.next();
                            Some(l)
                        }
                        _ => None,
                    };
                    let lhs = raw_term(cur)?;
                    cur.expect(Tok::Arrow, "`->`")?;
                    let rhs = raw_term(cur)?;
                    file.rules.push(RawRule { label, lhs, rhs });
                }
            }
            "STRATEGY" => {
                let (s, ..) = cur.ident("CONTEXTSENSITIVE")?;
                if s != "CONTEXTSENSITIVE" {
                    return Err(cur.syntax(format!("unsupported strategy `{s}`")));
                }
                let mut entries = Vec::new();
                while cur.at(&Tok::Open) {
                    cur.next();
                    let (f, ..) = cur.ident("a symbol")?;
                    let mut idx = Vec::new();
                    while let Some(Tok::Ident(n)) = cur.peek().map(|t| t.tok.clone()) {
                        let i = n.parse::<usize>().map_err(|_| cur.syntax(format!("bad index `{n}`")))?;
                        cur.next();
                        idx.push(i);
                    }
                    cur.expect(Tok::Close, "`)`")?;
                    entries.push((f, idx));
                }
                file.strategy = Some((entries, line, col));
            }
            "COMMENT" => {
                skip_balanced(cur)?;
                continue;
            }
            _ => {
                return Err(ParseError { line, col, kind: ParseErrorKind::UnknownBlock(kw) });
            }
        }
        cur.expect(Tok::Close, "`)` closing the block")?;
    }
    Ok(file)
}

fn at(line: usize, col: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, col, kind }
}

/// Parse a `.trs` file.
pub fn parse(text: &str) -> Result<SpecFile, ParseError> {
    let toks = lex(text)?;
    let end = toks.last().map_or((1, 1), |t| (t.line, t.col + 1));
    let mut cur = Cursor { toks, pos: 0, end };
    let file = read_blocks(&mut cur)?;

    let mut sig;
    let mut vars: BTreeMap<Name, Name> = BTreeMap::new();
    match &file.sorts {
        Some(sorts) => {
            sig = Signature::sorted();
            for (s, k) in sorts {
                sig.add_sort(s, *k).map_err(|e| at(1, 1, ParseErrorKind::Term(e)))?;
            }
            for (f, args, result, l, c) in &file.sig {
                let Some(result) = result else {
                    return Err(at(*l, *c, ParseErrorKind::Syntax(format!("`{f}` needs a result sort"))));
                };
                let args: Vec<&str> = args.iter().map(String::as_str).collect();
                sig.declare(f, &args, result).map_err(|e| at(*l, *c, ParseErrorKind::Term(e)))?;
            }
            for (x, s, l, c) in &file.vars {
                let Some(s) = s else {
                    return Err(at(*l, *c, ParseErrorKind::Syntax(format!("variable `{x}` needs a sort"))));
                };
                if sig.sort(s).is_none() {
                    return Err(at(*l, *c, ParseErrorKind::Term(TermError::UnknownSort(s.as_str().into()))));
                }
                vars.insert(x.as_str().into(), s.as_str().into());
            }
        }
        None => {
            sig = Signature::unsorted();
            for (x, s, l, c) in &file.vars {
                if s.is_some() {
                    return Err(at(*l, *c, ParseErrorKind::Syntax("sorted variable without a SORTS block".into())));
                }
                vars.insert(x.as_str().into(), UNSORTED.into());
            }
            let mut arities: Vec<(String, usize, usize, usize)> = Vec::new();
            for (f, args, result, l, c) in &file.sig {
                let arity = match (args.as_slice(), result) {
                    ([n], None) => n.parse::<usize>().ok(),
                    _ => None,
                }
                .ok_or_else(|| at(*l, *c, ParseErrorKind::Syntax(format!("expected `({f} <arity>)`"))))?;
                arities.push((f.clone(), arity, *l, *c));
            }
            fn collect(r: &Raw, vars: &BTreeMap<Name, Name>, out: &mut Vec<(String, usize, usize, usize)>) {
                if !(vars.contains_key(r.name.as_str()) && !r.applied) {
                    out.push((r.name.clone(), r.args.len(), r.line, r.col));
                }
                r.args.iter().for_each(|a| collect(a, vars, out));
            }
            for rule in &file.rules {
                collect(&rule.lhs, &vars, &mut arities);
                collect(&rule.rhs, &vars, &mut arities);
            }
            let mut seen: HashMap<String, usize> = HashMap::new();
            for (f, n, l, c) in arities {
                match seen.get(&f) {
                    Some(&m) if m != n => {
                        return Err(at(l, c, ParseErrorKind::ArityMismatch { symbol: f, expected: m, found: n }));
                    }
                    Some(_) => {}
                    None => {
                        sig.declare_unsorted(&f, n).map_err(|e| at(l, c, ParseErrorKind::Term(e)))?;
                        seen.insert(f, n);
                    }
                }
            }
        }
    }

    let mut rules = Vec::new();
    for (k, raw) in file.rules.iter().enumerate() {
        let label = raw.label.clone().unwrap_or_else(|| format!("r{}", k + 1));
        let lhs = resolve(&raw.lhs, &sig, &vars)?;
        let rhs = resolve(&raw.rhs, &sig, &vars)?;
        let rule = Rule::new(&label, lhs, rhs).map_err(|e| at(raw.lhs.line, raw.lhs.col, ParseErrorKind::Term(e)))?;
        let ls = sig.sort_of(&rule.lhs).map_err(|e| at(raw.lhs.line, raw.lhs.col, ParseErrorKind::Term(e)))?;
        let rs = sig.sort_of(&rule.rhs).map_err(|e| at(raw.rhs.line, raw.rhs.col, ParseErrorKind::Term(e)))?;
        if ls != rs {
            return Err(at(raw.lhs.line, raw.lhs.col, ParseErrorKind::UnsortedRule(format!("{label}: {ls} -> {rs}"))));
        }
        if rules.iter().any(|r: &Rule| r.label == rule.label) {
            return Err(at(
                raw.lhs.line,
                raw.lhs.col,
                ParseErrorKind::Syntax(format!("duplicate rule label `{label}`")),
            ));
        }
        rules.push(rule);
    }
    let trs = Trs::new(sig, rules).map_err(|e| at(1, 1, ParseErrorKind::Term(e)))?;

    let strategy = match &file.strategy {
        None => None,
        Some((entries, l, c)) => {
            let mut mu = ReplacementMap::bottom(trs.signature());
            for (f, idx) in entries {
                mu.set(f, idx.iter().copied()).map_err(|e| at(*l, *c, ParseErrorKind::Map(e)))?;
            }
            Some(mu)
        }
    };
    Ok(SpecFile { trs, strategy, vars })
}

fn resolve(r: &Raw, sig: &Signature, vars: &BTreeMap<Name, Name>) -> Result<Term, ParseError> {
    if !r.applied {
        if let Some(sort) = vars.get(r.name.as_str()) {
            return Ok(Term::var(&r.name, sort));
        }
    }
    let decl = sig.symbol(&r.name).ok_or_else(|| at(r.line, r.col, ParseErrorKind::UnknownSymbol(r.name.clone())))?;
    if decl.arity() != r.args.len() {
        return Err(at(
            r.line,
            r.col,
            ParseErrorKind::ArityMismatch { symbol: r.name.clone(), expected: decl.arity(), found: r.args.len() },
        ));
    }
    let args = r.args.iter().map(|a| resolve(a, sig, vars)).collect::<Result<Vec<_>, _>>()?;
    let t = Term::app(&r.name, args);
    sig.sort_of(&t).map_err(|e| at(r.line, r.col, ParseErrorKind::Term(e)))?;
    Ok(t)
}

/// Parse a single term against a signature and variable declarations.
pub fn parse_term(text: &str, sig: &Signature, vars: &BTreeMap<Name, Name>) -> Result<Term, ParseError> {
    let toks = lex(text)?;
    let end = toks.last().map_or((1, 1), |t| (t.line, t.col + 1));
    let mut cur = Cursor { toks, pos: 0, end };
    let raw = raw_term(&mut cur)?;
    if cur.peek().is_some() {
        return Err(cur.syntax("trailing input after term"));
    }
    resolve(&raw, sig, vars)
}

/// Variables of all rules, with their sorts.
pub fn rule_vars(trs: &Trs) -> BTreeMap<Name, Name> {
    let mut out = BTreeMap::new();
    for r in trs.rules() {
        for v in r.lhs.vars() {
            out.entry(v.name).or_insert(v.sort);
        }
    }
    out
}

/// Print a system in normalized form; `parse` reads it back to an equal system.
///
/// Variable names used at two different sorts are renamed per rule.
pub fn print(trs: &Trs, strategy: Option<&ReplacementMap>) -> String {
    let sig = trs.signature();
    let mut out = String::new();
    let rules = disambiguate_vars(trs);
    if sig.is_sorted() {
        out.push_str("(SORTS");
        for s in sig.sorts() {
            let kind = match s.kind {
                SortKind::Data => "data",
                SortKind::Codata => "codata",
            };
            let _ = write!(out, " ({} {kind})", s.name);
        }
        out.push_str(")\n(SIG\n");
        for d in sig.symbols() {
            let _ = write!(out, "  ({}", d.name);
            for a in &d.arg_sorts {
                let _ = write!(out, " {a}");
            }
            let _ = writeln!(out, " -> {})", d.result);
        }
        out.push_str(")\n");
    } else {
        out.push_str("(SIG");
        for d in sig.symbols() {
            let _ = write!(out, " ({} {})", d.name, d.arity());
        }
        out.push_str(")\n");
    }
    let mut vars: BTreeMap<Name, Name> = BTreeMap::new();
    for r in &rules {
        for v in r.lhs.vars() {
            vars.entry(v.name).or_insert(v.sort);
        }
    }
    out.push_str("(VAR");
    for (x, s) in &vars {
        if sig.is_sorted() {
            let _ = write!(out, " ({x} {s})");
        } else {
            let _ = write!(out, " {x}");
        }
    }
    out.push_str(")\n(RULES\n");
    for (k, r) in rules.iter().enumerate() {
        out.push_str("  ");
        if *r.label != *format!("r{}", k + 1) {
            let _ = write!(out, "[{}] ", r.label);
        }
        let _ = writeln!(out, "{} -> {}", r.lhs, r.rhs);
    }
    out.push_str(")\n");
    if let Some(mu) = strategy {
        let _ = writeln!(out, "(STRATEGY CONTEXTSENSITIVE {mu})");
    }
    out
}

fn disambiguate_vars(trs: &Trs) -> Vec<Rule> {
    let mut first: BTreeMap<Name, Name> = BTreeMap::new();
    for r in trs.rules() {
        for v in r.lhs.vars() {
            first.entry(v.name).or_insert(v.sort);
        }
    }
    let taken: std::collections::BTreeSet<Name> = first.keys().cloned().collect();
    trs.rules()
        .iter()
        .map(|r| {
            let mut rename = |v: &crate::term::Var| {
                if first.get(&v.name) == Some(&v.sort) {
                    return Term::Var(v.clone());
                }
                let mut n = format!("{}_{}", v.name, v.sort);
                while taken.contains(n.as_str()) {
                    n.push('\'');
                }
                Term::var(&n, &v.sort)
            };
            let lhs = r.lhs.map_vars(&mut rename);
            let rhs = r.rhs.map_vars(&mut rename);
            Rule { lhs, rhs, label: r.label.clone() }
        })
        .collect()
}
