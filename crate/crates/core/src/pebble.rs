//! Pebble and blind combinators.
//!
//! A [`PolyFun`] is a combinator tree whose leaves are regular functions or
//! finite-range classifiers:
//!
//! * `pebble(f°, (g_i))(w) = g_{i₁}(w↾j₁) ⋯ g_{iₙ}(w↾jₙ)` where
//!   `f°(w) = (i₁,j₁)…(iₙ,jₙ)`: each branch sees the input with the origin
//!   position underlined;
//! * `blind(f, (h_i))(w) = h_{i₁}(w) ⋯ h_{iₙ}(w)`: branches see the plain
//!   input.
//!
//! Nesting depth gives the `Pebble_k` / `Blind_k` level of the tree.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::sexpr::{self, Sexp};
use crate::twoway::{self, RegularFn, TwoWayTransducer};
use crate::words::{Alphabet, Symbol, Word};

/// A regular-language test on words, written as a regex over the
/// concatenation of the word's tokens. Always matched against the whole word.
#[derive(Clone, Debug)]
pub struct Matcher {
    pattern: String,
    regex: regex::Regex,
}

impl Matcher {
    pub fn new(pattern: &str) -> Result<Matcher> {
        let regex = regex::Regex::new(&format!("^(?:{pattern})$")).map_err(|e| Error::Parse(format!("bad regex `{pattern}`: {e}")))?;
        Ok(Matcher { pattern: pattern.to_string(), regex })
    }

    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    pub fn matches(&self, w: &Word) -> bool {
        let flat: String = w.iter().map(Symbol::as_str).collect();
        self.regex.is_match(&flat)
    }
}

impl PartialEq for Matcher {
    fn eq(&self, other: &Matcher) -> bool {
        self.pattern == other.pattern
    }
}

/// A finite-range function: the output of the first matching case, or the
/// default.
#[derive(Clone, Debug, PartialEq)]
pub struct Classifier {
    pub cases: Vec<(Matcher, Word)>,
    pub default: Word,
}

impl Classifier {
    pub fn constant(w: Word) -> Classifier {
        Classifier { cases: Vec::new(), default: w }
    }

    pub fn apply(&self, w: &Word) -> Word {
        self.cases.iter().find(|(m, _)| m.matches(w)).map_or(&self.default, |(_, out)| out).clone()
    }

    fn longest_output(&self) -> usize {
        self.cases.iter().map(|(_, o)| o.len()).chain(std::iter::once(self.default.len())).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PolyFun {
    Reg(RegularFn),
    Pebble0(Classifier),
    Pebble { head: RegularFn, branches: BTreeMap<Symbol, PolyFun> },
    Blind { head: RegularFn, branches: BTreeMap<Symbol, PolyFun> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Pebble,
    Blind,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Pebble => "pebble",
            Flavor::Blind => "blind",
        })
    }
}

/// `(k, flavor)`: the tree denotes a function in `Pebble_k`, and in
/// `Blind_k` when the flavor is blind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PebbleDepth {
    pub k: usize,
    pub flavor: Flavor,
}

/// Per-node record of an evaluation, for checking the definitional
/// decomposition of outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub output: Word,
    /// One child per letter of the head's output, in order.
    pub children: Vec<Trace>,
}

/// Branch calls at or above this count are spread over the thread pool.
const PAR_THRESHOLD: usize = 64;

fn check_branches(head: &RegularFn, branches: &BTreeMap<Symbol, PolyFun>) -> Result<()> {
    for i in head.output_alphabet().iter() {
        if !branches.contains_key(i) {
            return Err(Error::InvalidTree(format!("no branch for `{i}` output by `{}`", head.name)));
        }
    }
    for i in branches.keys() {
        if !head.output_alphabet().contains(i) {
            return Err(Error::InvalidTree(format!("branch `{i}` is never output by `{}`", head.name)));
        }
    }
    Ok(())
}

impl PolyFun {
    pub fn constant(w: &str) -> PolyFun {
        PolyFun::Pebble0(Classifier::constant(Word::parse(w)))
    }

    /// Builds `pebble(head, branches)`. Each branch must cover every output
    /// letter of the head and accept the marked input alphabet.
    pub fn pebble(head: RegularFn, branches: BTreeMap<Symbol, PolyFun>) -> Result<PolyFun> {
        check_branches(&head, &branches)?;
        let marked = head.input_alphabet().marked();
        for (i, g) in &branches {
            if let Some(a) = g.input_alphabet() {
                if !marked.is_subset(&a) {
                    return Err(Error::InvalidTree(format!("branch `{i}` accepts {a}, which misses part of {marked}")));
                }
            }
        }
        Ok(PolyFun::Pebble { head, branches })
    }

    /// Builds `blind(head, branches)`.
    pub fn blind(head: RegularFn, branches: BTreeMap<Symbol, PolyFun>) -> Result<PolyFun> {
        check_branches(&head, &branches)?;
        let f = PolyFun::Blind { head, branches };
        match f.input_alphabet() {
            Some(a) if a.is_empty() => Err(Error::InvalidTree("blind node accepts no letter at all".into())),
            _ => Ok(f),
        }
    }

    /// Letters the tree is defined on; `None` for finite-range leaves that
    /// accept anything. A blind node accepts what its head and every branch
    /// accept.
    pub fn input_alphabet(&self) -> Option<Alphabet> {
        match self {
            PolyFun::Reg(f) => Some(f.input_alphabet().clone()),
            PolyFun::Pebble0(_) => None,
            PolyFun::Pebble { head, .. } => Some(head.input_alphabet().clone()),
            PolyFun::Blind { head, branches } => Some(
                branches
                    .values()
                    .filter_map(PolyFun::input_alphabet)
                    .fold(head.input_alphabet().clone(), |acc, a| acc.intersection(&a)),
            ),
        }
    }

    pub fn depth(&self) -> PebbleDepth {
        match self {
            PolyFun::Reg(_) => PebbleDepth { k: 1, flavor: Flavor::Blind },
            PolyFun::Pebble0(_) => PebbleDepth { k: 0, flavor: Flavor::Blind },
            PolyFun::Pebble { branches, .. } | PolyFun::Blind { branches, .. } => {
                let k = 1 + branches.values().map(|b| b.depth().k).max().unwrap_or(0);
                let blind = matches!(self, PolyFun::Blind { .. }) && branches.values().all(|b| b.depth().flavor == Flavor::Blind);
                PebbleDepth { k, flavor: if blind { Flavor::Blind } else { Flavor::Pebble } }
            }
        }
    }

    /// Largest linear growth constant of a regular function in the tree,
    /// or finite-range output length; at least 1.
    pub fn max_constant(&self) -> usize {
        match self {
            PolyFun::Reg(f) => f.growth_constant.max(1),
            PolyFun::Pebble0(c) => c.longest_output().max(1),
            PolyFun::Pebble { head, branches } | PolyFun::Blind { head, branches } => {
                branches.values().map(PolyFun::max_constant).fold(head.growth_constant.max(1), usize::max)
            }
        }
    }

    /// `(C·(n+1))^max(depth, 1)` with `C` = [`PolyFun::max_constant`].
    pub fn growth_bound(&self, n: usize) -> u128 {
        let base = (self.max_constant() as u128) * (n as u128 + 1);
        base.saturating_pow(self.depth().k.max(1) as u32)
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        match self {
            PolyFun::Reg(f) => f.apply(w),
            PolyFun::Pebble0(c) => Ok(c.apply(w)),
            PolyFun::Pebble { head, branches } => {
                let calls = head.run(w)?.items;
                let pieces = par::try_map(exec_for(calls.len()), &calls, |(i, origin)| {
                    branches[i].apply(&w.underline(origin[0])?.to_word())
                })?;
                Ok(concat(pieces))
            }
            PolyFun::Blind { head, branches } => {
                let calls = head.run(w)?.items;
                let mut memo: BTreeMap<&Symbol, Word> = BTreeMap::new();
                let mut out = Word::empty();
                for (i, _) in &calls {
                    if !memo.contains_key(i) {
                        memo.insert(i, branches[i].apply(w)?);
                    }
                    out.extend_from(&memo[i]);
                }
                Ok(out)
            }
        }
    }

    /// Like [`PolyFun::apply`], recording every branch call.
    pub fn apply_traced(&self, w: &Word) -> Result<Trace> {
        match self {
            PolyFun::Reg(_) | PolyFun::Pebble0(_) => Ok(Trace { output: self.apply(w)?, children: Vec::new() }),
            PolyFun::Pebble { head, branches } | PolyFun::Blind { head, branches } => {
                let pebble = matches!(self, PolyFun::Pebble { .. });
                let mut children = Vec::new();
                for (i, origin) in head.run(w)?.items {
                    let arg = if pebble { w.underline(origin[0])?.to_word() } else { w.clone() };
                    children.push(branches[&i].apply_traced(&arg)?);
                }
                let output = concat(children.iter().map(|c| c.output.clone()).collect());
                Ok(Trace { output, children })
            }
        }
    }

    // File format -------------------------------------------------------

    pub fn to_sexp(&self) -> Sexp {
        let atom = |s: &str| Sexp::Atom(s.to_string());
        let word = |w: &Word| {
            let r = w.render_spaced();
            if r.is_empty() || r.contains(|c: char| c.is_whitespace() || "();\"".contains(c)) {
                Sexp::Str(r)
            } else {
                Sexp::Atom(r)
            }
        };
        match self {
            PolyFun::Reg(f) => Sexp::List(vec![atom("reg"), reg_to_sexp(f)]),
            PolyFun::Pebble0(c) if c.cases.is_empty() => Sexp::List(vec![atom("const"), word(&c.default)]),
            PolyFun::Pebble0(c) => Sexp::List(vec![
                atom("piecewise"),
                Sexp::List(c.cases.iter().map(|(m, o)| Sexp::List(vec![Sexp::Str(m.pattern().to_string()), word(o)])).collect()),
                word(&c.default),
            ]),
            PolyFun::Pebble { head, branches } | PolyFun::Blind { head, branches } => {
                let kw = if matches!(self, PolyFun::Pebble { .. }) { "pebble" } else { "blind" };
                Sexp::List(vec![
                    atom(kw),
                    reg_to_sexp(head),
                    Sexp::List(branches.iter().map(|(i, g)| Sexp::List(vec![atom(i.as_str()), g.to_sexp()])).collect()),
                ])
            }
        }
    }

    pub fn from_sexp(e: &Sexp) -> Result<PolyFun> {
        let bad = || Error::Parse(format!("malformed combinator `{e}`"));
        let (head, args) = e.head().ok_or_else(bad)?;
        let word = |s: &Sexp| s.as_atom().map(Word::parse).ok_or_else(bad);
        match (head, args) {
            ("reg", [f]) => Ok(PolyFun::Reg(reg_from_sexp(f)?)),
            ("const", [w]) => Ok(PolyFun::Pebble0(Classifier::constant(word(w)?))),
            ("piecewise", [cases, default]) => {
                let cases = cases
                    .as_list()
                    .ok_or_else(bad)?
                    .iter()
                    .map(|c| match c.as_list() {
                        Some([re, out]) => Ok((Matcher::new(re.as_atom().ok_or_else(bad)?)?, word(out)?)),
                        _ => Err(bad()),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(PolyFun::Pebble0(Classifier { cases, default: word(default)? }))
            }
            ("pebble" | "blind", [f, branches]) => {
                let f = reg_from_sexp(f)?;
                let mut map = BTreeMap::new();
                for b in branches.as_list().ok_or_else(bad)? {
                    match b.as_list() {
                        Some([i, g]) => {
                            let i = Symbol::new(i.as_atom().ok_or_else(bad)?);
                            if map.insert(i.clone(), PolyFun::from_sexp(g)?).is_some() {
                                return Err(Error::InvalidTree(format!("duplicate branch `{i}`")));
                            }
                        }
                        _ => return Err(bad()),
                    }
                }
                if head == "pebble" {
                    PolyFun::pebble(f, map)
                } else {
                    PolyFun::blind(f, map)
                }
            }
            _ => Err(bad()),
        }
    }

    pub fn parse(src: &str) -> Result<PolyFun> {
        PolyFun::from_sexp(&sexpr::parse_one(src)?)
    }
}

impl fmt::Display for PolyFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

/// Builtins by name; anything else inline as
/// `(machine <name> <constant> "<transducer file>")`.
fn reg_to_sexp(f: &RegularFn) -> Sexp {
    if twoway::builtin(&f.name).as_ref() == Some(f) {
        return Sexp::Atom(f.name.clone());
    }
    Sexp::List(vec![
        Sexp::Atom("machine".into()),
        Sexp::Atom(f.name.clone()),
        Sexp::Atom(f.growth_constant.to_string()),
        Sexp::Str(f.machine.to_file_string()),
    ])
}

fn reg_from_sexp(e: &Sexp) -> Result<RegularFn> {
    if let Some(name) = e.as_atom() {
        return twoway::load(name);
    }
    match e.head() {
        Some(("machine", [name, c, src])) => {
            let bad = || Error::Parse(format!("malformed machine `{e}`"));
            let c = c.as_atom().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
            let m = TwoWayTransducer::parse_file(src.as_atom().ok_or_else(bad)?)?;
            Ok(RegularFn { name: name.as_atom().ok_or_else(bad)?.to_string(), machine: m, growth_constant: c })
        }
        _ => Err(Error::Parse(format!("expected a transducer, got `{e}`"))),
    }
}

fn exec_for(calls: usize) -> Execution {
    if calls >= PAR_THRESHOLD {
        Execution::Parallel
    } else {
        Execution::Sequential
    }
}

fn concat(pieces: Vec<Word>) -> Word {
    Word(pieces.into_iter().flat_map(|w| w.0).collect())
}

/// Inner squaring by its definition: split at every `#`, repeat each block
/// as many times as there are `#`s, rejoin with `#`. Without any `#` the
/// single block is repeated zero times, giving `ε`.
pub fn innsq_direct(w: &Word) -> Word {
    let hash = Symbol::new("#");
    let blocks: Vec<&[Symbol]> = w.symbols().split(|c| *c == hash).collect();
    let n = blocks.len() - 1;
    let mut out = Vec::new();
    for (k, b) in blocks.iter().enumerate() {
        if k > 0 {
            out.push(hash.clone());
        }
        for _ in 0..n {
            out.extend_from_slice(b);
        }
    }
    Word(out)
}

/// Inner squaring as a combinator tree of depth 3:
/// `pebble(block-marker, {• ↦ blind(hash-counter, {• ↦ marked-block-copy}), # ↦ const #})`.
pub fn innsq_pebble() -> PolyFun {
    let dot = Symbol::new("•");
    let copies = PolyFun::blind(twoway::hash_counter(), BTreeMap::from([(dot.clone(), PolyFun::Reg(twoway::marked_block_copy()))]))
        .expect("well-formed");
    PolyFun::pebble(twoway::block_marker(), BTreeMap::from([(dot, copies), (Symbol::new("#"), PolyFun::constant("#"))]))
        .expect("well-formed")
}

pub const BUILTIN_NAMES: &[&str] = &["innsq-pebble"];

pub fn builtin(name: &str) -> Option<PolyFun> {
    match name {
        "innsq-pebble" => Some(innsq_pebble()),
        _ => None,
    }
}

/// Resolves a builtin name or reads a combinator file.
pub fn load(name_or_path: &str) -> Result<PolyFun> {
    if let Some(p) = builtin(name_or_path) {
        return Ok(p);
    }
    let path = std::path::Path::new(name_or_path);
    if !path.exists() {
        return Err(Error::Unknown(name_or_path.to_string()));
    }
    PolyFun::parse(&std::fs::read_to_string(path)?)
}
