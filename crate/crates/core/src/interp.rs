//! d-dimensional first-order interpretations over words.
//!
//! An interpretation picks output positions among d-tuples of input
//! positions: a tuple is an output position carrying letter `c` when the
//! letter formula `I_c(x1..xd)` holds, and output positions are ordered by
//! `I_≤(x1..xd, y1..yd)`. Whenever the result is not a word (a tuple with
//! two letters, or an order that is not linear) the output is `ε` and a
//! diagnostic says why.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logic::formula::{self as fo, Formula, Var};
use crate::logic::CompiledFormula;
use crate::sexpr;
use crate::words::{Alphabet, OriginWord, Symbol, Word};

pub fn x_vars(d: usize) -> Vec<Var> {
    (1..=d).map(|i| format!("x{i}")).collect()
}

pub fn y_vars(d: usize) -> Vec<Var> {
    (1..=d).map(|i| format!("y{i}")).collect()
}

/// Marker symbols introduced at one level of the Ψ construction; recorded
/// in interpretation files as `markers <level> <club> <box> <diamond>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MarkerRecord {
    pub level: usize,
    pub club: Symbol,
    pub boxed: Symbol,
    pub diamond: Symbol,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    pub dim: usize,
    pub input: Alphabet,
    pub output: Alphabet,
    /// One formula per output letter, free variables among `x1..xd`.
    pub letters: BTreeMap<Symbol, Formula>,
    /// Free variables among `x1..xd, y1..yd`.
    pub order: Formula,
    pub markers: Vec<MarkerRecord>,
}

impl Interpretation {
    pub fn new(
        dim: usize,
        input: Alphabet,
        output: Alphabet,
        letters: BTreeMap<Symbol, Formula>,
        order: Formula,
    ) -> Result<Interpretation> {
        let i = Interpretation { dim, input, output, letters, order, markers: Vec::new() };
        i.validate()?;
        Ok(i)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInterpretation(m));
        if self.dim == 0 {
            return bad("dimension must be at least 1".into());
        }
        let xs = x_vars(self.dim);
        let mut xys = xs.clone();
        xys.extend(y_vars(self.dim));
        for c in self.output.iter() {
            if !self.letters.contains_key(c) {
                return bad(format!("no formula for output letter {c}"));
            }
        }
        for (c, f) in &self.letters {
            if !self.output.contains(c) {
                return bad(format!("formula for {c}, which is not an output letter"));
            }
            if let Some(v) = f.free_vars().into_iter().find(|v| !xs.contains(v)) {
                return bad(format!("letter formula for {c} has stray free variable {v}"));
            }
        }
        if let Some(v) = self.order.free_vars().into_iter().find(|v| !xys.contains(v)) {
            return bad(format!("order formula has stray free variable {v}"));
        }
        let formulas = self.letters.values().chain(std::iter::once(&self.order));
        for f in formulas {
            if let Some(c) = f.letters_used().into_iter().find(|c| !self.input.contains(c)) {
                return bad(format!("letter predicate {c} is not in the input alphabet"));
            }
        }
        Ok(())
    }

    pub fn compile(&self) -> Result<CompiledInterp> {
        let xs = x_vars(self.dim);
        let mut xys = xs.clone();
        xys.extend(y_vars(self.dim));
        Ok(CompiledInterp {
            dim: self.dim,
            letters: self
                .letters
                .iter()
                .map(|(c, f)| Ok((c.clone(), CompiledFormula::new(f, &xs)?)))
                .collect::<Result<_>>()?,
            order: CompiledFormula::new(&self.order, &xys)?,
        })
    }

    /// Output domain of the interpretation on `u`.
    pub fn domain(&self, u: &Word) -> Result<InterpDomain> {
        Ok(self.compile()?.domain(u))
    }

    // File format -------------------------------------------------------

    pub fn to_file_string(&self) -> String {
        let mut s = String::new();
        let spaced = |a: &Alphabet| a.iter().map(Symbol::as_str).collect::<Vec<_>>().join(" ");
        writeln!(s, "dim {}", self.dim).unwrap();
        writeln!(s, "input-alphabet {}", spaced(&self.input)).unwrap();
        writeln!(s, "output-alphabet {}", spaced(&self.output)).unwrap();
        for m in &self.markers {
            writeln!(s, "markers {} {} {} {}", m.level, m.club, m.boxed, m.diamond).unwrap();
        }
        for (c, f) in &self.letters {
            writeln!(s, "(letter {c} {f})").unwrap();
        }
        writeln!(s, "(order {})", self.order).unwrap();
        s
    }

    pub fn parse_file(src: &str) -> Result<Interpretation> {
        let body_start = src
            .lines()
            .scan(0usize, |off, line| {
                let start = *off;
                *off += line.len() + 1;
                Some((start, line))
            })
            .find(|(_, l)| l.trim_start().starts_with('('))
            .map_or(src.len(), |(o, _)| o);
        let (header, body) = src.split_at(body_start);

        let (mut dim, mut input, mut output) = (None, None, None);
        let mut markers = Vec::new();
        for line in header.lines().map(str::trim) {
            if line.is_empty() || line.starts_with("//") || line.starts_with(';') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap();
            let rest: Vec<&str> = parts.collect();
            match key {
                "dim" => {
                    dim = Some(rest.first().and_then(|d| d.parse::<usize>().ok()).ok_or_else(|| {
                        Error::Parse(format!("bad dim line `{line}`"))
                    })?)
                }
                "input-alphabet" => input = Some(Alphabet::new(rest.iter().copied())?),
                "output-alphabet" => output = Some(Alphabet::new(rest.iter().copied())?),
                "markers" => {
                    if rest.len() != 4 {
                        return Err(Error::Parse(format!("bad markers line `{line}`")));
                    }
                    markers.push(MarkerRecord {
                        level: rest[0].parse().map_err(|_| Error::Parse(format!("bad level in `{line}`")))?,
                        club: Symbol::new(rest[1]),
                        boxed: Symbol::new(rest[2]),
                        diamond: Symbol::new(rest[3]),
                    });
                }
                _ => return Err(Error::Parse(format!("unknown header line `{line}`"))),
            }
        }
        let missing = |k: &str| Error::Parse(format!("missing `{k}` header"));
        let dim = dim.ok_or_else(|| missing("dim"))?;
        let input = input.ok_or_else(|| missing("input-alphabet"))?;
        let output = output.ok_or_else(|| missing("output-alphabet"))?;

        let mut letters = BTreeMap::new();
        let mut order = None;
        for block in sexpr::parse_all(body)? {
            let Some((head, args)) = block.head() else {
                return Err(Error::Parse(format!("unexpected `{block}`")));
            };
            match (head, args) {
                ("letter", [c, f]) => {
                    let c = Symbol::new(c.as_atom().ok_or_else(|| Error::Parse(format!("bad letter block `{block}`")))?);
                    if letters.insert(c.clone(), Formula::from_sexp(f)?).is_some() {
                        return Err(Error::Parse(format!("duplicate formula for letter {c}")));
                    }
                }
                ("order", [f]) => {
                    if order.replace(Formula::from_sexp(f)?).is_some() {
                        return Err(Error::Parse("duplicate order block".into()));
                    }
                }
                _ => return Err(Error::Parse(format!("unexpected block `{block}`"))),
            }
        }
        let order = order.ok_or_else(|| Error::Parse("missing (order ...) block".into()))?;
        let mut interp = Interpretation::new(dim, input, output, letters, order)?;
        interp.markers = markers;
        Ok(interp)
    }
}

/// Output positions of an interpretation on one input.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InterpDomain {
    /// Tuples in lexicographic order of positions.
    pub tuples: Vec<Vec<usize>>,
    /// For each tuple, the output letters whose formula holds (non-empty).
    pub labels: Vec<Vec<Symbol>>,
}

impl InterpDomain {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// How thoroughly to verify that the order formula is linear on the domain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OrderCheck {
    /// Reflexivity, totality, antisymmetry, distinct ranks, adjacent pairs.
    #[default]
    Ranked,
    /// Additionally checks transitivity over all triples.
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OrderViolation {
    NotReflexive { a: Vec<usize> },
    NotTotal { a: Vec<usize>, b: Vec<usize> },
    NotAntisymmetric { a: Vec<usize>, b: Vec<usize> },
    RankCollision { a: Vec<usize>, b: Vec<usize> },
    AdjacentMisordered { a: Vec<usize>, b: Vec<usize> },
    NotTransitive { a: Vec<usize>, b: Vec<usize>, c: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum LinearOrderCheck {
    /// Domain indices in increasing order.
    Linear(Vec<usize>),
    Violation(OrderViolation),
}

/// Why an evaluation fell back to `ε`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Diagnostic {
    AmbiguousLetter { tuple: Vec<usize>, letters: Vec<Symbol> },
    OrderNotLinear { violation: OrderViolation },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InterpOutput {
    pub word: OriginWord,
    pub diagnostic: Option<Diagnostic>,
}

/// An interpretation with its formulas compiled, for repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledInterp {
    dim: usize,
    letters: Vec<(Symbol, CompiledFormula)>,
    order: CompiledFormula,
}

fn tuples(n: usize, d: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if n == 0 { 0 } else { n.pow(d as u32) };
    (0..total).map(move |mut k| {
        let mut t = vec![0; d];
        for slot in t.iter_mut().rev() {
            *slot = k % n + 1;
            k /= n;
        }
        t
    })
}

impl CompiledInterp {
    pub fn domain(&self, u: &Word) -> InterpDomain {
        let mut evs: Vec<(Symbol, _)> = self.letters.iter().map(|(c, f)| (c.clone(), f.on(u))).collect();
        let mut dom = InterpDomain::default();
        for t in tuples(u.len(), self.dim) {
            let labels: Vec<Symbol> = evs.iter_mut().filter_map(|(c, ev)| ev.eval(&t).then(|| c.clone())).collect();
            if !labels.is_empty() {
                dom.tuples.push(t);
                dom.labels.push(labels);
            }
        }
        dom
    }

    pub fn check_order(&self, dom: &InterpDomain, u: &Word, mode: OrderCheck) -> LinearOrderCheck {
        let mut ev = self.order.on(u);
        let n = dom.len();
        let mut leq = vec![false; n * n];
        let mut args = Vec::with_capacity(2 * self.dim);
        for i in 0..n {
            for j in 0..n {
                args.clear();
                args.extend_from_slice(&dom.tuples[i]);
                args.extend_from_slice(&dom.tuples[j]);
                leq[i * n + j] = ev.eval(&args);
            }
        }
        linear_order_from_matrix(&dom.tuples, &leq, mode)
    }

    pub fn eval(&self, u: &Word) -> InterpOutput {
        self.eval_with(u, OrderCheck::Ranked)
    }

    pub fn eval_with(&self, u: &Word, mode: OrderCheck) -> InterpOutput {
        let dom = self.domain(u);
        let empty = |d| InterpOutput { word: OriginWord::new(), diagnostic: Some(d) };
        if let Some(k) = dom.labels.iter().position(|l| l.len() > 1) {
            return empty(Diagnostic::AmbiguousLetter { tuple: dom.tuples[k].clone(), letters: dom.labels[k].clone() });
        }
        match self.check_order(&dom, u, mode) {
            LinearOrderCheck::Violation(violation) => empty(Diagnostic::OrderNotLinear { violation }),
            LinearOrderCheck::Linear(sorted) => {
                let mut word = OriginWord::new();
                for k in sorted {
                    word.push(dom.labels[k][0].clone(), dom.tuples[k].clone());
                }
                InterpOutput { word, diagnostic: None }
            }
        }
    }
}

fn linear_order_from_matrix(tuples: &[Vec<usize>], leq: &[bool], mode: OrderCheck) -> LinearOrderCheck {
    let n = tuples.len();
    let at = |i: usize, j: usize| leq[i * n + j];
    let t = |i: usize| tuples[i].clone();
    let violation = LinearOrderCheck::Violation;
    for i in 0..n {
        if !at(i, i) {
            return violation(OrderViolation::NotReflexive { a: t(i) });
        }
        for j in (i + 1)..n {
            match (at(i, j), at(j, i)) {
                (false, false) => return violation(OrderViolation::NotTotal { a: t(i), b: t(j) }),
                (true, true) => return violation(OrderViolation::NotAntisymmetric { a: t(i), b: t(j) }),
                _ => {}
            }
        }
    }
    // rank = number of elements below or equal
    let rank: Vec<usize> = (0..n).map(|i| (0..n).filter(|&j| at(j, i)).count()).collect();
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by_key(|&i| rank[i]);
    for w in sorted.windows(2) {
        let (a, b) = (w[0], w[1]);
        if rank[a] == rank[b] {
            return violation(OrderViolation::RankCollision { a: t(a), b: t(b) });
        }
        if !at(a, b) || at(b, a) {
            return violation(OrderViolation::AdjacentMisordered { a: t(a), b: t(b) });
        }
    }
    if mode == OrderCheck::Full {
        for i in 0..n {
            for j in 0..n {
                if !at(i, j) {
                    continue;
                }
                for k in 0..n {
                    if at(j, k) && !at(i, k) {
                        return violation(OrderViolation::NotTransitive { a: t(i), b: t(j), c: t(k) });
                    }
                }
            }
        }
    }
    LinearOrderCheck::Linear(sorted)
}

/// Verifies that `order` (free variables `x1..xd, y1..yd`) is a linear
/// order on the domain tuples of `u`.
pub fn check_linear_order(dom: &InterpDomain, order: &Formula, u: &Word, mode: OrderCheck) -> Result<LinearOrderCheck> {
    let d = dom.tuples.first().map_or(0, Vec::len);
    if d == 0 {
        return Ok(LinearOrderCheck::Linear(Vec::new()));
    }
    let mut params = x_vars(d);
    params.extend(y_vars(d));
    let compiled = CompiledFormula::new(order, &params)?;
    let mut ev = compiled.on(u);
    let n = dom.len();
    let mut leq = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            let args: Vec<usize> = dom.tuples[i].iter().chain(&dom.tuples[j]).copied().collect();
            if args.iter().any(|&p| p == 0 || p > u.len()) {
                return Err(Error::IndexOutOfRange { index: args.into_iter().max().unwrap_or(0), len: u.len() });
            }
            leq[i * n + j] = ev.eval(&args);
        }
    }
    Ok(linear_order_from_matrix(&dom.tuples, &leq, mode))
}

/// Evaluates `interp` on `u` (ranked order check).
pub fn eval_interp(interp: &Interpretation, u: &Word) -> Result<InterpOutput> {
    Ok(interp.compile()?.eval(u))
}

// Builtins ---------------------------------------------------------------

fn lex2() -> Formula {
    use fo::*;
    or(vec![lt("x1", "y1"), and(vec![eq("x1", "y1"), leq("x2", "y2")])])
}

/// `aⁿ ↦ (aⁿ⁻¹b)ⁿ⁻¹`: letters by whether `x2` is the last position, pairs
/// read in lexicographic order.
pub fn squaring_family() -> Interpretation {
    use fo::*;
    let letters = BTreeMap::from([
        (Symbol::new("a"), and(vec![not(max("x1")), not(max("x2"))])),
        (Symbol::new("b"), and(vec![not(max("x1")), max("x2")])),
    ]);
    Interpretation::new(2, Alphabet::new(["a"]).unwrap(), Alphabet::new(["a", "b"]).unwrap(), letters, lex2())
        .expect("builtin is well-formed")
}

/// `v ≤ x` with no `#` in `[v, x)`; a `#` belongs to the block it closes.
fn same_block_from(v: &str, x: &str, z: &str) -> Formula {
    use fo::*;
    and(vec![leq(v, x), forall(z, implies(and(vec![leq(v, z), lt(z, x)]), not(letter("#", z))))])
}

/// `v` has no immediate predecessor carrying `a` or `b`.
fn block_start(v: &str, z: &str, t: &str) -> Formula {
    use fo::*;
    not(exists(
        z,
        and(vec![
            lt(z, v),
            forall(t, not(and(vec![lt(z, t), lt(t, v)]))),
            or(vec![letter("a", z), letter("b", z)]),
        ]),
    ))
}

/// Inner squaring `w₀#…#wₙ ↦ w₀ⁿ#…#wₙⁿ` as a 2D interpretation.
///
/// Letter positions are pairs (letter, `#`); each `#` contributes the pair
/// (`#`, last position). The order compares (block start, x2, x1)
/// lexicographically, except that a `#` output comes right after every
/// letter of the block it closes.
pub fn innsq_interp() -> Interpretation {
    use fo::*;
    let letters = BTreeMap::from([
        (Symbol::new("a"), and(vec![letter("a", "x1"), letter("#", "x2")])),
        (Symbol::new("b"), and(vec![letter("b", "x1"), letter("#", "x2")])),
        (Symbol::new("#"), and(vec![letter("#", "x1"), max("x2")])),
    ]);
    let lex3 = or(vec![
        lt("x3", "y3"),
        and(vec![eq("x3", "y3"), or(vec![lt("x2", "y2"), and(vec![eq("x2", "y2"), leq("x1", "y1")])])]),
    ]);
    let order = or(vec![
        and(vec![letter("#", "y1"), leq("x1", "y1")]),
        exists(
            "x3",
            exists(
                "y3",
                and(vec![
                    same_block_from("x3", "x1", "z"),
                    same_block_from("y3", "y1", "z"),
                    block_start("x3", "z", "t"),
                    block_start("y3", "z", "t"),
                    lex3,
                ]),
            ),
        ),
    ]);
    let abh = Alphabet::new(["a", "b", "#"]).unwrap();
    Interpretation::new(2, abh.clone(), abh, letters, order).expect("builtin is well-formed")
}

/// A deliberately ill-sorted interpretation: its order compares `x1` with
/// `y2`. Used to exercise the failure path of the sort checker.
pub fn planted_cross_sort() -> Interpretation {
    use fo::*;
    let letters = BTreeMap::from([(Symbol::new("a"), and(vec![letter("a", "x1"), letter("a", "x2")]))]);
    let order = and(vec![lex2(), or(vec![leq("x1", "y2"), not(leq("x1", "y2"))])]);
    Interpretation::new(2, Alphabet::new(["a"]).unwrap(), Alphabet::new(["a"]).unwrap(), letters, order)
        .expect("builtin is well-formed")
}

pub const BUILTIN_NAMES: &[&str] = &["squaring-family", "innsq-interp", "planted-cross-sort"];

pub fn builtin(name: &str) -> Option<Interpretation> {
    match name {
        "squaring-family" => Some(squaring_family()),
        "innsq-interp" => Some(innsq_interp()),
        "planted-cross-sort" => Some(planted_cross_sort()),
        _ => None,
    }
}

/// Resolves a builtin name or reads an interpretation file.
pub fn load(name_or_path: &str) -> Result<Interpretation> {
    match builtin(name_or_path) {
        Some(i) => Ok(i),
        None => {
            let path = std::path::Path::new(name_or_path);
            if !path.exists() {
                return Err(Error::Unknown(name_or_path.to_string()));
            }
            Interpretation::parse_file(&std::fs::read_to_string(path)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{check_sortable, SortOutcome};

    #[test]
    fn squaring_family_on_aaa() {
        let out = eval_interp(&squaring_family(), &Word::parse("aaa")).unwrap();
        assert!(out.diagnostic.is_none());
        assert_eq!(out.word.letters().render(), "aabaab");
        let origins: Vec<Vec<usize>> = out.word.origins().map(<[usize]>::to_vec).collect();
        assert_eq!(origins, vec![vec![1, 1], vec![1, 2], vec![1, 3], vec![2, 1], vec![2, 2], vec![2, 3]]);
    }

    #[test]
    fn innsq_interp_worked_example() {
        let out = eval_interp(&innsq_interp(), &Word::parse("aba#baa#bb")).unwrap();
        assert!(out.diagnostic.is_none(), "{:?}", out.diagnostic);
        assert_eq!(out.word.letters().render(), "abaaba#baabaa#bbbb");
    }

    #[test]
    fn empty_input_gives_empty_output() {
        for i in [squaring_family(), innsq_interp()] {
            let out = eval_interp(&i, &Word::empty()).unwrap();
            assert!(out.word.is_empty() && out.diagnostic.is_none());
        }
    }

    #[test]
    fn lexicographic_order_is_linear() {
        let u = Word::parse("aaa");
        let dom = InterpDomain {
            tuples: (1..=2).flat_map(|i| (1..=3).map(move |j| vec![i, j])).collect(),
            labels: vec![vec![Symbol::new("a")]; 6],
        };
        let r = check_linear_order(&dom, &lex2(), &u, OrderCheck::Full).unwrap();
        assert_eq!(r, LinearOrderCheck::Linear((0..6).collect()));
    }

    #[test]
    fn always_true_order_is_not_antisymmetric() {
        let u = Word::parse("aa");
        let dom = InterpDomain { tuples: vec![vec![1, 1], vec![1, 2]], labels: vec![vec![Symbol::new("a")]; 2] };
        let r = check_linear_order(&dom, &Formula::And(vec![]), &u, OrderCheck::Ranked).unwrap();
        assert_eq!(
            r,
            LinearOrderCheck::Violation(OrderViolation::NotAntisymmetric { a: vec![1, 1], b: vec![1, 2] })
        );
    }

    #[test]
    fn innsq_order_fully_transitive_on_example() {
        let i = innsq_interp();
        let u = Word::parse("aba#baa#bb");
        let dom = i.domain(&u).unwrap();
        let r = check_linear_order(&dom, &i.order, &u, OrderCheck::Full).unwrap();
        assert!(matches!(r, LinearOrderCheck::Linear(_)), "{r:?}");
    }

    #[test]
    fn ambiguous_letters_give_epsilon_with_diagnostic() {
        let mut i = squaring_family();
        i.letters.insert(Symbol::new("b"), Formula::And(vec![]));
        let out = eval_interp(&i, &Word::parse("aa")).unwrap();
        assert!(out.word.is_empty());
        assert!(matches!(out.diagnostic, Some(Diagnostic::AmbiguousLetter { .. })));
    }

    #[test]
    fn file_round_trip() {
        for i in [squaring_family(), innsq_interp()] {
            let text = i.to_file_string();
            assert_eq!(Interpretation::parse_file(&text).unwrap(), i);
        }
    }

    #[test]
    fn validation_catches_stray_variables() {
        let mut i = squaring_family();
        i.order = Formula::parse("(leq x1 z9)").unwrap();
        assert!(i.validate().is_err());
        let mut j = squaring_family();
        j.letters.insert(Symbol::new("a"), Formula::parse("(letter c x1)").unwrap());
        assert!(j.validate().is_err());
    }

    #[test]
    fn sortability_of_builtins() {
        let SortOutcome::Sortable(m) = check_sortable(&innsq_interp()).unwrap() else { panic!() };
        assert_eq!(m["order"]["x3"], 1);
        assert_eq!(m["order"]["y3"], 1);
        assert_eq!(m["order"]["x2"], 2);
        assert!(check_sortable(&squaring_family()).unwrap().is_sortable());
        match check_sortable(&planted_cross_sort()).unwrap() {
            SortOutcome::Conflict(f) => {
                assert_eq!(f.formula, "order");
                assert_eq!(f.atom, "(leq x1 y2)");
            }
            other => panic!("{other:?}"),
        }
    }
}
