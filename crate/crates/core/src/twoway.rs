//! Deterministic two-way transducers with endmarkers and origin output.
//!
//! The head starts on `▷` (position 0) in the initial state; `◁` sits at
//! position `|w|+1`. Every emitted letter is tagged with the head position,
//! which must be a genuine input position: emitting on an endmarker is an
//! error, so every run maps `ε` to `ε`.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::words::{Alphabet, OriginWord, Symbol, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    fn parse(s: &str) -> Result<Move> {
        match s {
            "left" | "L" => Ok(Move::Left),
            "stay" | "S" => Ok(Move::Stay),
            "right" | "R" => Ok(Move::Right),
            _ => Err(Error::Parse(format!("bad move `{s}`"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Move::Left => "left",
            Move::Stay => "stay",
            Move::Right => "right",
        }
    }
}

/// What the head can read.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    /// `▷`, spelled `>` in files.
    Start,
    /// `◁`, spelled `<` in files.
    End,
    Letter(Symbol),
}

impl Cell {
    fn parse(s: &str) -> Cell {
        match s {
            ">" | "▷" => Cell::Start,
            "<" | "◁" => Cell::End,
            _ => Cell::Letter(Symbol::new(s)),
        }
    }

    fn spell(&self) -> &str {
        match self {
            Cell::Start => ">",
            Cell::End => "<",
            Cell::Letter(c) => c.as_str(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Transition {
    next: usize,
    mv: Move,
    output: Vec<Symbol>,
}

/// One line of a transition table, by state name.
#[derive(Clone, Debug)]
pub struct Rule {
    pub from: String,
    pub read: Cell,
    pub to: String,
    pub mv: Move,
    pub output: Word,
}

impl Rule {
    pub fn new(from: &str, read: &str, to: &str, mv: Move, output: &str) -> Rule {
        Rule { from: from.into(), read: Cell::parse(read), to: to.into(), mv, output: Word::parse(output) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoWayTransducer {
    states: Vec<String>,
    init: usize,
    accepting: Vec<bool>,
    input: Alphabet,
    output: Alphabet,
    /// Indexed by `state * columns + column`; column 0 is `▷`, 1 is `◁`,
    /// then the input letters in alphabet order.
    table: Vec<Option<Transition>>,
    letters: Vec<Symbol>,
}

impl TwoWayTransducer {
    /// Builds and validates a machine. Non-accepting states need a
    /// transition for every cell; accepting states halt and need none.
    pub fn new(
        states: &[&str],
        init: &str,
        accepting: &[&str],
        input: Alphabet,
        output: Alphabet,
        rules: Vec<Rule>,
    ) -> Result<TwoWayTransducer> {
        let bad = |m: String| Error::InvalidMachine(m);
        let idx: HashMap<&str, usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        if idx.len() != states.len() {
            return Err(bad("duplicate state names".into()));
        }
        let state = |s: &str| idx.get(s).copied().ok_or_else(|| bad(format!("unknown state `{s}`")));
        let letters: Vec<Symbol> = input.iter().cloned().collect();
        if letters.iter().any(|c| c.as_str() == "<" || c.as_str() == ">") {
            return Err(bad("`<` and `>` are reserved for endmarkers".into()));
        }
        let cols = letters.len() + 2;
        let mut table = vec![None; states.len() * cols];
        let mut accept = vec![false; states.len()];
        for a in accepting {
            accept[state(a)?] = true;
        }
        for r in rules {
            let from = state(&r.from)?;
            let to = state(&r.to)?;
            let col = match &r.read {
                Cell::Start => {
                    if r.mv == Move::Left {
                        return Err(bad(format!("state `{}` moves left off `>`", r.from)));
                    }
                    0
                }
                Cell::End => {
                    if r.mv == Move::Right {
                        return Err(bad(format!("state `{}` moves right off `<`", r.from)));
                    }
                    1
                }
                Cell::Letter(c) => 2 + letters.iter().position(|l| l == c).ok_or_else(|| bad(format!("`{c}` is not an input letter")))?,
            };
            if let Some(c) = r.output.iter().find(|c| !output.contains(c)) {
                return Err(bad(format!("`{c}` is not an output letter")));
            }
            let slot = &mut table[from * cols + col];
            if slot.is_some() {
                return Err(bad(format!("two transitions for state `{}` on `{}`", r.from, r.read.spell())));
            }
            *slot = Some(Transition { next: to, mv: r.mv, output: r.output.0 });
        }
        for (q, name) in states.iter().enumerate() {
            if accept[q] {
                continue;
            }
            for col in 0..cols {
                if table[q * cols + col].is_none() {
                    let cell = match col {
                        0 => ">".to_string(),
                        1 => "<".to_string(),
                        k => letters[k - 2].to_string(),
                    };
                    return Err(bad(format!("no transition for state `{name}` on `{cell}`")));
                }
            }
        }
        Ok(TwoWayTransducer {
            states: states.iter().map(|s| s.to_string()).collect(),
            init: state(init)?,
            accepting: accept,
            input,
            output,
            table,
            letters,
        })
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// Longest output word on a single transition.
    pub fn max_emission(&self) -> usize {
        self.table.iter().flatten().map(|t| t.output.len()).max().unwrap_or(0)
    }

    /// Simulates the machine on `w`, returning origin-annotated output.
    pub fn run(&self, w: &Word) -> Result<OriginWord> {
        let n = w.len();
        let cols = self.letters.len() + 2;
        let tape: Vec<usize> = std::iter::once(Ok(0))
            .chain(w.iter().map(|c| {
                self.letters
                    .iter()
                    .position(|l| l == c)
                    .map(|k| k + 2)
                    .ok_or_else(|| Error::AlphabetMismatch(format!("`{c}` is not in {}", self.input)))
            }))
            .chain(std::iter::once(Ok(1)))
            .collect::<Result<_>>()?;
        let mut seen = vec![false; self.states.len() * (n + 2)];
        let (mut q, mut head, mut steps) = (self.init, 0usize, 0usize);
        let mut out = OriginWord::new();
        loop {
            if self.accepting[q] {
                return Ok(out);
            }
            let conf = q * (n + 2) + head;
            if seen[conf] {
                return Err(Error::NonTermination { state: self.states[q].clone(), head, steps });
            }
            seen[conf] = true;
            let t = self.table[q * cols + tape[head]].as_ref().expect("table is total on non-accepting states");
            if !t.output.is_empty() {
                if head == 0 || head == n + 1 {
                    return Err(Error::EmitAtEndmarker { state: self.states[q].clone(), head });
                }
                for c in &t.output {
                    out.push(c.clone(), vec![head]);
                }
            }
            head = match t.mv {
                Move::Left => head - 1,
                Move::Stay => head,
                Move::Right => head + 1,
            };
            q = t.next;
            steps += 1;
        }
    }

    pub fn to_file_string(&self) -> String {
        let mut s = String::new();
        let spaced = |a: &Alphabet| a.iter().map(Symbol::as_str).collect::<Vec<_>>().join(" ");
        writeln!(s, "states {}", self.states.join(" ")).unwrap();
        writeln!(s, "init {}", self.states[self.init]).unwrap();
        let acc: Vec<&str> = self.states.iter().zip(&self.accepting).filter(|(_, a)| **a).map(|(s, _)| s.as_str()).collect();
        writeln!(s, "accept {}", acc.join(" ")).unwrap();
        writeln!(s, "input-alphabet {}", spaced(&self.input)).unwrap();
        writeln!(s, "output-alphabet {}", spaced(&self.output)).unwrap();
        let cols = self.letters.len() + 2;
        for (k, t) in self.table.iter().enumerate() {
            let Some(t) = t else { continue };
            let (q, col) = (k / cols, k % cols);
            let read = match col {
                0 => ">",
                1 => "<",
                c => self.letters[c - 2].as_str(),
            };
            let mut line = format!("{} {} -> {} {}", self.states[q], read, self.states[t.next], t.mv.name());
            for c in &t.output {
                line.push(' ');
                line.push_str(c.as_str());
            }
            writeln!(s, "{line}").unwrap();
        }
        s
    }

    pub fn parse_file(src: &str) -> Result<TwoWayTransducer> {
        let mut states: Option<Vec<String>> = None;
        let (mut init, mut accept, mut input, mut output) = (None, Vec::new(), None, None);
        let mut rules = Vec::new();
        for line in src.lines().map(str::trim) {
            if line.is_empty() || line.starts_with("//") {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "states" => states = Some(toks[1..].iter().map(|s| s.to_string()).collect()),
                "init" if toks.len() == 2 => init = Some(toks[1].to_string()),
                "accept" => accept = toks[1..].iter().map(|s| s.to_string()).collect(),
                "input-alphabet" => input = Some(Alphabet::new(toks[1..].iter().copied())?),
                "output-alphabet" if toks.len() == 1 => output = Some(Alphabet::empty()),
                "output-alphabet" => output = Some(Alphabet::new(toks[1..].iter().copied())?),
                _ if toks.len() >= 5 && toks[2] == "->" => rules.push(Rule {
                    from: toks[0].into(),
                    read: Cell::parse(toks[1]),
                    to: toks[3].into(),
                    mv: Move::parse(toks[4])?,
                    output: Word(toks[5..].iter().map(|t| Symbol::new(t)).collect()),
                }),
                _ => return Err(Error::Parse(format!("bad transducer line `{line}`"))),
            }
        }
        let missing = |k: &str| Error::Parse(format!("missing `{k}` line"));
        let states = states.ok_or_else(|| missing("states"))?;
        let names: Vec<&str> = states.iter().map(String::as_str).collect();
        let accept: Vec<&str> = accept.iter().map(String::as_str).collect();
        TwoWayTransducer::new(
            &names,
            &init.ok_or_else(|| missing("init"))?,
            &accept,
            input.ok_or_else(|| missing("input-alphabet"))?,
            output.unwrap_or_else(Alphabet::empty),
            rules,
        )
    }
}

/// A named regular function with origins, backed by a two-way machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularFn {
    pub name: String,
    pub machine: TwoWayTransducer,
    /// `|f(w)| ≤ growth_constant · |w|` for every input.
    pub growth_constant: usize,
}

impl RegularFn {
    /// Wraps a machine, deriving the generic growth bound
    /// `|Q| · max emission` (each cell is visited at most `|Q|` times).
    pub fn from_machine(name: &str, machine: TwoWayTransducer) -> RegularFn {
        let growth_constant = machine.state_count() * machine.max_emission();
        RegularFn { name: name.to_string(), machine, growth_constant }
    }

    fn with_constant(name: &str, machine: TwoWayTransducer, growth_constant: usize) -> RegularFn {
        RegularFn { name: name.to_string(), machine, growth_constant }
    }

    pub fn run(&self, w: &Word) -> Result<OriginWord> {
        self.machine.run(w)
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        Ok(self.machine.run(w)?.letters())
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        self.machine.input_alphabet()
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        self.machine.output_alphabet()
    }
}

/// `w ↦ f(g(w))` computed by running both machines; origins are dropped.
#[derive(Clone, Debug)]
pub struct Composition {
    pub outer: RegularFn,
    pub inner: RegularFn,
}

impl Composition {
    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.outer.apply(&self.inner.apply(w)?)
    }
}

/// Semantic composition `f ∘ g`; requires `out(g) ⊆ in(f)`.
pub fn compose_semantic(f: &RegularFn, g: &RegularFn) -> Result<Composition> {
    if !g.output_alphabet().is_subset(f.input_alphabet()) {
        return Err(Error::AlphabetMismatch(format!(
            "output {} of `{}` is not contained in input {} of `{}`",
            g.output_alphabet(),
            g.name,
            f.input_alphabet(),
            f.name
        )));
    }
    Ok(Composition { outer: f.clone(), inner: g.clone() })
}

// Builtins ---------------------------------------------------------------

fn abh() -> Alphabet {
    Alphabet::new(["a", "b", "#"]).unwrap()
}

/// One left-to-right sweep that copies letters not in `delta`.
pub fn erase_transducer(input: &Alphabet, delta: &Alphabet) -> RegularFn {
    let kept = input.difference(delta);
    let mut rules = vec![Rule::new("scan", ">", "scan", Move::Right, ""), Rule::new("scan", "<", "done", Move::Stay, "")];
    for c in input.iter() {
        let out = if delta.contains(c) { "" } else { c.as_str() };
        rules.push(Rule { from: "scan".into(), read: Cell::Letter(c.clone()), to: "scan".into(), mv: Move::Right, output: Word::parse(out) });
    }
    let m = TwoWayTransducer::new(&["scan", "done"], "scan", &["done"], input.clone(), kept, rules).expect("well-formed");
    RegularFn::with_constant("erase", m, 1)
}

pub fn identity(input: &Alphabet) -> RegularFn {
    let mut f = erase_transducer(input, &Alphabet::empty());
    f.name = "identity".into();
    f
}

/// `f°` of the inner-squaring decomposition: `(•, start)` for every
/// non-empty `{a,b}`-block and `(#, i)` for every `#` at position `i`.
pub fn block_marker() -> RegularFn {
    let rules = vec![
        Rule::new("init", ">", "fresh", Move::Right, ""),
        Rule::new("init", "<", "done", Move::Stay, ""),
        Rule::new("init", "a", "done", Move::Stay, ""),
        Rule::new("init", "b", "done", Move::Stay, ""),
        Rule::new("init", "#", "done", Move::Stay, ""),
        Rule::new("fresh", "a", "inside", Move::Right, "•"),
        Rule::new("fresh", "b", "inside", Move::Right, "•"),
        Rule::new("fresh", "#", "fresh", Move::Right, "#"),
        Rule::new("fresh", "<", "done", Move::Stay, ""),
        Rule::new("fresh", ">", "done", Move::Stay, ""),
        Rule::new("inside", "a", "inside", Move::Right, ""),
        Rule::new("inside", "b", "inside", Move::Right, ""),
        Rule::new("inside", "#", "fresh", Move::Right, "#"),
        Rule::new("inside", "<", "done", Move::Stay, ""),
        Rule::new("inside", ">", "done", Move::Stay, ""),
    ];
    let m = TwoWayTransducer::new(&["init", "fresh", "inside", "done"], "init", &["done"], abh(), Alphabet::new(["•", "#"]).unwrap(), rules)
        .expect("well-formed");
    RegularFn::with_constant("block-marker", m, 1)
}

/// `w ↦ •^{|w|_#}` over the marked alphabet plus `•`; `#` and `#̲` both
/// count.
pub fn hash_counter() -> RegularFn {
    let input = abh().marked().with(Symbol::new("•"));
    let mut rules = vec![Rule::new("scan", ">", "scan", Move::Right, ""), Rule::new("scan", "<", "done", Move::Stay, "")];
    for c in input.iter() {
        let out = if c.base().as_str() == "#" { "•" } else { "" };
        rules.push(Rule { from: "scan".into(), read: Cell::Letter(c.clone()), to: "scan".into(), mv: Move::Right, output: Word::parse(out) });
    }
    let m = TwoWayTransducer::new(&["scan", "done"], "scan", &["done"], input, Alphabet::new(["•"]).unwrap(), rules).expect("well-formed");
    RegularFn::with_constant("hash-counter", m, 1)
}

/// `…#c̲w#… ↦ cw`: copies the block suffix starting at the marked letter.
/// Marked `#̲` or no mark at all yields `ε`.
pub fn marked_block_copy() -> RegularFn {
    let input = abh().marked();
    let mut rules = vec![
        Rule::new("seek", ">", "seek", Move::Right, ""),
        Rule::new("seek", "<", "done", Move::Stay, ""),
        Rule::new("copy", "<", "done", Move::Stay, ""),
        Rule::new("copy", ">", "done", Move::Stay, ""),
    ];
    for c in input.iter() {
        let base = c.base();
        let letter = base.as_str() != "#";
        let (seek_to, seek_out) = match (c.is_underlined(), letter) {
            (true, true) => ("copy", base.as_str()),
            (true, false) => ("done", ""),
            (false, _) => ("seek", ""),
        };
        let mv = if seek_to == "done" { Move::Stay } else { Move::Right };
        rules.push(Rule { from: "seek".into(), read: Cell::Letter(c.clone()), to: seek_to.into(), mv, output: Word::parse(seek_out) });
        let (copy_to, copy_out, copy_mv) = if letter { ("copy", base.as_str(), Move::Right) } else { ("done", "", Move::Stay) };
        rules.push(Rule { from: "copy".into(), read: Cell::Letter(c.clone()), to: copy_to.into(), mv: copy_mv, output: Word::parse(copy_out) });
    }
    let m = TwoWayTransducer::new(&["seek", "copy", "done"], "seek", &["done"], input, Alphabet::new(["a", "b"]).unwrap(), rules)
        .expect("well-formed");
    RegularFn::with_constant("marked-block-copy", m, 1)
}

/// `a^{m₀}#…#a^{mₙ} ↦ a^{mₙ}b^{mₙ}#…#a^{m₀}b^{m₀}`: blocks right to left,
/// each block swept twice (once for `a`s, once for `b`s), each `#` emitted
/// from its own position.
pub fn reverse_blocks_ab() -> RegularFn {
    let r = Rule::new;
    let rules = vec![
        r("seek_end", ">", "seek_end", Move::Right, ""),
        r("seek_end", "a", "seek_end", Move::Right, ""),
        r("seek_end", "#", "seek_end", Move::Right, ""),
        r("seek_end", "<", "block_start", Move::Left, ""),
        // walk left to the delimiter opening the current block
        r("block_start", "a", "block_start", Move::Left, ""),
        r("block_start", "#", "emit_a", Move::Right, ""),
        r("block_start", ">", "emit_a", Move::Right, ""),
        r("block_start", "<", "block_start", Move::Left, ""),
        r("emit_a", "a", "emit_a", Move::Right, "a"),
        r("emit_a", "#", "rewind", Move::Left, ""),
        r("emit_a", "<", "rewind", Move::Left, ""),
        r("emit_a", ">", "emit_a", Move::Right, ""),
        r("rewind", "a", "rewind", Move::Left, ""),
        r("rewind", "#", "emit_b", Move::Right, ""),
        r("rewind", ">", "emit_b", Move::Right, ""),
        r("rewind", "<", "rewind", Move::Left, ""),
        r("emit_b", "a", "emit_b", Move::Right, "b"),
        r("emit_b", "#", "separator", Move::Left, ""),
        r("emit_b", "<", "separator", Move::Left, ""),
        r("emit_b", ">", "emit_b", Move::Right, ""),
        r("separator", "a", "separator", Move::Left, ""),
        r("separator", "#", "block_start", Move::Left, "#"),
        r("separator", ">", "done", Move::Stay, ""),
        r("separator", "<", "separator", Move::Left, ""),
    ];
    let m = TwoWayTransducer::new(
        &["seek_end", "block_start", "emit_a", "rewind", "emit_b", "separator", "done"],
        "seek_end",
        &["done"],
        Alphabet::new(["a", "#"]).unwrap(),
        abh(),
        rules,
    )
    .expect("well-formed");
    RegularFn::with_constant("reverse-blocks-ab", m, 2)
}

/// Two states that bounce between `▷` and the first cell forever.
pub fn bounce() -> RegularFn {
    let r = Rule::new;
    let rules = vec![
        r("p", ">", "q", Move::Right, ""),
        r("p", "a", "q", Move::Left, ""),
        r("p", "<", "q", Move::Left, ""),
        r("q", ">", "p", Move::Right, ""),
        r("q", "a", "p", Move::Left, ""),
        r("q", "<", "p", Move::Left, ""),
    ];
    let m = TwoWayTransducer::new(&["p", "q"], "p", &[], Alphabet::new(["a"]).unwrap(), Alphabet::empty(), rules).expect("well-formed");
    RegularFn::with_constant("bounce", m, 0)
}

pub const BUILTIN_NAMES: &[&str] = &["block-marker", "hash-counter", "marked-block-copy", "reverse-blocks-ab", "bounce"];

pub fn builtin(name: &str) -> Option<RegularFn> {
    match name {
        "block-marker" => Some(block_marker()),
        "hash-counter" => Some(hash_counter()),
        "marked-block-copy" => Some(marked_block_copy()),
        "reverse-blocks-ab" => Some(reverse_blocks_ab()),
        "bounce" => Some(bounce()),
        _ => None,
    }
}

/// Resolves a builtin name or reads a transducer file.
pub fn load(name_or_path: &str) -> Result<RegularFn> {
    if let Some(f) = builtin(name_or_path) {
        return Ok(f);
    }
    let path = std::path::Path::new(name_or_path);
    if !path.exists() {
        return Err(Error::Unknown(name_or_path.to_string()));
    }
    let m = TwoWayTransducer::parse_file(&std::fs::read_to_string(path)?)?;
    Ok(RegularFn::from_machine(name_or_path, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origins(o: &OriginWord) -> Vec<usize> {
        o.origins().map(|t| t[0]).collect()
    }

    #[test]
    fn reverse_blocks_origins() {
        let out = reverse_blocks_ab().run(&Word::parse("aaa#aa")).unwrap();
        assert_eq!(out.letters().render(), "aabb#aaabbb");
        assert_eq!(origins(&out), vec![5, 6, 5, 6, 4, 1, 2, 3, 1, 2, 3]);
    }

    #[test]
    fn reverse_blocks_with_empty_blocks() {
        let f = reverse_blocks_ab();
        assert_eq!(f.apply(&Word::parse("a##a")).unwrap().render(), "ab##ab");
        assert_eq!(f.apply(&Word::parse("#")).unwrap().render(), "#");
        assert_eq!(f.apply(&Word::parse("a#")).unwrap().render(), "#ab");
    }

    #[test]
    fn bounce_does_not_terminate() {
        let f = bounce();
        let w = Word::parse("a");
        match f.run(&w) {
            Err(Error::NonTermination { steps, .. }) => assert!(steps <= 2 * (w.len() + 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn every_builtin_maps_epsilon_to_epsilon() {
        for name in BUILTIN_NAMES.iter().filter(|n| **n != "bounce") {
            assert!(builtin(name).unwrap().run(&Word::empty()).unwrap().is_empty(), "{name}");
        }
    }

    #[test]
    fn block_marker_origins() {
        let out = block_marker().run(&Word::parse("ab##ba")).unwrap();
        assert_eq!(out.letters().render(), "•##•");
        assert_eq!(origins(&out), vec![1, 3, 4, 5]);
    }

    #[test]
    fn marked_block_copy_copies_suffix_of_block() {
        let f = marked_block_copy();
        let w = Word::parse("aba#baa#bb").underline(6).unwrap().to_word();
        assert_eq!(f.apply(&w).unwrap().render(), "aa");
        let w = Word::parse("aba#baa#bb").underline(4).unwrap().to_word();
        assert!(f.apply(&w).unwrap().is_empty());
    }

    #[test]
    fn emit_on_endmarker_is_rejected() {
        let r = Rule::new;
        let m = TwoWayTransducer::new(
            &["s", "h"],
            "s",
            &["h"],
            Alphabet::new(["a"]).unwrap(),
            Alphabet::new(["a"]).unwrap(),
            vec![r("s", ">", "h", Move::Right, "a"), r("s", "a", "h", Move::Stay, ""), r("s", "<", "h", Move::Stay, "")],
        )
        .unwrap();
        assert!(matches!(m.run(&Word::empty()), Err(Error::EmitAtEndmarker { head: 0, .. })));
    }

    #[test]
    fn construction_errors() {
        let r = Rule::new;
        let a = Alphabet::new(["a"]).unwrap();
        let partial = TwoWayTransducer::new(&["s", "h"], "s", &["h"], a.clone(), a.clone(), vec![r("s", ">", "h", Move::Right, "")]);
        assert!(matches!(partial, Err(Error::InvalidMachine(_))));
        let off_left = TwoWayTransducer::new(&["h"], "h", &["h"], a.clone(), a.clone(), vec![r("h", ">", "h", Move::Left, "")]);
        assert!(off_left.is_err());
    }

    #[test]
    fn composition() {
        let abh = Alphabet::new(["a", "b", "#"]).unwrap();
        let id = identity(&abh);
        assert_eq!(compose_semantic(&id, &id).unwrap().apply(&Word::parse("ab#")).unwrap().render(), "ab#");
        let marker_letters = Alphabet::new(["•", "#"]).unwrap();
        let drop_hash = erase_transducer(&marker_letters, &Alphabet::new(["#"]).unwrap());
        let c = compose_semantic(&drop_hash, &block_marker()).unwrap();
        assert_eq!(c.apply(&Word::parse("ab#a")).unwrap().render(), "••");
        assert!(matches!(compose_semantic(&block_marker(), &block_marker()), Err(Error::AlphabetMismatch(_))));
    }

    #[test]
    fn hash_counter_twice_is_empty() {
        let h = hash_counter();
        let twice = compose_semantic(&h, &h).unwrap();
        for w in ["", "#", "a#b#", "##\u{332}#"] {
            assert!(twice.apply(&Word::parse(w)).unwrap().is_empty());
        }
        let once = h.apply(&Word::parse("a#b#")).unwrap();
        assert_eq!(once.render(), "••");
        assert_eq!(once.count(&Symbol::new("#")), 0);
    }

    #[test]
    fn file_round_trip() {
        for name in BUILTIN_NAMES {
            let f = builtin(name).unwrap();
            let text = f.machine.to_file_string();
            assert_eq!(TwoWayTransducer::parse_file(&text).unwrap(), f.machine, "{name}");
        }
    }
}
