//! Alphabets, words, marked words and origin-annotated output.
//!
//! Symbols are short tokens rather than single characters so that generated
//! marker letters (`♣1`, `□2`, ...) never collide with user letters. Positions
//! are 1-based throughout the crate.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Combining low line, used to spell underlined (marked) letters.
pub const UNDERLINE: char = '\u{332}';

/// A letter of some alphabet. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(token: &str) -> Symbol {
        Symbol(Arc::from(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The underlined copy of this letter (`a` becomes `a̲`).
    pub fn underlined(&self) -> Symbol {
        Symbol::new(&format!("{}{}", self.0, UNDERLINE))
    }

    pub fn is_underlined(&self) -> bool {
        self.0.ends_with(UNDERLINE)
    }

    /// Strips one level of underlining, if present.
    pub fn base(&self) -> Symbol {
        match self.0.strip_suffix(UNDERLINE) {
            Some(b) => Symbol::new(b),
            None => self.clone(),
        }
    }

    /// One visible glyph: a single char, possibly followed by the underline.
    fn is_single_glyph(&self) -> bool {
        let mut chars = self.0.chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(c), None, None) => !c.is_whitespace(),
            (Some(c), Some(UNDERLINE), None) => !c.is_whitespace(),
            _ => false,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Symbol {
        Symbol::new(s)
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Symbol, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Symbol::new(&s))
    }
}

/// A finite set of tokens.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    letters: BTreeSet<Symbol>,
}

impl Alphabet {
    /// Builds an alphabet, rejecting duplicates and the empty set.
    pub fn new<I, S>(letters: I) -> Result<Alphabet>
    where
        I: IntoIterator<Item = S>,
        S: Into<Symbol>,
    {
        let mut set = BTreeSet::new();
        for l in letters {
            let l = l.into();
            if l.as_str().is_empty() || l.as_str().chars().any(char::is_whitespace) {
                return Err(Error::InvalidAlphabet(format!("bad token {:?}", l.as_str())));
            }
            if !set.insert(l.clone()) {
                return Err(Error::InvalidAlphabet(format!("duplicate letter {l}")));
            }
        }
        if set.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        Ok(Alphabet { letters: set })
    }

    /// The empty letter set; only meaningful as an erasure set.
    pub fn empty() -> Alphabet {
        Alphabet::default()
    }

    /// Parses `a,b,#`, `a b #` or the contiguous `ab#`.
    pub fn parse(s: &str) -> Result<Alphabet> {
        let s = s.trim();
        if s.contains(',') {
            Alphabet::new(s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(Symbol::new))
        } else {
            Alphabet::new(Word::parse(s).0)
        }
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.letters.contains(s)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.letters.iter()
    }

    pub fn is_disjoint(&self, other: &Alphabet) -> bool {
        self.letters.is_disjoint(&other.letters)
    }

    pub fn is_subset(&self, other: &Alphabet) -> bool {
        self.letters.is_subset(&other.letters)
    }

    pub fn union(&self, other: &Alphabet) -> Alphabet {
        Alphabet { letters: self.letters.union(&other.letters).cloned().collect() }
    }

    pub fn intersection(&self, other: &Alphabet) -> Alphabet {
        Alphabet { letters: self.letters.intersection(&other.letters).cloned().collect() }
    }

    pub fn difference(&self, other: &Alphabet) -> Alphabet {
        Alphabet { letters: self.letters.difference(&other.letters).cloned().collect() }
    }

    pub fn with(&self, s: Symbol) -> Alphabet {
        let mut letters = self.letters.clone();
        letters.insert(s);
        Alphabet { letters }
    }

    /// `Γ ∪ Γ̲`: the alphabet together with its underlined copy.
    pub fn marked(&self) -> Alphabet {
        let mut letters = self.letters.clone();
        letters.extend(self.letters.iter().map(Symbol::underlined));
        Alphabet { letters }
    }

    pub fn words_containing_only(&self, w: &Word) -> bool {
        w.iter().all(|c| self.contains(c))
    }

    pub fn render(&self) -> String {
        self.letters.iter().map(Symbol::as_str).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.render())
    }
}

/// A finite sequence of symbols. Positions are 1-based.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    /// Parses a word: whitespace-separated tokens, or one token per glyph
    /// when the string has no whitespace. A lone `ε` is the empty word.
    pub fn parse(s: &str) -> Word {
        let s = s.trim();
        if s.is_empty() || s == "ε" {
            return Word::empty();
        }
        if s.contains(char::is_whitespace) {
            return Word(s.split_whitespace().map(Symbol::new).collect());
        }
        let mut out: Vec<String> = Vec::new();
        for c in s.chars() {
            match (c, out.last_mut()) {
                (UNDERLINE, Some(last)) => last.push(c),
                _ => out.push(c.to_string()),
            }
        }
        Word(out.iter().map(|t| Symbol::new(t)).collect())
    }

    /// Parses with longest-match tokenization against `alphabet` when the
    /// string has no whitespace, so multi-character tokens work unspaced.
    pub fn parse_with(s: &str, alphabet: &Alphabet) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "ε" {
            return Ok(Word::empty());
        }
        let word = if s.contains(char::is_whitespace) {
            Word(s.split_whitespace().map(Symbol::new).collect())
        } else {
            let mut tokens: Vec<&Symbol> = alphabet.iter().collect();
            tokens.sort_by_key(|t| std::cmp::Reverse(t.as_str().len()));
            let mut rest = s;
            let mut out = Vec::new();
            while !rest.is_empty() {
                let tok = tokens.iter().find(|t| rest.starts_with(t.as_str())).ok_or_else(|| {
                    Error::Parse(format!("cannot tokenize {rest:?} over {alphabet}"))
                })?;
                out.push((*tok).clone());
                rest = &rest[tok.as_str().len()..];
            }
            Word(out)
        };
        if let Some(bad) = word.iter().find(|c| !alphabet.contains(c)) {
            return Err(Error::Parse(format!("letter {bad} not in {alphabet}")));
        }
        Ok(word)
    }

    pub fn from_symbols<I: IntoIterator<Item = Symbol>>(it: I) -> Word {
        Word(it.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `w[i]` for `1 ≤ i ≤ |w|`.
    pub fn get(&self, i: usize) -> Option<&Symbol> {
        if i == 0 {
            None
        } else {
            self.0.get(i - 1)
        }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Symbol> {
        self.0.iter()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    /// `|w|_c`
    pub fn count(&self, c: &Symbol) -> usize {
        self.0.iter().filter(|s| *s == c).count()
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    pub fn extend_from(&mut self, other: &Word) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn repeat(&self, n: usize) -> Word {
        Word(std::iter::repeat_n(self.0.iter().cloned(), n).flatten().collect())
    }

    /// Canonical rendering: contiguous when every token is one glyph,
    /// whitespace-separated otherwise.
    pub fn render(&self) -> String {
        if self.0.iter().all(Symbol::is_single_glyph) {
            self.0.iter().map(Symbol::as_str).collect()
        } else {
            self.0.iter().map(Symbol::as_str).collect::<Vec<_>>().join(" ")
        }
    }

    /// Always whitespace-separated; unambiguous for any alphabet.
    pub fn render_spaced(&self) -> String {
        self.0.iter().map(Symbol::as_str).collect::<Vec<_>>().join(" ")
    }

    /// The letters of `self` that are not in `delta`, in order.
    pub fn erase(&self, delta: &Alphabet) -> Word {
        Word(self.0.iter().filter(|c| !delta.contains(c)).cloned().collect())
    }

    /// `w↾i`: the word with position `i` underlined.
    pub fn underline(&self, i: usize) -> Result<MarkedWord> {
        if i == 0 || i > self.len() {
            return Err(Error::IndexOutOfRange { index: i, len: self.len() });
        }
        Ok(MarkedWord(self.0.iter().enumerate().map(|(k, s)| (s.clone(), k + 1 == i)).collect()))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({:?})", self.render_spaced())
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Word {
        Word::parse(s)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// A word in which some letters carry an underline mark.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedWord(pub Vec<(Symbol, bool)>);

impl MarkedWord {
    pub fn unmark(&self) -> Word {
        Word(self.0.iter().map(|(s, _)| s.clone()).collect())
    }

    /// Encodes over `Γ ∪ Γ̲`, spelling marked letters with the underline.
    pub fn to_word(&self) -> Word {
        Word(self.0.iter().map(|(s, m)| if *m { s.underlined() } else { s.clone() }).collect())
    }

    pub fn marked_positions(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, (_, m))| *m).map(|(i, _)| i + 1).collect()
    }

    /// Inverse of [`MarkedWord::to_word`].
    pub fn from_word(w: &Word) -> MarkedWord {
        MarkedWord(w.iter().map(|s| (s.base(), s.is_underlined())).collect())
    }
}

impl fmt::Display for MarkedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_word().fmt(f)
    }
}

/// Output letters each annotated with a tuple of 1-based input positions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OriginWord {
    pub items: Vec<(Symbol, Vec<usize>)>,
}

impl OriginWord {
    pub fn new() -> OriginWord {
        OriginWord::default()
    }

    pub fn push(&mut self, s: Symbol, origin: Vec<usize>) {
        self.items.push((s, origin));
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Projection onto the output symbols.
    pub fn letters(&self) -> Word {
        Word(self.items.iter().map(|(s, _)| s.clone()).collect())
    }

    pub fn origins(&self) -> impl Iterator<Item = &[usize]> {
        self.items.iter().map(|(_, o)| o.as_slice())
    }

    /// Checks every origin coordinate against the input length.
    pub fn origins_within(&self, input_len: usize) -> bool {
        self.origins().all(|o| o.iter().all(|&i| (1..=input_len).contains(&i)))
    }

    /// `a:5 a:6 b:5 ...`, or `a:(1,2) ...` for tuples of arity > 1.
    pub fn render(&self) -> String {
        self.items
            .iter()
            .map(|(s, o)| {
                if o.len() == 1 {
                    format!("{s}:{}", o[0])
                } else {
                    let coords: Vec<String> = o.iter().map(|i| i.to_string()).collect();
                    format!("{s}:({})", coords.join(","))
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}
