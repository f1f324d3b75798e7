//! Uniform handle on every kind of string function in the crate, resolved
//! from a textual reference.
//!
//! | reference            | function                                  |
//! |----------------------|-------------------------------------------|
//! | `innsq`              | inner squaring, computed directly         |
//! | `identity`           | identity on any alphabet                  |
//! | `const-eps`          | constant `ε`                              |
//! | `interp:<I>`         | interpretation (builtin name or file)     |
//! | `psi:<I>`            | `Ψ(I)` with the next level of markers     |
//! | `fprime:<I>`         | direct semantics of `psi:<I>`             |
//! | `family:<k>`         | `I_k`                                     |
//! | `pebble:<T>`         | combinator tree (builtin name or file)    |
//! | `2dft:<M>`           | two-way transducer (builtin name or file) |
//!
//! A bare builtin name of any kind also resolves.

use crate::error::{Error, Result};
use crate::interp::{self, CompiledInterp, Interpretation};
use crate::pebble::{self, PolyFun};
use crate::psi::{self, DecoratedInput, MarkerScheme};
use crate::twoway::{self, RegularFn};
use crate::words::{Alphabet, Word};

enum Kind {
    Innsq,
    Identity,
    ConstEps,
    Interp(Box<Interpretation>, Box<CompiledInterp>),
    Fprime(Box<Interpretation>, MarkerScheme),
    Pebble(PolyFun),
    Reg(RegularFn),
}

pub struct Function {
    id: String,
    input: Option<Alphabet>,
    kind: Kind,
}

impl Function {
    fn new(id: &str, input: Option<Alphabet>, kind: Kind) -> Function {
        Function { id: id.to_string(), input, kind }
    }

    pub fn innsq() -> Function {
        Function::new("innsq", None, Kind::Innsq)
    }

    pub fn identity() -> Function {
        Function::new("identity", None, Kind::Identity)
    }

    pub fn const_eps() -> Function {
        Function::new("const-eps", None, Kind::ConstEps)
    }

    pub fn from_interp(id: &str, i: Interpretation) -> Result<Function> {
        let c = i.compile()?;
        Ok(Function::new(id, Some(i.input.clone()), Kind::Interp(Box::new(i), Box::new(c))))
    }

    /// The direct semantics of `Ψ(I)` under `scheme`.
    pub fn fprime(id: &str, i: Interpretation, scheme: MarkerScheme) -> Function {
        let input = i.input.with(scheme.club.clone());
        Function::new(id, Some(input), Kind::Fprime(Box::new(i), scheme))
    }

    pub fn from_pebble(id: &str, p: PolyFun) -> Function {
        Function::new(id, p.input_alphabet(), Kind::Pebble(p))
    }

    pub fn from_regular(id: &str, f: RegularFn) -> Function {
        Function::new(id, Some(f.input_alphabet().clone()), Kind::Reg(f))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// `None` when the function accepts any letters.
    pub fn input_alphabet(&self) -> Option<&Alphabet> {
        self.input.as_ref()
    }

    /// The underlying interpretation, when the function is one.
    pub fn interpretation(&self) -> Option<&Interpretation> {
        match &self.kind {
            Kind::Interp(i, _) => Some(i),
            _ => None,
        }
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        if let Some(a) = &self.input {
            if let Some(c) = w.iter().find(|c| !a.contains(c)) {
                return Err(Error::AlphabetMismatch(format!("`{}` does not accept `{c}` (alphabet {a})", self.id)));
            }
        }
        match &self.kind {
            Kind::Innsq => Ok(pebble::innsq_direct(w)),
            Kind::Identity => Ok(w.clone()),
            Kind::ConstEps => Ok(Word::empty()),
            Kind::Interp(_, c) => Ok(c.eval(w).word.letters()),
            Kind::Fprime(i, s) => psi::fprime_oracle(i, s, &DecoratedInput::parse(w, &s.club)),
            Kind::Pebble(p) => p.apply(w),
            Kind::Reg(f) => f.apply(w),
        }
    }
}

fn next_scheme(i: &Interpretation) -> MarkerScheme {
    MarkerScheme::level(i.markers.iter().map(|m| m.level).max().unwrap_or(0) + 1)
}

/// Resolves a function reference (see the module table).
pub fn resolve(r: &str) -> Result<Function> {
    if let Some((prefix, arg)) = r.split_once(':') {
        return match prefix {
            "interp" => Function::from_interp(r, interp::load(arg)?),
            "psi" => Function::from_interp(r, psi::iterate(&interp::load(arg)?, 1)?),
            "fprime" => {
                let i = interp::load(arg)?;
                let s = next_scheme(&i);
                Ok(Function::fprime(r, i, s))
            }
            "family" => {
                let k = arg.parse::<usize>().map_err(|_| Error::Parse(format!("bad family index `{arg}`")))?;
                Function::from_interp(r, psi::family(k)?)
            }
            "pebble" => Ok(Function::from_pebble(r, pebble::load(arg)?)),
            "2dft" => Ok(Function::from_regular(r, twoway::load(arg)?)),
            _ => Err(Error::Unknown(r.to_string())),
        };
    }
    match r {
        "innsq" => Ok(Function::innsq()),
        "identity" => Ok(Function::identity()),
        "const-eps" => Ok(Function::const_eps()),
        _ => {
            if let Some(i) = interp::builtin(r) {
                Function::from_interp(r, i)
            } else if let Some(p) = pebble::builtin(r) {
                Ok(Function::from_pebble(r, p))
            } else if let Some(f) = twoway::builtin(r) {
                Ok(Function::from_regular(r, f))
            } else {
                Err(Error::Unknown(r.to_string()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_every_kind() {
        let w = Word::parse("aba#baa#bb");
        for r in ["innsq", "innsq-interp", "interp:innsq-interp", "innsq-pebble", "pebble:innsq-pebble"] {
            assert_eq!(resolve(r).unwrap().apply(&w).unwrap().render(), "abaaba#baabaa#bbbb", "{r}");
        }
        assert_eq!(resolve("family:1").unwrap().apply(&Word::parse("aaa")).unwrap().render(), "aabaab");
        assert_eq!(resolve("2dft:reverse-blocks-ab").unwrap().apply(&Word::parse("a#a")).unwrap().render(), "ab#ab");
        assert!(resolve("const-eps").unwrap().apply(&w).unwrap().is_empty());
    }

    #[test]
    fn psi_and_fprime_agree() {
        let p = resolve("psi:squaring-family").unwrap();
        let f = resolve("fprime:squaring-family").unwrap();
        let w = Word::parse("♣1 a a ♣1 a ♣1 ♣1");
        assert_eq!(p.apply(&w).unwrap(), f.apply(&w).unwrap());
        assert!(!p.apply(&w).unwrap().is_empty());
    }

    #[test]
    fn rejects_foreign_letters_and_unknown_refs() {
        assert!(matches!(resolve("squaring-family").unwrap().apply(&Word::parse("ab")), Err(Error::AlphabetMismatch(_))));
        assert!(matches!(resolve("nope"), Err(Error::Unknown(_))));
        assert!(matches!(resolve("zzz:innsq"), Err(Error::Unknown(_))));
        assert!(resolve("family:x").is_err());
    }
}
