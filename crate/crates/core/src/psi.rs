//! The Ψ transformation on 2D interpretations and its direct semantics.
//!
//! Ψ(I) reads words over `Γ ∪ {♣}`. On `♣^{p0} u₁ ♣^{p1} … uₙ ♣^{pn}` it
//! outputs `v₁ □^{p[i₁]} ◊^{p[j₁]} ⋯ vₘ □^{p[iₘ]} ◊^{p[jₘ]}` where
//! `I(u) = v₁…vₘ` and `(iₖ,jₖ)` is the origin of `vₖ`. Erasing `□,◊` gives
//! back `I(u)`, and the padding lets the marker blocks be made pairwise
//! distinct.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::interp::{self, squaring_family, Interpretation, MarkerRecord};
use crate::logic::formula::{self as fo, Formula, Var};
use crate::words::{Alphabet, Symbol, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkerScheme {
    pub level: usize,
    pub club: Symbol,
    pub boxed: Symbol,
    pub diamond: Symbol,
}

impl MarkerScheme {
    /// `♣k`, `□k`, `◊k`.
    pub fn level(k: usize) -> MarkerScheme {
        MarkerScheme {
            level: k,
            club: Symbol::new(&format!("♣{k}")),
            boxed: Symbol::new(&format!("□{k}")),
            diamond: Symbol::new(&format!("◊{k}")),
        }
    }

    /// Arbitrary marker symbols, recorded as level 0.
    pub fn new(club: &str, boxed: &str, diamond: &str) -> Result<MarkerScheme> {
        if boxed == diamond {
            return Err(Error::MarkerCollision(boxed.to_string()));
        }
        Ok(MarkerScheme { level: 0, club: Symbol::new(club), boxed: Symbol::new(boxed), diamond: Symbol::new(diamond) })
    }

    /// The unindexed `♣`, `□`, `◊`.
    pub fn plain() -> MarkerScheme {
        MarkerScheme::new("♣", "□", "◊").unwrap()
    }

    pub fn output_markers(&self) -> Alphabet {
        Alphabet::new([self.boxed.as_str(), self.diamond.as_str()]).expect("distinct markers")
    }

    fn record(&self) -> MarkerRecord {
        MarkerRecord { level: self.level, club: self.club.clone(), boxed: self.boxed.clone(), diamond: self.diamond.clone() }
    }
}

/// A word over `Γ ∪ {♣}` split into its base word `u` and padding
/// `p[0..=n]`, where `p[i]` counts the `♣`s right after position `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedInput {
    pub u: Word,
    pub p: Vec<usize>,
}

impl DecoratedInput {
    pub fn new(u: Word, p: Vec<usize>) -> Result<DecoratedInput> {
        if p.len() != u.len() + 1 {
            return Err(Error::Dimension { expected: u.len() + 1, found: p.len() });
        }
        Ok(DecoratedInput { u, p })
    }

    pub fn undecorated(u: Word) -> DecoratedInput {
        let p = vec![0; u.len() + 1];
        DecoratedInput { u, p }
    }

    pub fn render(&self, club: &Symbol) -> Word {
        let mut w = Word::empty();
        let pad = |w: &mut Word, k: usize| (0..k).for_each(|_| w.push(club.clone()));
        pad(&mut w, self.p[0]);
        for (c, &k) in self.u.iter().zip(&self.p[1..]) {
            w.push(c.clone());
            pad(&mut w, k);
        }
        w
    }

    pub fn parse(w: &Word, club: &Symbol) -> DecoratedInput {
        let mut u = Word::empty();
        let mut p = vec![0];
        for c in w.iter() {
            if c == club {
                *p.last_mut().unwrap() += 1;
            } else {
                u.push(c.clone());
                p.push(0);
            }
        }
        DecoratedInput { u, p }
    }
}

impl fmt::Display for DecoratedInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.p.iter().map(usize::to_string).collect();
        write!(f, "u={} p=({})", self.u.render(), p.join(","))
    }
}

/// The decoration `u₁ ♣ u₂ ♣♣ … uₙ ♣ⁿ`, i.e. `p = (0,1,…,n)`.
pub fn dcomplete_witness(u: &Word) -> DecoratedInput {
    DecoratedInput { u: u.clone(), p: (0..=u.len()).collect() }
}

/// `P(x,y)`: `x ≤ y`, `x` is not `♣`, and every position in `(x,y]` is.
fn padded_run(x: &str, y: &str, z: &str, club: &Symbol) -> Formula {
    use fo::*;
    and(vec![
        leq(x, y),
        not(letter_sym(club, x)),
        forall(z, implies(and(vec![not(leq(z, x)), leq(z, y)]), letter_sym(club, z))),
    ])
}

fn rename(f: &Formula, pairs: &[(&str, &str)]) -> Formula {
    let map: BTreeMap<Var, Var> = pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    f.substitute(&map)
}

/// Builds Ψ(I) for a 2D interpretation, with fresh markers from `scheme`.
pub fn psi(i: &Interpretation, scheme: &MarkerScheme) -> Result<Interpretation> {
    use fo::*;
    if i.dim != 2 {
        return Err(Error::Dimension { expected: 2, found: i.dim });
    }
    let club = &scheme.club;
    if i.input.contains(club) {
        return Err(Error::MarkerCollision(club.to_string()));
    }
    for m in [&scheme.boxed, &scheme.diamond] {
        if i.output.contains(m) {
            return Err(Error::MarkerCollision(m.to_string()));
        }
    }
    if scheme.boxed == scheme.diamond {
        return Err(Error::MarkerCollision(scheme.boxed.to_string()));
    }

    let mut used: Vec<Var> = i.letters.values().chain([&i.order]).flat_map(|f| f.all_vars()).collect();
    used.extend(["x1", "x2", "y1", "y2"].map(String::from));
    let mut fresh = FreshNames::avoiding(&used);
    let [xh1, xh2, yh1, yh2, z] = ["xh1", "xh2", "yh1", "yh2", "z"].map(|b| fresh.fresh(b));
    let p = |x: &str, y: &str| padded_run(x, y, &z, club);
    let unpadded = |x: &str| not(letter_sym(club, x));

    let rel: BTreeMap<&Symbol, Formula> = i.letters.iter().map(|(c, f)| (c, f.relativize(club))).collect();
    let any_letter = |a: &str, b: &str| or(rel.values().map(|f| rename(f, &[("x1", a), ("x2", b)])).collect());

    let mut letters = BTreeMap::new();
    for (c, f) in &rel {
        letters.insert((*c).clone(), and(vec![unpadded("x1"), unpadded("x2"), f.clone()]));
    }
    letters.insert(
        scheme.boxed.clone(),
        and(vec![letter_sym(club, "x1"), unpadded("x2"), exists(&xh1, and(vec![p(&xh1, "x1"), any_letter(&xh1, "x2")]))]),
    );
    letters.insert(
        scheme.diamond.clone(),
        and(vec![unpadded("x1"), letter_sym(club, "x2"), exists(&xh2, and(vec![p(&xh2, "x2"), any_letter("x1", &xh2)]))]),
    );

    let same_hat = and(vec![eq(&xh1, &yh1), eq(&xh2, &yh2)]);
    let order_r = rename(&i.order.relativize(club), &[("x1", &xh1), ("x2", &xh2), ("y1", &yh1), ("y2", &yh2)]);
    let tie_break = or(vec![lt("x2", "y2"), and(vec![eq("x2", "y2"), leq("x1", "y1")])]);
    let body = and(vec![
        p(&xh1, "x1"),
        p(&xh2, "x2"),
        p(&yh1, "y1"),
        p(&yh2, "y2"),
        or(vec![and(vec![not(same_hat.clone()), order_r]), and(vec![same_hat, tie_break])]),
    ]);
    let order = exists(&xh1, exists(&xh2, exists(&yh1, exists(&yh2, body))));

    let mut out = Interpretation::new(
        2,
        i.input.with(club.clone()),
        i.output.union(&scheme.output_markers()),
        letters,
        order,
    )?;
    out.markers = i.markers.clone();
    out.markers.push(scheme.record());
    Ok(out)
}

/// The output of Ψ(I) on a decorated input, computed directly from the
/// origins of `I(u)` with no formula rewriting.
pub fn fprime_oracle(i: &Interpretation, scheme: &MarkerScheme, x: &DecoratedInput) -> Result<Word> {
    let out = interp::eval_interp(i, &x.u)?;
    let mut w = Word::empty();
    for (v, origin) in out.word.items {
        w.push(v);
        for _ in 0..x.p[origin[0]] {
            w.push(scheme.boxed.clone());
        }
        for _ in 0..x.p[origin[1]] {
            w.push(scheme.diamond.clone());
        }
    }
    Ok(w)
}

/// Splits `w` at its letters outside `markers`: returns the letters
/// `c₁…cₙ` and the blocks `w₀,…,wₙ` with `w = w₀c₁w₁…cₙwₙ`.
pub fn marker_blocks(w: &Word, markers: &Alphabet) -> (Word, Vec<Word>) {
    let mut letters = Word::empty();
    let mut blocks = vec![Word::empty()];
    for c in w.iter() {
        if markers.contains(c) {
            blocks.last_mut().unwrap().push(c.clone());
        } else {
            letters.push(c.clone());
            blocks.push(Word::empty());
        }
    }
    (letters, blocks)
}

/// `I_k`: `Ψ^{k−1}` applied to `squaring-family`, level `j` using markers
/// `♣j, □j, ◊j`.
pub fn family(k: usize) -> Result<Interpretation> {
    if k == 0 {
        return Err(Error::InvalidInterpretation("family index starts at 1".into()));
    }
    (1..k).try_fold(squaring_family(), |i, level| psi(&i, &MarkerScheme::level(level)))
}

/// `Ψ^k(I)` with levels continuing after the markers `I` already has.
pub fn iterate(i: &Interpretation, k: usize) -> Result<Interpretation> {
    let start = i.markers.iter().map(|m| m.level).max().unwrap_or(0) + 1;
    (start..start + k).try_fold(i.clone(), |i, level| psi(&i, &MarkerScheme::level(level)))
}
