#![allow(dead_code)]

use polyreg::logic::formula::{self as fo, Formula};
use polyreg::{Symbol, Word};
use proptest::prelude::*;

/// Words over `letters` with length in `len`.
pub fn word_over(letters: &'static [&'static str], len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::sample::select(letters), len).prop_map(|v| Word::from_symbols(v.into_iter().map(Symbol::new)))
}

/// Random formulas using variables from `vars` and letters from `letters`,
/// with quantifiers over `bound`.
pub fn formula(
    vars: &'static [&'static str],
    bound: &'static [&'static str],
    letters: &'static [&'static str],
    depth: u32,
) -> impl Strategy<Value = Formula> {
    let v = || prop::sample::select(vars);
    let leaf = prop_oneof![
        (prop::sample::select(letters), v()).prop_map(|(c, x)| fo::letter(c, x)),
        (v(), v()).prop_map(|(x, y)| fo::leq(x, y)),
        (v(), v()).prop_map(|(x, y)| fo::eq(x, y)),
        v().prop_map(fo::max),
        v().prop_map(fo::min),
    ];
    leaf.prop_recursive(depth, 24, 3, move |inner| {
        prop_oneof![
            inner.clone().prop_map(fo::not),
            prop::collection::vec(inner.clone(), 0..3).prop_map(fo::and),
            prop::collection::vec(inner.clone(), 0..3).prop_map(fo::or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| fo::implies(a, b)),
            (prop::sample::select(bound), inner.clone()).prop_map(|(x, f)| fo::forall(x, f)),
            (prop::sample::select(bound), inner).prop_map(|(x, f)| fo::exists(x, f)),
        ]
    })
}

fn lex_order() -> Formula {
    fo::or(vec![fo::lt("x1", "y1"), fo::and(vec![fo::eq("x1", "y1"), fo::leq("x2", "y2")])])
}

/// Random sortable 2D interpretations over `{a,b}` → `{c,d}`: each letter
/// formula conjoins a part about `x1` with a part about `x2`, and the order
/// is lexicographic.
pub fn sortable_interp() -> impl Strategy<Value = polyreg::interp::Interpretation> {
    let part = |x: &'static [&'static str], bound: &'static [&'static str]| formula(x, bound, &["a", "b"], 2);
    (
        part(&["x1", "u"], &["u"]),
        part(&["x2", "v"], &["v"]),
        part(&["x1", "u"], &["u"]),
        part(&["x2", "v"], &["v"]),
    )
        .prop_map(|(c1, c2, d1, d2)| {
            let close = |f: Formula, bound: &str| if f.free_vars().contains(bound) { fo::exists(bound, f) } else { f };
            let c = fo::and(vec![close(c1, "u"), close(c2, "v")]);
            let d = fo::and(vec![fo::not(c.clone()), close(d1, "u"), close(d2, "v")]);
            let letters = [(Symbol::new("c"), c), (Symbol::new("d"), d)].into_iter().collect();
            let ab = polyreg::Alphabet::new(["a", "b"]).unwrap();
            let cd = polyreg::Alphabet::new(["c", "d"]).unwrap();
            polyreg::interp::Interpretation::new(2, ab, cd, letters, lex_order()).unwrap()
        })
}
