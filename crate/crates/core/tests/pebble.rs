mod common;

use std::collections::BTreeMap;

use common::word_over;
use polyreg::pebble::{innsq_direct, innsq_pebble, Flavor, PolyFun, Trace};
use polyreg::twoway::{self, block_marker, hash_counter};
use polyreg::{Alphabet, Symbol, Word};
use proptest::prelude::*;

fn dot() -> Symbol {
    Symbol::new("•")
}

/// `w ↦ w^{#w}`: a blind tree of depth 2.
fn copies_per_hash() -> PolyFun {
    let id = twoway::identity(hash_counter().input_alphabet());
    PolyFun::blind(hash_counter(), BTreeMap::from([(dot(), PolyFun::Reg(id))])).unwrap()
}

/// `w ↦ w^{(#w)²}`: blind of depth 3.
fn squared_copies() -> PolyFun {
    PolyFun::blind(hash_counter(), BTreeMap::from([(dot(), copies_per_hash())])).unwrap()
}

/// One marked copy of `w` per non-empty block, hashes kept.
fn marked_copies() -> PolyFun {
    let marked = Alphabet::new(["a", "b", "#"]).unwrap().marked();
    PolyFun::pebble(
        block_marker(),
        BTreeMap::from([(dot(), PolyFun::Reg(twoway::identity(&marked))), (Symbol::new("#"), PolyFun::constant("#"))]),
    )
    .unwrap()
}

fn trees() -> Vec<(&'static str, PolyFun)> {
    vec![
        ("innsq", innsq_pebble()),
        ("copies", copies_per_hash()),
        ("squared", squared_copies()),
        ("marked", marked_copies()),
        ("reg", PolyFun::Reg(block_marker())),
        ("const", PolyFun::constant("a b")),
    ]
}

fn check_trace(t: &Trace) {
    if !t.children.is_empty() {
        let joined: Vec<Symbol> = t.children.iter().flat_map(|c| c.output.iter().cloned()).collect();
        assert_eq!(Word::from_symbols(joined), t.output);
        t.children.iter().for_each(check_trace);
    }
}

#[test]
fn depths_of_hand_built_trees() {
    let depth = |f: &PolyFun| (f.depth().k, f.depth().flavor);
    assert_eq!(depth(&innsq_pebble()), (3, Flavor::Pebble));
    assert_eq!(depth(&copies_per_hash()), (2, Flavor::Blind));
    assert_eq!(depth(&squared_copies()), (3, Flavor::Blind));
    assert_eq!(depth(&marked_copies()), (2, Flavor::Pebble));
    assert_eq!(depth(&PolyFun::constant("a")), (0, Flavor::Blind));
}

#[test]
fn hand_built_trees_compute_what_they_claim() {
    let w = Word::parse("ab#a##b");
    assert_eq!(copies_per_hash().apply(&w).unwrap(), w.repeat(3));
    assert_eq!(squared_copies().apply(&w).unwrap(), w.repeat(9));
    assert_eq!(marked_copies().apply(&w).unwrap().render(), "a̲b#a##b#ab#a̲##b##ab#a##b̲");
}

#[test]
fn branch_coverage_is_enforced() {
    let only_dot = BTreeMap::from([(dot(), PolyFun::constant("a"))]);
    assert!(PolyFun::pebble(block_marker(), only_dot.clone()).is_err());
    let mut extra = only_dot;
    extra.insert(Symbol::new("#"), PolyFun::constant(""));
    extra.insert(Symbol::new("z"), PolyFun::constant(""));
    assert!(PolyFun::pebble(block_marker(), extra).is_err());
}

proptest! {
    #[test]
    fn outputs_respect_growth_bound(w in word_over(&["a", "b", "#"], 0..=14)) {
        for (name, f) in trees() {
            let out = f.apply(&w).unwrap();
            prop_assert!((out.len() as u128) <= f.growth_bound(w.len()), "{} on {}", name, w.render());
        }
    }

    #[test]
    fn traces_decompose_outputs(w in word_over(&["a", "b", "#"], 0..=10)) {
        for (_, f) in trees() {
            let t = f.apply_traced(&w).unwrap();
            prop_assert_eq!(&t.output, &f.apply(&w).unwrap());
            check_trace(&t);
        }
        prop_assert_eq!(innsq_pebble().apply(&w).unwrap(), innsq_direct(&w));
    }
}

#[test]
fn combinator_files_round_trip() {
    for (name, f) in trees() {
        let text = f.to_string();
        assert_eq!(PolyFun::parse(&text).unwrap(), f, "{name}");
    }
}
