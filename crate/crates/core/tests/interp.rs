mod common;

use common::{sortable_interp, word_over};
use polyreg::interp::{self, eval_interp, Interpretation, OrderCheck};
use polyreg::langlab::all_words;
use polyreg::logic::check_sortable;
use polyreg::psi;
use polyreg::{Alphabet, Word};
use proptest::prelude::*;

fn builtins() -> Vec<(&'static str, Interpretation)> {
    interp::BUILTIN_NAMES.iter().map(|n| (*n, interp::builtin(n).unwrap())).collect()
}

#[test]
fn builtin_outputs_are_quadratic_and_full_check_agrees() {
    for (name, i) in builtins() {
        let c = i.compile().unwrap();
        for w in all_words(&i.input, 6) {
            let ranked = c.eval_with(&w, OrderCheck::Ranked);
            let full = c.eval_with(&w, OrderCheck::Full);
            assert_eq!(ranked, full, "{name} on {}", w.render());
            assert!(ranked.word.len() <= w.len() * w.len(), "{name} on {}", w.render());
            assert!(ranked.word.origins_within(w.len()));
            assert_eq!(c.eval(&w), ranked);
        }
    }
}

#[test]
fn planted_interpretation_is_not_sortable_but_still_evaluates() {
    let i = interp::planted_cross_sort();
    assert!(!check_sortable(&i).unwrap().is_sortable());
    let c = i.compile().unwrap();
    for w in all_words(&i.input, 5) {
        assert!(c.eval(&w).word.len() <= w.len() * w.len());
    }
}

#[test]
fn second_family_member_stays_quadratic_up_to_length_10() {
    let i = psi::family(2).unwrap();
    assert_eq!(i.input, Alphabet::new(["a", "♣1"]).unwrap());
    let c = i.compile().unwrap();
    let words = all_words(&i.input, 10);
    assert_eq!(words.len(), 2047);
    let bad = polyreg::par::map(polyreg::par::Execution::Parallel, &words, |w| {
        let out = c.eval(w);
        (out.diagnostic.is_some() || out.word.len() > w.len() * w.len()).then(|| w.render())
    });
    assert_eq!(bad.into_iter().flatten().next(), None);
}

#[test]
fn builtin_files_round_trip() {
    for (name, i) in builtins() {
        let text = i.to_file_string();
        assert_eq!(Interpretation::parse_file(&text).unwrap(), i, "{name}");
    }
    let f3 = psi::family(3).unwrap();
    assert_eq!(Interpretation::parse_file(&f3.to_file_string()).unwrap(), f3);
}

#[test]
fn innsq_interp_on_example() {
    let out = eval_interp(&interp::innsq_interp(), &Word::parse("aba#baa#bb")).unwrap();
    assert_eq!(out.word.letters().render(), "abaaba#baabaa#bbbb");
    assert_eq!(out.diagnostic, None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compiled_matches_naive_on_random_interpretations(i in sortable_interp(), w in word_over(&["a", "b"], 0..=5)) {
        let naive = eval_interp(&i, &w).unwrap();
        let compiled = i.compile().unwrap().eval(&w);
        prop_assert_eq!(&naive, &compiled);
        prop_assert!(naive.word.len() <= w.len() * w.len());
        prop_assert_eq!(naive.diagnostic, None);
    }

    #[test]
    fn random_interpretation_files_round_trip(i in sortable_interp()) {
        let back = Interpretation::parse_file(&i.to_file_string()).unwrap();
        prop_assert_eq!(back, i);
    }

    #[test]
    fn generated_interpretations_are_sortable(i in sortable_interp()) {
        prop_assert!(check_sortable(&i).unwrap().is_sortable());
    }
}
