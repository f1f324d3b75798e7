mod common;

use common::sortable_interp;
use polyreg::interp::{eval_interp, innsq_interp, squaring_family};
use polyreg::logic::check_sortable;
use polyreg::psi::{fprime_oracle, marker_blocks, psi, DecoratedInput, MarkerScheme};
use polyreg::{Symbol, Word};
use proptest::prelude::*;

fn decorated(letters: &'static [&'static str], max_len: usize, max_pad: usize) -> impl Strategy<Value = DecoratedInput> {
    common::word_over(letters, 0..=max_len).prop_flat_map(move |u| {
        let n = u.len();
        prop::collection::vec(0..=max_pad, n + 1).prop_map(move |p| DecoratedInput::new(u.clone(), p).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn psi_matches_direct_semantics_on_random_interpretations(i in sortable_interp(), x in decorated(&["a", "b"], 4, 2)) {
        let s = MarkerScheme::plain();
        let p = psi(&i, &s).unwrap();
        prop_assert!(check_sortable(&p).unwrap().is_sortable());
        let out = eval_interp(&p, &x.render(&s.club)).unwrap();
        prop_assert_eq!(out.diagnostic, None);
        prop_assert_eq!(out.word.letters(), fprime_oracle(&i, &s, &x).unwrap());
    }

    #[test]
    fn erasing_output_markers_gives_the_base_output(x in decorated(&["a", "b", "#"], 5, 3)) {
        let s = MarkerScheme::level(1);
        let base = eval_interp(&innsq_interp(), &x.u).unwrap().word.letters();
        let out = fprime_oracle(&innsq_interp(), &s, &x).unwrap();
        prop_assert_eq!(out.erase(&s.output_markers()), base.clone());
        let (letters, blocks) = marker_blocks(&out, &s.output_markers());
        prop_assert_eq!(letters, base);
        // each block is □^i ◊^j
        for b in &blocks[1..] {
            let boxes = b.iter().take_while(|c| **c == s.boxed).count();
            prop_assert!(b.iter().skip(boxes).all(|c| *c == s.diamond));
        }
    }

    #[test]
    fn decorated_inputs_round_trip(x in decorated(&["a"], 6, 3)) {
        let club = Symbol::new("♣");
        prop_assert_eq!(DecoratedInput::parse(&x.render(&club), &club), x);
    }
}

#[test]
fn psi_on_squaring_family_matches_oracle_exhaustively() {
    let s = MarkerScheme::plain();
    let p = psi(&squaring_family(), &s).unwrap().compile().unwrap();
    for n in 0..=3 {
        let u = Word::parse(&"a".repeat(n));
        for code in 0..3usize.pow(n as u32 + 1) {
            let p_vec: Vec<usize> = (0..=n).map(|i| code / 3usize.pow(i as u32) % 3).collect();
            let x = DecoratedInput::new(u.clone(), p_vec).unwrap();
            assert_eq!(p.eval(&x.render(&s.club)).word.letters(), fprime_oracle(&squaring_family(), &s, &x).unwrap(), "{x}");
        }
    }
}
