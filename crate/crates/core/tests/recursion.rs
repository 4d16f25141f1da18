mod common;

use common::{random_basis, rng};
use pfaffamp_core::recursion::{
    evaluate_expansion, expansion_terms, pair_normalization, recursive_amplitude, recursive_amplitude_alt,
    recursive_amplitude_with, unnormalized_amplitude, RecursionTerm, RecursionVariant, SubAmplitudeEngine,
    TermSign,
};
use pfaffamp_core::state::normalization;
use pfaffamp_core::{amplitude_m_form, random_state, Complex64, SkewMatrix, SpinConfiguration};
use proptest::prelude::*;

fn term(partner: usize, sign: TermSign, parity: &[usize], shift: bool, remainder: &[usize], reflected: &[usize]) -> RecursionTerm {
    RecursionTerm {
        partner,
        sign,
        parity_sites: parity.to_vec(),
        pair_shift_phi: shift,
        pair_reflect_first: false,
        remainder: remainder.to_vec(),
        remainder_reflected: reflected.to_vec(),
    }
}

/// The four-site expansion, positions counted from 0.
fn table_four() -> Vec<RecursionTerm> {
    vec![
        term(1, TermSign::Plus, &[2, 3], false, &[2, 3], &[2, 3]),
        term(3, TermSign::Plus, &[], false, &[1, 2], &[]),
        term(2, TermSign::Minus, &[1], true, &[1, 3], &[1]),
    ]
}

/// The four-site row with the remainder reflected on both of its sites.
fn table_four_printed() -> Vec<RecursionTerm> {
    let mut t = table_four();
    t[2].remainder_reflected = vec![1, 3];
    t
}

fn table_six() -> Vec<RecursionTerm> {
    vec![
        term(1, TermSign::Plus, &[2, 3, 4, 5], false, &[2, 3, 4, 5], &[2, 3, 4, 5]),
        term(3, TermSign::Plus, &[4, 5], false, &[1, 2, 4, 5], &[4, 5]),
        term(5, TermSign::Plus, &[], false, &[1, 2, 3, 4], &[]),
        term(2, TermSign::Minus, &[1], true, &[1, 3, 4, 5], &[1]),
        term(4, TermSign::Minus, &[1, 2, 3], true, &[1, 2, 3, 5], &[1, 2, 3]),
    ]
}

fn worst_table_error(l: usize, terms: &[RecursionTerm], seeds: std::ops::Range<u64>) -> f64 {
    let mut r = rng(l as u64);
    let mut worst = 0.0f64;
    for seed in seeds {
        let state = random_state(l, seed, 1.0);
        let basis = random_basis(l, &mut r);
        for k in 0..1u64 << l {
            let c = SpinConfiguration::from_index(l, k);
            let a = evaluate_expansion(&state, &basis, &c, terms).unwrap();
            let b = amplitude_m_form(&state, &basis, &c).unwrap();
            worst = worst.max((a - b).norm());
        }
    }
    worst
}

#[test]
fn generated_terms_match_transcribed_tables() {
    assert_eq!(expansion_terms(4, RecursionVariant::Theorem).unwrap(), table_four());
    assert_eq!(expansion_terms(6, RecursionVariant::Theorem).unwrap(), table_six());
}

#[test]
fn transcribed_tables_reproduce_amplitudes() {
    // Odd sizes expand the padded system, so L = 3 uses the four-site row.
    for (l, t) in [(3, table_four()), (4, table_four()), (5, table_six()), (6, table_six())] {
        let e = worst_table_error(l, &t, 0..4);
        assert!(e < 1e-12, "L={l}: {e}");
    }
}

#[test]
fn reflecting_the_whole_remainder_is_wrong() {
    let e = worst_table_error(4, &table_four_printed(), 0..4);
    assert!(e > 1e-2, "the printed row unexpectedly agrees ({e})");
}

#[test]
fn both_variants_and_engines_match_direct_pfaffian() {
    let mut r = rng(5);
    for l in 1..=10 {
        let state = random_state(l, 31 * l as u64, 1.0);
        let basis = random_basis(l, &mut r);
        let step = if l > 7 { 37 } else { 1 };
        for k in (0..1u64 << l).step_by(step) {
            let c = SpinConfiguration::from_index(l, k);
            let want = amplitude_m_form(&state, &basis, &c).unwrap();
            for variant in [RecursionVariant::Theorem, RecursionVariant::Alternative] {
                for engine in [SubAmplitudeEngine::Direct, SubAmplitudeEngine::Full] {
                    let got = recursive_amplitude_with(&state, &basis, &c, variant, engine).unwrap();
                    assert!((got - want).norm() < 1e-10, "L={l} k={k} {variant:?} {engine:?}");
                }
            }
        }
    }
}

#[test]
fn full_recursion_has_a_size_limit() {
    let state = random_state(16, 0, 1.0);
    let basis = random_basis(16, &mut rng(0));
    let c = SpinConfiguration::from_index(16, 5);
    assert!(recursive_amplitude_with(&state, &basis, &c, RecursionVariant::Theorem, SubAmplitudeEngine::Full).is_err());
    assert!(recursive_amplitude(&state, &basis, &c).is_ok());
}

#[test]
fn pair_normalization_is_the_two_site_norm() {
    for r in [Complex64::new(0.0, 0.0), Complex64::new(0.3, -2.0), Complex64::new(-5.0, 0.1)] {
        let mut m = SkewMatrix::zeros(2);
        m.set(0, 1, r);
        assert!((pair_normalization(r) - normalization(&m)).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn alternative_recursion_agrees(l in 1usize..=8, seed in any::<u64>(), k in any::<u64>()) {
        let state = random_state(l, seed, 1.0);
        let basis = random_basis(l, &mut rng(seed ^ 0x55));
        let c = SpinConfiguration::from_index(l, k % (1 << l));
        let a = recursive_amplitude(&state, &basis, &c).unwrap();
        let b = recursive_amplitude_alt(&state, &basis, &c).unwrap();
        prop_assert!((a - b).norm() < 1e-10);
        let u = unnormalized_amplitude(&state, &basis, &c).unwrap();
        prop_assert!((u / state.norm() - a).norm() < 1e-10);
    }
}
