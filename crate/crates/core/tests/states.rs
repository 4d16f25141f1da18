use pfaffamp_core::oracle::dense_from_gaussian;
use pfaffamp_core::skewlin::{sub_pfaffian, IndexSubset};
use pfaffamp_core::state::{base_config_change, computational_amplitude, normalization, random_skew};
use pfaffamp_core::{random_state, Complex64, Error, FermionConfiguration, GaussianPureState, SkewMatrix};
use proptest::prelude::*;

/// Returns the unit-modulus `c` with `b = c a`, if there is one.
fn proportional(a: &[Complex64], b: &[Complex64]) -> Option<Complex64> {
    let k = (0..a.len()).max_by(|&i, &j| a[i].norm().total_cmp(&a[j].norm()))?;
    let c = b[k] / a[k];
    let ok = (c.norm() - 1.0).abs() < 1e-9 && a.iter().zip(b).all(|(x, y)| (x * c - y).norm() < 1e-9);
    ok.then_some(c)
}

#[test]
fn vacuum_state() {
    let s = GaussianPureState::vacuum(5);
    let d = dense_from_gaussian(&s).unwrap();
    assert_eq!(d.amplitudes()[0], Complex64::new(1.0, 0.0));
    assert!((d.norm_sqr() - 1.0).abs() < 1e-15);
}

#[test]
fn two_site_state_by_hand() {
    let r = Complex64::new(0.3, -1.2);
    let mut m = SkewMatrix::zeros(2);
    m.set(0, 1, r);
    let s = GaussianPureState::new(m);
    let n = (1.0 + r.norm_sqr()).sqrt();
    let d = dense_from_gaussian(&s).unwrap();
    assert!((d.amplitudes()[0] - Complex64::new(1.0 / n, 0.0)).norm() < 1e-15);
    assert!((d.amplitudes()[3] - r / n).norm() < 1e-15);
    assert_eq!(d.amplitudes()[1], Complex64::new(0.0, 0.0));
}

#[test]
fn zero_vacuum_amplitude_keeps_base() {
    // |1100> with r_01 = 0: the vacuum has zero weight.
    let base = FermionConfiguration::new(vec![true, true, false, false]);
    let r = SkewMatrix::from_upper_fn(4, |i, j| if (i, j) == (0, 1) { Complex64::new(0.0, 0.0) } else { Complex64::new(0.5, 0.1) });
    let s = GaussianPureState::with_base(r, base.clone()).unwrap();
    assert!(!s.is_vacuum_based());
    assert!(matches!(
        base_config_change(&s, &FermionConfiguration::vacuum(4)),
        Err(Error::ZeroAmplitudeBase { .. })
    ));
    let d = dense_from_gaussian(&s).unwrap();
    assert!((d.norm_sqr() - 1.0).abs() < 1e-12);
    assert!(d.amplitudes()[0].norm() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dense_state_is_normalised(l in 0usize..=10, seed in any::<u64>(), scale in 0.05f64..4.0) {
        let s = random_state(l, seed, scale);
        let d = dense_from_gaussian(&s).unwrap();
        prop_assert!((d.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn normalisation_matches_sum_of_squares(l in 0usize..=8, seed in any::<u64>()) {
        let r = random_skew(l, seed, 1.0);
        let mut total = 0.0;
        for k in 0..1u64 << l {
            let keep = IndexSubset::from_mask(l, k);
            total += sub_pfaffian(&r, &keep).unwrap().norm_sqr();
        }
        let n = normalization(&r);
        prop_assert!((n * n - total).abs() < 1e-9 * total);
    }

    #[test]
    fn base_change_preserves_the_state(l in 2usize..=8, seed in any::<u64>(), mask in any::<u64>()) {
        let mut s = random_state(l, seed, 1.0);
        let target = FermionConfiguration::from_index(l, mask % (1 << l));
        // Only even occupation strings carry weight.
        let target = if target.occupied_sites().len() % 2 == 1 { target.with_flipped(&[0]) } else { target };
        let before = dense_from_gaussian(&s).unwrap();
        let moved = base_config_change(&s, &target).unwrap();
        prop_assert_eq!(moved.base_config(), &target);
        let after = dense_from_gaussian(&moved).unwrap();
        prop_assert!(proportional(before.amplitudes(), after.amplitudes()).is_some());
        // And back to the vacuum through the constructor.
        s = GaussianPureState::with_base(moved.r_matrix().clone(), target).unwrap();
        prop_assert!(s.is_vacuum_based());
        let back = dense_from_gaussian(&s).unwrap();
        prop_assert!(proportional(before.amplitudes(), back.amplitudes()).is_some());
    }

    #[test]
    fn amplitudes_of_odd_strings_vanish(l in 1usize..=8, seed in any::<u64>(), k in any::<u64>()) {
        let s = random_state(l, seed, 1.0);
        let c = FermionConfiguration::from_index(l, k % (1 << l));
        if c.occupied_sites().len() % 2 == 1 {
            prop_assert_eq!(computational_amplitude(&s, &c).unwrap(), Complex64::new(0.0, 0.0));
        }
    }
}
