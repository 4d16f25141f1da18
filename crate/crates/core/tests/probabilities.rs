mod common;

use common::{random_basis, rng, TWO_PI};
use pfaffamp_core::basis::canonical_bras;
use pfaffamp_core::oracle::{dense_from_gaussian, oracle_amplitudes_all};
use pfaffamp_core::probentropy::{
    canonical_site, marginal_probability, max_probability_search, probability, probability_table,
    shannon_renyi_entropy, shannon_renyi_from_probabilities, ProbabilityPath, SubregionOutcome,
};
use pfaffamp_core::{random_state, PauliBasis, SiteAngles, Spin, SpinConfiguration};
use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::PI;

#[test]
fn tables_are_complete_on_both_paths() {
    let mut r = rng(2);
    for l in 1..=10 {
        for _ in 0..3 {
            let state = random_state(l, r.random::<u64>(), 1.0);
            let basis = random_basis(l, &mut r);
            for path in [ProbabilityPath::AmplitudeSquared, ProbabilityPath::DetRatio] {
                let t = probability_table(&state, &basis, path).unwrap();
                assert!((t.total() - 1.0).abs() < 1e-10, "L={l} {path:?}: {}", t.total());
            }
        }
    }
}

#[test]
fn shannon_renyi_matches_oracle_distribution() {
    let mut r = rng(9);
    let state = random_state(7, 4, 1.2);
    let basis = random_basis(7, &mut r);
    let dense = dense_from_gaussian(&state).unwrap();
    let p: Vec<f64> = oracle_amplitudes_all(&dense, &basis).unwrap().iter().map(|z| z.norm_sqr()).collect();
    for alpha in [0.0, 0.5, 1.0, 2.0, 7.5] {
        let want = if alpha == 1.0 {
            -p.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>()
        } else {
            p.iter().map(|x| x.powf(alpha)).sum::<f64>().ln() / (1.0 - alpha)
        };
        let got = shannon_renyi_entropy(&state, &basis, alpha).unwrap();
        assert!((got - want).abs() < 1e-10, "alpha={alpha}: {got} vs {want}");
    }
    assert!(shannon_renyi_entropy(&state, &basis, -1.0).is_err());
}

#[test]
fn entropy_of_a_product_state_vanishes_in_its_own_basis() {
    let state = pfaffamp_core::GaussianPureState::vacuum(6);
    let z = PauliBasis::uniform(6, SiteAngles::Z);
    assert!(shannon_renyi_entropy(&state, &z, 1.0).unwrap().abs() < 1e-14);
    let x = PauliBasis::uniform(6, SiteAngles::X);
    assert!((shannon_renyi_entropy(&state, &x, 2.0).unwrap() - 6.0 * 2f64.ln()).abs() < 1e-12);
}

#[test]
fn max_search_beats_the_verification_grid() {
    for seed in 0..3 {
        let state = random_state(4, seed, 1.0);
        let found = max_probability_search(&state, 8, 4, seed).unwrap();
        let mut grid_best = 0.0f64;
        let step = TWO_PI / 9.0;
        for i in 0..9 {
            for j in 0..9 {
                // alpha is a third grid axis, but cannot change a probability.
                for k in 0..9 {
                    let b = PauliBasis::uniform(4, SiteAngles::new(step * i as f64, step * j as f64, step * k as f64));
                    for c in 0..16 {
                        let p = probability(&state, &b, &SpinConfiguration::from_index(4, c), ProbabilityPath::AmplitudeSquared).unwrap();
                        grid_best = grid_best.max(p);
                    }
                }
            }
        }
        assert!(found.probability >= grid_best - 1e-12, "seed {seed}: {} < {grid_best}", found.probability);
        assert!(found.probability <= 1.0 + 1e-12);
        for a in found.basis.sites() {
            assert!(a.theta >= 0.0 && a.theta <= PI / 2.0 + 1e-12 && a.alpha == 0.0);
        }
        assert!((found.geometric_entanglement() + found.probability.ln()).abs() < 1e-15);
    }
}

#[test]
fn max_search_finds_product_states() {
    let state = pfaffamp_core::GaussianPureState::vacuum(5);
    let found = max_probability_search(&state, 4, 0, 1).unwrap();
    assert!((found.probability - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn det_ratio_equals_amplitude_squared(l in 1usize..=9, seed in any::<u64>(), k in any::<u64>()) {
        let state = random_state(l, seed, 1.0);
        let basis = random_basis(l, &mut rng(seed));
        let c = SpinConfiguration::from_index(l, k % (1 << l));
        let a = probability(&state, &basis, &c, ProbabilityPath::AmplitudeSquared).unwrap();
        let b = probability(&state, &basis, &c, ProbabilityPath::DetRatio).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-3));
    }

    #[test]
    fn alpha_never_changes_a_probability(l in 1usize..=8, seed in any::<u64>(), k in any::<u64>(),
                                         alphas in prop::collection::vec(-20.0f64..20.0, 8)) {
        let state = random_state(l, seed, 1.0);
        let plain = random_basis(l, &mut rng(seed));
        let twisted = PauliBasis::per_site(
            plain.sites().iter().zip(&alphas).map(|(a, &al)| SiteAngles::new(a.phi, a.theta, al)).collect(),
        );
        let c = SpinConfiguration::from_index(l, k % (1 << l));
        for path in [ProbabilityPath::AmplitudeSquared, ProbabilityPath::DetRatio] {
            let a = probability(&state, &plain, &c, path).unwrap();
            let b = probability(&state, &twisted, &c, path).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn marginals_sum_the_table(l in 2usize..=8, seed in any::<u64>(), mask in any::<u64>(), spins in any::<u64>()) {
        let state = random_state(l, seed, 1.0);
        let basis = random_basis(l, &mut rng(seed));
        let sites: Vec<usize> = (0..l).filter(|j| mask >> j & 1 == 1).collect();
        prop_assume!(!sites.is_empty());
        let outcome: Vec<Spin> = (0..sites.len()).map(|p| if spins >> p & 1 == 1 { Spin::Up } else { Spin::Down }).collect();
        let t = probability_table(&state, &basis, ProbabilityPath::AmplitudeSquared).unwrap();
        let want: f64 = (0..1u64 << l)
            .map(|k| SpinConfiguration::from_index(l, k))
            .filter(|c| sites.iter().zip(&outcome).all(|(&j, &s)| c.spin(j) == s))
            .map(|c| t.get(&c))
            .sum();
        let got = marginal_probability(&state, &basis, &SubregionOutcome::new(sites, outcome).unwrap()).unwrap();
        prop_assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn renyi_is_non_increasing(ps in prop::collection::vec(0.0f64..1.0, 2..40), a in 0.0f64..5.0, b in 0.0f64..5.0) {
        let total: f64 = ps.iter().sum();
        prop_assume!(total > 1e-6);
        let p: Vec<f64> = ps.iter().map(|x| x / total).collect();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(shannon_renyi_from_probabilities(&p, lo) >= shannon_renyi_from_probabilities(&p, hi) - 1e-12);
    }

    #[test]
    fn canonical_site_is_the_same_projector(phi in 0.0..TWO_PI, theta in -TWO_PI..2.0 * TWO_PI, up in any::<bool>()) {
        let s = if up { Spin::Up } else { Spin::Down };
        let (c, t) = canonical_site(SiteAngles::new(phi, theta, 0.0), s);
        prop_assert!(c.theta >= 0.0 && c.theta <= PI / 2.0 + 1e-12);
        // Same projector: the two bras agree up to a phase.
        let x = canonical_bras(SiteAngles::new(phi, theta, 0.0)).bra(s);
        let y = canonical_bras(c).bra(t);
        let overlap = x[0] * y[0].conj() + x[1] * y[1].conj();
        prop_assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }
}
