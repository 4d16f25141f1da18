//! Invariant suite behind `pfaffamp validate`. Every check draws its own
//! random instances from `(seed, check, trial)`, so results do not depend on
//! the order or the number of threads.

use std::f64::consts::{FRAC_PI_2, PI};

use pfaffamp_core::amplitude::{amplitude_relations_check, amplitude_tan_form_mutated, DomainWallFrame, TAN_SINGULAR_BAND};
use pfaffamp_core::oracle::{dense_from_gaussian, oracle_amplitudes_all};
use pfaffamp_core::probentropy::{probability, probability_table, ProbabilityPath};
use pfaffamp_core::recursion::{recursive_amplitude_with, RecursionVariant, SubAmplitudeEngine};
use pfaffamp_core::skewlin::{lieb_odd_extension, lieb_shifted_pfaffian, sub_pfaffian, IndexSubset};
use pfaffamp_core::state::random_skew;
use pfaffamp_core::{
    amplitude_m_form, random_state, Complex64, GaussianPureState, PauliBasis, SiteAngles, SpinConfiguration,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Deliberate faults used to confirm that the suite detects errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mutation {
    /// Flip the sign of the tan-product term of the tan form.
    Eq9Sign,
}

#[derive(Debug, Clone)]
pub struct ValidateConfig {
    pub seeds: Vec<u64>,
    pub trials: usize,
    pub max_len: usize,
    pub mutation: Option<Mutation>,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig { seeds: vec![1], trials: 100, max_len: 8, mutation: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub seed: u64,
    pub residual: f64,
    pub tolerance: f64,
    pub instances: usize,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

type CheckFn = fn(&mut ChaCha8Rng, usize, &ValidateConfig) -> f64;

struct Check {
    name: &'static str,
    tolerance: f64,
    applies: fn(usize) -> bool,
    run: CheckFn,
}

fn any(_: usize) -> bool {
    true
}

fn pairs(l: usize) -> bool {
    l >= 2
}

fn even(l: usize) -> bool {
    l % 2 == 0
}

fn odd(l: usize) -> bool {
    l % 2 == 1
}

fn four(l: usize) -> bool {
    l == 4
}

const CHECKS: &[Check] = &[
    Check { name: "m-form vs dense oracle", tolerance: 1e-9, applies: any, run: m_form_vs_oracle },
    Check { name: "tan-form vs m-form", tolerance: 1e-9, applies: any, run: tan_vs_m },
    Check { name: "quarter-turn identity", tolerance: 1e-12, applies: any, run: quarter_turn },
    Check { name: "recursion", tolerance: 1e-9, applies: pairs, run: recursion_theorem },
    Check { name: "alternative recursion", tolerance: 1e-9, applies: pairs, run: recursion_alternative },
    Check { name: "four-site relations", tolerance: 1e-10, applies: four, run: relations },
    Check { name: "Lieb formula (even)", tolerance: 1e-9, applies: even, run: lieb_any },
    Check { name: "Lieb formula (odd)", tolerance: 1e-9, applies: odd, run: lieb_any },
    Check { name: "probability completeness", tolerance: 1e-9, applies: any, run: completeness },
    Check { name: "det ratio vs |amplitude|^2", tolerance: 1e-9, applies: any, run: det_ratio },
    Check { name: "domain-wall route", tolerance: 1e-9, applies: pairs, run: domain_wall },
];

fn instance_rng(seed: u64, check: usize, trial: usize) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(check as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(trial as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn angles(rng: &mut ChaCha8Rng) -> SiteAngles {
    SiteAngles::new(rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI))
}

fn basis(rng: &mut ChaCha8Rng, l: usize) -> PauliBasis {
    PauliBasis::per_site((0..l).map(|_| angles(rng)).collect())
}

fn state(rng: &mut ChaCha8Rng, l: usize) -> GaussianPureState {
    let scale = rng.random_range(0.2..2.0);
    random_state(l, rng.random(), scale)
}

fn configs(l: usize) -> impl Iterator<Item = SpinConfiguration> {
    (0..1u64 << l).map(move |k| SpinConfiguration::from_index(l, k))
}

/// `max` that turns a NaN into a failure instead of dropping it.
fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::INFINITY
    } else {
        a.max(b)
    }
}

fn m_form_vs_oracle(rng: &mut ChaCha8Rng, l: usize, _: &ValidateConfig) -> f64 {
    let s = state(rng, l);
    let b = basis(rng, l);
    let Ok(oracle) = dense_from_gaussian(&s).and_then(|d| oracle_amplitudes_all(&d, &b)) else {
        return f64::INFINITY;
    };
    configs(l)
        .map(|c| match amplitude_m_form(&s, &b, &c) {
            Ok(a) => (a - oracle[c.index() as usize]).norm(),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, worst)
}

fn tan_vs_m(rng: &mut ChaCha8Rng, l: usize, cfg: &ValidateConfig) -> f64 {
    let s = state(rng, l);
    // Keep theta clear of the singular band.
    let sites = (0..l)
        .map(|_| loop {
            let a = angles(rng);
            let t = a.theta;
            if t.min((t - PI).abs()).min(2.0 * PI - t) > 1e3 * TAN_SINGULAR_BAND {
                break a;
            }
        })
        .collect();
    let b = PauliBasis::per_site(sites);
    let sign = if cfg.mutation == Some(Mutation::Eq9Sign) { -1.0 } else { 1.0 };
    configs(l)
        .map(|c| match (amplitude_tan_form_mutated(&s, &b, &c, sign), amplitude_m_form(&s, &b, &c)) {
            (Ok(t), Ok(m)) => (t - m).norm() / m.norm().max(1e-3),
            _ => f64::INFINITY,
        })
        .fold(0.0, worst)
}

fn quarter_turn(rng: &mut ChaCha8Rng, l: usize, _: &ValidateConfig) -> f64 {
    let s = state(rng, l);
    let neg = GaussianPureState::new(s.r_matrix().scaled(Complex64::new(-1.0, 0.0)));
    let b = basis(rng, l);
    let turned = PauliBasis::per_site(b.sites().iter().map(|a| SiteAngles::new(a.phi + FRAC_PI_2, a.theta, a.alpha)).collect());
    configs(l)
        .map(|c| match (amplitude_m_form(&neg, &b, &c), amplitude_m_form(&s, &turned, &c)) {
            (Ok(x), Ok(y)) => (x - y).norm(),
            _ => f64::INFINITY,
        })
        .fold(0.0, worst)
}

fn recursion(rng: &mut ChaCha8Rng, l: usize, variant: RecursionVariant) -> f64 {
    let s = state(rng, l);
    let b = basis(rng, l);
    configs(l)
        .map(|c| {
            match (
                recursive_amplitude_with(&s, &b, &c, variant, SubAmplitudeEngine::Full),
                amplitude_m_form(&s, &b, &c),
            ) {
                (Ok(x), Ok(y)) => (x - y).norm(),
                _ => f64::INFINITY,
            }
        })
        .fold(0.0, worst)
}

fn recursion_theorem(rng: &mut ChaCha8Rng, l: usize, _: &ValidateConfig) -> f64 {
    recursion(rng, l, RecursionVariant::Theorem)
}

fn recursion_alternative(rng: &mut ChaCha8Rng, l: usize, _: &ValidateConfig) -> f64 {
    recursion(rng, l, RecursionVariant::Alternative)
}

fn relations(rng: &mut ChaCha8Rng, l: usize, _: &ValidateConfig) -> f64 {
    let s = state(rng, l);
    let b = PauliBasis::uniform(l, SiteAngles::new(rng.random_range(0.0..2.0 * PI), FRAC_PI_2, 0.0));
    amplitude_relations_check(&s, &b).map(|r| r.max()).unwrap_or(f64::INFINITY)
}

/// `sum_{even I} pf(m_I) prod_{j not in I} lambda_j` by enumeration.
fn lieb_subset_sum(m: &pfaffamp_core::SkewMatrix, lambdas: &[Complex64]) -> Complex64 {
    let n = lambdas.len();
    (0..1u64 << n)
        .filter(|mask| mask.count_ones() % 2 == 0)
        .map(|mask| {
            let prod: Complex64 = (0..n).filter(|j| mask >> j & 1 == 0).map(|j| lambdas[j]).product();
            sub_pfaffian(m, &IndexSubset::from_mask(n, mask)).unwrap_or_default() * prod
        })
        .sum()
}

fn lieb(rng: &mut ChaCha8Rng, n: usize) -> f64 {
    let m = random_skew(n, rng.random(), 1.0);
    let lambdas: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
    let direct = if n % 2 == 0 { lieb_shifted_pfaffian(&m, &lambdas) } else { lieb_odd_extension(&m, &lambdas) };
    let sum = lieb_subset_sum(&m, &lambdas);
    match direct {
        Ok(d) => (d - sum).norm() / sum.norm().max(1.0),
        Err(_) => f64::INFINITY,
    }
}

fn lieb_any(rng: &mut ChaCha8Rng, l: usize, _: &ValidateConfig) -> f64 {
    lieb(rng, l)
}

fn completeness(rng: &mut ChaCha8Rng, l: usize, _: &ValidateConfig) -> f64 {
    let s = state(rng, l);
    let b = basis(rng, l);
    [ProbabilityPath::AmplitudeSquared, ProbabilityPath::DetRatio]
        .into_iter()
        .map(|p| probability_table(&s, &b, p).map(|t| (t.total() - 1.0).abs()).unwrap_or(f64::INFINITY))
        .fold(0.0, worst)
}

fn det_ratio(rng: &mut ChaCha8Rng, l: usize, _: &ValidateConfig) -> f64 {
    let s = state(rng, l);
    let b = basis(rng, l);
    configs(l)
        .map(|c| {
            match (
                probability(&s, &b, &c, ProbabilityPath::DetRatio),
                probability(&s, &b, &c, ProbabilityPath::AmplitudeSquared),
            ) {
                (Ok(x), Ok(y)) => (x - y).abs(),
                _ => f64::INFINITY,
            }
        })
        .fold(0.0, worst)
}

fn domain_wall(rng: &mut ChaCha8Rng, l: usize, _: &ValidateConfig) -> f64 {
    let s = state(rng, l);
    let phi = rng.random_range(0.0..2.0 * PI);
    let b = PauliBasis::uniform(l, SiteAngles::new(phi, FRAC_PI_2, 0.0));
    let Ok(frame) = DomainWallFrame::new(&s, phi) else { return f64::INFINITY };
    configs(l)
        .map(|c| match (frame.amplitude(&c), amplitude_m_form(&s, &b, &c)) {
            (Ok(x), Ok(y)) => (x - y).norm(),
            _ => f64::INFINITY,
        })
        .fold(0.0, worst)
}

/// Runs every check for every seed: `trials` instances for each size
/// `L <= max_len` the check applies to.
pub fn run(cfg: &ValidateConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for &seed in &cfg.seeds {
        for (index, check) in CHECKS.iter().enumerate() {
            let sizes: Vec<usize> = (1..=cfg.max_len).filter(|&l| (check.applies)(l)).collect();
            let jobs: Vec<(usize, usize)> =
                sizes.iter().flat_map(|&l| (0..cfg.trials).map(move |t| (l, t))).collect();
            let residual = jobs
                .par_iter()
                .map(|&(l, t)| {
                    let mut rng = instance_rng(seed, index, t * 64 + l);
                    (check.run)(&mut rng, l, cfg)
                })
                .reduce(|| 0.0, worst);
            out.push(CheckResult {
                name: check.name,
                seed,
                residual,
                tolerance: check.tolerance,
                instances: jobs.len(),
            });
        }
    }
    out
}
