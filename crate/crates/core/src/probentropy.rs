//! Outcome probabilities, marginals, Shannon-Renyi entropies and the search
//! for the most probable product state.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amplitude::{m_entry, m_form_parts, PaddedProblem};
use crate::basis::{PauliBasis, SiteAngles, Spin, SpinConfiguration};
use crate::error::{Error, Result};
use crate::linalg::det;
use crate::state::GaussianPureState;

/// Default cap on `2^n` enumerations.
pub const ENUMERATION_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProbabilityPath {
    /// `|a_S|^2` from the Pfaffian amplitude.
    #[default]
    AmplitudeSquared,
    /// `2^{L mod 2} |det M| / det(1 + R^dagger R)^{1/2}` by LU, without any
    /// Pfaffian.
    DetRatio,
}

/// Probability of a full outcome string. Never depends on the `alpha`
/// angles, bit for bit.
pub fn probability(
    state: &GaussianPureState,
    basis: &PauliBasis,
    config: &SpinConfiguration,
    path: ProbabilityPath,
) -> Result<f64> {
    match path {
        ProbabilityPath::AmplitudeSquared => Ok(m_form_parts(state, basis, config)?.0.norm_sqr()),
        ProbabilityPath::DetRatio => {
            let p = PaddedProblem::new(state, basis, config)?;
            let n = p.len();
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            for i in 0..n {
                for j in i + 1..n {
                    let v = m_entry(p.r.get(i, j), i, j, &p.sites[i], &p.sites[j]);
                    m[(i, j)] = v;
                    m[(j, i)] = -v;
                }
            }
            let pad = if p.is_padded() { 2.0 } else { 1.0 };
            let n2 = state.norm() * state.norm();
            Ok(pad * det(&m).norm() / n2)
        }
    }
}

/// Deterministic pairwise (tree) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Outcome on a subset of sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubregionOutcome {
    sites: Vec<usize>,
    spins: Vec<Spin>,
}

impl SubregionOutcome {
    /// `sites` must be strictly increasing and non-empty.
    pub fn new(sites: Vec<usize>, spins: Vec<Spin>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidArgument("a subregion outcome needs at least one site".into()));
        }
        if sites.len() != spins.len() {
            return Err(Error::LengthMismatch { expected: sites.len(), found: spins.len() });
        }
        for w in sites.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::UnsortedIndices { prev: w[0], next: w[1] });
            }
        }
        Ok(SubregionOutcome { sites, spins })
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }
}

/// Marginal probability of an outcome on a subregion, summing over the rest.
pub fn marginal_probability(
    state: &GaussianPureState,
    basis: &PauliBasis,
    outcome: &SubregionOutcome,
) -> Result<f64> {
    let l = state.len();
    if let Some(&last) = outcome.sites.last() {
        if last >= l {
            return Err(Error::IndexOutOfRange { index: last, dim: l });
        }
    }
    let free: Vec<usize> = (0..l).filter(|j| !outcome.sites.contains(j)).collect();
    if free.len() > ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit { sites: free.len(), limit: ENUMERATION_LIMIT });
    }
    let mut spins = alloc::vec![Spin::Down; l];
    for (&j, &s) in outcome.sites.iter().zip(&outcome.spins) {
        spins[j] = s;
    }
    let mut values = Vec::with_capacity(1 << free.len());
    for k in 0..1u64 << free.len() {
        for (p, &j) in free.iter().enumerate() {
            spins[j] = if k >> (free.len() - 1 - p) & 1 == 1 { Spin::Up } else { Spin::Down };
        }
        let c = SpinConfiguration::new(spins.clone());
        values.push(probability(state, basis, &c, ProbabilityPath::AmplitudeSquared)?);
    }
    Ok(pairwise_sum(&values))
}

/// Probabilities of all `2^L` outcomes, indexed by
/// [`SpinConfiguration::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    len: usize,
    probabilities: Vec<f64>,
}

impl ProbabilityTable {
    pub fn new(len: usize, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != 1usize << len {
            return Err(Error::LengthMismatch { expected: 1 << len, found: probabilities.len() });
        }
        Ok(ProbabilityTable { len, probabilities })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, config: &SpinConfiguration) -> f64 {
        self.probabilities[config.index() as usize]
    }

    pub fn total(&self) -> f64 {
        pairwise_sum(&self.probabilities)
    }

    pub fn entropy(&self, alpha: f64) -> f64 {
        shannon_renyi_from_probabilities(&self.probabilities, alpha)
    }
}

pub fn check_enumeration(len: usize, limit: usize) -> Result<()> {
    if len > limit {
        Err(Error::EnumerationLimit { sites: len, limit })
    } else {
        Ok(())
    }
}

/// All outcome probabilities, sequentially. Refuses `L` above
/// [`ENUMERATION_LIMIT`].
pub fn probability_table(
    state: &GaussianPureState,
    basis: &PauliBasis,
    path: ProbabilityPath,
) -> Result<ProbabilityTable> {
    let l = state.len();
    check_enumeration(l, ENUMERATION_LIMIT)?;
    let probabilities = (0..1u64 << l)
        .map(|k| probability(state, basis, &SpinConfiguration::from_index(l, k), path))
        .collect::<Result<Vec<_>>>()?;
    ProbabilityTable::new(l, probabilities)
}

/// `ln(sum p^alpha) / (1 - alpha)`, or `-sum p ln p` at `alpha = 1`.
/// Natural logarithm; zero probabilities are skipped.
pub fn shannon_renyi_from_probabilities(probabilities: &[f64], alpha: f64) -> f64 {
    let terms: Vec<f64> = if (alpha - 1.0).abs() < 1e-12 {
        probabilities.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).collect()
    } else {
        probabilities.iter().filter(|&&p| p > 0.0).map(|&p| p.powf(alpha)).collect()
    };
    let s = pairwise_sum(&terms);
    if (alpha - 1.0).abs() < 1e-12 {
        s
    } else {
        s.ln() / (1.0 - alpha)
    }
}

/// Shannon-Renyi entropy of the outcome distribution in `basis`.
pub fn shannon_renyi_entropy(state: &GaussianPureState, basis: &PauliBasis, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("Renyi index must be >= 0, got {alpha}")));
    }
    Ok(probability_table(state, basis, ProbabilityPath::AmplitudeSquared)?.entropy(alpha))
}

/// Result of [`max_probability_search`]: the product state maximising the
/// overlap, written with `theta in [0, pi/2]`, `phi in [0, 2pi)`, `alpha = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxProbability {
    pub basis: PauliBasis,
    pub config: SpinConfiguration,
    pub probability: f64,
}

impl MaxProbability {
    /// Geometric entanglement `-ln p_max`.
    pub fn geometric_entanglement(&self) -> f64 {
        -self.probability.ln()
    }
}

/// Same product state with `theta` in `[0, pi/2]`: reflect `theta` into
/// `[0, pi]` (shifting `phi` by `pi`), then swap the outcome label if
/// `theta > pi/2` (`theta -> pi - theta`, `phi -> phi + pi`).
pub fn canonical_site(a: SiteAngles, s: Spin) -> (SiteAngles, Spin) {
    let c = a.canonical();
    let (mut phi, mut theta, mut spin) = (c.phi, c.theta, s);
    if theta > PI {
        theta = 2.0 * PI - theta;
        phi += PI;
    }
    if theta > 0.5 * PI {
        theta = PI - theta;
        phi += PI;
        spin = spin.flipped();
    }
    (SiteAngles::new(phi, theta, 0.0).canonical(), spin)
}

/// Maximises `|<S|R>|^2` over all product states.
///
/// Seeds: every uniform basis on the grid `phi, theta in {2 pi k / res}`
/// combined with every outcome string (all-plus and all-minus only once
/// `L > 12`), plus `restarts` random per-site seeds. The best seed is refined
/// by coordinate pattern search on each site's `(phi, theta)`.
pub fn max_probability_search(
    state: &GaussianPureState,
    grid_resolution: usize,
    restarts: usize,
    seed: u64,
) -> Result<MaxProbability> {
    let l = state.len();
    if grid_resolution == 0 {
        return Err(Error::InvalidArgument("grid resolution must be at least 1".into()));
    }
    let prob = |b: &PauliBasis, c: &SpinConfiguration| probability(state, b, c, ProbabilityPath::AmplitudeSquared);

    let configs: Vec<SpinConfiguration> = if l <= 12 {
        (0..1u64 << l).map(|k| SpinConfiguration::from_index(l, k)).collect()
    } else {
        alloc::vec![SpinConfiguration::uniform(l, Spin::Up), SpinConfiguration::uniform(l, Spin::Down)]
    };
    let step = 2.0 * PI / grid_resolution as f64;
    let mut best: Option<(PauliBasis, SpinConfiguration, f64)> = None;
    let mut consider = |b: PauliBasis, c: SpinConfiguration, p: f64| {
        if best.as_ref().is_none_or(|x| p > x.2) {
            best = Some((b, c, p));
        }
    };
    for i in 0..grid_resolution {
        for k in 0..grid_resolution {
            let b = PauliBasis::uniform(l, SiteAngles::new(step * i as f64, step * k as f64, 0.0));
            for c in &configs {
                let p = prob(&b, c)?;
                consider(b.clone(), c.clone(), p);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        let b = PauliBasis::per_site(
            (0..l)
                .map(|_| SiteAngles::new(rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..PI), 0.0))
                .collect(),
        );
        let c = SpinConfiguration::uniform(l, Spin::Up);
        let p = prob(&b, &c)?;
        consider(b, c, p);
    }
    let (mut angles, config, mut p) = best.map(|(b, c, p)| (b.sites().to_vec(), c, p)).expect("grid is non-empty");

    // Coordinate pattern search with a shrinking step.
    let mut h = step;
    while h > 1e-9 {
        let mut improved = true;
        while improved {
            improved = false;
            for j in 0..l {
                for (dphi, dtheta) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h), (h, h), (-h, -h), (h, -h), (-h, h)] {
                    let mut trial = angles.clone();
                    trial[j].phi += dphi;
                    trial[j].theta += dtheta;
                    let q = prob(&PauliBasis::per_site(trial.clone()), &config)?;
                    if q > p * (1.0 + 1e-15) {
                        p = q;
                        angles = trial;
                        improved = true;
                    }
                }
            }
        }
        h *= 0.5;
    }

    let (sites, spins): (Vec<SiteAngles>, Vec<Spin>) =
        angles.iter().zip(config.spins()).map(|(a, s)| canonical_site(*a, *s)).unzip();
    let basis = PauliBasis::per_site(sites);
    let config = SpinConfiguration::new(spins);
    let probability = prob(&basis, &config)?;
    Ok(MaxProbability { basis, config, probability })
}
