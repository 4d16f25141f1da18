//! Entanglement left in an unmeasured region after a product measurement.
//!
//! The ring is cut into contiguous blocks `A1, B1, A2, B2` in cyclic order.
//! `B = B1 u B2` is measured in a Pauli basis; the conditional state of
//! `A = A1 u A2` is built from `2^{|A|}` joint amplitudes, and the Renyi
//! entropy of `A1` is reported as a function of the separation `d = |B1|`.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::amplitude::amplitude_m_form;
use crate::basis::{PauliBasis, SiteAngles, Spin, SpinConfiguration};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, singular_values};
use crate::probentropy::pairwise_sum;
use crate::state::GaussianPureState;

/// Largest `|A|` accepted by [`condition_on_outcome`].
pub const MAX_UNMEASURED: usize = 16;

/// Eigenvalues of `rho` below this are dropped before taking logs.
pub const EIGENVALUE_CLAMP: f64 = 1e-14;

/// Schmidt coefficients below this fraction of the largest are treated as
/// round-off (their squares sit below `1e-28`).
pub const SCHMIDT_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementGeometry {
    len: usize,
    a1: Vec<usize>,
    b1: Vec<usize>,
    a2: Vec<usize>,
    b2: Vec<usize>,
}

impl MeasurementGeometry {
    /// `A1 = [0, a1)`, then `d` sites of `B1`, `a2` sites of `A2`, and the
    /// remaining sites as `B2`.
    pub fn ring(len: usize, a1: usize, a2: usize, d: usize) -> Result<Self> {
        if a1 == 0 || a2 == 0 {
            return Err(Error::InvalidArgument("A1 and A2 must be non-empty".into()));
        }
        if a1 + d + a2 > len {
            return Err(Error::InvalidArgument(alloc::format!(
                "blocks |A1|={a1}, d={d}, |A2|={a2} do not fit on a ring of {len} sites"
            )));
        }
        let mut next = 0;
        let mut take = |n: usize| {
            let v: Vec<usize> = (next..next + n).collect();
            next += n;
            v
        };
        let a1v = take(a1);
        let b1v = take(d);
        let a2v = take(a2);
        let b2v = take(len - a1 - d - a2);
        Ok(MeasurementGeometry { len, a1: a1v, b1: b1v, a2: a2v, b2: b2v })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn distance(&self) -> usize {
        self.b1.len()
    }

    pub fn a1(&self) -> &[usize] {
        &self.a1
    }

    pub fn a2(&self) -> &[usize] {
        &self.a2
    }

    pub fn b1(&self) -> &[usize] {
        &self.b1
    }

    pub fn b2(&self) -> &[usize] {
        &self.b2
    }

    /// `A1` followed by `A2`.
    pub fn a_sites(&self) -> Vec<usize> {
        self.a1.iter().chain(&self.a2).copied().collect()
    }

    /// `B1` followed by `B2`.
    pub fn b_sites(&self) -> Vec<usize> {
        self.b1.iter().chain(&self.b2).copied().collect()
    }
}

/// Normalised state of `A` given the outcome on `B`. Index `k` of the
/// amplitude vector lists `A1` then `A2`, first site most significant, bit 1
/// for `+`.
#[derive(Debug, Clone, PartialEq)]
pub struct PostMeasurementState {
    pub amplitudes: Vec<Complex64>,
    pub probability: f64,
    pub outcome: Vec<Spin>,
    a1_len: usize,
    a2_len: usize,
}

impl PostMeasurementState {
    /// `Psi` with rows indexed by `A1` and columns by `A2`.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let cols = 1usize << self.a2_len;
        DMatrix::from_fn(1 << self.a1_len, cols, |i, j| self.amplitudes[i * cols + j])
    }
}

/// Conditions on `outcome_b` (listed in `B1` then `B2` order).
pub fn condition_on_outcome(
    state: &GaussianPureState,
    basis: &PauliBasis,
    geometry: &MeasurementGeometry,
    outcome_b: &[Spin],
) -> Result<PostMeasurementState> {
    let l = state.len();
    if geometry.len() != l {
        return Err(Error::LengthMismatch { expected: l, found: geometry.len() });
    }
    let a = geometry.a_sites();
    let b = geometry.b_sites();
    if outcome_b.len() != b.len() {
        return Err(Error::LengthMismatch { expected: b.len(), found: outcome_b.len() });
    }
    if a.len() > MAX_UNMEASURED {
        return Err(Error::EnumerationLimit { sites: a.len(), limit: MAX_UNMEASURED });
    }
    let mut spins = alloc::vec![Spin::Down; l];
    for (&j, &s) in b.iter().zip(outcome_b) {
        spins[j] = s;
    }
    let n = a.len();
    let mut amplitudes = Vec::with_capacity(1 << n);
    for k in 0..1u64 << n {
        for (p, &j) in a.iter().enumerate() {
            spins[j] = if k >> (n - 1 - p) & 1 == 1 { Spin::Up } else { Spin::Down };
        }
        amplitudes.push(amplitude_m_form(state, basis, &SpinConfiguration::new(spins.clone()))?);
    }
    let weights: Vec<f64> = amplitudes.iter().map(|z| z.norm_sqr()).collect();
    let probability = pairwise_sum(&weights);
    if !(probability >= 1e-300) {
        return Err(Error::ZeroProbability(probability));
    }
    let inv = 1.0 / probability.sqrt();
    amplitudes.iter_mut().for_each(|z| *z *= inv);
    Ok(PostMeasurementState {
        amplitudes,
        probability,
        outcome: outcome_b.to_vec(),
        a1_len: geometry.a1().len(),
        a2_len: geometry.a2().len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensityMatrix {
    pub matrix: DMatrix<Complex64>,
}

impl ReducedDensityMatrix {
    /// Eigenvalues in ascending order, negatives from round-off set to 0.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix).into_iter().map(|x| x.max(0.0)).collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

/// `rho_A1 = Psi Psi^dagger`.
pub fn reduced_density_matrix(pm: &PostMeasurementState) -> ReducedDensityMatrix {
    let psi = pm.matrix();
    ReducedDensityMatrix { matrix: &psi * psi.adjoint() }
}

/// Renyi entropy from a spectrum that sums to one, eigenvalues below
/// [`EIGENVALUE_CLAMP`] dropped. `alpha = 1` gives von Neumann.
pub fn renyi_from_eigenvalues(eigenvalues: &[f64], alpha: f64) -> f64 {
    let kept: Vec<f64> = eigenvalues.iter().copied().filter(|&x| x >= EIGENVALUE_CLAMP).collect();
    let e = if alpha == 1.0 {
        pairwise_sum(&kept.iter().map(|&x| -x * x.ln()).collect::<Vec<_>>())
    } else {
        pairwise_sum(&kept.iter().map(|&x| x.powf(alpha)).collect::<Vec<_>>()).ln() / (1.0 - alpha)
    };
    e.max(0.0)
}

/// Renyi entanglement entropy of `rho` (natural log).
pub fn renyi_entropy(rho: &ReducedDensityMatrix, alpha: f64) -> f64 {
    renyi_from_eigenvalues(&rho.eigenvalues(), alpha)
}

/// Entanglement spectrum of `A1` from the singular values of `Psi`,
/// descending, normalised to sum to one. Small values are resolved to
/// `~1e-28` rather than the `~1e-16` limit of diagonalising `rho`.
pub fn schmidt_spectrum(pm: &PostMeasurementState) -> Vec<f64> {
    let sv = singular_values(&pm.matrix());
    let Some(&top) = sv.first() else { return Vec::new() };
    let kept: Vec<f64> = sv.into_iter().filter(|&s| s > SCHMIDT_FLOOR * top).map(|s| s * s).collect();
    let total = pairwise_sum(&kept);
    kept.into_iter().map(|x| x / total).collect()
}

/// Renyi entropy of a descending spectrum, accurate when every eigenvalue
/// but the first is tiny: with `delta` the sum of the others,
/// `ln((1 - delta)^alpha + sum lambda^alpha) / (1 - alpha)` is evaluated
/// with `log1p`/`expm1`.
pub fn renyi_from_spectrum(spectrum: &[f64], alpha: f64) -> f64 {
    if spectrum.len() <= 1 {
        return 0.0;
    }
    let tail = &spectrum[1..];
    let delta = pairwise_sum(tail);
    let e = if alpha == 1.0 {
        let t: Vec<f64> = tail.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).collect();
        pairwise_sum(&t) - (1.0 - delta) * (-delta).ln_1p()
    } else {
        let t: Vec<f64> = tail.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(alpha)).collect();
        ((alpha * (-delta).ln_1p()).exp_m1() + pairwise_sum(&t)).ln_1p() / (1.0 - alpha)
    };
    e.max(0.0)
}

/// Outcome strings on `B1` and `B2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomePattern {
    AllPlus,
    AllMinus,
    /// `+` on `B1`, `-` on `B2`.
    PlusMinus,
    /// `+-+-...` on both blocks.
    Alternating,
    /// `+-+-...` on `B1`, `+` on `B2`.
    AlternatingPlus,
}

fn alternating(n: usize) -> Result<Vec<Spin>> {
    if n % 2 == 1 {
        return Err(Error::InvalidArgument(alloc::format!(
            "alternating outcome needs an even block, got {n} sites"
        )));
    }
    Ok((0..n).map(|k| if k % 2 == 0 { Spin::Up } else { Spin::Down }).collect())
}

impl OutcomePattern {
    /// The outcome in `B1` then `B2` order.
    pub fn outcome(self, b1: usize, b2: usize) -> Result<Vec<Spin>> {
        let fill = |n: usize, s: Spin| alloc::vec![s; n];
        let (x, y) = match self {
            OutcomePattern::AllPlus => (fill(b1, Spin::Up), fill(b2, Spin::Up)),
            OutcomePattern::AllMinus => (fill(b1, Spin::Down), fill(b2, Spin::Down)),
            OutcomePattern::PlusMinus => (fill(b1, Spin::Up), fill(b2, Spin::Down)),
            OutcomePattern::Alternating => (alternating(b1)?, alternating(b2)?),
            OutcomePattern::AlternatingPlus => (alternating(b1)?, fill(b2, Spin::Up)),
        };
        Ok(x.into_iter().chain(y).collect())
    }
}

/// A measurement setting: one basis on every site plus an outcome pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSetting {
    pub basis: SiteAngles,
    pub pattern: OutcomePattern,
}

/// Named settings. `z-all-minus` is the outcome aligned with the field of
/// the Ising Hamiltonian used here; `z-all-plus` is anti-aligned.
pub fn named_setting(name: &str) -> Option<ScanSetting> {
    let (basis, pattern) = match name {
        "z-all-plus" => (SiteAngles::Z, OutcomePattern::AllPlus),
        "z-all-minus" => (SiteAngles::Z, OutcomePattern::AllMinus),
        "x-all-plus" => (SiteAngles::X, OutcomePattern::AllPlus),
        "x-plus-minus" => (SiteAngles::X, OutcomePattern::PlusMinus),
        "x-alternating" => (SiteAngles::X, OutcomePattern::Alternating),
        "x-alternating-plus" => (SiteAngles::X, OutcomePattern::AlternatingPlus),
        _ => return None,
    };
    Some(ScanSetting { basis, pattern })
}

pub const SETTING_NAMES: [&str; 6] =
    ["z-all-plus", "z-all-minus", "x-all-plus", "x-plus-minus", "x-alternating", "x-alternating-plus"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub len: usize,
    pub d: usize,
    pub alpha: f64,
    pub entropy: f64,
    pub p_outcome: f64,
}

/// Entropies at one separation `d`, one row per `alpha`.
pub fn scan_point(
    state: &GaussianPureState,
    setting: ScanSetting,
    alphas: &[f64],
    d: usize,
    a1: usize,
    a2: usize,
) -> Result<Vec<ScanRow>> {
    let l = state.len();
    for &alpha in alphas {
        if !(alpha > 0.0) {
            return Err(Error::InvalidArgument(alloc::format!("Renyi index must be > 0, got {alpha}")));
        }
    }
    let g = MeasurementGeometry::ring(l, a1, a2, d)?;
    let outcome = setting.pattern.outcome(g.b1().len(), g.b2().len())?;
    let basis = PauliBasis::uniform(l, setting.basis);
    let pm = condition_on_outcome(state, &basis, &g, &outcome)?;
    let spectrum = schmidt_spectrum(&pm);
    Ok(alphas
        .iter()
        .map(|&alpha| ScanRow {
            len: l,
            d,
            alpha,
            entropy: renyi_from_spectrum(&spectrum, alpha),
            p_outcome: pm.probability,
        })
        .collect())
}

/// Rows for every `d` in order, then every `alpha`.
pub fn decay_scan(
    state: &GaussianPureState,
    setting: ScanSetting,
    alphas: &[f64],
    d_values: &[usize],
    a1: usize,
    a2: usize,
) -> Result<Vec<ScanRow>> {
    let mut rows = Vec::new();
    for &d in d_values {
        rows.extend(scan_point(state, setting, alphas, d, a1, a2)?);
    }
    Ok(rows)
}

/// Straight-line least squares `y = intercept + slope x`, with the sum of
/// squared residuals.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    (slope, intercept, residual)
}

fn window_points(rows: &[ScanRow], alpha: f64, window: (usize, usize)) -> Result<Vec<(f64, f64)>> {
    let mut pts: Vec<(usize, f64)> = rows
        .iter()
        .filter(|r| (r.alpha - alpha).abs() < 1e-12 && r.d >= window.0 && r.d <= window.1)
        .map(|r| (r.d, r.entropy))
        .collect();
    pts.sort_by_key(|p| p.0);
    pts.dedup_by_key(|p| p.0);
    if pts.len() < 4 {
        return Err(Error::TooFewPoints { need: 4, got: pts.len() });
    }
    for &(d, e) in &pts {
        if !(e > 0.0) {
            return Err(Error::NonPositive { d, value: e });
        }
    }
    Ok(pts.into_iter().map(|(d, e)| (d as f64, e.ln())).collect())
}

/// Power-law fit `E ~ d^{-eta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub alpha: f64,
    pub eta: f64,
    pub delta1: f64,
    /// Sum of squared residuals of `ln E`.
    pub residual: f64,
    pub window: (usize, usize),
    pub points: usize,
}

/// `Delta_1 = eta / (4 alpha)` for `alpha < 1`, `eta / 4` otherwise.
pub fn delta_from_eta(eta: f64, alpha: f64) -> f64 {
    if alpha < 1.0 {
        eta / (4.0 * alpha)
    } else {
        eta / 4.0
    }
}

/// Least-squares slope of `ln E` against `ln d` over `window` (inclusive).
pub fn fit_decay_exponent(rows: &[ScanRow], alpha: f64, window: (usize, usize)) -> Result<DecayFit> {
    let pts = window_points(rows, alpha, window)?;
    let x: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (slope, _, residual) = linear_fit(&x, &y);
    let eta = -slope;
    Ok(DecayFit { alpha, eta, delta1: delta_from_eta(eta, alpha), residual, window, points: pts.len() })
}

/// Exponential fit `E ~ e^{-d / xi}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    pub rate: f64,
    pub residual: f64,
    pub points: usize,
}

pub fn fit_exponential_decay(rows: &[ScanRow], alpha: f64, window: (usize, usize)) -> Result<ExponentialFit> {
    let pts = window_points(rows, alpha, window)?;
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (slope, _, residual) = linear_fit(&x, &y);
    Ok(ExponentialFit { rate: -slope, residual, points: pts.len() })
}

/// Intercept of a straight-line fit of `value` against `1/L`.
pub fn extrapolate_inverse_size(points: &[(usize, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints { need: 2, got: points.len() });
    }
    let x: Vec<f64> = points.iter().map(|p| 1.0 / p.0 as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    Ok(linear_fit(&x, &y).1)
}

/// The default window `[4, L/8]`.
pub fn default_window(len: usize) -> (usize, usize) {
    (4, len / 8)
}
