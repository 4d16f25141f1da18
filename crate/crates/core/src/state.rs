//! Fermionic Gaussian pure states in the `R`-matrix representation.
//!
//! With base configuration `C`, the amplitude of the occupation string `I` is
//! `sgn(C, I) pf(R restricted to sites where I and C differ) / N_R` with
//! `N_R = det(1 + R^dagger R)^{1/4}`. For the vacuum base this reduces to
//! `pf(R_I) / N_R` with `I` the occupied sites.

use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::log_det_hpd;
use crate::skewlin::{pfaffian, SkewMatrix};

/// Base configurations whose amplitude falls below this are refused.
pub const BASE_AMPLITUDE_FLOOR: f64 = 1e-12;

/// Occupation numbers `n_1 ... n_L`; as an index, site 0 is the most
/// significant bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FermionConfiguration {
    bits: Vec<bool>,
}

impl FermionConfiguration {
    pub fn new(bits: Vec<bool>) -> Self {
        FermionConfiguration { bits }
    }

    pub fn vacuum(len: usize) -> Self {
        FermionConfiguration { bits: alloc::vec![false; len] }
    }

    pub fn from_index(len: usize, index: u64) -> Self {
        FermionConfiguration { bits: (0..len).map(|j| index >> (len - 1 - j) & 1 == 1).collect() }
    }

    pub fn index(&self) -> u64 {
        self.bits.iter().fold(0u64, |acc, b| (acc << 1) | u64::from(*b))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_vacuum(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    pub fn occupied(&self, j: usize) -> bool {
        self.bits[j]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn occupied_sites(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.bits[j]).collect()
    }

    /// Sites where `self` and `other` differ.
    pub fn difference(&self, other: &Self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.bits[j] != other.bits[j]).collect()
    }

    pub fn with_flipped(&self, sites: &[usize]) -> Self {
        let mut bits = self.bits.clone();
        for &j in sites {
            bits[j] = !bits[j];
        }
        FermionConfiguration { bits }
    }
}

impl fmt::Display for FermionConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// `sgn(C, I) = prod_{i >= 2} (-1)^{|n_i - m_i| sum_{j<i} n_j}` with `n`
/// the occupations of `C` and `m` those of `I`.
pub fn relative_sign(c: &FermionConfiguration, i: &FermionConfiguration) -> f64 {
    let mut exponent = 0usize;
    let mut filled = 0usize;
    for k in 0..c.len() {
        if c.bits[k] != i.bits[k] {
            exponent += filled;
        }
        filled += usize::from(c.bits[k]);
    }
    if exponent % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `N_R = det(1 + R^dagger R)^{1/4}`, accumulated in log space.
pub fn normalization(r: &SkewMatrix) -> f64 {
    let m = r.as_matrix();
    let n = m.nrows();
    let g = DMatrix::<Complex64>::identity(n, n) + m.adjoint() * m;
    (0.25 * log_det_hpd(&g)).exp()
}

/// A normalised Gaussian pure state `|R, C>`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPureState {
    r: SkewMatrix,
    base: FermionConfiguration,
    norm: f64,
}

impl GaussianPureState {
    /// The state `|R, 0>` built on the vacuum.
    pub fn new(r: SkewMatrix) -> Self {
        let norm = normalization(&r);
        let base = FermionConfiguration::vacuum(r.dim());
        GaussianPureState { r, base, norm }
    }

    /// The state `|R, C>`. When the vacuum has non-zero amplitude the state is
    /// immediately re-expressed on the vacuum (up to a global phase); otherwise
    /// the given base is kept and only base-agnostic queries are available.
    pub fn with_base(r: SkewMatrix, base: FermionConfiguration) -> Result<Self> {
        if base.len() != r.dim() {
            return Err(Error::LengthMismatch { expected: r.dim(), found: base.len() });
        }
        if base.is_vacuum() {
            return Ok(Self::new(r));
        }
        let norm = normalization(&r);
        let state = GaussianPureState { r, base, norm };
        let vacuum = FermionConfiguration::vacuum(state.len());
        match base_config_change(&state, &vacuum) {
            Ok(s) => Ok(s),
            Err(Error::ZeroAmplitudeBase { .. }) => Ok(state),
            Err(e) => Err(e),
        }
    }

    /// The fermion vacuum on `len` sites.
    pub fn vacuum(len: usize) -> Self {
        Self::new(SkewMatrix::zeros(len))
    }

    pub fn len(&self) -> usize {
        self.r.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.r.dim() == 0
    }

    pub fn r_matrix(&self) -> &SkewMatrix {
        &self.r
    }

    pub fn base_config(&self) -> &FermionConfiguration {
        &self.base
    }

    pub fn is_vacuum_based(&self) -> bool {
        self.base.is_vacuum()
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub(crate) fn require_vacuum_base(&self) -> Result<()> {
        if self.is_vacuum_based() {
            Ok(())
        } else {
            Err(Error::NonVacuumBase)
        }
    }
}

/// Amplitude `<I | R, C>` of an occupation string.
pub fn computational_amplitude(
    state: &GaussianPureState,
    config: &FermionConfiguration,
) -> Result<Complex64> {
    if config.len() != state.len() {
        return Err(Error::LengthMismatch { expected: state.len(), found: config.len() });
    }
    let keep = state.base.difference(config);
    let pf = pfaffian(&state.r.restrict(&keep));
    Ok(pf * (relative_sign(&state.base, config) / state.norm))
}

/// Re-expresses `|R, C>` on a new base `C'`:
/// `r'_ij = sgn(C,C') sgn(C,I') / sgn(C',I') * pf R_{CI'} / pf R_{CC'}` with
/// `I'` equal to `C'` flipped on `{i, j}`. The result equals the input state
/// up to a global phase.
pub fn base_config_change(
    state: &GaussianPureState,
    new_base: &FermionConfiguration,
) -> Result<GaussianPureState> {
    let l = state.len();
    if new_base.len() != l {
        return Err(Error::LengthMismatch { expected: l, found: new_base.len() });
    }
    let c = &state.base;
    let cc = c.difference(new_base);
    let den = pfaffian(&state.r.restrict(&cc));
    if den.norm() / state.norm < BASE_AMPLITUDE_FLOOR {
        return Err(Error::ZeroAmplitudeBase { rows: cc, value: den.norm() });
    }
    let s_cc = relative_sign(c, new_base);
    let r = SkewMatrix::from_upper_fn(l, |i, j| {
        let ip = new_base.with_flipped(&[i, j]);
        let ci = c.difference(&ip);
        let sign = s_cc * relative_sign(c, &ip) * relative_sign(new_base, &ip);
        pfaffian(&state.r.restrict(&ci)) / den * sign
    });
    let norm = normalization(&r);
    Ok(GaussianPureState { r, base: new_base.clone(), norm })
}

/// Random state whose strictly-upper entries are independent complex
/// Gaussians with `E|r_ij|^2 = scale^2`.
pub fn random_state(len: usize, seed: u64, scale: f64) -> GaussianPureState {
    GaussianPureState::new(random_skew(len, seed, scale))
}

pub fn random_skew(len: usize, seed: u64, scale: f64) -> SkewMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = scale * core::f64::consts::FRAC_1_SQRT_2;
    SkewMatrix::from_upper_fn(len, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re * s, im * s)
    })
}
