//! Recursive evaluation of amplitudes from 2-site and `(L-2)`-site pieces.
//!
//! Work on the unnormalised `b_S = N_R a_S` of the (padded, even) system
//! with sites `1..L'`. With `P(D)` the product of the spins in `D`,
//! `A_2j = {2..2j}` and `Abar_2j = {2j+1..L'}`:
//!
//! ```text
//! b_S = sum_j P(Abar_2j) b_{1,2j}(phi, theta) b_{S/{1,2j}}(phi, theta with 2pi - theta on Abar_2j)
//!     - sum_j P(A_2j) b_{1,2j+1}(phi + pi/2, theta) b_{S/{1,2j+1}}(phi, theta with 2pi - theta on A_2j)
//! ```
//!
//! The alternative form replaces the second sum by
//! `+ (-1)^{(1+s_1)/2} P(A_2j) b_{1,2j+1}(phi, 2pi - theta_1, theta_2j+1) b_{...}(same)`.
//!
//! Sub-systems are standalone even systems indexed from their first site.
//! Angle changes are carried as an [`AngleSurgery`] descriptor and applied
//! only when a sub-Pfaffian is evaluated, so nested changes compose.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::amplitude::{system_b, PaddedProblem, SitePoint};
use crate::basis::{PauliBasis, Spin, SpinConfiguration};
use crate::error::{Error, Result};
use crate::skewlin::SkewMatrix;
use crate::state::GaussianPureState;

/// Largest padded size accepted by the fully recursive engine, whose cost
/// grows like `(L'-1)!!`.
pub const FULL_RECURSION_MAX_SITES: usize = 14;

/// Per-site angle changes: `theta -> 2pi - theta` and `phi -> phi + k pi/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AngleSurgery {
    reflect_theta: Vec<bool>,
    phi_quarter_turns: Vec<u8>,
}

impl AngleSurgery {
    pub fn identity(n: usize) -> Self {
        AngleSurgery { reflect_theta: alloc::vec![false; n], phi_quarter_turns: alloc::vec![0; n] }
    }

    pub fn reflecting(n: usize, sites: &[usize]) -> Self {
        let mut s = Self::identity(n);
        for &i in sites {
            s.reflect_theta[i] = true;
        }
        s
    }

    pub fn shifting_phi(n: usize, sites: &[usize]) -> Self {
        let mut s = Self::identity(n);
        for &i in sites {
            s.phi_quarter_turns[i] = 1;
        }
        s
    }

    /// Applies `self` and then `other`.
    pub fn then(&self, other: &AngleSurgery) -> Self {
        AngleSurgery {
            reflect_theta: self.reflect_theta.iter().zip(&other.reflect_theta).map(|(a, b)| a ^ b).collect(),
            phi_quarter_turns: self
                .phi_quarter_turns
                .iter()
                .zip(&other.phi_quarter_turns)
                .map(|(a, b)| (a + b) % 4)
                .collect(),
        }
    }

    pub fn reflects(&self, i: usize) -> bool {
        self.reflect_theta[i]
    }

    pub fn quarter_turns(&self, i: usize) -> u8 {
        self.phi_quarter_turns[i]
    }

    pub fn apply_to(&self, i: usize, p: SitePoint) -> SitePoint {
        let theta = if self.reflect_theta[i] { 2.0 * PI - p.theta } else { p.theta };
        let phi = p.phi + FRAC_PI_2 * f64::from(self.phi_quarter_turns[i]);
        SitePoint { phi, theta, ..p }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RecursionVariant {
    #[default]
    Theorem,
    Alternative,
}

/// How sub-system amplitudes inside an expansion are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubAmplitudeEngine {
    /// One Pfaffian per sub-system.
    #[default]
    Direct,
    /// Expand recursively down to 2-site systems.
    Full,
}

/// Scalar in front of a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermSign {
    Plus,
    Minus,
    /// `(-1)^{(1 + s_1)/2}`
    FirstSpin,
}

/// One term `coefficient * P(parity_sites) * b_pair * b_remainder`. All
/// indices are positions inside the system being expanded, counted from 0;
/// the pair is always `(0, partner)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecursionTerm {
    pub partner: usize,
    pub sign: TermSign,
    pub parity_sites: Vec<usize>,
    pub pair_shift_phi: bool,
    pub pair_reflect_first: bool,
    pub remainder: Vec<usize>,
    pub remainder_reflected: Vec<usize>,
}

/// The terms for a system of `n` sites (`n` even), first sum before second.
pub fn expansion_terms(n: usize, variant: RecursionVariant) -> Result<Vec<RecursionTerm>> {
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    let mut terms = Vec::new();
    let rest = |partner: usize| (1..n).filter(|&q| q != partner).collect::<Vec<_>>();
    for partner in (1..n).step_by(2) {
        let tail: Vec<usize> = (partner + 1..n).collect();
        terms.push(RecursionTerm {
            partner,
            sign: TermSign::Plus,
            parity_sites: tail.clone(),
            pair_shift_phi: false,
            pair_reflect_first: false,
            remainder: rest(partner),
            remainder_reflected: tail,
        });
    }
    for partner in (2..n).step_by(2) {
        let head: Vec<usize> = (1..partner).collect();
        let (sign, shift, reflect) = match variant {
            RecursionVariant::Theorem => (TermSign::Minus, true, false),
            RecursionVariant::Alternative => (TermSign::FirstSpin, false, true),
        };
        terms.push(RecursionTerm {
            partner,
            sign,
            parity_sites: head.clone(),
            pair_shift_phi: shift,
            pair_reflect_first: reflect,
            remainder: rest(partner),
            remainder_reflected: head,
        });
    }
    Ok(terms)
}

struct Expander<'a> {
    r: &'a SkewMatrix,
    base: &'a [SitePoint],
    engine: SubAmplitudeEngine,
    variant: RecursionVariant,
}

impl Expander<'_> {
    fn direct(&self, subset: &[usize], surgery: &AngleSurgery) -> Complex64 {
        let sites: Vec<SitePoint> = subset.iter().map(|&i| surgery.apply_to(i, self.base[i])).collect();
        system_b(&self.r.restrict(subset), &sites)
    }

    fn sub_b(&self, subset: &[usize], surgery: &AngleSurgery) -> Result<Complex64> {
        if subset.len() <= 2 || self.engine == SubAmplitudeEngine::Direct {
            return Ok(self.direct(subset, surgery));
        }
        let terms = expansion_terms(subset.len(), self.variant)?;
        self.expand(subset, surgery, &terms)
    }

    fn expand(&self, subset: &[usize], surgery: &AngleSurgery, terms: &[RecursionTerm]) -> Result<Complex64> {
        let n_all = self.base.len();
        let mut total = Complex64::new(0.0, 0.0);
        for t in terms {
            let map = |v: &[usize]| v.iter().map(|&q| subset[q]).collect::<Vec<usize>>();
            let first = subset[0];
            let partner = subset[t.partner];
            let mut coef: f64 = t
                .parity_sites
                .iter()
                .map(|&q| f64::from(self.base[subset[q]].spin.sign()))
                .product();
            coef *= match t.sign {
                TermSign::Plus => 1.0,
                TermSign::Minus => -1.0,
                TermSign::FirstSpin => {
                    if self.base[first].spin == Spin::Up {
                        -1.0
                    } else {
                        1.0
                    }
                }
            };
            let mut pair_surgery = surgery.clone();
            if t.pair_shift_phi {
                pair_surgery = pair_surgery.then(&AngleSurgery::shifting_phi(n_all, &[first, partner]));
            }
            if t.pair_reflect_first {
                pair_surgery = pair_surgery.then(&AngleSurgery::reflecting(n_all, &[first]));
            }
            let pair = self.direct(&[first, partner], &pair_surgery);
            let rest_surgery = surgery.then(&AngleSurgery::reflecting(n_all, &map(&t.remainder_reflected)));
            let rest = self.sub_b(&map(&t.remainder), &rest_surgery)?;
            total += pair * rest * coef;
        }
        Ok(total)
    }
}

/// `N_R a_S` by a single Pfaffian. For odd `L` this is
/// `(-1)^{L(1-s_1)/2} sqrt(2)` times the `b` of the padded system.
pub fn unnormalized_amplitude(
    state: &GaussianPureState,
    basis: &PauliBasis,
    config: &SpinConfiguration,
) -> Result<Complex64> {
    let p = PaddedProblem::new(state, basis, config)?;
    Ok(system_b(&p.r, &p.sites) * p.prefactor())
}

/// `N_{R_nm} = (1 + |r_nm|^2)^{1/2}`, the normalisation of a 2-site state.
pub fn pair_normalization(r_nm: Complex64) -> f64 {
    (1.0 + r_nm.norm_sqr()).sqrt()
}

/// Amplitude through an explicit list of top-level terms (sub-systems by a
/// single Pfaffian each).
pub fn evaluate_expansion(
    state: &GaussianPureState,
    basis: &PauliBasis,
    config: &SpinConfiguration,
    terms: &[RecursionTerm],
) -> Result<Complex64> {
    let p = PaddedProblem::new(state, basis, config)?;
    let ex = Expander { r: &p.r, base: &p.sites, engine: SubAmplitudeEngine::Direct, variant: RecursionVariant::Theorem };
    let all: Vec<usize> = (0..p.len()).collect();
    let b = ex.expand(&all, &AngleSurgery::identity(p.len()), terms)?;
    Ok(b * (p.prefactor() / state.norm()))
}

pub fn recursive_amplitude_with(
    state: &GaussianPureState,
    basis: &PauliBasis,
    config: &SpinConfiguration,
    variant: RecursionVariant,
    engine: SubAmplitudeEngine,
) -> Result<Complex64> {
    let p = PaddedProblem::new(state, basis, config)?;
    if engine == SubAmplitudeEngine::Full && p.len() > FULL_RECURSION_MAX_SITES {
        return Err(Error::EnumerationLimit { sites: p.len(), limit: FULL_RECURSION_MAX_SITES });
    }
    let terms = expansion_terms(p.len(), variant)?;
    let ex = Expander { r: &p.r, base: &p.sites, engine, variant };
    let all: Vec<usize> = (0..p.len()).collect();
    let b = ex.expand(&all, &AngleSurgery::identity(p.len()), &terms)?;
    Ok(b * (p.prefactor() / state.norm()))
}

/// Amplitude by one level of the recursion, sub-systems evaluated directly.
pub fn recursive_amplitude(
    state: &GaussianPureState,
    basis: &PauliBasis,
    config: &SpinConfiguration,
) -> Result<Complex64> {
    recursive_amplitude_with(state, basis, config, RecursionVariant::Theorem, SubAmplitudeEngine::Direct)
}

/// The alternative recursion with `2pi - theta_1` on the pair.
pub fn recursive_amplitude_alt(
    state: &GaussianPureState,
    basis: &PauliBasis,
    config: &SpinConfiguration,
) -> Result<Complex64> {
    recursive_amplitude_with(state, basis, config, RecursionVariant::Alternative, SubAmplitudeEngine::Direct)
}
