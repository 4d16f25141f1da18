//! Brute-force reference: the full `2^L` state vector and direct
//! contraction with the basis bras. Independent of every Pfaffian
//! amplitude formula; only the definition of the state is shared.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{canonical_bras, PauliBasis, SpinConfiguration};
use crate::error::{Error, Result};
use crate::state::{computational_amplitude, FermionConfiguration, GaussianPureState};

/// Largest `L` the oracle will expand.
pub const ORACLE_MAX_SITES: usize = 14;

/// A dense state vector. Site 0 is the most significant bit and bit value 1
/// is an occupied site.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    len: usize,
    amplitudes: Vec<Complex64>,
}

impl DenseState {
    pub fn new(len: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1usize << len {
            return Err(Error::LengthMismatch { expected: 1 << len, found: amplitudes.len() });
        }
        Ok(DenseState { len, amplitudes })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

pub fn dense_from_gaussian(state: &GaussianPureState) -> Result<DenseState> {
    let l = state.len();
    if l > ORACLE_MAX_SITES {
        return Err(Error::EnumerationLimit { sites: l, limit: ORACLE_MAX_SITES });
    }
    let amplitudes = (0..1u64 << l)
        .map(|k| computational_amplitude(state, &FermionConfiguration::from_index(l, k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DenseState { len: l, amplitudes })
}

/// `<S| psi>` by summing over all occupation strings.
pub fn oracle_amplitude(
    dense: &DenseState,
    basis: &PauliBasis,
    config: &SpinConfiguration,
) -> Result<Complex64> {
    let l = dense.len;
    if basis.len() != l || config.len() != l {
        return Err(Error::LengthMismatch { expected: l, found: basis.len().min(config.len()) });
    }
    let bras: Vec<[Complex64; 2]> =
        (0..l).map(|j| canonical_bras(basis.site(j)).bra(config.spin(j))).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for (k, a) in dense.amplitudes.iter().enumerate() {
        let mut w = *a;
        for (j, bra) in bras.iter().enumerate() {
            w *= bra[(k >> (l - 1 - j)) & 1];
        }
        total += w;
    }
    Ok(total)
}

/// All `2^L` amplitudes, indexed by [`SpinConfiguration::index`], by applying
/// the per-site bra matrix one site at a time.
pub fn oracle_amplitudes_all(dense: &DenseState, basis: &PauliBasis) -> Result<Vec<Complex64>> {
    let l = dense.len;
    if basis.len() != l {
        return Err(Error::LengthMismatch { expected: l, found: basis.len() });
    }
    let mut v = dense.amplitudes.clone();
    for j in 0..l {
        let b = canonical_bras(basis.site(j));
        let stride = 1usize << (l - 1 - j);
        for base in 0..v.len() {
            if base & stride != 0 {
                continue;
            }
            let (x0, x1) = (v[base], v[base | stride]);
            // output bit 1 is '+', bit 0 is '-'
            v[base | stride] = b.plus[0] * x0 + b.plus[1] * x1;
            v[base] = b.minus[0] * x0 + b.minus[1] * x1;
        }
    }
    Ok(v)
}

/// Reduced density matrix on `keep` (in the listed order, first listed site
/// most significant) in the occupation basis.
pub fn oracle_partial_trace(dense: &DenseState, keep: &[usize]) -> Result<DMatrix<Complex64>> {
    let l = dense.len;
    for &k in keep {
        if k >= l {
            return Err(Error::IndexOutOfRange { index: k, dim: l });
        }
    }
    let traced: Vec<usize> = (0..l).filter(|j| !keep.contains(j)).collect();
    let dk = 1usize << keep.len();
    let compose = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut idx = 0usize;
        for (p, &site) in keep.iter().enumerate() {
            if kept_bits >> (keep.len() - 1 - p) & 1 == 1 {
                idx |= 1 << (l - 1 - site);
            }
        }
        for (p, &site) in traced.iter().enumerate() {
            if traced_bits >> (traced.len() - 1 - p) & 1 == 1 {
                idx |= 1 << (l - 1 - site);
            }
        }
        idx
    };
    let mut rho = DMatrix::zeros(dk, dk);
    for t in 0..1usize << traced.len() {
        for a in 0..dk {
            let va = dense.amplitudes[compose(a, t)];
            for b in 0..dk {
                rho[(a, b)] += va * dense.amplitudes[compose(b, t)].conj();
            }
        }
    }
    Ok(rho)
}

/// Rotates every site into `basis`: component `S` of the result is
/// `<S|psi>`.
pub fn rotate_to_basis(dense: &DenseState, basis: &PauliBasis) -> Result<DenseState> {
    Ok(DenseState { len: dense.len, amplitudes: oracle_amplitudes_all(dense, basis)? })
}
