//! `R` matrices of transverse-field Ising ground states.
//!
//! The Hamiltonian is `H = -J sum_j X_j X_{j+1} + h sum_j Z_j` on a
//! periodic ring. With `Z = +1` on an occupied site its paramagnetic limit
//! (`J -> 0`, `h > 0`) is the fermion vacuum, so the ground state is always
//! of the form `|R, 0>`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::lanczos_ground_state;
use crate::skewlin::SkewMatrix;

/// Largest ring handled by the exact diagonalisation route.
pub const EXACT_MAX_SITES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfimSpec {
    pub len: usize,
    pub coupling: f64,
    pub field: f64,
}

impl TfimSpec {
    pub fn new(len: usize, coupling: f64, field: f64) -> Result<Self> {
        if len < 2 || len % 2 == 1 {
            return Err(Error::InvalidArgument(alloc::format!("the Ising ring needs an even L >= 2, got {len}")));
        }
        if !coupling.is_finite() || !field.is_finite() {
            return Err(Error::InvalidArgument("J and h must be finite".into()));
        }
        Ok(TfimSpec { len, coupling, field })
    }

    /// Critical point `h = J`.
    pub fn critical(len: usize) -> Result<Self> {
        Self::new(len, 1.0, 1.0)
    }

    /// Single-particle energy `2 sqrt(J^2 + h^2 + 2 J h cos k)`.
    pub fn dispersion(&self, k: f64) -> f64 {
        let (j, h) = (self.coupling, self.field);
        2.0 * (j * j + h * h + 2.0 * j * h * k.cos()).max(0.0).sqrt()
    }

    /// The antiperiodic momentum `pi (2n+1) / L` with the smallest energy.
    fn softest_momentum(&self) -> f64 {
        let l = self.len as f64;
        (0..self.len / 2)
            .map(|n| PI * (2 * n + 1) as f64 / l)
            .min_by(|a, b| self.dispersion(*a).total_cmp(&self.dispersion(*b)))
            .unwrap_or(0.0)
    }
}

/// `H |psi>` on the full `2^L` space. Site 0 is the most significant bit.
pub fn tfim_apply(spec: &TfimSpec, x: &[f64], y: &mut [f64]) {
    let l = spec.len;
    for (idx, out) in y.iter_mut().enumerate() {
        let mut diag = 0.0;
        for j in 0..l {
            diag += if idx >> (l - 1 - j) & 1 == 1 { spec.field } else { -spec.field };
        }
        *out = diag * x[idx];
    }
    for idx in 0..x.len() {
        let v = x[idx];
        if v == 0.0 {
            continue;
        }
        for j in 0..l {
            let k = (j + 1) % l;
            let flip = (1usize << (l - 1 - j)) | (1usize << (l - 1 - k));
            y[idx ^ flip] -= spec.coupling * v;
        }
    }
}

/// Ground state vector by Lanczos, started from the vacuum so that the
/// Krylov space stays in the even, translation-invariant sector.
pub fn tfim_ground_state(spec: &TfimSpec) -> Result<(f64, Vec<f64>)> {
    if spec.len > EXACT_MAX_SITES {
        return Err(Error::EnumerationLimit { sites: spec.len, limit: EXACT_MAX_SITES });
    }
    let dim = 1usize << spec.len;
    let mut start = alloc::vec![0.0; dim];
    start[0] = 1.0;
    lanczos_ground_state(dim, &start, 400, |x, y| tfim_apply(spec, x, y))
}

/// `r_ij = <ij|GS> / <0|GS>` from exact diagonalisation (`L <= 12`).
pub fn tfim_r_matrix_exact_small(spec: &TfimSpec) -> Result<SkewMatrix> {
    let (_, g) = tfim_ground_state(spec)?;
    let l = spec.len;
    let vac = g[0];
    if vac.abs() < 1e-12 {
        return Err(Error::VanishingVacuum(vac.abs()));
    }
    Ok(SkewMatrix::from_upper_fn(l, |i, j| {
        let idx = (1usize << (l - 1 - i)) | (1usize << (l - 1 - j));
        Complex64::new(g[idx] / vac, 0.0)
    }))
}

/// `R = -X^{-1} Y` from the positive-energy Bogoliubov modes `(u, v)` of the
/// antiperiodic fermion chain.
pub fn tfim_r_matrix_bogoliubov(spec: &TfimSpec) -> Result<SkewMatrix> {
    let l = spec.len;
    let mut a = DMatrix::<f64>::zeros(l, l);
    let mut b = DMatrix::<f64>::zeros(l, l);
    for i in 0..l {
        a[(i, i)] = 2.0 * spec.field;
    }
    for i in 0..l {
        let j = (i + 1) % l;
        let t = if j > i { 1.0 } else { -1.0 };
        a[(i, j)] -= spec.coupling * t;
        a[(j, i)] -= spec.coupling * t;
        b[(i, j)] -= spec.coupling * t;
        b[(j, i)] += spec.coupling * t;
    }
    let mut h = DMatrix::<f64>::zeros(2 * l, 2 * l);
    h.view_mut((0, 0), (l, l)).copy_from(&a);
    h.view_mut((0, l), (l, l)).copy_from(&b);
    h.view_mut((l, 0), (l, l)).copy_from(&(-&b));
    h.view_mut((l, l), (l, l)).copy_from(&(-&a));
    let eig = h.symmetric_eigen();

    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, e| m.max(e.abs())).max(f64::MIN_POSITIVE);
    let smallest = eig.eigenvalues.iter().fold(f64::INFINITY, |m, e| m.min(e.abs()));
    if smallest <= 1e-12 * scale {
        return Err(Error::Gapless { k: spec.softest_momentum(), energy: smallest });
    }
    let positive: Vec<usize> = (0..2 * l).filter(|&k| eig.eigenvalues[k] > 0.0).collect();
    if positive.len() != l {
        return Err(Error::Gapless { k: spec.softest_momentum(), energy: smallest });
    }
    let x = DMatrix::<f64>::from_fn(l, l, |k, i| eig.eigenvectors[(i, positive[k])]);
    let y = DMatrix::<f64>::from_fn(l, l, |k, i| eig.eigenvectors[(l + i, positive[k])]);
    let xinv = x.try_inverse().ok_or(Error::Singular("the Bogoliubov u-block"))?;
    let r = -(xinv * y);
    let skew = (&r + r.transpose()).amax();
    if skew > 1e-8 * r.amax().max(1.0) {
        return Err(Error::NotSkew { i: 0, j: 0, residual: skew });
    }
    Ok(SkewMatrix::antisymmetrized(r.map(|v| Complex64::new(v, 0.0))))
}
