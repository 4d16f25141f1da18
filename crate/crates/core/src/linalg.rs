//! Thin wrappers over nalgebra for the dense routines the engine needs.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub(crate) type CMatrix = DMatrix<Complex64>;

/// Determinant by LU with partial pivoting.
pub(crate) fn det(m: &CMatrix) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// `ln det` of a Hermitian positive-definite matrix. Cholesky keeps the
/// result real however badly conditioned the matrix is; LU on `|det|` is the
/// fallback when round-off breaks positivity.
pub(crate) fn log_det_hpd(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    match m.clone().cholesky() {
        Some(c) => 2.0 * c.l_dirty().diagonal().iter().map(|d| d.re.ln()).sum::<f64>(),
        None => {
            let lu = m.clone().lu();
            lu.u().diagonal().iter().map(|d| d.norm().ln()).sum()
        }
    }
}

pub(crate) fn inverse(m: &CMatrix, what: &'static str) -> Result<CMatrix> {
    m.clone().try_inverse().ok_or(Error::Singular(what))
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Singular values in descending order.
pub(crate) fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Lowest eigenpair of a real symmetric operator by Lanczos with full
/// reorthogonalisation.
pub(crate) fn lanczos_ground_state<F>(
    dim: usize,
    start: &[f64],
    max_iter: usize,
    matvec: F,
) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&[f64], &mut [f64]),
{
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut q0: Vec<f64> = start.to_vec();
    let n0 = norm(&q0);
    if n0 == 0.0 {
        return Err(Error::InvalidArgument("Lanczos start vector is zero".into()));
    }
    q0.iter_mut().for_each(|x| *x /= n0);

    let max_iter = max_iter.min(dim).max(1);
    let mut basis: Vec<Vec<f64>> = vec![q0];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut previous = f64::INFINITY;

    for it in 0..max_iter {
        matvec(&basis[it], &mut w);
        let a: f64 = w.iter().zip(&basis[it]).map(|(x, y)| x * y).sum();
        alphas.push(a);
        // Full reorthogonalisation, twice for stability.
        for _ in 0..2 {
            for q in &basis {
                let c: f64 = w.iter().zip(q).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm(&w);

        let (e, y) = tridiagonal_lowest(&alphas, &betas);
        let residual = b * y[y.len() - 1].abs();
        let converged = residual < 1e-12 || (e - previous).abs() < 1e-15 * e.abs().max(1.0);
        if converged || b < 1e-14 || it + 1 == max_iter {
            if !(converged || b < 1e-14) && residual > 1e-8 {
                return Err(Error::NoConvergence(max_iter));
            }
            let mut v = vec![0.0; dim];
            for (q, c) in basis.iter().zip(&y) {
                v.iter_mut().zip(q).for_each(|(x, qi)| *x += c * qi);
            }
            let nv = norm(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            return Ok((e, v));
        }
        previous = e;
        betas.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    Err(Error::NoConvergence(max_iter))
}

fn tridiagonal_lowest(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let m = alphas.len();
    let t = DMatrix::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let eig = t.symmetric_eigen();
    let mut k = 0;
    for i in 1..m {
        if eig.eigenvalues[i] < eig.eigenvalues[k] {
            k = i;
        }
    }
    let y: DVector<f64> = eig.eigenvectors.column(k).into_owned();
    (eig.eigenvalues[k], y.iter().copied().collect())
}
