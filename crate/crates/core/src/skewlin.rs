//! Skew-symmetric matrices and Pfaffians.
//!
//! The kernel is Parlett-Reid elimination with partial pivoting: O(n^3),
//! stable for the well-conditioned matrices produced by the amplitude
//! engine. A pivot below `1e-14 * max|entry|` is treated as an exact zero.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance on `|m_ij + m_ji|` accepted by [`SkewMatrix::new`].
pub const SKEW_TOLERANCE: f64 = 1e-12;

const PIVOT_FLOOR: f64 = 1e-14;

/// A complex skew-symmetric matrix (`m = -m^T`, zero diagonal).
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    m: DMatrix<Complex64>,
}

impl SkewMatrix {
    /// Validates skewness to [`SKEW_TOLERANCE`] and then symmetrises exactly.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::LengthMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let n = m.nrows();
        for i in 0..n {
            for j in i..n {
                let residual = (m[(i, j)] + m[(j, i)]).norm();
                if residual > SKEW_TOLERANCE {
                    return Err(Error::NotSkew { i, j, residual });
                }
            }
        }
        Ok(Self::antisymmetrized(m))
    }

    /// `(m - m^T) / 2` without any check.
    pub(crate) fn antisymmetrized(m: DMatrix<Complex64>) -> Self {
        let n = m.nrows();
        let s = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(0.0, 0.0)
            } else {
                (m[(i, j)] - m[(j, i)]) * 0.5
            }
        });
        SkewMatrix { m: s }
    }

    pub fn zeros(n: usize) -> Self {
        SkewMatrix { m: DMatrix::zeros(n, n) }
    }

    /// Builds the matrix from its strictly upper triangle.
    pub fn from_upper_fn<F: FnMut(usize, usize) -> Complex64>(n: usize, mut f: F) -> Self {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        SkewMatrix { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    /// Sets `m[i][j] = v` and `m[j][i] = -v`. Diagonal writes are ignored.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        if i != j {
            self.m[(i, j)] = v;
            self.m[(j, i)] = -v;
        }
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        SkewMatrix { m: self.m.map(|x| x * c) }
    }

    /// Principal submatrix on `keep`, re-indexed from zero.
    pub fn submatrix(&self, keep: &IndexSubset) -> Result<Self> {
        if keep.parent_dim() != self.dim() {
            return Err(Error::LengthMismatch { expected: self.dim(), found: keep.parent_dim() });
        }
        Ok(self.restrict(keep.indices()))
    }

    pub(crate) fn restrict(&self, idx: &[usize]) -> Self {
        let k = idx.len();
        SkewMatrix { m: DMatrix::from_fn(k, k, |a, b| self.m[(idx[a], idx[b])]) }
    }

    /// Appends `extra` zero rows and columns.
    pub fn padded(&self, extra: usize) -> Self {
        let n = self.dim();
        let mut m = DMatrix::zeros(n + extra, n + extra);
        m.view_mut((0, 0), (n, n)).copy_from(&self.m);
        SkewMatrix { m }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0, |a, x| a.max(x.norm()))
    }
}

/// A strictly increasing list of indices into a matrix of size `parent_dim`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSubset {
    parent_dim: usize,
    kept: Vec<usize>,
}

impl IndexSubset {
    pub fn new(parent_dim: usize, kept: Vec<usize>) -> Result<Self> {
        for w in kept.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::UnsortedIndices { prev: w[0], next: w[1] });
            }
        }
        if let Some(&last) = kept.last() {
            if last >= parent_dim {
                return Err(Error::IndexOutOfRange { index: last, dim: parent_dim });
            }
        }
        Ok(IndexSubset { parent_dim, kept })
    }

    /// Subset given by the set bits of `mask` (bit `i` keeps index `i`).
    pub fn from_mask(parent_dim: usize, mask: u64) -> Self {
        let kept = (0..parent_dim).filter(|&i| mask >> i & 1 == 1).collect();
        IndexSubset { parent_dim, kept }
    }

    pub fn all(n: usize) -> Self {
        IndexSubset { parent_dim: n, kept: (0..n).collect() }
    }

    pub fn parent_dim(&self) -> usize {
        self.parent_dim
    }

    pub fn indices(&self) -> &[usize] {
        &self.kept
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }
}

/// Pfaffian of a skew-symmetric matrix. Odd dimension gives 0, empty gives 1.
pub fn pfaffian(m: &SkewMatrix) -> Complex64 {
    pfaffian_of(m.as_matrix())
}

/// Pfaffian of a matrix assumed skew-symmetric; only the structure is used.
pub(crate) fn pfaffian_of(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    let mut buf = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            buf.push(m[(i, j)]);
        }
    }
    pfaffian_row_major(buf, n)
}

/// Parlett-Reid on a row-major buffer, consumed in place.
pub(crate) fn pfaffian_row_major(mut a: Vec<Complex64>, n: usize) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    if n == 0 {
        return one;
    }
    if n % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let scale = a.iter().fold(0.0f64, |acc, x| acc.max(x.norm()));
    if scale == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let floor = PIVOT_FLOOR * scale;
    let mut result = one;
    let mut tau = alloc::vec![Complex64::new(0.0, 0.0); n];

    let mut k = 0;
    while k + 1 < n {
        let mut kp = k + 1;
        let mut best = a[(k + 1) * n + k].norm();
        for i in k + 2..n {
            let v = a[i * n + k].norm();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if best <= floor {
            return Complex64::new(0.0, 0.0);
        }
        if kp != k + 1 {
            for c in 0..n {
                a.swap((k + 1) * n + c, kp * n + c);
            }
            for r in 0..n {
                a.swap(r * n + k + 1, r * n + kp);
            }
            result = -result;
        }
        let pivot = a[k * n + k + 1];
        result *= pivot;
        if k + 2 < n {
            for i in k + 2..n {
                tau[i] = a[k * n + i] / pivot;
            }
            // Rank-2 update: A[i][j] += tau_i * A[j][k+1] - A[i][k+1] * tau_j.
            let col: Vec<Complex64> = (0..n).map(|i| a[i * n + k + 1]).collect();
            for i in k + 2..n {
                let ti = tau[i];
                let ci = col[i];
                let row = &mut a[i * n..(i + 1) * n];
                for j in k + 2..n {
                    row[j] += ti * col[j] - ci * tau[j];
                }
            }
        }
        k += 2;
    }
    result
}

/// Pfaffian of the principal submatrix on `keep`.
pub fn sub_pfaffian(m: &SkewMatrix, keep: &IndexSubset) -> Result<Complex64> {
    Ok(pfaffian(&m.submatrix(keep)?))
}

/// Expansion of the Pfaffian along row `i`:
/// `pf(A) = sum_{j != i} (-1)^{i+j+1+H(i-j)} a_ij pf(A_{ij removed})`,
/// with `H` the Heaviside step. The parity of `i + j` does not depend on
/// whether indices start at 0 or 1, so no offset is applied.
pub fn pfaffian_expand_row(m: &SkewMatrix, i: usize) -> Result<Complex64> {
    let n = m.dim();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, dim: n });
    }
    if n % 2 == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for j in 0..n {
        if j == i {
            continue;
        }
        let rest: Vec<usize> = (0..n).filter(|&k| k != i && k != j).collect();
        let minor = pfaffian(&m.restrict(&rest));
        let exponent = i + j + 1 + usize::from(i > j);
        let sign = if exponent % 2 == 0 { 1.0 } else { -1.0 };
        total += m.get(i, j) * minor * sign;
    }
    Ok(total)
}

/// The matrix `A` with `a_ij = m_ij - (-1)^{i+j} lambda_i lambda_j` for
/// `i < j`. Its Pfaffian equals
/// `sum_{even subsets I} prod_{i not in I} lambda_i pf(m_I)`.
pub fn lieb_shift(m: &SkewMatrix, lambdas: &[Complex64]) -> Result<SkewMatrix> {
    let n = m.dim();
    if lambdas.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: lambdas.len() });
    }
    Ok(SkewMatrix::from_upper_fn(n, |i, j| {
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        m.get(i, j) - lambdas[i] * lambdas[j] * sign
    }))
}

/// Pfaffian of the Lieb-shifted matrix for even dimension.
pub fn lieb_shifted_pfaffian(m: &SkewMatrix, lambdas: &[Complex64]) -> Result<Complex64> {
    if m.dim() % 2 == 1 {
        return Err(Error::OddDimension(m.dim()));
    }
    Ok(pfaffian(&lieb_shift(m, lambdas)?))
}

/// Odd-dimension variant: pads with one extra site carrying `lambda = 1`.
/// The Pfaffian of the padded shifted matrix equals the subset sum over all
/// subset sizes.
pub fn lieb_odd_extension(m: &SkewMatrix, lambdas: &[Complex64]) -> Result<Complex64> {
    let n = m.dim();
    if n % 2 == 0 {
        return Err(Error::EvenDimension(n));
    }
    if lambdas.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: lambdas.len() });
    }
    let mut ext: Vec<Complex64> = lambdas.to_vec();
    ext.push(Complex64::new(1.0, 0.0));
    Ok(pfaffian(&lieb_shift(&m.padded(1), &ext)?))
}
