//! Dense Hermitian linear algebra shared by every other module.

pub mod lp;
pub mod random;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

/// Builds a complex matrix from real row-major data.
pub fn from_real_rows(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    assert_eq!(data.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| re(data[i * cols + j]))
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖A − A*‖_F`.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] - a[(j, i)].conj()).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Rejects `a` unless `‖A − A*‖_F ≤ tol · max(1, ‖A‖_F)`.
pub fn check_hermitian(a: &CMatrix, tol: f64) -> Result<()> {
    let defect = hermitian_defect(a);
    let allowed = tol * frobenius(a).max(1.0);
    if defect <= allowed {
        Ok(())
    } else {
        Err(Error::NotHermitian { defect, allowed })
    }
}

/// `(A + A*) / 2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Kronecker product with `kron(A, B)[(i q + k, j s + l)] = A[i, j] B[k, l]`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Block-diagonal direct sum `A ⊕ B`.
pub fn direct_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::INFINITY)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// `Q f(Λ) Q*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let s = f(lambda);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
///
/// `tol` is the relative Hermitian defect accepted on input; the Hermitian part
/// is what gets decomposed.
pub fn herm_eig(a: &CMatrix, tol: f64) -> Result<HermitianEigen> {
    check_hermitian(a, tol)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: zeros(0, 0),
        });
    }
    if n == 1 {
        return Ok(HermitianEigen {
            values: vec![a[(0, 0)].re],
            vectors: identity(1),
        });
    }
    let eig = hermitian_part(a)
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or(Error::EigenFailure { size: n })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn herm_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(a, crate::tolerances::HERMITIAN_OUTPUT)?;
    if a.nrows() <= 1 {
        return Ok(a.iter().map(|z| z.re).collect());
    }
    let mut v: Vec<f64> = hermitian_part(a).symmetric_eigenvalues().iter().copied().collect();
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenFailure { size: a.nrows() });
    }
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Smallest eigenvalue of a (numerically) Hermitian matrix.
pub fn min_eig(a: &CMatrix) -> Result<f64> {
    Ok(herm_eigenvalues(a)?
        .first()
        .copied()
        .unwrap_or(f64::INFINITY))
}

/// Frobenius-nearest PSD matrix: clip negative eigenvalues to zero.
pub fn psd_project(a: &CMatrix) -> Result<CMatrix> {
    let eig = herm_eig(a, crate::tolerances::HERMITIAN_OUTPUT)?;
    if eig.min() >= 0.0 {
        return Ok(hermitian_part(a));
    }
    Ok(hermitian_part(&eig.reconstruct_with(|l| l.max(0.0))))
}

/// Hermitian square root of a PSD matrix.
pub fn herm_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let eig = herm_eig(a, crate::tolerances::HERMITIAN_OUTPUT)?;
    if eig.min() < -crate::tolerances::MONIC_PIVOT {
        return Err(Error::NotPositiveDefinite { min_eig: eig.min() });
    }
    Ok(hermitian_part(&eig.reconstruct_with(|l| l.max(0.0).sqrt())))
}

/// `A^{-1/2}` for Hermitian `A` with minimum eigenvalue above `threshold`.
pub fn herm_inv_sqrt(a: &CMatrix, threshold: f64) -> Result<CMatrix> {
    let eig = herm_eig(a, crate::tolerances::HERMITIAN_OUTPUT)?;
    if eig.min() <= threshold {
        return Err(Error::NotPositiveDefinite { min_eig: eig.min() });
    }
    Ok(hermitian_part(&eig.reconstruct_with(|l| 1.0 / l.sqrt())))
}

/// Largest singular value.
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |m, &s| m.max(s))
}

/// `D − C A^{-1} B` for the block matrix `[[A, B], [C, D]]` with `A` the
/// leading `pivot × pivot` block.
pub fn schur_complement(block: &CMatrix, pivot: usize) -> Result<CMatrix> {
    let n = block.nrows();
    if !block.is_square() || pivot == 0 || pivot >= n {
        return Err(Error::InvalidParameter(format!(
            "pivot size {pivot} for a {}x{} block matrix",
            block.nrows(),
            block.ncols()
        )));
    }
    let a = block.view((0, 0), (pivot, pivot)).into_owned();
    let b = block.view((0, pivot), (pivot, n - pivot)).into_owned();
    let c = block.view((pivot, 0), (n - pivot, pivot)).into_owned();
    let d = block.view((pivot, pivot), (n - pivot, n - pivot)).into_owned();
    let min = min_eig(&a)?;
    if min <= crate::tolerances::MONIC_PIVOT {
        return Err(Error::NotPositiveDefinite { min_eig: min });
    }
    let a_inv = a.try_inverse().ok_or(Error::NotPositiveDefinite { min_eig: min })?;
    Ok(d - c * a_inv * b)
}

/// Real vector of length `s²` carrying a Hermitian `s × s` matrix isometrically:
/// diagonal entries, then `√2·Re` and `√2·Im` of each strictly upper entry.
pub fn herm_to_real(a: &CMatrix, out: &mut [f64]) {
    let s = a.nrows();
    debug_assert_eq!(out.len(), s * s);
    let r2 = std::f64::consts::SQRT_2;
    let mut k = 0;
    for i in 0..s {
        out[k] = a[(i, i)].re;
        k += 1;
    }
    for i in 0..s {
        for j in (i + 1)..s {
            let z = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            out[k] = r2 * z.re;
            out[k + 1] = r2 * z.im;
            k += 2;
        }
    }
}

/// Inverse of [`herm_to_real`].
pub fn real_to_herm(v: &[f64], s: usize) -> CMatrix {
    debug_assert_eq!(v.len(), s * s);
    let inv = 1.0 / std::f64::consts::SQRT_2;
    let mut a = zeros(s, s);
    let mut k = 0;
    for i in 0..s {
        a[(i, i)] = re(v[k]);
        k += 1;
    }
    for i in 0..s {
        for j in (i + 1)..s {
            let z = C64::new(v[k] * inv, v[k + 1] * inv);
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
            k += 2;
        }
    }
    a
}

pub fn real_vec(v: Vec<f64>) -> DVector<f64> {
    DVector::from_vec(v)
}
