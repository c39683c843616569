//! Seeded random ensembles.
//!
//! Every generator takes an explicit RNG. Independent work items draw from
//! `rng_for(seed, stream)` with distinct stream indices, so results do not
//! depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{identity, op_norm, CMatrix, C64};
use crate::error::{Error, Result};
use crate::gamma::Isometry;
use crate::ncpoly::HermitianTuple;

pub type GckRng = ChaCha8Rng;

/// RNG for work item `stream` of the run seeded with `seed`.
pub fn rng_for(seed: u64, stream: u64) -> GckRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex Gaussian with `E|z|² = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    C64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// GUE sample `(G + G*) / 2`; exactly Hermitian.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = gaussian_matrix(n, n, rng);
    let mut h = (&g + g.adjoint()).scale(0.5);
    for i in 0..n {
        h[(i, i)].im = 0.0;
    }
    h
}

/// GUE sample rescaled to operator norm `norm`.
pub fn random_hermitian_with_norm<R: Rng + ?Sized>(n: usize, norm: f64, rng: &mut R) -> CMatrix {
    let h = random_hermitian(n, rng);
    let s = op_norm(&h);
    if s == 0.0 {
        return CMatrix::zeros(n, n);
    }
    h.scale(norm / s)
}

/// Haar-distributed `n × m` isometry (`m ≤ n`) from the QR factorization of a
/// Gaussian matrix, with column phases fixed by the diagonal of `R`.
pub fn haar_isometry_matrix<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> CMatrix {
    assert!(m <= n && n >= 1);
    if m == 0 {
        return CMatrix::zeros(n, 0);
    }
    let qr = gaussian_matrix(n, m, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    haar_isometry_matrix(n, n, rng)
}

pub fn haar_isometry<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Isometry {
    Isometry::new(haar_isometry_matrix(n, m, rng)).expect("QR columns are orthonormal")
}

/// Tuple of `g` GUE samples, each rescaled to operator norm `norm`.
pub fn random_tuple<R: Rng + ?Sized>(g: usize, level: usize, norm: f64, rng: &mut R) -> HermitianTuple {
    let entries = (0..g)
        .map(|_| random_hermitian_with_norm(level, norm, rng))
        .collect();
    HermitianTuple::new(entries).expect("GUE samples are Hermitian")
}

/// Minimum eigenvalue of `I − X² − Y^{2d}`.
pub fn tv_margin(x: &CMatrix, y: &CMatrix, d: usize) -> Result<f64> {
    let y2 = y * y;
    let mut y2d = identity(y.nrows());
    for _ in 0..d {
        y2d = &y2d * &y2;
    }
    let p = identity(x.nrows()) - x * x - y2d;
    super::min_eig(&p)
}

/// A pair `(X, Y)` at `level` with `I − X² − Y^{2d}` having minimum eigenvalue
/// above `margin`, drawn by rejection from GUE directions with operator norms
/// uniform on `[0, 1)`.
pub fn tv_interior<R: Rng + ?Sized>(
    d: usize,
    level: usize,
    margin: f64,
    budget: usize,
    rng: &mut R,
) -> Result<HermitianTuple> {
    if d == 0 || level == 0 {
        return Err(Error::InvalidParameter(format!(
            "tv_interior needs d ≥ 1 and level ≥ 1, got d = {d}, level = {level}"
        )));
    }
    for _ in 0..budget {
        let nx: f64 = rng.random();
        let ny: f64 = rng.random();
        let x = random_hermitian_with_norm(level, nx, rng);
        let y = random_hermitian_with_norm(level, ny, rng);
        if tv_margin(&x, &y, d)? > margin {
            return HermitianTuple::new(vec![x, y]);
        }
    }
    Err(Error::BudgetExhausted { budget })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ensemble {
    /// `g` Hermitian matrices with operator norm `norm`.
    Hermitian { g: usize, norm: f64 },
    /// A Haar isometry with `cols` columns.
    Isometry { cols: usize },
    /// Strict interior of the TV screen `I − X² − Y^{2d} ⪰ 0`.
    TvInterior { d: usize },
}

#[derive(Clone, Debug)]
pub enum Sample {
    Tuple(HermitianTuple),
    Isometry(Isometry),
}

/// Rejection budget used by [`sample`] for interior ensembles.
pub const DEFAULT_REJECTION_BUDGET: usize = 100_000;

/// One draw from `kind` at `level`, reproducible from `seed` alone.
pub fn sample(kind: Ensemble, level: usize, seed: u64) -> Result<Sample> {
    if level == 0 {
        return Err(Error::InvalidParameter("level must be at least 1".into()));
    }
    let mut rng = rng_for(seed, 0);
    match kind {
        Ensemble::Hermitian { g, norm } => Ok(Sample::Tuple(random_tuple(g, level, norm, &mut rng))),
        Ensemble::Isometry { cols } => {
            if cols == 0 || cols > level {
                return Err(Error::InvalidParameter(format!(
                    "isometry with {cols} columns into dimension {level}"
                )));
            }
            Ok(Sample::Isometry(haar_isometry(level, cols, &mut rng)))
        }
        Ensemble::TvInterior { d } => Ok(Sample::Tuple(tv_interior(
            d,
            level,
            0.0,
            DEFAULT_REJECTION_BUDGET,
            &mut rng,
        )?)),
    }
}
