//! Alternating projections for `{u : A u = b, every Hermitian block of u ⪰ 0}`.
//!
//! The variable `u` stacks Hermitian blocks in the isometric real layout of
//! [`herm_to_real`], so Euclidean distance on `u` is the sum of Frobenius
//! distances on the blocks.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numerics::{herm_eig, herm_to_real, real_to_herm, CMatrix};
use crate::tolerances;

/// Linear equality system over a product of Hermitian PSD blocks.
#[derive(Clone, Debug)]
pub struct PsdSystem {
    block_sizes: Vec<usize>,
    offsets: Vec<usize>,
    rows: DMatrix<f64>,
    rhs: DVector<f64>,
}

impl PsdSystem {
    pub fn new(block_sizes: Vec<usize>, rows: DMatrix<f64>, rhs: DVector<f64>) -> Result<Self> {
        if block_sizes.is_empty() || block_sizes.contains(&0) {
            return Err(Error::InvalidParameter("block sizes must be nonempty and positive".into()));
        }
        let mut offsets = Vec::with_capacity(block_sizes.len() + 1);
        let mut total = 0;
        for &s in &block_sizes {
            offsets.push(total);
            total += s * s;
        }
        offsets.push(total);
        if rows.ncols() != total {
            return Err(Error::mismatch("constraint columns", total, rows.ncols()));
        }
        if rhs.len() != rows.nrows() {
            return Err(Error::mismatch("constraint right-hand side", rows.nrows(), rhs.len()));
        }
        Ok(PsdSystem {
            block_sizes,
            offsets,
            rows,
            rhs,
        })
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn nvars(&self) -> usize {
        self.offsets[self.block_sizes.len()]
    }

    pub fn nrows(&self) -> usize {
        self.rows.nrows()
    }

    /// `‖A u − b‖₂`.
    pub fn residual(&self, u: &DVector<f64>) -> f64 {
        (&self.rows * u - &self.rhs).norm()
    }

    pub fn blocks(&self, u: &DVector<f64>) -> Vec<CMatrix> {
        self.block_sizes
            .iter()
            .enumerate()
            .map(|(k, &s)| real_to_herm(&u.as_slice()[self.offsets[k]..self.offsets[k + 1]], s))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct PsdSolution {
    pub blocks: Vec<CMatrix>,
    pub residual: f64,
    pub min_eig: f64,
    pub iterations: usize,
}

/// `NotFound` means the budget ran out or the iterates stalled at a positive
/// distance; it is not a proof of infeasibility.
#[derive(Clone, Debug)]
pub enum Feasibility {
    Solved(PsdSolution),
    NotFound { iterations: usize, gap: f64 },
}

/// Step factor `ρ` in `u ← u + ρ(P_C P_A u − u)`; any `ρ ∈ (0, 2)` converges.
const RELAXATION: f64 = 1.8;

/// Iterations over which a stalled projection gap is detected.
pub(crate) const STALL_WINDOW: usize = 200;
/// Relative decrease below which the gap counts as stalled.
pub(crate) const STALL_RATIO: f64 = 1e-3;

/// Tracks the distance between the two projections and flags a stall.
#[derive(Debug, Default)]
pub(crate) struct StallMonitor {
    history: Vec<f64>,
}

impl StallMonitor {
    pub(crate) fn push(&mut self, gap: f64) -> bool {
        self.history.push(gap);
        let k = self.history.len();
        k > STALL_WINDOW && gap >= (1.0 - STALL_RATIO) * self.history[k - 1 - STALL_WINDOW]
    }
}

/// Projects each block onto `{C ⪰ μI}` in place; returns the smallest
/// eigenvalue seen before clipping.
fn project_blocks(sys: &PsdSystem, u: &mut DVector<f64>, mu: f64) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for (k, &s) in sys.block_sizes.iter().enumerate() {
        let range = sys.offsets[k]..sys.offsets[k + 1];
        let block = real_to_herm(&u.as_slice()[range.clone()], s);
        let eig = herm_eig(&block, tolerances::HERMITIAN_OUTPUT)?;
        worst = worst.min(eig.min());
        if eig.min() < mu {
            herm_to_real(&eig.reconstruct_with(|l| l.max(mu)), &mut u.as_mut_slice()[range]);
        }
    }
    Ok(worst)
}

/// Relaxed alternating projections (`ρ = 1.8`) between the affine set
/// (least-squares projection through the pseudo-inverse) and the PSD cone
/// product (eigenvalue clipping), starting from zero.
///
/// A returned solution is an affine-feasible point whose blocks have minimum
/// eigenvalue `≥ −tol`, or a PSD point with residual `≤ tol`.
pub fn psd_feasibility(sys: &PsdSystem, max_iter: usize, tol: f64) -> Result<Feasibility> {
    psd_feasibility_shifted(sys, max_iter, tol, 0.0)
}

/// [`psd_feasibility`] projecting onto `{C ⪰ μI}` instead of the PSD cone.
/// The stopping tests are unchanged, so a solution is still only required to
/// be PSD; the shift pulls the iterates toward the interior, which speeds up
/// systems that have solutions with every block `⪰ μI`.
pub fn psd_feasibility_shifted(sys: &PsdSystem, max_iter: usize, tol: f64, mu: f64) -> Result<Feasibility> {
    if !(mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("shift {mu} must be nonnegative")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let pinv = sys
        .rows
        .clone()
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let project_affine = |u: &DVector<f64>| -> DVector<f64> { u - &pinv * (&sys.rows * u - &sys.rhs) };

    let mut u = DVector::zeros(sys.nvars());
    let mut monitor = StallMonitor::default();
    let mut gap = f64::INFINITY;
    for it in 1..=max_iter {
        let a = project_affine(&u);
        let mut p = a.clone();
        let min_eig = project_blocks(sys, &mut p, mu)?;
        if min_eig >= -tol {
            return Ok(Feasibility::Solved(PsdSolution {
                blocks: sys.blocks(&a),
                residual: sys.residual(&a),
                min_eig,
                iterations: it,
            }));
        }
        let res = sys.residual(&p);
        if res <= tol {
            return Ok(Feasibility::Solved(PsdSolution {
                blocks: sys.blocks(&p),
                residual: res,
                min_eig: 0.0,
                iterations: it,
            }));
        }
        gap = (&a - &p).norm();
        if monitor.push(gap) {
            return Ok(Feasibility::NotFound { iterations: it, gap });
        }
        u = &u + (&p - &u) * RELAXATION;
    }
    Ok(Feasibility::NotFound {
        iterations: max_iter,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::{gaussian_matrix, rng_for};
    use crate::numerics::{frobenius, identity, min_eig};

    fn realified(a: &CMatrix) -> Vec<f64> {
        let mut v = vec![0.0; a.nrows() * a.nrows()];
        herm_to_real(a, &mut v);
        v
    }

    #[test]
    fn identity_constraint() {
        // C = I as s² scalar equations.
        let s = 3;
        let sys = PsdSystem::new(
            vec![s],
            DMatrix::identity(s * s, s * s),
            DVector::from_vec(realified(&identity(s))),
        )
        .unwrap();
        match psd_feasibility(&sys, 100, 1e-10).unwrap() {
            Feasibility::Solved(sol) => {
                assert!(frobenius(&(&sol.blocks[0] - identity(s))) < 1e-12);
                assert_eq!(sol.iterations, 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_trace_is_not_found() {
        let sys = PsdSystem::new(vec![1], DMatrix::from_element(1, 1, 1.0), DVector::from_element(1, -1.0)).unwrap();
        match psd_feasibility(&sys, 10_000, 1e-8).unwrap() {
            Feasibility::NotFound { gap, .. } => assert!((gap - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shifted_cone_on_the_simplex() {
        // c_1 + c_2 + c_3 = 1 with scalar blocks. The shift only steers the
        // iterates; a too-large shift still ends at the PSD point (1/3, 1/3, 1/3).
        let sys = PsdSystem::new(vec![1, 1, 1], DMatrix::from_element(1, 3, 1.0), DVector::from_element(1, 1.0)).unwrap();
        match psd_feasibility_shifted(&sys, 10_000, 1e-8, 0.2).unwrap() {
            Feasibility::Solved(sol) => {
                assert!(sol.residual <= 1e-8);
                assert!(sol.min_eig >= -1e-8);
            }
            other => panic!("{other:?}"),
        }
        match psd_feasibility_shifted(&sys, 10_000, 1e-8, 0.5).unwrap() {
            Feasibility::Solved(sol) => {
                for b in &sol.blocks {
                    assert!((b[(0, 0)].re - 1.0 / 3.0).abs() < 1e-12);
                }
            }
            other => panic!("{other:?}"),
        }
        let infeasible =
            PsdSystem::new(vec![1, 1, 1], DMatrix::from_element(1, 3, 1.0), DVector::from_element(1, -1.0)).unwrap();
        assert!(matches!(
            psd_feasibility_shifted(&infeasible, 10_000, 1e-8, 0.1).unwrap(),
            Feasibility::NotFound { .. }
        ));
        assert!(psd_feasibility_shifted(&sys, 10, 1e-8, -1.0).is_err());
    }

    #[test]
    fn planted_three_block_system() {
        let mut rng = rng_for(11, 0);
        let sizes = vec![2, 3, 2];
        let planted: Vec<CMatrix> = sizes
            .iter()
            .map(|&s| {
                let g = gaussian_matrix(s, s, &mut rng);
                &g * g.adjoint() + identity(s).scale(0.5)
            })
            .collect();
        let u0: Vec<f64> = planted.iter().flat_map(realified).collect();
        let n = u0.len();
        let m = 8;
        let rows = DMatrix::from_fn(m, n, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let rhs = &rows * DVector::from_vec(u0);
        let sys = PsdSystem::new(sizes, rows, rhs).unwrap();
        match psd_feasibility(&sys, 100_000, 1e-8).unwrap() {
            Feasibility::Solved(sol) => {
                let u: Vec<f64> = sol.blocks.iter().flat_map(realified).collect();
                assert!(sys.residual(&DVector::from_vec(u)) <= 1e-8);
                for b in &sol.blocks {
                    assert!(min_eig(b).unwrap() >= -1e-8);
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(PsdSystem::new(vec![2], DMatrix::zeros(1, 3), DVector::zeros(1)).is_err());
        assert!(PsdSystem::new(vec![], DMatrix::zeros(1, 0), DVector::zeros(1)).is_err());
    }
}
