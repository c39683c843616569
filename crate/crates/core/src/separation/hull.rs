//! Matrix convex hull membership through Choi matrices, and the level-one
//! linear-programming oracles.

use nalgebra::{DMatrix, DVector};

use super::feasibility::{psd_feasibility_shifted, Feasibility, PsdSystem};
use crate::error::{Error, Result};
use crate::gamma::GammaMap;
use crate::ncpoly::{FreePoly, HermitianTuple};
use crate::numerics::lp::{LinearProgram, LpOutcome};
use crate::numerics::{frobenius, herm_to_real, identity, min_eig, re, real_to_herm, zeros, CMatrix, C64};
use crate::tolerances;

/// `Φ(X) = Σ_{a,b} X_{ab} C_{ab}` where `C_{ab}` is the `(a, b)` block of
/// size `ℓ × ℓ` of the Choi matrix `C = Σ E_{ab} ⊗ Φ(E_{ab})`.
pub fn apply_choi(c: &CMatrix, n: usize, l: usize, x: &CMatrix) -> CMatrix {
    let mut out = zeros(l, l);
    for a in 0..n {
        for b in 0..n {
            let xab = x[(a, b)];
            if xab != C64::new(0.0, 0.0) {
                out += c.view((a * l, b * l), (l, l)) * xab;
            }
        }
    }
    out
}

/// Choi matrices of completely positive maps `Φ_i` with
/// `Σ Φ_i(Z^i_j) = W_j` and `Σ Φ_i(I) = I`.
#[derive(Clone, Debug)]
pub struct MembershipWitness {
    pub choi: Vec<CMatrix>,
    /// Frobenius residual of the unital equation, then one per coordinate.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl MembershipWitness {
    pub fn min_eig(&self) -> Result<f64> {
        self.choi
            .iter()
            .map(min_eig)
            .try_fold(f64::INFINITY, |acc, e| Ok(acc.min(e?)))
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub enum HullMembership {
    Inside(MembershipWitness),
    /// No witness within the budget; not a proof that `W` is outside.
    NotVerified { iterations: usize, gap: f64 },
}

impl HullMembership {
    pub fn is_inside(&self) -> bool {
        matches!(self, HullMembership::Inside(_))
    }
}

pub(crate) fn check_generators(z: &[HermitianTuple]) -> Result<usize> {
    let r = z.first().ok_or(Error::EmptyInput("hull generators"))?.width();
    for p in z {
        if p.width() != r {
            return Err(Error::mismatch("generator width", r, p.width()));
        }
    }
    Ok(r)
}

fn realified(a: &CMatrix) -> Vec<f64> {
    let mut v = vec![0.0; a.nrows() * a.nrows()];
    herm_to_real(a, &mut v);
    v
}

/// Residuals of the Choi equations, recomputed from the blocks.
pub fn choi_residuals(z: &[HermitianTuple], w: &HermitianTuple, choi: &[CMatrix]) -> Vec<f64> {
    let l = w.level();
    let total = |pick: &dyn Fn(&HermitianTuple) -> CMatrix| {
        z.iter()
            .zip(choi)
            .fold(zeros(l, l), |acc, (p, c)| acc + apply_choi(c, p.level(), l, &pick(p)))
    };
    let mut out = vec![frobenius(&(total(&|p| identity(p.level())) - identity(l)))];
    for j in 0..w.width() {
        out.push(frobenius(&(total(&|p| p.entry(j).clone()) - w.entry(j))));
    }
    out
}

/// Decides `W ∈ matco(Z)` at level `ℓ = W.level()` by alternating
/// projections on the Choi formulation, first onto shifted cones `C ⪰ μI`
/// (`μ = 10⁻³, 10⁻⁵` over the total block size, at most a quarter of
/// `max_iter` each), then onto the PSD cone with the remaining iterations.
/// Witness invariants: each Choi block
/// has minimum eigenvalue `≥ −tol`, residuals `≤ 1e-6`.
pub fn hull_membership(z: &[HermitianTuple], w: &HermitianTuple, tol: f64, max_iter: usize) -> Result<HullMembership> {
    let r = check_generators(z)?;
    if w.width() != r {
        return Err(Error::mismatch("test point width", r, w.width()));
    }
    let l = w.level();
    let l2 = l * l;
    let nrows = (r + 1) * l2;
    let sizes: Vec<usize> = z.iter().map(|p| p.level() * l).collect();
    let ncols: usize = sizes.iter().map(|s| s * s).sum();

    let mut rows = DMatrix::zeros(nrows, ncols);
    let mut col = 0;
    let mut unit = Vec::new();
    let mut buf = vec![0.0; l2];
    for (p, &s) in z.iter().zip(&sizes) {
        let n = p.level();
        let inputs: Vec<CMatrix> = std::iter::once(identity(n)).chain(p.entries().iter().cloned()).collect();
        unit.clear();
        unit.resize(s * s, 0.0);
        for k in 0..s * s {
            unit[k] = 1.0;
            let e = real_to_herm(&unit, s);
            unit[k] = 0.0;
            for (j, x) in inputs.iter().enumerate() {
                herm_to_real(&apply_choi(&e, n, l, x), &mut buf);
                for (i, v) in buf.iter().enumerate() {
                    rows[(j * l2 + i, col)] = *v;
                }
            }
            col += 1;
        }
    }
    let rhs: Vec<f64> = std::iter::once(identity(l))
        .chain(w.entries().iter().cloned())
        .flat_map(|m| realified(&m))
        .collect();
    let sys = PsdSystem::new(sizes, rows, DVector::from_vec(rhs))?;
    // Interior points have witnesses with every block ⪰ μI for some μ > 0;
    // shifted attempts converge fast there and stall quickly otherwise.
    let total: usize = sys.block_sizes().iter().sum();
    let mut outcome = Feasibility::NotFound { iterations: 0, gap: f64::INFINITY };
    let mut left = max_iter.max(1);
    for mu in [1e-3, 1e-5, 0.0] {
        let budget = if mu > 0.0 { (max_iter / 4).clamp(1, left) } else { left };
        outcome = psd_feasibility_shifted(&sys, budget, tol, mu / total as f64)?;
        match &outcome {
            Feasibility::Solved(_) => break,
            Feasibility::NotFound { iterations, .. } => left = left.saturating_sub(*iterations).max(1),
        }
    }
    match outcome {
        Feasibility::Solved(sol) => {
            let residuals = choi_residuals(z, w, &sol.blocks);
            let witness = MembershipWitness {
                choi: sol.blocks,
                residuals,
                iterations: sol.iterations,
            };
            if witness.max_residual() > 1e-6 || witness.min_eig()? < -tol {
                return Ok(HullMembership::NotVerified {
                    iterations: witness.iterations,
                    gap: witness.max_residual(),
                });
            }
            Ok(HullMembership::Inside(witness))
        }
        Feasibility::NotFound { iterations, gap } => Ok(HullMembership::NotVerified { iterations, gap }),
    }
}

fn check_points(points: &[Vec<f64>], w: &[f64]) -> Result<usize> {
    if points.is_empty() {
        return Err(Error::EmptyInput("level-one points"));
    }
    let r = w.len();
    for p in points {
        if p.len() != r {
            return Err(Error::mismatch("point dimension", r, p.len()));
        }
    }
    Ok(r)
}

/// Classical convex hull membership: feasibility of convex weights `λ` with
/// `Σ λ_i p_i = w`.
pub fn level1_hull_oracle(points: &[Vec<f64>], w: &[f64]) -> Result<bool> {
    let r = check_points(points, w)?;
    let k = points.len();
    let mut lp = LinearProgram::new(vec![0.0; k]);
    for j in 0..r {
        lp.eq(points.iter().map(|p| p[j]).collect(), w[j]);
    }
    lp.eq(vec![1.0; k], 1.0);
    Ok(matches!(lp.solve()?, LpOutcome::Optimal { .. }))
}

/// Gauge of `w` for `conv(points ∪ {0})`: the largest `s` with `s·w` in the
/// hull. `None` when unbounded (`w = 0` or along a recession direction).
pub fn level1_gauge(points: &[Vec<f64>], w: &[f64]) -> Result<Option<f64>> {
    let r = check_points(points, w)?;
    let k = points.len();
    let mut objective = vec![0.0; k + 1];
    objective[k] = -1.0;
    let mut lp = LinearProgram::new(objective);
    for j in 0..r {
        let mut row: Vec<f64> = points.iter().map(|p| p[j]).collect();
        row.push(-w[j]);
        lp.eq(row, 0.0);
    }
    let mut sum = vec![1.0; k];
    sum.push(0.0);
    lp.le(sum, 1.0);
    match lp.solve()? {
        LpOutcome::Optimal { value, .. } => Ok(Some(-value)),
        LpOutcome::Unbounded => Ok(None),
        LpOutcome::Infeasible => Err(Error::PreconditionViolated("gauge program infeasible".into())),
    }
}

/// Level-one compression `(h* γ_j(Y) h)_j` of a Γ-image.
pub fn compression_point(gmap: &GammaMap, y: &HermitianTuple, h: &DVector<C64>) -> Result<Vec<f64>> {
    if h.len() != y.level() {
        return Err(Error::mismatch("compression vector length", y.level(), h.len()));
    }
    let image = gmap.eval(y)?;
    Ok(image
        .entries()
        .iter()
        .map(|m| (h.adjoint() * m * h)[(0, 0)].re)
        .collect())
}

#[derive(Clone, Debug)]
pub enum PositiveCombination {
    /// `λ·z ≥ −1e-10` on every point and `q = Σ λ_j γ_j`.
    Found { lambda: Vec<f64>, q: FreePoly },
    ZeroInInterior,
}

fn combination(gmap: &GammaMap, lambda: Vec<f64>) -> Result<PositiveCombination> {
    let mut q = FreePoly::zero(gmap.g());
    for (l, gamma) in lambda.iter().zip(gmap.coords()) {
        if *l != 0.0 {
            q = q.add(&gamma.scale(re(*l)))?;
        }
    }
    Ok(PositiveCombination::Found { lambda, q })
}

/// A nonzero `λ` with `λ·z ≥ 0` on the given level-one points, or the report
/// that `0` is interior to their convex hull.
///
/// Coordinate directions `±e_j` are tried first, then a null direction when
/// the points span a proper subspace, then a linear program maximizing
/// `Σ_i λ·z_i` over the box `|λ_j| ≤ 1`.
pub fn find_positive_polynomial(gmap: &GammaMap, points: &[Vec<f64>]) -> Result<PositiveCombination> {
    let r = gmap.r();
    if points.is_empty() {
        return Err(Error::EmptyInput("level-one points"));
    }
    for p in points {
        if p.len() != r {
            return Err(Error::mismatch("point dimension", r, p.len()));
        }
    }
    let scale = points.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale <= 1e-12 {
        return Err(Error::InvalidParameter("degenerate hull: all points are numerically zero".into()));
    }
    let tol = tolerances::STAR_LIKE;

    for j in 0..r {
        for sign in [1.0, -1.0] {
            if points.iter().all(|p| sign * p[j] >= -tol) {
                let mut lambda = vec![0.0; r];
                lambda[j] = sign;
                return combination(gmap, lambda);
            }
        }
    }

    // A rank-deficient Gram matrix means the points span a proper subspace.
    let pm = DMatrix::from_fn(points.len(), r, |i, j| points[i][j]);
    let gram = (pm.transpose() * &pm).symmetric_eigen();
    let (imin, emin) = gram
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &e)| if e < acc.1 { (i, e) } else { acc });
    if emin <= 1e-20 * gram.eigenvalues.max() {
        return combination(gmap, gram.eigenvectors.column(imin).iter().copied().collect());
    }

    // Variables λ⁺, λ⁻ ≥ 0.
    let mut objective = vec![0.0; 2 * r];
    for p in points {
        for j in 0..r {
            objective[j] -= p[j];
            objective[r + j] += p[j];
        }
    }
    let mut lp = LinearProgram::new(objective);
    for p in points {
        let mut row = vec![0.0; 2 * r];
        for j in 0..r {
            row[j] = -p[j];
            row[r + j] = p[j];
        }
        lp.le(row, 0.0);
    }
    for j in 0..2 * r {
        let mut row = vec![0.0; 2 * r];
        row[j] = 1.0;
        lp.le(row, 1.0);
    }
    match lp.solve()? {
        LpOutcome::Optimal { x, value } if -value > 1e-9 * scale => {
            let lambda: Vec<f64> = (0..r).map(|j| x[j] - x[r + j]).collect();
            let norm = lambda.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            combination(gmap, lambda.iter().map(|v| v / norm).collect())
        }
        LpOutcome::Optimal { .. } => Ok(PositiveCombination::ZeroInInterior),
        LpOutcome::Infeasible | LpOutcome::Unbounded => {
            Err(Error::PreconditionViolated("positive-combination program is ill-posed".into()))
        }
    }
}
