//! Separating monic pencils: `M ⪰ 0` on the generators, `M(W)` indefinite.
//!
//! The search looks for Hermitian `A_0, …, A_r` of size `ℓ` with
//! `L_A(Z^i) ⪰ 0` for every generator and `tr(A_0) + Σ_j tr(A_j W_jᵀ) = −1`.
//! With `e = Σ_k e_k ⊗ e_k` the second condition reads `e* L_A(W) e = −1`, so
//! `L_A(W)` has an eigenvalue `≤ −1/ℓ`. Feasibility is attacked by
//! alternating projections on the graph `{(A, S) : S_i = L_A(Z^i)}`. Any
//! iterate whose hull margin exceeds its outlier eigenvalue is turned into a
//! certificate by shifting `A_0` and scaling to monic form.

use nalgebra::{DMatrix, DVector};

use super::feasibility::StallMonitor;
use super::hull::check_generators;
use crate::error::{Error, Result};
use crate::gamma::{FreeSetSample, GammaMap};
use crate::ncpoly::HermitianTuple;
use crate::numerics::lp::{LinearProgram, LpOutcome};
use crate::numerics::{herm_eig, herm_to_real, identity, kron, min_eig, real_to_herm, CMatrix};
use crate::pencil::GammaPencil;
use crate::tolerances;

/// Where to put the hull margin when shifting `A_0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftPolicy {
    /// Split the gap evenly: hull margin `gap/2`, outlier `−gap/2` before scaling.
    #[default]
    Balanced,
    /// Hull margin `0`, the whole gap on the outlier; fails when `A_0` ends up singular.
    Tight,
}

/// Method used to search for the raw coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// Alternating projections on the graph of `A ↦ (L_A(Z^i))_i`.
    #[default]
    Projections,
    /// Kelley cutting planes: maximize the worst generator eigenvalue over a
    /// growing set of eigenvector cuts with a dense LP. Meant for small `ℓ`,
    /// where it converges on thin feasible sets that stall the projections.
    CuttingPlane,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationOptions {
    pub delta: f64,
    /// Iteration budget; the cutting-plane solver caps it at 2000 LPs.
    pub budget: usize,
    pub policy: ShiftPolicy,
    pub solver: Solver,
    /// Raw coefficients `A_0, …, A_r` to start the projections from, such as
    /// [`SeparationCertificate::raw`] of a nearby instance.
    pub warm_start: Option<Vec<CMatrix>>,
    /// A generator of the same level as `W` where the pencil must be
    /// singular, up to `λ_min ≤ 1e-3` after the monic scaling. Adds
    /// `e* L_A(anchor) e = 2e-4` to the affine constraints; use
    /// with [`ShiftPolicy::Tight`]. For [`separate_gamma_with`] the anchor is
    /// given in the free variables and mapped through `Γ`.
    pub anchor: Option<HermitianTuple>,
}

impl Default for SeparationOptions {
    fn default() -> Self {
        SeparationOptions {
            delta: 1e-4,
            budget: 100_000,
            policy: ShiftPolicy::Balanced,
            solver: Solver::Projections,
            warm_start: None,
            anchor: None,
        }
    }
}

/// A monic linear pencil of size `ℓ` in `r` variables with its margins.
#[derive(Clone, Debug)]
pub struct SeparationCertificate {
    pub pencil: GammaPencil,
    /// `min_i λ_min(M(Z^i))`, at least `−1e-8`.
    pub hull_margin: f64,
    /// `λ_min(M(W))`, at most `−δ`.
    pub outlier_eig: f64,
    pub delta: f64,
    pub iterations: usize,
    /// Solver iterate before the shift and monic scaling.
    pub raw: Vec<CMatrix>,
}

/// Margins recomputed from scratch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertificateCheck {
    pub hull_margin: f64,
    pub outlier_eig: f64,
    pub monic: bool,
    pub size: usize,
}

impl CertificateCheck {
    pub fn passes(&self, delta: f64, level: usize) -> bool {
        self.monic
            && self.size == level
            && self.hull_margin >= -tolerances::CERTIFICATE_HULL
            && self.outlier_eig <= -delta
    }
}

/// Re-evaluates a linear pencil on every generator and on `W`, using a
/// fresh Kronecker evaluation and eigensolve.
pub fn recheck_pencil(pencil: &GammaPencil, z: &[HermitianTuple], w: &HermitianTuple) -> Result<CertificateCheck> {
    let mut hull_margin = f64::INFINITY;
    for p in z {
        hull_margin = hull_margin.min(min_eig(&pencil.eval_linear(p)?)?);
    }
    Ok(CertificateCheck {
        hull_margin,
        outlier_eig: min_eig(&pencil.eval_linear(w)?)?,
        monic: pencil.is_monic(),
        size: pencil.size(),
    })
}

impl SeparationCertificate {
    pub fn recheck(&self, z: &[HermitianTuple], w: &HermitianTuple) -> Result<CertificateCheck> {
        recheck_pencil(&self.pencil, z, w)
    }
}

/// `NotFound` is failure within budget, never a claim of membership.
#[derive(Clone, Debug)]
pub enum Separation<C> {
    Found(C),
    NotFound { iterations: usize, gap: f64 },
}

impl<C> Separation<C> {
    pub fn found(&self) -> Option<&C> {
        match self {
            Separation::Found(c) => Some(c),
            Separation::NotFound { .. } => None,
        }
    }
}

struct GraphProjector {
    l: usize,
    r: usize,
    /// Realified `A ↦ L_A(Z^i)` for each generator.
    maps: Vec<DMatrix<f64>>,
    sizes: Vec<usize>,
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    /// Affine rows `C a = d`: the outlier row, then the optional anchor row.
    cons: DMatrix<f64>,
    rhs: DVector<f64>,
    /// `H⁻¹ Cᵀ` and `(C H⁻¹ Cᵀ)⁻¹`.
    h_ct: DMatrix<f64>,
    schur_inv: DMatrix<f64>,
}

/// Value of `e* L_A(anchor) e` on the raw scale where `e* L_A(W) e = −1`;
/// a small positive slack gives the feasible set an interior.
const ANCHOR_SLACK: f64 = 2e-4;

/// Realified `a ↦ e* L_A(W) e`.
fn functional_row(w: &HermitianTuple, l2: usize) -> DVector<f64> {
    let l = w.level();
    let mut c = DVector::zeros((w.width() + 1) * l2);
    herm_to_real(&identity(l), &mut c.as_mut_slice()[..l2]);
    for j in 0..w.width() {
        let wt = w.entry(j).transpose();
        herm_to_real(&wt, &mut c.as_mut_slice()[(j + 1) * l2..(j + 2) * l2]);
    }
    c
}

impl GraphProjector {
    fn new(z: &[HermitianTuple], w: &HermitianTuple, anchor: Option<&HermitianTuple>) -> Result<Self> {
        let l = w.level();
        let r = w.width();
        let l2 = l * l;
        let dim = (r + 1) * l2;
        let mut unit = vec![0.0; l2];
        let basis: Vec<CMatrix> = (0..l2)
            .map(|k| {
                unit[k] = 1.0;
                let e = real_to_herm(&unit, l);
                unit[k] = 0.0;
                e
            })
            .collect();
        let mut maps = Vec::with_capacity(z.len());
        let mut sizes = Vec::with_capacity(z.len());
        for p in z {
            let n = p.level();
            let s = l * n;
            let mut g = DMatrix::zeros(s * s, dim);
            let mut buf = vec![0.0; s * s];
            for col in 0..dim {
                let (j, k) = (col / l2, col % l2);
                let x = if j == 0 { identity(n) } else { p.entry(j - 1).clone() };
                herm_to_real(&kron(&basis[k], &x), &mut buf);
                g.column_mut(col).copy_from_slice(&buf);
            }
            maps.push(g);
            sizes.push(s);
        }
        let mut h = DMatrix::identity(dim, dim);
        for g in &maps {
            h += g.transpose() * g;
        }
        let chol = h
            .cholesky()
            .ok_or(Error::NotPositiveDefinite { min_eig: f64::NAN })?;
        let mut rows = vec![functional_row(w, l2)];
        let mut rhs = vec![-1.0];
        if let Some(b) = anchor {
            rows.push(functional_row(b, l2));
            rhs.push(ANCHOR_SLACK);
        }
        let cons = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
        let h_ct = chol.solve(&cons.transpose());
        let schur_inv = (&cons * &h_ct)
            .try_inverse()
            .ok_or_else(|| Error::PreconditionViolated("anchor constraint is parallel to the outlier".into()))?;
        Ok(GraphProjector {
            l,
            r,
            maps,
            sizes,
            chol,
            cons,
            rhs: DVector::from_vec(rhs),
            h_ct,
            schur_inv,
        })
    }

    fn dim(&self) -> usize {
        self.cons.ncols()
    }

    /// Nearest `(a, G a)` to `(a, s)` subject to `C a = d`.
    fn project(&self, a: &DVector<f64>, s: &[DVector<f64>]) -> DVector<f64> {
        let mut rhs = a.clone();
        for (g, si) in self.maps.iter().zip(s) {
            rhs += g.tr_mul(si);
        }
        let y = self.chol.solve(&rhs);
        let mu = &self.schur_inv * (&self.cons * &y - &self.rhs);
        y - &self.h_ct * mu
    }

    fn coeffs(&self, a: &DVector<f64>) -> Vec<CMatrix> {
        let l2 = self.l * self.l;
        (0..=self.r)
            .map(|j| real_to_herm(&a.as_slice()[j * l2..(j + 1) * l2], self.l))
            .collect()
    }
}

fn contains_zero(z: &[HermitianTuple]) -> bool {
    z.iter().any(|p| p.max_norm() == 0.0)
}

/// Separating monic pencil of size `ℓ = W.level()` with the balanced shift.
pub fn find_separating_pencil(
    z: &[HermitianTuple],
    w: &HermitianTuple,
    delta: f64,
    budget: usize,
) -> Result<Separation<SeparationCertificate>> {
    find_separating_pencil_with(
        z,
        w,
        &SeparationOptions {
            delta,
            budget,
            ..Default::default()
        },
    )
}

pub fn find_separating_pencil_with(
    z: &[HermitianTuple],
    w: &HermitianTuple,
    opts: &SeparationOptions,
) -> Result<Separation<SeparationCertificate>> {
    let r = check_generators(z)?;
    if w.width() != r {
        return Err(Error::mismatch("test point width", r, w.width()));
    }
    if !contains_zero(z) {
        return Err(Error::PreconditionViolated("generators must include the zero tuple".into()));
    }
    if !(opts.delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta {} must be positive", opts.delta)));
    }
    if let Some(b) = &opts.anchor {
        if b.width() != r || b.level() != w.level() {
            return Err(Error::mismatch("anchor level", w.level(), b.level()));
        }
    }
    let proj = GraphProjector::new(z, w, opts.anchor.as_ref())?;
    let mut a = DVector::zeros(proj.dim());
    let mut s: Vec<DVector<f64>> = proj.sizes.iter().map(|k| DVector::zeros(k * k)).collect();
    let mut hull = f64::INFINITY;
    if let Some(warm) = &opts.warm_start {
        if warm.len() != r + 1 || warm.iter().any(|m| m.nrows() != proj.l || m.ncols() != proj.l) {
            return Err(Error::mismatch("warm start coefficients", r + 1, warm.len()));
        }
        let l2 = proj.l * proj.l;
        for (j, m) in warm.iter().enumerate() {
            herm_to_real(m, &mut a.as_mut_slice()[j * l2..(j + 1) * l2]);
        }
        for ((g, si), &size) in proj.maps.iter().zip(s.iter_mut()).zip(&proj.sizes) {
            let v = g * &a;
            let eig = herm_eig(&real_to_herm(v.as_slice(), size), tolerances::HERMITIAN_OUTPUT)?;
            herm_to_real(&eig.reconstruct_with(|x| x.max(0.0)), si.as_mut_slice());
            hull = hull.min(eig.min());
        }
        if let Some(cert) = try_certificate(&proj, &a, hull, z, w, opts, 0)? {
            return Ok(Separation::Found(cert));
        }
    }
    match opts.solver {
        Solver::Projections => projections(&proj, a, s, z, w, opts),
        Solver::CuttingPlane => cutting_planes(&proj, z, w, opts),
    }
}

fn projections(
    proj: &GraphProjector,
    mut a: DVector<f64>,
    mut s: Vec<DVector<f64>>,
    z: &[HermitianTuple],
    w: &HermitianTuple,
    opts: &SeparationOptions,
) -> Result<Separation<SeparationCertificate>> {
    let mut monitor = StallMonitor::default();
    let mut gap = f64::INFINITY;

    for it in 1..=opts.budget {
        a = proj.project(&a, &s);
        let mut hull = f64::INFINITY;
        let mut dist2 = 0.0;
        for ((g, si), &size) in proj.maps.iter().zip(s.iter_mut()).zip(&proj.sizes) {
            let v = g * &a;
            let eig = herm_eig(&real_to_herm(v.as_slice(), size), tolerances::HERMITIAN_OUTPUT)?;
            hull = hull.min(eig.min());
            if eig.min() < 0.0 {
                herm_to_real(&eig.reconstruct_with(|x| x.max(0.0)), si.as_mut_slice());
                dist2 += (&v - &*si).norm_squared();
            } else {
                si.copy_from(&v);
            }
        }
        if let Some(cert) = try_certificate(proj, &a, hull, z, w, opts, it)? {
            return Ok(Separation::Found(cert));
        }
        gap = dist2.sqrt();
        if monitor.push(gap) {
            return Ok(Separation::NotFound { iterations: it, gap });
        }
    }
    Ok(Separation::NotFound {
        iterations: opts.budget,
        gap,
    })
}

const MAX_CUTTING_PLANES: usize = 2000;
/// Box on the raw coefficients, which live on the scale `e* L_A(W) e = −1`.
const CUT_BOX: f64 = 1e3;
/// Violated generators turned into new cuts per round, worst first.
const CUTS_PER_ROUND: usize = 8;

/// `maximize t` over `C a = d`, `|a_k| ≤ CUT_BOX`, `t ≤ 1` and `v* L_a(Z^i) v ≥ t`
/// for every accumulated cut `(i, v)`. Each LP optimum is tested as a
/// certificate; the worst eigenvectors of violated generators become new
/// cuts. A negative optimum means no separating pencil exists in the box.
fn cutting_planes(
    proj: &GraphProjector,
    z: &[HermitianTuple],
    w: &HermitianTuple,
    opts: &SeparationOptions,
) -> Result<Separation<SeparationCertificate>> {
    let dim = proj.dim();
    let nv = 2 * dim + 2;
    let mut objective = vec![0.0; nv];
    objective[2 * dim] = -1.0;
    objective[2 * dim + 1] = 1.0;
    let mut base = LinearProgram::new(objective);
    for (row, &d) in proj.cons.row_iter().zip(proj.rhs.iter()) {
        let mut r = vec![0.0; nv];
        for k in 0..dim {
            r[k] = row[k];
            r[dim + k] = -row[k];
        }
        base.eq(r, d);
    }
    for k in 0..2 * dim {
        let mut r = vec![0.0; nv];
        r[k] = 1.0;
        base.le(r, CUT_BOX);
    }
    let mut r = vec![0.0; nv];
    r[2 * dim] = 1.0;
    base.le(r, 1.0);

    let cut = |i: usize, v: &CMatrix| -> Vec<f64> {
        let size = proj.sizes[i];
        let mut vv = vec![0.0; size * size];
        herm_to_real(&(v * v.adjoint()), &mut vv);
        let g = proj.maps[i].tr_mul(&DVector::from_vec(vv));
        let mut r = vec![0.0; nv];
        for k in 0..dim {
            r[k] = -g[k];
            r[dim + k] = g[k];
        }
        r[2 * dim] = 1.0;
        r[2 * dim + 1] = -1.0;
        r
    };
    let zero = z.iter().position(|p| p.max_norm() == 0.0).expect("zero generator checked");
    let mut lp = base;
    for k in 0..proj.sizes[zero] {
        let mut v = CMatrix::zeros(proj.sizes[zero], 1);
        v[(k, 0)] = 1.0.into();
        lp.le(cut(zero, &v), 0.0);
    }

    let rounds = opts.budget.min(MAX_CUTTING_PLANES);
    let mut gap = f64::INFINITY;
    for it in 1..=rounds {
        let x = match lp.solve()? {
            LpOutcome::Optimal { x, .. } => x,
            LpOutcome::Infeasible | LpOutcome::Unbounded => {
                return Ok(Separation::NotFound { iterations: it, gap });
            }
        };
        let t = x[2 * dim] - x[2 * dim + 1];
        let a = DVector::from_fn(dim, |k, _| x[k] - x[dim + k]);
        let mut hull = f64::INFINITY;
        let mut violated = Vec::new();
        for (i, (g, &size)) in proj.maps.iter().zip(&proj.sizes).enumerate() {
            let eig = herm_eig(&real_to_herm((g * &a).as_slice(), size), tolerances::HERMITIAN_OUTPUT)?;
            hull = hull.min(eig.min());
            if eig.min() < t - 1e-12 {
                violated.push((eig.min(), i, eig.vectors.columns(0, 1).into_owned()));
            }
        }
        if let Some(cert) = try_certificate(proj, &a, hull, z, w, opts, it)? {
            return Ok(Separation::Found(cert));
        }
        gap = t - hull;
        if t < -tolerances::CERTIFICATE_HULL || violated.is_empty() {
            return Ok(Separation::NotFound { iterations: it, gap });
        }
        violated.sort_by(|p, q| p.0.total_cmp(&q.0));
        for (_, i, v) in violated.into_iter().take(CUTS_PER_ROUND) {
            lp.le(cut(i, &v), 0.0);
        }
    }
    Ok(Separation::NotFound { iterations: rounds, gap })
}

/// Shift `A_0` so the hull margin sits at the policy's target, scale to monic
/// form, and keep the result if the recomputed margins qualify.
fn try_certificate(
    proj: &GraphProjector,
    a: &DVector<f64>,
    hull: f64,
    z: &[HermitianTuple],
    w: &HermitianTuple,
    opts: &SeparationOptions,
    iterations: usize,
) -> Result<Option<SeparationCertificate>> {
    let raw = proj.coeffs(a);
    let mut coeffs = raw.clone();
    let outlier = min_eig(&GammaPencil::linear(coeffs.clone())?.eval_linear(w)?)?;
    let gap = hull - outlier;
    if !(gap > 0.0) {
        return Ok(None);
    }
    let shift = match opts.policy {
        ShiftPolicy::Balanced => gap / 2.0 - hull,
        ShiftPolicy::Tight => -hull,
    };
    coeffs[0] += identity(proj.l).scale(shift);
    let a0 = herm_eig(&coeffs[0], tolerances::HERMITIAN_OUTPUT)?;
    if a0.min() <= tolerances::MONIC_PIVOT {
        return Ok(None);
    }
    // λ_min of the monic form is at most (outlier + shift) / λ_max(A_0).
    if (outlier + shift) / a0.max() > -opts.delta {
        return Ok(None);
    }
    let pencil = GammaPencil::linear(coeffs)?.make_monic()?;
    let check = recheck_pencil(&pencil, z, w)?;
    if !check.passes(opts.delta, w.level()) {
        return Ok(None);
    }
    if let Some(b) = &opts.anchor {
        if min_eig(&pencil.eval_linear(b)?)? > tolerances::LIMIT_BOUNDARY {
            return Ok(None);
        }
    }
    Ok(Some(SeparationCertificate {
        pencil,
        hull_margin: check.hull_margin,
        outlier_eig: check.outlier_eig,
        delta: opts.delta,
        iterations,
        raw,
    }))
}

/// Separation of `Y` from a sampled free set through its Γ-image.
#[derive(Clone, Debug)]
pub struct GammaCertificate {
    /// Strictified monic Γ-pencil of size `Y.level()`.
    pub pencil: GammaPencil,
    /// Certificate for the Γ-images before composition.
    pub linear: SeparationCertificate,
    pub strict_t: f64,
    /// `min λ_min(L(X))` over the sample points, at least `strict_t − 1e-9`.
    pub sample_margin: f64,
    pub outlier_eig: f64,
}

impl GammaCertificate {
    /// Recomputes sample and outlier margins through the Γ-map.
    pub fn recheck(&self, k: &FreeSetSample, y: &HermitianTuple) -> Result<(f64, f64)> {
        let mut m = f64::INFINITY;
        for p in k.points() {
            m = m.min(self.pencil.min_eig_at(p)?);
        }
        Ok((m, self.pencil.min_eig_at(y)?))
    }
}

/// Maps the sample and `Y` through `Γ`, separates the images, reads the
/// result as a Γ-pencil and strictifies it so `L ≻ 0` on the sample while
/// `λ_min(L(Y)) ≤ −δ` is kept.
pub fn separate_gamma(
    gmap: &GammaMap,
    k: &FreeSetSample,
    y: &HermitianTuple,
    delta: f64,
    budget: usize,
) -> Result<Separation<GammaCertificate>> {
    separate_gamma_with(
        gmap,
        k,
        y,
        &SeparationOptions {
            delta,
            budget,
            ..Default::default()
        },
    )
}

pub fn separate_gamma_with(
    gmap: &GammaMap,
    k: &FreeSetSample,
    y: &HermitianTuple,
    opts: &SeparationOptions,
) -> Result<Separation<GammaCertificate>> {
    let delta = opts.delta;
    if !gmap.vanishes_at_zero() {
        return Err(Error::PreconditionViolated("Γ must vanish at 0".into()));
    }
    if !k.contains_zero() {
        return Err(Error::PreconditionViolated("the sample must contain 0".into()));
    }
    if k.width() != gmap.g() || y.width() != gmap.g() {
        return Err(Error::mismatch("free variable count", gmap.g(), y.width().max(k.width())));
    }
    let z: Vec<HermitianTuple> = k.points().iter().map(|p| gmap.eval(p)).collect::<Result<_>>()?;
    let w = gmap.eval(y)?;
    let mut inner = opts.clone();
    inner.anchor = opts.anchor.as_ref().map(|b| gmap.eval(b)).transpose()?;
    let linear = match find_separating_pencil_with(&z, &w, &inner)? {
        Separation::Found(c) => c,
        Separation::NotFound { iterations, gap } => return Ok(Separation::NotFound { iterations, gap }),
    };
    let base = GammaPencil::from_computed(gmap.clone(), linear.pencil.coeffs().to_vec())?;
    let o = -linear.outlier_eig;
    let t = 0.5 * (o - delta) / (1.0 + o);
    let pencil = if t > 1e-12 { base.strictify(t)? } else { base };
    let strict_t = if t > 1e-12 { t } else { 0.0 };
    let mut cert = GammaCertificate {
        pencil,
        linear,
        strict_t,
        sample_margin: 0.0,
        outlier_eig: 0.0,
    };
    let (sample_margin, outlier_eig) = cert.recheck(k, y)?;
    cert.sample_margin = sample_margin;
    cert.outlier_eig = outlier_eig;
    Ok(Separation::Found(cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::{rng_for, tv_interior};
    use crate::semialg::{sample_near_set, tv_poly, PositivitySet};
    use crate::separation::hull::hull_membership;
    use rand::Rng;

    fn scal(v: &[f64]) -> HermitianTuple {
        HermitianTuple::scalars(v)
    }

    #[test]
    fn one_dimensional_separation() {
        let z = vec![scal(&[0.0]), scal(&[1.0]), scal(&[-1.0])];
        let cert = match find_separating_pencil(&z, &scal(&[2.0]), 0.1, 10_000).unwrap() {
            Separation::Found(c) => c,
            other => panic!("{other:?}"),
        };
        assert!(cert.pencil.is_monic());
        assert_eq!(cert.pencil.size(), 1);
        // 1 + a z with |a| ≤ 1 on [−1, 1] and 1 + 2a ≤ −0.1, so a ≤ −0.55.
        let a = cert.pencil.coeffs()[1][(0, 0)].re;
        assert!((-1.0 - 1e-8..=-0.55).contains(&a), "a = {a}");
        assert!(cert.outlier_eig <= -0.1);
        let check = cert.recheck(&z, &scal(&[2.0])).unwrap();
        assert!(check.passes(0.1, 1));
    }

    #[test]
    fn inside_point_is_not_separated() {
        let z = vec![scal(&[0.0]), scal(&[1.0]), scal(&[-1.0])];
        let w = scal(&[0.5]);
        assert!(find_separating_pencil(&z, &w, 1e-4, 10_000).unwrap().found().is_none());
        assert!(hull_membership(&z, &w, 1e-8, 10_000).unwrap().is_inside());
    }

    #[test]
    fn needs_zero_generator() {
        let z = vec![scal(&[1.0]), scal(&[-1.0])];
        assert!(find_separating_pencil(&z, &scal(&[2.0]), 0.1, 100).is_err());
    }

    #[test]
    fn tight_policy_puts_margin_on_outlier() {
        let z = vec![scal(&[0.0, 0.0]), scal(&[1.0, 0.0]), scal(&[0.0, 1.0])];
        let w = scal(&[1.0, 1.0]);
        let opts = SeparationOptions {
            delta: 1e-3,
            budget: 10_000,
            policy: ShiftPolicy::Tight,
            ..Default::default()
        };
        let cert = match find_separating_pencil_with(&z, &w, &opts).unwrap() {
            Separation::Found(c) => c,
            other => panic!("{other:?}"),
        };
        assert!(cert.hull_margin.abs() <= 1e-8);
        assert!(cert.outlier_eig <= -1e-3);
    }

    fn tv_generators(d: usize, level: usize, count: usize, seed: u64) -> Vec<HermitianTuple> {
        let mut rng = rng_for(seed, 0);
        let mut z = vec![HermitianTuple::zeros(2, 1)];
        for i in 0..count {
            z.push(tv_interior(d, 1 + i % level, 0.0, 100_000, &mut rng).unwrap());
        }
        z
    }

    #[test]
    fn tv_level1_separation_and_membership() {
        let gmap = GammaMap::y2();
        let pts = tv_generators(1, 1, 30, 4);
        let z: Vec<HermitianTuple> = pts.iter().map(|p| gmap.eval(p).unwrap()).collect();
        let outlier = gmap.eval(&scal(&[0.6 * 1.2, 0.8 * 1.2])).unwrap();
        let cert = match find_separating_pencil(&z, &outlier, 1e-4, 100_000).unwrap() {
            Separation::Found(c) => c,
            other => panic!("{other:?}"),
        };
        assert!(cert.recheck(&z, &outlier).unwrap().passes(1e-4, 1));
        assert!(!hull_membership(&z, &outlier, 1e-8, 100_000).unwrap().is_inside());
    }

    #[test]
    fn separate_gamma_y2_level1_and_level2() {
        let gmap = GammaMap::y2();
        let k = FreeSetSample::new(tv_generators(2, 2, 30, 5), None).unwrap();
        let y = scal(&[1.3, 0.0]);
        let cert = match separate_gamma(&gmap, &k, &y, 1e-4, 100_000).unwrap() {
            Separation::Found(c) => c,
            other => panic!("{other:?}"),
        };
        assert!(cert.pencil.is_monic());
        assert_eq!(cert.pencil.size(), 1);
        assert!(cert.outlier_eig <= -1e-4);
        assert!(cert.sample_margin >= cert.strict_t - 1e-9);
        assert!(cert.strict_t > 0.0);

        let p = tv_poly(2).unwrap();
        let mut rng = rng_for(6, 0);
        let dir = sample_near_set(&p, 2, &mut rng).unwrap();
        // Push to 1.2× the boundary along the ray.
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if p.margin(&dir.scale(mid)).unwrap() >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let y = dir.scale(1.2 * lo);
        let cert = match separate_gamma(&gmap, &k, &y, 1e-4, 100_000).unwrap() {
            Separation::Found(c) => c,
            other => panic!("{other:?}"),
        };
        assert_eq!(cert.pencil.size(), 2);
        let (sm, om) = cert.recheck(&k, &y).unwrap();
        assert!(sm >= cert.strict_t - 1e-9);
        assert!(om <= -1e-4);
    }

    #[test]
    fn identity_gamma_reduces_to_linear_separation() {
        let pts = tv_generators(1, 1, 20, 7);
        let k = FreeSetSample::new(pts.clone(), None).unwrap();
        let y = scal(&[1.1, 0.2]);
        let gamma = separate_gamma(&GammaMap::identity(2), &k, &y, 1e-4, 100_000).unwrap();
        let direct = find_separating_pencil(&pts, &y, 1e-4, 100_000).unwrap();
        let (g, d) = (gamma.found().unwrap(), direct.found().unwrap());
        assert_eq!(g.linear.pencil.coeffs(), d.pencil.coeffs());
    }

    #[test]
    fn weak_duality_on_random_instances() {
        let mut rng = rng_for(12, 0);
        for _ in 0..40 {
            let mut z = vec![scal(&[0.0, 0.0])];
            for _ in 0..5 {
                z.push(scal(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]));
            }
            let w = scal(&[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
            let inside = hull_membership(&z, &w, 1e-8, 5_000).unwrap().is_inside();
            let sep = find_separating_pencil(&z, &w, 1e-6, 5_000).unwrap().found().is_some();
            assert!(!(inside && sep));
        }
    }

    #[test]
    fn cutting_planes_match_the_one_dimensional_example() {
        let z = vec![scal(&[0.0]), scal(&[1.0]), scal(&[-1.0])];
        let opts = SeparationOptions {
            delta: 0.1,
            solver: Solver::CuttingPlane,
            ..Default::default()
        };
        let cert = find_separating_pencil_with(&z, &scal(&[2.0]), &opts).unwrap().found().cloned().unwrap();
        let a = cert.pencil.coeffs()[1][(0, 0)].re;
        assert!((-1.0 - 1e-8..=-0.55).contains(&a), "a = {a}");
        assert!(cert.recheck(&z, &scal(&[2.0])).unwrap().passes(0.1, 1));
        let inside = find_separating_pencil_with(&z, &scal(&[0.5]), &opts).unwrap();
        assert!(inside.found().is_none());
    }

    #[test]
    fn anchored_pencil_is_singular_at_the_anchor() {
        // Square [0,1]²; W = (1.5, 1.5) is separated by a pencil touching (1,1).
        let z = vec![scal(&[0.0, 0.0]), scal(&[1.0, 0.0]), scal(&[0.0, 1.0]), scal(&[1.0, 1.0])];
        let w = scal(&[1.5, 1.5]);
        for solver in [Solver::Projections, Solver::CuttingPlane] {
            let opts = SeparationOptions {
                delta: 1e-4,
                policy: ShiftPolicy::Tight,
                solver,
                anchor: Some(scal(&[1.0, 1.0])),
                ..Default::default()
            };
            let cert = find_separating_pencil_with(&z, &w, &opts).unwrap().found().cloned().unwrap();
            let at = min_eig(&cert.pencil.eval_linear(&scal(&[1.0, 1.0])).unwrap()).unwrap();
            assert!((-1e-8..=1e-3).contains(&at), "{solver:?}: {at}");
            assert!(cert.recheck(&z, &w).unwrap().passes(1e-4, 1));
        }
    }
}
