//! Free semialgebraic sets `{X : p(X) ⪰ 0}`: membership with a boundary
//! band, star-like checks, slice convexity in `x`, and sampled comparison of
//! a pencil's positivity set with a polynomial's.

use rand::Rng;

use crate::error::{Error, Result};
use crate::ncpoly::{FreePoly, HermitianTuple, MatrixPoly};
use crate::numerics::random::{random_hermitian, rng_for, GckRng};
use crate::numerics::{min_eig, op_norm};
use crate::pencil::GammaPencil;
use crate::tolerances;

/// Anything whose positivity set can be sampled: the margin is the minimum
/// eigenvalue of the defining evaluation.
pub trait PositivitySet: Sync {
    fn nvars(&self) -> usize;
    fn margin(&self, x: &HermitianTuple) -> Result<f64>;
}

impl PositivitySet for FreePoly {
    fn nvars(&self) -> usize {
        FreePoly::nvars(self)
    }

    fn margin(&self, x: &HermitianTuple) -> Result<f64> {
        min_eig(&self.eval_hermitian(x)?)
    }
}

impl PositivitySet for MatrixPoly {
    fn nvars(&self) -> usize {
        MatrixPoly::nvars(self)
    }

    fn margin(&self, x: &HermitianTuple) -> Result<f64> {
        min_eig(&self.eval_hermitian(x)?)
    }
}

impl PositivitySet for GammaPencil {
    fn nvars(&self) -> usize {
        self.gmap().g()
    }

    fn margin(&self, x: &HermitianTuple) -> Result<f64> {
        self.min_eig_at(x)
    }
}

/// `p_d = 1 − x² − y^{2d}` as a scalar polynomial.
pub fn tv_poly(d: usize) -> Result<FreePoly> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let x = FreePoly::var(2, 0)?;
    let y = FreePoly::var(2, 1)?;
    FreePoly::one(2).sub(&x.pow(2))?.sub(&y.pow(2 * d))
}

/// `p_d` as a `1 × 1` matrix polynomial.
pub fn tv_defining_poly(d: usize) -> Result<MatrixPoly> {
    Ok(MatrixPoly::from_scalar(&tv_poly(d)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipVerdict {
    StrictlyInside,
    BoundaryBand,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership {
    pub verdict: MembershipVerdict,
    pub margin: f64,
    pub band: f64,
}

impl Membership {
    pub fn from_margin(margin: f64, band: f64) -> Self {
        let verdict = if margin > band {
            MembershipVerdict::StrictlyInside
        } else if margin < -band {
            MembershipVerdict::Outside
        } else {
            MembershipVerdict::BoundaryBand
        };
        Membership { verdict, margin, band }
    }
}

pub fn membership<S: PositivitySet + ?Sized>(set: &S, x: &HermitianTuple, band: f64) -> Result<Membership> {
    if band < 0.0 {
        return Err(Error::InvalidParameter(format!("negative band {band}")));
    }
    Ok(Membership::from_margin(set.margin(x)?, band))
}

/// A point `tX` with `t < 1` at which `p` fails to be positive definite.
#[derive(Clone, Debug)]
pub struct StarLikeViolation {
    pub sample: usize,
    pub t: f64,
    pub min_eig: f64,
}

#[derive(Clone, Debug, Default)]
pub struct StarLikeReport {
    pub checked: usize,
    pub violations: Vec<StarLikeViolation>,
    /// Smallest `λ_min(p(tX)) − (1 − t²)` seen; informative for sets whose
    /// positivity improves at least quadratically toward the origin.
    pub worst_quadratic_slack: f64,
}

/// Reports every `(X, t)` with `t < 1` and `λ_min(p(tX)) ≤ 1e-10`.
///
/// Each sample must not be outside the set (band `1e-6`).
pub fn check_star_like<S: PositivitySet + ?Sized>(
    p: &S,
    samples: &[HermitianTuple],
    t_grid: &[f64],
) -> Result<StarLikeReport> {
    let mut report = StarLikeReport {
        worst_quadratic_slack: f64::INFINITY,
        ..Default::default()
    };
    for (i, x) in samples.iter().enumerate() {
        let m = membership(p, x, tolerances::BOUNDARY_BAND)?;
        if m.verdict == MembershipVerdict::Outside {
            return Err(Error::PreconditionViolated(format!(
                "sample {i} is outside the set (margin {:.3e})",
                m.margin
            )));
        }
        for &t in t_grid {
            if !(0.0..1.0).contains(&t) {
                return Err(Error::InvalidParameter(format!("t = {t} outside [0, 1)")));
            }
            let e = p.margin(&x.scale(t))?;
            report.checked += 1;
            report.worst_quadratic_slack = report.worst_quadratic_slack.min(e - (1.0 - t * t));
            if e <= tolerances::STAR_LIKE {
                report.violations.push(StarLikeViolation { sample: i, t, min_eig: e });
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct SliceViolation {
    pub t: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, Default)]
pub struct SliceReport {
    pub checked: usize,
    pub violations: Vec<SliceViolation>,
}

/// Checks `(tX_1 + (1−t)X_2, Y)` against the set for each grid `t`, where
/// the first variable is `x` and the rest are held at `Y`.
///
/// Both endpoints must be inside (margin `≥ −band`); a grid point violates
/// when its margin falls below `−band`.
pub fn check_slice_convexity<S: PositivitySet + ?Sized>(
    set: &S,
    y: &[crate::numerics::CMatrix],
    x1: &crate::numerics::CMatrix,
    x2: &crate::numerics::CMatrix,
    t_grid: &[f64],
    band: f64,
) -> Result<SliceReport> {
    let point = |x: crate::numerics::CMatrix| {
        let mut e = vec![x];
        e.extend(y.iter().cloned());
        HermitianTuple::new(e)
    };
    let p1 = point(x1.clone())?;
    let p2 = point(x2.clone())?;
    for (name, p) in [("first", &p1), ("second", &p2)] {
        let m = set.margin(p)?;
        if m < -band {
            return Err(Error::PreconditionViolated(format!(
                "{name} endpoint is outside the set (margin {m:.3e})"
            )));
        }
    }
    let mut report = SliceReport::default();
    for &t in t_grid {
        let p = p1.combine(t, &p2, 1.0 - t)?;
        let margin = set.margin(&p)?;
        report.checked += 1;
        if margin < -band {
            report.violations.push(SliceViolation { t, margin });
        }
    }
    Ok(report)
}

/// Point at which pencil and polynomial verdicts disagree.
#[derive(Clone, Debug)]
pub struct Disagreement {
    pub point: HermitianTuple,
    pub pencil_margin: f64,
    pub poly_margin: f64,
}

#[derive(Clone, Debug, Default)]
pub struct LevelCounts {
    pub level: usize,
    pub agreements: usize,
    pub disagreements: usize,
    pub skipped: usize,
    pub inside: usize,
}

#[derive(Clone, Debug, Default)]
pub struct EqualityReport {
    pub agreements: usize,
    pub disagreements: usize,
    /// Samples with either margin inside the band.
    pub skipped: usize,
    pub per_level: Vec<LevelCounts>,
    pub first_disagreement: Option<Disagreement>,
}

/// Largest radius probed along a ray when locating the boundary.
const MAX_RADIUS: f64 = 4.0;

/// Distance along the direction `dir` (unit operator norm) to the boundary of
/// `{p ⪰ 0}`, by bisection; `MAX_RADIUS` when the ray stays inside.
fn boundary_radius<S: PositivitySet + ?Sized>(p: &S, dir: &HermitianTuple) -> Result<f64> {
    if p.margin(&dir.scale(MAX_RADIUS))? >= 0.0 {
        return Ok(MAX_RADIUS);
    }
    if p.margin(&dir.scale(0.0))? < 0.0 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, MAX_RADIUS);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if p.margin(&dir.scale(mid))? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A random point roughly half of whose draws land inside `{p ⪰ 0}`: a GUE
/// direction normalized to unit operator norm, pushed to `s·ρ` where `ρ` is
/// the boundary distance along it and `s ~ U(0.5, 1.5)`.
pub fn sample_near_set<S: PositivitySet + ?Sized>(p: &S, level: usize, rng: &mut GckRng) -> Result<HermitianTuple> {
    let g = p.nvars();
    let entries: Vec<_> = (0..g).map(|_| random_hermitian(level, rng)).collect();
    let norm = entries.iter().map(op_norm).fold(0.0, f64::max);
    let dir = HermitianTuple::new(entries)?.scale(if norm > 0.0 { 1.0 / norm } else { 1.0 });
    let rho = boundary_radius(p, &dir)?;
    let s: f64 = rng.random_range(0.5..1.5);
    Ok(dir.scale(s * rho))
}

/// A point on the boundary of `{p ⪰ 0}` along a random GUE direction, or
/// at radius 4 when the ray never leaves the set.
pub fn sample_on_boundary<S: PositivitySet + ?Sized>(p: &S, level: usize, rng: &mut GckRng) -> Result<HermitianTuple> {
    let g = p.nvars();
    let entries: Vec<_> = (0..g).map(|_| random_hermitian(level, rng)).collect();
    let norm = entries.iter().map(op_norm).fold(0.0, f64::max);
    let dir = HermitianTuple::new(entries)?.scale(if norm > 0.0 { 1.0 / norm } else { 1.0 });
    let rho = boundary_radius(p, &dir)?;
    Ok(dir.scale(rho))
}

/// Compares verdicts of `L` and `p` on sampled points.
///
/// For each level, draws until `n_samples` points have both margins outside
/// the band (or `50·n_samples` draws are spent); each such point counts as an
/// agreement or disagreement. The sampling scale follows `p`.
pub fn check_pencil_poly_equality<S: PositivitySet + ?Sized>(
    l: &GammaPencil,
    p: &S,
    levels: &[usize],
    n_samples: usize,
    band: f64,
    seed: u64,
) -> Result<EqualityReport> {
    if l.gmap().g() != p.nvars() {
        return Err(Error::mismatch("variable count", p.nvars(), l.gmap().g()));
    }
    let mut report = EqualityReport::default();
    for (li, &level) in levels.iter().enumerate() {
        if level == 0 {
            return Err(Error::InvalidParameter("levels must be positive".into()));
        }
        let mut counts = LevelCounts {
            level,
            ..Default::default()
        };
        let mut rng = rng_for(seed, li as u64);
        let mut draws = 0;
        while counts.agreements + counts.disagreements < n_samples && draws < 50 * n_samples.max(1) {
            draws += 1;
            let x = sample_near_set(p, level, &mut rng)?;
            let lm = l.margin(&x)?;
            let pm = p.margin(&x)?;
            if lm.abs() <= band || pm.abs() <= band {
                counts.skipped += 1;
                continue;
            }
            if pm > 0.0 {
                counts.inside += 1;
            }
            if (lm > 0.0) == (pm > 0.0) {
                counts.agreements += 1;
            } else {
                counts.disagreements += 1;
                if report.first_disagreement.is_none() {
                    report.first_disagreement = Some(Disagreement {
                        point: x,
                        pencil_margin: lm,
                        poly_margin: pm,
                    });
                }
            }
        }
        report.agreements += counts.agreements;
        report.disagreements += counts.disagreements;
        report.skipped += counts.skipped;
        report.per_level.push(counts);
    }
    Ok(report)
}

/// Level-one grid `[-r, r]²` with `steps + 1` points per side, as scalar tuples.
pub fn scalar_grid(radius: f64, steps: usize) -> Vec<HermitianTuple> {
    let mut out = Vec::with_capacity((steps + 1) * (steps + 1));
    for i in 0..=steps {
        for j in 0..=steps {
            let x = -radius + 2.0 * radius * i as f64 / steps as f64;
            let y = -radius + 2.0 * radius * j as f64 / steps as f64;
            out.push(HermitianTuple::scalars(&[x, y]));
        }
    }
    out
}
