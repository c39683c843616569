//! Monic `xy`-pencils `L = I + Ax + By + Cxy + C*yx`: coefficient bounds from
//! a fixed set of test points, interior positivity, and limits of separating
//! pencils at boundary points.

use crate::error::{Error, Result};
use crate::gamma::{FreeSetSample, GammaMap};
use crate::ncpoly::HermitianTuple;
use crate::numerics::random::rng_for;
use crate::numerics::{check_hermitian, frobenius, from_real_rows, identity, kron, min_eig, op_norm, CMatrix, C64};
use crate::pencil::GammaPencil;
use crate::semialg::{sample_near_set, sample_on_boundary, PositivitySet};
use crate::separation::{separate_gamma_with, Separation, SeparationOptions, ShiftPolicy, Solver};
use crate::tolerances;

#[derive(Clone, Debug, PartialEq)]
pub struct XYPencil {
    a: CMatrix,
    b: CMatrix,
    c: CMatrix,
}

/// Operator norms `‖A‖, ‖B‖, ‖C + C*‖, ‖C − C*‖`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct CoefficientNorms {
    pub a: f64,
    pub b: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

impl XYPencil {
    /// `A`, `B` Hermitian within `1e-12`; `C` arbitrary; all `ℓ × ℓ`.
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix) -> Result<Self> {
        let l = a.nrows();
        if l == 0 {
            return Err(Error::InvalidParameter("pencil size must be at least 1".into()));
        }
        for m in [&a, &b, &c] {
            if m.nrows() != l || m.ncols() != l {
                return Err(Error::mismatch("xy-pencil coefficient size", l, m.nrows().max(m.ncols())));
            }
        }
        check_hermitian(&a, tolerances::HERMITIAN_INPUT)?;
        check_hermitian(&b, tolerances::HERMITIAN_INPUT)?;
        Ok(XYPencil { a, b, c })
    }

    pub fn identity(l: usize) -> Self {
        let z = CMatrix::zeros(l, l);
        XYPencil {
            a: z.clone(),
            b: z.clone(),
            c: z,
        }
    }

    pub fn size(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    /// `I ⊗ I + A ⊗ X + B ⊗ Y + C ⊗ XY + C* ⊗ YX`.
    pub fn eval(&self, x: &HermitianTuple) -> Result<CMatrix> {
        if x.width() != 2 {
            return Err(Error::mismatch("xy-pencil argument width", 2, x.width()));
        }
        let (xm, ym) = (x.entry(0), x.entry(1));
        let n = x.level();
        let out = kron(&identity(self.size()), &identity(n))
            + kron(&self.a, xm)
            + kron(&self.b, ym)
            + kron(&self.c, &(xm * ym))
            + kron(&self.c.adjoint(), &(ym * xm));
        Ok(out)
    }

    pub fn min_eig_at(&self, x: &HermitianTuple) -> Result<f64> {
        min_eig(&self.eval(x)?)
    }

    /// Coefficients `(I, A, B, (C + C*)/2, (C − C*)/(2i))` over `{x, y, xy + yx, i(xy − yx)}`.
    pub fn to_gamma_pencil(&self) -> Result<GammaPencil> {
        let ca = self.c.adjoint();
        let h = (&self.c + &ca).scale(0.5);
        let k = (&self.c - &ca) * C64::new(0.0, -0.5);
        GammaPencil::new(
            GammaMap::xy(),
            vec![identity(self.size()), self.a.clone(), self.b.clone(), h, k],
        )
    }

    /// Inverse of [`XYPencil::to_gamma_pencil`]; the pencil must be monic over the `xy` map.
    pub fn from_gamma_pencil(p: &GammaPencil) -> Result<Self> {
        if p.gmap() != &GammaMap::xy() {
            return Err(Error::PreconditionViolated("expected a pencil over the xy map".into()));
        }
        if !p.is_monic() {
            return Err(Error::PreconditionViolated("expected a monic pencil".into()));
        }
        let c = p.coeffs();
        Self::new(c[1].clone(), c[2].clone(), &c[3] + &c[4] * C64::new(0.0, 1.0))
    }

    pub fn norms(&self) -> CoefficientNorms {
        let ca = self.c.adjoint();
        CoefficientNorms {
            a: op_norm(&self.a),
            b: op_norm(&self.b),
            c_plus: op_norm(&(&self.c + &ca)),
            c_minus: op_norm(&(&self.c - &ca)),
        }
    }

    /// Largest Frobenius distance between matching coefficients.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.size() != other.size() {
            return Err(Error::mismatch("xy-pencil size", self.size(), other.size()));
        }
        Ok(frobenius(&(&self.a - &other.a))
            .max(frobenius(&(&self.b - &other.b)))
            .max(frobenius(&(&self.c - &other.c))))
    }
}

impl PositivitySet for XYPencil {
    fn nvars(&self) -> usize {
        2
    }

    fn margin(&self, x: &HermitianTuple) -> Result<f64> {
        self.min_eig_at(x)
    }
}

/// The eight scalar points `(±ε, 0), (0, ±ε), ±(ε, −ε), ±(ε, ε)` followed by
/// `±(X, Y)` with `X = [[0, ε], [ε, 0]]`, `Y = diag(ε, −ε)`.
///
/// `X` and `Y` anticommute, so `L(X, Y) + L(−X, −Y) = 2I + 2(C − C*) ⊗ XY`
/// isolates the skew part of `C`.
pub fn bmi_test_points(epsilon: f64) -> Result<Vec<HermitianTuple>> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must be positive")));
    }
    let e = epsilon;
    let mut pts: Vec<HermitianTuple> = [
        [e, 0.0],
        [-e, 0.0],
        [0.0, e],
        [0.0, -e],
        [e, -e],
        [-e, e],
        [e, e],
        [-e, -e],
    ]
    .iter()
    .map(|v| HermitianTuple::scalars(v))
    .collect();
    let x = from_real_rows(2, 2, &[0.0, e, e, 0.0]);
    let y = from_real_rows(2, 2, &[e, 0.0, 0.0, -e]);
    let pair = HermitianTuple::new(vec![x, y])?;
    pts.push(pair.scale(-1.0));
    pts.insert(8, pair);
    Ok(pts)
}

/// Outcome of [`check_coefficient_bound`].
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub epsilon: f64,
    pub norms: CoefficientNorms,
    /// `1/ε, 1/ε, 2/ε², 2/ε²`.
    pub limits: [f64; 4],
    pub bounds_hold: bool,
    pub psd_at_test_points: bool,
    /// Test point with the smallest eigenvalue, and that eigenvalue.
    pub worst_point: usize,
    pub worst_eig: f64,
}

/// Relative slack for comparing norms to limits, covering the `−1e-10` PSD tolerance.
const BOUND_SLACK: f64 = 1e-8;

/// Evaluates `L` at the test points and compares the coefficient norms with
/// `‖A‖, ‖B‖ ≤ 1/ε` and `‖C ± C*‖ ≤ 2/ε²`.
///
/// PSD at every test point with a failed bound is a contradiction and is
/// reported as [`Error::BoundViolation`]; a failed bound otherwise comes with
/// the test point where `L` is not PSD.
pub fn check_coefficient_bound(l: &XYPencil, epsilon: f64) -> Result<BoundReport> {
    let pts = bmi_test_points(epsilon)?;
    let mut worst_point = 0;
    let mut worst_eig = f64::INFINITY;
    for (i, p) in pts.iter().enumerate() {
        let e = l.min_eig_at(p)?;
        if e < worst_eig {
            worst_eig = e;
            worst_point = i;
        }
    }
    let norms = l.norms();
    let limits = [1.0 / epsilon, 1.0 / epsilon, 2.0 / (epsilon * epsilon), 2.0 / (epsilon * epsilon)];
    let values = [norms.a, norms.b, norms.c_plus, norms.c_minus];
    let bounds_hold = values.iter().zip(&limits).all(|(v, m)| *v <= m * (1.0 + BOUND_SLACK));
    let psd_at_test_points = worst_eig >= -tolerances::PSD_TEST;
    let report = BoundReport {
        epsilon,
        norms,
        limits,
        bounds_hold,
        psd_at_test_points,
        worst_point,
        worst_eig,
    };
    if psd_at_test_points && !bounds_hold {
        return Err(Error::BoundViolation(format!(
            "norms {:?} exceed {:?} although L ⪰ 0 at every test point",
            values, limits
        )));
    }
    Ok(report)
}

/// Largest `ε ≤ 1` (by bisection) with every test point at margin `≥ 1e-6`.
pub fn select_epsilon<S: PositivitySet + ?Sized>(p: &S) -> Result<f64> {
    if p.nvars() != 2 {
        return Err(Error::mismatch("variable count", 2, p.nvars()));
    }
    let ok = |e: f64| -> Result<bool> {
        for q in bmi_test_points(e)? {
            if p.margin(&q)? < tolerances::BOUNDARY_BAND {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if p.margin(&HermitianTuple::zeros(2, 1))? <= tolerances::BOUNDARY_BAND {
        return Err(Error::PreconditionViolated("p(0) must be positive definite".into()));
    }
    if ok(1.0)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 {
        return Err(Error::PreconditionViolated("no admissible epsilon found".into()));
    }
    Ok(lo)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InteriorReport {
    pub checked: usize,
    pub min_eig: f64,
    /// Interior samples with `λ_min(L) < 1e-10`.
    pub violations: Vec<(usize, f64)>,
}

/// `L` must be PSD (`≥ −1e-10`) on `s_samples`; reports interior samples
/// where it fails to be positive definite.
pub fn check_interior_pd(
    l: &XYPencil,
    s_samples: &[HermitianTuple],
    interior_samples: &[HermitianTuple],
) -> Result<InteriorReport> {
    for (i, s) in s_samples.iter().enumerate() {
        let e = l.min_eig_at(s)?;
        if e < -tolerances::PSD_TEST {
            return Err(Error::PreconditionViolated(format!(
                "pencil is not PSD on set sample {i} (min eig {e:.3e})"
            )));
        }
    }
    let mut report = InteriorReport {
        checked: 0,
        min_eig: f64::INFINITY,
        violations: Vec::new(),
    };
    for (i, x) in interior_samples.iter().enumerate() {
        let e = l.min_eig_at(x)?;
        report.checked += 1;
        report.min_eig = report.min_eig.min(e);
        if e < tolerances::STRICT_PD {
            report.violations.push((i, e));
        }
    }
    Ok(report)
}

/// Samples with margin at least `1e-3` under `p`, at the given levels in turn.
pub fn interior_samples<S: PositivitySet + ?Sized>(
    p: &S,
    levels: &[usize],
    count: usize,
    seed: u64,
) -> Result<Vec<HermitianTuple>> {
    if levels.is_empty() {
        return Err(Error::EmptyInput("levels"));
    }
    let mut rng = rng_for(seed, 0);
    let mut out = Vec::with_capacity(count);
    let mut draws = 0;
    while out.len() < count {
        draws += 1;
        if draws > 100 * count.max(1) {
            return Err(Error::BudgetExhausted { budget: 100 * count });
        }
        let x = sample_near_set(p, levels[out.len() % levels.len()], &mut rng)?;
        if p.margin(&x)? >= tolerances::INTERIOR_MARGIN {
            out.push(x);
        }
    }
    Ok(out)
}

/// `Y_n = (1 + 1/n) Y` for `n = 1, …, steps`.
pub fn outside_sequence(boundary: &HermitianTuple, steps: usize) -> Vec<HermitianTuple> {
    (1..=steps).map(|n| boundary.scale(1.0 + 1.0 / n as f64)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitOptions {
    /// Required depth `λ_min(L_n(Y_n)) ≤ −δ` at every step.
    pub delta: f64,
    pub budget: usize,
    pub cauchy: f64,
    /// Boundary points of `{p ⪰ 0}` drawn to verify each pencil; violated
    /// ones join the sample and the step is solved again.
    pub verify_samples: usize,
    pub refine_rounds: usize,
    pub seed: u64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            delta: 1e-6,
            budget: 100_000,
            cauchy: tolerances::CAUCHY,
            verify_samples: 400,
            refine_rounds: 10,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundaryLimit {
    pub pencil: XYPencil,
    pub epsilon: f64,
    pub norms: Vec<CoefficientNorms>,
    /// Coefficient distance between the last two pencils.
    pub cauchy_gap: f64,
    /// `λ_min(L(Y_boundary))`.
    pub boundary_eig: f64,
    /// Smallest eigenvalue of the limit over the verification points.
    pub verification_eig: f64,
    /// Verification points that were added to the sample.
    pub added_points: usize,
    /// Solver iterations per step, summed over refinement rounds.
    pub iterations: Vec<usize>,
}

/// Verification points added per refinement round, worst first.
const REFINE_BATCH: usize = 16;

/// Separates each `Y_n` from the sample (augmented with `Y_boundary` and the
/// test points for the selected `ε`) by a tight monic `xy`-pencil that is
/// singular at `Y_boundary`, warm-starting each solve from the previous one,
/// checks the coefficient bounds along the way, and returns the last pencil
/// once consecutive pencils agree to `cauchy`.
///
/// Each pencil is also evaluated on boundary points of `{p ⪰ 0}` at levels 1
/// through `max(2, ℓ)`; points where it drops below `−1e-6` are added to the
/// sample before solving the step again. Pencil size `ℓ = 1` is solved by
/// cutting planes, larger sizes by alternating projections.
pub fn boundary_pencil_limit<S: PositivitySet + ?Sized>(
    p: &S,
    k: &FreeSetSample,
    sequence: &[HermitianTuple],
    boundary: &HermitianTuple,
    opts: &LimitOptions,
) -> Result<BoundaryLimit> {
    if sequence.is_empty() {
        return Err(Error::EmptyInput("outside sequence"));
    }
    let epsilon = select_epsilon(p)?;
    let level = boundary.level();
    if boundary.width() != 2 || sequence.iter().any(|y| y.level() != level) {
        return Err(Error::mismatch("sequence level", level, sequence[0].level()));
    }
    let mut points = k.points().to_vec();
    if !points.contains(boundary) {
        points.push(boundary.clone());
    }
    points.extend(bmi_test_points(epsilon)?);
    let mut rng = rng_for(opts.seed, 0);
    let max_level = level.max(2);
    let verify: Vec<HermitianTuple> = (0..opts.verify_samples)
        .map(|i| sample_on_boundary(p, 1 + i % max_level, &mut rng))
        .collect::<Result<_>>()?;
    let gmap = GammaMap::xy();
    let solver = if level == 1 { Solver::CuttingPlane } else { Solver::Projections };

    let mut warm = None;
    let mut added_points = 0;
    let mut pencils: Vec<XYPencil> = Vec::with_capacity(sequence.len());
    let mut norms = Vec::with_capacity(sequence.len());
    let mut iterations = Vec::with_capacity(sequence.len());
    let mut verification_eig = f64::INFINITY;
    for (step, y) in sequence.iter().enumerate() {
        if p.margin(y)? >= 0.0 {
            return Err(Error::PreconditionViolated(format!("sequence point {step} is not outside the set")));
        }
        let mut spent = 0;
        let (pencil, raw) = loop {
            let sample = FreeSetSample::new(points.clone(), None)?;
            let sopts = SeparationOptions {
                delta: opts.delta,
                budget: opts.budget,
                policy: ShiftPolicy::Tight,
                solver,
                warm_start: warm.take(),
                anchor: Some(boundary.clone()),
            };
            let cert = match separate_gamma_with(&gmap, &sample, y, &sopts)? {
                Separation::Found(c) => c,
                Separation::NotFound { iterations, .. } => {
                    return Err(Error::SeparationFailed {
                        step,
                        iterations: spent + iterations,
                    });
                }
            };
            spent += cert.linear.iterations;
            let pencil =
                XYPencil::from_gamma_pencil(&GammaPencil::from_computed(gmap.clone(), cert.linear.pencil.coeffs().to_vec())?)?;
            let mut eigs: Vec<(f64, usize)> = verify
                .iter()
                .enumerate()
                .map(|(i, x)| Ok((pencil.min_eig_at(x)?, i)))
                .collect::<Result<_>>()?;
            eigs.sort_by(|a, b| a.0.total_cmp(&b.0));
            verification_eig = eigs.first().map_or(f64::INFINITY, |e| e.0);
            let bad: Vec<usize> = eigs
                .iter()
                .take_while(|e| e.0 < -tolerances::BOUNDARY_BAND)
                .map(|e| e.1)
                .filter(|&i| !points.contains(&verify[i]))
                .take(REFINE_BATCH)
                .collect();
            if bad.is_empty() || added_points >= opts.refine_rounds * REFINE_BATCH {
                break (pencil, cert.linear.raw);
            }
            added_points += bad.len();
            points.extend(bad.into_iter().map(|i| verify[i].clone()));
            warm = Some(cert.linear.raw);
        };
        let report = check_coefficient_bound(&pencil, epsilon)?;
        if !report.bounds_hold {
            return Err(Error::BoundViolation(format!("step {step}: norms {:?}", report.norms)));
        }
        norms.push(report.norms);
        iterations.push(spent);
        warm = Some(raw);
        pencils.push(pencil);
    }
    let last = pencils.pop().expect("nonempty");
    let cauchy_gap = match pencils.last() {
        Some(prev) => last.distance(prev)?,
        None => 0.0,
    };
    if cauchy_gap > opts.cauchy {
        return Err(Error::NonCauchy {
            gap: cauchy_gap,
            allowed: opts.cauchy,
        });
    }
    let boundary_eig = last.min_eig_at(boundary)?;
    Ok(BoundaryLimit {
        pencil: last,
        epsilon,
        norms,
        cauchy_gap,
        boundary_eig,
        verification_eig,
        added_points,
        iterations,
    })
}
