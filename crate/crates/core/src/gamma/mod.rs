//! Γ-maps and Γ-pairs.
//!
//! A Γ-pair `(X, V)` is a point with an isometry satisfying
//! `V*γ_j(X)V = γ_j(V*XV)` for every coordinate. Γ-convex sets are those
//! closed under such compressions.

mod checks;
mod sampling;

pub use checks::{
    check_concomitant, check_gamma_concave, check_gamma_convex, Counterexample, TrialConfig,
    Verdict,
};
pub use sampling::{
    gamma_hull_sample, random_gamma_pair, sample_gamma_pairs, FreeSetSample, HullSample,
    HullWitness, MembershipOracle, OracleVerdict, PairFamily, SampledPair,
};

use crate::error::{Error, Result};
use crate::ncpoly::{FreePoly, HermitianTuple, Word};
use crate::numerics::{frobenius, identity, CMatrix, C64};
use crate::tolerances;

/// An isometry `V: C^m → C^n`, stored as its `n × m` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    matrix: CMatrix,
}

impl Isometry {
    /// Accepts `V` when `‖V*V − I_m‖_F ≤ 1e-10`.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.ncols() == 0 || matrix.ncols() > matrix.nrows() {
            return Err(Error::InvalidParameter(format!(
                "an isometry needs 1 ≤ m ≤ n, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = frobenius(&(matrix.adjoint() * &matrix - identity(matrix.ncols())));
        if defect > tolerances::ISOMETRY {
            return Err(Error::NotIsometry { defect });
        }
        Ok(Isometry { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Isometry {
            matrix: identity(n),
        }
    }

    /// Inclusion of the coordinate subspace spanned by `e_i`, `i ∈ indices`.
    pub fn coordinate_inclusion(n: usize, indices: &[usize]) -> Result<Self> {
        let mut m = CMatrix::zeros(n, indices.len());
        for (c, &i) in indices.iter().enumerate() {
            if i >= n {
                return Err(Error::mismatch("inclusion index", n, i + 1));
            }
            m[(i, c)] = C64::new(1.0, 0.0);
        }
        Self::new(m)
    }

    /// `(√t I_k, √(1−t) I_k)*` as a map `C^k → C^{2k}`.
    pub fn averaging(k: usize, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("averaging weight {t} outside [0, 1]")));
        }
        let mut m = CMatrix::zeros(2 * k, k);
        for i in 0..k {
            m[(i, i)] = C64::new(t.sqrt(), 0.0);
            m[(k + i, i)] = C64::new((1.0 - t).sqrt(), 0.0);
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Dimension `n` of the target space.
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    /// Dimension `m` of the source space.
    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    /// `I_μ ⊗ V`.
    pub fn ampliate(&self, mu: usize) -> CMatrix {
        crate::numerics::kron(&identity(mu), &self.matrix)
    }
}

/// A tuple `Γ = (γ_1, …, γ_r)` of symmetric free polynomials in `g`
/// variables with `γ_j = x_j` for `j ≤ g`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaMap {
    g: usize,
    coords: Vec<FreePoly>,
    name: Option<String>,
}

impl GammaMap {
    pub fn new(g: usize, coords: Vec<FreePoly>) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidParameter("a Γ-map needs at least one variable".into()));
        }
        if coords.len() < g {
            return Err(Error::mismatch("Γ-map coordinate count", g, coords.len()));
        }
        for (j, c) in coords.iter().enumerate() {
            if c.nvars() != g {
                return Err(Error::mismatch("Γ coordinate variable count", g, c.nvars()));
            }
            if j < g && *c != FreePoly::var(g, j)? {
                return Err(Error::InvalidParameter(format!(
                    "coordinate {} must be the variable x{}",
                    j + 1,
                    j + 1
                )));
            }
            if !c.is_symmetric() {
                return Err(Error::InvalidParameter(format!(
                    "coordinate {} is not symmetric",
                    j + 1
                )));
            }
        }
        Ok(GammaMap {
            g,
            coords,
            name: None,
        })
    }

    /// The variables followed by `extra`.
    pub fn with_extra(g: usize, extra: Vec<FreePoly>) -> Result<Self> {
        let mut coords = (0..g)
            .map(|j| FreePoly::var(g, j))
            .collect::<Result<Vec<_>>>()?;
        coords.extend(extra);
        Self::new(g, coords)
    }

    /// `Γ(x) = x`: ordinary matrix convexity.
    pub fn identity(g: usize) -> Self {
        let mut m = Self::with_extra(g, Vec::new()).expect("variables are symmetric");
        m.name = Some("x".into());
        m
    }

    /// `Γ = {x, y, y²}`.
    pub fn y2() -> Self {
        let y2 = FreePoly::monomial(2, Word::power(1, 2), C64::new(1.0, 0.0)).expect("valid word");
        let mut m = Self::with_extra(2, vec![y2]).expect("y² is symmetric");
        m.name = Some("y2".into());
        m
    }

    /// `Γ = {x, y, xy + yx, i(xy − yx)}`.
    pub fn xy() -> Self {
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let xy = Word::new(vec![0, 1]);
        let yx = Word::new(vec![1, 0]);
        let sym = FreePoly::from_terms(2, [(xy.clone(), one), (yx.clone(), one)]).expect("valid");
        let anti = FreePoly::from_terms(2, [(xy, i), (yx, -i)]).expect("valid");
        let mut m = Self::with_extra(2, vec![sym, anti]).expect("coordinates are symmetric");
        m.name = Some("xy".into());
        m
    }

    /// Built-in maps: `"x"` (any `g`), `"y2"` and `"xy"` (`g = 2`).
    pub fn named(name: &str, g: usize) -> Result<Self> {
        let m = match name {
            "x" => return Ok(Self::identity(g)),
            "y2" => Self::y2(),
            "xy" => Self::xy(),
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown Γ-map {other:?}; expected x, y2 or xy"
                )))
            }
        };
        if g != 2 {
            return Err(Error::mismatch("variable count for a two-variable Γ-map", 2, g));
        }
        Ok(m)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Number of base variables.
    pub fn g(&self) -> usize {
        self.g
    }

    /// Number of coordinates.
    pub fn r(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[FreePoly] {
        &self.coords
    }

    /// True when every coordinate has zero constant term, so `Γ(0) = 0`.
    pub fn vanishes_at_zero(&self) -> bool {
        self.coords
            .iter()
            .all(|c| c.constant_term() == C64::new(0.0, 0.0))
    }

    /// `Φ_Γ(X) = (γ_1(X), …, γ_r(X))`; the first `g` entries are copied from `X`.
    pub fn eval(&self, x: &HermitianTuple) -> Result<HermitianTuple> {
        if x.width() != self.g {
            return Err(Error::mismatch("tuple width", self.g, x.width()));
        }
        let mut out: Vec<CMatrix> = x.entries().to_vec();
        for c in &self.coords[self.g..] {
            out.push(c.eval_hermitian(x)?);
        }
        HermitianTuple::new(out)
    }
}

/// Outcome of a pair test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairCheck {
    pub is_pair: bool,
    pub residual: f64,
}

fn check_compatible(x: &HermitianTuple, v: &Isometry) -> Result<()> {
    if v.rows() != x.level() {
        return Err(Error::mismatch("isometry rows vs tuple level", x.level(), v.rows()));
    }
    Ok(())
}

/// `residual = max_j ‖V*γ_j(X)V − γ_j(V*XV)‖_F`.
pub fn is_gamma_pair(gmap: &GammaMap, x: &HermitianTuple, v: &Isometry, tol: f64) -> Result<PairCheck> {
    check_compatible(x, v)?;
    let compressed_image = gmap.eval(x)?.compress(v)?;
    let image_of_compressed = gmap.eval(&x.compress(v)?)?;
    let residual = compressed_image
        .entries()
        .iter()
        .zip(image_of_compressed.entries())
        .map(|(a, b)| frobenius(&(a - b)))
        .fold(0.0, f64::max);
    Ok(PairCheck {
        is_pair: residual <= tol,
        residual,
    })
}

/// Pair test for `Γ = {x, y, y²}` alongside the reducing-subspace criterion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Y2PairCheck {
    pub is_pair: bool,
    /// `max_j ‖V*γ_j(X)V − γ_j(V*XV)‖_F`, which here is `‖B*B‖_F` with
    /// `B = (I − VV*)YV`.
    pub gamma_residual: f64,
    /// `‖(I − VV*)YV‖_F`; zero exactly when the range of `V` reduces `Y`.
    pub reducing_residual: f64,
    /// Reducing criterion at the same scale as the Γ residual:
    /// `reducing_residual² ≤ tol`.
    pub reduces: bool,
}

pub fn is_y2_pair(x: &CMatrix, y: &CMatrix, v: &Isometry, tol: f64) -> Result<Y2PairCheck> {
    let t = HermitianTuple::new(vec![x.clone(), y.clone()])?;
    let check = is_gamma_pair(&GammaMap::y2(), &t, v, tol)?;
    let vm = v.matrix();
    let proj = identity(vm.nrows()) - vm * vm.adjoint();
    let reducing_residual = frobenius(&(proj * y * vm));
    Ok(Y2PairCheck {
        is_pair: check.is_pair,
        gamma_residual: check.residual,
        reducing_residual,
        reduces: reducing_residual * reducing_residual <= tol,
    })
}

/// `residual = ‖V*XYV − (V*XV)(V*YV)‖_F`.
pub fn is_xy_pair(x: &CMatrix, y: &CMatrix, v: &Isometry, tol: f64) -> Result<PairCheck> {
    let t = HermitianTuple::new(vec![x.clone(), y.clone()])?;
    check_compatible(&t, v)?;
    let vm = v.matrix();
    let vs = vm.adjoint();
    let lhs = &vs * x * y * vm;
    let rhs = (&vs * x * vm) * (&vs * y * vm);
    let residual = frobenius(&(lhs - rhs));
    Ok(PairCheck {
        is_pair: residual <= tol,
        residual,
    })
}
