//! Γ-pencils `L(x) = A_0 + Σ_j A_j γ_j(x)` and the TV-screen pencils.

pub mod exact;
mod tv;

pub use exact::{verify_tv_identity, RationalPoly};
pub use tv::{
    degenerate_pencil, tv_pencil, tv_pencil_explicit, tv_recipe, TvRecipe, UniPoly,
};

use crate::error::{Error, Result};
use crate::gamma::GammaMap;
use crate::ncpoly::{default_names, HermitianTuple, MatrixPoly, Word};
use crate::numerics::{
    check_hermitian, frobenius, hermitian_part, herm_inv_sqrt, identity, kron, min_eig, CMatrix, C64,
};
use crate::tolerances;

/// Hermitian coefficients `A_0, …, A_r` of size `d` over a Γ-map with `r` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaPencil {
    gmap: GammaMap,
    size: usize,
    coeffs: Vec<CMatrix>,
}

impl GammaPencil {
    pub fn new(gmap: GammaMap, coeffs: Vec<CMatrix>) -> Result<Self> {
        if coeffs.len() != gmap.r() + 1 {
            return Err(Error::mismatch("pencil coefficient count", gmap.r() + 1, coeffs.len()));
        }
        let size = coeffs[0].nrows();
        if size == 0 {
            return Err(Error::InvalidParameter("pencil size must be at least 1".into()));
        }
        for a in &coeffs {
            if a.nrows() != size || a.ncols() != size {
                return Err(Error::mismatch("pencil coefficient size", size, a.nrows().max(a.ncols())));
            }
            check_hermitian(a, tolerances::HERMITIAN_INPUT)?;
        }
        Ok(GammaPencil { gmap, size, coeffs })
    }

    /// Stores Hermitian parts of computed coefficients (output tolerance).
    pub(crate) fn from_computed(gmap: GammaMap, coeffs: Vec<CMatrix>) -> Result<Self> {
        for a in &coeffs {
            check_hermitian(a, tolerances::HERMITIAN_OUTPUT)?;
        }
        Self::new(gmap, coeffs.iter().map(hermitian_part).collect())
    }

    /// A pencil `I + Σ A_j z_j` in `r` plain variables.
    pub fn linear(coeffs: Vec<CMatrix>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyInput("pencil coefficients"));
        }
        Self::new(GammaMap::identity(coeffs.len() - 1), coeffs)
    }

    pub fn gmap(&self) -> &GammaMap {
        &self.gmap
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `A_0, A_1, …, A_r`.
    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn a0(&self) -> &CMatrix {
        &self.coeffs[0]
    }

    /// `‖A_0 − I‖_F ≤ 1e-12`.
    pub fn is_monic(&self) -> bool {
        frobenius(&(self.a0() - identity(self.size))) <= tolerances::MONIC
    }

    /// `L(Z) = A_0 ⊗ I + Σ A_j ⊗ Z_j` for a tuple `Z` in the `r` Γ-coordinates.
    pub fn eval_linear(&self, z: &HermitianTuple) -> Result<CMatrix> {
        if z.width() != self.gmap.r() {
            return Err(Error::mismatch("coordinate tuple width", self.gmap.r(), z.width()));
        }
        let n = z.level();
        let mut out = kron(self.a0(), &identity(n));
        for (a, e) in self.coeffs[1..].iter().zip(z.entries()) {
            out += kron(a, e);
        }
        Ok(hermitian_part(&out))
    }

    /// `L(X) = A_0 ⊗ I_n + Σ A_j ⊗ γ_j(X)`, of size `dn`.
    pub fn eval(&self, x: &HermitianTuple) -> Result<CMatrix> {
        self.eval_linear(&self.gmap.eval(x)?)
    }

    pub fn min_eig_at(&self, x: &HermitianTuple) -> Result<f64> {
        min_eig(&self.eval(x)?)
    }

    /// The expanded matrix polynomial `A_0 ⊗ 1 + Σ A_j ⊗ γ_j`.
    pub fn to_matrix_poly(&self) -> Result<MatrixPoly> {
        let g = self.gmap.g();
        let mut p = MatrixPoly::from_terms(g, self.size, self.size, [(Word::unit(), self.a0().clone())])?;
        for (a, gamma) in self.coeffs[1..].iter().zip(self.gmap.coords()) {
            p = p.add(&MatrixPoly::tensor(a, gamma))?;
        }
        Ok(p)
    }

    /// `A_j ↦ A_0^{-1/2} A_j A_0^{-1/2}`; needs `λ_min(A_0) > 1e-10`.
    ///
    /// The result is congruent to `L`, so both have the same positivity set.
    pub fn make_monic(&self) -> Result<Self> {
        if self.is_monic() {
            return Ok(self.clone());
        }
        let s = herm_inv_sqrt(self.a0(), tolerances::MONIC_PIVOT)?;
        let mut coeffs: Vec<CMatrix> = self.coeffs.iter().map(|a| hermitian_part(&(&s * a * &s))).collect();
        coeffs[0] = identity(self.size);
        Self::new(self.gmap.clone(), coeffs)
    }

    /// `t I + (1 − t) L`: monic, coefficients scaled by `1 − t`, and
    /// `λ_min ≥ t` wherever `L ⪰ 0`.
    pub fn strictify(&self, t: f64) -> Result<Self> {
        if !self.is_monic() {
            return Err(Error::PreconditionViolated("strictify needs a monic pencil".into()));
        }
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidParameter(format!("strictify weight {t} outside (0, 1)")));
        }
        let mut coeffs: Vec<CMatrix> = self.coeffs.iter().map(|a| a.scale(1.0 - t)).collect();
        coeffs[0] = identity(self.size);
        Self::new(self.gmap.clone(), coeffs)
    }

    /// The same coefficients read as a linear pencil in the `r` coordinates.
    pub fn linear_part(&self) -> Self {
        GammaPencil {
            gmap: GammaMap::identity(self.gmap.r()),
            size: self.size,
            coeffs: self.coeffs.clone(),
        }
    }

    /// LaTeX `pmatrix` of the entries as polynomials in the Γ-coordinates.
    pub fn to_latex(&self) -> String {
        let names = default_names(self.gmap.g());
        let labels: Vec<String> = self
            .gmap
            .coords()
            .iter()
            .map(|c| {
                let s = c.render(&names);
                if c.num_terms() > 1 {
                    format!("({s})")
                } else {
                    s
                }
            })
            .collect();
        let mut rows = Vec::with_capacity(self.size);
        for i in 0..self.size {
            let mut cells = Vec::with_capacity(self.size);
            for j in 0..self.size {
                cells.push(latex_entry(
                    self.coeffs.iter().map(|a| a[(i, j)]),
                    &labels,
                ));
            }
            rows.push(cells.join(" & "));
        }
        format!("\\begin{{pmatrix}}\n{}\n\\end{{pmatrix}}", rows.join(" \\\\\n"))
    }
}

fn latex_number(c: C64) -> String {
    let fmt = |v: f64| {
        let r = (v * 1e12).round() / 1e12;
        format!("{r}")
    };
    if c.im == 0.0 {
        fmt(c.re)
    } else if c.re == 0.0 {
        format!("{}i", fmt(c.im))
    } else {
        format!("({}{}{}i)", fmt(c.re), if c.im < 0.0 { "-" } else { "+" }, fmt(c.im.abs()))
    }
}

fn latex_entry(values: impl Iterator<Item = C64>, labels: &[String]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (k, v) in values.enumerate() {
        if v.norm() == 0.0 {
            continue;
        }
        let term = if k == 0 {
            latex_number(v)
        } else if v == C64::new(1.0, 0.0) {
            labels[k - 1].clone()
        } else if v == C64::new(-1.0, 0.0) {
            format!("-{}", labels[k - 1])
        } else {
            format!("{} {}", latex_number(v), labels[k - 1])
        };
        parts.push(term);
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}

/// `L' = M ∘ Φ_Γ` for a linear pencil `M` in `r` variables.
pub fn compose_with_gamma(m: &GammaPencil, gmap: &GammaMap) -> Result<GammaPencil> {
    if m.gmap.r() != gmap.r() {
        return Err(Error::mismatch("linear pencil variable count", gmap.r(), m.gmap.r()));
    }
    if m.gmap.r() != m.gmap.g() {
        return Err(Error::PreconditionViolated(
            "composition needs a linear pencil (identity Γ-map)".into(),
        ));
    }
    GammaPencil::new(gmap.clone(), m.coeffs.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::from_real_rows;
    use crate::numerics::random::{random_hermitian, rng_for};
    use rand::Rng;

    fn m(n: usize, v: &[f64]) -> CMatrix {
        from_real_rows(n, n, v)
    }

    fn random_pencil(gmap: &GammaMap, size: usize, seed: u64) -> GammaPencil {
        let mut rng = rng_for(seed, 21);
        let mut coeffs: Vec<CMatrix> = (0..=gmap.r()).map(|_| random_hermitian(size, &mut rng)).collect();
        let shift = crate::numerics::min_eig(&coeffs[0]).unwrap();
        coeffs[0] += identity(size).scale(1.0 - shift);
        GammaPencil::new(gmap.clone(), coeffs).unwrap()
    }

    fn random_point(g: usize, n: usize, rng: &mut impl Rng) -> HermitianTuple {
        HermitianTuple::new((0..g).map(|_| random_hermitian(n, rng)).collect()).unwrap()
    }

    #[test]
    fn monic_pencil_at_zero_is_identity() {
        let l = random_pencil(&GammaMap::y2(), 3, 1).make_monic().unwrap();
        let v = l.eval(&HermitianTuple::zeros(2, 2)).unwrap();
        assert!(frobenius(&(v - identity(6))) < 1e-14);
        assert!((l.min_eig_at(&HermitianTuple::zeros(2, 2)).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn small_scalar_pencil_min_eig() {
        // I + [[0,1],[1,0]]x + diag(0,−1)y² at (1, 0) is [[1,1],[1,1]].
        let l = GammaPencil::new(
            GammaMap::y2(),
            vec![identity(2), m(2, &[0.0, 1.0, 1.0, 0.0]), CMatrix::zeros(2, 2), m(2, &[0.0, 0.0, 0.0, -1.0])],
        )
        .unwrap();
        assert!(l.min_eig_at(&HermitianTuple::scalars(&[1.0, 0.0])).unwrap().abs() < 1e-14);
    }

    #[test]
    fn constructor_validation() {
        let g = GammaMap::y2();
        assert!(GammaPencil::new(g.clone(), vec![identity(2); 3]).is_err());
        let bad = m(2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(GammaPencil::new(g.clone(), vec![identity(2), bad, identity(2), identity(2)]).is_err());
        assert!(GammaPencil::new(g, vec![identity(2), identity(3), identity(2), identity(2)]).is_err());
    }

    #[test]
    fn make_monic_examples() {
        let l = random_pencil(&GammaMap::y2(), 3, 2).make_monic().unwrap();
        assert_eq!(l.make_monic().unwrap(), l);

        let a = random_pencil(&GammaMap::identity(2), 2, 3);
        let mut coeffs = a.coeffs().to_vec();
        coeffs[0] = identity(2).scale(4.0);
        let l4 = GammaPencil::new(a.gmap().clone(), coeffs.clone()).unwrap();
        let monic = l4.make_monic().unwrap();
        assert!(monic.is_monic());
        for (x, y) in monic.coeffs()[1..].iter().zip(&coeffs[1..]) {
            assert!(frobenius(&(x - y.scale(0.25))) < 1e-14);
        }

        let singular = GammaPencil::new(
            GammaMap::identity(1),
            vec![m(2, &[1.0, 0.0, 0.0, 0.0]), identity(2)],
        )
        .unwrap();
        assert!(matches!(singular.make_monic(), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn make_monic_preserves_positivity_sign() {
        let mut rng = rng_for(4, 0);
        let gmap = GammaMap::y2();
        let mut checked = 0;
        for trial in 0..1000 {
            let l = random_pencil(&gmap, 3, 100 + trial as u64 % 10);
            let monic = l.make_monic().unwrap();
            let n = rng.random_range(1..=2);
            let x = random_point(2, n, &mut rng).scale(0.5);
            let a = l.min_eig_at(&x).unwrap();
            let b = monic.min_eig_at(&x).unwrap();
            if a.abs() > 1e-9 && b.abs() > 1e-9 {
                assert_eq!(a > 0.0, b > 0.0, "trial {trial}");
                checked += 1;
            }
        }
        assert!(checked > 900);
    }

    #[test]
    fn expansion_matches_direct_eval() {
        let mut rng = rng_for(5, 0);
        for gmap in [GammaMap::y2(), GammaMap::xy(), GammaMap::identity(3)] {
            let l = random_pencil(&gmap, 2, 6);
            let p = l.to_matrix_poly().unwrap();
            for n in 1..=3 {
                let x = random_point(gmap.g(), n, &mut rng);
                let a = l.eval(&x).unwrap();
                let b = p.eval(&x).unwrap();
                assert!(frobenius(&(&a - b)) <= 1e-10 * frobenius(&a).max(1.0));
            }
        }
    }

    #[test]
    fn composition_examples() {
        let gmap = GammaMap::y2();
        let constant = GammaPencil::linear(vec![identity(2), CMatrix::zeros(2, 2), CMatrix::zeros(2, 2), CMatrix::zeros(2, 2)]).unwrap();
        let c = compose_with_gamma(&constant, &gmap).unwrap();
        let mut rng = rng_for(7, 0);
        let x = random_point(2, 2, &mut rng);
        assert!(frobenius(&(c.eval(&x).unwrap() - identity(4))) < 1e-14);

        let e11 = m(2, &[1.0, 0.0, 0.0, 0.0]);
        let mm = GammaPencil::linear(vec![identity(2), CMatrix::zeros(2, 2), CMatrix::zeros(2, 2), e11.clone()]).unwrap();
        let l = compose_with_gamma(&mm, &gmap).unwrap();
        // I + E11·y² by direct substitution.
        let y = x.entry(1);
        let expected = identity(4) + kron(&e11, &(y * y));
        assert!(frobenius(&(l.eval(&x).unwrap() - expected)) < 1e-12);

        let plain = random_pencil(&GammaMap::identity(2), 2, 8);
        assert_eq!(compose_with_gamma(&plain, &GammaMap::identity(2)).unwrap(), plain);
        assert!(compose_with_gamma(&plain, &gmap).is_err());
    }

    #[test]
    fn composition_commutes_with_evaluation() {
        let mut rng = rng_for(9, 0);
        for trial in 0..1000u64 {
            let gmap = match trial % 3 {
                0 => GammaMap::y2(),
                1 => GammaMap::xy(),
                _ => GammaMap::identity(2),
            };
            let lin = random_pencil(&GammaMap::identity(gmap.r()), 2, trial).linear_part();
            let l = compose_with_gamma(&lin, &gmap).unwrap();
            let n = rng.random_range(1..=3);
            let x = random_point(2, n, &mut rng);
            let a = l.eval(&x).unwrap();
            let b = lin.eval_linear(&gmap.eval(&x).unwrap()).unwrap();
            assert!(frobenius(&(&a - b)) <= 1e-10 * frobenius(&a).max(1.0));
        }
    }

    #[test]
    fn strictify_examples() {
        let l = random_pencil(&GammaMap::y2(), 3, 10).make_monic().unwrap();
        let half = l.strictify(0.5).unwrap();
        for (a, b) in half.coeffs()[1..].iter().zip(&l.coeffs()[1..]) {
            assert!(frobenius(&(a - b.scale(0.5))) < 1e-15);
        }
        let tiny = l.strictify(1e-12).unwrap();
        for (a, b) in tiny.coeffs().iter().zip(l.coeffs()) {
            assert!(frobenius(&(a - b)) < 1e-10);
        }
        assert!(l.strictify(0.0).is_err() && l.strictify(1.0).is_err());
        assert!(random_pencil(&GammaMap::y2(), 2, 1).strictify(0.5).is_err());
    }

    #[test]
    fn strictify_lifts_boundary_to_t() {
        let l = GammaPencil::new(
            GammaMap::y2(),
            vec![identity(2), m(2, &[0.0, 1.0, 1.0, 0.0]), CMatrix::zeros(2, 2), m(2, &[0.0, 0.0, 0.0, -1.0])],
        )
        .unwrap();
        let x = HermitianTuple::scalars(&[1.0, 0.0]);
        assert!(l.min_eig_at(&x).unwrap().abs() < 1e-14);
        for t in [0.1, 0.3, 0.7] {
            let s = l.strictify(t).unwrap();
            assert!((s.min_eig_at(&x).unwrap() - t).abs() < 1e-12);
        }
    }

    #[test]
    fn latex_rendering() {
        let tex = degenerate_pencil().to_latex();
        assert!(tex.contains("y^2"), "{tex}");
        assert!(tex.starts_with("\\begin{pmatrix}"));
        let tex = GammaPencil::new(
            GammaMap::xy(),
            vec![identity(1), identity(1), CMatrix::zeros(1, 1), identity(1).scale(-0.5), CMatrix::zeros(1, 1)],
        )
        .unwrap()
        .to_latex();
        assert!(tex.contains("1 + x - 0.5 (xy + yx)"), "{tex}");
    }
}
