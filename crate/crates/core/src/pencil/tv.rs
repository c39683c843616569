//! Monic `y²`-pencils for the TV screens `{I − X² − Y^{2d} ⪰ 0}`.

use super::GammaPencil;
use crate::error::{Error, Result};
use crate::gamma::GammaMap;
use crate::numerics::{identity, re, CMatrix};

/// Real univariate polynomial in `y`, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct UniPoly(pub Vec<f64>);

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly(Vec::new())
    }

    pub fn constant(c: f64) -> Self {
        UniPoly(vec![c]).trimmed()
    }

    /// `c·y^k`.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut v = vec![0.0; k + 1];
        v[k] = c;
        UniPoly(v).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last() == Some(&0.0) {
            self.0.pop();
        }
        self
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.0.get(k).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        UniPoly((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect()).trimmed()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.0.is_empty() || other.0.is_empty() {
            return Self::zero();
        }
        let mut v = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        UniPoly(v).trimmed()
    }

    pub fn scale(&self, c: f64) -> Self {
        UniPoly(self.0.iter().map(|a| a * c).collect()).trimmed()
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * y + c)
    }
}

/// Intermediate data of the TV-screen pencil construction for `d ≥ 2`.
#[derive(Clone, Debug)]
pub struct TvRecipe {
    pub d: usize,
    /// `α_k = √((d−1−k)/(d−1))` for `0 ≤ k ≤ d−2`.
    pub alpha: Vec<f64>,
    /// `c_k = α_k / α_{k−1}` for `1 ≤ k ≤ d−2`; `c[0]` holds `c_1`.
    pub c: Vec<f64>,
    /// `q = √(d−1)(y² − 1)`.
    pub q: UniPoly,
    /// `d × (d−1)`: lower bidiagonal with `−c_k y` below the diagonal, last
    /// row `α_k y^k q`.
    pub w: Vec<Vec<UniPoly>>,
    /// `WW* + diag(0, …, 0, 1 − y^{2d})`.
    pub m: Vec<Vec<UniPoly>>,
}

impl TvRecipe {
    /// Largest deviation in `α_k² − 2α_{k+1}² + α_{k+2}² = 0` (`k ≤ d−4`)
    /// and `α_{d−3}² − 2α_{d−2}² = 0`.
    pub fn telescoping_defect(&self) -> f64 {
        let a2: Vec<f64> = self.alpha.iter().map(|a| a * a).collect();
        let d = self.d;
        let mut worst: f64 = 0.0;
        for k in 0..d.saturating_sub(3) {
            worst = worst.max((a2[k] - 2.0 * a2[k + 1] + a2[k + 2]).abs());
        }
        if d >= 3 {
            worst = worst.max((a2[d - 3] - 2.0 * a2[d - 2]).abs());
        }
        worst
    }

    /// Largest `|Π_{j≤k} c_j − α_k|`.
    pub fn product_defect(&self) -> f64 {
        let mut prod = 1.0;
        let mut worst: f64 = 0.0;
        for (k, c) in self.c.iter().enumerate() {
            prod *= c;
            worst = worst.max((prod - self.alpha[k + 1]).abs());
        }
        worst
    }

    /// Highest power of `y` appearing in `M`.
    pub fn m_degree(&self) -> usize {
        self.m
            .iter()
            .flatten()
            .filter_map(UniPoly::degree)
            .max()
            .unwrap_or(0)
    }

    /// `L_d = [[1, x e_dᵀ], [x e_d, M]]` as a `y²`-pencil before monic scaling.
    pub fn bordered_pencil(&self) -> Result<GammaPencil> {
        if self.m_degree() > 2 {
            return Err(Error::PreconditionViolated(format!(
                "M has degree {} in y; a y²-pencil needs at most 2",
                self.m_degree()
            )));
        }
        let d = self.d;
        let size = d + 1;
        let mut a0 = CMatrix::zeros(size, size);
        let mut ax = CMatrix::zeros(size, size);
        let mut ay = CMatrix::zeros(size, size);
        let mut ay2 = CMatrix::zeros(size, size);
        a0[(0, 0)] = re(1.0);
        ax[(0, d)] = re(1.0);
        ax[(d, 0)] = re(1.0);
        for i in 0..d {
            for j in 0..d {
                let e = &self.m[i][j];
                a0[(i + 1, j + 1)] = re(e.coeff(0));
                ay[(i + 1, j + 1)] = re(e.coeff(1));
                ay2[(i + 1, j + 1)] = re(e.coeff(2));
            }
        }
        GammaPencil::new(GammaMap::y2(), vec![a0, ax, ay, ay2])
    }
}

/// Builds `α`, `c`, `q`, `W` and `M` for `d ≥ 2`.
pub fn tv_recipe(d: usize) -> Result<TvRecipe> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("the recipe needs d ≥ 2, got {d}")));
    }
    let dm1 = (d - 1) as f64;
    let alpha: Vec<f64> = (0..=d - 2).map(|k| ((d - 1 - k) as f64 / dm1).sqrt()).collect();
    let c: Vec<f64> = (1..=d - 2).map(|k| alpha[k] / alpha[k - 1]).collect();
    let q = UniPoly(vec![-dm1.sqrt(), 0.0, dm1.sqrt()]);

    let mut w = vec![vec![UniPoly::zero(); d - 1]; d];
    for k in 0..d - 1 {
        w[k][k] = UniPoly::constant(1.0);
        if k >= 1 {
            w[k][k - 1] = UniPoly::monomial(-c[k - 1], 1);
        }
    }
    for (j, a) in alpha.iter().enumerate() {
        w[d - 1][j] = UniPoly::monomial(*a, j).mul(&q);
    }

    let mut m = vec![vec![UniPoly::zero(); d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = UniPoly::zero();
            for k in 0..d - 1 {
                acc = acc.add(&w[i][k].mul(&w[j][k]));
            }
            m[i][j] = acc;
        }
    }
    let tail = UniPoly::constant(1.0).add(&UniPoly::monomial(-1.0, 2 * d));
    m[d - 1][d - 1] = m[d - 1][d - 1].add(&tail);
    // Cancellations in M are exact in real arithmetic; drop the floating
    // residue so the entries are visibly at most quadratic.
    for row in m.iter_mut() {
        for e in row.iter_mut() {
            let scale = e.0.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
            for v in e.0.iter_mut() {
                if v.abs() <= 1e-13 * scale {
                    *v = 0.0;
                }
            }
            *e = std::mem::take(e).trimmed();
        }
    }
    Ok(TvRecipe { d, alpha, c, q, w, m })
}

/// `I + [[0,1],[1,0]]x + diag(0,−1)y²`, i.e. `[[1, x], [x, 1 − y²]]`.
fn tv_pencil_d1() -> GammaPencil {
    let mut ax = CMatrix::zeros(2, 2);
    ax[(0, 1)] = re(1.0);
    ax[(1, 0)] = re(1.0);
    let mut ay2 = CMatrix::zeros(2, 2);
    ay2[(1, 1)] = re(-1.0);
    GammaPencil::new(GammaMap::y2(), vec![identity(2), ax, CMatrix::zeros(2, 2), ay2])
        .expect("valid coefficients")
}

/// Monic `y²`-pencil of size `d + 1` whose positivity set is the TV screen
/// `{I − X² − Y^{2d} ⪰ 0}`.
pub fn tv_pencil(d: usize) -> Result<GammaPencil> {
    match d {
        0 => Err(Error::InvalidParameter("d must be at least 1".into())),
        1 => Ok(tv_pencil_d1()),
        _ => tv_recipe(d)?.bordered_pencil()?.make_monic(),
    }
}

fn sym(size: usize, entries: &[(usize, usize, f64)]) -> CMatrix {
    let mut a = CMatrix::zeros(size, size);
    for &(i, j, v) in entries {
        a[(i - 1, j - 1)] = re(v);
        a[(j - 1, i - 1)] = re(v);
    }
    a
}

/// The hand-built pencils `L_3` (monic, size 4) and `L_4` (size 5, passed
/// through [`GammaPencil::make_monic`] when `monic` is set).
pub fn tv_pencil_explicit(d: usize, monic: bool) -> Result<GammaPencil> {
    let g = GammaMap::y2();
    match d {
        3 => GammaPencil::new(
            g,
            vec![
                identity(4),
                sym(4, &[(1, 4, 1.0)]),
                sym(4, &[(2, 3, 1.0), (3, 4, 0.5)]),
                sym(4, &[(2, 4, 1.0), (3, 3, 1.0), (4, 4, 0.25)]),
            ],
        ),
        4 => {
            let mut a0 = identity(5);
            a0[(4, 4)] = re(89.0 / 64.0);
            a0[(3, 4)] = re(-5.0 / 8.0);
            a0[(4, 3)] = re(-5.0 / 8.0);
            let l = GammaPencil::new(
                g,
                vec![
                    a0,
                    sym(5, &[(1, 5, 1.0)]),
                    sym(5, &[(2, 3, 1.0), (3, 4, 1.0)]),
                    sym(5, &[(2, 5, 1.0), (3, 3, 1.0), (4, 4, 1.0), (4, 5, -0.5), (5, 5, 5.0 / 8.0)]),
                ],
            )?;
            if monic {
                l.make_monic()
            } else {
                Ok(l)
            }
        }
        _ => Err(Error::InvalidParameter(format!(
            "explicit pencils exist for d = 3, 4 only, got {d}"
        ))),
    }
}

/// `[[1, y], [y, y²]]`: positive semidefinite everywhere, never definite.
pub fn degenerate_pencil() -> GammaPencil {
    GammaPencil::new(
        GammaMap::y2(),
        vec![
            sym(2, &[(1, 1, 1.0)]),
            CMatrix::zeros(2, 2),
            sym(2, &[(1, 2, 1.0)]),
            sym(2, &[(2, 2, 1.0)]),
        ],
    )
    .expect("valid coefficients")
}
