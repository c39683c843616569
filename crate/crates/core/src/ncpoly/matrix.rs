use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use super::{FreePoly, HermitianTuple, Word, WordCache};
use crate::error::{Error, Result};
use crate::numerics::{check_hermitian, hermitian_part, kron, CMatrix, C64};
use crate::tolerances;

/// Free polynomial `Σ A_w ⊗ w` with `rows × cols` complex coefficients.
///
/// Most uses are square (`rows = cols = μ`); rectangular coefficients appear
/// for concomitants `f(X)` mapping between different ampliations.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPoly {
    nvars: usize,
    rows: usize,
    cols: usize,
    terms: BTreeMap<Word, CMatrix>,
}

fn is_zero_matrix(m: &CMatrix) -> bool {
    m.iter().all(|z| *z == C64::new(0.0, 0.0))
}

impl MatrixPoly {
    pub fn zero(nvars: usize, rows: usize, cols: usize) -> Self {
        MatrixPoly {
            nvars,
            rows,
            cols,
            terms: BTreeMap::new(),
        }
    }

    pub fn zero_square(nvars: usize, size: usize) -> Self {
        Self::zero(nvars, size, size)
    }

    pub fn from_terms(
        nvars: usize,
        rows: usize,
        cols: usize,
        terms: impl IntoIterator<Item = (Word, CMatrix)>,
    ) -> Result<Self> {
        let mut p = Self::zero(nvars, rows, cols);
        for (w, a) in terms {
            if !w.fits(nvars) {
                return Err(Error::mismatch(
                    "word letter index",
                    nvars,
                    w.max_letter().unwrap_or(0) + 1,
                ));
            }
            if a.nrows() != rows {
                return Err(Error::mismatch("coefficient rows", rows, a.nrows()));
            }
            if a.ncols() != cols {
                return Err(Error::mismatch("coefficient columns", cols, a.ncols()));
            }
            p.insert(w, a);
        }
        Ok(p)
    }

    /// The `1 × 1` matrix polynomial with the same terms as `p`.
    pub fn from_scalar(p: &FreePoly) -> Self {
        Self::tensor(&CMatrix::from_element(1, 1, C64::new(1.0, 0.0)), p)
    }

    /// `A ⊗ p = Σ p_w A ⊗ w`.
    pub fn tensor(a: &CMatrix, p: &FreePoly) -> Self {
        let mut out = Self::zero(p.nvars(), a.nrows(), a.ncols());
        for (w, c) in p.terms() {
            out.insert(w.clone(), a * *c);
        }
        out
    }

    fn insert(&mut self, w: Word, a: CMatrix) {
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                if !is_zero_matrix(&a) {
                    v.insert(a);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += a;
                if is_zero_matrix(o.get()) {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Coefficient size `μ` of a square polynomial.
    pub fn size(&self) -> usize {
        debug_assert_eq!(self.rows, self.cols);
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &CMatrix)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> CMatrix {
        self.terms
            .get(w)
            .cloned()
            .unwrap_or_else(|| CMatrix::zeros(self.rows, self.cols))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).max()
    }

    /// Coefficient of `w*` in the result is `A_w*`.
    pub fn adjoint(&self) -> Self {
        MatrixPoly {
            nvars: self.nvars,
            rows: self.cols,
            cols: self.rows,
            terms: self
                .terms
                .iter()
                .map(|(w, a)| (w.involution(), a.adjoint()))
                .collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.adjoint() == *self
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::mismatch("polynomial variable count", self.nvars, other.nvars));
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::mismatch(
                "coefficient size",
                self.rows * self.cols,
                other.rows * other.cols,
            ));
        }
        let mut out = self.clone();
        for (w, a) in &other.terms {
            out.insert(w.clone(), a.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.nvars != other.nvars {
            return Err(Error::mismatch("polynomial variable count", self.nvars, other.nvars));
        }
        if self.cols != other.rows {
            return Err(Error::mismatch("inner coefficient size", self.cols, other.rows));
        }
        let mut out = Self::zero(self.nvars, self.rows, other.cols);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.insert(u.concat(v), a * b);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero(self.nvars, self.rows, self.cols);
        for (w, a) in &self.terms {
            out.insert(w.clone(), a * c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }

    /// `p(X) = Σ A_w ⊗ w(X)`, of size `(rows·n) × (cols·n)`.
    pub fn eval(&self, x: &HermitianTuple) -> Result<CMatrix> {
        if x.width() != self.nvars {
            return Err(Error::mismatch("tuple width", self.nvars, x.width()));
        }
        let n = x.level();
        let mut cache = WordCache::new(x);
        let mut out = CMatrix::zeros(self.rows * n, self.cols * n);
        for (w, a) in &self.terms {
            out += kron(a, &cache.eval(w));
        }
        Ok(out)
    }

    /// Evaluation of a symmetric polynomial, checked Hermitian and symmetrized.
    pub fn eval_hermitian(&self, x: &HermitianTuple) -> Result<CMatrix> {
        let v = self.eval(x)?;
        check_hermitian(&v, tolerances::HERMITIAN_OUTPUT)?;
        Ok(hermitian_part(&v))
    }
}
