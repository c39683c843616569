use crate::error::{Error, Result};
use crate::gamma::Isometry;
use crate::numerics::{check_hermitian, direct_sum, hermitian_part, CMatrix, C64};
use crate::tolerances;

/// A point `X = (X_1, …, X_g)` of Hermitian `n × n` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianTuple {
    level: usize,
    entries: Vec<CMatrix>,
}

impl HermitianTuple {
    /// Validates shapes and Hermitian defect (`1e-12` relative). Inputs are
    /// rejected, never silently symmetrized.
    pub fn new(entries: Vec<CMatrix>) -> Result<Self> {
        Self::checked(entries, tolerances::HERMITIAN_INPUT)
    }

    /// Like [`new`](Self::new) but for computed matrices: accepts the looser
    /// output tolerance and stores the Hermitian parts.
    pub fn from_computed(entries: Vec<CMatrix>) -> Result<Self> {
        let t = Self::checked(entries, tolerances::HERMITIAN_OUTPUT)?;
        Ok(HermitianTuple {
            level: t.level,
            entries: t.entries.iter().map(hermitian_part).collect(),
        })
    }

    fn checked(entries: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let first = entries.first().ok_or(Error::EmptyInput("tuple entries"))?;
        let level = first.nrows();
        if level == 0 {
            return Err(Error::InvalidParameter("tuple level must be at least 1".into()));
        }
        for e in &entries {
            if e.nrows() != level || e.ncols() != level {
                return Err(Error::mismatch("tuple entry size", level, e.nrows().max(e.ncols())));
            }
            check_hermitian(e, tol)?;
        }
        Ok(HermitianTuple { level, entries })
    }

    /// The zero tuple of width `g` at level `n`.
    pub fn zeros(g: usize, n: usize) -> Self {
        HermitianTuple {
            level: n,
            entries: vec![CMatrix::zeros(n, n); g],
        }
    }

    /// A level-one tuple from real scalars.
    pub fn scalars(values: &[f64]) -> Self {
        HermitianTuple {
            level: 1,
            entries: values
                .iter()
                .map(|&v| CMatrix::from_element(1, 1, C64::new(v, 0.0)))
                .collect(),
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn width(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[CMatrix] {
        &self.entries
    }

    pub fn entry(&self, j: usize) -> &CMatrix {
        &self.entries[j]
    }

    pub fn into_entries(self) -> Vec<CMatrix> {
        self.entries
    }

    /// Real parts of a level-one tuple.
    pub fn as_scalars(&self) -> Option<Vec<f64>> {
        (self.level == 1).then(|| self.entries.iter().map(|e| e[(0, 0)].re).collect())
    }

    /// `X ⊕ Y`, entrywise.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.width() != other.width() {
            return Err(Error::mismatch("tuple width", self.width(), other.width()));
        }
        Ok(HermitianTuple {
            level: self.level + other.level,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| direct_sum(a, b))
                .collect(),
        })
    }

    /// `V*XV` for an arbitrary `n × m` matrix `V`, symmetrized.
    pub fn compress_by(&self, v: &CMatrix) -> Result<Self> {
        if v.nrows() != self.level {
            return Err(Error::mismatch("compression rows", self.level, v.nrows()));
        }
        if v.ncols() == 0 {
            return Err(Error::InvalidParameter("compression to level 0".into()));
        }
        let vs = v.adjoint();
        Ok(HermitianTuple {
            level: v.ncols(),
            entries: self
                .entries
                .iter()
                .map(|e| hermitian_part(&(&vs * e * v)))
                .collect(),
        })
    }

    /// `V*XV` for an isometry `V`.
    pub fn compress(&self, v: &Isometry) -> Result<Self> {
        self.compress_by(v.matrix())
    }

    /// `U*XU` for a square `U`.
    pub fn conjugate(&self, u: &CMatrix) -> Self {
        self.compress_by(u).expect("square conjugation matches the level")
    }

    pub fn scale(&self, t: f64) -> Self {
        HermitianTuple {
            level: self.level,
            entries: self.entries.iter().map(|e| e.scale(t)).collect(),
        }
    }

    /// `a·X + b·Y`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.width() != other.width() {
            return Err(Error::mismatch("tuple width", self.width(), other.width()));
        }
        if self.level != other.level {
            return Err(Error::mismatch("tuple level", self.level, other.level));
        }
        Ok(HermitianTuple {
            level: self.level,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(x, y)| x.scale(a) + y.scale(b))
                .collect(),
        })
    }

    /// Replaces entry `j`.
    pub fn with_entry(&self, j: usize, m: CMatrix) -> Result<Self> {
        let mut entries = self.entries.clone();
        if j >= entries.len() {
            return Err(Error::mismatch("tuple entry index", entries.len(), j + 1));
        }
        entries[j] = m;
        Self::new(entries)
    }

    /// Largest operator norm among the entries.
    pub fn max_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(crate::numerics::op_norm)
            .fold(0.0, f64::max)
    }
}

/// Row/column permutation relating `p(X ⊕ Y)` to `p(X) ⊕ p(Y)` for a matrix
/// polynomial with `μ × μ` coefficients: `p(X⊕Y)[i, j] = (p(X)⊕p(Y))[π(i), π(j)]`.
pub fn direct_sum_embedding(mu: usize, n1: usize, n2: usize) -> Vec<usize> {
    let n = n1 + n2;
    let mut perm = Vec::with_capacity(mu * n);
    for a in 0..mu {
        for k in 0..n {
            perm.push(if k < n1 {
                a * n1 + k
            } else {
                mu * n1 + a * n2 + (k - n1)
            });
        }
    }
    perm
}
