use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use super::{HermitianTuple, WordCache, Word};
use crate::error::{Error, Result};
use crate::numerics::{check_hermitian, CMatrix, C64};
use crate::tolerances;

/// Scalar free polynomial `Σ p_w w` in `nvars` symmetric variables.
#[derive(Clone, Debug, PartialEq)]
pub struct FreePoly {
    nvars: usize,
    terms: BTreeMap<Word, C64>,
}

impl FreePoly {
    pub fn zero(nvars: usize) -> Self {
        FreePoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        let mut p = Self::zero(nvars);
        p.insert(Word::unit(), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C64::new(1.0, 0.0))
    }

    /// The variable `x_{j+1}`.
    pub fn var(nvars: usize, j: usize) -> Result<Self> {
        Self::monomial(nvars, Word::var(j), C64::new(1.0, 0.0))
    }

    pub fn monomial(nvars: usize, w: Word, c: C64) -> Result<Self> {
        Self::from_terms(nvars, [(w, c)])
    }

    /// Collects terms, summing repeated words and dropping zeros.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Word, C64)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (w, c) in terms {
            if !w.fits(nvars) {
                return Err(Error::mismatch(
                    "word letter index",
                    nvars,
                    w.max_letter().unwrap_or(0) + 1,
                ));
            }
            p.insert(w, c);
        }
        Ok(p)
    }

    fn insert(&mut self, w: Word, c: C64) {
        let zero = C64::new(0.0, 0.0);
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                if c != zero {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == zero {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> C64 {
        self.terms.get(w).copied().unwrap_or_default()
    }

    pub fn constant_term(&self) -> C64 {
        self.coeff(&Word::unit())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest word length; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).max()
    }

    /// `p* = Σ conj(p_w) w*`.
    pub fn adjoint(&self) -> Self {
        FreePoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.involution(), c.conj()))
                .collect(),
        }
    }

    /// Exact coefficient comparison of `p*` with `p`.
    pub fn is_symmetric(&self) -> bool {
        self.adjoint() == *self
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::mismatch("polynomial variable count", self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.insert(w.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = Self::zero(self.nvars);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.insert(u.concat(v), a * b);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> Self {
        if c == C64::new(0.0, 0.0) {
            return Self::zero(self.nvars);
        }
        FreePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self).expect("same variable count");
        }
        out
    }

    /// `p(X) = Σ p_w w(X)`.
    pub fn eval(&self, x: &HermitianTuple) -> Result<CMatrix> {
        if x.width() != self.nvars {
            return Err(Error::mismatch("tuple width", self.nvars, x.width()));
        }
        let n = x.level();
        let mut cache = WordCache::new(x);
        let mut out = CMatrix::zeros(n, n);
        for (w, c) in &self.terms {
            out += cache.eval(w) * *c;
        }
        Ok(out)
    }

    /// Evaluation of a symmetric polynomial, checked Hermitian and symmetrized.
    pub fn eval_hermitian(&self, x: &HermitianTuple) -> Result<CMatrix> {
        let v = self.eval(x)?;
        check_hermitian(&v, tolerances::HERMITIAN_OUTPUT)?;
        Ok(crate::numerics::hermitian_part(&v))
    }

    /// Value at a real scalar point.
    pub fn eval_scalar(&self, point: &[f64]) -> Result<C64> {
        if point.len() != self.nvars {
            return Err(Error::mismatch("scalar point width", self.nvars, point.len()));
        }
        Ok(self
            .terms
            .iter()
            .map(|(w, c)| c * w.letters().iter().map(|&j| point[j]).product::<f64>())
            .sum())
    }
}

pub(crate) fn fmt_coeff(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 && c.im == 1.0 {
        "i".into()
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

impl FreePoly {
    /// Human-readable form with the given variable names.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let neg = (c.im == 0.0 && c.re < 0.0) || (c.re == 0.0 && c.im < 0.0);
            let c = if neg { -c } else { *c };
            match (k == 0, neg) {
                (true, true) => out.push('-'),
                (true, false) => {}
                (false, true) => out.push_str(" - "),
                (false, false) => out.push_str(" + "),
            }
            if w.is_empty() {
                out.push_str(&fmt_coeff(c));
            } else if c == C64::new(1.0, 0.0) {
                out.push_str(&w.render(names));
            } else {
                out.push_str(&format!("{}*{}", fmt_coeff(c), w.render(names)));
            }
        }
        out
    }
}

impl fmt::Display for FreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|j| format!("x{j}")).collect();
        write!(f, "{}", self.render(&names))
    }
}
