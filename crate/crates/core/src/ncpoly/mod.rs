//! Free polynomials in symmetric noncommuting variables.
//!
//! Letters are stored 0-based internally; `x1` is letter `0`. The JSON
//! format in [`crate::io`] uses 1-based indices.

mod matrix;
mod poly;
mod tuple;
mod word;

pub use matrix::MatrixPoly;
pub use poly::FreePoly;
pub use tuple::{direct_sum_embedding, HermitianTuple};
pub use word::{default_names, Word};

use std::collections::HashMap;

use crate::numerics::{identity, CMatrix};

/// Evaluates words on a fixed tuple, reusing products of shared prefixes.
pub(crate) struct WordCache<'a> {
    x: &'a HermitianTuple,
    cache: HashMap<Vec<usize>, CMatrix>,
}

impl<'a> WordCache<'a> {
    pub(crate) fn new(x: &'a HermitianTuple) -> Self {
        WordCache {
            x,
            cache: HashMap::new(),
        }
    }

    pub(crate) fn eval(&mut self, w: &Word) -> CMatrix {
        let letters = w.letters();
        if letters.is_empty() {
            return identity(self.x.level());
        }
        if let Some(m) = self.cache.get(letters) {
            return m.clone();
        }
        let mut k = letters.len() - 1;
        while k > 0 && !self.cache.contains_key(&letters[..k]) {
            k -= 1;
        }
        let mut acc = if k == 0 {
            identity(self.x.level())
        } else {
            self.cache[&letters[..k]].clone()
        };
        for i in k..letters.len() {
            acc = if i == 0 {
                self.x.entry(letters[0]).clone()
            } else {
                acc * self.x.entry(letters[i])
            };
            self.cache.insert(letters[..=i].to_vec(), acc.clone());
        }
        acc
    }
}
