use std::cmp::Ordering;
use std::fmt;

/// A word in the letters `x1, …, xg`; the empty word is the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    /// The single-letter word for 0-based variable `j`.
    pub fn var(j: usize) -> Self {
        Word(vec![j])
    }

    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    /// `x_j^k`.
    pub fn power(j: usize, k: usize) -> Self {
        Word(vec![j; k])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(x_{i1} ⋯ x_{ik})* = x_{ik} ⋯ x_{i1}`.
    pub fn involution(&self) -> Self {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn max_letter(&self) -> Option<usize> {
        self.0.iter().copied().max()
    }

    pub fn fits(&self, nvars: usize) -> bool {
        self.0.iter().all(|&j| j < nvars)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Word {
    /// Renders with the given variable names, collapsing runs into powers:
    /// `x1x2x2` becomes `x1x2^2`. The unit renders as `1`.
    pub fn render(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        let mut out = String::new();
        let mut i = 0;
        while i < self.0.len() {
            let j = self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == j {
                run += 1;
            }
            out.push_str(&names[j]);
            if run > 1 {
                out.push_str(&format!("^{run}"));
            }
            i += run;
        }
        out
    }
}

/// `x1, x2, …`, or `x, y` for two variables.
pub fn default_names(nvars: usize) -> Vec<String> {
    if nvars == 2 {
        vec!["x".into(), "y".into()]
    } else {
        (1..=nvars).map(|j| format!("x{j}")).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.max_letter().map_or(0, |m| m + 1);
        let names: Vec<String> = (1..=n).map(|j| format!("x{j}")).collect();
        write!(f, "{}", self.render(&names))
    }
}
