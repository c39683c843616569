//! Small dense two-phase simplex with Bland's rule.
//!
//! Sized for cross-check oracles (a few hundred constraints at most), not
//! for production optimization.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-9;

/// `minimize c·x  s.t.  A_eq x = b_eq,  A_ub x ≤ b_ub,  x ≥ 0`.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub eq_rows: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub ub_rows: Vec<Vec<f64>>,
    pub ub_rhs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            ..Default::default()
        }
    }

    pub fn nvars(&self) -> usize {
        self.objective.len()
    }

    pub fn eq(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
        self
    }

    pub fn le(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.ub_rows.push(row);
        self.ub_rhs.push(rhs);
        self
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        let n = self.nvars();
        for row in self.eq_rows.iter().chain(&self.ub_rows) {
            if row.len() != n {
                return Err(Error::mismatch("linear program row", n, row.len()));
            }
        }
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau {
    /// `m` constraint rows, each `ncols + 1` wide (last entry is the rhs).
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_orig: usize,
    /// Columns at or beyond this index are artificial.
    first_artificial: usize,
    ncols: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let n = lp.nvars();
        let n_slack = lp.ub_rows.len();
        let m = lp.eq_rows.len() + n_slack;
        let first_artificial = n + n_slack;
        let ncols = first_artificial + m;
        let mut rows = Vec::with_capacity(m);
        let mut push = |coeffs: &[f64], slack: Option<usize>, rhs: f64, i: usize| {
            let mut r = vec![0.0; ncols + 1];
            r[..n].copy_from_slice(coeffs);
            if let Some(s) = slack {
                r[n + s] = 1.0;
            }
            r[ncols] = rhs;
            if rhs < 0.0 {
                r.iter_mut().for_each(|v| *v = -*v);
            }
            r[first_artificial + i] = 1.0;
            rows.push(r);
        };
        let mut i = 0;
        for (row, &b) in lp.eq_rows.iter().zip(&lp.eq_rhs) {
            push(row, None, b, i);
            i += 1;
        }
        for (s, (row, &b)) in lp.ub_rows.iter().zip(&lp.ub_rhs).enumerate() {
            push(row, Some(s), b, i);
            i += 1;
        }
        let basis = (first_artificial..first_artificial + m).collect();
        Tableau {
            rows,
            basis,
            n_orig: n,
            first_artificial,
            ncols,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        self.rows[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[f64], allowed: usize) -> Vec<f64> {
        let mut rc: Vec<f64> = cost[..allowed].to_vec();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost[b];
            if cb != 0.0 {
                for j in 0..allowed {
                    rc[j] -= cb * row[j];
                }
            }
        }
        rc
    }

    /// Minimizes `cost` over columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<bool> {
        let max_iter = 50 * (self.ncols + self.rows.len() + 10);
        for _ in 0..max_iter {
            let rc = self.reduced_costs(cost, allowed);
            let Some(enter) = (0..allowed).find(|&j| rc[j] < -FEAS_TOL) else {
                return Ok(true);
            };
            let rhs = self.ncols;
            let mut leave: Option<(usize, f64)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let a = row[enter];
                if a > PIVOT_TOL {
                    let ratio = row[rhs] / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-12
                                || (ratio <= lratio + 1e-12 && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
        Err(Error::LpDegenerate { iterations: max_iter })
    }

    fn run(mut self, objective: &[f64]) -> Result<LpOutcome> {
        let rhs = self.ncols;
        let mut phase1 = vec![0.0; self.ncols];
        phase1[self.first_artificial..].iter_mut().for_each(|v| *v = 1.0);
        self.optimize(&phase1, self.ncols)?;
        let infeas: f64 = self
            .rows
            .iter()
            .zip(&self.basis)
            .filter(|(_, &b)| b >= self.first_artificial)
            .map(|(row, _)| row[rhs])
            .sum();
        let scale = 1.0 + self.rows.iter().map(|r| r[rhs].abs()).fold(0.0, f64::max);
        if infeas > FEAS_TOL * scale {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= self.first_artificial {
                let col = (0..self.first_artificial).find(|&j| self.rows[r][j].abs() > PIVOT_TOL);
                match col {
                    Some(c) => self.pivot(r, c),
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        let mut cost = vec![0.0; self.ncols];
        cost[..self.n_orig].copy_from_slice(objective);
        if !self.optimize(&cost, self.first_artificial)? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut x = vec![0.0; self.n_orig];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.n_orig {
                x[b] = row[rhs].max(0.0);
            }
        }
        let value = x.iter().zip(objective).map(|(a, c)| a * c).sum();
        Ok(LpOutcome::Optimal { x, value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), value 36.
        let mut lp = LinearProgram::new(vec![-3.0, -5.0]);
        lp.le(vec![1.0, 0.0], 4.0)
            .le(vec![0.0, 2.0], 12.0)
            .le(vec![3.0, 2.0], 18.0);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { x, value } => {
                assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
                assert!((value + 36.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![0.0]);
        lp.eq(vec![1.0], -1.0);
        assert_eq!(lp.solve().unwrap(), LpOutcome::Infeasible);
        let mut lp = LinearProgram::new(vec![-1.0, 0.0]);
        lp.le(vec![-1.0, 1.0], 1.0);
        assert_eq!(lp.solve().unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.eq(vec![1.0, 1.0], 1.0).eq(vec![2.0, 2.0], 2.0);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { value, .. } => assert!((value - 1.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the largest-coefficient rule.
        let mut lp = LinearProgram::new(vec![-0.75, 150.0, -0.02, 6.0]);
        lp.le(vec![0.25, -60.0, -0.04, 9.0], 0.0)
            .le(vec![0.5, -90.0, -0.02, 3.0], 0.0)
            .le(vec![0.0, 0.0, 1.0, 0.0], 1.0);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { value, .. } => assert!((value + 0.05).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }
}
