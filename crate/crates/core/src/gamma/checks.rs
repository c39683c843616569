use rand::Rng;
use rayon::prelude::*;

use super::sampling::{random_gamma_pair, SampledPair};
use super::{GammaMap, Isometry};
use crate::error::{Error, Result};
use crate::ncpoly::{HermitianTuple, MatrixPoly};
use crate::numerics::random::rng_for;
use crate::numerics::{frobenius, hermitian_part, min_eig};
use crate::tolerances;

/// Sampling parameters for randomized falsification.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialConfig {
    pub trials: usize,
    /// Levels `n` to draw points at; the isometry rank is uniform on `1..=n`.
    pub levels: Vec<usize>,
    /// Upper bound on the operator norm of each sampled coordinate.
    pub scale: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            trials: 1000,
            levels: vec![1, 2, 3, 4],
            scale: 1.5,
        }
    }
}

impl TrialConfig {
    pub fn with_trials(trials: usize) -> Self {
        TrialConfig {
            trials,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub trial: usize,
    pub point: HermitianTuple,
    pub isometry: Isometry,
    /// Minimum eigenvalue of the convexity defect, or the equality residual
    /// for concomitant checks.
    pub gap: f64,
}

/// Falsification outcome. `NoCounterexample` is evidence, not proof.
#[derive(Clone, Debug)]
pub enum Verdict {
    NoCounterexample { trials: usize },
    Counterexample(Box<Counterexample>),
}

impl Verdict {
    pub fn found(&self) -> bool {
        matches!(self, Verdict::Counterexample(_))
    }
}

fn draw_pair(gmap: &GammaMap, cfg: &TrialConfig, seed: u64, trial: usize) -> Result<Option<SampledPair>> {
    let mut rng = rng_for(seed, trial as u64);
    let n = cfg.levels[rng.random_range(0..cfg.levels.len())];
    let m = rng.random_range(1..=n);
    let averaging = n % 2 == 0 && rng.random_bool(0.25);
    random_gamma_pair(gmap, n, m, averaging, cfg.scale, &mut rng)
}

fn run_trials<F>(gmap: &GammaMap, cfg: &TrialConfig, seed: u64, test: F) -> Result<Verdict>
where
    F: Fn(&SampledPair) -> Result<Option<f64>> + Sync,
{
    if cfg.levels.is_empty() || cfg.levels.contains(&0) {
        return Err(Error::InvalidParameter("levels must be nonempty and positive".into()));
    }
    let hit = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| -> Result<Option<Counterexample>> {
            let Some(pair) = draw_pair(gmap, cfg, seed, trial)? else {
                return Ok(None);
            };
            Ok(test(&pair)?.map(|gap| Counterexample {
                trial,
                point: pair.point.clone(),
                isometry: pair.isometry.clone(),
                gap,
            }))
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    match hit {
        None => Ok(Verdict::NoCounterexample { trials: cfg.trials }),
        Some(Ok(c)) => Ok(Verdict::Counterexample(Box::new(c.expect("filtered")))),
        Some(Err(e)) => Err(e),
    }
}

/// Searches for a Γ-pair `(X, V)` with
/// `λ_min((I_μ⊗V)* P(X) (I_μ⊗V) − P(V*XV)) < −1e-8`.
pub fn check_gamma_convex(p: &MatrixPoly, gmap: &GammaMap, cfg: &TrialConfig, seed: u64) -> Result<Verdict> {
    if !p.is_symmetric() {
        return Err(Error::PreconditionViolated("convexity checks need a symmetric polynomial".into()));
    }
    if p.nvars() != gmap.g() {
        return Err(Error::mismatch("polynomial variable count", gmap.g(), p.nvars()));
    }
    let mu = p.size();
    run_trials(gmap, cfg, seed, |pair| {
        let big_v = pair.isometry.ampliate(mu);
        let lhs = big_v.adjoint() * p.eval(&pair.point)? * &big_v;
        let rhs = p.eval(&pair.point.compress(&pair.isometry)?)?;
        let gap = min_eig(&hermitian_part(&(lhs - rhs)))?;
        Ok((gap < -tolerances::CONVEXITY_GAP).then_some(gap))
    })
}

/// Concavity of `P` is convexity of `−P`.
pub fn check_gamma_concave(p: &MatrixPoly, gmap: &GammaMap, cfg: &TrialConfig, seed: u64) -> Result<Verdict> {
    check_gamma_convex(&p.neg(), gmap, cfg, seed)
}

/// Searches for a Γ-pair with
/// `‖(I_μ⊗V)* F(X) (I_ν⊗V) − F(V*XV)‖_F > 1e-8`.
pub fn check_concomitant(f: &MatrixPoly, gmap: &GammaMap, cfg: &TrialConfig, seed: u64) -> Result<Verdict> {
    if f.nvars() != gmap.g() {
        return Err(Error::mismatch("polynomial variable count", gmap.g(), f.nvars()));
    }
    run_trials(gmap, cfg, seed, |pair| {
        let left = pair.isometry.ampliate(f.rows());
        let right = pair.isometry.ampliate(f.cols());
        let lhs = left.adjoint() * f.eval(&pair.point)? * right;
        let rhs = f.eval(&pair.point.compress(&pair.isometry)?)?;
        let residual = frobenius(&(lhs - rhs));
        Ok((residual > tolerances::CONCOMITANT_RESIDUAL).then_some(residual))
    })
}
