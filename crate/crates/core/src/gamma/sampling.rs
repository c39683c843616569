use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{is_gamma_pair, GammaMap, Isometry};
use crate::error::{Error, Result};
use crate::ncpoly::HermitianTuple;
use crate::numerics::random::{haar_isometry, haar_unitary, random_hermitian_with_norm, rng_for, GckRng};
use crate::numerics::{direct_sum, herm_eig};
use crate::tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Inside,
    Outside,
    Unknown,
}

pub type MembershipOracle = Arc<dyn Fn(&HermitianTuple) -> OracleVerdict + Send + Sync>;

/// Finitely many points of a free set, optionally with a membership oracle.
#[derive(Clone)]
pub struct FreeSetSample {
    points: Vec<HermitianTuple>,
    oracle: Option<MembershipOracle>,
}

impl fmt::Debug for FreeSetSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FreeSetSample")
            .field("points", &self.points)
            .field("oracle", &self.oracle.is_some())
            .finish()
    }
}

impl FreeSetSample {
    /// Points must share a width; with an oracle, each must test inside.
    pub fn new(points: Vec<HermitianTuple>, oracle: Option<MembershipOracle>) -> Result<Self> {
        let g = points.first().ok_or(Error::EmptyInput("free set sample"))?.width();
        for p in &points {
            if p.width() != g {
                return Err(Error::mismatch("sample point width", g, p.width()));
            }
            if let Some(o) = &oracle {
                if o(p) != OracleVerdict::Inside {
                    return Err(Error::PreconditionViolated(format!(
                        "sample point at level {} is not inside the set",
                        p.level()
                    )));
                }
            }
        }
        Ok(FreeSetSample { points, oracle })
    }

    pub fn points(&self) -> &[HermitianTuple] {
        &self.points
    }

    pub fn width(&self) -> usize {
        self.points[0].width()
    }

    pub fn oracle(&self) -> Option<&MembershipOracle> {
        self.oracle.as_ref()
    }

    pub fn contains_zero(&self) -> bool {
        self.points
            .iter()
            .any(|p| p.entries().iter().all(|e| e.iter().all(|z| z.norm() == 0.0)))
    }
}

/// Which construction produced a sampled pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairFamily {
    Unitary,
    /// Span of eigenvectors of one coordinate.
    Eigenspace,
    /// `(√t I, √(1−t) I)*` on `X ⊕ X` or on a sum of two equal-level points.
    Averaging,
    /// Haar isometry kept only because it passed the pair filter.
    Filtered,
    /// Block inclusion for a tuple built block-diagonal in some coordinates.
    Block,
}

/// A Γ-pair `(point, isometry)`.
#[derive(Clone, Debug)]
pub struct SampledPair {
    pub point: HermitianTuple,
    pub isometry: Isometry,
    pub family: PairFamily,
    pub residual: f64,
}

fn filter(gmap: &GammaMap, point: HermitianTuple, v: Isometry, family: PairFamily) -> Result<Option<SampledPair>> {
    let c = is_gamma_pair(gmap, &point, &v, tolerances::GAMMA_PAIR)?;
    Ok(c.is_pair.then_some(SampledPair {
        point,
        isometry: v,
        family,
        residual: c.residual,
    }))
}

/// Span of `m` random eigenvectors of coordinate `j`.
fn eigenspace_inclusion(x: &HermitianTuple, j: usize, m: usize, rng: &mut GckRng) -> Result<Isometry> {
    let eig = herm_eig(x.entry(j), tolerances::HERMITIAN_INPUT)?;
    let mut cols: Vec<usize> = (0..x.level()).collect();
    cols.shuffle(rng);
    cols.truncate(m);
    cols.sort_unstable();
    let v = crate::numerics::CMatrix::from_fn(x.level(), m, |r, c| eig.vectors[(r, cols[c])]);
    Isometry::new(v)
}

/// Candidate Γ-pairs based at `x` (or at `x ⊕ x` for the averaging family).
///
/// Candidates cycle through Haar unitaries, eigenspace inclusions of each
/// coordinate, averaging isometries, and random isometries; only those
/// passing the pair test at `1e-8` are kept, so fewer than `budget` may be
/// returned.
pub fn sample_gamma_pairs(gmap: &GammaMap, x: &HermitianTuple, budget: usize, seed: u64) -> Result<Vec<SampledPair>> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    if x.width() != gmap.g() {
        return Err(Error::mismatch("tuple width", gmap.g(), x.width()));
    }
    let n = x.level();
    let mut out = Vec::new();
    for i in 0..budget {
        let mut rng = rng_for(seed, i as u64);
        let found = match i % 4 {
            0 => filter(gmap, x.clone(), Isometry::new(haar_unitary(n, &mut rng))?, PairFamily::Unitary)?,
            1 => {
                let j = (i / 4) % gmap.g();
                let m = rng.random_range(1..=n);
                let v = eigenspace_inclusion(x, j, m, &mut rng)?;
                filter(gmap, x.clone(), v, PairFamily::Eigenspace)?
            }
            2 => {
                let t: f64 = rng.random();
                filter(gmap, x.direct_sum(x)?, Isometry::averaging(n, t)?, PairFamily::Averaging)?
            }
            _ => {
                let m = rng.random_range(1..=n);
                filter(gmap, x.clone(), haar_isometry(n, m, &mut rng), PairFamily::Filtered)?
            }
        };
        out.extend(found);
    }
    Ok(out)
}

fn subsets_by_size(g: usize, rng: &mut GckRng) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0u32..(1 << g))
        .map(|mask| (0..g).filter(|&j| mask & (1 << j) != 0).collect())
        .collect();
    all.shuffle(rng);
    all.sort_by_key(Vec::len);
    all
}

fn random_entry(n: usize, scale: f64, rng: &mut GckRng) -> crate::numerics::CMatrix {
    let norm: f64 = rng.random::<f64>() * scale;
    random_hermitian_with_norm(n, norm, rng)
}

/// Draws a Γ-pair `(X, V)` with `X` at level `n` and `V` of rank `m`.
///
/// Coordinates in a subset `S` are made block-diagonal (`m + (n − m)`) in a
/// random unitary basis and `V` is the inclusion of the first block; the
/// other coordinates are generic. Subsets are tried smallest first, so `V` is
/// as unconstrained as the Γ-map allows. When `averaging` is set and `n` is
/// even, `X = X_1 ⊕ X_2` with the `S`-coordinates shared and `V` averages the
/// two summands. Entries have operator norms uniform on `[0, scale)`.
pub fn random_gamma_pair(
    gmap: &GammaMap,
    n: usize,
    m: usize,
    averaging: bool,
    scale: f64,
    rng: &mut GckRng,
) -> Result<Option<SampledPair>> {
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!("rank {m} isometry into dimension {n}")));
    }
    let g = gmap.g();
    for s in subsets_by_size(g, rng) {
        let candidate = if averaging && n % 2 == 0 {
            let k = n / 2;
            let mut a = Vec::with_capacity(g);
            let mut b = Vec::with_capacity(g);
            for j in 0..g {
                let e = random_entry(k, scale, rng);
                if s.contains(&j) {
                    b.push(e.clone());
                } else {
                    b.push(random_entry(k, scale, rng));
                }
                a.push(e);
            }
            let x = HermitianTuple::new(a)?.direct_sum(&HermitianTuple::new(b)?)?;
            let t: f64 = rng.random();
            filter(gmap, x, Isometry::averaging(k, t)?, PairFamily::Averaging)?
        } else {
            let u = haar_unitary(n, rng);
            let entries = (0..g)
                .map(|j| {
                    if s.contains(&j) && m < n {
                        let block = direct_sum(&random_entry(m, scale, rng), &random_entry(n - m, scale, rng));
                        crate::numerics::hermitian_part(&(&u * block * u.adjoint()))
                    } else {
                        random_entry(n, scale, rng)
                    }
                })
                .collect();
            let v = Isometry::new(u.columns(0, m).into_owned())?;
            let family = if m == n { PairFamily::Unitary } else { PairFamily::Block };
            filter(gmap, HermitianTuple::new(entries)?, v, family)?
        };
        if candidate.is_some() {
            return Ok(candidate);
        }
    }
    Ok(None)
}

/// A compression `V*XV` in a hull sample, with its source.
#[derive(Clone, Debug)]
pub struct HullWitness {
    /// The point `X` that was compressed (a sample point or a direct sum of two).
    pub source: HermitianTuple,
    pub isometry: Isometry,
}

#[derive(Clone, Debug)]
pub struct HullSample {
    pub sample: FreeSetSample,
    pub witnesses: Vec<HullWitness>,
}

/// Points of the Γ-convex hull of `k`: compressions `V*XV` over sampled
/// Γ-pairs, where `X` is a sample point or the direct sum of two.
///
/// Sums of two equal-level points are also compressed by the averaging
/// isometry, which realizes convex combinations whenever that is a Γ-pair.
pub fn gamma_hull_sample(gmap: &GammaMap, k: &FreeSetSample, budget: usize, seed: u64) -> Result<HullSample> {
    if k.width() != gmap.g() {
        return Err(Error::mismatch("sample width", gmap.g(), k.width()));
    }
    let pts = k.points();
    let mut points = Vec::new();
    let mut witnesses = Vec::new();
    for i in 0..budget {
        let mut rng = rng_for(seed, i as u64);
        let a = &pts[rng.random_range(0..pts.len())];
        let use_sum = rng.random_bool(0.5);
        let source = if use_sum {
            let b = &pts[rng.random_range(0..pts.len())];
            a.direct_sum(b)?
        } else {
            a.clone()
        };
        let pair = if use_sum && source.level() % 2 == 0 && rng.random_bool(0.5) {
            let half = source.level() / 2;
            let t: f64 = rng.random();
            filter(gmap, source.clone(), Isometry::averaging(half, t)?, PairFamily::Averaging)?
        } else {
            let found = sample_gamma_pairs(gmap, &source, 4, rng.random())?;
            found.into_iter().find(|p| p.point.level() == source.level())
        };
        if let Some(p) = pair {
            points.push(source.compress(&p.isometry)?);
            witnesses.push(HullWitness {
                source,
                isometry: p.isometry,
            });
        }
    }
    if points.is_empty() {
        points.extend(pts.iter().cloned());
        for p in pts {
            witnesses.push(HullWitness {
                source: p.clone(),
                isometry: Isometry::identity(p.level()),
            });
        }
    }
    Ok(HullSample {
        sample: FreeSetSample::new(points, None)?,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{frobenius, random::random_hermitian};

    fn random_point(g: usize, n: usize, seed: u64) -> HermitianTuple {
        let mut rng = rng_for(seed, 99);
        HermitianTuple::new((0..g).map(|_| random_hermitian(n, &mut rng)).collect()).unwrap()
    }

    #[test]
    fn identity_map_accepts_every_candidate() {
        let x = random_point(2, 3, 1);
        let pairs = sample_gamma_pairs(&GammaMap::identity(2), &x, 10, 5).unwrap();
        assert_eq!(pairs.len(), 10);
    }

    #[test]
    fn block_diagonal_y_yields_inclusions() {
        let mut rng = rng_for(2, 0);
        let y = direct_sum(&random_hermitian(2, &mut rng), &random_hermitian(1, &mut rng));
        let x = random_hermitian(3, &mut rng);
        let t = HermitianTuple::new(vec![x, y]).unwrap();
        let pairs = sample_gamma_pairs(&GammaMap::y2(), &t, 40, 3).unwrap();
        assert!(pairs
            .iter()
            .any(|p| p.family == PairFamily::Eigenspace && p.isometry.cols() < 3));
        assert!(pairs.iter().any(|p| p.family == PairFamily::Unitary));
        for p in &pairs {
            assert!(is_gamma_pair(&GammaMap::y2(), &p.point, &p.isometry, 1e-8).unwrap().is_pair);
        }
    }

    #[test]
    fn generic_point_keeps_unitaries() {
        let x = random_point(2, 3, 4);
        let pairs = sample_gamma_pairs(&GammaMap::xy(), &x, 20, 1).unwrap();
        assert!(pairs.iter().filter(|p| p.family == PairFamily::Unitary).count() >= 5);
    }

    #[test]
    fn random_pairs_pass_filter() {
        for gmap in [GammaMap::identity(2), GammaMap::y2(), GammaMap::xy()] {
            let mut rng = rng_for(7, 0);
            for n in 1..=4 {
                for m in 1..=n {
                    for averaging in [false, true] {
                        let p = random_gamma_pair(&gmap, n, m, averaging, 1.5, &mut rng)
                            .unwrap()
                            .expect("full subset always reduces");
                        assert!(is_gamma_pair(&gmap, &p.point, &p.isometry, 1e-8).unwrap().is_pair);
                    }
                }
            }
        }
    }

    #[test]
    fn hull_of_zero_is_zero() {
        let k = FreeSetSample::new(vec![HermitianTuple::zeros(2, 1)], None).unwrap();
        let h = gamma_hull_sample(&GammaMap::y2(), &k, 20, 0).unwrap();
        for p in h.sample.points() {
            assert!(p.entries().iter().all(|e| frobenius(e) == 0.0));
        }
    }

    #[test]
    fn classical_hull_contains_combinations() {
        let k = FreeSetSample::new(
            vec![HermitianTuple::scalars(&[-1.0]), HermitianTuple::scalars(&[2.0])],
            None,
        )
        .unwrap();
        let h = gamma_hull_sample(&GammaMap::identity(1), &k, 200, 1).unwrap();
        let interior = h
            .sample
            .points()
            .iter()
            .filter(|p| p.level() == 1)
            .filter_map(|p| p.as_scalars())
            .filter(|v| v[0] > -0.99 && v[0] < 1.99)
            .count();
        assert!(interior > 0);
        for p in h.sample.points() {
            let eig = herm_eig(p.entry(0), 1e-10).unwrap();
            assert!(eig.min() >= -1.0 - 1e-12 && eig.max() <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn y2_hull_contains_x_midpoints() {
        let y = 0.4;
        let k = FreeSetSample::new(
            vec![HermitianTuple::scalars(&[-0.8, y]), HermitianTuple::scalars(&[0.8, y])],
            None,
        )
        .unwrap();
        let h = gamma_hull_sample(&GammaMap::y2(), &k, 200, 2).unwrap();
        let mids = h
            .sample
            .points()
            .iter()
            .filter_map(|p| p.as_scalars())
            .filter(|v| v[0].abs() < 0.79)
            .count();
        assert!(mids > 0);
    }

    #[test]
    fn hull_points_are_consistent_compressions() {
        let mut rng = rng_for(8, 0);
        let pts = (0..4)
            .map(|_| crate::numerics::random::tv_interior(2, 2, 0.0, 10_000, &mut rng).unwrap())
            .collect();
        let k = FreeSetSample::new(pts, None).unwrap();
        let gmap = GammaMap::y2();
        let h = gamma_hull_sample(&gmap, &k, 60, 3).unwrap();
        for (p, w) in h.sample.points().iter().zip(&h.witnesses) {
            let lhs = gmap.eval(p).unwrap();
            let rhs = gmap.eval(&w.source).unwrap().compress(&w.isometry).unwrap();
            for (a, b) in lhs.entries().iter().zip(rhs.entries()) {
                assert!(frobenius(&(a - b)) <= 1e-8);
            }
        }
    }

    #[test]
    fn oracle_rejects_outside_points() {
        let oracle: MembershipOracle = Arc::new(|p: &HermitianTuple| {
            if p.max_norm() <= 1.0 {
                OracleVerdict::Inside
            } else {
                OracleVerdict::Outside
            }
        });
        assert!(FreeSetSample::new(vec![HermitianTuple::scalars(&[0.5])], Some(oracle.clone())).is_ok());
        assert!(FreeSetSample::new(vec![HermitianTuple::scalars(&[1.5])], Some(oracle)).is_err());
    }
}
