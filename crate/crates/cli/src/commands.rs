use std::fs;
use std::path::Path;

use gck_core::bmi::{
    bmi_test_points, boundary_pencil_limit, check_interior_pd, interior_samples, outside_sequence, LimitOptions,
};
use gck_core::gamma::{check_concomitant, check_gamma_concave, check_gamma_convex, FreeSetSample, TrialConfig, Verdict};
use gck_core::io::{self, PencilJson, TermJson, TupleJson};
use gck_core::numerics::min_eig;
use gck_core::numerics::random::{rng_for, tv_interior};
use gck_core::pencil::{degenerate_pencil, tv_pencil, tv_pencil_explicit, verify_tv_identity};
use gck_core::semialg::{check_pencil_poly_equality, tv_poly, PositivitySet};
use gck_core::separation::{separate_gamma_with, Separation, SeparationOptions, ShiftPolicy};
use gck_core::{tolerances, FreePoly, GammaMap, HermitianTuple, MatrixPoly, Word, C64};
use serde_json::json;

use crate::report::{Check, ReportBuilder, RunReport};
use crate::{BmiArgs, Cli, CliError, ConstructArgs, ConvexityArgs, Emit, IdentityArgs, Policy, Preset, Property};
use crate::{SeparateArgs, VerifyTvArgs};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn params<T: serde::Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).expect("flags serialize")
}

/// Writes the report to `--report` (or `fallback`), else to stdout when
/// `stdout` is free; returns whether every check passed.
fn finish(cli: &Cli, fallback: Option<&Path>, report: RunReport, stdout: bool) -> Result<bool, CliError> {
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError(e.to_string()))?;
    match cli.report.as_deref().or(fallback) {
        Some(p) => write(p, &text)?,
        None if stdout => println!("{text}"),
        None => {}
    }
    Ok(report.passed)
}

fn tuple_json(t: &HermitianTuple) -> serde_json::Value {
    serde_json::to_value(TupleJson::from(t)).expect("tuple serializes")
}

pub fn construct_pencil(cli: &Cli, a: &ConstructArgs) -> Result<bool, CliError> {
    let mut rep = ReportBuilder::new("construct-pencil", params(a), cli.seed, cli.threads);
    let pencil = match (a.degenerate, a.d) {
        (true, _) => degenerate_pencil(),
        (false, Some(d)) if a.explicit => tv_pencil_explicit(d, a.monic)?,
        (false, Some(d)) => tv_pencil(d)?,
        (false, None) => return Err(CliError("--d is required".into())),
    };
    let json = io::emit_pencil(&pencil, io::Format::Json)?;
    rep.check(Check::new("json_round_trip", io::parse_pencil(&json)? == pencil));
    if !a.degenerate {
        let m = min_eig(pencil.a0())?;
        rep.check(Check::new("constant_term_positive_definite", m > 0.0).detail(format!("min eig {m:e}")));
        if !a.explicit || a.monic {
            rep.check(Check::new("monic", pencil.is_monic()));
        }
    }
    let text = match a.emit {
        Emit::Json => json,
        Emit::Latex => io::emit_pencil(&pencil, io::Format::Latex)?,
    };
    match &a.out {
        Some(p) => {
            write(p, &text)?;
            rep.artifact(p);
        }
        None => println!("{text}"),
    }
    rep.data(json!({ "size": pencil.size(), "gamma": pencil.gmap().name() }));
    finish(cli, None, rep.finish(), a.out.is_some())
}

pub fn verify_identity(cli: &Cli, a: &IdentityArgs) -> Result<bool, CliError> {
    let mut rep = ReportBuilder::new("verify-identity", params(a), cli.seed, cli.threads);
    if a.d.0.is_empty() {
        return Err(CliError("--d lists no values".into()));
    }
    for &d in &a.d.0 {
        rep.check(Check::new(format!("identity_d{d}"), verify_tv_identity(d)?));
    }
    finish(cli, None, rep.finish(), true)
}

pub fn verify_tv(cli: &Cli, a: &VerifyTvArgs) -> Result<bool, CliError> {
    let mut rep = ReportBuilder::new("verify-tv", params(a), cli.seed, cli.threads);
    if a.levels.is_empty() || a.samples == 0 {
        return Err(CliError("--levels and --samples must be nonempty".into()));
    }
    let pencil = tv_pencil(a.d)?;
    let p = tv_poly(a.d)?;
    let r = check_pencil_poly_equality(&pencil, &p, &a.levels, a.samples, a.band, cli.seed)?;
    rep.check(Check::at_most("set_equality_disagreements", r.disagreements as f64, 0.0));
    let short: Vec<usize> = r
        .per_level
        .iter()
        .filter(|l| l.agreements + l.disagreements < a.samples)
        .map(|l| l.level)
        .collect();
    rep.check(Check::new("sample_quota", short.is_empty()).detail(format!("levels short of samples: {short:?}")));
    let levels: Vec<_> = r
        .per_level
        .iter()
        .map(|l| {
            json!({
                "level": l.level, "agreements": l.agreements, "disagreements": l.disagreements,
                "skipped": l.skipped, "inside": l.inside,
            })
        })
        .collect();
    let first = r.first_disagreement.as_ref().map(|d| {
        json!({ "point": tuple_json(&d.point), "pencil_margin": d.pencil_margin, "poly_margin": d.poly_margin })
    });
    rep.data(json!({
        "agreements": r.agreements, "disagreements": r.disagreements, "skipped": r.skipped,
        "per_level": levels, "first_disagreement": first,
    }));
    finish(cli, a.out.as_deref(), rep.finish(), true)
}

pub fn separate(cli: &Cli, a: &SeparateArgs) -> Result<bool, CliError> {
    let mut rep = ReportBuilder::new("separate", params(a), cli.seed, cli.threads);
    let points = io::parse_points(&read(&a.points)?)?;
    let y = io::parse_tuple(&read(&a.test)?)?;
    if y.width() != points[0].width() {
        return Err(CliError(format!(
            "test point has {} entries but the sample points have {}",
            y.width(),
            points[0].width()
        )));
    }
    let gmap = GammaMap::named(&a.gamma, y.width())?;
    let k = FreeSetSample::new(points, None)?;
    if !k.contains_zero() {
        return Err(CliError("the sample must contain the zero tuple".into()));
    }
    let opts = SeparationOptions {
        delta: a.delta,
        budget: a.budget,
        policy: match a.policy {
            Policy::Balanced => ShiftPolicy::Balanced,
            Policy::Tight => ShiftPolicy::Tight,
        },
        ..Default::default()
    };
    match separate_gamma_with(&gmap, &k, &y, &opts)? {
        Separation::Found(c) => {
            let (sample_margin, outlier_eig) = c.recheck(&k, &y)?;
            let z: Vec<HermitianTuple> = k.points().iter().map(|p| gmap.eval(p)).collect::<Result<_, _>>()?;
            let linear = c.linear.recheck(&z, &gmap.eval(&y)?)?;
            rep.check(Check::new("certificate_found", true));
            rep.check(Check::at_least("sample_margin", sample_margin, c.strict_t - 1e-9));
            rep.check(Check::at_most("outlier_eig", outlier_eig, -a.delta));
            rep.check(Check::new("monic", c.pencil.is_monic()));
            rep.check(
                Check::at_least("linear_hull_margin", linear.hull_margin, -tolerances::CERTIFICATE_HULL)
                    .detail(format!("linear outlier eig {:e}", linear.outlier_eig)),
            );
            let cert = json!({
                "pencil": PencilJson::from(&c.pencil),
                "linear_pencil": PencilJson::from(&c.linear.pencil),
                "strict_t": c.strict_t,
                "sample_margin": sample_margin,
                "outlier_eig": outlier_eig,
                "hull_margin": linear.hull_margin,
                "delta": a.delta,
                "iterations": c.linear.iterations,
                "seed": cli.seed,
            });
            if let Some(p) = &a.out {
                write(p, &serde_json::to_string_pretty(&cert).expect("certificate serializes"))?;
                rep.artifact(p);
            }
            rep.data(cert);
        }
        Separation::NotFound { iterations, gap } => {
            rep.check(Check::new("certificate_found", false).detail(format!(
                "no certificate within {iterations} iterations, projection gap {gap:e}"
            )));
            rep.data(json!({ "iterations": iterations, "gap": gap }));
        }
    }
    finish(cli, None, rep.finish(), true)
}

fn load_poly(a: &ConvexityArgs) -> Result<(FreePoly, usize), CliError> {
    let one = C64::new(1.0, 0.0);
    match (a.preset, &a.poly) {
        (Some(Preset::X4), _) => Ok((FreePoly::monomial(1, Word::power(0, 4), one)?, 1)),
        (Some(Preset::Tv), _) => Ok((tv_poly(a.d)?, 2)),
        (Some(Preset::NegTv), _) => Ok((tv_poly(a.d)?.neg(), 2)),
        (None, Some(path)) => {
            let terms: Vec<TermJson> =
                serde_json::from_str(&read(path)?).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
            let used = terms.iter().flat_map(|t| t.word.iter().copied()).max().unwrap_or(1);
            let nvars = if a.gamma == "x" { used.max(1) } else { 2 };
            Ok((io::poly_from_json(&terms, nvars)?, nvars))
        }
        (None, None) => Err(CliError("one of --poly or --preset is required".into())),
    }
}

pub fn check_convexity(cli: &Cli, a: &ConvexityArgs) -> Result<bool, CliError> {
    let mut rep = ReportBuilder::new("check-convexity", params(a), cli.seed, cli.threads);
    let (poly, g) = load_poly(a)?;
    let gmap = GammaMap::named(&a.gamma, g)?;
    if a.levels.is_empty() || a.levels.contains(&0) {
        return Err(CliError("--levels must list positive sizes".into()));
    }
    let cfg = TrialConfig {
        trials: a.trials,
        levels: a.levels.clone(),
        scale: a.scale,
    };
    let f = MatrixPoly::from_scalar(&poly);
    let verdict = match a.property {
        Property::Convex => check_gamma_convex(&f, &gmap, &cfg, cli.seed)?,
        Property::Concave => check_gamma_concave(&f, &gmap, &cfg, cli.seed)?,
        Property::Concomitant => check_concomitant(&f, &gmap, &cfg, cli.seed)?,
    };
    match &verdict {
        Verdict::NoCounterexample { trials } => {
            rep.check(Check::new("no_counterexample", true).detail(format!("{trials} trials")));
            rep.data(json!({ "polynomial": poly.to_string(), "trials": trials }));
        }
        Verdict::Counterexample(c) => {
            rep.check(Check::new("no_counterexample", false).detail(format!("counterexample at trial {}", c.trial)));
            rep.data(json!({
                "polynomial": poly.to_string(),
                "counterexample": {
                    "trial": c.trial,
                    "gap": c.gap,
                    "point": tuple_json(&c.point),
                    "isometry": io::MatrixJson::from(c.isometry.matrix()),
                },
            }));
        }
    }
    finish(cli, None, rep.finish(), true)
}

/// `{0, Y_b}`, 256 scalar boundary points of the TV screen and interior
/// samples alternating between levels 1 and 2.
fn tv_sample(d: usize, boundary: &HermitianTuple, interior: usize, seed: u64) -> Result<FreeSetSample, CliError> {
    let mut pts = vec![HermitianTuple::zeros(2, 1), boundary.clone()];
    let m = 256;
    for i in 0..m {
        let th = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
        let s = th.sin();
        pts.push(HermitianTuple::scalars(&[th.cos(), s.signum() * s.abs().powf(1.0 / d as f64)]));
    }
    let mut rng = rng_for(seed, 1);
    for i in 0..interior {
        pts.push(tv_interior(d, 1 + i % 2, 0.0, 100_000, &mut rng)?);
    }
    Ok(FreeSetSample::new(pts, None)?)
}

pub fn bmi_boundary(cli: &Cli, a: &BmiArgs) -> Result<bool, CliError> {
    let mut rep = ReportBuilder::new("bmi-boundary", params(a), cli.seed, cli.threads);
    let p = tv_poly(a.d)?;
    let yb = io::parse_tuple(&read(&a.target)?)?;
    if yb.width() != 2 {
        return Err(CliError(format!("target must have 2 entries, found {}", yb.width())));
    }
    let margin = p.margin(&yb)?;
    if margin.abs() > tolerances::BOUNDARY_BAND {
        return Err(CliError(format!("target is not on the boundary: margin {margin:e}")));
    }
    if a.steps == 0 {
        return Err(CliError("--steps must be positive".into()));
    }
    let k = tv_sample(a.d, &yb, a.interior, cli.seed)?;
    let seq = outside_sequence(&yb, a.steps);
    let opts = LimitOptions {
        delta: a.delta,
        budget: a.budget,
        seed: cli.seed,
        ..Default::default()
    };
    match boundary_pencil_limit(&p, &k, &seq, &yb, &opts) {
        Ok(lim) => {
            let eps = lim.epsilon;
            let worst = lim
                .norms
                .iter()
                .map(|n| (n.a * eps).max(n.b * eps).max(n.c_plus * eps * eps / 2.0).max(n.c_minus * eps * eps / 2.0))
                .fold(0.0, f64::max);
            rep.check(Check::at_most("cauchy_gap", lim.cauchy_gap, opts.cauchy));
            rep.check(Check::at_most("boundary_eig", lim.boundary_eig, tolerances::LIMIT_BOUNDARY));
            rep.check(Check::at_most("coefficient_bound_ratio", worst, 1.0 + 1e-8));
            let inner = interior_samples(&p, &[1, 2], 200, cli.seed)?;
            match check_interior_pd(&lim.pencil, k.points(), &inner) {
                Ok(r) => rep.check(
                    Check::at_least("interior_min_eig", r.min_eig, -tolerances::BOUNDARY_BAND)
                        .detail(format!("{} of {} samples below 1e-10", r.violations.len(), r.checked)),
                ),
                Err(e) => rep.check(Check::new("interior_min_eig", false).detail(e.to_string())),
            }
            let pencil = lim.pencil.to_gamma_pencil()?;
            let pj = PencilJson::from(&pencil);
            if let Some(path) = &a.out {
                write(path, &io::to_json(&pj)?)?;
                rep.artifact(path);
            }
            rep.data(json!({
                "epsilon": eps,
                "test_points": bmi_test_points(eps)?.iter().map(tuple_json).collect::<Vec<_>>(),
                "norms": lim.norms,
                "cauchy_gap": lim.cauchy_gap,
                "boundary_eig": lim.boundary_eig,
                "verification_eig": lim.verification_eig,
                "added_points": lim.added_points,
                "iterations": lim.iterations,
                "pencil": pj,
            }));
        }
        Err(e) => {
            rep.check(Check::new("limit", false).detail(e.to_string()));
        }
    }
    finish(cli, None, rep.finish(), true)
}
