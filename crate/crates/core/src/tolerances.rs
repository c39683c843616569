//! Every numerical threshold used by the library, in one record.
//!
//! Functions that take an explicit tolerance argument default to the values
//! here; the CLI embeds the full record in each report so margins can be
//! interpreted without consulting the source.

use serde::{Deserialize, Serialize};

/// Relative Hermitian defect allowed when constructing tuples and pencils.
pub const HERMITIAN_INPUT: f64 = 1e-12;
/// Relative Hermitian defect allowed on computed outputs (evaluations, Γ-images).
pub const HERMITIAN_OUTPUT: f64 = 1e-10;
/// `‖V*V − I‖_F` allowed for an isometry.
pub const ISOMETRY: f64 = 1e-10;
/// `‖A_0 − I‖_F` below which a pencil counts as monic.
pub const MONIC: f64 = 1e-12;
/// Minimum eigenvalue of `A_0` required for monic scaling.
pub const MONIC_PIVOT: f64 = 1e-10;
/// Residual below which an isometry is accepted as a Γ-pair by samplers.
pub const GAMMA_PAIR: f64 = 1e-8;
/// Negative eigenvalue needed to report a convexity counterexample.
pub const CONVEXITY_GAP: f64 = 1e-8;
/// Equality residual needed to report a concomitant counterexample.
pub const CONCOMITANT_RESIDUAL: f64 = 1e-8;
/// Width of the boundary band on minimum eigenvalues.
pub const BOUNDARY_BAND: f64 = 1e-6;
/// Eigenvalue at or below which `p(tX)` counts as not strictly positive.
pub const STAR_LIKE: f64 = 1e-10;
/// Equality residual demanded from a PSD-feasibility solution.
pub const FEASIBILITY: f64 = 1e-8;
/// Lower bound on the hull margin of a separating certificate.
pub const CERTIFICATE_HULL: f64 = 1e-8;
/// Regularization added to `Y_0` before inverting its square root.
pub const REGULARIZATION: f64 = 1e-8;
/// Strict positivity threshold for interior checks.
pub const STRICT_PD: f64 = 1e-10;
/// Margin under the defining polynomial that makes a sample "interior".
pub const INTERIOR_MARGIN: f64 = 1e-3;
/// Coefficient gap tolerated between the last two pencils of a limit sequence.
pub const CAUCHY: f64 = 1e-4;
/// PSD tolerance for pencils on test points.
pub const PSD_TEST: f64 = 1e-10;
/// Largest `λ_min` at the boundary point accepted for a boundary-limit pencil.
pub const LIMIT_BOUNDARY: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub hermitian_input: f64,
    pub hermitian_output: f64,
    pub isometry: f64,
    pub monic: f64,
    pub monic_pivot: f64,
    pub gamma_pair: f64,
    pub convexity_gap: f64,
    pub concomitant_residual: f64,
    pub boundary_band: f64,
    pub star_like: f64,
    pub feasibility: f64,
    pub certificate_hull: f64,
    pub regularization: f64,
    pub strict_pd: f64,
    pub interior_margin: f64,
    pub cauchy: f64,
    pub psd_test: f64,
    pub limit_boundary: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian_input: HERMITIAN_INPUT,
            hermitian_output: HERMITIAN_OUTPUT,
            isometry: ISOMETRY,
            monic: MONIC,
            monic_pivot: MONIC_PIVOT,
            gamma_pair: GAMMA_PAIR,
            convexity_gap: CONVEXITY_GAP,
            concomitant_residual: CONCOMITANT_RESIDUAL,
            boundary_band: BOUNDARY_BAND,
            star_like: STAR_LIKE,
            feasibility: FEASIBILITY,
            certificate_hull: CERTIFICATE_HULL,
            regularization: REGULARIZATION,
            strict_pd: STRICT_PD,
            interior_margin: INTERIOR_MARGIN,
            cauchy: CAUCHY,
            psd_test: PSD_TEST,
            limit_boundary: LIMIT_BOUNDARY,
        }
    }
}
