//! Matrix convex hulls of finitely many points, and monic pencils separating
//! an outside point from them.

mod certificate;
pub mod feasibility;
mod hull;

pub use certificate::{
    find_separating_pencil, find_separating_pencil_with, recheck_pencil, separate_gamma, separate_gamma_with, CertificateCheck,
    GammaCertificate, Separation, SeparationCertificate, SeparationOptions, ShiftPolicy, Solver,
};
pub use feasibility::{psd_feasibility, psd_feasibility_shifted, Feasibility, PsdSolution, PsdSystem};
pub use hull::{
    apply_choi, choi_residuals, compression_point, find_positive_polynomial, hull_membership, level1_gauge,
    level1_hull_oracle, HullMembership, MembershipWitness, PositiveCombination,
};
