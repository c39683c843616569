//! Computational toolkit for Γ-convex free sets.
//!
//! A Γ-map is a tuple of symmetric free polynomials `Γ = (γ_1, …, γ_r)` whose
//! first `g` coordinates are the variables themselves. This crate evaluates
//! free polynomials and Γ-pencils on tuples of Hermitian matrices, detects
//! Γ-pairs, builds and checks the monic `y²`-pencils describing the TV screens
//! `{I − X² − Y^{2d} ⪰ 0}`, and synthesizes separating monic pencils from
//! matrix convex hulls via a small PSD-feasibility engine.
//!
//! Module map:
//!
//! - [`numerics`]: dense Hermitian linear algebra, seeded random ensembles, a
//!   dense simplex for level-one oracles.
//! - [`ncpoly`]: words, scalar and matrix-coefficient free polynomials,
//!   Hermitian tuples.
//! - [`gamma`]: Γ-maps, Γ-pairs, hull sampling and falsification checks.
//! - [`pencil`]: Γ-pencils, monic scaling, strictification, TV-screen pencils.
//! - [`semialg`]: positivity sets, membership bands, star-like and slice checks.
//! - [`separation`]: hull membership and separating-pencil certificates.
//! - [`bmi`]: `xy`-pencils, coefficient bounds and boundary limits.
//! - [`io`]: JSON formats shared by the library and the CLI.

pub mod bmi;
pub mod error;
pub mod gamma;
pub mod io;
pub mod ncpoly;
pub mod numerics;
pub mod pencil;
pub mod semialg;
pub mod separation;
pub mod tolerances;

pub use error::{Error, Result};
pub use gamma::{GammaMap, Isometry};
pub use ncpoly::{FreePoly, HermitianTuple, MatrixPoly, Word};
pub use numerics::{CMatrix, C64};
pub use pencil::GammaPencil;
pub use tolerances::Tolerances;
