//! Orthogonal polynomials on the unit circle: the Szegő recursion, Verblunsky
//! coefficient extraction from moments, a two-jump Fisher–Hartwig weight, and
//! a decoupled weight in the Steklov class whose orthonormal polynomials grow
//! logarithmically.

// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extract;
pub mod grid;
pub mod hp;
pub mod poly;
pub mod special;
pub mod steklov;
pub mod sum;
pub mod szego;
pub mod verify;

pub use error::{Error, Result};
pub use extract::{
    caratheodory_f, extract_fh, extract_verblunsky, fh_eval, fh_grid, fh_moments, generic_moments,
    szego_d, Extraction, FHWeightSpec, MomentSequence, MomentSource, Precision, Provenance,
};
pub use grid::{default_grid_size, GridFunction, GridStats};
pub use num_complex::Complex64;
pub use poly::ComplexPoly;
pub use special::{complex_digamma, complex_gamma, kummer_psi, kummer_psi_polar};
pub use steklov::{
    build_scheme, growth_report, l4_main_term, lemma_l1_suite, qq1_main_term, residual_report,
    steklov_weight, AsymptoticDescriptor, GrowthRow, L1Report, ResidualReport, SteklovReport,
    SteklovScheme,
};
pub use szego::{
    bernstein_szego_weight, decouple_weight, double_scheme, rotate_scheme, szego_forward,
    PolySystem, VerblunskyScheme,
};

/// Crate version, recorded in emitted artifacts and cache keys.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
