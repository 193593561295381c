use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("star of order {order} applied to a polynomial of degree {degree}")]
    StarOrder { order: usize, degree: usize },

    #[error("grid size must be at least 1")]
    EmptyGrid,

    #[error("grid size mismatch: {left} vs {right}")]
    GridMismatch { left: usize, right: usize },

    #[error("cannot divide by z: constant coefficient {0:e} is not zero")]
    NonzeroConstantTerm(f64),

    #[error("Verblunsky coefficient {index} has modulus {modulus} (must be < 1 - 1e-10)")]
    CoefficientOutsideDisk { index: usize, modulus: f64 },

    #[error("requested {requested} recursion steps but the scheme has only {available}")]
    SchemeTooShort { requested: usize, available: usize },

    #[error("coefficient {index} is not real (imaginary part {imag:e})")]
    NonRealCoefficient { index: usize, imag: f64 },

    #[error("extraction of {requested} coefficients needs moments up to index {requested}, have {available}")]
    NotEnoughMoments { requested: usize, available: usize },

    #[error("moments do not come from a nondegenerate measure: |gamma_{index}| = {modulus}")]
    ExtractionBreakdown { index: usize, modulus: f64 },

    #[error("weight integral is not strictly positive ({0:e})")]
    NonPositiveMass(f64),

    #[error("weight value {value:e} at grid point {index} is not strictly positive")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("denominator vanishes at grid point {index} (modulus {modulus:e})")]
    VanishingDenominator { index: usize, modulus: f64 },

    #[error("Re F is not positive at grid point {index} ({value:e})")]
    NotCaratheodory { index: usize, value: f64 },

    #[error("argument {0} is at a singular point")]
    Singular(String),

    #[error("zeta = 0 is not in the domain of psi(a, 1, zeta)")]
    ZetaZero,

    #[error("|zeta| = {modulus} with arg {arg} lies outside the sector where the large-zeta expansion holds")]
    OutsideAsymptoticSector { modulus: f64, arg: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("fit window [{lo}, {hi}] is empty or has no usable residuals")]
    EmptyWindow { lo: usize, hi: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
