use thiserror::Error;

use crate::gf2m::FieldElement;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("extension degree {0} outside supported range 2..=16")]
    DegreeOutOfRange(usize),

    #[error("polynomial {poly:#x} does not have degree {m}")]
    PolynomialDegree { poly: u32, m: usize },

    #[error("polynomial {poly:#x} is reducible: divisible by {factor:#x}")]
    Reducible { poly: u32, factor: u32 },

    #[error("polynomial {poly:#x} is irreducible but not primitive: x has order {order}, expected {expected}")]
    NotPrimitive { poly: u32, order: u32, expected: u32 },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("matrix dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not invertible over F_2")]
    Singular,

    #[error("matrix is not symmetric")]
    Asymmetric,

    #[error("matrix is not symplectic")]
    NotSymplectic,

    #[error("generator parameter t = {t} outside 1..={m}")]
    GeneratorIndex { t: usize, m: usize },

    #[error("transvection vector must be nonzero")]
    ZeroTransvection,

    #[error("identity Pauli has no subgroup label")]
    IdentityPauli,

    #[error("determinant {0} is not 1")]
    Determinant(FieldElement),

    #[error("degenerate Pauli pair: {0}")]
    DegeneratePair(&'static str),

    #[error("graph is not strongly regular: {0}")]
    Irregular(String),

    #[error("m = {m} exceeds the cap {cap} for {what}")]
    TooLarge { what: &'static str, m: usize, cap: usize },

    #[error("epsilon {0} outside (0, 1)")]
    Epsilon(f64),

    #[error("transition matrix invalid: {0}")]
    Transition(String),

    #[error("eigensolver failed to converge (residual {residual:e})")]
    Eigensolver { residual: f64 },

    #[error("lumping mismatch: {0}")]
    Lumping(String),

    #[error("conjugation of Pauli {pauli:#x} misses the target by {residual:e}")]
    Conjugation { pauli: u32, residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}
