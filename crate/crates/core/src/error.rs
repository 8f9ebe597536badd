use thiserror::Error;

use crate::lattice::CurveClass;

/// Errors raised by the arithmetic routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be positive")]
    ZeroModulus,

    #[error("{value} is not coprime to {modulus}")]
    NotCoprime { value: u64, modulus: u64 },

    #[error("element set is not closed under multiplication mod {modulus} (missing {value})")]
    NotClosed { value: u64, modulus: u64 },

    #[error("curve class mismatch: expected {expected}, found {found}")]
    ClassMismatch {
        expected: CurveClass,
        found: CurveClass,
    },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("point ({x},{y}) mod {modulus} has order {order}, expected exact order {modulus}")]
    OrderMismatch {
        x: u64,
        y: u64,
        modulus: u64,
        order: u64,
    },

    #[error("operation requires a CM curve class (square or hexagonal), got {0}")]
    GenericClass(CurveClass),

    #[error("the trichotomy requires m > 3, got m = {0}")]
    ModulusTooSmall(u64),

    #[error("basis vectors are linearly dependent")]
    DegenerateLattice,

    #[error("source lattice is not contained in the target lattice")]
    NotSublattice,

    #[error("lattice quotient is not cyclic (invariant factors {0:?})")]
    NonCyclicQuotient(Vec<u64>),

    #[error("integer overflow in exact arithmetic")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;
