use thiserror::Error;

use crate::padic::Valuation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("p = {0} is not an odd prime (p = 2 is excluded: the operator needs p != 2)")]
    UnsupportedPrime(u32),

    #[error("degenerate cone: {0}")]
    DegenerateCone(String),

    #[error("interior lattice point gate failed: expected exactly {expected:?}, found {found:?}")]
    GateFailure {
        expected: Vec<i64>,
        found: Vec<Vec<i64>>,
    },

    #[error("division by zero")]
    DivisionByZero,

    #[error("element is not invertible: {0}")]
    NotInvertible(String),

    #[error("precision exhausted: requested {requested}, available {available}")]
    PrecisionExhausted {
        requested: Valuation,
        available: Valuation,
    },

    #[error("incompatible operands: {0}")]
    Incompatible(String),

    #[error("contraction failed at step {step}: difference valuation {current} did not improve on {previous}")]
    NonContraction {
        step: usize,
        previous: Valuation,
        current: Valuation,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("specialization outside the unit-value domain: Phi_1 evaluates to {value} (mod {p})")]
    OutsideDomain { value: u64, p: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
