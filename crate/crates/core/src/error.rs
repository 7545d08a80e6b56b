//! Error type shared by all modules of the crate.

use num_bigint::{BigInt, BigUint};
use thiserror::Error;

use crate::fiber::ComponentId;

/// Errors raised by fiber construction, contraction and the linear algebra layer.
///
/// Validation problems are *not* errors: [`crate::fiber::validate_fiber`]
/// returns a report instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The supplied characteristic is composite or smaller than 5.
    #[error("p must be a prime >= 5, got {0}")]
    InvalidPrime(u64),

    /// A structurally invalid builder parameter (e.g. s_P = 0 for a fine family).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The zero-fiber rule produced a non-integral self-intersection,
    /// i.e. the multiplicity does not divide the weighted crossing sum.
    #[error(
        "self-intersection of `{label}` is not integral: multiplicity {multiplicity} \
         does not divide crossing sum {crossing_sum}"
    )]
    Divisibility {
        label: String,
        multiplicity: BigUint,
        crossing_sum: BigInt,
    },

    /// The component named in a contraction request is not a smooth rational
    /// (-1)-curve (or does not exist).
    #[error("component {0:?} is not contractible: {1}")]
    NotContractible(ComponentId, String),

    /// An operation requiring filled self-intersections was called before
    /// [`crate::fiber::self_intersections`].
    #[error("self-intersections are not filled")]
    SelfIntersectionsMissing,

    /// The dual graph of the fiber is disconnected.
    #[error("the dual graph of the fiber is not connected")]
    NotConnected,

    /// The gcd of the component multiplicities is not 1, so the component
    /// group recipe does not apply.
    #[error("gcd of multiplicities is {0}, expected 1")]
    NonUnimodularMultiplicities(BigUint),

    /// The base component handed to the minor-determinant cross-check does
    /// not have multiplicity 1.
    #[error("base component {0:?} must have multiplicity 1")]
    BadBase(ComponentId),

    /// A component id that does not belong to the fiber.
    #[error("unknown component id {0:?}")]
    UnknownComponent(ComponentId),

    /// The ncd-preserving driver was started on a fiber that is not ncd.
    #[error("fiber is not a normal-crossings configuration")]
    NotNormalCrossings,
}

pub type Result<T> = std::result::Result<T, Error>;
