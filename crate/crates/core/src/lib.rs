#![forbid(unsafe_code)]
//! Exact-arithmetic machinery for the special fibers of regular models of
//! modular curves of Cartan type (split and non-split, with and without
//! normalizer), at a prime p >= 5:
//!
//! - [`builders`]: construct the special fiber configurations per family,
//!   parameterized by p mod 12 (coarse) or by a supersingular-point count
//!   (fine).
//! - [`fiber`]: fiber value types, validation, the zero-fiber rule for
//!   self-intersections, intersection matrices and crossing descriptors.
//! - [`contraction`]: Castelnuovo blow-down engine with drivers to the
//!   minimal regular model and the minimal model with normal crossings.
//! - [`intlinalg`]: Smith normal form with unimodular transforms, cokernel
//!   structure, and the component group of the Neron model of the Jacobian.
//! - [`formulas`]: closed-form oracles for component groups and minimal
//!   component counts, and a pipeline-vs-oracle `verify` runner.
//! - [`json`] / [`dot`]: canonical JSON wire formats and Graphviz export.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything is `Send + Sync` and batch callers may fan out
//! over primes freely.

pub mod builders;
pub mod contraction;
pub mod dot;
pub mod error;
pub mod fiber;
pub mod formulas;
pub mod intlinalg;
pub mod json;
pub mod primes;

pub use builders::{build_fiber, supersingular_profile, CurveFamily, SupersingularProfile};
pub use contraction::{
    contract_component, contract_to_minimal, contract_to_minimal_ncd, exceptional_candidates,
    is_ncd, ContractionStep, ContractionTarget, ContractionTrace,
};
pub use error::{Error, Result};
pub use fiber::{
    crossing_local_rings, dual_graph_connected, intersection_matrix, self_intersections,
    validate_fiber, Component, ComponentId, ComponentKind, CrossingDescriptor, IntersectionMatrix,
    Smoothness, SpecialFiber, ValidationReport,
};
pub use formulas::{
    expected_component_group, expected_minimal_component_count, verify, ExpectedResult,
    VerificationCheck, VerificationReport,
};
pub use intlinalg::{
    cokernel_torsion, component_group, minor_determinant_order, smith_normal_form,
    smith_normal_form_with, AbelianGroup, IntMatrix, PivotStrategy, SmithDecomposition, SnfOptions,
};
