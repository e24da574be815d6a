//! Tensor-product-structure (TPS) distance of unitary channels.
//!
//! The crate measures how far a unitary channel moves the subspace of
//! one-local operators away from itself, together with the scrambling
//! quantities that control it: mutual averaged non-commutativity, operator
//! entanglement, entangling power, Gaussian scrambling rates and Haar typical
//! values. Many-body Hamiltonians (transverse-field Ising, Temperley-Lieb,
//! t-Jz) and time-series pipelines are included.
//!
//! Everything here is pure computation on dense complex matrices and works
//! without `std` (an allocator is required). File formats, the command-line
//! driver and parallel orchestration live in the companion `tps` crate.
//!
//! Site indices are zero-based throughout; site 0 is the most significant
//! tensor factor (the left-most factor of a Kronecker product).
#![no_std]
#![deny(unsafe_op_in_unsafe_fn)]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod models;
pub mod oracle;
pub mod randomness;
pub mod scrambling;
pub mod structure;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::{DenseOperator, EigenSystem, OperatorTag, C64};
pub use structure::{AlgebraSet, TensorFactorization};
pub use tolerance::Tolerances;
