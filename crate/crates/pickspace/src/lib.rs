//! Numerical toolkit for interpolating sequences in reproducing kernel
//! Hilbert spaces.
//!
//! The crate makes the finite-scale theory of interpolating sequences in
//! complete Pick spaces computable:
//!
//! - [`kernels`]: a zoo of normalized kernels on the disc/ball, the induced
//!   pseudo metric `d_H`, and the `b`-embedding inner products of complete
//!   Pick kernels.
//! - [`grammian`]: truncated Gram matrices of normalized kernel functions
//!   with spectral, separation, and partition diagnostics.
//! - [`pick`]: finite Nevanlinna-Pick feasibility, minimal multiplier norms
//!   (single kernels and kernel pairs), and the one-positive-square test.
//! - [`realization`]: explicit contractive interpolating multipliers via a
//!   lurking-isometry construction and the transfer-function formula.
//! - [`sequences`]: generators for the bundled example sequences and the
//!   associated experiments.
//!
//! All operations are pure functions of immutable inputs and are safe to
//! call concurrently.

pub mod error;
pub mod grammian;
pub mod kernels;
pub mod linalg;
pub mod pick;
pub mod point;
pub mod realization;
pub mod sequences;

pub use error::{Error, Result};
pub use kernels::{Family, KernelSpec};
pub use point::Point;
