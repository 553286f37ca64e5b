//! High-order finite elements for 2-d Helmholtz scattering by a disk.
//!
//! The crate solves the sound-soft and penetrable disk scattering problems
//! truncated by a radial perfectly matched layer, compares the discrete
//! solution against the analytic Fourier–Bessel (Mie) series, and drives
//! wavenumber sweeps under the mesh law `k^(2p+1) h^(2p) = C`.
//!
//! Module map:
//!
//! - [`specfun`]: Bessel, Hankel and error functions.
//! - [`coefficients`]: PML profiles, piecewise coefficients, cutoff and load.
//! - [`mie`]: analytic reference fields.
//! - [`mesh`]: polar mesh generator, curved element maps, MSH I/O.
//! - [`femcore`]: Lagrange bases, quadrature, degree-of-freedom maps.
//! - [`assembly`]: sesquilinear form and load vector assembly.
//! - [`linalg`]: compressed-row storage and the multifrontal direct solver.
//! - [`postprocess`]: FE evaluation and the total-field error functional.
//! - [`study`]: single solves, sweeps, manufactured-solution checks, CSV.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod coefficients;
mod error;
pub mod exec;
pub mod femcore;
pub mod linalg;
pub mod mesh;
pub mod mie;
pub mod postprocess;
pub mod specfun;
pub mod study;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// A point in the plane.
pub type Point = [f64; 2];
