//! Matrix exponentials of small dense complex matrices written as matrix
//! polynomials of order `N - 1`.
//!
//! The exponential `exp(itM)` is assembled as `Σ M^n E_n(t)`. The scalar
//! coefficients `E_n` combine the elementary symmetric invariants of the
//! spectrum with derivatives of the response function
//! `F(t) = Σ_k exp(iλ_k t) / C'(λ_k)`, where `C(z) = det(zI - M)`.
//!
//! Around that core the crate provides:
//!
//! * [`invariants`]: symmetric polynomials from eigenvalues and from traces
//!   of matrix powers, computed two independent ways;
//! * [`response`]: the response function and its derivative stack, with a
//!   confluent divided-difference path for degenerate spectra;
//! * [`expm_poly`]: the polynomial exponential, the resolvent polynomial,
//!   the literal SU(2..5) group-element forms and a scaling-and-squaring
//!   reference;
//! * [`simplex_geometry`]: traceless real spectra as projections of
//!   simplex vertices, with hyperspherical angle maps for N = 3, 4, 5;
//! * [`sun_generators`]: spin-j generators and seeded random traceless
//!   hermitian matrices.

pub mod bench;
pub mod error;
pub mod expm_poly;
pub mod invariants;
pub mod matrix;
pub mod response;
pub mod selftest;
pub mod simplex_geometry;
pub mod spectra;
pub mod sun_generators;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, HermitianTraceless, MatrixJson};
pub use num_complex::Complex64;
pub use spectra::Spectrum;
