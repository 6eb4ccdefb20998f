//! Function calculus over the commutative ring of `d × d` complex circulant
//! matrices.
//!
//! Every circulant is diagonalized by the same Fourier matrix, so ring
//! arithmetic, pseudoinverses, derivatives and polynomial equations all
//! reduce to `d` independent scalar problems ("channels"). This crate
//! implements that reduction and the tools built on it:
//!
//! - [`circulant`]: ring elements and arithmetic (naive and FFT products)
//! - [`spectral`]: eigenvalue map, its inverse and the Moore–Penrose pseudoinverse
//! - [`funcalc`]: polynomial, rational and exponential-polynomial functions and their derivatives
//! - [`solver`]: all circulant solutions of `P(Z) = O`
//! - [`characterize`]: limit-based detection of divisors, zero counts and polynomial degree
//! - [`testkit`]: dense-matrix oracles used by the test suites

pub mod characterize;
pub mod circulant;
pub mod dense;
pub mod error;
pub mod fft;
pub mod funcalc;
pub mod solver;
pub mod spectral;
pub mod testkit;

pub use circulant::Circulant;
pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use funcalc::{CircFunction, CircPoly, ScalarPoly};
pub use num_complex::Complex64;
pub use spectral::{from_spectrum, pseudoinverse, spectrum, Spectrum};
