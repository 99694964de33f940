//! Pseudo-spectral solver and diagnostics for the stable Muskat interface problem.
//!
//! The crate is organised by concern:
//!
//! * [`spectral`]: periodic grids, transforms, `s`-norms and Besov-type norms;
//! * [`rhs`]: the nonlocal right-hand side by direct quadrature, its split into
//!   `-Lambda f` plus a nonlinearity, and the Fourier majorant bounds;
//! * [`series`]: the majorant power series and admissible small-data constants;
//! * [`evolve`]: exponential time stepping, trajectories and runtime monitors;
//! * [`decay`]: linear semigroup norms, exponent fits and the decay-lemma check;
//! * [`config`] and [`verify`]: the flat configuration format and the
//!   self-check suites used by the command-line driver.

pub mod config;
pub mod decay;
pub mod error;
pub mod evolve;
pub mod rhs;
pub mod series;
pub mod special;
pub mod spectral;
pub mod table;
pub mod verify;

pub use error::{MuskatError, Result};
pub use rustfft::num_complex::Complex64;
