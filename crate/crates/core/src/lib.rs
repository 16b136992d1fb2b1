//! Spectra, eigenstates, winding numbers and boundary-condition sensitivity
//! of non-Hermitian tight-binding chains and stacked two-dimensional lattices.
//!
//! Every closed-form spectrum in [`models_1d`] and [`models_2d`] has a dense
//! counterpart built from the same hopping data, so the two routes can be
//! compared with [`matrix::matched_distance`].

pub mod alpha;
pub mod error;
pub mod matrix;
pub mod models_1d;
pub mod models_2d;
pub mod sensitivity;
pub mod topology;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
