//! Numerical toolkit for corners in the integer grid with polynomial differences.

pub mod circle;
pub mod cli;
pub mod counting;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod grid;
pub mod inverse;
pub mod io;
pub mod norms;
pub mod poly;
pub mod reduce;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{Direction, GridFn, LineFn, PhaseFn, C64};
pub use poly::{IntPolynomial, RealPolynomial, WTrickContext};
pub use weights::Weight;
