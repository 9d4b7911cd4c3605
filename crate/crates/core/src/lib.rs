//! Reconstruction from spherical means over oscillatory algebraic center
//! sets, and levitation of masses carried by such sets.

pub mod error;
pub mod fbp;
pub mod forward;
pub mod geometry;
pub mod grid;
pub mod levitation;
pub mod numeric;
pub mod poly;
pub mod presets;
pub mod quadrature;
pub mod separator;
pub mod time_reversal;

pub use error::{Error, Result};
pub use grid::{GridSpec, ScalarGrid};
pub use poly::{Polynomial, UnivariatePoly};
pub use quadrature::QuadratureRule;
