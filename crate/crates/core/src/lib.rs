//! Concatenation of classical solutions of constant-coefficient linear ODEs
//! and PDEs, analysed in the distributional sense.

pub mod cli;
pub mod distribution;
mod elementary;
pub mod error;
pub mod exppoly;
pub mod gen;
pub mod json;
pub mod multipoly;
pub mod ode;
pub mod oracle;
pub mod pde;
pub mod poly;
pub mod roots;
pub mod scalar;
pub mod selftest;
pub mod text;

pub use error::{Error, Result};
pub use exppoly::{ExpPoly, ExpTerm};
pub use multipoly::{MultiPoly, SparsePoly};
pub use pde::Mode;
pub use poly::{Factored, Poly1, PolyOperator};
pub use scalar::{Backend, BigComplex, FloatCtx, GaussRat, Scalar};
