//! Numerical oracle: test functions, quadrature and distributional pairings.
//! Independent of the symbolic jump rule, so the two can check each other.

pub mod pairing;
pub mod quadrature;
pub mod testfn;

pub use pairing::{adjoint_pair_derivative, integral, pair, PairOptions};
pub use quadrature::{QuadOptions, QuadratureResult};
pub use testfn::{TestFunction, TfExpr};
