//! Exact minimal model program runs on toric varieties.

pub mod adjoint;
pub mod arith;
pub mod birational;
pub mod curves;
pub mod divisor;
pub mod error;
pub mod fan;
pub mod instances;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod mmp;
pub mod polytope;
pub mod random;
pub mod suite;

pub use arith::{Rat, Scalar};
pub use divisor::{Ghost, TDivisor, ToricPair};
pub use error::{Error, Result};
pub use fan::{Fan, FanFlags, Wall};
