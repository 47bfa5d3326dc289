//! p-adic L-functions, regulators and class number congruences for real
//! abelian number fields.

pub mod arith;
pub mod bernoulli;
pub mod characters;
pub mod cyclotomic;
pub mod error;
pub mod lfunctions;
pub mod padic;
pub mod quadfield;
pub mod regulators;
pub mod verify;

pub use error::{Error, Result};
