//! Exact Shintani partial zeta values, p-adic measures and Iwasawa series
//! for the rationals and real quadratic fields of class number one.

pub mod cyclotomic;
pub mod error;
pub mod iwasawa;
pub mod measures;
pub mod numberfield;
pub mod padic;
pub mod shintani;

pub use error::{Error, Result};
