//! Exact integer group determinants.
//!
//! Group tables ([`groups`]), the integral group ring with an exact Bareiss
//! determinant ([`groupring`]), exact cyclotomic arithmetic ([`cyclotomic`]),
//! factored determinant formulas for `Z_n x H` ([`factored`]), number theory
//! helpers ([`arithmetic`]), membership tests with certificates and explicit
//! witnesses for `Z2 x D8`, `Z2 x Q8` and related groups ([`characterization`]),
//! bounded searches over coefficient boxes ([`search`]), and the command line
//! front end ([`cli`]).

pub mod arithmetic;
pub mod characterization;
pub mod cli;
pub mod cyclotomic;
pub(crate) mod decimal;
pub mod factored;
pub mod groupring;
pub mod groups;
pub mod search;
