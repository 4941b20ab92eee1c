//! Finite polylogarithms over F_{p^k} and Coleman p-adic polylogarithms on
//! the residue discs `|z| = |z - 1| = 1` of W(F_{p^k}), at capped p-adic
//! precision, together with the congruences relating the two.

pub mod arith;
pub mod coleman;
pub mod error;
pub mod finite;
pub mod identities;
pub mod padic;
pub mod section3;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use finite::{FiniteField, FpkElement};
pub use padic::{make_ctx, PadicApprox, UnramifiedCtx, WittApprox};
