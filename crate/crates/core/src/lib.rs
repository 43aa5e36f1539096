//! Numerical certification of the regularity of `f^mu` for nonnegative
//! `C^{k,alpha}` functions whose derivatives up to order `k` vanish at the
//! zeros of `f`.
//!
//! The crate is organised bottom-up:
//!
//! - [`corpus`]: explicit function families with closed-form derivatives.
//! - [`quadrature`]: adaptive Gauss-Kronrod integration on `[0, 1]` and the
//!   Beta function used as its analytic oracle.
//! - [`remainder`]: integral Taylor remainders at a flat zero, the `N`/`D`
//!   quantities and the weighted-integral inequalities built on them.
//! - [`regularity`]: `(f^mu)'`, dyadic Hölder fits and Lipschitz certificates.
//! - [`checker`]: hypothesis checks and structured verdict reports.
//! - [`cli`]: the `fracreg` command-line front end and report serialisation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checker;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod quadrature;
pub mod regularity;
pub mod remainder;

pub use error::{Error, Result};
