//! Constant-depth arithmetic circuit synthesis over finite fields.
//!
//! The crate builds unbounded fan-in circuit families for polynomial GCD,
//! resultants, root filters, symmetric-polynomial decomposition, truncated
//! power-series roots and small-characteristic factor powers, and verifies
//! every construction against independent classical oracles (Euclid,
//! Sylvester determinants, Newton iteration, linear algebra).
//!
//! Layout:
//! - [`field`]: exact arithmetic in `F_p` and `F_{p^k}`.
//! - [`polyring`]: polynomial / truncated power-series arithmetic and all
//!   oracles, plus the [`polyring::Ring`] abstraction used for ring-generic
//!   circuit evaluation.
//! - [`circuit`]: the circuit IR (DAG with unbounded fan-in gates), metrics,
//!   evaluation, composition and serialization.
//! - [`gadgets`]: interpolation-based building blocks (coefficient and
//!   homogeneous-part extraction, Hasse derivatives, elementary symmetric
//!   gadgets, truncated division).
//! - [`roots`]: circuits for truncated power-series roots, with and without
//!   multiplicity.
//! - [`symdec`]: decomposition of (multi-)symmetric circuits through
//!   elementary symmetric polynomials.
//! - [`gcdres`]: resultant circuits, filter families and the piece-wise
//!   rational GCD family.
//! - [`smallchar`]: factor powers of bivariate polynomials over fields of
//!   small characteristic.
//! - [`gen`]: seeded instance generators shared by tests and the fuzz
//!   harness.

pub mod circuit;
pub mod error;
pub mod field;
pub mod gadgets;
pub mod gcdres;
pub mod gen;
pub mod polyring;
pub mod roots;
pub mod smallchar;
pub mod symdec;

pub use error::{Error, Result};
pub use field::{FieldCtx, FieldElem};
