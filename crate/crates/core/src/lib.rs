//! Finite-dimensional asymmetric normed spaces and quasi-metric spaces.
//!
//! Asymmetric norms are polyhedral, `p(x) = max(0, max_i <a_i, x>)`, so every
//! supremum over a unit ball is a linear program. On top of that kernel the
//! crate provides quasi-metrics and their entourages, finite-horizon Cauchy
//! classification, epsilon-nets and covers, semi-Lipschitz operator norms,
//! compactness decisions with recession witnesses, and the dual cone
//! machinery (polars, dual operators, w-flat neighborhoods).

// `!(eps > 0.0)` is deliberate: NaN must fail it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod covering;
pub mod duality;
pub mod error;
pub mod ext;
pub mod geometry;
pub mod linalg;
pub mod lp;
pub mod norms;
pub mod operators;
pub mod quasimetric;
pub mod random;
pub mod sequences;
pub mod tol;

pub use error::{Error, Result};
pub use ext::ExtReal;
pub use norms::{NormChoice, PolyAsymNorm};
pub use operators::LinOperator;
pub use tol::Tolerance;
