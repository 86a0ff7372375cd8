//! Eigenpairs of tridiagonal (Jacobi) matrices as exact multivariable
//! hypergeometric power series in the off-diagonal couplings.
//!
//! Each branch `k` is expanded around the unperturbed eigenvalue `alpha_k`.
//! Series coefficients are exact rationals; evaluation can be exact or `f64`.

pub mod combinatorics;
pub mod error;
pub mod exec;
pub mod hypergeometric;
pub mod jacobian;
pub mod layout;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod series;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use hypergeometric::{expand_monomial, phi_coefficient, phi_truncated, MonomialSpec, PhiParams};
pub use layout::{Group, Grouped, Layout};
pub use model::{relabel, BranchConfig, EigenResult, JacobiMatrix};
pub use scalar::{Rational, Scalar};
pub use series::TruncatedSeries;
pub use solver::{solve_all, solve_branch, SeriesSource, SolveOptions};
