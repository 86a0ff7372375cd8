//! Independent ground truth: series iteration and a dense numeric solver.

pub mod dense;
pub mod iteration;
pub mod validate;

pub use dense::{dense_eigensolve, refine_eigenvalue, sturm_eigenvalues, DenseEigenpair};
pub use iteration::{iterate_system, sweep, IterationState};
pub use validate::{cross_validate, match_branch, CoefficientDiff, CrossValidation};
