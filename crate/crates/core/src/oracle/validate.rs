//! Cross-validation of one branch against both oracles.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hypergeometric::{expand_monomial_with, MonomialSpec};
use crate::model::JacobiMatrix;
use crate::oracle::dense::{dense_eigensolve, refine_eigenvalue};
use crate::oracle::iteration::iterate_system;
use crate::scalar::{rational_to_f64, Rational, Scalar};
use crate::solver::{solve_branch, SolveOptions};

/// Mismatching coefficients `(exponents, iterated, explicit)` of one unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientDiff {
    pub name: String,
    pub diffs: Vec<(Vec<i32>, Rational, Rational)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub k: usize,
    pub degree: u32,
    /// Only unknowns with at least one mismatch are listed.
    pub coeff_diff: Vec<CoefficientDiff>,
    pub eigenvalue: Rational,
    pub dense_eigenvalue: f64,
    /// Root of the characteristic polynomial to within `2^-256`.
    pub reference_eigenvalue: Rational,
    /// `|Lambda_series - Lambda_reference|`, computed exactly.
    pub gap: f64,
    /// `||M V - Lambda V||_inf`, computed exactly.
    pub residual: f64,
}

/// Index of the dense eigenvalue nearest `target`.
pub fn match_branch(values: &[f64], target: f64, k: usize) -> Result<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| (values[a] - target).abs().total_cmp(&(values[b] - target).abs()));
    if let [first, second, ..] = order[..] {
        let d1 = (values[first] - target).abs();
        let d2 = (values[second] - target).abs();
        if (d2 - d1).abs() <= 1e-12 * (1.0 + d1.max(d2)) {
            return Err(Error::BranchAmbiguity { k });
        }
    }
    Ok(order[0])
}

pub fn cross_validate(m: &JacobiMatrix, k: usize, n: u32, exec: Execution) -> Result<CrossValidation> {
    let d = m.d();
    if k == 0 || k > d {
        return Err(Error::BadIndex { k, d });
    }
    let layout = crate::layout::Layout::for_branch(d, k);
    let iterated = iterate_system(layout, n);
    let mut coeff_diff = Vec::new();
    let unknowns = (1..=layout.r)
        .map(|i| (format!("u_{i}"), MonomialSpec::unit(&layout, i), &iterated.u[i - 1]))
        .chain((1..=layout.rt).map(|i| {
            (
                format!("ut_{i}"),
                MonomialSpec::unit_tilde(&layout, i),
                &iterated.ut[i - 1],
            )
        }));
    for (name, spec, it) in unknowns {
        let explicit = expand_monomial_with(&spec, &layout, n, exec)?;
        let diffs = it.diff_terms(&explicit);
        if !diffs.is_empty() {
            coeff_diff.push(CoefficientDiff { name, diffs });
        }
    }

    let opts = SolveOptions {
        exec,
        ..SolveOptions::new(n)
    };
    let result = solve_branch::<Rational>(m, k, &opts)?;
    let dense = dense_eigensolve(m)?;
    let values: Vec<f64> = dense.iter().map(|p| p.value).collect();
    let idx = match_branch(&values, rational_to_f64(&m.alpha()[k - 1]), k)?;
    let reference = refine_eigenvalue(m, values[idx], 256)?;
    Ok(CrossValidation {
        k,
        degree: n,
        coeff_diff,
        gap: (&result.eigenvalue - &reference).abs().to_f64(),
        eigenvalue: result.eigenvalue,
        dense_eigenvalue: values[idx],
        reference_eigenvalue: reference,
        residual: result.residual,
    })
}
