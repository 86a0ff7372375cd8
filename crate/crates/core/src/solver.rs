//! End-to-end branch solver: series for `u`, `ut`, then eigenpair assembly.

use crate::error::Result;
use crate::exec::Execution;
use crate::hypergeometric::{expand_monomial_with, MonomialSpec};
use crate::layout::Layout;
use crate::model::{assemble_eigenpair, expansion_variables, relabel, EigenResult, JacobiMatrix};
use crate::oracle::iteration::iterate_system;
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

/// Where the `u`, `ut` series come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeriesSource {
    /// Explicit `Phi`-sum expansion.
    #[default]
    Hypergeometric,
    /// Fixed-point iteration of the quadratic system.
    Iteration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub degree: u32,
    pub source: SeriesSource,
    pub exec: Execution,
}

impl SolveOptions {
    pub fn new(degree: u32) -> Self {
        SolveOptions {
            degree,
            source: SeriesSource::default(),
            exec: Execution::default(),
        }
    }
}

/// Series `u_1..u_r` and `ut_1..ut_rt` for one layout.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchSeries {
    pub u: Vec<TruncatedSeries>,
    pub ut: Vec<TruncatedSeries>,
}

pub fn branch_series(layout: Layout, opts: &SolveOptions) -> Result<BranchSeries> {
    match opts.source {
        SeriesSource::Iteration => {
            let st = iterate_system(layout, opts.degree);
            Ok(BranchSeries { u: st.u, ut: st.ut })
        }
        SeriesSource::Hypergeometric => {
            let specs: Vec<MonomialSpec> = (1..=layout.r)
                .map(|i| MonomialSpec::unit(&layout, i))
                .chain((1..=layout.rt).map(|i| MonomialSpec::unit_tilde(&layout, i)))
                .collect();
            let mut all = opts
                .exec
                .map(&specs, |s| expand_monomial_with(s, &layout, opts.degree, opts.exec))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            let ut = all.split_off(layout.r);
            Ok(BranchSeries { u: all, ut })
        }
    }
}

pub fn solve_branch<T: Scalar>(m: &JacobiMatrix, k: usize, opts: &SolveOptions) -> Result<EigenResult<T>> {
    let cfg = relabel(m, k)?;
    let series = branch_series(cfg.layout(), opts)?;
    let point = expansion_variables(&cfg).map(T::from_rational);
    assemble_eigenpair(&cfg, &series.u, &series.ut, &point, opts.degree)
}

/// Every branch, in order `k = 1..d`; branches run in parallel when enabled.
pub fn solve_all<T: Scalar>(m: &JacobiMatrix, opts: &SolveOptions) -> Result<Vec<EigenResult<T>>> {
    opts.exec
        .map_range(m.d(), |i| solve_branch::<T>(m, i + 1, opts))
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};

    #[test]
    fn two_by_two_eigenvalue() {
        let m = JacobiMatrix::new(vec![int(0), int(1)], vec![rat(1, 10)], vec![rat(1, 10)]).unwrap();
        let r: EigenResult<f64> = solve_branch(&m, 1, &SolveOptions::new(3)).unwrap();
        let exact = (1.0 - 1.04f64.sqrt()) / 2.0;
        // first omitted term is 5 x^4 with x = 1/100
        assert!((r.eigenvalue - exact).abs() < 6e-8);
        assert!(r.residual < 6e-8);
        assert_eq!(r.v[0], 1.0);
    }

    #[test]
    fn lambda_series_two_by_two() {
        let m = JacobiMatrix::new(vec![int(0), int(2)], vec![int(1)], vec![int(1)]).unwrap();
        let r: EigenResult<Rational> = solve_branch(&m, 1, &SolveOptions::new(3)).unwrap();
        // -(b0 c0 / a1) (1 - x + 2 x^2) truncated at degree 3 in x
        let c: Vec<Rational> = (0..=3).map(|i| r.lambda_series.coeff(&[i])).collect();
        assert_eq!(c, vec![int(0), int(-2), int(2), int(-4)]);
    }

    #[test]
    fn sources_agree_and_trace_is_close() {
        let m = JacobiMatrix::new(
            vec![int(0), int(1), int(3), int(-2)],
            vec![rat(1, 20), rat(-1, 30), rat(1, 25)],
            vec![rat(1, 40), rat(1, 20), rat(-1, 10)],
        )
        .unwrap();
        let mut opts = SolveOptions::new(3);
        let a: Vec<EigenResult<Rational>> = solve_all(&m, &opts).unwrap();
        opts.source = SeriesSource::Iteration;
        opts.exec = Execution::Sequential;
        let b: Vec<EigenResult<Rational>> = solve_all(&m, &opts).unwrap();
        assert_eq!(a, b);
        let sum: Rational = a.iter().map(|r| r.eigenvalue.clone()).sum();
        assert!((sum - m.trace()).to_f64() < 1e-10);
    }
}
