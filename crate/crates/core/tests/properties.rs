use jacobi_series::hypergeometric::expand_monomial_with;
use jacobi_series::model::residual;
use jacobi_series::oracle::dense_eigensolve;
use jacobi_series::scalar::{int, rat, rational_to_f64};
use jacobi_series::verify::random_matrix;
use jacobi_series::{
    solve_all, EigenResult, Execution, JacobiMatrix, Layout, MonomialSpec, Rational, SolveOptions, TruncatedSeries,
};
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn layout_and_spec() -> impl Strategy<Value = (Layout, MonomialSpec, MonomialSpec)> {
    (0usize..=2, 0usize..=2)
        .prop_filter("at least one side", |(r, rt)| r + rt > 0)
        .prop_flat_map(|(r, rt)| {
            let side = |n| prop::collection::vec(-2i64..=2, n);
            (Just(Layout::new(r, rt)), side(r), side(rt), side(r), side(rt))
        })
        .prop_map(|(l, a, at, b, bt)| (l, MonomialSpec { k: a, kt: at }, MonomialSpec { k: b, kt: bt }))
}

fn expand(spec: &MonomialSpec, l: &Layout, n: u32) -> TruncatedSeries {
    expand_monomial_with(spec, l, n, Execution::Sequential).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn monomial_expansion_is_multiplicative((l, a, b) in layout_and_spec()) {
        let n = 3;
        let sum = MonomialSpec {
            k: a.k.iter().zip(&b.k).map(|(x, y)| x + y).collect(),
            kt: a.kt.iter().zip(&b.kt).map(|(x, y)| x + y).collect(),
        };
        let product = expand(&a, &l, n).mul(&expand(&b, &l, n)).unwrap();
        prop_assert_eq!(product, expand(&sum, &l, n));
    }

    #[test]
    fn negated_exponents_give_the_reciprocal((l, a, _) in layout_and_spec()) {
        let n = 3;
        let neg = MonomialSpec {
            k: a.k.iter().map(|x| -x).collect(),
            kt: a.kt.iter().map(|x| -x).collect(),
        };
        let s = expand(&a, &l, n);
        prop_assert_eq!(s.reciprocal().unwrap(), expand(&neg, &l, n));
    }

    #[test]
    fn eigenvalues_sum_to_trace(seed in any::<u64>(), d in 2usize..=5) {
        let m = random_matrix(d, &mut ChaCha8Rng::seed_from_u64(seed));
        let all: Vec<EigenResult<Rational>> = solve_all(&m, &SolveOptions::new(2)).unwrap();
        let sum: Rational = all.iter().map(|r| r.eigenvalue.clone()).sum();
        // off-diagonals are at most 9/1000 over gaps >= 1, so the error is O(1e-12)
        prop_assert!(rational_to_f64(&(sum - m.trace()).abs()) < 1e-10);
    }

    #[test]
    fn parallel_and_sequential_agree(seed in any::<u64>(), d in 2usize..=5) {
        let m = random_matrix(d, &mut ChaCha8Rng::seed_from_u64(seed));
        let mut opts = SolveOptions::new(2);
        let par: Vec<EigenResult<Rational>> = solve_all(&m, &opts).unwrap();
        opts.exec = Execution::Sequential;
        let seq: Vec<EigenResult<Rational>> = solve_all(&m, &opts).unwrap();
        prop_assert_eq!(par, seq);
    }
}

/// Off-diagonal pairs share a sign, so the spectrum is real.
fn random_real_spectrum(d: usize, rng: &mut ChaCha8Rng) -> JacobiMatrix {
    let mut alpha: Vec<i64> = Vec::new();
    while alpha.len() < d {
        let a = rng.gen_range(-40..=40);
        if !alpha.contains(&a) {
            alpha.push(a);
        }
    }
    let mut beta = vec![];
    let mut gamma = vec![];
    for _ in 0..d - 1 {
        let s = if rng.gen_bool(0.5) { 1 } else { -1 };
        beta.push(rat(s * rng.gen_range(1..=40), 8));
        gamma.push(rat(s * rng.gen_range(1..=40), 8));
    }
    JacobiMatrix::new(alpha.into_iter().map(int).collect(), beta, gamma).unwrap()
}

#[test]
fn dense_residuals_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..100 {
        let d = 2 + trial % 7;
        let m = random_real_spectrum(d, &mut rng);
        let norm = rational_to_f64(&m.inf_norm());
        let pairs = dense_eigensolve(&m).unwrap_or_else(|e| panic!("trial {trial}: {e}"));
        assert_eq!(pairs.len(), d);
        for p in &pairs {
            assert!(
                p.residual <= 1e-12 * norm,
                "trial {trial}: {} > {}",
                p.residual,
                1e-12 * norm
            );
        }
    }
}

#[test]
fn float_and_exact_modes_agree() {
    let m = random_matrix(4, &mut ChaCha8Rng::seed_from_u64(5));
    let opts = SolveOptions::new(3);
    let exact: Vec<EigenResult<Rational>> = solve_all(&m, &opts).unwrap();
    let float: Vec<EigenResult<f64>> = solve_all(&m, &opts).unwrap();
    for (e, f) in exact.iter().zip(&float) {
        assert!((rational_to_f64(&e.eigenvalue) - f.eigenvalue).abs() < 1e-13);
        let v: Vec<f64> = e.vector().iter().map(rational_to_f64).collect();
        let r = residual(&m, &f.eigenvalue, &v);
        assert!(r < 1e-12, "{r}");
    }
}
