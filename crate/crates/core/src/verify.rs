//! Verification suites: every invariant of the library checked against an
//! independent oracle on deterministic, seeded inputs.
//!
//! Cases run in `(d, degree, k)` order, so the first failure reported for a
//! suite is the smallest one.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{exponents_up_to, MultiIndex};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hypergeometric::{
    coeff_h, expand_eta_monomial, expand_monomial_corner, expand_monomial_generic, expand_monomial_with, MonomialSpec,
};
use crate::jacobian::{jacobian_closed, jacobian_numeric, verify_lagrange_system, EtaPoint};
use crate::layout::{Grouped, Layout};
use crate::model::{expansion_variables, relabel, EigenResult, JacobiMatrix};
use crate::oracle::dense::{dense_eigensolve, refine_eigenvalue};
use crate::oracle::iteration::iterate_system;
use crate::oracle::validate::match_branch;
use crate::scalar::{int, rat, rational_to_f64, Rational, Scalar};
use crate::series::TruncatedSeries;
use crate::solver::{branch_series, solve_branch, SolveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Oracle,
    Jacobian,
    Lagrange,
    Symmetry,
    ResidualOrder,
    Corner,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Oracle,
        Suite::Jacobian,
        Suite::Lagrange,
        Suite::Symmetry,
        Suite::ResidualOrder,
        Suite::Corner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::Jacobian => "jacobian",
            Suite::Lagrange => "lagrange",
            Suite::Symmetry => "symmetry",
            Suite::ResidualOrder => "residual-order",
            Suite::Corner => "corner",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// Deliberate defects, so the harness itself can be tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Off-by-one in the diagonal `coeff_H(q', q')` coefficient.
    CoeffH,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub suites: Vec<Suite>,
    pub seed: u64,
    /// Largest matrix size; sizes run from 2.
    pub max_d: usize,
    /// Largest series degree for the degree-dependent suites.
    pub degree: u32,
    /// Random points per `(d, k)` in the Jacobian and Lagrange suites.
    pub points: usize,
    pub fault: Option<Fault>,
    pub exec: Execution,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            suites: Suite::ALL.to_vec(),
            seed: 0,
            max_d: 5,
            degree: 3,
            points: 20,
            fault: None,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Case {
    pub d: usize,
    pub degree: u32,
    pub k: usize,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} k={} N={}", self.d, self.k, self.degree)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub case: Case,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    /// In case order.
    pub failures: Vec<Failure>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first_failure(&self) -> Option<&Failure> {
        self.failures.first()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }
}

pub fn run_verify(cfg: &VerifyConfig) -> VerifyReport {
    let mut suites = cfg.suites.clone();
    suites.sort();
    suites.dedup();
    VerifyReport {
        suites: suites.into_iter().map(|s| run_suite(s, cfg)).collect(),
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> SuiteReport {
    let start = Instant::now();
    let mut cases = cases_for(suite, cfg);
    cases.sort();
    let outcomes = cfg.exec.map(&cases, |c| {
        let mut rng = case_rng(cfg.seed, suite, c);
        let r = match suite {
            Suite::Oracle => check_oracle(c, cfg.fault, &cfg.exec),
            Suite::Jacobian => check_jacobian(c, cfg.points, &mut rng),
            Suite::Lagrange => check_lagrange(c, cfg.points, &mut rng),
            Suite::Symmetry => check_symmetry(c, &mut rng),
            Suite::ResidualOrder => check_residual_order(c, cfg.seed),
            Suite::Corner => check_corner(c),
        };
        r.err().map(|message| Failure { case: *c, message })
    });
    SuiteReport {
        suite,
        cases: cases.len(),
        failures: outcomes.into_iter().flatten().collect(),
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn cases_for(suite: Suite, cfg: &VerifyConfig) -> Vec<Case> {
    let branches = |d: usize| -> Vec<usize> {
        match suite {
            Suite::Corner => vec![1, d],
            _ => (1..=d).collect(),
        }
    };
    let degrees: Vec<u32> = match suite {
        Suite::Oracle => (0..=cfg.degree).collect(),
        Suite::Corner => (0..=cfg.degree.min(4)).collect(),
        Suite::Symmetry => vec![cfg.degree],
        Suite::Jacobian | Suite::Lagrange => vec![0],
        Suite::ResidualOrder => {
            return (1..=3).map(|degree| Case { d: 4, k: 2, degree }).collect();
        }
    };
    let mut out = Vec::new();
    for d in 2..=cfg.max_d.max(2) {
        for &degree in &degrees {
            for k in branches(d) {
                out.push(Case { d, degree, k });
            }
        }
    }
    out
}

fn case_rng(seed: u64, suite: Suite, c: &Case) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((suite as u64) << 48) | ((c.d as u64) << 32) | ((c.k as u64) << 16) | c.degree as u64);
    rng
}

type CheckResult = std::result::Result<(), String>;

fn unit_specs(layout: &Layout) -> Vec<(String, MonomialSpec)> {
    (1..=layout.r)
        .map(|i| (format!("u_{i}"), MonomialSpec::unit(layout, i)))
        .chain((1..=layout.rt).map(|i| (format!("ut_{i}"), MonomialSpec::unit_tilde(layout, i))))
        .collect()
}

fn first_diff(name: &str, a: &TruncatedSeries, b: &TruncatedSeries, what: (&str, &str)) -> CheckResult {
    match a.diff_terms(b).into_iter().next() {
        None => Ok(()),
        Some((e, x, y)) => Err(format!("{name} mismatch at {e:?}: {} {x}, {} {y}", what.0, what.1)),
    }
}

fn check_oracle(c: &Case, fault: Option<Fault>, exec: &Execution) -> CheckResult {
    let layout = Layout::for_branch(c.d, c.k);
    let iterated = iterate_system(layout, c.degree);
    // unit_specs lists u then ut, the same order as the iteration state
    for ((name, spec), it) in unit_specs(&layout)
        .into_iter()
        .zip(iterated.u.iter().chain(&iterated.ut))
    {
        let explicit = expand_monomial_with(&spec, &layout, c.degree, *exec).map_err(|e| e.to_string())?;
        first_diff(&name, it, &explicit, ("iterated", "explicit"))?;
    }
    // eta-monomials against the closed coefficient, for q' of degree <= 1
    let targets = exponents_up_to(layout.dim(), c.degree);
    for qp in exponents_up_to(layout.dim(), 1) {
        let qprime = MultiIndex::from_flat(&layout, &qp).map_err(|e| e.to_string())?;
        let s = expand_eta_monomial(&qprime, &layout, c.degree, Execution::Sequential).map_err(|e| e.to_string())?;
        for e in &targets {
            let q = MultiIndex::from_flat(&layout, e).map_err(|e| e.to_string())?;
            let mut h = coeff_h(&qprime, &q, &layout);
            if fault == Some(Fault::CoeffH) && qp == *e {
                h += Rational::one();
            }
            let got = s.coeff(e);
            if got != h {
                return Err(format!(
                    "coeff_H mismatch for q'={qp:?} at q={e:?}: series {got}, coeff_H {h}"
                ));
            }
        }
    }
    Ok(())
}

fn random_float_eta(layout: Layout, rng: &mut impl Rng) -> EtaPoint<f64> {
    let v = (0..layout.dim()).map(|_| rng.gen_range(-0.1..=0.1)).collect();
    Grouped::new(layout, v).expect("sized by layout")
}

/// Entries `j/64` with `|j| <= 4`.
pub fn random_exact_eta(layout: Layout, rng: &mut impl Rng) -> EtaPoint<Rational> {
    let v = (0..layout.dim()).map(|_| rat(rng.gen_range(-4..=4), 64)).collect();
    Grouped::new(layout, v).expect("sized by layout")
}

fn check_jacobian(c: &Case, points: usize, rng: &mut ChaCha8Rng) -> CheckResult {
    let layout = Layout::for_branch(c.d, c.k);
    let (d, k) = (c.d as i64, c.k as i64);
    let expected_terms = (2 * d * k - 2 * k * k + 2 * k - d) as usize;
    if layout.jacobian_term_count() != expected_terms {
        return Err(format!(
            "term count {} != {expected_terms}",
            layout.jacobian_term_count()
        ));
    }
    for _ in 0..points {
        let eta = random_float_eta(layout, rng);
        let closed = jacobian_closed(&eta).map_err(|e| e.to_string())?;
        let numeric = jacobian_numeric(&eta, 1e-6).map_err(|e| e.to_string())?;
        if (closed - numeric).abs() > 1e-8 {
            return Err(format!(
                "closed {closed} vs numeric {numeric} at eta {:?}",
                eta.values()
            ));
        }
        let exact = random_exact_eta(layout, rng);
        let a = jacobian_closed(&exact).map_err(|e| e.to_string())?;
        let b = jacobian_closed(&exact.mirrored()).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("tilde swap changes J: {a} vs {b}"));
        }
    }
    Ok(())
}

fn check_lagrange(c: &Case, points: usize, rng: &mut ChaCha8Rng) -> CheckResult {
    let layout = Layout::for_branch(c.d, c.k);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < points {
        attempts += 1;
        if attempts > 20 * points.max(1) {
            return Err("too many singular draws".into());
        }
        let eta = random_exact_eta(layout, rng);
        let report = match verify_lagrange_system(&eta) {
            Ok(r) => r,
            // a vanishing phi_i leaves xi undetermined; draw again
            Err(Error::DivisionByZero(_)) => continue,
            Err(e) => return Err(e.to_string()),
        };
        if let Some((eq, r)) = report.residuals.iter().find(|(_, r)| !r.is_zero()) {
            return Err(format!("residual of {eq} is {r} at eta {:?}", eta.values()));
        }
        checked += 1;
    }
    Ok(())
}

/// Distinct integer diagonal `3i + {0,1,2}`, off-diagonals `+-j/1000`, `1 <= j <= 9`.
pub fn random_matrix(d: usize, rng: &mut impl Rng) -> JacobiMatrix {
    let alpha = (0..d).map(|i| int(3 * i as i64 + rng.gen_range(0..3))).collect();
    let mut off = || -> Vec<Rational> {
        (0..d - 1)
            .map(|_| {
                let s = if rng.gen_bool(0.5) { 1 } else { -1 };
                rat(s * rng.gen_range(1..=9), 1000)
            })
            .collect()
    };
    let beta = off();
    let gamma = off();
    JacobiMatrix::new(alpha, beta, gamma).expect("valid by construction")
}

fn check_symmetry(c: &Case, rng: &mut ChaCha8Rng) -> CheckResult {
    let m = random_matrix(c.d, rng);
    let rot = m.rotated();
    let kr = c.d + 1 - c.k;
    let err = |e: Error| e.to_string();
    let cfg = relabel(&m, c.k).map_err(err)?;
    let cfg_rot = relabel(&rot, kr).map_err(err)?;
    let layout = cfg.layout();
    if cfg_rot.layout() != layout.mirrored() {
        return Err(format!(
            "rotated layout {:?} is not the mirror of {layout:?}",
            cfg_rot.layout()
        ));
    }
    if expansion_variables(&cfg_rot) != expansion_variables(&cfg).mirrored() {
        return Err("expansion variables do not swap under rotation".into());
    }
    let opts = SolveOptions::new(c.degree);
    let s = branch_series(layout, &opts).map_err(err)?;
    let s_rot = branch_series(cfg_rot.layout(), &opts).map_err(err)?;
    let perm = layout.mirror_permutation();
    for (i, (a, b)) in s.ut.iter().zip(&s_rot.u).enumerate() {
        first_diff(
            &format!("ut_{} vs rotated u_{}", i + 1, i + 1),
            &a.permute(&perm).map_err(err)?,
            b,
            ("original", "rotated"),
        )?;
    }
    for (i, (a, b)) in s.u.iter().zip(&s_rot.ut).enumerate() {
        first_diff(
            &format!("u_{} vs rotated ut_{}", i + 1, i + 1),
            &a.permute(&perm).map_err(err)?,
            b,
            ("original", "rotated"),
        )?;
    }
    let e: EigenResult<Rational> = solve_branch(&m, c.k, &opts).map_err(err)?;
    let e_rot: EigenResult<Rational> = solve_branch(&rot, kr, &opts).map_err(err)?;
    if e.eigenvalue != e_rot.eigenvalue {
        return Err(format!("eigenvalue {} vs rotated {}", e.eigenvalue, e_rot.eigenvalue));
    }
    let mut v = e_rot.vector();
    v.reverse();
    if v != e.vector() {
        return Err("eigenvector is not reversed under rotation".into());
    }
    Ok(())
}

fn check_corner(c: &Case) -> CheckResult {
    let layout = Layout::for_branch(c.d, c.k);
    for (name, spec) in unit_specs(&layout) {
        let a = expand_monomial_corner(&spec, &layout, c.degree, Execution::Sequential).map_err(|e| e.to_string())?;
        let b = expand_monomial_generic(&spec, &layout, c.degree, Execution::Sequential).map_err(|e| e.to_string())?;
        first_diff(&name, &a, &b, ("corner", "generic"))?;
    }
    Ok(())
}

/// One point of a residual-order sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderSample {
    pub degree: u32,
    pub eps: f64,
    /// `||M V - Lambda V||_inf`, computed exactly.
    pub residual: f64,
    /// Distance to the exact eigenvalue (refined to `2^-256`).
    pub gap: f64,
}

/// Diagonal `(0, 1, 3, 6)` with off-diagonals `+-1` drawn from `seed`.
pub fn order_test_matrix(seed: u64) -> JacobiMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sign = || if rng.gen_bool(0.5) { int(1) } else { int(-1) };
    let beta = (0..3).map(|_| sign()).collect();
    let gamma = (0..3).map(|_| sign()).collect();
    JacobiMatrix::new(vec![int(0), int(1), int(3), int(6)], beta, gamma).expect("distinct diagonal")
}

/// Residual and eigenvalue gap of branch `k` of `base` with off-diagonals
/// scaled by each `eps`, for each degree.
pub fn residual_order_study(
    base: &JacobiMatrix,
    k: usize,
    eps: &[Rational],
    degrees: &[u32],
    exec: Execution,
) -> Result<Vec<OrderSample>> {
    let mut jobs = Vec::new();
    for &n in degrees {
        for e in eps {
            jobs.push((n, e.clone()));
        }
    }
    exec.map(&jobs, |(n, e)| {
        let m = base.scale_off_diagonal(e);
        let r: EigenResult<Rational> = solve_branch(&m, k, &SolveOptions::new(*n))?;
        let dense = dense_eigensolve(&m)?;
        let values: Vec<f64> = dense.iter().map(|p| p.value).collect();
        let idx = match_branch(&values, rational_to_f64(&m.alpha()[k - 1]), k)?;
        let exact = refine_eigenvalue(&m, values[idx], 256)?;
        Ok(OrderSample {
            degree: *n,
            eps: rational_to_f64(e),
            residual: r.residual,
            gap: (r.eigenvalue - exact).to_f64().abs(),
        })
    })
    .into_iter()
    .collect()
}

/// Least-squares slope of `log10 y` against `log10 x`.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.log10(), y.log10())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn standard_eps() -> Vec<Rational> {
    vec![rat(1, 100), rat(1, 1000), rat(1, 10000)]
}

fn check_residual_order(c: &Case, seed: u64) -> CheckResult {
    let base = order_test_matrix(seed);
    let samples = residual_order_study(&base, c.k, &standard_eps(), &[c.degree], Execution::Sequential)
        .map_err(|e| e.to_string())?;
    let want = 2.0 * (c.degree as f64 + 1.0);
    let res = fit_slope(&samples.iter().map(|s| (s.eps, s.residual)).collect::<Vec<_>>());
    let gap = fit_slope(&samples.iter().map(|s| (s.eps, s.gap)).collect::<Vec<_>>());
    if (res - want).abs() > 0.1 || (gap - want).abs() > 0.1 {
        return Err(format!(
            "slopes residual {res:.3}, gap {gap:.3}; expected {want} +- 0.1"
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suite: Suite) -> VerifyConfig {
        VerifyConfig {
            suites: vec![suite],
            max_d: 3,
            degree: 2,
            points: 5,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        for s in [
            Suite::Oracle,
            Suite::Jacobian,
            Suite::Lagrange,
            Suite::Symmetry,
            Suite::Corner,
        ] {
            let r = run_suite(s, &small(s));
            assert!(r.passed(), "{s}: {:?}", r.first_failure());
            assert!(r.cases > 0);
        }
    }

    #[test]
    fn injected_fault_names_coeff_h_at_smallest_case() {
        let cfg = VerifyConfig {
            fault: Some(Fault::CoeffH),
            ..small(Suite::Oracle)
        };
        let r = run_verify(&cfg);
        assert!(!r.passed());
        let f = r.suites[0].first_failure().unwrap();
        assert!(f.message.contains("coeff_H"), "{}", f.message);
        assert_eq!(f.case, Case { d: 2, degree: 0, k: 1 });
    }

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [1e-2, 1e-3, 1e-4].iter().map(|&e: &f64| (e, 3.0 * e.powi(4))).collect();
        assert!((fit_slope(&pts) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn random_matrices_are_reproducible() {
        let a = random_matrix(4, &mut ChaCha8Rng::seed_from_u64(7));
        let b = random_matrix(4, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        assert_eq!(order_test_matrix(3), order_test_matrix(3));
    }
}
