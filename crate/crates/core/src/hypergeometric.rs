//! The `Phi` series and explicit expansions of monomials in the unknowns.
//!
//! `Phi(xi; mu, mu_t)` has coefficient
//!
//! ```text
//! (-1)^(|m|+|n|+|mt|+|nt|)
//!   prod_j C(mu_j + m_j + n_j + p_{j-1} + p_j - 1; m_j, n_j, p_j)
//!   prod_j C(mu_t_j + mt_j + nt_j + pt_{j-1} + pt_j - 1; mt_j, nt_j, pt_j)
//! ```
//!
//! at `xi^q`, with `p_{-1} = |m| + |nt|` and `pt_{-1} = |mt| + |n|`. Any
//! monomial `u^k ut^kt` (and any `eta^q'`) is a finite signed sum of `Phi`
//! series with shifted parameters times monomial prefixes, one summand per
//! term of the Jacobian.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::combinatorics::{binom, exponents_up_to, factorial, pochhammer, quadrinom, sigma, trinom, MultiIndex};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::jacobian::{side_term, term_range, TermKind};
use crate::layout::{Group, Layout};
use crate::scalar::Rational;
use crate::series::TruncatedSeries;

/// Integer parameters `mu` (length `r`) and `mu_t` (length `rt`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhiParams {
    pub mu: Vec<i64>,
    pub mu_t: Vec<i64>,
}

/// Exponents of `u_1..u_r` and `ut_1..ut_rt`; negative entries allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialSpec {
    pub k: Vec<i64>,
    pub kt: Vec<i64>,
}

impl MonomialSpec {
    pub fn zero(layout: &Layout) -> Self {
        MonomialSpec {
            k: vec![0; layout.r],
            kt: vec![0; layout.rt],
        }
    }

    /// `u_i` (1-based).
    pub fn unit(layout: &Layout, i: usize) -> Self {
        let mut s = Self::zero(layout);
        s.k[i - 1] = 1;
        s
    }

    /// `ut_i` (1-based).
    pub fn unit_tilde(layout: &Layout, i: usize) -> Self {
        let mut s = Self::zero(layout);
        s.kt[i - 1] = 1;
        s
    }

    pub fn mirrored(&self) -> Self {
        MonomialSpec {
            k: self.kt.clone(),
            kt: self.k.clone(),
        }
    }

    fn check(&self, layout: &Layout) -> Result<()> {
        for (expected, found) in [(layout.r, self.k.len()), (layout.rt, self.kt.len())] {
            if expected != found {
                return Err(Error::DimensionMismatch { expected, found });
            }
        }
        Ok(())
    }
}

fn at(v: &[i64], j: usize) -> i64 {
    v.get(j).copied().unwrap_or(0)
}

fn to_rational(v: BigInt) -> Rational {
    Rational::from_integer(v)
}

fn check_params(q: &MultiIndex, params: &PhiParams) -> Result<()> {
    for (expected, found) in [(q.m.len(), params.mu.len()), (q.mt.len(), params.mu_t.len())] {
        if expected != found {
            return Err(Error::DimensionMismatch { expected, found });
        }
    }
    if !q.is_nonnegative() {
        return Err(Error::NegativeIndex);
    }
    Ok(())
}

/// Coefficient of `xi^q` in `Phi(xi; mu, mu_t)`.
pub fn phi_coefficient(q: &MultiIndex, params: &PhiParams) -> Result<Rational> {
    check_params(q, params)?;
    let side = |mu: &[i64], m: &[i64], n: &[i64], p: &dyn Fn(i64) -> i64| -> BigInt {
        let mut acc = BigInt::one();
        for j in 0..mu.len() {
            let (mj, nj, pj, pprev) = (m[j], at(n, j), p(j as i64), p(j as i64 - 1));
            acc *= quadrinom(mu[j] + mj + nj + pprev + pj - 1, mj, nj, pj);
            if acc.is_zero() {
                break;
            }
        }
        acc
    };
    let mut c = side(&params.mu, &q.m, &q.n, &|j| q.p_at(j));
    if !c.is_zero() {
        c *= side(&params.mu_t, &q.mt, &q.nt, &|j| q.pt_at(j));
    }
    let odd = [&q.m, &q.n, &q.mt, &q.nt]
        .iter()
        .map(|g| g.iter().sum::<i64>())
        .sum::<i64>()
        % 2
        != 0;
    Ok(to_rational(if odd { -c } else { c }))
}

/// The same coefficient through rising factorials; needs all `mu >= 1`.
pub fn phi_coefficient_pochhammer(q: &MultiIndex, params: &PhiParams) -> Result<Rational> {
    check_params(q, params)?;
    let side = |mu: &[i64], m: &[i64], n: &[i64], p: &dyn Fn(i64) -> i64| -> Rational {
        let mut acc = Rational::one();
        for j in 0..mu.len() {
            let (mj, nj, pj, pprev) = (m[j], at(n, j), p(j as i64), p(j as i64 - 1));
            let num = pochhammer(mu[j], (mj + nj + pj + pprev) as u32);
            let den =
                pochhammer(mu[j], pprev as u32) * factorial(mj as u32) * factorial(nj as u32) * factorial(pj as u32);
            acc *= Rational::new(num, den);
        }
        acc
    };
    let c = side(&params.mu, &q.m, &q.n, &|j| q.p_at(j)) * side(&params.mu_t, &q.mt, &q.nt, &|j| q.pt_at(j));
    let odd = [&q.m, &q.n, &q.mt, &q.nt]
        .iter()
        .map(|g| g.iter().sum::<i64>())
        .sum::<i64>()
        % 2
        != 0;
    Ok(if odd { -c } else { c })
}

/// Builds a series from a per-exponent coefficient, all degrees `<= cap`.
fn tabulate<F>(nvars: usize, cap: i64, exec: Execution, coeff: F) -> TruncatedSeries
where
    F: Fn(&[i32]) -> Rational + Sync + Send,
{
    if cap < 0 {
        return TruncatedSeries::zero(nvars, 0).truncate(cap as i32);
    }
    let support = exponents_up_to(nvars, cap as u32);
    let coeffs = exec.map(&support, |e| coeff(e));
    TruncatedSeries::from_terms(nvars, cap as i32, 0, support.into_iter().zip(coeffs))
        .expect("tabulated exponents match the variable count")
}

/// `Phi(xi; mu, mu_t)` truncated at total degree `n`.
pub fn phi_truncated(params: &PhiParams, layout: &Layout, n: u32) -> Result<TruncatedSeries> {
    phi_truncated_with(params, layout, n as i64, Execution::default())
}

pub fn phi_truncated_with(params: &PhiParams, layout: &Layout, n: i64, exec: Execution) -> Result<TruncatedSeries> {
    check_params(&MultiIndex::zero(layout), params)?;
    Ok(tabulate(layout.dim(), n, exec, |e| {
        let q = MultiIndex::from_flat(layout, e).expect("exponent length matches layout");
        phi_coefficient(&q, params).expect("parameters checked")
    }))
}

/// Corner coefficient `(-1)^|m| prod_j C(mu_j + m_j + p_{j-1} + p_j - 1; m_j, p_j)`
/// with `p_{-1} = |m|`; `p` has one entry fewer than `m`.
pub fn corner_phi_coefficient(m: &[i64], p: &[i64], mu: &[i64]) -> Result<Rational> {
    if mu.len() != m.len() {
        return Err(Error::DimensionMismatch {
            expected: m.len(),
            found: mu.len(),
        });
    }
    if p.len() != m.len().saturating_sub(1) {
        return Err(Error::DimensionMismatch {
            expected: m.len().saturating_sub(1),
            found: p.len(),
        });
    }
    if m.iter().chain(p).any(|&e| e < 0) {
        return Err(Error::NegativeIndex);
    }
    let total_m: i64 = m.iter().sum();
    let pj = |j: i64| if j < 0 { total_m } else { at(p, j as usize) };
    let mut c = BigInt::one();
    for j in 0..m.len() {
        let i = j as i64;
        c *= trinom(mu[j] + m[j] + pj(i - 1) + pj(i) - 1, m[j], pj(i));
        if c.is_zero() {
            break;
        }
    }
    Ok(to_rational(if total_m % 2 != 0 { -c } else { c }))
}

/// Corner `Phi(x, z; mu)` over the `2r - 1` variables `(x, z)`.
pub fn corner_phi_truncated(mu: &[i64], n: i64, exec: Execution) -> Result<TruncatedSeries> {
    let r = mu.len();
    let layout = Layout::new(r, 0);
    Ok(tabulate(layout.dim(), n, exec, |e| {
        let (m, p) = e.split_at(r);
        let m: Vec<i64> = m.iter().map(|&x| x as i64).collect();
        let p: Vec<i64> = p.iter().map(|&x| x as i64).collect();
        corner_phi_coefficient(&m, &p, mu).expect("shape fixed by layout")
    }))
}

/// `pi_j = k_{j+1} + ... + k_r` and its tilded counterpart.
pub fn pi_from_u(spec: &MonomialSpec) -> PhiParams {
    let tails = |k: &[i64]| (0..k.len()).map(|j| k[j..].iter().sum()).collect();
    PhiParams {
        mu: tails(&spec.k),
        mu_t: tails(&spec.kt),
    }
}

/// `pi_j = p'_{j-1} + p'_j` with `p'_{-1} = |m'| + |nt'|` (and tilded).
pub fn pi_from_eta(qprime: &MultiIndex) -> PhiParams {
    PhiParams {
        mu: (0..qprime.m.len() as i64)
            .map(|j| qprime.p_at(j - 1) + qprime.p_at(j))
            .collect(),
        mu_t: (0..qprime.mt.len() as i64)
            .map(|j| qprime.pt_at(j - 1) + qprime.pt_at(j))
            .collect(),
    }
}

/// Exponent vector of the prefix `x_i z_0 ... z_{i-1}` (or `y_i z_0 ... z_{i-1}`)
/// on one side, empty for `i = -1`.
fn prefix(layout: &Layout, i: i64, kind: TermKind, tilde: bool, out: &mut [i32]) {
    if i < 0 {
        return;
    }
    let (gx, gy, gz) = if tilde {
        (Group::Xt, Group::Yt, Group::Zt)
    } else {
        (Group::X, Group::Y, Group::Z)
    };
    let lead = if kind == TermKind::S { gx } else { gy };
    out[layout.index(lead, i as usize).expect("prefix variable exists")] += 1;
    for j in 0..i as usize {
        out[layout.index(gz, j).expect("prefix variable exists")] += 1;
    }
}

/// One summand of the finite expansion: sign, prefix exponents, `Phi` parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiTerm {
    pub negative: bool,
    pub prefix: Vec<i32>,
    pub params: PhiParams,
}

/// The summands of `sum_{i,it} xi^(f_i+ft_it) Phi(pi + nu^i, pit + nut^it) - sum xi^(g_i+gt_it) Phi(...)`.
pub fn phi_terms(layout: &Layout, pi: &PhiParams) -> Vec<PhiTerm> {
    let shifted = |base: &[i64], i: i64| -> Vec<i64> {
        base.iter()
            .enumerate()
            .map(|(j, &b)| b + 2 * sigma(i, j as i64 - 1))
            .collect()
    };
    let mut terms = Vec::new();
    for kind in [TermKind::S, TermKind::T] {
        for i in term_range(layout.r, kind) {
            for it in term_range(layout.rt, kind) {
                let mut pre = vec![0; layout.dim()];
                prefix(layout, i, kind, false, &mut pre);
                prefix(layout, it, kind, true, &mut pre);
                terms.push(PhiTerm {
                    negative: kind == TermKind::T,
                    prefix: pre,
                    params: PhiParams {
                        mu: shifted(&pi.mu, i),
                        mu_t: shifted(&pi.mu_t, it),
                    },
                });
            }
        }
    }
    terms
}

fn sum_terms(layout: &Layout, terms: &[PhiTerm], n: i64, exec: Execution) -> Result<TruncatedSeries> {
    let parts = exec.map(terms, |t| -> Result<TruncatedSeries> {
        let deg: i64 = t.prefix.iter().map(|&e| e as i64).sum();
        let inner = phi_truncated_with(&t.params, layout, n - deg, Execution::Sequential)?;
        let s = inner.shift(&t.prefix)?;
        Ok(if t.negative { s.neg() } else { s })
    });
    let mut acc = TruncatedSeries::zero(layout.dim(), n.max(0) as u32);
    for p in parts {
        let p = p?;
        if !p.is_zero() {
            acc = acc.add(&p)?;
        }
    }
    Ok(acc)
}

/// Series of `u^k ut^kt` truncated at total degree `n`.
///
/// Corner branches go through the single-sum corner form, every other
/// branch through the generic double sum.
pub fn expand_monomial(spec: &MonomialSpec, layout: &Layout, n: u32) -> Result<TruncatedSeries> {
    expand_monomial_with(spec, layout, n, Execution::default())
}

pub fn expand_monomial_with(spec: &MonomialSpec, layout: &Layout, n: u32, exec: Execution) -> Result<TruncatedSeries> {
    if layout.is_corner() {
        expand_monomial_corner(spec, layout, n, exec)
    } else {
        expand_monomial_generic(spec, layout, n, exec)
    }
}

/// Generic double-sum path; also valid (with empty groups) at corners.
pub fn expand_monomial_generic(
    spec: &MonomialSpec,
    layout: &Layout,
    n: u32,
    exec: Execution,
) -> Result<TruncatedSeries> {
    spec.check(layout)?;
    let terms = phi_terms(layout, &pi_from_u(spec));
    sum_terms(layout, &terms, n as i64, exec)
}

/// `u^k = sum_{i=-1}^{r-1} xi^(f_i) Phi(x, z; pi + nu^i)` for `rt = 0`; the
/// `r = 0` corner is handled by mirroring.
pub fn expand_monomial_corner(
    spec: &MonomialSpec,
    layout: &Layout,
    n: u32,
    exec: Execution,
) -> Result<TruncatedSeries> {
    spec.check(layout)?;
    if !layout.is_corner() {
        return Err(Error::DimensionMismatch {
            expected: 0,
            found: layout.rt.min(layout.r),
        });
    }
    if layout.r == 0 {
        let mirrored = layout.mirrored();
        let s = expand_monomial_corner(&spec.mirrored(), &mirrored, n, exec)?;
        return s.permute(&mirrored.mirror_permutation());
    }
    let pi = pi_from_u(spec);
    let parts = exec.map_range(layout.r + 1, |idx| -> Result<TruncatedSeries> {
        let i = idx as i64 - 1;
        let mut pre = vec![0; layout.dim()];
        prefix(layout, i, TermKind::S, false, &mut pre);
        let deg: i64 = pre.iter().map(|&e| e as i64).sum();
        let mu: Vec<i64> = pi
            .mu
            .iter()
            .enumerate()
            .map(|(j, &b)| b + 2 * sigma(i, j as i64 - 1))
            .collect();
        corner_phi_truncated(&mu, n as i64 - deg, Execution::Sequential)?.shift(&pre)
    });
    let mut acc = TruncatedSeries::zero(layout.dim(), n);
    for p in parts {
        acc = acc.add(&p?)?;
    }
    Ok(acc)
}

/// Series of `eta^q'` for `q' >= 0`: `xi^q'` times the finite `Phi` sum.
pub fn expand_eta_monomial(qprime: &MultiIndex, layout: &Layout, n: u32, exec: Execution) -> Result<TruncatedSeries> {
    if !qprime.is_nonnegative() {
        return Err(Error::NegativeIndex);
    }
    let flat = qprime.to_flat();
    if flat.len() != layout.dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.dim(),
            found: flat.len(),
        });
    }
    let deg = qprime.total_degree();
    if deg > n as i64 {
        return Ok(TruncatedSeries::zero(layout.dim(), n));
    }
    let terms = phi_terms(layout, &pi_from_eta(qprime));
    sum_terms(layout, &terms, n as i64 - deg, exec)?.shift(&flat)
}

/// `[xi^q] eta^q'` as the signed sum of products of side coefficients.
pub fn coeff_h(qprime: &MultiIndex, q: &MultiIndex, layout: &Layout) -> Rational {
    let side_coeff = |i: i64, kind: TermKind, tilde: bool| -> BigInt {
        let (len, m, n, mp, np) = if tilde {
            (layout.rt, &q.mt, &q.nt, &qprime.mt, &qprime.nt)
        } else {
            (layout.r, &q.m, &q.n, &qprime.m, &qprime.n)
        };
        let pabs = |j: i64| if tilde { q.pt_at(j) } else { q.p_at(j) };
        let pp = |j: i64| if tilde { qprime.pt_at(j) } else { qprime.p_at(j) };
        let mut acc = BigInt::one();
        for (j, f) in side_term(len, i, kind).iter().enumerate() {
            let jj = j as i64;
            let a = pabs(jj - 1) + pabs(jj);
            acc *= trinom(-a + f.one_plus_st, m[j] - mp[j] - f.s, at(n, j) - at(np, j) - f.t);
            if acc.is_zero() {
                return acc;
            }
            acc *= binom(a + f.one_plus_w, pabs(jj) - pp(jj) - f.w);
            if acc.is_zero() {
                return acc;
            }
        }
        acc
    };
    let mut total = BigInt::zero();
    for (kind, sign) in [(TermKind::S, 1), (TermKind::T, -1)] {
        for i in term_range(layout.r, kind) {
            let a = side_coeff(i, kind, false);
            if a.is_zero() {
                continue;
            }
            for it in term_range(layout.rt, kind) {
                let b = side_coeff(it, kind, true);
                total += &a * b * sign;
            }
        }
    }
    to_rational(total)
}

/// Number of `Phi` summands for a layout (equal to the Jacobian term count).
pub fn phi_term_count(layout: &Layout) -> usize {
    phi_terms(layout, &pi_from_u(&MonomialSpec::zero(layout))).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn corner(r: usize) -> Layout {
        Layout::new(r, 0)
    }

    fn series_coeffs(s: &TruncatedSeries, n: i32) -> Vec<Rational> {
        (0..=n).map(|i| s.coeff(&[i])).collect()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn phi_coefficient_examples() {
        let l = corner(1);
        let zero = MultiIndex::zero(&l);
        let p = |mu| PhiParams {
            mu: vec![mu],
            mu_t: vec![],
        };
        assert_eq!(phi_coefficient(&zero, &p(1)).unwrap(), int(1));
        let q = MultiIndex::from_flat(&l, &[1]).unwrap();
        assert_eq!(phi_coefficient(&q, &p(1)).unwrap(), int(-2));
        assert_eq!(phi_coefficient(&q, &p(3)).unwrap(), int(-4));
        let neg = MultiIndex {
            m: vec![-1],
            ..zero.clone()
        };
        assert_eq!(phi_coefficient(&neg, &p(1)), Err(Error::NegativeIndex));
    }

    #[test]
    fn phi_truncated_d2() {
        let l = corner(1);
        let s = phi_truncated(
            &PhiParams {
                mu: vec![1],
                mu_t: vec![],
            },
            &l,
            2,
        )
        .unwrap();
        assert_eq!(series_coeffs(&s, 2), ints(&[1, -2, 6]));
        let s0 = phi_truncated(
            &PhiParams {
                mu: vec![5],
                mu_t: vec![],
            },
            &l,
            0,
        )
        .unwrap();
        assert_eq!(s0, TruncatedSeries::one(1, 0));
    }

    #[test]
    fn pochhammer_form_agrees() {
        for (r, rt) in [(1, 0), (2, 0), (1, 1), (2, 1), (2, 2)] {
            let l = Layout::new(r, rt);
            let params = PhiParams {
                mu: (0..r as i64).map(|j| j + 1).collect(),
                mu_t: (0..rt as i64).map(|j| 2 * j + 1).collect(),
            };
            for e in exponents_up_to(l.dim(), 3) {
                let q = MultiIndex::from_flat(&l, &e).unwrap();
                assert_eq!(
                    phi_coefficient(&q, &params).unwrap(),
                    phi_coefficient_pochhammer(&q, &params).unwrap(),
                    "layout {l:?} q {e:?}"
                );
            }
        }
    }

    #[test]
    fn expand_d2_catalan() {
        let l = corner(1);
        let s = expand_monomial(&MonomialSpec { k: vec![1], kt: vec![] }, &l, 3).unwrap();
        assert_eq!(series_coeffs(&s, 3), ints(&[1, -1, 2, -5]));
        let one = expand_monomial(&MonomialSpec { k: vec![0], kt: vec![] }, &l, 4).unwrap();
        assert_eq!(one, TruncatedSeries::one(1, 4));
    }

    #[test]
    fn expand_d3_middle_first_order() {
        // layout (1,1): x, y, xt, yt
        let l = Layout::new(1, 1);
        let s = expand_monomial(&MonomialSpec::unit(&l, 1), &l, 1).unwrap();
        let expected = TruncatedSeries::from_terms(
            4,
            1,
            0,
            [
                (vec![0, 0, 0, 0], int(1)),
                (vec![1, 0, 0, 0], int(-1)),
                (vec![0, 1, 0, 0], int(-1)),
            ],
        )
        .unwrap();
        assert_eq!(s, expected);
    }

    #[test]
    fn term_counts() {
        for d in 2..=7usize {
            for k in 1..=d {
                let l = Layout::for_branch(d, k);
                let (d, k) = (d as i64, k as i64);
                assert_eq!(phi_term_count(&l) as i64, 2 * d * k - 2 * k * k + 2 * k - d);
            }
        }
    }

    #[test]
    fn corner_coefficient_examples() {
        assert_eq!(corner_phi_coefficient(&[0, 0], &[0], &[3, 4]).unwrap(), int(1));
        // m = 0, p = (1): C(mu0 + 1 - 1; 0, 1) C(mu1 + 1 - 1; 0, 0) = mu0
        assert_eq!(corner_phi_coefficient(&[0, 0], &[1], &[3, 4]).unwrap(), int(3));
        assert_eq!(corner_phi_coefficient(&[1], &[], &[-1]), Ok(int(0)));
        assert_eq!(
            corner_phi_coefficient(&[0, -1], &[0], &[1, 1]),
            Err(Error::NegativeIndex)
        );
        let l = corner(3);
        let mu = [2, -1, 3];
        for e in exponents_up_to(l.dim(), 3) {
            let q = MultiIndex::from_flat(&l, &e).unwrap();
            let generic = phi_coefficient(
                &q,
                &PhiParams {
                    mu: mu.to_vec(),
                    mu_t: vec![],
                },
            )
            .unwrap();
            assert_eq!(corner_phi_coefficient(&q.m, &q.p, &mu).unwrap(), generic);
        }
    }

    #[test]
    fn coeff_h_small_cases() {
        let l = corner(1);
        let z = MultiIndex::zero(&l);
        assert_eq!(coeff_h(&z, &z, &l), int(1));
        let one = MultiIndex::from_flat(&l, &[1]).unwrap();
        assert_eq!(coeff_h(&one, &one, &l), int(1));
        assert_eq!(coeff_h(&one, &z, &l), int(0));
        // s = x u: [x^2] s = -1
        let two = MultiIndex::from_flat(&l, &[2]).unwrap();
        assert_eq!(coeff_h(&one, &two, &l), int(-1));
    }

    #[test]
    fn eta_expansion_matches_coeff_h() {
        for (r, rt) in [(1, 1), (2, 1), (2, 0)] {
            let l = Layout::new(r, rt);
            for qp in exponents_up_to(l.dim(), 1) {
                let qprime = MultiIndex::from_flat(&l, &qp).unwrap();
                let s = expand_eta_monomial(&qprime, &l, 3, Execution::Sequential).unwrap();
                for e in exponents_up_to(l.dim(), 3) {
                    let q = MultiIndex::from_flat(&l, &e).unwrap();
                    assert_eq!(s.coeff(&e), coeff_h(&qprime, &q, &l), "layout {l:?} q' {qp:?} q {e:?}");
                }
            }
        }
    }

    #[test]
    fn mirrored_corner_path() {
        let l = Layout::new(0, 2);
        let spec = MonomialSpec::unit_tilde(&l, 2);
        let a = expand_monomial_corner(&spec, &l, 3, Execution::Sequential).unwrap();
        let b = expand_monomial_generic(&spec, &l, 3, Execution::Sequential).unwrap();
        assert_eq!(a, b);
    }
}
