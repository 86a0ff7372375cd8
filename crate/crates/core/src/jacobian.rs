//! Lagrange form of the eigenvector system and its Jacobian.
//!
//! The unknowns `eta = (s, t, w, st, tt, wt)` share the variable layout of
//! `xi = (x, y, z, xt, yt, zt)`; the system reads `xi_i = eta_i / phi_i(eta)`.
//! The Jacobian `det(1 - d log phi / d log eta)` has the closed form
//! `S St - T Tt`, each factor a sum of products over one side. Those
//! products are described once, as exponent tuples, by [`side_term`] and
//! used both to evaluate `J` here and to extract series coefficients in
//! [`crate::hypergeometric::coeff_h`].

use num_traits::{One, Zero};

use crate::combinatorics::{delta, sigma};
use crate::error::{Error, Result};
use crate::layout::{Group, Grouped, Layout};
use crate::scalar::{Rational, Scalar};

/// A point `(s, t, w, st, tt, wt)` of the Lagrange unknowns.
pub type EtaPoint<T> = Grouped<T>;

/// Which of the two Jacobian sums a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    /// `S`, summed over `i = -1..r-1`.
    S,
    /// `T`, summed over `i = 0..r-1`.
    T,
}

/// Exponents of one factor `s_j^s t_j^t w_j^w (1 + w_j)^one_plus_w (1 + s_j + t_j)^one_plus_st`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TermFactor {
    pub s: i64,
    pub t: i64,
    pub w: i64,
    pub one_plus_w: i64,
    pub one_plus_st: i64,
}

/// Term `i` of `S` or `T` for a side of length `r`, one factor per `j < r`:
/// `w_j^sigma(i,j) (s_j or t_j)^delta(i,j) / ((1 + w_j)^(1-delta) (1 + s_j + t_j)^delta)`.
pub fn side_term(r: usize, i: i64, kind: TermKind) -> Vec<TermFactor> {
    (0..r as i64)
        .map(|j| {
            let dij = delta(i, j);
            TermFactor {
                s: if kind == TermKind::S { dij } else { 0 },
                t: if kind == TermKind::T { dij } else { 0 },
                w: sigma(i, j),
                one_plus_w: dij - 1,
                one_plus_st: -dij,
            }
        })
        .collect()
}

/// Range of `i` for a sum of the given kind on a side of length `r`.
pub fn term_range(r: usize, kind: TermKind) -> std::ops::Range<i64> {
    match kind {
        TermKind::S => -1..r as i64,
        TermKind::T => 0..r as i64,
    }
}

/// Unknowns of one side, absent slots read as zero.
struct Side<T> {
    s: Vec<T>,
    t: Vec<T>,
    w: Vec<T>,
}

impl<T: Scalar> Side<T> {
    fn of(eta: &EtaPoint<T>, tilde: bool) -> Self {
        let l = eta.layout();
        let (gs, gt, gw, r) = if tilde {
            (Group::Xt, Group::Yt, Group::Zt, l.rt)
        } else {
            (Group::X, Group::Y, Group::Z, l.r)
        };
        let z = T::zero();
        Side {
            s: (0..r).map(|j| eta.get_or(gs, j, &z)).collect(),
            t: (0..r).map(|j| eta.get_or(gt, j, &z)).collect(),
            w: (0..r).map(|j| eta.get_or(gw, j, &z)).collect(),
        }
    }

    fn len(&self) -> usize {
        self.s.len()
    }

    fn one_plus_st(&self, j: usize) -> T {
        T::one() + self.s[j].clone() + self.t[j].clone()
    }

    fn one_plus_w(&self, j: usize) -> T {
        T::one() + self.w[j].clone()
    }

    fn eval_term(&self, factors: &[TermFactor]) -> Result<T> {
        let mut acc = T::one();
        for (j, f) in factors.iter().enumerate() {
            acc = acc
                * power(&self.s[j], f.s, "s")?
                * power(&self.t[j], f.t, "t")?
                * power(&self.w[j], f.w, "w")?
                * power(&self.one_plus_w(j), f.one_plus_w, "1 + w")?
                * power(&self.one_plus_st(j), f.one_plus_st, "1 + s + t")?;
        }
        Ok(acc)
    }

    fn sum(&self, kind: TermKind) -> Result<T> {
        let mut acc = T::zero();
        for i in term_range(self.len(), kind) {
            acc = acc + self.eval_term(&side_term(self.len(), i, kind))?;
        }
        Ok(acc)
    }
}

/// `base^e` with `0^0 = 1`.
fn power<T: Scalar>(base: &T, e: i64, what: &'static str) -> Result<T> {
    if e == 0 {
        return Ok(T::one());
    }
    if e < 0 && base.is_zero() {
        return Err(Error::DenominatorZero(what));
    }
    Ok(base.powi(e as i32))
}

/// The maps `phi = (f, g, h, ft, gt, ht)` in the layout of `eta`.
pub fn phi_maps<T: Scalar>(eta: &EtaPoint<T>) -> Result<Grouped<T>> {
    let l = eta.layout();
    let side = Side::of(eta, false);
    let tside = Side::of(eta, true);
    let mut phi = Grouped::filled(l, T::one());
    let ratio = |s: &Side<T>, j: usize| -> Result<T> {
        let den = s.one_plus_st(j);
        if den.is_zero() {
            return Err(Error::DenominatorZero("1 + s + t"));
        }
        Ok(s.one_plus_w(j) / den)
    };
    if l.r > 0 {
        let f = ratio(&side, 0)?;
        phi.group_mut(Group::X).fill(f.clone());
        phi.group_mut(Group::Yt).fill(f);
        for i in 0..l.len(Group::Z) {
            phi.group_mut(Group::Z)[i] = ratio(&side, i)? * ratio(&side, i + 1)?;
        }
    }
    if l.rt > 0 {
        let ft = ratio(&tside, 0)?;
        phi.group_mut(Group::Xt).fill(ft.clone());
        phi.group_mut(Group::Y).fill(ft);
        for i in 0..l.len(Group::Zt) {
            phi.group_mut(Group::Zt)[i] = ratio(&tside, i)? * ratio(&tside, i + 1)?;
        }
    }
    Ok(phi)
}

/// `J = S St - T Tt`.
pub fn jacobian_closed<T: Scalar>(eta: &EtaPoint<T>) -> Result<T> {
    let side = Side::of(eta, false);
    let tside = Side::of(eta, true);
    Ok(side.sum(TermKind::S)? * tside.sum(TermKind::S)? - side.sum(TermKind::T)? * tside.sum(TermKind::T)?)
}

/// Number of product terms in the closed form.
pub fn jacobian_term_count(layout: &Layout) -> usize {
    let n = |r: usize, k| term_range(r, k).count();
    n(layout.r, TermKind::S) * n(layout.rt, TermKind::S) + n(layout.r, TermKind::T) * n(layout.rt, TermKind::T)
}

/// `det(delta_jk - (eta_k / phi_j) d phi_j / d eta_k)` with central differences.
pub fn jacobian_numeric(eta: &EtaPoint<f64>, step: f64) -> Result<f64> {
    let n = eta.layout().dim();
    let phi0 = phi_maps(eta)?.into_values();
    let mut a = vec![vec![0.0; n]; n];
    for k in 0..n {
        let shifted = |h: f64| -> Result<Vec<f64>> {
            let mut v = eta.values().to_vec();
            v[k] += h;
            Ok(phi_maps(&Grouped::new(eta.layout(), v)?)?.into_values())
        };
        let plus = shifted(step)?;
        let minus = shifted(-step)?;
        for j in 0..n {
            let d = (plus[j] - minus[j]) / (2.0 * step);
            a[j][k] = delta(j as i64, k as i64) as f64 - eta.values()[k] / phi0[j] * d;
        }
    }
    determinant(a)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut a: Vec<Vec<f64>>) -> Result<f64> {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        let p = a[piv][col];
        if !p.is_finite() || p == 0.0 {
            return Err(Error::SingularElimination);
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= p;
        for row in col + 1..n {
            let f = a[row][col] / p;
            if f != 0.0 {
                let (top, bottom) = a.split_at_mut(row);
                for (x, y) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *x -= f * y;
                }
            }
        }
    }
    Ok(det)
}

/// Exact residuals of the eigenvector system rebuilt from a Lagrange point.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeReport {
    pub xi: Grouped<Rational>,
    pub u: Vec<Rational>,
    pub ut: Vec<Rational>,
    /// `(equation, residual)` pairs.
    pub residuals: Vec<(String, Rational)>,
}

impl LagrangeReport {
    pub fn all_zero(&self) -> bool {
        self.residuals.iter().all(|(_, r)| r.is_zero())
    }
}

/// Solves `xi = eta / phi(eta)`, rebuilds `u`, `ut` and checks the original
/// quadratic system together with the definitions of `s, t, w`.
///
/// Ratios `eta_i / xi_i` are taken as their limit `phi_i` when `xi_i = 0`;
/// `DivisionByZero` is reported only when `phi_i` itself vanishes.
pub fn verify_lagrange_system(eta: &EtaPoint<Rational>) -> Result<LagrangeReport> {
    let l = eta.layout();
    let phi = phi_maps(eta)?;
    let names = l.variable_names();
    for (i, p) in phi.values().iter().enumerate() {
        if p.is_zero() {
            return Err(Error::DivisionByZero(format!("eta/phi at {}", names[i])));
        }
    }
    let xi = Grouped::new(l, eta.values().iter().zip(phi.values()).map(|(e, p)| e / p).collect())?;
    // eta_i / xi_i, or its limit
    let ratio = |g: Group, i: usize| -> Rational {
        let x = &xi.group(g)[i];
        if x.is_zero() {
            phi.group(g)[i].clone()
        } else {
            &eta.group(g)[i] / x
        }
    };
    let rebuild = |len: usize, gx: Group, gz: Group| -> Vec<Rational> {
        // u_0 = 1, u_1 = s_0 / x_0, u_{i+2} = u_i w_i / z_i
        let mut u = vec![Rational::one()];
        if len >= 1 {
            u.push(ratio(gx, 0));
        }
        for i in 0..len.saturating_sub(1) {
            let next = &u[i] * ratio(gz, i);
            u.push(next);
        }
        u
    };
    let u = rebuild(l.r, Group::X, Group::Z);
    let ut = rebuild(l.rt, Group::Xt, Group::Zt);

    let zero = Rational::zero();
    let mut residuals = Vec::new();
    let mut system = |own: &[Rational], other: &[Rational], g: [Group; 3], tag: &str| {
        let len = own.len() - 1;
        let other1 = other.get(1).cloned().unwrap_or_else(Rational::zero);
        for i in 1..=len {
            let x = xi.get_or(g[0], i - 1, &zero);
            let y = xi.get_or(g[1], i - 1, &zero);
            let z = xi.get_or(g[2], i - 1, &zero);
            let next = own.get(i + 1).cloned().unwrap_or_else(Rational::zero);
            let rhs = &own[i - 1] - &x * &own[1] * &own[i] - &y * &other1 * &own[i] + &z * &next;
            residuals.push((format!("{tag}_{i}"), &own[i] - rhs));
        }
    };
    system(&u, &ut, [Group::X, Group::Y, Group::Z], "u");
    system(&ut, &u, [Group::Xt, Group::Yt, Group::Zt], "ut");

    let u1 = u.get(1).cloned().unwrap_or_else(Rational::zero);
    let ut1 = ut.get(1).cloned().unwrap_or_else(Rational::zero);
    for (g, own, factor) in [
        (Group::X, Group::X, &u1),
        (Group::Y, Group::Y, &ut1),
        (Group::Xt, Group::Xt, &ut1),
        (Group::Yt, Group::Yt, &u1),
    ] {
        for i in 0..l.len(g) {
            let res = &eta.group(g)[i] - &xi.group(own)[i] * factor;
            residuals.push((format!("eta_{}_{}", g.name(), i), res));
        }
    }
    for (g, uu) in [(Group::Z, &u), (Group::Zt, &ut)] {
        for i in 0..l.len(g) {
            let res = &eta.group(g)[i] * &uu[i] - &xi.group(g)[i] * &uu[i + 2];
            residuals.push((format!("eta_{}_{}", g.name(), i), res));
        }
    }
    Ok(LagrangeReport { xi, u, ut, residuals })
}
