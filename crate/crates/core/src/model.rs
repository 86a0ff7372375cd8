//! Input matrix, branch relabeling, expansion variables and eigenpair assembly.
//!
//! Branch `k` recentres the matrix on `alpha_k`. The `r = d - k` entries
//! below the pivot become the untilded problem (`a, b, c`) and the
//! `rt = k - 1` entries above it, read upwards, the tilded one
//! (`at, bt, ct`). The eigenvector is normalised to `1` at position `k`:
//!
//! ```text
//! (vt_rt, ..., vt_1, 1, v_1, ..., v_r)
//! ```

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::layout::{Group, Grouped, Layout};
use crate::scalar::{Rational, Scalar};
use crate::series::TruncatedSeries;

/// A `d x d` tridiagonal matrix: diagonal `alpha`, superdiagonal `beta`,
/// subdiagonal `gamma` (`beta[i]` sits at `(i, i+1)`, `gamma[i]` at `(i+1, i)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiMatrix {
    alpha: Vec<Rational>,
    beta: Vec<Rational>,
    gamma: Vec<Rational>,
}

impl JacobiMatrix {
    pub fn new(alpha: Vec<Rational>, beta: Vec<Rational>, gamma: Vec<Rational>) -> Result<Self> {
        let d = alpha.len();
        if d < 2 {
            return Err(Error::MatrixTooSmall(d));
        }
        for (field, v) in [("beta", &beta), ("gamma", &gamma)] {
            if v.len() != d - 1 {
                return Err(Error::LengthMismatch {
                    field,
                    expected: d - 1,
                    found: v.len(),
                });
            }
        }
        for i in 0..d {
            for j in i + 1..d {
                if alpha[i] == alpha[j] {
                    return Err(Error::DuplicateDiagonal {
                        first: i + 1,
                        second: j + 1,
                    });
                }
            }
        }
        Ok(JacobiMatrix { alpha, beta, gamma })
    }

    pub fn d(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[Rational] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Rational] {
        &self.beta
    }

    pub fn gamma(&self) -> &[Rational] {
        &self.gamma
    }

    pub fn trace(&self) -> Rational {
        self.alpha.iter().sum()
    }

    /// The matrix turned by 180 degrees: `J M J` with `J` the reversal.
    pub fn rotated(&self) -> JacobiMatrix {
        let mut alpha = self.alpha.clone();
        alpha.reverse();
        let mut beta = self.gamma.clone();
        beta.reverse();
        let mut gamma = self.beta.clone();
        gamma.reverse();
        JacobiMatrix { alpha, beta, gamma }
    }

    /// Same diagonal, off-diagonals multiplied by `eps`.
    pub fn scale_off_diagonal(&self, eps: &Rational) -> JacobiMatrix {
        JacobiMatrix {
            alpha: self.alpha.clone(),
            beta: self.beta.iter().map(|b| b * eps).collect(),
            gamma: self.gamma.iter().map(|c| c * eps).collect(),
        }
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> Rational {
        (0..self.d())
            .map(|i| {
                let mut s = self.alpha[i].abs();
                if i > 0 {
                    s += self.gamma[i - 1].abs();
                }
                if i + 1 < self.d() {
                    s += self.beta[i].abs();
                }
                s
            })
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// `M x` evaluated in `T`.
    pub fn apply<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        let conv = |v: &[Rational]| v.iter().map(T::from_rational).collect::<Vec<_>>();
        tridiagonal_apply(&conv(&self.alpha), &conv(&self.beta), &conv(&self.gamma), x)
    }
}

fn tridiagonal_apply<T: Scalar>(diag: &[T], sup: &[T], sub: &[T], x: &[T]) -> Vec<T> {
    let d = diag.len();
    (0..d)
        .map(|i| {
            let mut s = diag[i].clone() * x[i].clone();
            if i > 0 {
                s = s + sub[i - 1].clone() * x[i - 1].clone();
            }
            if i + 1 < d {
                s = s + sup[i].clone() * x[i + 1].clone();
            }
            s
        })
        .collect()
}

/// Branch-`k` recentred problem; `a[0] = at[0] = 0` and `shift = alpha_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchConfig {
    pub k: usize,
    pub r: usize,
    pub rt: usize,
    pub a: Vec<Rational>,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
    pub at: Vec<Rational>,
    pub bt: Vec<Rational>,
    pub ct: Vec<Rational>,
    pub shift: Rational,
}

pub fn relabel(m: &JacobiMatrix, k: usize) -> Result<BranchConfig> {
    let d = m.d();
    if k == 0 || k > d {
        return Err(Error::BadIndex { k, d });
    }
    let (r, rt) = (d - k, k - 1);
    let p = k - 1;
    let shift = m.alpha[p].clone();
    Ok(BranchConfig {
        k,
        r,
        rt,
        a: (0..=r).map(|i| &m.alpha[p + i] - &shift).collect(),
        b: (0..r).map(|i| m.beta[p + i].clone()).collect(),
        c: (0..r).map(|i| m.gamma[p + i].clone()).collect(),
        at: (0..=rt).map(|i| &m.alpha[p - i] - &shift).collect(),
        bt: (0..rt).map(|i| m.beta[p - 1 - i].clone()).collect(),
        ct: (0..rt).map(|i| m.gamma[p - 1 - i].clone()).collect(),
        shift,
    })
}

impl BranchConfig {
    pub fn layout(&self) -> Layout {
        Layout::new(self.r, self.rt)
    }

    pub fn d(&self) -> usize {
        self.r + self.rt + 1
    }

    /// Diagonals of `M - shift` in original order: `(diag, sup, sub)`.
    pub fn recentred(&self) -> (Vec<Rational>, Vec<Rational>, Vec<Rational>) {
        let mut diag: Vec<Rational> = self.at.iter().rev().cloned().collect();
        diag.extend(self.a[1..].iter().cloned());
        let mut sup: Vec<Rational> = self.bt.iter().rev().cloned().collect();
        sup.extend(self.b.iter().cloned());
        let mut sub: Vec<Rational> = self.ct.iter().rev().cloned().collect();
        sub.extend(self.c.iter().cloned());
        (diag, sup, sub)
    }
}

/// A point of the expansion variables `(x, y, z, xt, yt, zt)`.
pub type ExpansionPoint<T> = Grouped<T>;

pub fn expansion_variables(cfg: &BranchConfig) -> ExpansionPoint<Rational> {
    let layout = cfg.layout();
    let mut pt = Grouped::filled(layout, Rational::zero());
    let bc0 = || &cfg.b[0] * &cfg.c[0];
    let bct0 = || &cfg.bt[0] * &cfg.ct[0];
    for i in 0..layout.len(Group::X) {
        pt.group_mut(Group::X)[i] = bc0() / (&cfg.a[1] * &cfg.a[i + 1]);
    }
    for i in 0..layout.len(Group::Y) {
        pt.group_mut(Group::Y)[i] = bct0() / (&cfg.at[1] * &cfg.a[i + 1]);
    }
    for i in 0..layout.len(Group::Z) {
        pt.group_mut(Group::Z)[i] = &cfg.b[i + 1] * &cfg.c[i + 1] / (&cfg.a[i + 1] * &cfg.a[i + 2]);
    }
    for i in 0..layout.len(Group::Xt) {
        pt.group_mut(Group::Xt)[i] = bct0() / (&cfg.at[1] * &cfg.at[i + 1]);
    }
    for i in 0..layout.len(Group::Yt) {
        pt.group_mut(Group::Yt)[i] = bc0() / (&cfg.a[1] * &cfg.at[i + 1]);
    }
    for i in 0..layout.len(Group::Zt) {
        pt.group_mut(Group::Zt)[i] = &cfg.bt[i + 1] * &cfg.ct[i + 1] / (&cfg.at[i + 1] * &cfg.at[i + 2]);
    }
    pt
}

/// Largest violation of `x_i xt_j = y_i yt_j` over all valid `i, j`.
pub fn dependency_defect(pt: &ExpansionPoint<Rational>) -> Rational {
    let l = pt.layout();
    let mut worst = Rational::zero();
    for i in 0..l.len(Group::Y) {
        for j in 0..l.len(Group::Yt) {
            let lhs = &pt.group(Group::X)[i] * &pt.group(Group::Xt)[j];
            let rhs = &pt.group(Group::Y)[i] * &pt.group(Group::Yt)[j];
            worst = worst.max((lhs - rhs).abs());
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult<T> {
    pub k: usize,
    pub lambda_series: TruncatedSeries,
    pub eigenvalue: T,
    /// `v[0] = 1`, then `v_1..v_r` below the pivot.
    pub v: Vec<T>,
    /// `vt[0] = 1`, then `vt_1..vt_rt` above the pivot.
    pub vt: Vec<T>,
    pub residual: f64,
}

impl<T: Clone> EigenResult<T> {
    /// Eigenvector in original row order, entry `k` equal to 1.
    pub fn vector(&self) -> Vec<T> {
        let mut out: Vec<T> = self.vt.iter().rev().cloned().collect();
        out.extend(self.v[1..].iter().cloned());
        out
    }
}

/// Series for `lambda` in the expansion variables:
/// `-a_1 x_0 u_1 - at_1 xt_0 ut_1`, truncated at the common cap.
pub fn lambda_series(cfg: &BranchConfig, u: &[TruncatedSeries], ut: &[TruncatedSeries]) -> Result<TruncatedSeries> {
    let layout = cfg.layout();
    let cap = u.iter().chain(ut).map(|s| s.cap()).min().unwrap_or(0).max(0) as u32;
    let mut lam = TruncatedSeries::zero(layout.dim(), cap);
    if let (Some(u1), Some(x0)) = (u.first(), layout.index(Group::X, 0)) {
        lam = lam.sub(&u1.mul_var(x0).scale(&cfg.a[1]))?;
    }
    if let (Some(ut1), Some(xt0)) = (ut.first(), layout.index(Group::Xt, 0)) {
        lam = lam.sub(&ut1.mul_var(xt0).scale(&cfg.at[1]))?;
    }
    Ok(lam)
}

/// Evaluates the `u`, `ut` series at `point` and rebuilds the eigenpair.
pub fn assemble_eigenpair<T: Scalar>(
    cfg: &BranchConfig,
    u: &[TruncatedSeries],
    ut: &[TruncatedSeries],
    point: &ExpansionPoint<T>,
    n: u32,
) -> Result<EigenResult<T>> {
    if u.len() != cfg.r {
        return Err(Error::DimensionMismatch {
            expected: cfg.r,
            found: u.len(),
        });
    }
    if ut.len() != cfg.rt {
        return Err(Error::DimensionMismatch {
            expected: cfg.rt,
            found: ut.len(),
        });
    }
    if let Some(s) = u.iter().chain(ut).find(|s| s.cap() != n as i32) {
        return Err(Error::DegreeMismatch {
            expected: n,
            found: s.cap().max(0) as u32,
        });
    }
    let values = point.values();
    let side = |series: &[TruncatedSeries], num: &[Rational], den: &[Rational]| -> Result<Vec<T>> {
        let mut out = vec![T::one()];
        let mut pref = Rational::one();
        for (i, s) in series.iter().enumerate() {
            pref = -pref * &num[i] / &den[i + 1];
            out.push(T::from_rational(&pref) * s.eval(values)?);
        }
        Ok(out)
    };
    let v = side(u, &cfg.c, &cfg.a)?;
    let vt = side(ut, &cfg.bt, &cfg.at)?;
    let lam = lambda_series(cfg, u, ut)?;
    let lambda = lam.eval(values)?;
    let eigenvalue = T::from_rational(&cfg.shift) + lambda.clone();
    let mut result = EigenResult {
        k: cfg.k,
        lambda_series: lam,
        eigenvalue,
        v,
        vt,
        residual: 0.0,
    };
    result.residual = recentred_residual(cfg, &result.vector(), &lambda).to_f64();
    Ok(result)
}

/// `|| (M - shift) V - lambda V ||_inf`, which equals `|| M V - Lambda V ||_inf`.
fn recentred_residual<T: Scalar>(cfg: &BranchConfig, x: &[T], lambda: &T) -> T {
    let (diag, sup, sub) = cfg.recentred();
    let conv = |v: &[Rational]| v.iter().map(T::from_rational).collect::<Vec<_>>();
    let mx = tridiagonal_apply(&conv(&diag), &conv(&sup), &conv(&sub), x);
    mx.into_iter()
        .zip(x)
        .map(|(a, b)| (a - lambda.clone() * b.clone()).abs())
        .fold(T::zero(), |acc, e| if e > acc { e } else { acc })
}

/// `|| M x - lambda x ||_inf` for an arbitrary vector.
pub fn residual<T: Scalar>(m: &JacobiMatrix, lambda: &T, x: &[T]) -> T {
    m.apply(x)
        .into_iter()
        .zip(x)
        .map(|(a, b)| (a - lambda.clone() * b.clone()).abs())
        .fold(T::zero(), |acc, e| if e > acc { e } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn construction_is_validated() {
        assert_eq!(
            JacobiMatrix::new(ints(&[1]), vec![], vec![]),
            Err(Error::MatrixTooSmall(1))
        );
        assert!(matches!(
            JacobiMatrix::new(ints(&[1, 2]), ints(&[1]), vec![]),
            Err(Error::LengthMismatch { field: "gamma", .. })
        ));
        assert_eq!(
            JacobiMatrix::new(ints(&[1, 2, 1]), ints(&[1, 1]), ints(&[1, 1])),
            Err(Error::DuplicateDiagonal { first: 1, second: 3 })
        );
    }

    #[test]
    fn relabel_two_by_two() {
        let m = JacobiMatrix::new(ints(&[0, 1]), vec![rat(1, 10)], vec![rat(1, 5)]).unwrap();
        let cfg = relabel(&m, 1).unwrap();
        assert_eq!((cfg.r, cfg.rt), (1, 0));
        assert_eq!(cfg.a, ints(&[0, 1]));
        assert_eq!(cfg.b, vec![rat(1, 10)]);
        assert_eq!(cfg.c, vec![rat(1, 5)]);
        assert_eq!(cfg.shift, int(0));
        assert_eq!(relabel(&m, 3), Err(Error::BadIndex { k: 3, d: 2 }));
        assert_eq!(relabel(&m, 0), Err(Error::BadIndex { k: 0, d: 2 }));
    }

    #[test]
    fn relabel_middle_branch() {
        let m = JacobiMatrix::new(ints(&[5, 2, 9]), ints(&[1, 3]), ints(&[7, 11])).unwrap();
        let cfg = relabel(&m, 2).unwrap();
        assert_eq!((cfg.r, cfg.rt), (1, 1));
        assert_eq!(cfg.a, ints(&[0, 7]));
        assert_eq!(cfg.at, ints(&[0, 3]));
        assert_eq!(cfg.shift, int(2));
        assert_eq!(cfg.b, ints(&[3]));
        assert_eq!(cfg.c, ints(&[11]));
        assert_eq!(cfg.bt, ints(&[1]));
        assert_eq!(cfg.ct, ints(&[7]));
        let (diag, sup, sub) = cfg.recentred();
        assert_eq!(diag, ints(&[3, 0, 7]));
        assert_eq!(sup, ints(&[1, 3]));
        assert_eq!(sub, ints(&[7, 11]));
    }

    #[test]
    fn expansion_variables_corner_d3() {
        let m = JacobiMatrix::new(ints(&[0, 2, 5]), ints(&[1, 3]), ints(&[2, 4])).unwrap();
        let pt = expansion_variables(&relabel(&m, 1).unwrap());
        assert_eq!(pt.group(Group::X), &[rat(2, 4), rat(2, 10)]);
        assert_eq!(pt.group(Group::Z), &[rat(12, 10)]);
        assert!(pt.group(Group::Y).is_empty() && pt.group(Group::Xt).is_empty());
    }

    #[test]
    fn expansion_variables_middle_d3_satisfy_dependency() {
        let m = JacobiMatrix::new(
            ints(&[-3, 0, 4]),
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(2, 5), rat(-1, 7)],
        )
        .unwrap();
        let cfg = relabel(&m, 2).unwrap();
        let pt = expansion_variables(&cfg);
        let bc = rat(1, 3) * rat(-1, 7);
        let bct = rat(1, 2) * rat(2, 5);
        assert_eq!(pt.group(Group::X), &[bc.clone() / int(16)]);
        assert_eq!(pt.group(Group::Y), &[bct.clone() / int(-12)]);
        assert_eq!(pt.group(Group::Xt), &[bct / int(9)]);
        assert_eq!(pt.group(Group::Yt), &[bc / int(-12)]);
        assert!(dependency_defect(&pt).is_zero());
    }

    #[test]
    fn zero_off_diagonal_gives_zero_point() {
        let m = JacobiMatrix::new(ints(&[1, 2, 3, 4]), ints(&[0, 0, 0]), ints(&[0, 0, 0])).unwrap();
        for k in 1..=4 {
            let pt = expansion_variables(&relabel(&m, k).unwrap());
            assert!(pt.values().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn rotation_is_an_involution_and_preserves_trace() {
        let m = JacobiMatrix::new(ints(&[1, 2, 3]), ints(&[4, 5]), ints(&[6, 7])).unwrap();
        let r = m.rotated();
        assert_eq!(r.alpha(), &ints(&[3, 2, 1])[..]);
        assert_eq!(r.beta(), &ints(&[7, 6])[..]);
        assert_eq!(r.gamma(), &ints(&[5, 4])[..]);
        assert_eq!(r.rotated(), m);
        assert_eq!(r.trace(), m.trace());
    }

    #[test]
    fn assemble_rejects_wrong_caps() {
        let m = JacobiMatrix::new(ints(&[0, 1]), vec![rat(1, 10)], vec![rat(1, 10)]).unwrap();
        let cfg = relabel(&m, 1).unwrap();
        let pt = expansion_variables(&cfg);
        let u = vec![TruncatedSeries::one(1, 2)];
        assert_eq!(
            assemble_eigenpair(&cfg, &u, &[], &pt, 3),
            Err(Error::DegreeMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn unperturbed_eigenpair_is_the_unit_vector() {
        let m = JacobiMatrix::new(ints(&[4, 1, 2]), ints(&[0, 0]), ints(&[0, 0])).unwrap();
        let cfg = relabel(&m, 2).unwrap();
        let pt = expansion_variables(&cfg);
        let one = |n| TruncatedSeries::one(cfg.layout().dim(), n);
        let res = assemble_eigenpair(&cfg, &[one(2)], &[one(2)], &pt, 2).unwrap();
        assert_eq!(res.eigenvalue, int(1));
        assert_eq!(res.vector(), vec![int(0), int(1), int(0)]);
        assert_eq!(res.residual, 0.0);
    }
}
