//! Dense numeric eigensolver for (possibly nonsymmetric) tridiagonal matrices.
//!
//! Eigenvalues are the roots of the characteristic polynomial, evaluated by
//! the three-term recurrence
//! `p_i(l) = (alpha_i - l) p_{i-1}(l) - beta_{i-1} gamma_{i-1} p_{i-2}(l)`
//! and found simultaneously by Aberth iteration in complex arithmetic.
//! Eigenvectors come from inverse iteration with a pivoted tridiagonal solve.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::JacobiMatrix;
use crate::scalar::{rational_to_f64, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseEigenpair {
    pub value: f64,
    /// Normalised to unit infinity norm.
    pub vector: Vec<f64>,
    pub residual: f64,
}

struct Floats {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

impl Floats {
    fn of(m: &JacobiMatrix) -> Self {
        let f = |v: &[Rational]| v.iter().map(rational_to_f64).collect();
        Floats {
            alpha: f(m.alpha()),
            beta: f(m.beta()),
            gamma: f(m.gamma()),
        }
    }

    fn inf_norm(&self) -> f64 {
        let d = self.alpha.len();
        (0..d)
            .map(|i| {
                self.alpha[i].abs()
                    + if i > 0 { self.gamma[i - 1].abs() } else { 0.0 }
                    + if i + 1 < d { self.beta[i].abs() } else { 0.0 }
            })
            .fold(0.0, f64::max)
    }

    /// `p(l)` and `p'(l)` by the recurrence.
    fn char_poly(&self, l: Complex64) -> (Complex64, Complex64) {
        let (mut p0, mut p1) = (Complex64::one(), Complex64::new(self.alpha[0], 0.0) - l);
        let (mut d0, mut d1) = (Complex64::zero(), -Complex64::one());
        for i in 1..self.alpha.len() {
            let bc = self.beta[i - 1] * self.gamma[i - 1];
            let a = Complex64::new(self.alpha[i], 0.0) - l;
            let p2 = a * p1 - p0 * bc;
            let d2 = a * d1 - p1 - d0 * bc;
            (p0, p1, d0, d1) = (p1, p2, d1, d2);
        }
        (p1, d1)
    }

    fn residual(&self, l: f64, x: &[f64]) -> f64 {
        let d = self.alpha.len();
        (0..d)
            .map(|i| {
                let mut s = (self.alpha[i] - l) * x[i];
                if i > 0 {
                    s += self.gamma[i - 1] * x[i - 1];
                }
                if i + 1 < d {
                    s += self.beta[i] * x[i + 1];
                }
                s.abs()
            })
            .fold(0.0, f64::max)
    }
}

/// All roots of the characteristic polynomial, simultaneously.
fn aberth(f: &Floats, scale: f64) -> Result<Vec<Complex64>> {
    let d = f.alpha.len();
    let mut z: Vec<Complex64> = (0..d)
        .map(|i| {
            let theta = 0.4 + 2.0 * std::f64::consts::PI * i as f64 / d as f64;
            Complex64::new(f.alpha[i], 0.0) + Complex64::from_polar(1e-3 * scale, theta)
        })
        .collect();
    let mut biggest = f64::INFINITY;
    for _ in 0..500 {
        biggest = 0.0f64;
        for i in 0..d {
            let (p, dp) = f.char_poly(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| Complex64::one() / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::one() - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                biggest = biggest.max(step.norm());
            }
        }
        if biggest <= 1e-15 * scale {
            return Ok(z);
        }
    }
    // rounding can keep the last correction just above the threshold
    if biggest <= 1e-9 * scale {
        return Ok(z);
    }
    Err(Error::ConvergenceFailure("characteristic polynomial roots".into()))
}

/// Real Newton polish on the characteristic polynomial.
fn polish(f: &Floats, mut l: f64) -> f64 {
    for _ in 0..4 {
        let (p, dp) = f.char_poly(Complex64::new(l, 0.0));
        if dp.re == 0.0 || p.re == 0.0 {
            break;
        }
        let next = l - p.re / dp.re;
        if !next.is_finite() || (next - l).abs() > 1e-8 * (1.0 + l.abs()) {
            break;
        }
        l = next;
    }
    l
}

/// Solves `(M - l) x = rhs` by tridiagonal LU with row interchanges; a zero
/// pivot is replaced by `tiny`, as inverse iteration expects.
fn shifted_solve(f: &Floats, l: f64, rhs: &[f64], tiny: f64) -> Vec<f64> {
    let d = f.alpha.len();
    let mut dl = f.gamma.clone();
    let mut dg: Vec<f64> = f.alpha.iter().map(|a| a - l).collect();
    let mut du = f.beta.clone();
    let mut du2 = vec![0.0; d.saturating_sub(2)];
    let mut b = rhs.to_vec();
    for i in 0..d - 1 {
        if dg[i].abs() >= dl[i].abs() {
            if dg[i] == 0.0 {
                dg[i] = tiny;
            }
            let m = dl[i] / dg[i];
            dg[i + 1] -= m * du[i];
            b[i + 1] -= m * b[i];
        } else {
            let m = dg[i] / dl[i];
            dg[i] = dl[i];
            let old = dg[i + 1];
            dg[i + 1] = du[i] - m * old;
            if i + 2 < d {
                du2[i] = du[i + 1];
                du[i + 1] = -m * du2[i];
            }
            du[i] = old;
            b.swap(i, i + 1);
            b[i + 1] -= m * b[i];
        }
        dl[i] = 0.0;
    }
    if dg[d - 1] == 0.0 {
        dg[d - 1] = tiny;
    }
    let mut x = vec![0.0; d];
    for i in (0..d).rev() {
        let mut s = b[i];
        if i + 1 < d {
            s -= du[i] * x[i + 1];
        }
        if i + 2 < d {
            s -= du2[i] * x[i + 2];
        }
        x[i] = s / dg[i];
    }
    x
}

fn normalise(x: &mut [f64]) {
    let n = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if n > 0.0 && n.is_finite() {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

fn eigenvector(f: &Floats, l: f64, scale: f64) -> Vec<f64> {
    let d = f.alpha.len();
    let tiny = f64::EPSILON * scale;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for seed in 0..3 {
        let mut x: Vec<f64> = (0..d).map(|i| 1.0 + 0.1 * ((i * 7 + seed * 3) % 5) as f64).collect();
        for _ in 0..4 {
            x = shifted_solve(f, l, &x, tiny);
            if x.iter().any(|v| !v.is_finite()) {
                break;
            }
            normalise(&mut x);
        }
        if x.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let res = f.residual(l, &x);
        if best.as_ref().is_none_or(|(r, _)| res < *r) {
            best = Some((res, x));
        }
    }
    best.map(|(_, x)| x).unwrap_or_else(|| vec![f64::NAN; d])
}

/// All eigenpairs, eigenvalues ascending.
pub fn dense_eigensolve(m: &JacobiMatrix) -> Result<Vec<DenseEigenpair>> {
    let f = Floats::of(m);
    let norm = f.inf_norm();
    let scale = if norm > 0.0 { norm } else { 1.0 };
    let roots = aberth(&f, scale)?;
    let mut values = Vec::with_capacity(roots.len());
    for z in roots {
        if z.im.abs() > 1e-8 * scale {
            return Err(Error::ComplexSpectrum { re: z.re, im: z.im });
        }
        values.push(polish(&f, z.re));
    }
    values.sort_by(f64::total_cmp);
    let target = 1e-12 * scale;
    values
        .into_iter()
        .map(|l| {
            let vector = eigenvector(&f, l, scale);
            let residual = f.residual(l, &vector);
            if residual.is_nan() || residual > target {
                return Err(Error::ConvergenceFailure(format!(
                    "eigenvector for {l:e} has residual {residual:e} > {target:e}"
                )));
            }
            Ok(DenseEigenpair {
                value: l,
                vector,
                residual,
            })
        })
        .collect()
}

/// Eigenvalues by Sturm-sequence bisection; requires `beta_i gamma_i >= 0`
/// (the matrix is then similar to a symmetric one).
pub fn sturm_eigenvalues(m: &JacobiMatrix) -> Result<Vec<f64>> {
    let f = Floats::of(m);
    let d = f.alpha.len();
    let mut off2 = Vec::with_capacity(d - 1);
    for i in 0..d - 1 {
        let p = f.beta[i] * f.gamma[i];
        if p < 0.0 {
            return Err(Error::ConvergenceFailure(
                "Sturm bisection needs beta*gamma >= 0".into(),
            ));
        }
        off2.push(p);
    }
    // number of eigenvalues strictly below l
    let count = |l: f64| -> usize {
        let mut c = 0;
        let mut q = f.alpha[0] - l;
        for i in 0..d {
            if i > 0 {
                let prev = if q == 0.0 { f64::EPSILON } else { q };
                q = f.alpha[i] - l - off2[i - 1] / prev;
            }
            if q < 0.0 {
                c += 1;
            }
        }
        c
    };
    let radius = f.inf_norm() + 1.0;
    Ok((0..d)
        .map(|k| {
            let (mut lo, mut hi) = (-radius, radius);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if count(mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect())
}

/// Exact characteristic polynomial value and derivative at `l`.
fn char_poly_exact(m: &JacobiMatrix, l: &Rational) -> (Rational, Rational) {
    let a = m.alpha();
    let (mut p0, mut p1) = (Rational::one(), &a[0] - l);
    let (mut d0, mut d1) = (Rational::zero(), -Rational::one());
    for (i, alpha) in a.iter().enumerate().skip(1) {
        let bc = &m.beta()[i - 1] * &m.gamma()[i - 1];
        let ai = alpha - l;
        let p2 = &ai * &p1 - &p0 * &bc;
        let d2 = &ai * &d1 - &p1 - &d0 * &bc;
        (p0, p1, d0, d1) = (p1, p2, d1, d2);
    }
    (p1, d1)
}

fn round_to_bits(x: &Rational, bits: u32) -> Rational {
    let scale = Rational::from_integer(num_bigint::BigInt::one() << bits);
    (x * &scale).round() / scale
}

/// Refines a simple real root of the characteristic polynomial by exact
/// Newton steps, each iterate rounded to a multiple of `2^-bits`.
pub fn refine_eigenvalue(m: &JacobiMatrix, guess: f64, bits: u32) -> Result<Rational> {
    let mut l = Rational::from_float(guess).ok_or_else(|| Error::ConvergenceFailure("non-finite guess".into()))?;
    let tol = Rational::new(
        num_bigint::BigInt::one(),
        num_bigint::BigInt::one() << (bits.saturating_sub(4)),
    );
    for _ in 0..64 {
        let (p, dp) = char_poly_exact(m, &l);
        if p.is_zero() {
            return Ok(l);
        }
        if dp.is_zero() {
            return Err(Error::ConvergenceFailure("multiple root in exact refinement".into()));
        }
        let step = p / dp;
        l = round_to_bits(&(&l - &step), bits);
        if step.abs() < tol {
            return Ok(l);
        }
    }
    Err(Error::ConvergenceFailure("exact Newton refinement".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn matrix(alpha: &[i64], beta: &[Rational], gamma: &[Rational]) -> JacobiMatrix {
        JacobiMatrix::new(alpha.iter().map(|&a| int(a)).collect(), beta.to_vec(), gamma.to_vec()).unwrap()
    }

    #[test]
    fn diagonal_matrix() {
        let m = matrix(&[3, -1, 2], &[int(0), int(0)], &[int(0), int(0)]);
        let pairs = dense_eigensolve(&m).unwrap();
        let vals: Vec<f64> = pairs.iter().map(|p| p.value).collect();
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
        for (p, idx) in pairs.iter().zip([1, 2, 0]) {
            for (i, v) in p.vector.iter().enumerate() {
                let want = if i == idx { 1.0 } else { 0.0 };
                assert!((v.abs() - want).abs() < 1e-30, "{v}");
            }
        }
    }

    #[test]
    fn two_by_two_quadratic_formula() {
        let m = matrix(&[0, 1], &[rat(1, 10)], &[rat(1, 10)]);
        let pairs = dense_eigensolve(&m).unwrap();
        let s = 1.04f64.sqrt();
        assert!((pairs[0].value - (1.0 - s) / 2.0).abs() < 1e-15);
        assert!((pairs[1].value - (1.0 + s) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_agrees_with_sturm() {
        let b = [rat(1, 3), rat(-2, 5), rat(1, 7), rat(3, 4)];
        let m = matrix(&[4, 1, -2, 7, 0], &b, &b);
        let dense: Vec<f64> = dense_eigensolve(&m).unwrap().iter().map(|p| p.value).collect();
        let sturm = sturm_eigenvalues(&m).unwrap();
        for (a, b) in dense.iter().zip(&sturm) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn complex_spectrum_is_reported() {
        // [[0, 1], [-1, 0]] has eigenvalues +-i
        let m = JacobiMatrix::new(vec![int(0), rat(1, 1000)], vec![int(1)], vec![int(-1)]).unwrap();
        assert!(matches!(dense_eigensolve(&m), Err(Error::ComplexSpectrum { .. })));
    }

    #[test]
    fn exact_refinement_reaches_target_precision() {
        let m = matrix(&[0, 1], &[rat(1, 10)], &[rat(1, 10)]);
        let guess = dense_eigensolve(&m).unwrap()[0].value;
        let l = refine_eigenvalue(&m, guess, 256).unwrap();
        let (p, _) = char_poly_exact(&m, &l);
        // |p| ~ |p'| |err| with |p'| ~ 1
        assert!(p.abs() < Rational::new(1.into(), num_bigint::BigInt::one() << 250));
    }
}
