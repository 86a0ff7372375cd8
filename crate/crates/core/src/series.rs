//! Sparse truncated multivariate series with exact rational coefficients.
//!
//! A [`TruncatedSeries`] stores the nonzero coefficients of every monomial of
//! total degree at most `cap`. Exponents are bounded below by `floor` in each
//! variable; `floor = 0` (the default) is an ordinary power series, a negative
//! floor admits Laurent monomials.
//!
//! Canonical text form, one term per line after a header, terms in
//! lexicographic exponent order:
//!
//! ```text
//! series nvars=2 cap=2 floor=0
//! 1/1 * x0^0 x1^0
//! -1/1 * x0^1 x1^0
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    nvars: usize,
    cap: i32,
    floor: i32,
    terms: BTreeMap<Vec<i32>, Rational>,
}

fn degree(e: &[i32]) -> i32 {
    e.iter().sum()
}

impl TruncatedSeries {
    pub fn zero(nvars: usize, cap: u32) -> Self {
        TruncatedSeries {
            nvars,
            cap: cap as i32,
            floor: 0,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational, cap: u32) -> Self {
        let mut s = Self::zero(nvars, cap);
        s.insert(vec![0; nvars], c);
        s
    }

    pub fn one(nvars: usize, cap: u32) -> Self {
        Self::constant(nvars, Rational::one(), cap)
    }

    /// The series `xi_idx`.
    pub fn variable(nvars: usize, idx: usize, cap: u32) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        let mut s = Self::zero(nvars, cap);
        s.insert(e, Rational::one());
        s
    }

    /// Builds a series from raw terms; zero coefficients and terms above
    /// `cap` are dropped, repeated exponents are summed.
    pub fn from_terms<I>(nvars: usize, cap: i32, floor: i32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i32>, Rational)>,
    {
        let mut s = TruncatedSeries {
            nvars,
            cap,
            floor: floor.min(0),
            terms: BTreeMap::new(),
        };
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: e.len(),
                });
            }
            if e.iter().any(|&x| x < s.floor) {
                return Err(Error::NotPowerSeries);
            }
            s.accumulate(e, c);
        }
        Ok(s)
    }

    fn insert(&mut self, e: Vec<i32>, c: Rational) {
        if !c.is_zero() && degree(&e) <= self.cap {
            self.terms.insert(e, c);
        }
    }

    fn accumulate(&mut self, e: Vec<i32>, c: Rational) {
        if c.is_zero() || degree(&e) > self.cap {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cap(&self) -> i32 {
        self.cap
    }

    pub fn floor(&self) -> i32 {
        self.floor
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[i32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.nvars])
    }

    /// Lower bound on the total degree of any term.
    fn valuation_bound(&self) -> i32 {
        self.floor * self.nvars as i32
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    /// Drops everything above `cap` (never raises the cap).
    pub fn truncate(&self, cap: i32) -> Self {
        let cap = cap.min(self.cap);
        TruncatedSeries {
            nvars: self.nvars,
            cap,
            floor: self.floor,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| degree(e) <= cap)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = TruncatedSeries {
            nvars: self.nvars,
            cap: self.cap.min(other.cap),
            floor: self.floor.min(other.floor),
            terms: BTreeMap::new(),
        };
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            out.accumulate(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = TruncatedSeries {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect();
        }
        out
    }

    /// Cauchy product truncated at the largest degree both factors determine.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let cap = (self.cap + other.valuation_bound()).min(other.cap + self.valuation_bound());
        fn by_degree(s: &TruncatedSeries) -> Vec<(i32, &Vec<i32>, &Rational)> {
            let mut v: Vec<_> = s.terms.iter().map(|(e, c)| (degree(e), e, c)).collect();
            v.sort_by_key(|t| t.0);
            v
        }
        let a = by_degree(self);
        let b = by_degree(other);
        let mut acc: HashMap<Vec<i32>, Rational> = HashMap::new();
        let mut buf = vec![0; self.nvars];
        for &(da, ea, ca) in &a {
            for &(db, eb, cb) in &b {
                if da + db > cap {
                    break;
                }
                for i in 0..self.nvars {
                    buf[i] = ea[i] + eb[i];
                }
                let prod = ca * cb;
                match acc.get_mut(buf.as_slice()) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(buf.clone(), prod);
                    }
                }
            }
        }
        let mut out = TruncatedSeries {
            nvars: self.nvars,
            cap,
            floor: self.floor + other.floor,
            terms: BTreeMap::new(),
        };
        for (e, c) in acc {
            out.insert(e, c);
        }
        Ok(out)
    }

    /// Multiplies by the exact monomial `xi^e`; the cap moves up by `|e|`.
    pub fn shift(&self, e: &[i32]) -> Result<Self> {
        if e.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: e.len(),
            });
        }
        let lowest = e.iter().copied().min().unwrap_or(0);
        Ok(TruncatedSeries {
            nvars: self.nvars,
            cap: self.cap + degree(e),
            floor: (self.floor + lowest).min(0),
            terms: self
                .terms
                .iter()
                .map(|(x, c)| (x.iter().zip(e).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        })
    }

    /// Multiplies by `xi_idx`, keeping the current cap.
    pub fn mul_var(&self, idx: usize) -> Self {
        let mut out = TruncatedSeries {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        for (e, c) in &self.terms {
            if degree(e) < self.cap {
                let mut e = e.clone();
                e[idx] += 1;
                out.terms.insert(e, c.clone());
            }
        }
        out
    }

    /// `t` with `self * t = 1` up to the cap.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.terms.keys().any(|e| e.iter().any(|&x| x < 0)) {
            return Err(Error::NotPowerSeries);
        }
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = Rational::one() / &c0;
        // self = c0 (1 + e); 1/self = inv0 * (1 - e + e^2 - ...), by Horner
        let e = self.scale(&inv0).sub(&Self::one(self.nvars, self.cap as u32))?;
        let one = Self::one(self.nvars, self.cap.max(0) as u32);
        let mut t = one.clone();
        for _ in 0..self.cap.max(0) {
            t = one.sub(&e.mul(&t)?)?;
        }
        Ok(t.scale(&inv0))
    }

    /// Relabels variable `i` as `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: perm.len(),
            });
        }
        let mut out = TruncatedSeries {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        for (e, c) in &self.terms {
            let mut f = vec![0; self.nvars];
            for (i, &x) in e.iter().enumerate() {
                f[perm[i]] = x;
            }
            out.terms.insert(f, c.clone());
        }
        Ok(out)
    }

    pub fn eval<T: Scalar>(&self, point: &[T]) -> Result<T> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
            });
        }
        let mut powers: HashMap<(usize, i32), T> = HashMap::new();
        let mut total = T::zero();
        for (e, c) in &self.terms {
            let mut term = T::from_rational(c);
            for (i, &k) in e.iter().enumerate() {
                if k != 0 {
                    let p = powers.entry((i, k)).or_insert_with(|| point[i].powi(k));
                    term = term * p.clone();
                }
            }
            total = total + term;
        }
        Ok(total)
    }

    /// Exponent-wise difference of two series as a list of mismatching terms.
    pub fn diff_terms(&self, other: &Self) -> Vec<(Vec<i32>, Rational, Rational)> {
        let cap = self.cap.min(other.cap);
        let mut keys: Vec<&Vec<i32>> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter(|e| degree(e) <= cap)
            .filter_map(|e| {
                let a = self.coeff(e);
                let b = other.coeff(e);
                (a != b).then(|| (e.clone(), a, b))
            })
            .collect()
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "series nvars={} cap={} floor={}", self.nvars, self.cap, self.floor)?;
        for (e, c) in &self.terms {
            write!(f, "\n{}/{}", c.numer(), c.denom())?;
            if !e.is_empty() {
                write!(f, " *")?;
                for (i, x) in e.iter().enumerate() {
                    write!(f, " x{i}^{x}")?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for TruncatedSeries {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(msg.to_string());
        let mut lines = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| bad("empty input"))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("series") {
            return Err(bad("header must start with `series`"));
        }
        let mut nvars = None;
        let mut cap = None;
        let mut floor = 0;
        for kv in fields {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad(kv))?;
            let v: i64 = v.parse().map_err(|_| bad(kv))?;
            match k {
                "nvars" => nvars = Some(usize::try_from(v).map_err(|_| bad(kv))?),
                "cap" => cap = Some(v as i32),
                "floor" => floor = v as i32,
                _ => return Err(bad(kv)),
            }
        }
        let nvars = nvars.ok_or_else(|| bad("missing nvars"))?;
        let cap = cap.ok_or_else(|| bad("missing cap"))?;
        let mut terms = Vec::new();
        for line in lines {
            let (coeff, mono) = match line.split_once('*') {
                Some((c, m)) => (c.trim(), m.trim()),
                None => (line, ""),
            };
            let c = parse_rational(coeff).ok_or_else(|| bad(coeff))?;
            let mut e = vec![0; nvars];
            let mut seen = 0;
            for tok in mono.split_whitespace() {
                let (var, pow) = tok
                    .strip_prefix('x')
                    .and_then(|t| t.split_once('^'))
                    .ok_or_else(|| bad(tok))?;
                let i: usize = var.parse().map_err(|_| bad(tok))?;
                if i >= nvars {
                    return Err(bad(tok));
                }
                e[i] = pow.parse().map_err(|_| bad(tok))?;
                seen += 1;
            }
            if seen != nvars {
                return Err(bad(line));
            }
            terms.push((e, c));
        }
        TruncatedSeries::from_terms(nvars, cap, floor, terms)
    }
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use proptest::prelude::*;

    fn univariate(coeffs: &[i64], cap: u32) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            1,
            cap as i32,
            0,
            coeffs.iter().enumerate().map(|(i, &c)| (vec![i as i32], int(c))),
        )
        .unwrap()
    }

    #[test]
    fn addition_examples() {
        let a = univariate(&[1, 1], 4);
        let b = univariate(&[1, -1], 4);
        assert_eq!(a.add(&b).unwrap(), univariate(&[2], 4));
        let z = TruncatedSeries::zero(1, 4);
        assert_eq!(a.add(&z).unwrap(), a);
        let sq = univariate(&[0, 0, 1], 4);
        let r = sq.add(&sq.neg()).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn multiplication_examples() {
        let a = univariate(&[1, 1], 3);
        let b = univariate(&[1, -1], 3);
        assert_eq!(a.mul(&b).unwrap(), univariate(&[1, 0, -1], 3));
        let a1 = univariate(&[1, 1], 1);
        assert_eq!(a1.mul(&a1).unwrap(), univariate(&[1, 2], 1));
        let u = univariate(&[1, -1, 2, -5], 3);
        assert_eq!(u.mul(&u).unwrap(), univariate(&[1, -2, 5, -14], 3));
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let a = TruncatedSeries::one(2, 2);
        let b = TruncatedSeries::one(3, 2);
        assert!(matches!(a.add(&b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(a.mul(&b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(a.eval(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn evaluation_examples() {
        let s = univariate(&[1, -1, 2], 2);
        assert_eq!(s.eval(&[int(0)]).unwrap(), int(1));
        assert_eq!(s.eval(&[rat(1, 10)]).unwrap(), rat(23, 25));
        assert!((s.eval(&[0.1]).unwrap() - 0.92).abs() < 1e-15);
        let seven = TruncatedSeries::constant(3, int(7), 2);
        assert_eq!(seven.eval(&[int(5), rat(-2, 3), int(9)]).unwrap(), int(7));
    }

    #[test]
    fn reciprocal_examples() {
        let s = univariate(&[1, 1], 3);
        assert_eq!(s.reciprocal().unwrap(), univariate(&[1, -1, 1, -1], 3));
        assert_eq!(
            TruncatedSeries::one(2, 3).reciprocal().unwrap(),
            TruncatedSeries::one(2, 3)
        );
        let u = univariate(&[1, -1, 2], 2);
        assert_eq!(u.reciprocal().unwrap(), univariate(&[1, 1, -1], 2));
        let x = univariate(&[0, 1], 3);
        assert_eq!(x.reciprocal(), Err(Error::ZeroConstantTerm));
    }

    #[test]
    fn laurent_products_keep_determined_degrees() {
        // exact 1/x times (1 + x + x^2 + x^3 | cap 3): degrees up to 2 are determined
        let inv = TruncatedSeries::from_terms(1, 10, -1, [(vec![-1], int(1))]).unwrap();
        let geo = univariate(&[1, 1, 1, 1], 3);
        let p = inv.mul(&geo).unwrap();
        assert_eq!(p.cap(), 2);
        assert_eq!(p.coeff(&[-1]), int(1));
        assert_eq!(p.coeff(&[2]), int(1));
        let back = p.shift(&[1]).unwrap();
        assert_eq!(back.truncate(3), geo);
    }

    #[test]
    fn canonical_text_roundtrip() {
        let s = TruncatedSeries::from_terms(
            2,
            3,
            0,
            [(vec![0, 0], int(1)), (vec![1, 2], rat(-3, 7)), (vec![0, 1], int(2))],
        )
        .unwrap();
        let text = s.to_string();
        assert_eq!(
            text,
            "series nvars=2 cap=3 floor=0\n1/1 * x0^0 x1^0\n2/1 * x0^0 x1^1\n-3/7 * x0^1 x1^2"
        );
        assert_eq!(text.parse::<TruncatedSeries>().unwrap(), s);
        let scalar = TruncatedSeries::constant(0, rat(5, 2), 0);
        assert_eq!(scalar.to_string().parse::<TruncatedSeries>().unwrap(), scalar);
    }

    fn arb_series(nvars: usize, cap: u32) -> impl Strategy<Value = TruncatedSeries> {
        prop::collection::vec(
            (prop::collection::vec(0..=cap as i32, nvars), -4i64..=4, 1i64..=3),
            0..8,
        )
        .prop_map(move |raw| {
            TruncatedSeries::from_terms(nvars, cap as i32, 0, raw.into_iter().map(|(e, n, d)| (e, rat(n, d)))).unwrap()
        })
    }

    fn arb_triple() -> impl Strategy<Value = (TruncatedSeries, TruncatedSeries, TruncatedSeries)> {
        (1usize..=4, 0u32..=5).prop_flat_map(|(n, cap)| (arb_series(n, cap), arb_series(n, cap), arb_series(n, cap)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn ring_axioms_hold_up_to_truncation((a, b, c) in arb_triple()) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn reciprocal_is_inverse((a, _, _) in arb_triple(), c0 in 1i64..=5) {
            let s = a.add(&TruncatedSeries::constant(a.nvars(), int(c0), a.cap() as u32)).unwrap();
            prop_assume!(!s.constant_term().is_zero());
            let t = s.reciprocal().unwrap();
            prop_assert_eq!(s.mul(&t).unwrap(), TruncatedSeries::one(s.nvars(), s.cap() as u32));
        }

        #[test]
        fn eval_is_multiplicative((a, b, _) in arb_triple(), pt in prop::collection::vec((-3i64..=3, 1i64..=4), 4)) {
            // exact evaluation of a truncated product equals the product of
            // evaluations once both factors are polynomials of low enough degree
            let n = a.nvars();
            let point: Vec<Rational> = pt.into_iter().take(n).map(|(p, q)| rat(p, q)).collect();
            let cap = a.cap() as u32;
            let half = cap / 2;
            let a = a.truncate(half as i32);
            let b = b.truncate((cap - half) as i32);
            let lift = |s: &TruncatedSeries| {
                TruncatedSeries::from_terms(n, cap as i32, 0, s.terms().map(|(e, c)| (e.clone(), c.clone()))).unwrap()
            };
            let prod = lift(&a).mul(&lift(&b)).unwrap();
            prop_assert_eq!(prod.eval(&point).unwrap(), a.eval(&point).unwrap() * b.eval(&point).unwrap());
        }

        #[test]
        fn text_form_roundtrips((a, _, _) in arb_triple()) {
            prop_assert_eq!(a.to_string().parse::<TruncatedSeries>().unwrap(), a);
        }
    }
}
