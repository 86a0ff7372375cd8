//! Exact combinatorial kernels and multi-index bookkeeping.
//!
//! Binomial, trinomial and quadrinomial coefficients with an arbitrary integer
//! upper argument are the coefficients of `(1 + x)^a`, `(1 + x + y)^a` and
//! `(1 + x + y + z)^a`. They are evaluated through falling factorials and
//! vanish whenever a lower index is negative.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::layout::{Group, Layout};

/// `C(a; lower...)`: coefficient of `x1^l1 x2^l2 ...` in `(1 + x1 + x2 + ...)^a`.
pub fn multinomial(a: i64, lower: &[i64]) -> BigInt {
    if lower.iter().any(|&l| l < 0) {
        return BigInt::zero();
    }
    if let Some(v) = multinomial_small(a, lower) {
        return BigInt::from(v);
    }
    let mut acc = BigInt::one();
    let mut top = a;
    for &l in lower {
        acc *= binom_big(top, l);
        if acc.is_zero() {
            return acc;
        }
        top -= l;
    }
    acc
}

/// i128 fast path; `None` on overflow.
fn multinomial_small(a: i64, lower: &[i64]) -> Option<i128> {
    let mut acc: i128 = 1;
    let mut top = a as i128;
    for &l in lower {
        let mut c: i128 = 1;
        for i in 0..l as i128 {
            c = c.checked_mul(top - i)? / (i + 1);
            if c == 0 {
                return Some(0);
            }
        }
        acc = acc.checked_mul(c)?;
        top -= l as i128;
    }
    Some(acc)
}

fn binom_big(a: i64, m: i64) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..m {
        c = c * BigInt::from(a - i) / BigInt::from(i + 1);
        if c.is_zero() {
            break;
        }
    }
    c
}

pub fn binom(a: i64, m: i64) -> BigInt {
    multinomial(a, &[m])
}

pub fn trinom(a: i64, m: i64, n: i64) -> BigInt {
    multinomial(a, &[m, n])
}

pub fn quadrinom(a: i64, m: i64, n: i64, p: i64) -> BigInt {
    multinomial(a, &[m, n, p])
}

/// Rising factorial `a (a + 1) ... (a + m - 1)`.
pub fn pochhammer(a: i64, m: u32) -> BigInt {
    (0..m as i64).fold(BigInt::one(), |acc, i| acc * BigInt::from(a + i))
}

pub fn factorial(n: u32) -> BigInt {
    pochhammer(1, n)
}

/// Step function: 0 if `i <= j`, 1 if `i > j`.
pub fn sigma(i: i64, j: i64) -> i64 {
    (i > j) as i64
}

pub fn delta(i: i64, j: i64) -> i64 {
    (i == j) as i64
}

/// Exponent vector over the expansion variables, split into its six groups.
///
/// `m, n, p` are the exponents of `x, y, z`; `mt, nt, pt` of the tilded
/// groups. Absent groups are empty vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    pub m: Vec<i64>,
    pub n: Vec<i64>,
    pub p: Vec<i64>,
    pub mt: Vec<i64>,
    pub nt: Vec<i64>,
    pub pt: Vec<i64>,
}

impl MultiIndex {
    pub fn zero(layout: &Layout) -> Self {
        MultiIndex {
            m: vec![0; layout.len(Group::X)],
            n: vec![0; layout.len(Group::Y)],
            p: vec![0; layout.len(Group::Z)],
            mt: vec![0; layout.len(Group::Xt)],
            nt: vec![0; layout.len(Group::Yt)],
            pt: vec![0; layout.len(Group::Zt)],
        }
    }

    pub fn from_flat(layout: &Layout, flat: &[i32]) -> Result<Self> {
        if flat.len() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                found: flat.len(),
            });
        }
        let take = |g: Group| -> Vec<i64> {
            let off = layout.offset(g);
            flat[off..off + layout.len(g)].iter().map(|&e| e as i64).collect()
        };
        Ok(MultiIndex {
            m: take(Group::X),
            n: take(Group::Y),
            p: take(Group::Z),
            mt: take(Group::Xt),
            nt: take(Group::Yt),
            pt: take(Group::Zt),
        })
    }

    pub fn to_flat(&self) -> Vec<i32> {
        [&self.m, &self.n, &self.p, &self.mt, &self.nt, &self.pt]
            .into_iter()
            .flat_map(|g| g.iter().map(|&e| e as i32))
            .collect()
    }

    pub fn group(&self, g: Group) -> &[i64] {
        match g {
            Group::X => &self.m,
            Group::Y => &self.n,
            Group::Z => &self.p,
            Group::Xt => &self.mt,
            Group::Yt => &self.nt,
            Group::Zt => &self.pt,
        }
    }

    pub fn group_mut(&mut self, g: Group) -> &mut Vec<i64> {
        match g {
            Group::X => &mut self.m,
            Group::Y => &mut self.n,
            Group::Z => &mut self.p,
            Group::Xt => &mut self.mt,
            Group::Yt => &mut self.nt,
            Group::Zt => &mut self.pt,
        }
    }

    pub fn total_degree(&self) -> i64 {
        Group::ALL.iter().map(|&g| self.group(g).iter().sum::<i64>()).sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        Group::ALL.iter().all(|&g| self.group(g).iter().all(|&e| e >= 0))
    }

    /// `p_j` for `j` in `-1..=r-1`: `p_{-1} = |m| + |nt|`, `p_{r-1} = 0`.
    pub fn p_at(&self, j: i64) -> i64 {
        side_p(&self.m, &self.nt, &self.p, j)
    }

    /// Tilded counterpart of [`MultiIndex::p_at`]: `pt_{-1} = |mt| + |n|`.
    pub fn pt_at(&self, j: i64) -> i64 {
        side_p(&self.mt, &self.n, &self.pt, j)
    }

    /// Same index seen from the mirrored problem.
    pub fn mirrored(&self) -> MultiIndex {
        MultiIndex {
            m: self.mt.clone(),
            n: self.nt.clone(),
            p: self.pt.clone(),
            mt: self.m.clone(),
            nt: self.n.clone(),
            pt: self.p.clone(),
        }
    }
}

fn side_p(m: &[i64], cross_n: &[i64], p: &[i64], j: i64) -> i64 {
    if j == -1 {
        m.iter().sum::<i64>() + cross_n.iter().sum::<i64>()
    } else {
        p.get(j as usize).copied().unwrap_or(0)
    }
}

/// All exponent vectors of length `nvars` with entries `>= 0` and total
/// degree `<= max_degree`, in lexicographic order.
pub fn exponents_up_to(nvars: usize, max_degree: u32) -> Vec<Vec<i32>> {
    let mut out = Vec::new();
    let mut cur = vec![0i32; nvars];
    fill(&mut cur, 0, max_degree as i32, &mut out);
    out
}

fn fill(cur: &mut Vec<i32>, pos: usize, budget: i32, out: &mut Vec<Vec<i32>>) {
    if pos == cur.len() {
        out.push(cur.clone());
        return;
    }
    for e in 0..=budget {
        cur[pos] = e;
        fill(cur, pos + 1, budget - e, out);
    }
    cur[pos] = 0;
}
