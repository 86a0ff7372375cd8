//! Fixed-point iteration of the quadratic system as formal series.
//!
//! ```text
//! u_i  = u_{i-1}  - x_{i-1} u_1 u_i   - y_{i-1} ut_1 u_i   + z_{i-1} u_{i+1}
//! ut_i = ut_{i-1} - xt_{i-1} ut_1 ut_i - yt_{i-1} u_1 ut_i + zt_{i-1} ut_{i+1}
//! ```
//!
//! with `u_0 = ut_0 = 1` and the `z` term absent for the last index. Starting
//! from all ones, each Gauss-Seidel sweep (ascending `u_i`, then ascending
//! `ut_i`) fixes at least one more total degree.

use crate::layout::{Group, Layout};
use crate::series::TruncatedSeries;

#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    pub layout: Layout,
    /// `u_1..u_r`.
    pub u: Vec<TruncatedSeries>,
    /// `ut_1..ut_rt`.
    pub ut: Vec<TruncatedSeries>,
    /// Largest degree below which the last sweep changed nothing.
    pub degree_converged: i32,
    pub sweeps: usize,
}

impl IterationState {
    pub fn initial(layout: Layout, cap: u32) -> Self {
        let one = TruncatedSeries::one(layout.dim(), cap);
        IterationState {
            layout,
            u: vec![one.clone(); layout.r],
            ut: vec![one; layout.rt],
            degree_converged: -1,
            sweeps: 0,
        }
    }

    fn retruncate(&mut self, cap: u32) {
        for s in self.u.iter_mut().chain(self.ut.iter_mut()) {
            *s = TruncatedSeries::from_terms(s.nvars(), cap as i32, 0, s.terms().map(|(e, c)| (e.clone(), c.clone())))
                .expect("same shape");
        }
    }
}

/// One update of side `own` (`u` or `ut`) given the current other side.
fn update_side(
    layout: &Layout,
    own: &mut [TruncatedSeries],
    other_first: Option<&TruncatedSeries>,
    groups: [Group; 3],
    cap: u32,
) {
    let nvars = layout.dim();
    let one = TruncatedSeries::one(nvars, cap);
    for i in 1..=own.len() {
        let prev = if i == 1 { one.clone() } else { own[i - 2].clone() };
        let cur = own[i - 1].clone();
        let first = own[0].clone();
        let mut rhs = prev;
        if let Some(x) = layout.index(groups[0], i - 1) {
            let t = first.mul(&cur).expect("same shape").mul_var(x);
            rhs = rhs.sub(&t).expect("same shape");
        }
        if let (Some(y), Some(o)) = (layout.index(groups[1], i - 1), other_first) {
            let t = o.mul(&cur).expect("same shape").mul_var(y);
            rhs = rhs.sub(&t).expect("same shape");
        }
        if let Some(z) = layout.index(groups[2], i - 1) {
            rhs = rhs.add(&own[i].mul_var(z)).expect("same shape");
        }
        own[i - 1] = rhs;
    }
}

/// One full Gauss-Seidel sweep at the given cap.
pub fn sweep(state: &IterationState, cap: u32) -> IterationState {
    let mut next = state.clone();
    next.retruncate(cap);
    let layout = next.layout;
    let ut_first = next.ut.first().cloned();
    update_side(
        &layout,
        &mut next.u,
        ut_first.as_ref(),
        [Group::X, Group::Y, Group::Z],
        cap,
    );
    let u_first = next.u.first().cloned();
    update_side(
        &layout,
        &mut next.ut,
        u_first.as_ref(),
        [Group::Xt, Group::Yt, Group::Zt],
        cap,
    );
    next.sweeps += 1;
    next.degree_converged = agreement_degree(state, &next, cap);
    next
}

/// Largest degree up to which two states agree on every coefficient.
fn agreement_degree(a: &IterationState, b: &IterationState, cap: u32) -> i32 {
    let mut lowest = cap as i32;
    for (x, y) in a.u.iter().zip(&b.u).chain(a.ut.iter().zip(&b.ut)) {
        for (e, _, _) in x.diff_terms(y) {
            lowest = lowest.min(e.iter().sum::<i32>() - 1);
        }
    }
    lowest
}

/// Series for every `u_i`, `ut_i` exact up to total degree `n`.
///
/// Sweep `j` runs at cap `j`, so the `j`-th sweep already works at the
/// precision it can fix; a final sweep at cap `n` confirms the fixed point.
pub fn iterate_system(layout: Layout, n: u32) -> IterationState {
    let mut state = IterationState::initial(layout, 0);
    state.degree_converged = 0;
    for cap in 1..=n {
        state = sweep(&state, cap);
    }
    state.retruncate(n);
    // the system is triangular in degree, so this terminates within n + 1 extra sweeps
    for _ in 0..=n + 1 {
        let next = sweep(&state, n);
        let done = next.degree_converged >= n as i32;
        state = next;
        if done {
            break;
        }
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn degree_zero_is_all_ones() {
        let l = Layout::new(2, 2);
        let st = iterate_system(l, 0);
        assert!(st
            .u
            .iter()
            .chain(&st.ut)
            .all(|s| *s == TruncatedSeries::one(l.dim(), 0)));
    }

    #[test]
    fn d2_catalan() {
        let st = iterate_system(Layout::new(1, 0), 3);
        let u = &st.u[0];
        let c: Vec<_> = (0..=3).map(|i| u.coeff(&[i])).collect();
        assert_eq!(c, vec![int(1), int(-1), int(2), int(-5)]);
        assert_eq!(st.degree_converged, 3);
    }

    #[test]
    fn d3_middle_first_order() {
        // layout (1,1): x, y, xt, yt
        let st = iterate_system(Layout::new(1, 1), 1);
        let expect = |a: usize, b: usize| {
            TruncatedSeries::from_terms(4, 1, 0, [(vec![0; 4], int(1)), (unit(a), int(-1)), (unit(b), int(-1))])
                .unwrap()
        };
        fn unit(i: usize) -> Vec<i32> {
            let mut e = vec![0; 4];
            e[i] = 1;
            e
        }
        assert_eq!(st.u[0], expect(0, 1));
        assert_eq!(st.ut[0], expect(2, 3));
    }

    #[test]
    fn extra_sweep_is_a_fixed_point() {
        for (r, rt) in [(2, 0), (1, 1), (2, 1), (3, 1)] {
            let l = Layout::new(r, rt);
            let st = iterate_system(l, 3);
            let again = sweep(&st, 3);
            assert_eq!(again.u, st.u);
            assert_eq!(again.ut, st.ut);
        }
    }
}
