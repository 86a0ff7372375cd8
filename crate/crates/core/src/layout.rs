//! Ordering of the expansion variables for a branch.
//!
//! For a branch with `r` entries below and `rt` entries above the selected
//! diagonal element the variables are laid out as six consecutive groups
//! `(x, y, z, xt, yt, zt)`. The same layout indexes the matching unknowns
//! `(s, t, w, st, tt, wt)` and maps `(f, g, h, ft, gt, ht)`.
//!
//! Group lengths: `x: r`, `y: r` (only when `rt >= 1`), `z: r - 1`, and the
//! tilded mirror images. A corner branch therefore has `2d - 3` variables and
//! every other branch `3d - 5`.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    X,
    Y,
    Z,
    Xt,
    Yt,
    Zt,
}

impl Group {
    pub const ALL: [Group; 6] = [Group::X, Group::Y, Group::Z, Group::Xt, Group::Yt, Group::Zt];

    pub fn name(self) -> &'static str {
        match self {
            Group::X => "x",
            Group::Y => "y",
            Group::Z => "z",
            Group::Xt => "xt",
            Group::Yt => "yt",
            Group::Zt => "zt",
        }
    }

    pub fn mirror(self) -> Group {
        match self {
            Group::X => Group::Xt,
            Group::Y => Group::Yt,
            Group::Z => Group::Zt,
            Group::Xt => Group::X,
            Group::Yt => Group::Y,
            Group::Zt => Group::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Layout {
    pub r: usize,
    pub rt: usize,
}

impl Layout {
    pub fn new(r: usize, rt: usize) -> Self {
        Layout { r, rt }
    }

    /// Layout for branch `k` (1-based) of a `d x d` matrix.
    pub fn for_branch(d: usize, k: usize) -> Self {
        Layout { r: d - k, rt: k - 1 }
    }

    pub fn d(&self) -> usize {
        self.r + self.rt + 1
    }

    pub fn is_corner(&self) -> bool {
        self.r == 0 || self.rt == 0
    }

    pub fn len(&self, g: Group) -> usize {
        match g {
            Group::X => self.r,
            Group::Y => {
                if self.rt > 0 {
                    self.r
                } else {
                    0
                }
            }
            Group::Z => self.r.saturating_sub(1),
            Group::Xt => self.rt,
            Group::Yt => {
                if self.r > 0 {
                    self.rt
                } else {
                    0
                }
            }
            Group::Zt => self.rt.saturating_sub(1),
        }
    }

    pub fn offset(&self, g: Group) -> usize {
        let mut off = 0;
        for h in Group::ALL {
            if h == g {
                return off;
            }
            off += self.len(h);
        }
        unreachable!()
    }

    pub fn dim(&self) -> usize {
        Group::ALL.iter().map(|&g| self.len(g)).sum()
    }

    /// Flat index of `g[i]`, or `None` when the slot does not exist.
    pub fn index(&self, g: Group, i: usize) -> Option<usize> {
        (i < self.len(g)).then(|| self.offset(g) + i)
    }

    /// Inverse of [`Layout::index`].
    pub fn locate(&self, flat: usize) -> (Group, usize) {
        let mut off = 0;
        for g in Group::ALL {
            let n = self.len(g);
            if flat < off + n {
                return (g, flat - off);
            }
            off += n;
        }
        panic!(
            "flat index {flat} out of range for layout with {} variables",
            self.dim()
        )
    }

    pub fn variable_names(&self) -> Vec<String> {
        (0..self.dim())
            .map(|i| {
                let (g, j) = self.locate(i);
                format!("{}_{}", g.name(), j)
            })
            .collect()
    }

    /// The layout seen from the mirrored (180° rotated) problem.
    pub fn mirrored(&self) -> Layout {
        Layout { r: self.rt, rt: self.r }
    }

    /// `perm[i]` is the flat index in [`Layout::mirrored`] of variable `i`.
    pub fn mirror_permutation(&self) -> Vec<usize> {
        let m = self.mirrored();
        (0..self.dim())
            .map(|i| {
                let (g, j) = self.locate(i);
                m.index(g.mirror(), j).expect("mirror layout has the same group sizes")
            })
            .collect()
    }

    /// Number of product terms in the Jacobian `S St - T Tt`.
    pub fn jacobian_term_count(&self) -> usize {
        self.r * self.rt + (self.r + 1) * (self.rt + 1)
    }
}

/// Values laid out by a [`Layout`], one slot per variable.
///
/// Serves both as a point `xi` of expansion variables and as a point `eta`
/// of Lagrange unknowns (`s, t, w` in the `x, y, z` slots).
#[derive(Debug, Clone, PartialEq)]
pub struct Grouped<T> {
    layout: Layout,
    values: Vec<T>,
}

impl<T: Clone> Grouped<T> {
    pub fn new(layout: Layout, values: Vec<T>) -> crate::error::Result<Self> {
        if values.len() != layout.dim() {
            return Err(crate::error::Error::DimensionMismatch {
                expected: layout.dim(),
                found: values.len(),
            });
        }
        Ok(Grouped { layout, values })
    }

    pub fn filled(layout: Layout, v: T) -> Self {
        Grouped {
            layout,
            values: vec![v; layout.dim()],
        }
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn group(&self, g: Group) -> &[T] {
        let off = self.layout.offset(g);
        &self.values[off..off + self.layout.len(g)]
    }

    pub fn group_mut(&mut self, g: Group) -> &mut [T] {
        let off = self.layout.offset(g);
        let len = self.layout.len(g);
        &mut self.values[off..off + len]
    }

    pub fn get(&self, g: Group, i: usize) -> Option<&T> {
        self.group(g).get(i)
    }

    /// `g[i]`, or `zero` for a slot the layout does not have.
    pub fn get_or(&self, g: Group, i: usize, zero: &T) -> T {
        self.get(g, i).unwrap_or(zero).clone()
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Grouped<U> {
        Grouped {
            layout: self.layout,
            values: self.values.iter().map(f).collect(),
        }
    }

    /// The same values seen from the mirrored layout.
    pub fn mirrored(&self) -> Grouped<T> {
        let perm = self.layout.mirror_permutation();
        let mut values = self.values.clone();
        for (i, &j) in perm.iter().enumerate() {
            values[j] = self.values[i].clone();
        }
        Grouped {
            layout: self.layout.mirrored(),
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_counts() {
        for d in 2..=8 {
            for k in 1..=d {
                let l = Layout::for_branch(d, k);
                let expected = if k == 1 || k == d { 2 * d - 3 } else { 3 * d - 5 };
                assert_eq!(l.dim(), expected, "d={d} k={k}");
                let dk = (2 * d * k + 2 * k) as i64 - (2 * k * k + d) as i64;
                assert_eq!(l.jacobian_term_count() as i64, dk);
            }
        }
        assert_eq!(Layout::for_branch(3, 2).jacobian_term_count(), 5);
    }

    #[test]
    fn locate_inverts_index() {
        let l = Layout::new(3, 2);
        for i in 0..l.dim() {
            let (g, j) = l.locate(i);
            assert_eq!(l.index(g, j), Some(i));
        }
        assert_eq!(
            l.variable_names(),
            ["x_0", "x_1", "x_2", "y_0", "y_1", "y_2", "z_0", "z_1", "xt_0", "xt_1", "yt_0", "yt_1", "zt_0"]
        );
    }

    #[test]
    fn grouped_mirror_swaps_groups() {
        let l = Layout::new(2, 1);
        let g = Grouped::new(l, (0..l.dim() as i32).collect()).unwrap();
        assert_eq!(g.group(Group::Z), &[4]);
        let m = g.mirrored();
        assert_eq!(m.group(Group::Xt), g.group(Group::X));
        assert_eq!(m.group(Group::Zt), g.group(Group::Z));
        assert_eq!(m.mirrored(), g);
        assert_eq!(g.get_or(Group::Zt, 0, &-1), -1);
    }

    #[test]
    fn mirror_permutation_is_an_involution() {
        let l = Layout::new(3, 1);
        let p = l.mirror_permutation();
        let q = l.mirrored().mirror_permutation();
        for i in 0..l.dim() {
            assert_eq!(q[p[i]], i);
        }
    }
}
