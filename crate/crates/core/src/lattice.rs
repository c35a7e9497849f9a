//! Finite cubical lattices, multi-indices, shift operators and edge sets.
//!
//! Axes are numbered from zero in the API. Sites are enumerated row-major
//! over `(k_0, ..., k_{n-1})`, so the last index varies fastest.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Free,
}

impl std::str::FromStr for Boundary {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Self::Periodic),
            "free" => Ok(Self::Free),
            other => Err(Error::InvalidLattice(format!("unknown boundary `{other}`"))),
        }
    }
}

/// A lattice multi-index `k = (k_0, ..., k_{n-1})`. Components may fall
/// outside the extents after a shift along a free axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<i64>);

impl MultiIndex {
    pub fn new(k: impl Into<Vec<i64>>) -> Self {
        Self(k.into())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A set of axes `J ⊆ {0, ..., n-1}`, the edge directions of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EdgeSet(u32);

impl EdgeSet {
    pub const EMPTY: Self = Self(0);

    pub fn from_axes(axes: &[usize]) -> Self {
        Self(axes.iter().fold(0, |m, &a| m | (1 << a)))
    }

    pub fn singleton(axis: usize) -> Self {
        Self(1 << axis)
    }

    pub fn full(n: usize) -> Self {
        Self(if n == 32 { u32::MAX } else { (1u32 << n) - 1 })
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, axis: usize) -> bool {
        self.0 & (1 << axis) != 0
    }

    pub fn insert(self, axis: usize) -> Self {
        Self(self.0 | (1 << axis))
    }

    pub fn remove(self, axis: usize) -> Self {
        Self(self.0 & !(1 << axis))
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Self(self.0 & other.0)
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Complement inside `{0, ..., n-1}`.
    pub fn complement(self, n: usize) -> Self {
        Self(!self.0 & Self::full(n).0)
    }

    /// Axes in ascending order.
    pub fn axes(self) -> impl Iterator<Item = usize> + Clone {
        let bits = self.0;
        (0..32).filter(move |a| bits & (1 << a) != 0)
    }

    /// Number of pairs `(a, b)` with `a` in `self`, `b` in `other`, `a > b`.
    /// This is the number of transpositions needed to move the axes of
    /// `other` in front of those of `self`.
    pub fn inversions_against(self, other: Self) -> usize {
        self.axes().map(|a| (other.0 & ((1u32 << a) - 1)).count_ones() as usize).sum()
    }

    /// All subsets of `{0, ..., n-1}` of size `r`, ordered lexicographically by
    /// their ascending axis lists. This is the storage order of cochains.
    pub fn all_of_size(n: usize, r: usize) -> Vec<EdgeSet> {
        let mut out = Vec::new();
        let mut axes: Vec<usize> = (0..r).collect();
        if r > n {
            return out;
        }
        loop {
            out.push(Self::from_axes(&axes));
            // advance to the next combination
            let mut i = r;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if axes[i] < n - r + i {
                    break;
                }
            }
            axes[i] += 1;
            for j in i + 1..r {
                axes[j] = axes[j - 1] + 1;
            }
        }
    }

    /// Label with one-based axis digits, e.g. `{0, 2}` → `"13"`.
    pub fn label(self) -> String {
        self.axes().map(|a| (a + 1).to_string()).collect()
    }
}

impl fmt::Display for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.axes().map(|a| a.to_string()).collect::<Vec<_>>().join(","))
    }
}

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 16;

/// Dimension, per-axis extents and per-axis boundary convention.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    extents: Vec<usize>,
    boundary: Vec<Boundary>,
    strides: Vec<usize>,
    num_sites: usize,
}

/// JSON form of a lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDescriptor {
    pub n: usize,
    pub extents: Vec<usize>,
    pub boundary: Vec<Boundary>,
}

impl Lattice {
    pub fn new(extents: Vec<usize>, boundary: Vec<Boundary>) -> Result<Self> {
        let n = extents.len();
        if n == 0 {
            return Err(Error::InvalidLattice("dimension must be at least 1".into()));
        }
        if n > MAX_DIM {
            return Err(Error::InvalidLattice(format!("dimension {n} exceeds {MAX_DIM}")));
        }
        if boundary.len() != n {
            return Err(Error::InvalidLattice(format!(
                "{} boundary flags for {n} axes",
                boundary.len()
            )));
        }
        for (axis, (&len, b)) in extents.iter().zip(&boundary).enumerate() {
            let min = if *b == Boundary::Periodic { 2 } else { 1 };
            if len < min {
                return Err(Error::InvalidLattice(format!(
                    "axis {axis}: extent {len} below minimum {min} for {b:?} boundary"
                )));
            }
        }
        let mut strides = vec![1; n];
        for axis in (0..n - 1).rev() {
            strides[axis] = strides[axis + 1] * extents[axis + 1];
        }
        let num_sites = extents.iter().product();
        Ok(Self { extents, boundary, strides, num_sites })
    }

    pub fn periodic(extents: &[usize]) -> Result<Self> {
        Self::new(extents.to_vec(), vec![Boundary::Periodic; extents.len()])
    }

    pub fn free(extents: &[usize]) -> Result<Self> {
        Self::new(extents.to_vec(), vec![Boundary::Free; extents.len()])
    }

    pub fn from_descriptor(d: &LatticeDescriptor) -> Result<Self> {
        if d.extents.len() != d.n {
            return Err(Error::InvalidLattice(format!(
                "n = {} but {} extents given",
                d.n,
                d.extents.len()
            )));
        }
        Self::new(d.extents.clone(), d.boundary.clone())
    }

    pub fn descriptor(&self) -> LatticeDescriptor {
        LatticeDescriptor { n: self.dim(), extents: self.extents.clone(), boundary: self.boundary.clone() }
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn boundary(&self) -> &[Boundary] {
        &self.boundary
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary.iter().all(|b| *b == Boundary::Periodic)
    }

    /// Whether every component lies in `0 ≤ k_i < N_i`.
    pub fn in_range(&self, k: &MultiIndex) -> bool {
        k.dim() == self.dim() && k.0.iter().zip(&self.extents).all(|(&c, &n)| c >= 0 && (c as usize) < n)
    }

    /// Wraps periodic components into range; free components are left alone.
    pub fn normalize(&self, k: &MultiIndex) -> MultiIndex {
        MultiIndex(
            k.0.iter()
                .zip(self.extents.iter().zip(&self.boundary))
                .map(|(&c, (&n, b))| match b {
                    Boundary::Periodic => c.rem_euclid(n as i64),
                    Boundary::Free => c,
                })
                .collect(),
        )
    }

    /// The shift `τ_i`: increments component `axis`, wrapping on periodic
    /// axes. On a free axis the result may leave the lattice; check it with
    /// [`Lattice::in_range`].
    pub fn shift(&self, k: &MultiIndex, axis: usize) -> MultiIndex {
        assert!(axis < self.dim(), "axis {axis} out of range for dimension {}", self.dim());
        let mut out = k.clone();
        out.0[axis] += 1;
        if self.boundary[axis] == Boundary::Periodic {
            out.0[axis] = out.0[axis].rem_euclid(self.extents[axis] as i64);
        }
        out
    }

    /// Linear site index of an in-range multi-index.
    pub fn site_index(&self, k: &MultiIndex) -> Option<usize> {
        if !self.in_range(k) {
            return None;
        }
        Some(k.0.iter().zip(&self.strides).map(|(&c, &s)| c as usize * s).sum())
    }

    pub fn multi_index(&self, site: usize) -> MultiIndex {
        MultiIndex(self.coords(site).into_iter().map(|c| c as i64).collect())
    }

    pub fn coords(&self, site: usize) -> Vec<usize> {
        self.strides.iter().zip(&self.extents).map(|(&s, &n)| (site / s) % n).collect()
    }

    #[inline]
    pub fn coord(&self, site: usize, axis: usize) -> usize {
        (site / self.strides[axis]) % self.extents[axis]
    }

    /// `τ_axis` on linear site indices; `None` when the shift leaves a free axis.
    #[inline]
    pub fn shift_site(&self, site: usize, axis: usize) -> Option<usize> {
        let c = self.coord(site, axis);
        let stride = self.strides[axis];
        if c + 1 < self.extents[axis] {
            Some(site + stride)
        } else {
            match self.boundary[axis] {
                Boundary::Periodic => Some(site - c * stride),
                Boundary::Free => None,
            }
        }
    }

    /// Applies `τ_a` for every axis `a` in `axes`.
    #[inline]
    pub fn shift_site_by(&self, site: usize, axes: EdgeSet) -> Option<usize> {
        axes.axes().try_fold(site, |s, a| self.shift_site(s, a))
    }

    /// Whether the cell at `site` spanned by `edges` lies inside the lattice:
    /// every edge of it must end on a lattice point. Always true on periodic
    /// axes.
    pub fn cell_exists(&self, site: usize, edges: EdgeSet) -> bool {
        edges.axes().all(|a| self.shift_site(site, a).is_some())
    }

    pub fn sites(&self) -> std::ops::Range<usize> {
        0..self.num_sites
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.extents.iter().map(usize::to_string).collect();
        write!(f, "{}", dims.join("x"))?;
        if !self.is_periodic() {
            let b: Vec<&str> = self
                .boundary
                .iter()
                .map(|b| if *b == Boundary::Periodic { "p" } else { "f" })
                .collect();
            write!(f, "[{}]", b.join(""))?;
        }
        Ok(())
    }
}
