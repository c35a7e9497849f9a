//! Dense matrix-valued cochains over a lattice.

use std::ops::{Add, Neg, Sub};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{EdgeSet, Lattice, MultiIndex};
use crate::matrix::Matrix2C;

const NO_SLOT: u16 = u16::MAX;

/// A discrete `r`-form with gl(2,C) coefficients, either on the primary
/// complex (`tilde == false`) or on its double.
///
/// Storage is dense: one matrix per site and per edge set of size `r`, in
/// the order of [`EdgeSet::all_of_size`]. Every entry carries a validity
/// flag. On periodic lattices all entries are valid; on free lattices an
/// entry is valid only when its cell lies inside the lattice and every input
/// it was computed from was valid. Invalid entries hold the zero matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    lattice: Lattice,
    degree: usize,
    tilde: bool,
    sets: Vec<EdgeSet>,
    slot: Vec<u16>,
    values: Vec<Matrix2C>,
    valid: Vec<bool>,
}

impl Cochain {
    fn layout(lattice: &Lattice, degree: usize) -> Result<(Vec<EdgeSet>, Vec<u16>)> {
        let n = lattice.dim();
        if degree > n {
            return Err(Error::DegreeOverflow { left: degree, right: 0, dim: n });
        }
        let sets = EdgeSet::all_of_size(n, degree);
        let mut slot = vec![NO_SLOT; 1 << n];
        for (pos, set) in sets.iter().enumerate() {
            slot[set.bits() as usize] = pos as u16;
        }
        Ok((sets, slot))
    }

    /// The zero form; entries are valid exactly where their cell exists.
    pub fn zeros(lattice: &Lattice, degree: usize, tilde: bool) -> Result<Self> {
        Self::from_fn(lattice, degree, tilde, |_, _| Matrix2C::zero())
    }

    /// Builds a form from a per-entry function of `(site, edge set)`.
    pub fn from_fn<F>(lattice: &Lattice, degree: usize, tilde: bool, f: F) -> Result<Self>
    where
        F: Fn(usize, EdgeSet) -> Matrix2C + Sync,
    {
        Self::try_from_fn(lattice, degree, tilde, |site, set| Some(f(site, set)))
    }

    /// Like [`Cochain::from_fn`], with `None` marking an entry as invalid.
    /// Entries whose cell does not exist are never evaluated.
    pub fn try_from_fn<F>(lattice: &Lattice, degree: usize, tilde: bool, f: F) -> Result<Self>
    where
        F: Fn(usize, EdgeSet) -> Option<Matrix2C> + Sync,
    {
        let (sets, slot) = Self::layout(lattice, degree)?;
        let width = sets.len();
        let mut values = vec![Matrix2C::zero(); lattice.num_sites() * width];
        let mut valid = vec![false; values.len()];
        values
            .par_chunks_mut(width)
            .zip(valid.par_chunks_mut(width))
            .enumerate()
            .for_each(|(site, (vals, flags))| {
                for (pos, &set) in sets.iter().enumerate() {
                    if !lattice.cell_exists(site, set) {
                        continue;
                    }
                    if let Some(m) = f(site, set) {
                        vals[pos] = m;
                        flags[pos] = true;
                    }
                }
            });
        Ok(Self { lattice: lattice.clone(), degree, tilde, sets, slot, values, valid })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_tilde(&self) -> bool {
        self.tilde
    }

    /// Edge sets of size `degree`, in storage order.
    pub fn edge_sets(&self) -> &[EdgeSet] {
        &self.sets
    }

    #[inline]
    fn index(&self, site: usize, set: EdgeSet) -> Option<usize> {
        let pos = *self.slot.get(set.bits() as usize)?;
        (pos != NO_SLOT && site < self.lattice.num_sites()).then(|| site * self.sets.len() + pos as usize)
    }

    /// The coefficient at `(site, set)`, or `None` if the entry is invalid or
    /// `set` has the wrong size.
    #[inline]
    pub fn get(&self, site: usize, set: EdgeSet) -> Option<Matrix2C> {
        let idx = self.index(site, set)?;
        self.valid[idx].then(|| self.values[idx])
    }

    pub fn get_at(&self, k: &MultiIndex, set: EdgeSet) -> Option<Matrix2C> {
        self.get(self.lattice.site_index(&self.lattice.normalize(k))?, set)
    }

    pub fn is_valid(&self, site: usize, set: EdgeSet) -> bool {
        self.index(site, set).is_some_and(|i| self.valid[i])
    }

    /// Overwrites one coefficient. The cell must exist.
    pub fn set(&mut self, site: usize, set: EdgeSet, value: Matrix2C) -> Result<()> {
        let idx = self.index(site, set).filter(|_| self.lattice.cell_exists(site, set)).ok_or_else(|| {
            Error::InvalidEntry { site: self.lattice.multi_index(site).to_string(), edges: set.to_string() }
        })?;
        self.values[idx] = value;
        self.valid[idx] = true;
        Ok(())
    }

    /// Valid entries as `(site, edge set, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, EdgeSet, Matrix2C)> + '_ {
        let width = self.sets.len();
        self.values
            .iter()
            .zip(&self.valid)
            .enumerate()
            .filter(|(_, (_, &ok))| ok)
            .map(move |(idx, (m, _))| (idx / width, self.sets[idx % width], *m))
    }

    pub fn num_valid(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// True when every existing cell carries a valid entry.
    pub fn is_complete(&self) -> bool {
        self.lattice
            .sites()
            .all(|site| self.sets.iter().all(|&set| !self.lattice.cell_exists(site, set) || self.is_valid(site, set)))
    }

    /// Same lattice, degree and tilde flag.
    pub fn same_shape(&self, other: &Self) -> bool {
        self.lattice == other.lattice && self.degree == other.degree && self.tilde == other.tilde
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        if self.tilde != other.tilde {
            return Err(Error::TildeMismatch);
        }
        Ok(())
    }

    /// Largest entrywise absolute difference over entries valid in both.
    /// Returns infinity when the shapes or the validity patterns differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if !self.same_shape(other) || self.valid != other.valid {
            return f64::INFINITY;
        }
        self.values.iter().zip(&other.values).map(|(a, b)| (*a - *b).max_abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(Matrix2C::max_abs).fold(0.0, f64::max)
    }

    /// `Σ ‖entry‖_F²` over valid entries, summed in storage order.
    pub fn sum_norm_sqr(&self) -> f64 {
        self.entries().map(|(_, _, m)| m.frobenius_norm_sqr()).sum()
    }

    /// Entrywise map; validity is preserved.
    pub fn map(&self, f: impl Fn(&Matrix2C) -> Matrix2C) -> Self {
        let values = self.values.iter().zip(&self.valid).map(|(m, &ok)| if ok { f(m) } else { *m }).collect();
        Self { values, ..self.clone() }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|m| *m * s)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Matrix2C, Matrix2C) -> Matrix2C) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        let mut out = self.clone();
        for i in 0..out.values.len() {
            let ok = self.valid[i] && other.valid[i];
            out.valid[i] = ok;
            out.values[i] = if ok { f(self.values[i], other.values[i]) } else { Matrix2C::zero() };
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Same components, opposite tilde flag.
    pub(crate) fn with_tilde(mut self, tilde: bool) -> Self {
        self.tilde = tilde;
        self
    }
}

impl Add for &Cochain {
    type Output = Cochain;
    /// Panics on incompatible operands; use [`Cochain::try_add`] to handle that case.
    fn add(self, rhs: Self) -> Cochain {
        self.try_add(rhs).expect("incompatible cochains")
    }
}

impl Sub for &Cochain {
    type Output = Cochain;
    fn sub(self, rhs: Self) -> Cochain {
        self.try_sub(rhs).expect("incompatible cochains")
    }
}

impl Neg for &Cochain {
    type Output = Cochain;
    fn neg(self) -> Cochain {
        self.map(|m| -*m)
    }
}
