//! Chains with real coefficients, the boundary operator and the pairing with
//! cochains.

use std::collections::BTreeMap;

use crate::calculus::star_sign;
use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::lattice::{EdgeSet, Lattice, MultiIndex};
use crate::matrix::Matrix2C;

/// A basis cell `s_k^(r)` (or its double `s̃_k^(r)`), `r = |edges|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisElement {
    pub k: MultiIndex,
    pub edges: EdgeSet,
    pub tilde: bool,
}

impl BasisElement {
    pub fn degree(&self) -> usize {
        self.edges.len()
    }
}

/// A finite real-linear combination of basis cells of one lattice.
///
/// Chains built through [`Chain::add`] live on the primary complex; chains
/// on the double only arise as images of [`Chain::star`].
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    lattice: Lattice,
    terms: BTreeMap<BasisElement, f64>,
}

impl Chain {
    pub fn new(lattice: &Lattice) -> Self {
        Self { lattice: lattice.clone(), terms: BTreeMap::new() }
    }

    /// The single cell `s_k` with edge set `edges` and coefficient 1.
    pub fn basis(lattice: &Lattice, k: &MultiIndex, edges: EdgeSet) -> Result<Self> {
        let mut c = Self::new(lattice);
        c.add(k, edges, 1.0)?;
        Ok(c)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Adds `coeff · s_k`. `k` is wrapped on periodic axes; the cell must lie
    /// inside the lattice.
    pub fn add(&mut self, k: &MultiIndex, edges: EdgeSet, coeff: f64) -> Result<()> {
        self.add_element(k, edges, false, coeff)
    }

    fn add_element(&mut self, k: &MultiIndex, edges: EdgeSet, tilde: bool, coeff: f64) -> Result<()> {
        let lattice = &self.lattice;
        if k.dim() != lattice.dim() || !edges.is_subset(EdgeSet::full(lattice.dim())) {
            return Err(Error::LatticeMismatch);
        }
        let k = lattice.normalize(k);
        if !lattice.site_index(&k).is_some_and(|s| lattice.cell_exists(s, edges)) {
            return Err(Error::InvalidEntry { site: k.to_string(), edges: edges.to_string() });
        }
        let key = BasisElement { k, edges, tilde };
        let entry = self.terms.entry(key.clone()).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(&key);
        }
        Ok(())
    }

    /// `self += alpha · other`.
    pub fn add_scaled(&mut self, other: &Chain, alpha: f64) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        for (e, &c) in &other.terms {
            self.add_element(&e.k, e.edges, e.tilde, alpha * c)?;
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisElement, f64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, element: &BasisElement) -> f64 {
        self.terms.get(element).copied().unwrap_or(0.0)
    }

    /// The boundary `∂`, extended to products by the graded rule
    /// `∂(a ⊗ b) = ∂a ⊗ b + (-1)^deg(a) a ⊗ ∂b`. For a cell with edges
    /// `j_1 < ... < j_r` this is
    /// `Σ_m (-1)^(m-1) (s_{τ_{j_m} k, J∖j_m} - s_{k, J∖j_m})`.
    pub fn boundary(&self) -> Chain {
        let mut out = Chain::new(&self.lattice);
        for (e, c) in self.terms() {
            for (m, axis) in e.edges.axes().enumerate() {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let face = e.edges.remove(axis);
                let shifted = self.lattice.shift(&e.k, axis);
                out.add_element(&shifted, face, e.tilde, sign * c).expect("faces of an existing cell exist");
                out.add_element(&e.k, face, e.tilde, -sign * c).expect("faces of an existing cell exist");
            }
        }
        out
    }

    /// The star on chains: `s_k^J ↦ ε(J) s̃_k^{Jᶜ}` and back. Cells whose
    /// image leaves a free lattice are dropped.
    pub fn star(&self) -> Chain {
        let n = self.lattice.dim();
        let mut out = Chain::new(&self.lattice);
        for (e, c) in self.terms() {
            let image = e.edges.complement(n);
            let _ = out.add_element(&e.k, image, !e.tilde, star_sign(e.edges, n) * c);
        }
        out
    }
}

/// `⟨c, φ⟩ = Σ coeff · φ(k, J)` over the terms of `c` that match `φ` in
/// degree and tilde flag; other terms pair to zero.
pub fn pairing(c: &Chain, phi: &Cochain) -> Result<Matrix2C> {
    if c.lattice() != phi.lattice() {
        return Err(Error::LatticeMismatch);
    }
    let lattice = c.lattice();
    let mut acc = Matrix2C::zero();
    for (e, coeff) in c.terms() {
        if e.tilde != phi.is_tilde() || e.degree() != phi.degree() {
            continue;
        }
        let site = lattice.site_index(&e.k).expect("chain cells are in range");
        let value = phi
            .get(site, e.edges)
            .ok_or_else(|| Error::InvalidEntry { site: e.k.to_string(), edges: e.edges.to_string() })?;
        acc += value * coeff;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{FieldRng, Sampling};

    fn k(v: &[i64]) -> MultiIndex {
        MultiIndex::new(v)
    }

    #[test]
    fn boundary_of_one_dimensional_cells() {
        let l = Lattice::periodic(&[5]).unwrap();
        let point = Chain::basis(&l, &k(&[2]), EdgeSet::EMPTY).unwrap();
        assert!(point.boundary().is_empty());

        let edge = Chain::basis(&l, &k(&[2]), EdgeSet::singleton(0)).unwrap();
        let mut expected = Chain::new(&l);
        expected.add(&k(&[3]), EdgeSet::EMPTY, 1.0).unwrap();
        expected.add(&k(&[2]), EdgeSet::EMPTY, -1.0).unwrap();
        assert_eq!(edge.boundary(), expected);
    }

    #[test]
    fn boundary_of_square() {
        let l = Lattice::periodic(&[4, 4]).unwrap();
        let sq = Chain::basis(&l, &k(&[3, 0]), EdgeSet::from_axes(&[0, 1])).unwrap();
        let b = sq.boundary();
        // ∂ε_{12} = e^2_{τ1 k} - e^2_k - e^1_{τ2 k} + e^1_k
        let mut expected = Chain::new(&l);
        expected.add(&k(&[0, 0]), EdgeSet::singleton(1), 1.0).unwrap();
        expected.add(&k(&[3, 0]), EdgeSet::singleton(1), -1.0).unwrap();
        expected.add(&k(&[3, 1]), EdgeSet::singleton(0), -1.0).unwrap();
        expected.add(&k(&[3, 0]), EdgeSet::singleton(0), 1.0).unwrap();
        assert_eq!(b, expected);
        assert!(b.boundary().is_empty());
    }

    #[test]
    fn boundary_squares_to_zero_on_random_chains() {
        let mut rng = FieldRng::new(21);
        for extents in [vec![3, 3], vec![3, 2, 3], vec![2, 3, 2, 2]] {
            for lattice in [Lattice::periodic(&extents).unwrap(), Lattice::free(&extents).unwrap()] {
                for r in 2..=extents.len() {
                    let c = rng.chain(&lattice, r, 6, 5);
                    assert!(c.boundary().boundary().is_empty(), "{lattice} r={r}");
                }
            }
        }
    }

    #[test]
    fn free_lattice_rejects_outside_cells() {
        let l = Lattice::free(&[3, 3]).unwrap();
        let mut c = Chain::new(&l);
        assert!(c.add(&k(&[2, 0]), EdgeSet::singleton(0), 1.0).is_err());
        assert!(c.add(&k(&[1, 0]), EdgeSet::singleton(0), 1.0).is_ok());
        assert!(c.add(&k(&[3, 0]), EdgeSet::EMPTY, 1.0).is_err());
    }

    #[test]
    fn cancelling_terms_are_dropped() {
        let l = Lattice::periodic(&[3, 3]).unwrap();
        let mut c = Chain::basis(&l, &k(&[1, 1]), EdgeSet::singleton(1)).unwrap();
        c.add(&k(&[4, 1]), EdgeSet::singleton(1), -1.0).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn pairing_selects_matching_cells() {
        let l = Lattice::periodic(&[3, 3]).unwrap();
        let a = Matrix2C::from_real([[1.0, 2.0], [3.0, 4.0]]);
        let site = l.site_index(&k(&[1, 2])).unwrap();
        let set = EdgeSet::singleton(0);
        let phi = Cochain::from_fn(&l, 1, false, |s, e| if s == site && e == set { a } else { Matrix2C::zero() })
            .unwrap();
        let same = Chain::basis(&l, &k(&[1, 2]), set).unwrap();
        let other = Chain::basis(&l, &k(&[1, 2]), EdgeSet::singleton(1)).unwrap();
        assert_eq!(pairing(&same, &phi).unwrap(), a);
        assert_eq!(pairing(&other, &phi).unwrap(), Matrix2C::zero());
        let vertex = Chain::basis(&l, &k(&[1, 2]), EdgeSet::EMPTY).unwrap();
        assert_eq!(pairing(&vertex, &phi).unwrap(), Matrix2C::zero());
        // tilde chains only see tilde forms
        assert_eq!(pairing(&same.star(), &phi).unwrap(), Matrix2C::zero());
    }

    #[test]
    fn pairing_is_linear_in_the_chain() {
        let l = Lattice::periodic(&[3, 3, 3]).unwrap();
        let mut rng = FieldRng::new(4);
        let phi = rng.cochain(&l, 1, false, Sampling::Uniform(1.0));
        let e = Chain::basis(&l, &k(&[0, 1, 2]), EdgeSet::singleton(0)).unwrap();
        let mut twice = Chain::new(&l);
        twice.add_scaled(&e, 2.0).unwrap();
        let value = phi.get(l.site_index(&k(&[0, 1, 2])).unwrap(), EdgeSet::singleton(0)).unwrap();
        assert_eq!(pairing(&twice, &phi).unwrap(), value * 2.0);

        for _ in 0..20 {
            let c1 = rng.chain(&l, 1, 5, 4);
            let c2 = rng.chain(&l, 1, 5, 4);
            let alpha = rng.real(Sampling::Uniform(2.0));
            let mut combo = c2.clone();
            combo.add_scaled(&c1, alpha).unwrap();
            let lhs = pairing(&combo, &phi).unwrap();
            let rhs = pairing(&c1, &phi).unwrap() * alpha + pairing(&c2, &phi).unwrap();
            assert!((lhs - rhs).max_abs() <= 1e-13);
        }
    }

    #[test]
    fn chain_star_pairs_with_cochain_star() {
        // ⟨★c, ★φ⟩ = ⟨c, φ⟩ since both stars carry the same sign
        let l = Lattice::periodic(&[2, 3, 2]).unwrap();
        let mut rng = FieldRng::new(17);
        for r in 0..=3 {
            let phi = rng.cochain(&l, r, false, Sampling::Integer(3));
            let c = rng.chain(&l, r, 4, 3);
            let lhs = pairing(&c.star(), &crate::calculus::star(&phi)).unwrap();
            assert_eq!(lhs, pairing(&c, &phi).unwrap());
        }
    }
}
