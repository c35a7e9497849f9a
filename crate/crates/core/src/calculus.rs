//! Difference operator, coboundary, cup product, Hodge star and the tilde swap.
//!
//! Conventions, for an edge set `J = {j_1 < ... < j_r}`:
//!
//! * coboundary: `(d φ)(k, J) = Σ_m (-1)^(m-1) [φ(τ_{j_m} k, J∖j_m) - φ(k, J∖j_m)]`;
//! * cup: `(φ ∪ ψ)(k, J) = Σ_{J = J₁ ⊔ J₂, |J₁| = deg φ} ε(J₁, J₂) φ(k, J₁) ψ(τ_{J₁} k, J₂)`
//!   where `ε` is `-1` to the number of pairs `(a ∈ J₂, b ∈ J₁)` with `a < b`
//!   and `τ_{J₁}` shifts once along every axis of `J₁`;
//! * star: `(★φ)(k, Jᶜ) = ε(J) φ(k, J)`, `ε(J)` the parity of the shuffle
//!   placing `J` (ascending) before `Jᶜ` (ascending). The tilde flag flips.

use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::lattice::EdgeSet;
use crate::matrix::Matrix2C;

#[inline]
fn parity(count: usize) -> f64 {
    if count.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sign attached to the cup of basis forms with edge sets `left` and `right`.
pub fn cup_sign(left: EdgeSet, right: EdgeSet) -> f64 {
    parity(left.inversions_against(right))
}

/// Sign of the star on an `r`-cell with edge set `set` in dimension `n`.
pub fn star_sign(set: EdgeSet, n: usize) -> f64 {
    parity(set.inversions_against(set.complement(n)))
}

/// `Δ_axis φ = φ(τ_axis k) - φ(k)` for the component `set` at `site`.
pub fn delta(phi: &Cochain, axis: usize, site: usize, set: EdgeSet) -> Result<Matrix2C> {
    let lattice = phi.lattice();
    let shifted = lattice
        .shift_site(site, axis)
        .ok_or_else(|| Error::OutOfRange { site: lattice.multi_index(site).to_string(), axis })?;
    let entry = |s: usize| {
        phi.get(s, set).ok_or_else(|| Error::InvalidEntry {
            site: lattice.multi_index(s).to_string(),
            edges: set.to_string(),
        })
    };
    Ok(entry(shifted)? - entry(site)?)
}

/// The coboundary `d^c`, raising the degree by one.
pub fn coboundary(phi: &Cochain) -> Result<Cochain> {
    let lattice = phi.lattice();
    if phi.degree() >= lattice.dim() {
        return Err(Error::TopDegreeCoboundary);
    }
    Cochain::try_from_fn(lattice, phi.degree() + 1, phi.is_tilde(), |site, set| {
        let mut acc = Matrix2C::zero();
        for (m, axis) in set.axes().enumerate() {
            let face = set.remove(axis);
            let diff = phi.get(lattice.shift_site(site, axis)?, face)? - phi.get(site, face)?;
            if m % 2 == 0 {
                acc += diff;
            } else {
                acc -= diff;
            }
        }
        Some(acc)
    })
}

/// Cup product; coefficients multiply in the order `φ · ψ`.
pub fn cup(phi: &Cochain, psi: &Cochain) -> Result<Cochain> {
    phi.check_compatible(psi)?;
    let lattice = phi.lattice();
    let (r, p) = (phi.degree(), psi.degree());
    if r + p > lattice.dim() {
        return Err(Error::DegreeOverflow { left: r, right: p, dim: lattice.dim() });
    }
    let left_sets = phi.edge_sets();
    Cochain::try_from_fn(lattice, r + p, phi.is_tilde(), |site, set| {
        let mut acc = Matrix2C::zero();
        for &left in left_sets.iter().filter(|l| l.is_subset(set)) {
            let right = set.intersection(left.complement(lattice.dim()));
            let term = phi.get(site, left)? * psi.get(lattice.shift_site_by(site, left)?, right)?;
            if cup_sign(left, right) > 0.0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        Some(acc)
    })
}

/// The discrete Hodge star between the primary complex and its double.
pub fn star(phi: &Cochain) -> Cochain {
    let lattice = phi.lattice();
    let n = lattice.dim();
    Cochain::try_from_fn(lattice, n - phi.degree(), !phi.is_tilde(), |site, set| {
        let source = set.complement(n);
        let value = phi.get(site, source)?;
        Some(if star_sign(source, n) > 0.0 { value } else { -value })
    })
    .expect("degree n - r is always in range")
}

/// The swap `ι̃`: same components, tilde flag flipped.
pub fn tilde_swap(phi: &Cochain) -> Cochain {
    let tilde = !phi.is_tilde();
    phi.clone().with_tilde(tilde)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Lattice, MultiIndex};
    use crate::random::{FieldRng, Sampling};

    fn set(axes: &[usize]) -> EdgeSet {
        EdgeSet::from_axes(axes)
    }

    /// The basis form `a·s^k_J`, zero elsewhere.
    fn basis_form(l: &Lattice, k: &[i64], edges: &[usize], a: Matrix2C) -> Cochain {
        let site = l.site_index(&MultiIndex::new(k)).unwrap();
        let j = set(edges);
        Cochain::from_fn(l, edges.len(), false, |s, e| if s == site && e == j { a } else { Matrix2C::zero() }).unwrap()
    }

    #[test]
    fn delta_examples() {
        let l = Lattice::periodic(&[4, 3]).unwrap();
        let constant = Cochain::from_fn(&l, 0, false, |_, _| Matrix2C::identity() * 2.5).unwrap();
        for site in l.sites() {
            for axis in 0..2 {
                assert_eq!(delta(&constant, axis, site, EdgeSet::EMPTY).unwrap(), Matrix2C::zero());
            }
        }
        let ramp = Cochain::from_fn(&l, 0, false, |s, _| Matrix2C::identity() * l.coord(s, 0) as f64).unwrap();
        let site = l.site_index(&MultiIndex::new([3, 1])).unwrap();
        assert_eq!(delta(&ramp, 0, site, EdgeSet::EMPTY).unwrap(), Matrix2C::identity() * -3.0);

        let free = Lattice::free(&[3, 3]).unwrap();
        let phi = Cochain::zeros(&free, 0, false).unwrap();
        let edge = free.site_index(&MultiIndex::new([2, 0])).unwrap();
        assert!(matches!(delta(&phi, 0, edge, EdgeSet::EMPTY), Err(Error::OutOfRange { axis: 0, .. })));
        assert!(delta(&phi, 1, edge, EdgeSet::EMPTY).is_ok());
    }

    #[test]
    fn deltas_commute() {
        let l = Lattice::periodic(&[3, 3, 3]).unwrap();
        let mut rng = FieldRng::new(11);
        let phi = rng.cochain(&l, 0, false, Sampling::Uniform(1.0));
        let d = |c: &Cochain, axis| {
            Cochain::from_fn(&l, 0, false, |s, e| delta(c, axis, s, e).unwrap()).unwrap()
        };
        assert!(d(&d(&phi, 0), 1).max_abs_diff(&d(&d(&phi, 1), 0)) <= 1e-15);
    }

    #[test]
    fn coboundary_of_zero_form_matches_differences() {
        let l = Lattice::periodic(&[3, 3, 3]).unwrap();
        let mut rng = FieldRng::new(2);
        let phi = rng.cochain(&l, 0, false, Sampling::Integer(4));
        let d = coboundary(&phi).unwrap();
        for site in l.sites() {
            for axis in 0..3 {
                let expected = delta(&phi, axis, site, EdgeSet::EMPTY).unwrap();
                assert_eq!(d.get(site, EdgeSet::singleton(axis)), Some(expected));
            }
        }
    }

    #[test]
    fn coboundary_of_one_form_matches_curl() {
        let l = Lattice::periodic(&[3, 3, 3]).unwrap();
        let mut rng = FieldRng::new(3);
        let a = rng.cochain(&l, 1, false, Sampling::Integer(4));
        let d = coboundary(&a).unwrap();
        for site in l.sites() {
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let expected = delta(&a, i, site, EdgeSet::singleton(j)).unwrap()
                    - delta(&a, j, site, EdgeSet::singleton(i)).unwrap();
                assert_eq!(d.get(site, set(&[i, j])), Some(expected));
            }
        }
    }

    #[test]
    fn coboundary_squares_to_zero() {
        for extents in [vec![3, 3, 3], vec![2, 2, 2, 2]] {
            let l = Lattice::periodic(&extents).unwrap();
            let mut rng = FieldRng::new(5);
            for r in 0..extents.len() - 1 {
                let phi = rng.cochain(&l, r, false, Sampling::Integer(5));
                let dd = coboundary(&coboundary(&phi).unwrap()).unwrap();
                assert_eq!(dd.max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn top_degree_coboundary_is_an_error() {
        let l = Lattice::periodic(&[2, 2]).unwrap();
        let top = Cochain::zeros(&l, 2, false).unwrap();
        assert!(matches!(coboundary(&top), Err(Error::TopDegreeCoboundary)));
    }

    #[test]
    fn cup_sign_table_in_three_dimensions() {
        let l = Lattice::periodic(&[3, 3, 3]).unwrap();
        let k = [1i64, 1, 1];
        let site = l.site_index(&MultiIndex::new(k)).unwrap();
        let a = Matrix2C::from_real([[1.0, 2.0], [0.0, 1.0]]);
        let b = Matrix2C::from_real([[0.0, 1.0], [3.0, 1.0]]);
        for (i, j, sign) in [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (1, 0, -1.0), (2, 0, -1.0), (2, 1, -1.0)] {
            let shifted = l.multi_index(l.shift_site(site, i).unwrap());
            let left = basis_form(&l, &k, &[i], a);
            let right = basis_form(&l, &shifted.0, &[j], b);
            let prod = cup(&left, &right).unwrap();
            let plane = set(&[i, j]);
            assert_eq!(prod.get(site, plane), Some((a * b) * sign));
            assert_eq!(prod.entries().filter(|(_, _, m)| *m != Matrix2C::zero()).count(), 1);
            // unshifted second factor gives nothing
            let unshifted = basis_form(&l, &k, &[j], b);
            assert_eq!(cup(&left, &unshifted).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn unit_zero_form_is_two_sided_identity() {
        let l = Lattice::periodic(&[3, 2, 2]).unwrap();
        let one = Cochain::from_fn(&l, 0, false, |_, _| Matrix2C::identity()).unwrap();
        let mut rng = FieldRng::new(8);
        for r in 0..=3 {
            let phi = rng.cochain(&l, r, false, Sampling::Integer(3));
            assert_eq!(cup(&one, &phi).unwrap(), phi);
            assert_eq!(cup(&phi, &one).unwrap(), phi);
        }
    }

    #[test]
    fn cup_degree_and_flag_errors() {
        let l = Lattice::periodic(&[2, 2]).unwrap();
        let a = Cochain::zeros(&l, 2, false).unwrap();
        let b = Cochain::zeros(&l, 1, false).unwrap();
        assert!(matches!(cup(&a, &b), Err(Error::DegreeOverflow { .. })));
        assert!(matches!(cup(&b, &tilde_swap(&b)), Err(Error::TildeMismatch)));
    }

    #[test]
    fn star_tables() {
        let s3 = |axes: &[usize]| star_sign(set(axes), 3);
        assert_eq!((s3(&[0, 1]), s3(&[0, 2]), s3(&[1, 2])), (1.0, -1.0, 1.0));
        let s4 = |axes: &[usize]| star_sign(set(axes), 4);
        let table = [s4(&[0, 1]), s4(&[0, 2]), s4(&[0, 3]), s4(&[1, 2]), s4(&[1, 3]), s4(&[2, 3])];
        assert_eq!(table, [1.0, -1.0, 1.0, 1.0, -1.0, 1.0]);

        let l = Lattice::periodic(&[2, 2, 2]).unwrap();
        let a = Matrix2C::from_real([[1.0, 2.0], [3.0, 4.0]]);
        let s = star(&basis_form(&l, &[0, 1, 0], &[0, 2], a));
        assert!(s.is_tilde());
        assert_eq!(s.degree(), 1);
        let site = l.site_index(&MultiIndex::new([0, 1, 0])).unwrap();
        assert_eq!(s.get(site, EdgeSet::singleton(1)), Some(-a));
    }

    #[test]
    fn star_star_sign() {
        for extents in [vec![3, 3, 3], vec![2, 2, 2, 2]] {
            let l = Lattice::periodic(&extents).unwrap();
            let n = extents.len();
            let mut rng = FieldRng::new(9);
            for r in 0..=n {
                let phi = rng.cochain(&l, r, false, Sampling::Uniform(1.0));
                let twice = star(&star(&phi));
                let expected = phi.scale(parity(r * (n - r)));
                assert_eq!(twice, expected);
            }
        }
    }

    #[test]
    fn tilde_swap_identities() {
        let l = Lattice::periodic(&[3, 2, 2]).unwrap();
        let mut rng = FieldRng::new(10);
        let phi = rng.cochain(&l, 1, false, Sampling::Uniform(1.0));
        let psi = rng.cochain(&l, 1, false, Sampling::Uniform(1.0));
        assert_eq!(tilde_swap(&tilde_swap(&phi)), phi);
        assert_eq!(tilde_swap(&star(&phi)), star(&tilde_swap(&phi)));
        assert_eq!(
            tilde_swap(&coboundary(&phi).unwrap()),
            coboundary(&tilde_swap(&phi)).unwrap()
        );
        assert_eq!(
            tilde_swap(&cup(&phi, &psi).unwrap()),
            cup(&tilde_swap(&phi), &tilde_swap(&psi)).unwrap()
        );
    }

    #[test]
    fn free_boundary_operators_stay_inside() {
        let l = Lattice::free(&[3, 2, 2]).unwrap();
        let mut rng = FieldRng::new(12);
        let phi = rng.cochain(&l, 1, false, Sampling::Integer(3));
        let d = coboundary(&phi).unwrap();
        assert!(d.is_complete());
        let c = cup(&phi, &phi).unwrap();
        assert!(c.is_complete());
        // star lands on cells that may not exist; what remains valid is exact
        let s = star(&phi);
        for (site, e, m) in s.entries() {
            let source = e.complement(3);
            assert_eq!(m, phi.get(site, source).unwrap() * star_sign(source, 3));
        }
    }
}
