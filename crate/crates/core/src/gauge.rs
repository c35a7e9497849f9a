//! Discrete connections, Higgs fields, curvature and the Bogomolny and
//! self-dual residual systems, together with the lift of a 3D pair to a
//! 4D connection constant along the fourth axis.
//!
//! Every residual here is left-minus-right: the Bogomolny residual is
//! `F - ι̃★d_A Φ` and the self-dual residual is `F - ι̃★F`.

use crate::calculus::{coboundary, cup, star, star_sign, tilde_swap};
use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::lattice::{Boundary, EdgeSet, Lattice};
use crate::matrix::{embed, project_su2, su2_defect, Matrix2C, Su2Vector};
use crate::random::{FieldRng, Sampling};

/// Largest su(2) defect accepted for connection and Higgs components.
pub const SU2_TOLERANCE: f64 = 1e-12;

fn check_su2(c: &Cochain) -> Result<()> {
    for (site, set, m) in c.entries() {
        let defect = su2_defect(&m);
        if defect > SU2_TOLERANCE {
            let axis = set.axes().next().unwrap_or(0);
            return Err(Error::NotSu2 { site, axis, defect });
        }
    }
    Ok(())
}

fn require_complete(c: &Cochain) -> Result<()> {
    if c.is_complete() {
        return Ok(());
    }
    let lattice = c.lattice();
    let (site, set) = lattice
        .sites()
        .flat_map(|s| c.edge_sets().iter().map(move |&e| (s, e)))
        .find(|&(s, e)| lattice.cell_exists(s, e) && !c.is_valid(s, e))
        .expect("incomplete cochain has a missing entry");
    Err(Error::InvalidEntry { site: lattice.multi_index(site).to_string(), edges: set.to_string() })
}

/// A discrete su(2) connection: a 1-form on the primary complex.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection(Cochain);

impl Connection {
    pub fn from_cochain(c: Cochain) -> Result<Self> {
        if c.degree() != 1 {
            return Err(Error::DegreeMismatch { expected: 1, found: c.degree() });
        }
        if c.is_tilde() {
            return Err(Error::TildeMismatch);
        }
        require_complete(&c)?;
        check_su2(&c)?;
        Ok(Self(c))
    }

    /// Components from Pauli coordinates, `(site, axis) ↦ v`.
    pub fn from_su2_fn(lattice: &Lattice, f: impl Fn(usize, usize) -> Su2Vector + Sync) -> Result<Self> {
        let c = Cochain::from_fn(lattice, 1, false, |site, set| {
            embed(f(site, set.axes().next().expect("one edge")))
        })?;
        Ok(Self(c))
    }

    pub fn zero(lattice: &Lattice) -> Result<Self> {
        Ok(Self(Cochain::zeros(lattice, 1, false)?))
    }

    /// Coordinates drawn per site and axis in storage order.
    pub fn random(lattice: &Lattice, rng: &mut FieldRng, sampling: Sampling) -> Result<Self> {
        let n = lattice.dim();
        let draws: Vec<Su2Vector> = (0..lattice.num_sites() * n).map(|_| rng.su2(sampling)).collect();
        Self::from_su2_fn(lattice, |site, axis| draws[site * n + axis])
    }

    /// Re-projects every component onto su(2).
    pub fn project(&self) -> Self {
        Self(self.0.map(project_su2))
    }

    pub fn cochain(&self) -> &Cochain {
        &self.0
    }

    pub fn into_cochain(self) -> Cochain {
        self.0
    }

    pub fn lattice(&self) -> &Lattice {
        self.0.lattice()
    }

    pub fn component(&self, site: usize, axis: usize) -> Option<Matrix2C> {
        self.0.get(site, EdgeSet::singleton(axis))
    }
}

/// A discrete su(2) Higgs field: a 0-form on the primary complex.
#[derive(Clone, Debug, PartialEq)]
pub struct HiggsField(Cochain);

impl HiggsField {
    pub fn from_cochain(c: Cochain) -> Result<Self> {
        if c.degree() != 0 {
            return Err(Error::DegreeMismatch { expected: 0, found: c.degree() });
        }
        if c.is_tilde() {
            return Err(Error::TildeMismatch);
        }
        require_complete(&c)?;
        check_su2(&c)?;
        Ok(Self(c))
    }

    pub fn from_su2_fn(lattice: &Lattice, f: impl Fn(usize) -> Su2Vector + Sync) -> Result<Self> {
        Ok(Self(Cochain::from_fn(lattice, 0, false, |site, _| embed(f(site)))?))
    }

    pub fn zero(lattice: &Lattice) -> Result<Self> {
        Ok(Self(Cochain::zeros(lattice, 0, false)?))
    }

    pub fn random(lattice: &Lattice, rng: &mut FieldRng, sampling: Sampling) -> Result<Self> {
        let draws: Vec<Su2Vector> = (0..lattice.num_sites()).map(|_| rng.su2(sampling)).collect();
        Self::from_su2_fn(lattice, |site| draws[site])
    }

    pub fn project(&self) -> Self {
        Self(self.0.map(project_su2))
    }

    pub fn cochain(&self) -> &Cochain {
        &self.0
    }

    pub fn lattice(&self) -> &Lattice {
        self.0.lattice()
    }

    pub fn value(&self, site: usize) -> Option<Matrix2C> {
        self.0.get(site, EdgeSet::EMPTY)
    }
}

/// The curvature 2-form `F = d A + A ∪ A`. Components are gl(2,C)-valued and
/// are never projected.
#[derive(Clone, Debug, PartialEq)]
pub struct Curvature(Cochain);

impl Curvature {
    pub fn cochain(&self) -> &Cochain {
        &self.0
    }

    pub fn component(&self, site: usize, i: usize, j: usize) -> Option<Matrix2C> {
        self.0.get(site, EdgeSet::from_axes(&[i, j]))
    }

    /// Largest Frobenius distance from su(2) over all components.
    pub fn su2_defect(&self) -> f64 {
        self.0.entries().map(|(_, _, m)| su2_defect(&m)).fold(0.0, f64::max)
    }
}

pub fn curvature(a: &Connection) -> Result<Curvature> {
    let da = coboundary(a.cochain())?;
    let aa = cup(a.cochain(), a.cochain())?;
    Ok(Curvature(da.try_add(&aa)?))
}

/// `d_A φ = d φ + (A ∪ φ + (-1)^(r+1) φ ∪ A)` for an `r`-form `φ`.
pub fn covariant_differential(a: &Connection, phi: &Cochain) -> Result<Cochain> {
    let n = a.lattice().dim();
    if phi.degree() + 1 > n {
        return Err(Error::DegreeOverflow { left: 1, right: phi.degree(), dim: n });
    }
    let d = coboundary(phi)?;
    let left = cup(a.cochain(), phi)?;
    let right = cup(phi, a.cochain())?;
    let twist = if phi.degree().is_multiple_of(2) { left.try_sub(&right)? } else { left.try_add(&right)? };
    d.try_add(&twist)
}

/// Residual of the Bogomolny system on a 3-dimensional lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct BogomolnyResidual {
    pub residual: Cochain,
    /// `Σ_k Σ_{i<j} ‖R^{ij}_k‖_F²` over valid entries.
    pub sum_sq: f64,
}

impl BogomolnyResidual {
    fn new(residual: Cochain) -> Self {
        let sum_sq = residual.sum_norm_sqr();
        Self { residual, sum_sq }
    }

    /// `(plane, sqrt(Σ_k ‖R^{plane}_k‖²))` for each of the three planes.
    pub fn plane_norms(&self) -> Vec<(EdgeSet, f64)> {
        self.residual
            .edge_sets()
            .iter()
            .map(|&plane| {
                let s: f64 =
                    self.residual.entries().filter(|(_, e, _)| *e == plane).map(|(_, _, m)| m.frobenius_norm_sqr()).sum();
                (plane, s.sqrt())
            })
            .collect()
    }

    pub fn max_component(&self) -> f64 {
        self.residual.max_abs()
    }
}

fn require_dim(lattice: &Lattice, what: &'static str, expected: usize) -> Result<()> {
    if lattice.dim() != expected {
        return Err(Error::WrongDimension { what, expected, found: lattice.dim() });
    }
    Ok(())
}

fn check_pair(a: &Connection, phi: &HiggsField) -> Result<()> {
    require_dim(a.lattice(), "Bogomolny", 3)?;
    if a.lattice() != phi.lattice() {
        return Err(Error::LatticeMismatch);
    }
    Ok(())
}

/// `R = F - ι̃★d_A Φ`, through the generic operators.
pub fn bogomolny_residual(a: &Connection, phi: &HiggsField) -> Result<BogomolnyResidual> {
    check_pair(a, phi)?;
    let f = curvature(a)?;
    let dphi = covariant_differential(a, phi.cochain())?;
    let rhs = tilde_swap(&star(&dphi));
    Ok(BogomolnyResidual::new(f.cochain().try_sub(&rhs)?))
}

/// `F - ι̃★F` on a 4-dimensional lattice, through the generic operators.
pub fn selfdual_residual(a: &Connection) -> Result<Cochain> {
    require_dim(a.lattice(), "self-dual", 4)?;
    let f = curvature(a)?;
    f.cochain().try_sub(&tilde_swap(&star(f.cochain())))
}

/// The 4D lattice used by [`lift_to_4d`]: the 3D axes followed by a periodic
/// fourth axis of extent `n4`.
pub fn lifted_lattice(lattice: &Lattice, n4: usize) -> Result<Lattice> {
    require_dim(lattice, "Bogomolny", 3)?;
    let mut extents = lattice.extents().to_vec();
    let mut boundary = lattice.boundary().to_vec();
    extents.push(n4);
    boundary.push(Boundary::Periodic);
    Lattice::new(extents, boundary)
}

/// Site of the 3D lattice below a site of the lifted lattice. Row-major
/// order with the new axis last makes this a plain division.
#[inline]
pub fn project_site(site4: usize, n4: usize) -> usize {
    site4 / n4
}

/// The 4D connection with `A4^i = A^i` for `i < 3` and `A4^3 = Φ`, constant
/// along the fourth axis.
pub fn lift_to_4d(a: &Connection, phi: &HiggsField, n4: usize) -> Result<Connection> {
    check_pair(a, phi)?;
    let lattice4 = lifted_lattice(a.lattice(), n4)?;
    let c = Cochain::try_from_fn(&lattice4, 1, false, |site4, set| {
        let site = project_site(site4, n4);
        match set.axes().next().expect("one edge") {
            3 => phi.value(site),
            axis => a.component(site, axis),
        }
    })?;
    Connection::from_cochain(c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    pub n4: usize,
    /// Largest entrywise difference between the lifted self-dual residual
    /// and the value predicted from the Bogomolny residual, over all planes
    /// and every slice of the fourth axis.
    pub max_discrepancy: f64,
    /// Largest `|Δ_4|` over all lifted components.
    pub max_delta4: f64,
    pub bogomolny_sum_sq: f64,
    pub selfdual_sum_sq: f64,
}

/// Lifts `(A, Φ)` and compares the self-dual residual of the lift with the
/// Bogomolny residual.
///
/// For a plane `J` of the 3D axes with remaining axis `l`, the lifted
/// curvature satisfies `F^{l4} = d_A Φ` on axis `l` whenever the lift is
/// constant along axis 4, so the self-dual residual on `J` is the
/// Bogomolny residual on `J` provided the 4D star sign of `{l, 4}` equals
/// the 3D star sign of `{l}`; on the complementary plane `Jᶜ = {l, 4}` it is
/// `-ε₄(J)` times the residual on `J`. Both factors are computed from the
/// star signs rather than tabulated.
pub fn equivalence_check(a: &Connection, phi: &HiggsField, n4: usize) -> Result<EquivalenceReport> {
    let bog = bogomolny_residual(a, phi)?;
    let lifted = lift_to_4d(a, phi, n4)?;
    let sd = selfdual_residual(&lifted)?;
    let lattice4 = lifted.lattice().clone();

    let mut max_discrepancy = 0.0_f64;
    for site4 in lattice4.sites() {
        let site = project_site(site4, n4);
        for plane in EdgeSet::all_of_size(3, 2) {
            let l = plane.complement(3).axes().next().expect("one remaining axis");
            let dual = plane.complement(4);
            let same_orientation = star_sign(dual, 4) == star_sign(EdgeSet::singleton(l), 3);
            let r = bog.residual.get(site, plane);
            let in_plane = sd.get(site4, plane);
            let across = sd.get(site4, dual);
            let d = match (r, in_plane, across) {
                (Some(r), Some(p), Some(q)) => {
                    let expected_in = if same_orientation { r } else { -r };
                    let expected_across = expected_in * -star_sign(plane, 4);
                    (p - expected_in).max_abs().max((q - expected_across).max_abs())
                }
                (None, None, None) => 0.0,
                _ => f64::INFINITY,
            };
            max_discrepancy = max_discrepancy.max(d);
        }
    }

    let mut max_delta4 = 0.0_f64;
    for (site4, set, m) in lifted.cochain().entries() {
        let next = lattice4.shift_site(site4, 3).expect("fourth axis is periodic");
        if let Some(other) = lifted.cochain().get(next, set) {
            max_delta4 = max_delta4.max((other - m).max_abs());
        }
    }

    Ok(EquivalenceReport {
        n4,
        max_discrepancy,
        max_delta4,
        bogomolny_sum_sq: bog.sum_sq,
        selfdual_sum_sq: sd.sum_norm_sqr(),
    })
}

/// Direct per-component formulas, the second evaluation path for every
/// generic-operator construction above. Axes are zero-based.
pub mod components {
    use super::*;

    /// `F^{ij}_k = Δ_i A^j_k - Δ_j A^i_k + A^i_k A^j_{τ_i k} - A^j_k A^i_{τ_j k}`.
    pub fn curvature(a: &Connection) -> Result<Cochain> {
        let lattice = a.lattice();
        Cochain::try_from_fn(lattice, 2, false, |k, plane| {
            let mut axes = plane.axes();
            let (i, j) = (axes.next()?, axes.next()?);
            let ki = lattice.shift_site(k, i)?;
            let kj = lattice.shift_site(k, j)?;
            let (ai, aj) = (a.component(k, i)?, a.component(k, j)?);
            let aj_ki = a.component(ki, j)?;
            let ai_kj = a.component(kj, i)?;
            Some(((aj_ki - aj) - (ai_kj - ai)) + (ai * aj_ki - aj * ai_kj))
        })
    }

    /// `(d_A Φ)^i_k = Δ_i Φ_k + A^i_k Φ_{τ_i k} - Φ_k A^i_k`.
    pub fn covariant_differential(a: &Connection, phi: &HiggsField) -> Result<Cochain> {
        let lattice = a.lattice();
        Cochain::try_from_fn(lattice, 1, false, |k, edge| {
            let i = edge.axes().next()?;
            let ki = lattice.shift_site(k, i)?;
            let (p, p_ki, ai) = (phi.value(k)?, phi.value(ki)?, a.component(k, i)?);
            Some((p_ki - p) + (ai * p_ki - p * ai))
        })
    }

    /// The three difference equations of the Bogomolny system, as residuals:
    ///
    /// ```text
    /// R^{12} = F^{12} - (Δ_3 Φ + A^3 Φ_{τ_3} - Φ A^3)
    /// R^{13} = F^{13} + (Δ_2 Φ + A^2 Φ_{τ_2} - Φ A^2)
    /// R^{23} = F^{23} - (Δ_1 Φ + A^1 Φ_{τ_1} - Φ A^1)
    /// ```
    pub fn bogomolny_residual(a: &Connection, phi: &HiggsField) -> Result<Cochain> {
        check_pair(a, phi)?;
        let f = curvature(a)?;
        let d = covariant_differential(a, phi)?;
        Cochain::try_from_fn(a.lattice(), 2, false, |k, plane| {
            let f = f.get(k, plane)?;
            let bits = plane.bits();
            Some(if bits == 0b011 {
                f - d.get(k, EdgeSet::singleton(2))?
            } else if bits == 0b101 {
                f + d.get(k, EdgeSet::singleton(1))?
            } else {
                f - d.get(k, EdgeSet::singleton(0))?
            })
        })
    }

    /// The self-dual equations `F^{12} = F^{34}`, `F^{13} = -F^{24}`,
    /// `F^{14} = F^{23}` as residuals on all six planes.
    pub fn selfdual_residual(a: &Connection) -> Result<Cochain> {
        require_dim(a.lattice(), "self-dual", 4)?;
        let f = curvature(a)?;
        let p = |axes: [usize; 2]| EdgeSet::from_axes(&axes);
        Cochain::try_from_fn(a.lattice(), 2, false, |k, plane| {
            let g = |axes| f.get(k, p(axes));
            Some(match plane.label().as_str() {
                "12" => g([0, 1])? - g([2, 3])?,
                "34" => g([2, 3])? - g([0, 1])?,
                "13" => g([0, 2])? + g([1, 3])?,
                "24" => g([1, 3])? + g([0, 2])?,
                "14" => g([0, 3])? - g([1, 2])?,
                "23" => g([1, 2])? - g([0, 3])?,
                _ => unreachable!("2-planes of a 4D lattice"),
            })
        })
    }
}
