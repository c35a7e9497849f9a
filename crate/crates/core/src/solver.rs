//! Nonlinear least squares for the Bogomolny system over Pauli coordinates.
//!
//! The unknowns are the three Pauli coordinates of every connection
//! component followed by those of every Higgs component:
//!
//! ```text
//! [ A(site 0, axis 0) | A(site 0, axis 1) | ... | Φ(site 0) | Φ(site 1) | ... ]
//! ```
//!
//! Every residual block `R^{ij}_k` is quadratic in seven matrices of the
//! neighbourhood of `k`, so the gradient and Jacobian products are exact.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::star_sign;
use crate::error::{Error, Result};
use crate::gauge::{Connection, HiggsField};
use crate::lattice::{EdgeSet, Lattice};
use crate::matrix::{embed, extract, su2_basis, Matrix2C, Su2Vector};
use crate::random::{FieldRng, Sampling};

const ARMIJO: f64 = 1e-4;
const DAMPING: f64 = 1e-10;

/// Flat real coordinates of a field pair `(A, Φ)` on a 3D lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterVector(pub Vec<f64>);

impl ParameterVector {
    pub fn len_for(lattice: &Lattice) -> usize {
        12 * lattice.num_sites()
    }

    pub fn zeros(lattice: &Lattice) -> Self {
        Self(vec![0.0; Self::len_for(lattice)])
    }

    /// Every coordinate uniform on `[-amp, amp]`, drawn in layout order.
    pub fn random(lattice: &Lattice, rng: &mut FieldRng, amp: f64) -> Self {
        Self((0..Self::len_for(lattice)).map(|_| rng.real(Sampling::Uniform(amp))).collect())
    }

    /// Coordinates of `(A, Φ)`. Edges that leave a free lattice encode as zero.
    pub fn encode(a: &Connection, phi: &HiggsField) -> Result<Self> {
        let lattice = a.lattice();
        require_three(lattice)?;
        if lattice != phi.lattice() {
            return Err(Error::LatticeMismatch);
        }
        let mut p = Self::zeros(lattice);
        for site in lattice.sites() {
            for axis in 0..3 {
                if let Some(m) = a.component(site, axis) {
                    p.0[connection_slot(site, axis)..][..3].copy_from_slice(&extract(&m).to_array());
                }
            }
            let v = extract(&phi.value(site).expect("Higgs field is complete"));
            p.0[higgs_slot(lattice, site)..][..3].copy_from_slice(&v.to_array());
        }
        Ok(p)
    }

    pub fn decode(&self, lattice: &Lattice) -> Result<(Connection, HiggsField)> {
        require_three(lattice)?;
        self.check_len(lattice)?;
        let a = Connection::from_su2_fn(lattice, |site, axis| self.su2_at(connection_slot(site, axis)))?;
        let phi = HiggsField::from_su2_fn(lattice, |site| self.su2_at(higgs_slot(lattice, site)))?;
        Ok((a, phi))
    }

    fn su2_at(&self, offset: usize) -> Su2Vector {
        Su2Vector::new(self.0[offset], self.0[offset + 1], self.0[offset + 2])
    }

    fn check_len(&self, lattice: &Lattice) -> Result<()> {
        let expected = Self::len_for(lattice);
        if self.0.len() != expected {
            return Err(Error::ParameterLength { expected, found: self.0.len() });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn require_three(lattice: &Lattice) -> Result<()> {
    if lattice.dim() != 3 {
        return Err(Error::WrongDimension { what: "Bogomolny", expected: 3, found: lattice.dim() });
    }
    Ok(())
}

#[inline]
fn connection_slot(site: usize, axis: usize) -> usize {
    (site * 3 + axis) * 3
}

#[inline]
fn higgs_slot(lattice: &Lattice, site: usize) -> usize {
    9 * lattice.num_sites() + site * 3
}

/// One linear term `M δX N` of a block's derivative in the matrix at `slot`.
#[derive(Clone, Copy)]
struct Term {
    slot: usize,
    left: Matrix2C,
    right: Matrix2C,
}

/// The residual block of plane `(i, j)` at one site, with `l` the third axis:
///
/// ```text
/// R = (X1 - X2) - (X3 - X4) + X4 X1 - X2 X3 - s ((X6 - X7) + X5 X6 - X7 X5)
/// X1 = A^j(τ_i k)  X2 = A^j(k)  X3 = A^i(τ_j k)  X4 = A^i(k)
/// X5 = A^l(k)      X6 = Φ(τ_l k)  X7 = Φ(k)
/// ```
///
/// where `s` is the 3D star sign of `{l}`.
#[derive(Clone, Copy, Debug)]
struct Block {
    slots: [usize; 7],
    sign: f64,
}

impl Block {
    fn matrices(&self, p: &[f64]) -> [Matrix2C; 7] {
        self.slots.map(|o| embed(Su2Vector::new(p[o], p[o + 1], p[o + 2])))
    }

    fn residual(&self, p: &[f64]) -> Matrix2C {
        let [x1, x2, x3, x4, x5, x6, x7] = self.matrices(p);
        let f = (x1 - x2) - (x3 - x4) + (x4 * x1 - x2 * x3);
        let d = (x6 - x7) + (x5 * x6 - x7 * x5);
        f - d * self.sign
    }

    /// `δR = Σ M δX N` around `p`.
    fn terms(&self, p: &[f64]) -> [Term; 8] {
        let [x1, x2, x3, x4, x5, x6, x7] = self.matrices(p);
        let id = Matrix2C::identity();
        let s = self.sign;
        let [o1, o2, o3, o4, o5, o6, o7] = self.slots;
        let t = |slot, left, right| Term { slot, left, right };
        [
            t(o1, id + x4, id),
            t(o2, id, -(id + x3)),
            t(o3, -(id + x2), id),
            t(o4, id, id + x1),
            t(o5, id, x6 * -s),
            t(o5, x7 * s, id),
            t(o6, (id + x5) * -s, id),
            t(o7, id, (id + x5) * s),
        ]
    }
}

/// The Bogomolny residual as a function of the parameter vector.
#[derive(Clone, Debug)]
pub struct ResidualModel {
    lattice: Lattice,
    blocks: Vec<Block>,
}

impl ResidualModel {
    /// One block per site and plane whose stencil lies inside the lattice,
    /// in the storage order of the residual cochain.
    pub fn new(lattice: &Lattice) -> Result<Self> {
        require_three(lattice)?;
        let mut blocks = Vec::new();
        for site in lattice.sites() {
            for plane in EdgeSet::all_of_size(3, 2) {
                let mut axes = plane.axes();
                let (i, j) = (axes.next().expect("two axes"), axes.next().expect("two axes"));
                let l = 3 - i - j;
                let shifted = |axis| lattice.shift_site(site, axis);
                let (Some(ki), Some(kj), Some(kl)) = (shifted(i), shifted(j), shifted(l)) else {
                    continue;
                };
                blocks.push(Block {
                    slots: [
                        connection_slot(ki, j),
                        connection_slot(site, j),
                        connection_slot(kj, i),
                        connection_slot(site, i),
                        connection_slot(site, l),
                        higgs_slot(lattice, kl),
                        higgs_slot(lattice, site),
                    ],
                    sign: star_sign(EdgeSet::singleton(l), 3),
                });
            }
        }
        Ok(Self { lattice: lattice.clone(), blocks })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn num_parameters(&self) -> usize {
        ParameterVector::len_for(&self.lattice)
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    fn check(&self, p: &ParameterVector) -> Result<()> {
        p.check_len(&self.lattice)
    }

    fn residuals(&self, p: &[f64]) -> Vec<Matrix2C> {
        self.blocks.par_iter().map(|b| b.residual(p)).collect()
    }

    /// `½ Σ ‖R‖_F²`, summed in block order.
    pub fn objective(&self, p: &ParameterVector) -> Result<f64> {
        self.check(p)?;
        Ok(0.5 * self.residuals(&p.0).iter().map(Matrix2C::frobenius_norm_sqr).sum::<f64>())
    }

    /// Largest absolute real component of any residual block.
    pub fn max_residual(&self, p: &ParameterVector) -> Result<f64> {
        self.check(p)?;
        Ok(self.residuals(&p.0).iter().map(Matrix2C::max_abs).fold(0.0, f64::max))
    }

    pub fn gradient(&self, p: &ParameterVector) -> Result<ParameterVector> {
        self.check(p)?;
        let residuals = self.residuals(&p.0);
        Ok(ParameterVector(self.transpose_apply(&p.0, &residuals)))
    }

    /// `Jᵀ w` for per-block matrices `w`, scattered in block order.
    fn transpose_apply(&self, p: &[f64], w: &[Matrix2C]) -> Vec<f64> {
        let basis = su2_basis();
        let contributions: Vec<[(usize, Matrix2C); 8]> = self
            .blocks
            .par_iter()
            .zip(w)
            .map(|(b, r)| b.terms(p).map(|t| (t.slot, t.left.adjoint() * *r * t.right.adjoint())))
            .collect();
        let mut out = vec![0.0; p.len()];
        for block in &contributions {
            for (slot, g) in block {
                for (c, e) in basis.iter().enumerate() {
                    out[slot + c] += g.real_inner(e);
                }
            }
        }
        out
    }

    /// `J d` as one matrix per block.
    fn apply(&self, p: &[f64], d: &[f64]) -> Vec<Matrix2C> {
        self.blocks
            .par_iter()
            .map(|b| {
                b.terms(p)
                    .iter()
                    .map(|t| t.left * embed(Su2Vector::new(d[t.slot], d[t.slot + 1], d[t.slot + 2])) * t.right)
                    .sum()
            })
            .collect()
    }

    /// Diagonal of `JᵀJ`.
    fn normal_diagonal(&self, p: &[f64]) -> Vec<f64> {
        let basis = su2_basis();
        let mut diag = vec![0.0; p.len()];
        for b in &self.blocks {
            let terms = b.terms(p);
            let mut seen = [usize::MAX; 8];
            for (n, t) in terms.iter().enumerate() {
                if seen.contains(&t.slot) {
                    continue;
                }
                seen[n] = t.slot;
                for (c, e) in basis.iter().enumerate() {
                    let column: Matrix2C =
                        terms.iter().filter(|u| u.slot == t.slot).map(|u| u.left * *e * u.right).sum();
                    diag[t.slot + c] += column.frobenius_norm_sqr();
                }
            }
        }
        diag
    }

    /// Approximate solution of `(JᵀJ + μ I) x = -g` by Jacobi-preconditioned
    /// conjugate gradients, `μ = 1e-10 · max diag(JᵀJ)`.
    fn gauss_newton_direction(&self, p: &[f64], g: &[f64]) -> Vec<f64> {
        let diag = self.normal_diagonal(p);
        let mu = DAMPING * diag.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let precond: Vec<f64> = diag.iter().map(|d| 1.0 / (d + mu)).collect();
        let normal = |v: &[f64]| -> Vec<f64> {
            let jv = self.apply(p, v);
            let mut out = self.transpose_apply(p, &jv);
            out.iter_mut().zip(v).for_each(|(o, x)| *o += mu * x);
            out
        };

        let mut x = vec![0.0; g.len()];
        let mut r: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut z: Vec<f64> = r.iter().zip(&precond).map(|(a, b)| a * b).collect();
        let mut d = z.clone();
        let mut rz = dot(&r, &z);
        let target = 1e-24 * dot(&r, &r);
        for _ in 0..g.len().min(2000) {
            if dot(&r, &r) <= target {
                break;
            }
            let q = normal(&d);
            let dq = dot(&d, &q);
            if dq <= 0.0 || !dq.is_finite() {
                break;
            }
            let alpha = rz / dq;
            axpy(&mut x, alpha, &d);
            axpy(&mut r, -alpha, &q);
            z = r.iter().zip(&precond).map(|(a, b)| a * b).collect();
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            d.iter_mut().zip(&z).for_each(|(di, zi)| *di = zi + beta * *di);
        }
        x
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn objective(p: &ParameterVector, lattice: &Lattice) -> Result<f64> {
    ResidualModel::new(lattice)?.objective(p)
}

pub fn gradient(p: &ParameterVector, lattice: &Lattice) -> Result<ParameterVector> {
    ResidualModel::new(lattice)?.gradient(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Descent,
    GaussNewton,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "descent" => Ok(Self::Descent),
            "gauss_newton" | "gauss-newton" => Ok(Self::GaussNewton),
            other => Err(format!("unknown method '{other}' (expected descent or gauss_newton)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Descent => "descent",
            Self::GaussNewton => "gauss_newton",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveOptions {
    pub max_iter: usize,
    pub tol_objective: f64,
    pub tol_step: f64,
    pub method: Method,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { max_iter: 10_000, tol_objective: 1e-18, tol_step: 1e-12, method: Method::GaussNewton }
    }
}

impl SolveOptions {
    fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidOptions("max_iter must be positive".into()));
        }
        for (name, v) in [("tol_objective", self.tol_objective), ("tol_step", self.tol_step)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidOptions(format!("{name} must be a positive number, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIter,
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: Method,
    /// Accepted steps.
    pub iterations: usize,
    /// Objective at the start and after every accepted step.
    pub objective_trace: Vec<f64>,
    pub final_objective: f64,
    pub max_residual: f64,
    pub termination: Termination,
}

/// Minimises the objective from `initial` with a backtracking line search
/// (halving, sufficient decrease `1e-4`). Gauss-Newton directions that fail
/// to descend are replaced by the negative gradient.
pub fn solve(initial: &ParameterVector, lattice: &Lattice, opts: &SolveOptions) -> Result<(ParameterVector, SolveReport)> {
    opts.validate()?;
    let model = ResidualModel::new(lattice)?;
    let mut p = initial.clone();
    let mut f = model.objective(&p)?;
    if !f.is_finite() {
        return Err(Error::Divergence { iteration: 0 });
    }
    let mut trace = vec![f];
    let mut first_step = 1.0;
    let mut termination = Termination::MaxIter;

    for iteration in 0..opts.max_iter {
        if f <= opts.tol_objective {
            termination = Termination::Converged;
            break;
        }
        let g = model.gradient(&p)?.0;
        if !g.iter().all(|v| v.is_finite()) {
            return Err(Error::Divergence { iteration });
        }
        let mut direction = match opts.method {
            Method::Descent => g.iter().map(|v| -v).collect(),
            Method::GaussNewton => model.gauss_newton_direction(&p.0, &g),
        };
        let mut slope = dot(&g, &direction);
        if !(slope < 0.0) {
            direction = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let length = norm(&direction);
        if !(slope < 0.0) || length == 0.0 {
            termination = Termination::Stalled;
            break;
        }

        let mut t = match opts.method {
            Method::Descent => first_step,
            Method::GaussNewton => 1.0,
        };
        let accepted = loop {
            if t * length < opts.tol_step {
                break None;
            }
            let mut trial = p.0.clone();
            axpy(&mut trial, t, &direction);
            let trial = ParameterVector(trial);
            let ft = model.objective(&trial)?;
            if ft.is_finite() && ft <= f + ARMIJO * t * slope && ft < f {
                break Some((trial, ft));
            }
            t *= 0.5;
        };
        let Some((next, f_next)) = accepted else {
            termination = Termination::Stalled;
            break;
        };
        p = next;
        f = f_next;
        trace.push(f);
        first_step = (t * 4.0).min(1e6);
        if t * length < opts.tol_step {
            termination = Termination::Stalled;
            break;
        }
    }
    if f <= opts.tol_objective {
        termination = Termination::Converged;
    }

    let report = SolveReport {
        method: opts.method,
        iterations: trace.len() - 1,
        final_objective: f,
        max_residual: model.max_residual(&p)?,
        objective_trace: trace,
        termination,
    };
    Ok((p, report))
}
