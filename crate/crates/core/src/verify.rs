//! Named identity checks on seeded random data, grouped into suites.

use std::fmt;
use std::str::FromStr;

use crate::calculus::{coboundary, cup, star, star_sign, tilde_swap};
use crate::chain::pairing;
use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::gauge::{self, components, Connection, HiggsField};
use crate::lattice::{Boundary, EdgeSet, Lattice};
use crate::matrix::Su2Vector;
use crate::random::{FieldRng, Sampling};
use crate::report::{run_check, CheckRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Calculus,
    Gauge,
    Reduction,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "calculus" => Ok(Self::Calculus),
            "gauge" => Ok(Self::Gauge),
            "reduction" => Ok(Self::Reduction),
            "all" => Ok(Self::All),
            other => Err(format!("unknown suite '{other}' (expected calculus, gauge, reduction or all)")),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Calculus => "calculus",
            Self::Gauge => "gauge",
            Self::Reduction => "reduction",
            Self::All => "all",
        })
    }
}

impl Suite {
    pub fn default_extents(self) -> Vec<Vec<usize>> {
        match self {
            Self::Calculus => vec![vec![3, 3, 3], vec![2, 2, 2, 2]],
            Self::Gauge | Self::Reduction => vec![vec![2, 2, 2], vec![3, 3, 3]],
            Self::All => unreachable!("expanded by run_suite"),
        }
    }
}

/// Inputs shared by every suite.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Lattice extents to run on; empty means the suite defaults.
    pub extents: Vec<Vec<usize>>,
    pub boundary: Boundary,
    /// Random samples per check.
    pub trials: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 1, extents: Vec::new(), boundary: Boundary::Periodic, trials: 10 }
    }
}

impl VerifyConfig {
    fn lattices(&self, suite: Suite) -> Result<Vec<Lattice>> {
        let extents = if self.extents.is_empty() { suite.default_extents() } else { self.extents.clone() };
        extents.iter().map(|e| Lattice::new(e.clone(), vec![self.boundary; e.len()])).collect()
    }
}

/// Runs a suite, emitting one record per check in a fixed order. Gauge and
/// reduction suites require 3D lattices.
pub fn run_suite(suite: Suite, config: &VerifyConfig, mut emit: impl FnMut(CheckRecord)) -> Result<()> {
    let parts = match suite {
        Suite::All => vec![Suite::Calculus, Suite::Gauge, Suite::Reduction],
        single => vec![single],
    };
    for part in parts {
        run_single(part, config, &mut emit)?;
    }
    Ok(())
}

fn run_single(suite: Suite, config: &VerifyConfig, emit: &mut dyn FnMut(CheckRecord)) -> Result<()> {
    let lattices = config.lattices(suite)?;
    if suite != Suite::Calculus {
        if let Some(l) = lattices.iter().find(|l| l.dim() != 3) {
            return Err(Error::WrongDimension { what: "Bogomolny", expected: 3, found: l.dim() });
        }
    }
    for lattice in &lattices {
        let checks = match suite {
            Suite::Calculus => calculus_checks(lattice, config),
            Suite::Gauge => gauge_checks(lattice, config),
            Suite::Reduction => reduction_checks(lattice, config),
            Suite::All => unreachable!(),
        };
        checks.into_iter().for_each(&mut *emit);
    }
    Ok(())
}

fn sign(power: usize) -> f64 {
    if power.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Largest deviation of `result` from `reference` over the valid entries of
/// `result`; infinite if the reference lacks one of them.
fn masked_diff(result: &Cochain, reference: &Cochain) -> f64 {
    if !result.same_shape(reference) {
        return f64::INFINITY;
    }
    result
        .entries()
        .map(|(site, set, m)| reference.get(site, set).map_or(f64::INFINITY, |r| (m - r).max_abs()))
        .fold(0.0, f64::max)
}

fn calculus_checks(lattice: &Lattice, cfg: &VerifyConfig) -> Vec<CheckRecord> {
    let n = lattice.dim();
    let name = |check: &str| format!("calculus/{check} {lattice}");
    let ints = Sampling::Integer(4);
    let rng = || FieldRng::new(cfg.seed);
    let mut out = Vec::new();

    out.push(run_check(name("coboundary_squared"), 0.0, || {
        let mut rng = rng();
        let mut worst = 0.0_f64;
        for _ in 0..cfg.trials {
            for r in 0..n.saturating_sub(1) {
                let phi = rng.cochain(lattice, r, false, ints);
                worst = worst.max(coboundary(&coboundary(&phi)?)?.max_abs());
            }
        }
        Ok(worst)
    }));

    out.push(run_check(name("duality"), 0.0, || {
        let mut rng = rng();
        let mut worst = 0.0_f64;
        for _ in 0..cfg.trials {
            for r in 0..n {
                let c = rng.chain(lattice, r + 1, 6, 3);
                let phi = rng.cochain(lattice, r, false, ints);
                let lhs = pairing(&c.boundary(), &phi)?;
                let rhs = pairing(&c, &coboundary(&phi)?)?;
                worst = worst.max((lhs - rhs).max_abs());
            }
        }
        Ok(worst)
    }));

    out.push(run_check(name("leibniz"), 0.0, || {
        let mut rng = rng();
        let mut worst = 0.0_f64;
        for _ in 0..cfg.trials {
            for r in 0..n {
                for p in 0..n - r {
                    let phi = rng.cochain(lattice, r, false, ints);
                    let psi = rng.cochain(lattice, p, false, ints);
                    worst = worst.max(leibniz_defect(&phi, &psi)?);
                }
            }
        }
        Ok(worst)
    }));

    if n >= 2 {
        out.push(run_check(name("cup_one_forms"), 0.0, || {
            let mut rng = rng();
            let mut worst = 0.0_f64;
            for _ in 0..cfg.trials {
                let phi = rng.cochain(lattice, 1, false, ints);
                let psi = rng.cochain(lattice, 1, false, ints);
                let prod = cup(&phi, &psi)?;
                let expected = Cochain::try_from_fn(lattice, 2, false, |k, plane| {
                    let mut axes = plane.axes();
                    let (i, j) = (axes.next()?, axes.next()?);
                    let (ei, ej) = (EdgeSet::singleton(i), EdgeSet::singleton(j));
                    let ki = lattice.shift_site(k, i)?;
                    let kj = lattice.shift_site(k, j)?;
                    Some(phi.get(k, ei)? * psi.get(ki, ej)? - phi.get(k, ej)? * psi.get(kj, ei)?)
                })?;
                worst = worst.max(prod.max_abs_diff(&expected));
            }
            Ok(worst)
        }));
    }

    out.push(run_check(name("cup_associativity"), 0.0, || {
        let mut rng = rng();
        let mut worst = 0.0_f64;
        for _ in 0..cfg.trials.div_ceil(2) {
            for r in 0..=n {
                for p in 0..=n - r {
                    let q = rng.below((n - r - p + 1) as u64) as usize;
                    let a = rng.cochain(lattice, r, false, ints);
                    let b = rng.cochain(lattice, p, false, ints);
                    let c = rng.cochain(lattice, q, false, ints);
                    let left = cup(&cup(&a, &b)?, &c)?;
                    let right = cup(&a, &cup(&b, &c)?)?;
                    worst = worst.max(left.max_abs_diff(&right));
                }
            }
        }
        Ok(worst)
    }));

    out.push(run_check(name("star_star"), 0.0, || {
        let mut rng = rng();
        let mut worst = 0.0_f64;
        for _ in 0..cfg.trials {
            for r in 0..=n {
                let phi = rng.cochain(lattice, r, false, Sampling::Uniform(1.0));
                worst = worst.max(masked_diff(&star(&star(&phi)), &phi.scale(sign(r * (n - r)))));
            }
        }
        Ok(worst)
    }));

    if let Some(table) = star_table(n) {
        out.push(run_check(name("star_table"), 0.0, || {
            let mismatches = table
                .iter()
                .filter(|(axes, expected)| star_sign(EdgeSet::from_axes(axes), n) != *expected)
                .count();
            Ok(mismatches as f64)
        }));
    }

    out.push(run_check(name("tilde_identities"), 0.0, || {
        let mut rng = rng();
        let mut worst = 0.0_f64;
        for _ in 0..cfg.trials {
            for r in 0..n {
                let phi = rng.cochain(lattice, r, false, Sampling::Uniform(1.0));
                let psi = rng.cochain(lattice, n - r - 1, false, Sampling::Uniform(1.0));
                let diffs = [
                    tilde_swap(&tilde_swap(&phi)).max_abs_diff(&phi),
                    tilde_swap(&star(&phi)).max_abs_diff(&star(&tilde_swap(&phi))),
                    tilde_swap(&coboundary(&phi)?).max_abs_diff(&coboundary(&tilde_swap(&phi))?),
                    tilde_swap(&cup(&phi, &psi)?).max_abs_diff(&cup(&tilde_swap(&phi), &tilde_swap(&psi))?),
                ];
                worst = diffs.into_iter().fold(worst, f64::max);
            }
        }
        Ok(worst)
    }));

    out
}

/// `max |d(φ∪ψ) - dφ∪ψ - (-1)^r φ∪dψ|`, where the degrees allow it.
pub fn leibniz_defect(phi: &Cochain, psi: &Cochain) -> Result<f64> {
    let (r, p, n) = (phi.degree(), psi.degree(), phi.lattice().dim());
    if r + p + 1 > n {
        return Err(Error::DegreeOverflow { left: r + 1, right: p, dim: n });
    }
    let lhs = coboundary(&cup(phi, psi)?)?;
    let first = cup(&coboundary(phi)?, psi)?;
    let second = cup(phi, &coboundary(psi)?)?.scale(sign(r));
    Ok(lhs.max_abs_diff(&first.try_add(&second)?))
}

/// The printed star sign tables: for 3D the 2-forms and, in the other
/// direction, the 1-forms; for 4D the six 2-forms.
pub fn star_table(n: usize) -> Option<Vec<(Vec<usize>, f64)>> {
    match n {
        3 => Some(vec![
            (vec![0, 1], 1.0),
            (vec![0, 2], -1.0),
            (vec![1, 2], 1.0),
            (vec![0], 1.0),
            (vec![1], -1.0),
            (vec![2], 1.0),
        ]),
        4 => Some(vec![
            (vec![0, 1], 1.0),
            (vec![0, 2], -1.0),
            (vec![0, 3], 1.0),
            (vec![1, 2], 1.0),
            (vec![1, 3], -1.0),
            (vec![2, 3], 1.0),
        ]),
        _ => None,
    }
}

fn random_pair(lattice: &Lattice, rng: &mut FieldRng, sampling: Sampling) -> Result<(Connection, HiggsField)> {
    Ok((Connection::random(lattice, rng, sampling)?, HiggsField::random(lattice, rng, sampling)?))
}

fn gauge_checks(lattice: &Lattice, cfg: &VerifyConfig) -> Vec<CheckRecord> {
    let name = |check: &str| format!("gauge/{check} {lattice}");
    let reals = Sampling::Uniform(1.0);
    let rng = || FieldRng::new(cfg.seed);
    let mut out = Vec::new();

    out.push(run_check(name("curvature_paths"), 0.0, || {
        let mut rng = rng();
        let mut worst = 0.0_f64;
        for _ in 0..cfg.trials {
            let a = Connection::random(lattice, &mut rng, reals)?;
            let generic = gauge::curvature(&a)?;
            worst = worst.max(generic.cochain().max_abs_diff(&components::curvature(&a)?));
        }
        Ok(worst)
    }));

    out.push(run_check(name("covariant_differential_paths"), 0.0, || {
        let mut rng = rng();
        let mut worst = 0.0_f64;
        for _ in 0..cfg.trials {
            let (a, phi) = random_pair(lattice, &mut rng, reals)?;
            let generic = gauge::covariant_differential(&a, phi.cochain())?;
            worst = worst.max(generic.max_abs_diff(&components::covariant_differential(&a, &phi)?));
        }
        Ok(worst)
    }));

    out.push(run_check(name("bogomolny_paths"), 0.0, || {
        let mut rng = rng();
        let mut worst = 0.0_f64;
        for _ in 0..cfg.trials {
            let (a, phi) = random_pair(lattice, &mut rng, reals)?;
            let generic = gauge::bogomolny_residual(&a, &phi)?;
            worst = worst.max(generic.residual.max_abs_diff(&components::bogomolny_residual(&a, &phi)?));
        }
        Ok(worst)
    }));

    out.push(run_check(name("selfdual_paths"), 0.0, || {
        let lattice4 = gauge::lifted_lattice(lattice, 2)?;
        let mut rng = rng();
        let mut worst = 0.0_f64;
        for _ in 0..cfg.trials {
            let a = Connection::random(&lattice4, &mut rng, reals)?;
            let generic = gauge::selfdual_residual(&a)?;
            worst = worst.max(generic.max_abs_diff(&components::selfdual_residual(&a)?));
        }
        Ok(worst)
    }));

    let mut caveat = run_check(name("su2_caveat"), 0.0, || {
        let mut rng = rng();
        let mut below = 0;
        for _ in 0..cfg.trials {
            let a = Connection::random(lattice, &mut rng, Sampling::Uniform(1.0))?;
            if gauge::curvature(&a)?.su2_defect() <= 1e-6 {
                below += 1;
            }
        }
        Ok(below as f64)
    });
    caveat.detail = "number of random connections whose curvature stays within 1e-6 of su(2)".into();
    out.push(caveat);

    out.push(run_check(name("constant_abelian_curvature"), 1e-14, || {
        let mut rng = rng();
        let mut worst = 0.0_f64;
        for _ in 0..cfg.trials {
            let c: Vec<f64> = (0..3).map(|_| rng.real(Sampling::Uniform(1.0))).collect();
            let a = Connection::from_su2_fn(lattice, |_, axis| Su2Vector::new(0.0, 0.0, c[axis]))?;
            worst = worst.max(gauge::curvature(&a)?.su2_defect());
        }
        Ok(worst)
    }));

    out
}

fn reduction_checks(lattice: &Lattice, cfg: &VerifyConfig) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let mut per_slice = Vec::new();
    for n4 in [2, 5] {
        out.push(run_check(format!("reduction/equivalence {lattice} n4={n4}"), 0.0, || {
            let mut rng = FieldRng::new(cfg.seed);
            let mut worst = 0.0_f64;
            let mut slices = Vec::new();
            for _ in 0..cfg.trials {
                let (a, phi) = random_pair(lattice, &mut rng, Sampling::Uniform(1.0))?;
                let report = gauge::equivalence_check(&a, &phi, n4)?;
                worst = worst.max(report.max_discrepancy).max(report.max_delta4);
                slices.push(report.selfdual_sum_sq / n4 as f64);
            }
            per_slice.push(slices);
            Ok(worst)
        }));
    }
    out.push(run_check(format!("reduction/k4_independence {lattice}"), 1e-12, || {
        let [a, b] = per_slice.as_slice() else {
            return Ok(f64::INFINITY);
        };
        Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs() / x.abs().max(1.0)).fold(0.0, f64::max))
    }));
    out
}
