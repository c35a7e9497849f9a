//! The coefficient algebra gl(2,C) and its su(2) subspace.
//!
//! Cochain coefficients are 2×2 complex matrices. The su(2) elements used for
//! connections and Higgs fields are parametrized by three real coordinates in
//! the basis `{iσ1, iσ2, iσ3}` with the usual Pauli matrices
//!
//! ```text
//! σ1 = [[0, 1], [1, 0]]   σ2 = [[0, -i], [i, 0]]   σ3 = [[1, 0], [0, -1]]
//! ```

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2×2 complex matrix, stored row-major.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Matrix2C {
    pub entries: [[Complex64; 2]; 2],
}

impl Matrix2C {
    pub const fn new(entries: [[Complex64; 2]; 2]) -> Self {
        Self { entries }
    }

    pub const fn zero() -> Self {
        Self { entries: [[ZERO, ZERO], [ZERO, ZERO]] }
    }

    pub const fn identity() -> Self {
        Self { entries: [[ONE, ZERO], [ZERO, ONE]] }
    }

    /// Builds a matrix from real entries (imaginary parts zero).
    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Self::from_parts(m, [[0.0; 2]; 2])
    }

    pub fn from_parts(re: [[f64; 2]; 2], im: [[f64; 2]; 2]) -> Self {
        let e = |r: usize, c: usize| Complex64::new(re[r][c], im[r][c]);
        Self { entries: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row][col]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let e = &self.entries;
        Self { entries: [[e[0][0].conj(), e[1][0].conj()], [e[0][1].conj(), e[1][1].conj()]] }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let e = &self.entries;
        Self { entries: [[e[0][0] * s, e[0][1] * s], [e[1][0] * s, e[1][1] * s]] }
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.entries.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    /// Largest absolute value over the eight real components.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flatten().fold(0.0_f64, |m, z| m.max(z.re.abs()).max(z.im.abs()))
    }

    /// Real inner product `Re tr(self† other)`, the Frobenius inner product
    /// viewed on the underlying 8-dimensional real space.
    pub fn real_inner(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// The eight real components `[re00, im00, re01, im01, re10, im10, re11, im11]`.
    pub fn to_reals(&self) -> [f64; 8] {
        let mut out = [0.0; 8];
        for (slot, z) in out.chunks_exact_mut(2).zip(self.entries.iter().flatten()) {
            slot[0] = z.re;
            slot[1] = z.im;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl fmt::Debug for Matrix2C {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.entries;
        write!(f, "[[{}, {}], [{}, {}]]", e[0][0], e[0][1], e[1][0], e[1][1])
    }
}

impl Add for Matrix2C {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (&self.entries, &rhs.entries);
        Self { entries: [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]] }
    }
}

impl Sub for Matrix2C {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = (&self.entries, &rhs.entries);
        Self { entries: [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]] }
    }
}

impl Neg for Matrix2C {
    type Output = Self;
    fn neg(self) -> Self {
        let a = &self.entries;
        Self { entries: [[-a[0][0], -a[0][1]], [-a[1][0], -a[1][1]]] }
    }
}

impl Mul for Matrix2C {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (&self.entries, &rhs.entries);
        Self {
            entries: [
                [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
                [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
            ],
        }
    }
}

impl Mul<f64> for Matrix2C {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }
}

impl Mul<Matrix2C> for f64 {
    type Output = Matrix2C;
    fn mul(self, m: Matrix2C) -> Matrix2C {
        m * self
    }
}

impl AddAssign for Matrix2C {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for Matrix2C {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl std::iter::Sum for Matrix2C {
    fn sum<It: Iterator<Item = Self>>(iter: It) -> Self {
        iter.fold(Self::zero(), |acc, m| acc + m)
    }
}

// JSON form: [[[re, im], [re, im]], [[re, im], [re, im]]], row-major.
impl Serialize for Matrix2C {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rows: [[[f64; 2]; 2]; 2] =
            self.entries.map(|row| row.map(|z| [z.re, z.im]));
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix2C {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = <[[[f64; 2]; 2]; 2]>::deserialize(deserializer)?;
        let m = Self { entries: rows.map(|row| row.map(|[re, im]| Complex64::new(re, im))) };
        if !m.is_finite() {
            return Err(de::Error::custom("matrix entries must be finite"));
        }
        Ok(m)
    }
}

/// The Pauli matrices σ1, σ2, σ3.
pub fn pauli() -> [Matrix2C; 3] {
    [
        Matrix2C::new([[ZERO, ONE], [ONE, ZERO]]),
        Matrix2C::new([[ZERO, -I], [I, ZERO]]),
        Matrix2C::new([[ONE, ZERO], [ZERO, -ONE]]),
    ]
}

/// The su(2) basis `{iσ1, iσ2, iσ3}`.
pub fn su2_basis() -> [Matrix2C; 3] {
    pauli().map(|s| s.scale(I))
}

/// Coordinates of an su(2) element in the basis `{iσ1, iσ2, iσ3}`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Su2Vector {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Su2Vector {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub const fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

/// `i(a σ1 + b σ2 + c σ3)`, written out entrywise:
/// `[[i c, b + i a], [-b + i a, -i c]]`.
pub fn embed(v: Su2Vector) -> Matrix2C {
    let Su2Vector { a, b, c } = v;
    Matrix2C::new([
        [Complex64::new(0.0, c), Complex64::new(b, a)],
        [Complex64::new(-b, a), Complex64::new(0.0, -c)],
    ])
}

/// Reads the Pauli coordinates back from a matrix. Exact inverse of [`embed`]
/// on su(2); on general input it returns the coordinates of [`project_su2`].
pub fn extract(m: &Matrix2C) -> Su2Vector {
    let e = &m.entries;
    let a = 0.5 * (e[0][1].im + e[1][0].im);
    let b = 0.5 * (e[0][1].re - e[1][0].re);
    let c = 0.5 * (e[0][0].im - e[1][1].im);
    Su2Vector { a, b, c }
}

/// Orthogonal (Frobenius) projection onto su(2): the traceless part of the
/// anti-Hermitian part `(m - m†)/2`.
pub fn project_su2(m: &Matrix2C) -> Matrix2C {
    embed(extract(m))
}

pub fn frobenius_norm(m: &Matrix2C) -> f64 {
    m.frobenius_norm()
}

/// Distance from `m` to su(2) in the Frobenius norm.
pub fn su2_defect(m: &Matrix2C) -> f64 {
    (*m - project_su2(m)).frobenius_norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic pseudo-random matrices for the algebraic checks below.
    fn sample(seed: u64) -> Matrix2C {
        let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1);
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let mut re = [[0.0; 2]; 2];
        let mut im = [[0.0; 2]; 2];
        for r in 0..2 {
            for col in 0..2 {
                re[r][col] = next();
                im[r][col] = next();
            }
        }
        Matrix2C::from_parts(re, im)
    }

    fn close(a: &Matrix2C, b: &Matrix2C, tol: f64) -> bool {
        (*a - *b).max_abs() <= tol
    }

    #[test]
    fn embed_basis_and_zero() {
        assert_eq!(embed(Su2Vector::zero()), Matrix2C::zero());
        let expected = Matrix2C::new([[c(0.0, 0.0), c(0.0, 1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]);
        assert_eq!(embed(Su2Vector::new(1.0, 0.0, 0.0)), expected);
        let basis = su2_basis();
        for (g, v) in [(0, [1.0, 0.0, 0.0]), (1, [0.0, 1.0, 0.0]), (2, [0.0, 0.0, 1.0])] {
            assert_eq!(embed(Su2Vector::from_array(v)), basis[g]);
        }
    }

    #[test]
    fn embed_is_traceless_anti_hermitian() {
        for seed in 0..50 {
            let m = sample(seed);
            let v = Su2Vector::new(m.get(0, 0).re, m.get(0, 1).im, m.get(1, 1).re);
            let e = embed(v);
            assert!(e.trace().norm() <= 1e-14);
            assert!((e + e.adjoint()).max_abs() <= 1e-14);
            assert_eq!(extract(&e), v);
        }
    }

    #[test]
    fn ring_axioms_on_random_triples() {
        for seed in 0..40 {
            let (a, b, d) = (sample(3 * seed), sample(3 * seed + 1), sample(3 * seed + 2));
            assert!(close(&((a * b) * d), &(a * (b * d)), 1e-14));
            assert!(close(&(a * (b + d)), &(a * b + a * d), 1e-14));
            assert!(close(&((a + b) * d), &(a * d + b * d), 1e-14));
            assert_eq!(a + b, b + a);
            assert!(close(&(a * b).adjoint(), &(b.adjoint() * a.adjoint()), 1e-14));
            assert!(((a + b).trace() - a.trace() - b.trace()).norm() <= 1e-14);
            assert!(((a * b).trace() - (b * a).trace()).norm() <= 1e-14);
            assert_eq!(a * Matrix2C::identity(), a);
            assert_eq!(a.adjoint().adjoint(), a);
        }
    }

    #[test]
    fn frobenius_norm_values() {
        assert_eq!(frobenius_norm(&Matrix2C::zero()), 0.0);
        assert_eq!(frobenius_norm(&Matrix2C::identity()), 2f64.sqrt());
        for seed in 0..30 {
            let m = sample(seed);
            let via_trace = (m.adjoint() * m).trace();
            assert!(via_trace.im.abs() <= 1e-14);
            let rel = (frobenius_norm(&m) - via_trace.re.sqrt()).abs() / frobenius_norm(&m);
            assert!(rel <= 1e-14, "relative difference {rel}");
        }
    }

    #[test]
    fn projection_annihilates_identity_and_fixes_su2() {
        assert_eq!(project_su2(&Matrix2C::identity()), Matrix2C::zero());
        for seed in 0..30 {
            let m = sample(seed);
            let e = embed(extract(&m));
            assert!(close(&project_su2(&e), &e, 1e-15));
        }
    }

    #[test]
    fn projection_matches_least_squares_oracle() {
        // Independent route: minimize ‖m - Σ v_g B_g‖ over v by the normal
        // equations of the real 8×3 design matrix whose columns are the basis.
        let basis = su2_basis().map(|b| b.to_reals());
        for seed in 0..30 {
            let m = sample(seed);
            let target = m.to_reals();
            let mut gram = [[0.0; 3]; 3];
            let mut rhs = [0.0; 3];
            for g in 0..3 {
                for h in 0..3 {
                    gram[g][h] = (0..8).map(|t| basis[g][t] * basis[h][t]).sum();
                }
                rhs[g] = (0..8).map(|t| basis[g][t] * target[t]).sum();
            }
            // The Gram matrix is diagonal (2·I); solve it without assuming so.
            let v = solve3(gram, rhs);
            let oracle = embed(Su2Vector::from_array(v));
            assert!(close(&project_su2(&m), &oracle, 1e-14));
            // Local optimality: small moves along any direction do not help.
            let best = (m - oracle).frobenius_norm();
            for g in 0..3 {
                for step in [-1e-3, 1e-3] {
                    let mut w = v;
                    w[g] += step;
                    assert!((m - embed(Su2Vector::from_array(w))).frobenius_norm() >= best);
                }
            }
        }
    }

    fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
        for col in 0..3 {
            let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
            a.swap(col, pivot);
            b.swap(col, pivot);
            for row in col + 1..3 {
                let f = a[row][col] / a[col][col];
                for k in col..3 {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = [0.0; 3];
        for row in (0..3).rev() {
            let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
            x[row] = (b[row] - s) / a[row][row];
        }
        x
    }

    #[test]
    fn projection_is_idempotent_and_orthogonal() {
        for seed in 0..50 {
            let m = sample(seed);
            let p = project_su2(&m);
            assert!(close(&project_su2(&p), &p, 1e-14));
            let lhs = m.frobenius_norm_sqr();
            let rhs = p.frobenius_norm_sqr() + (m - p).frobenius_norm_sqr();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs);
        }
    }

    #[test]
    fn serde_shape() {
        let m = Matrix2C::from_parts([[1.0, 2.0], [3.0, 4.0]], [[0.5, -0.5], [0.0, -1.0]]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[1.0,0.5],[2.0,-0.5]],[[3.0,0.0],[4.0,-1.0]]]");
        let back: Matrix2C = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Matrix2C>("[[[1.0,0.5],[2.0,-0.5]]]").is_err());
    }
}
