//! Seeded random fields.
//!
//! All randomness comes from SplitMix64 (state initialised to the seed,
//! increment `0x9e3779b97f4a7c15`, output mix constants `0xbf58476d1ce4e5b9`
//! and `0x94d049bb133111eb`). Reals in `[0, 1)` are formed from the top 53
//! bits of each output, so a seed reproduces the same fields on every
//! platform.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::chain::Chain;
use crate::cochain::Cochain;
use crate::lattice::{EdgeSet, Lattice};
use crate::matrix::{Matrix2C, Su2Vector};

pub const GENERATOR_NAME: &str = "splitmix64";

/// How each real component is drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sampling {
    /// Uniform on `[-amp, amp]`.
    Uniform(f64),
    /// Uniform integer in `[-max, max]`; products stay exactly representable.
    Integer(i64),
}

pub struct FieldRng {
    inner: SplitMix64,
}

impl FieldRng {
    pub fn new(seed: u64) -> Self {
        Self { inner: SplitMix64::seed_from_u64(seed) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)`.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn real(&mut self, sampling: Sampling) -> f64 {
        match sampling {
            Sampling::Uniform(amp) => amp * (2.0 * self.unit() - 1.0),
            Sampling::Integer(max) => self.below(2 * max as u64 + 1) as f64 - max as f64,
        }
    }

    /// A general gl(2,C) matrix.
    pub fn matrix(&mut self, sampling: Sampling) -> Matrix2C {
        let mut re = [[0.0; 2]; 2];
        let mut im = [[0.0; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                re[r][c] = self.real(sampling);
                im[r][c] = self.real(sampling);
            }
        }
        Matrix2C::from_parts(re, im)
    }

    pub fn su2(&mut self, sampling: Sampling) -> Su2Vector {
        let a = self.real(sampling);
        let b = self.real(sampling);
        let c = self.real(sampling);
        Su2Vector::new(a, b, c)
    }

    /// A form with general gl(2,C) entries. One matrix is drawn per storage
    /// slot, existing or not, so the stream does not depend on boundaries.
    pub fn cochain(&mut self, lattice: &Lattice, degree: usize, tilde: bool, sampling: Sampling) -> Cochain {
        let width = EdgeSet::all_of_size(lattice.dim(), degree).len();
        let draws: Vec<Matrix2C> = (0..lattice.num_sites() * width).map(|_| self.matrix(sampling)).collect();
        let sets = EdgeSet::all_of_size(lattice.dim(), degree);
        Cochain::from_fn(lattice, degree, tilde, |site, set| {
            let pos = sets.iter().position(|&s| s == set).expect("set of the right size");
            draws[site * width + pos]
        })
        .expect("degree within lattice dimension")
    }

    /// A chain with `terms` random existing cells of the given degree and
    /// integer coefficients in `[-max_coeff, max_coeff]`.
    pub fn chain(&mut self, lattice: &Lattice, degree: usize, terms: usize, max_coeff: i64) -> Chain {
        let sets = EdgeSet::all_of_size(lattice.dim(), degree);
        let mut chain = Chain::new(lattice);
        let mut added = 0;
        while added < terms {
            let site = self.below(lattice.num_sites() as u64) as usize;
            let set = sets[self.below(sets.len() as u64) as usize];
            let coeff = self.real(Sampling::Integer(max_coeff));
            if !lattice.cell_exists(site, set) {
                continue;
            }
            chain.add(&lattice.multi_index(site), set, coeff).expect("existing cell");
            added += 1;
        }
        chain
    }
}
