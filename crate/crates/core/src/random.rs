//! Seeded random instances: Haar unitaries, densities, pure states,
//! probability vectors and doubly stochastic matrices.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex;
// shadowed by inherent methods whenever std is linked somewhere in the build
#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{diag, CMatrix, CVector, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal sample (Box–Muller).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    Complex::new(gaussian(rng), gaussian(rng)) * core::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase fixing.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = DMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..d {
        let rk = r[(k, k)];
        let phase = if rk.norm() > 0.0 { rk / rk.norm() } else { Complex::new(1.0, 0.0) };
        q.column_mut(k).scale_mut_complex(phase);
    }
    q
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, s: C64);
}

impl<S> ScaleComplex for nalgebra::Matrix<C64, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<C64, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_complex(&mut self, s: C64) {
        for x in self.iter_mut() {
            *x *= s;
        }
    }
}

/// Uniform sample from the probability simplex (flat Dirichlet).
pub fn probability_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

/// `u diag(p) u†` with Haar `u` and flat-Dirichlet `p`.
pub fn density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let p = probability_vector(d, rng);
    let u = haar_unitary(d, rng);
    &u * diag(&p) * u.adjoint()
}

/// Density with a prescribed spectrum in a Haar-random eigenbasis.
pub fn density_with_spectrum<R: Rng + ?Sized>(spectrum: &[f64], rng: &mut R) -> CMatrix {
    let u = haar_unitary(spectrum.len(), rng);
    &u * diag(spectrum) * u.adjoint()
}

/// Haar-random unit vector.
pub fn pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(d, |_, _| complex_gaussian(rng));
    let n = v.norm();
    v / Complex::new(n, 0.0)
}

pub fn permutation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..d).collect();
    p.shuffle(rng);
    p
}

/// Random convex combination of `terms` permutation matrices.
pub fn doubly_stochastic<R: Rng + ?Sized>(d: usize, terms: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let weights = probability_vector(terms, rng);
    let mut m = alloc::vec![alloc::vec![0.0; d]; d];
    for w in weights {
        let p = permutation(d, rng);
        for (i, &j) in p.iter().enumerate() {
            m[i][j] += w;
        }
    }
    m
}
