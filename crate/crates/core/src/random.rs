//! Seeded random states, unitaries and POVMs for property checks and the
//! built-in verification suite.

use num_complex::Complex64;
use rand::rngs::ChaCha8Rng;
use rand::{RngExt, SeedableRng};
use rand_distr::StandardNormal;

use crate::numkit::{self, c, CMatrix};
use crate::qstate::DensityMatrix;

/// Deterministic generator used across the crate.
pub struct Rng64(ChaCha8Rng);

impl Rng64 {
    pub fn seeded(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        self.0.random_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }

    pub fn gaussian(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    pub fn complex_gaussian(&mut self) -> Complex64 {
        c(self.gaussian(), self.gaussian())
    }
}

/// Matrix with i.i.d. complex Gaussian entries.
pub fn ginibre(rng: &mut Rng64, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| rng.complex_gaussian())
}

/// Haar-like unitary from Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary(rng: &mut Rng64, dim: usize) -> CMatrix {
    let g = ginibre(rng, dim, dim);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        for q in &cols {
            let overlap: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= overlap * qi;
            }
        }
        let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    CMatrix::from_columns(&cols).expect("square basis")
}

/// Orthonormal basis given as the columns of a random unitary.
pub fn random_basis(rng: &mut Rng64, dim: usize) -> Vec<Vec<Complex64>> {
    let u = random_unitary(rng, dim);
    (0..dim).map(|j| u.column(j)).collect()
}

/// Full-rank random density matrix `G G^H / Tr(G G^H)`.
pub fn random_density(rng: &mut Rng64, dim: usize) -> DensityMatrix {
    let g = ginibre(rng, dim, dim);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_trusted(hermitize(&m.scale_real(1.0 / tr)))
}

/// Random pure state.
pub fn random_pure(rng: &mut Rng64, dim: usize) -> DensityMatrix {
    let psi: Vec<Complex64> = (0..dim).map(|_| rng.complex_gaussian()).collect();
    DensityMatrix::pure(&psi).expect("nonzero vector")
}

/// Random POVM with `outcomes` elements on `C^dim`: `E_q = S^{-1/2} A_q S^{-1/2}`
/// with `A_q` random PSD and `S = Σ A_q`.
pub fn random_povm(rng: &mut Rng64, dim: usize, outcomes: usize) -> Vec<CMatrix> {
    let parts: Vec<CMatrix> = (0..outcomes)
        .map(|_| {
            let g = ginibre(rng, dim, dim);
            &g * &g.adjoint()
        })
        .collect();
    let mut total = CMatrix::zeros(dim, dim);
    for a in &parts {
        total = &total + a;
    }
    let eig = numkit::hermitian_eig(&hermitize(&total), 1e-9).expect("Hermitian sum");
    let inv_sqrt = eig.reconstruct_with(|x| 1.0 / x.sqrt());
    parts
        .iter()
        .map(|a| hermitize(&(&(&inv_sqrt * a) * &inv_sqrt)))
        .collect()
}

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + &m.adjoint()).scale_real(0.5)
}
