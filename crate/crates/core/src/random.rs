//! Seeded random instances: states, Hamiltonians and structured unitaries.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::gates::Unitary;
use crate::linalg::{c64, register_dim, trace, CMatrix, DensityMatrix, HermitianOperator};
use crate::error::Error;

/// Independent ChaCha8 stream `index` under `seed`.
pub fn stream_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

fn dim_of(d: usize, n: usize) -> Result<usize> {
    register_dim(d, n).ok_or(Error::DimNotPower { dim: 0, d })
}

/// Full-rank state `(1-floor)·GG†/Tr + floor·I/D`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize, n: usize, floor: f64) -> Result<DensityMatrix> {
    let dim = dim_of(d, n)?;
    let g = ginibre(rng, dim, dim);
    let m = &g * g.adjoint();
    let m = m.unscale(trace(&m).re);
    DensityMatrix::new(m, d, n).map(|r| r.mix_with_identity(floor))
}

/// Haar-random pure state.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, d: usize, n: usize) -> Result<DensityMatrix> {
    let dim = dim_of(d, n)?;
    let v = ginibre(rng, dim, 1);
    let v = v.unscale(v.norm());
    DensityMatrix::pure(v.as_slice(), d, n)
}

/// GUE-like Hermitian matrix scaled to unit operator norm.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<CMatrix> {
    let g = ginibre(rng, dim, dim);
    let h = (&g + g.adjoint()).scale(0.5);
    let norm = HermitianOperator::new(h.clone())?.operator_norm();
    Ok(h.unscale(norm))
}

/// Random `k`-qudit Hermitian operator on random distinct positions.
pub fn random_local_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize, n: usize, k: usize) -> Result<HermitianOperator> {
    let local = random_hermitian(rng, dim_of(d, k)?)?;
    let positions = rand::seq::index::sample(rng, n, k).into_vec();
    HermitianOperator::local(&local, &positions, d, n)
}

pub fn random_diagonal_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize, n: usize) -> Result<Unitary> {
    let dim = dim_of(d, n)?;
    let phases: Vec<_> = (0..dim)
        .map(|_| num_complex::Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    Unitary::new(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(phases)), d, n, "diagonal")
}

/// Haar-random real orthogonal matrix from a sign-corrected QR.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, d: usize, n: usize) -> Result<Unitary> {
    let dim = dim_of(d, n)?;
    let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Unitary::new(q.map(|x| c64(x, 0.0)), d, n, "orthogonal")
}

/// Haar-random unitary from a phase-corrected QR.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize, n: usize) -> Result<Unitary> {
    let dim = dim_of(d, n)?;
    let qr = ginibre(rng, dim, dim).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let z = r[(j, j)];
        if z.norm() > 0.0 {
            let ph = z / z.norm();
            for e in q.column_mut(j).iter_mut() {
                *e *= ph;
            }
        }
    }
    Unitary::new(q, d, n, "haar")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (d, n) in [(2, 1), (2, 3), (3, 1)] {
            let rho = random_density(&mut rng, d, n, 0.01).unwrap();
            assert!(rho.spectrum().min() > 0.0);
            assert!(random_pure(&mut rng, d, n).unwrap().is_pure(1e-12));
            assert!(random_orthogonal(&mut rng, d, n).unwrap().is_real(0.0));
            assert!(random_diagonal_unitary(&mut rng, d, n).unwrap().is_monomial(1e-14));
            random_unitary(&mut rng, d, n).unwrap();
            let h = random_local_hermitian(&mut rng, d, n, 1).unwrap();
            assert!((h.operator_norm() - 1.0).abs() < 1e-12);
        }
    }
}
