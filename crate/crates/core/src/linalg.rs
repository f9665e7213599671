//! Dense complex linear algebra shared by the model modules and the oracles.
//!
//! Every unitary here is built from a Hermitian eigendecomposition, so the
//! result is unitary to rounding regardless of `‖H‖·t`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest entrywise `|m_ij - conj(m_ji)|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    Ok(m.nrows())
}

/// Spectral decomposition `H = V diag(λ) V†` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: DVector<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Decomposes `h`, rejecting it when it is not Hermitian within `tol`.
    pub fn new(h: &CMatrix, tol: f64) -> Result<Self> {
        ensure_square(h)?;
        let deviation = hermitian_deviation(h);
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        // symmetrize so the solver sees an exactly Hermitian input
        let sym = (h + h.adjoint()).scale(0.5);
        let eig = SymmetricEigen::new(sym);
        Ok(Self { values: eig.eigenvalues, vectors: eig.eigenvectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `exp(-i H t)` as a dense matrix.
    pub fn evolution(&self, t: f64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -lambda * t);
            for r in 0..n {
                scaled[(r, k)] *= phase;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `exp(-i H t) v` without forming the full propagator.
    pub fn apply_evolution(&self, v: &CVector, t: f64) -> CVector {
        let mut coeffs = self.vectors.ad_mul(v);
        for (c, &lambda) in coeffs.iter_mut().zip(self.values.iter()) {
            *c *= Complex64::from_polar(1.0, -lambda * t);
        }
        &self.vectors * coeffs
    }

    /// Applies `f(λ)` spectrally and returns `V diag(f(λ)) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for r in 0..n {
                scaled[(r, k)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// `exp(-i H t)` for Hermitian `h`.
pub fn unitary_exp(h: &CMatrix, t: f64) -> Result<CMatrix> {
    Ok(HermitianEigen::new(h, 1e-10)?.evolution(t))
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `a† b`.
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.dotc(b)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation of `u† u` from the identity.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(n, n))
}

pub fn real_matrix(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[0.0.into(), 1.0.into(), 1.0.into(), 0.0.into()])
    }

    #[test]
    fn pauli_x_rotation_closed_form() {
        let t = 0.37;
        let u = unitary_exp(&sigma_x(), t).unwrap();
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(t.cos(), 0.0),
                Complex64::new(0.0, -t.sin()),
                Complex64::new(0.0, -t.sin()),
                Complex64::new(t.cos(), 0.0),
            ],
        );
        assert!(max_abs_diff(&u, &expected) < 1e-14);
        assert!(unitarity_defect(&u) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = sigma_x();
        m[(0, 1)] = Complex64::new(1.0, 0.5);
        assert!(matches!(unitary_exp(&m, 1.0), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn apply_matches_matrix() {
        let h = CMatrix::from_fn(4, 4, |i, j| {
            let re = (i + j) as f64 * 0.3;
            let im = if i == j { 0.0 } else { (i as f64 - j as f64) * 0.2 };
            Complex64::new(re, im)
        });
        let eig = HermitianEigen::new(&h, 1e-12).unwrap();
        let v = CVector::from_fn(4, |i, _| Complex64::new(i as f64, 1.0));
        let a = eig.apply_evolution(&v, 1.3);
        let b = eig.evolution(1.3) * &v;
        assert!((a - b).norm() < 1e-13);
    }
}
