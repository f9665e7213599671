//! Branch decompositions and the reduced density matrix of the fast system.
//!
//! Overlap convention: `F[n][m] = <D_n|D_m>`. The reduced density matrix is
//! `rho[m][n] = c_m conj(c_n) F[n][m]`, so every off-diagonal coherence is the
//! free-evolution coherence weighted by the corresponding decoherence factor.

use std::collections::HashSet;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_deviation, CMatrix};

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = -1e-10;
const OVERLAP_TOL: f64 = 1e-10;

/// Amplitudes `c_n` of the fast system over its adiabatic branches.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchDecomposition {
    coefficients: Vec<Complex64>,
    labels: Vec<String>,
}

impl BranchDecomposition {
    pub fn new(coefficients: Vec<Complex64>, labels: Vec<String>) -> Result<Self> {
        if coefficients.len() != labels.len() {
            return Err(Error::DimensionMismatch { expected: coefficients.len(), found: labels.len() });
        }
        if coefficients.is_empty() {
            return Err(Error::param("coefficients", "at least one branch is required"));
        }
        let norm: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::param("coefficients", format!("sum of |c_n|^2 is {norm}, not 1")));
        }
        let mut seen = HashSet::new();
        if !labels.iter().all(|l| seen.insert(l.as_str())) {
            return Err(Error::param("labels", "branch labels must be unique"));
        }
        Ok(Self { coefficients, labels })
    }

    /// Labels the branches `0, 1, 2, ...`.
    pub fn from_coefficients(coefficients: Vec<Complex64>) -> Result<Self> {
        let labels = (0..coefficients.len()).map(|n| n.to_string()).collect();
        Self::new(coefficients, labels)
    }

    /// Equal-weight superposition of `n` branches with real amplitudes.
    pub fn uniform(n: usize) -> Result<Self> {
        let c = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        Self::from_coefficients(vec![c; n])
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// Hermitian, unit-trace, positive semidefinite state of the fast system.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDensityMatrix {
    entries: CMatrix,
}

impl ReducedDensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch { expected: entries.nrows(), found: entries.ncols() });
        }
        if entries.nrows() == 0 {
            return Err(Error::param("entries", "empty density matrix"));
        }
        let deviation = hermitian_deviation(&entries);
        if deviation > HERMITIAN_TOL {
            return Err(Error::InvalidDensity { what: "hermiticity", value: deviation });
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity { what: "unit trace", value: trace.re });
        }
        let rho = Self { entries };
        let lowest = rho.min_eigenvalue();
        if lowest < POSITIVITY_TOL {
            return Err(Error::InvalidDensity { what: "positivity", value: lowest });
        }
        Ok(rho)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let sym = (&self.entries + self.entries.adjoint()).scale(0.5);
        let mut values: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

/// Builds the reduced density matrix from branch amplitudes and the overlap
/// matrix `F[n][m] = <D_n|D_m>`.
pub fn reduced_density(branch: &BranchDecomposition, overlaps: &CMatrix) -> Result<ReducedDensityMatrix> {
    let dim = branch.len();
    if overlaps.nrows() != dim || overlaps.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: overlaps.nrows().max(overlaps.ncols()) });
    }
    for n in 0..dim {
        let diag = overlaps[(n, n)];
        if (diag - Complex64::new(1.0, 0.0)).norm() > OVERLAP_TOL {
            return Err(Error::param("overlaps", format!("F[{n}][{n}] = {diag}, expected 1")));
        }
    }
    let deviation = hermitian_deviation(overlaps);
    if deviation > OVERLAP_TOL {
        return Err(Error::NotHermitian { deviation });
    }

    let c = branch.coefficients();
    let entries = CMatrix::from_fn(dim, dim, |m, n| {
        if m == n {
            Complex64::new(c[m].norm_sqr(), 0.0)
        } else {
            c[m] * c[n].conj() * overlaps[(n, m)]
        }
    });
    ReducedDensityMatrix::new(entries)
}

/// `tr(rho^2)`.
pub fn purity(rho: &ReducedDensityMatrix) -> f64 {
    rho.entries().iter().map(|z| z.norm_sqr()).sum()
}

/// Two-branch overlap matrix `[[1, F], [conj F, 1]]` with `F = <D_0|D_1>`.
pub fn two_branch_overlaps(f01: Complex64) -> CMatrix {
    let one = Complex64::new(1.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[one, f01, f01.conj(), one])
}

/// Purity predicted from amplitudes and overlap magnitudes alone:
/// `Σ|c_n|^4 + Σ_{n≠m} |c_n|^2 |c_m|^2 |F_nm|^2`.
pub fn purity_from_overlaps(branch: &BranchDecomposition, overlaps: &CMatrix) -> f64 {
    let c = branch.coefficients();
    let mut total = 0.0;
    for n in 0..c.len() {
        for m in 0..c.len() {
            let w = c[n].norm_sqr() * c[m].norm_sqr();
            total += if n == m { w } else { w * overlaps[(n, m)].norm_sqr() };
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_branch_is_pure() {
        let b = BranchDecomposition::from_coefficients(vec![c(1.0), c(0.0)]).unwrap();
        let rho = reduced_density(&b, &two_branch_overlaps(Complex64::new(0.3, 0.4))).unwrap();
        assert_eq!(rho.get(0, 0), c(1.0));
        assert_eq!(rho.get(1, 1), c(0.0));
        assert_eq!(rho.get(0, 1), c(0.0));
    }

    #[test]
    fn complete_decoherence_and_coherence() {
        let b = BranchDecomposition::uniform(2).unwrap();
        let mixed = reduced_density(&b, &two_branch_overlaps(c(0.0))).unwrap();
        assert!((mixed.get(0, 0).re - 0.5).abs() < 1e-15);
        assert_eq!(mixed.get(0, 1), c(0.0));
        assert!((purity(&mixed) - 0.5).abs() < 1e-15);

        let pure = reduced_density(&b, &two_branch_overlaps(c(1.0))).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert!((pure.get(i, j) - c(0.5)).norm() < 1e-15);
        }
        assert!((purity(&pure) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn purity_of_half_overlap() {
        // 2x2 trace of rho^2 with rho = [[1/2, 1/4], [1/4, 1/2]] is 0.625
        let b = BranchDecomposition::uniform(2).unwrap();
        let rho = reduced_density(&b, &two_branch_overlaps(Complex64::from_polar(0.5, 0.7))).unwrap();
        assert!((purity(&rho) - 0.625).abs() < 1e-15);
    }

    #[test]
    fn off_diagonal_orientation() {
        let amps = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let b = BranchDecomposition::from_coefficients(amps.clone()).unwrap();
        let f01 = Complex64::new(0.2, -0.1);
        let rho = reduced_density(&b, &two_branch_overlaps(f01)).unwrap();
        // rho[1][0] = c_1 conj(c_0) F[0][1]
        assert!((rho.get(1, 0) - amps[1] * amps[0].conj() * f01).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(BranchDecomposition::from_coefficients(vec![c(1.0), c(1.0)]).is_err());
        assert!(BranchDecomposition::new(vec![c(1.0), c(0.0)], vec!["a".into(), "a".into()]).is_err());
        let b = BranchDecomposition::uniform(2).unwrap();
        assert!(matches!(reduced_density(&b, &CMatrix::identity(3, 3)), Err(Error::DimensionMismatch { .. })));
        let mut f = two_branch_overlaps(c(0.5));
        f[(1, 0)] = c(0.1);
        assert!(matches!(reduced_density(&b, &f), Err(Error::NotHermitian { .. })));
        let mut g = two_branch_overlaps(c(0.5));
        g[(0, 0)] = c(0.9);
        assert!(reduced_density(&b, &g).is_err());
    }

    fn branch_strategy(dim: usize) -> impl Strategy<Value = BranchDecomposition> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_filter_map("zero vector", |raw| {
            let norm: f64 = raw.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            if norm < 1e-3 {
                return None;
            }
            let amps = raw.iter().map(|&(a, b)| Complex64::new(a / norm, b / norm)).collect();
            BranchDecomposition::from_coefficients(amps).ok()
        })
    }

    proptest! {
        #[test]
        fn two_branch_outputs_are_valid_states(
            b in branch_strategy(2),
            mag in 0.0f64..=1.0,
            arg in -3.2f64..3.2,
        ) {
            let f = two_branch_overlaps(Complex64::from_polar(mag, arg));
            let rho = reduced_density(&b, &f).unwrap();
            let p = purity(&rho);
            prop_assert!((0.5 - 1e-12..=1.0 + 1e-12).contains(&p));
            prop_assert!((p - purity_from_overlaps(&b, &f)).abs() < 1e-12);
        }

        #[test]
        fn purity_monotone_in_overlap(
            b in branch_strategy(2),
            m1 in 0.0f64..=1.0,
            m2 in 0.0f64..=1.0,
            arg in -3.2f64..3.2,
        ) {
            let (lo, hi) = if m1 <= m2 { (m1, m2) } else { (m2, m1) };
            let p_lo = purity(&reduced_density(&b, &two_branch_overlaps(Complex64::from_polar(lo, arg))).unwrap());
            let p_hi = purity(&reduced_density(&b, &two_branch_overlaps(Complex64::from_polar(hi, arg))).unwrap());
            prop_assert!(p_lo <= p_hi + 1e-14);
        }

        #[test]
        fn gram_overlaps_give_valid_states(
            b in branch_strategy(3),
            raw in prop::collection::vec(-1.0f64..1.0, 18),
        ) {
            // overlaps of three random unit vectors in C^3 form a PSD Gram matrix
            let mut vecs = Vec::new();
            for k in 0..3 {
                let v: Vec<Complex64> = (0..3).map(|i| Complex64::new(raw[6 * k + 2 * i], raw[6 * k + 2 * i + 1])).collect();
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                prop_assume!(norm > 1e-3);
                vecs.push(v.into_iter().map(|z| z / norm).collect::<Vec<_>>());
            }
            let f = CMatrix::from_fn(3, 3, |n, m| {
                if n == m { return Complex64::new(1.0, 0.0); }
                vecs[n].iter().zip(&vecs[m]).map(|(a, b)| a.conj() * b).sum()
            });
            let rho = reduced_density(&b, &f).unwrap();
            let p = purity(&rho);
            prop_assert!((1.0 / 3.0 - 1e-12..=1.0 + 1e-12).contains(&p));
            prop_assert!((p - purity_from_overlaps(&b, &f)).abs() < 1e-12);
        }
    }
}
