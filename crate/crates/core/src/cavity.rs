//! Driven cavity mode coupled to a movable mirror.
//!
//! Cavity `(ω + g x) a†a + f (a† + a)` with the mirror coordinate `x` frozen:
//! its eigenstates are the displaced Fock states `D(-λ)|n>`, `λ = f/(ω + g x)`,
//! with energies `n (ω + g x) - f²/(ω + g x)`. Linearizing the renormalized
//! potential, branch `n` drives the mirror oscillator `Ω b†b + g_n (b† + b)`
//! with `g_n = μ (n - f²/ω²)`, `μ = g / sqrt(2 M Ω)`, whose propagator is the
//! displacement `D[α_n(t)]`, `α_n(t) = -g_n (e^{iΩt} - 1) / Ω`.
//!
//! Overlaps: for a coherent mirror the branch overlap is a Gaussian in
//! `|α_n - α_m|`; for a Fock mirror `|n>` it is `e^{-z/2} |L_n(z)|` with
//! `z = |α_l - α_k|² = 4 (l-k)² μ² sin²(Ωt/2) / Ω²`. Truncated-Fock matrices
//! ([`displacement_matrix`]) provide the independent check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, HermitianEigen, I};
use crate::specfun::{bessel_j0, laguerre};

/// Smallest accepted Fock truncation.
pub const MIN_TRUNCATION: usize = 8;
/// Largest dense truncation (matrix size) used by this module.
pub const MAX_TRUNCATION: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CavityParams {
    pub omega: f64,
    pub g: f64,
    pub f_drive: f64,
    pub big_omega: f64,
    pub mass: f64,
    pub n_trunc: usize,
}

impl CavityParams {
    pub fn new(omega: f64, g: f64, f_drive: f64, big_omega: f64, mass: f64, n_trunc: usize) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::param("omega", format!("must be positive, got {omega}")));
        }
        if !(big_omega > 0.0) {
            return Err(Error::param("Omega", format!("must be positive, got {big_omega}")));
        }
        if !(mass > 0.0) {
            return Err(Error::param("M", format!("must be positive, got {mass}")));
        }
        if !g.is_finite() || !f_drive.is_finite() {
            return Err(Error::param("g", "coupling and drive must be finite"));
        }
        if n_trunc < MIN_TRUNCATION {
            return Err(Error::param("n_trunc", format!("must be at least {MIN_TRUNCATION}, got {n_trunc}")));
        }
        Ok(Self { omega, g, f_drive, big_omega, mass, n_trunc })
    }

    /// Parameters fixed by the mirror coupling `μ` directly: unit mirror mass
    /// and cavity frequency, no classical drive.
    pub fn from_mu(mu: f64, big_omega: f64, n_trunc: usize) -> Result<Self> {
        Self::new(1.0, mu * (2.0 * big_omega).sqrt(), 0.0, big_omega, 1.0, n_trunc)
    }

    /// `μ = g / sqrt(2 M Ω)`.
    pub fn mu(&self) -> f64 {
        self.g / (2.0 * self.mass * self.big_omega).sqrt()
    }

    /// Cavity displacement `λ(x) = f / (ω + g x)`.
    pub fn lambda(&self, x: f64) -> f64 {
        self.f_drive / (self.omega + self.g * x)
    }

    /// Mirror force of branch `n`, `g_n = μ (n - f²/ω²)`.
    pub fn branch_force(&self, n: u32) -> f64 {
        self.mu() * (n as f64 - (self.f_drive / self.omega).powi(2))
    }

    /// `α_n(t) = -g_n (e^{iΩt} - 1) / Ω`.
    pub fn alpha(&self, n: u32, t: f64) -> Complex64 {
        let e = Complex64::from_polar(1.0, self.big_omega * t) - 1.0;
        -e * (self.branch_force(n) / self.big_omega)
    }

    /// `z = |α_l(t) - α_k(t)|²`.
    pub fn fock_argument(&self, k: u32, l: u32, t: f64) -> f64 {
        let dn = l as f64 - k as f64;
        let s = (0.5 * self.big_omega * t).sin();
        4.0 * (dn * self.mu() * s / self.big_omega).powi(2)
    }
}

/// Truncation rule `max(4|α|² + 10|α| + 20, n + 20)`.
pub fn truncation_for(alpha_abs: f64, n: usize) -> usize {
    let by_alpha = (4.0 * alpha_abs * alpha_abs + 10.0 * alpha_abs + 20.0).ceil() as usize;
    by_alpha.max(n + 20)
}

/// `exp(α b† - α* b)` on the first `n_trunc` Fock states, from the
/// eigendecomposition of the Hermitian matrix `i (α b† - α* b)`.
pub fn displacement_matrix(alpha: Complex64, n_trunc: usize) -> Result<CMatrix> {
    if n_trunc == 0 || n_trunc > MAX_TRUNCATION {
        return Err(Error::DimensionGuard { dim: n_trunc, limit: MAX_TRUNCATION });
    }
    if alpha.norm_sqr() > n_trunc as f64 / 4.0 {
        return Err(Error::Truncation {
            reason: format!("|α|² = {} exceeds n_trunc/4 = {}", alpha.norm_sqr(), n_trunc as f64 / 4.0),
        });
    }
    if alpha == Complex64::new(0.0, 0.0) {
        return Ok(CMatrix::identity(n_trunc, n_trunc));
    }
    let mut h = CMatrix::zeros(n_trunc, n_trunc);
    for k in 1..n_trunc {
        let s = (k as f64).sqrt();
        // b†: <k|b†|k-1> = sqrt(k)
        h[(k, k - 1)] = I * alpha * s;
        h[(k - 1, k)] = -I * alpha.conj() * s;
    }
    // generator G = -i h, so exp(G) = exp(-i h · 1)
    Ok(HermitianEigen::new(&h, 1e-12)?.evolution(1.0))
}

/// Coherent state `|α>` on `dim` Fock states (not renormalized).
pub fn coherent_state(alpha: Complex64, dim: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    let mut amp = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for k in 0..dim {
        if k > 0 {
            amp *= alpha / (k as f64).sqrt();
        }
        v[k] = amp;
    }
    v
}

/// Fock state `|n>` on `dim` states.
pub fn fock_state(n: usize, dim: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[n] = Complex64::new(1.0, 0.0);
    v
}

/// Truncated cavity Hamiltonian `(ω + g x) a†a + f (a† + a)`.
pub fn cavity_hamiltonian(params: &CavityParams, x: f64) -> CMatrix {
    let n = params.n_trunc;
    let w = params.omega + params.g * x;
    let mut h = CMatrix::zeros(n, n);
    for k in 0..n {
        h[(k, k)] = Complex64::new(w * k as f64, 0.0);
        if k > 0 {
            let s = params.f_drive * (k as f64).sqrt();
            h[(k, k - 1)] = Complex64::new(s, 0.0);
            h[(k - 1, k)] = Complex64::new(s, 0.0);
        }
    }
    h
}

/// Energy `n (ω + g x) - f²/(ω + g x)` of the adiabatic state `|n[x]>`.
pub fn adiabatic_energy(params: &CavityParams, n: usize, x: f64) -> f64 {
    let w = params.omega + params.g * x;
    n as f64 * w - params.f_drive * params.f_drive / w
}

/// Adiabatic photon state `D(-λ(x)) |n>` on `n_trunc` Fock states.
///
/// Built in a larger working space and cut back; fails when more than `1e-8`
/// of the norm would be lost by the cut.
pub fn adiabatic_photon_state(params: &CavityParams, n: usize, x: f64) -> Result<CVector> {
    let lambda = params.lambda(x);
    if !lambda.is_finite() {
        return Err(Error::param("x", "ω + g x vanishes"));
    }
    if n >= params.n_trunc {
        return Err(Error::Truncation { reason: format!("level {n} outside n_trunc = {}", params.n_trunc) });
    }
    let work = truncation_for(lambda.abs(), n).max(params.n_trunc) + 20;
    let d = displacement_matrix(Complex64::new(-lambda, 0.0), work)?;
    let full = d.column(n).into_owned();
    cut(&full, params.n_trunc)
}

fn cut(full: &CVector, dim: usize) -> Result<CVector> {
    let kept = full.rows(0, dim).into_owned();
    let deficit = 1.0 - kept.norm_squared();
    if deficit > 1e-8 {
        return Err(Error::Truncation { reason: format!("norm deficit {deficit:e} at n_trunc = {dim}") });
    }
    Ok(kept)
}

/// `|n g f ẋ| / ω³`, the order of magnitude of the non-adiabatic coupling.
pub fn adiabatic_ratio(params: &CavityParams, n: u32, xdot: f64) -> f64 {
    (n as f64 * params.g * params.f_drive * xdot).abs() / params.omega.powi(3)
}

/// Mirror branch `D[α_n(t)] |α_0>` on `n_trunc` Fock states.
pub fn mirror_branch(params: &CavityParams, n: u32, alpha0: Complex64, t: f64) -> Result<CVector> {
    let alpha = params.alpha(n, t);
    let work = truncation_for(alpha.norm() + alpha0.norm(), 0).max(params.n_trunc) + 20;
    if work > MAX_TRUNCATION {
        return Err(Error::DimensionGuard { dim: work, limit: MAX_TRUNCATION });
    }
    let init = coherent_state(alpha0, work);
    let full = displacement_matrix(alpha, work)? * init;
    cut(&full, params.n_trunc)
}

/// `|<D_m(t)|D_n(t)>| = exp(-(n-m)² (2μ²/Ω²) sin²(Ωt/2))` for a coherent mirror.
pub fn overlap_coherent(params: &CavityParams, m: u32, n: u32, t: f64) -> f64 {
    (-0.5 * params.fock_argument(m, n, t)).exp()
}

/// Slow-mirror limit `exp(-(n-m)² μ² t² / 2)`.
pub fn overlap_coherent_limit(params: &CavityParams, m: u32, n: u32, t: f64) -> f64 {
    let dn = n as f64 - m as f64;
    (-0.5 * (dn * params.mu() * t).powi(2)).exp()
}

/// `|<n| D(-α_k) D(α_l) |n>| = e^{-z/2} |L_n(z)|`, `z = |α_l - α_k|²`.
pub fn overlap_fock(params: &CavityParams, k: u32, l: u32, n_mirror: u32, t: f64) -> Result<f64> {
    let z = params.fock_argument(k, l, t);
    Ok((-0.5 * z).exp() * laguerre(n_mirror, z)?.abs())
}

/// Large-`n` form `e^{-z/2} J_0(2 sqrt(n z))` (signed, so the oscillation of
/// `J_0` stays visible).
pub fn overlap_fock_limit(params: &CavityParams, k: u32, l: u32, n_mirror: u32, t: f64) -> f64 {
    let z = params.fock_argument(k, l, t);
    (-0.5 * z).exp() * bessel_j0(2.0 * (n_mirror as f64 * z).sqrt())
}

/// The Fock-mirror overlap with the argument as usually printed,
/// `e^{-z'/2} L_n(z')` with `z' = (l-k)² μ² sin²(Ωt/2) / Ω² = z/4`.
/// Kept for comparison only; at `n = 0` it does not reduce to
/// [`overlap_coherent`].
pub fn overlap_fock_printed(params: &CavityParams, k: u32, l: u32, n_mirror: u32, t: f64) -> Result<f64> {
    let z = 0.25 * params.fock_argument(k, l, t);
    Ok((-0.5 * z).exp() * laguerre(n_mirror, z)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_defect;
    use std::f64::consts::PI;

    fn driven() -> CavityParams {
        CavityParams::new(1.0, 0.05, 0.5, 0.1, 1.0, 40).unwrap()
    }

    #[test]
    fn validation() {
        assert!(CavityParams::new(0.0, 0.1, 0.0, 1.0, 1.0, 20).is_err());
        assert!(CavityParams::new(1.0, 0.1, 0.0, 0.0, 1.0, 20).is_err());
        assert!(CavityParams::new(1.0, 0.1, 0.0, 1.0, -1.0, 20).is_err());
        assert!(CavityParams::new(1.0, 0.1, 0.0, 1.0, 1.0, 7).is_err());
        let p = CavityParams::from_mu(0.3, 0.5, 20).unwrap();
        assert!((p.mu() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn displacement_basics() {
        let id = displacement_matrix(Complex64::new(0.0, 0.0), 10).unwrap();
        assert_eq!(id, CMatrix::identity(10, 10));
        let alpha = Complex64::new(0.8, -0.5);
        let n = truncation_for(alpha.norm(), 0);
        let d = displacement_matrix(alpha, n).unwrap();
        assert!(unitarity_defect(&d) < 1e-10);
        let v = d.column(0).into_owned();
        let mean: Complex64 = (1..n).map(|k| v[k - 1].conj() * v[k] * (k as f64).sqrt()).sum();
        assert!((mean - alpha).norm() < 1e-8);
        assert!((v - coherent_state(alpha, n)).norm() < 1e-8);
        assert!(displacement_matrix(Complex64::new(3.0, 0.0), 20).is_err());
    }

    #[test]
    fn displacement_inverse_and_composition() {
        let (a, b) = (Complex64::new(0.6, 0.2), Complex64::new(-0.3, 0.7));
        let n = 60;
        let keep = 15;
        let da = displacement_matrix(a, n).unwrap();
        let dma = displacement_matrix(-a, n).unwrap();
        let prod = &da * &dma;
        let block = |m: &CMatrix| m.view((0, 0), (keep, keep)).into_owned();
        assert!(crate::linalg::max_abs_diff(&block(&prod), &CMatrix::identity(keep, keep)) < 1e-8);
        let phase = Complex64::from_polar(1.0, (a * b.conj()).im);
        let lhs = &da * displacement_matrix(b, n).unwrap();
        let rhs = displacement_matrix(a + b, n).unwrap() * phase;
        let worst = (block(&lhs) - block(&rhs)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(worst < 1e-7, "{worst:e}");
    }

    #[test]
    fn adiabatic_states_are_eigenvectors() {
        let undriven = CavityParams::new(1.0, 0.05, 0.0, 0.1, 1.0, 20).unwrap();
        let v = adiabatic_photon_state(&undriven, 3, 0.4).unwrap();
        assert!((v - fock_state(3, 20)).norm() < 1e-12);

        let p = driven();
        let x = 0.4;
        let vac = adiabatic_photon_state(&p, 0, x).unwrap();
        let coh = coherent_state(Complex64::new(-p.lambda(x), 0.0), p.n_trunc);
        assert!((vac - coh).norm() < 1e-8);
        let h = cavity_hamiltonian(&p, x);
        for n in [0usize, 2, 5] {
            let v = adiabatic_photon_state(&p, n, x).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-8);
            let e = adiabatic_energy(&p, n, x);
            let residual = (&h * &v - &v * Complex64::new(e, 0.0)).norm();
            assert!(residual < 1e-7, "n={n}: {residual:e}");
        }
    }

    #[test]
    fn adiabatic_state_matches_dense_eigensolve() {
        // λ = 0.5 at x = 0
        let p = CavityParams::new(1.0, 0.0, 0.5, 0.1, 1.0, 40).unwrap();
        let eig = HermitianEigen::new(&cavity_hamiltonian(&p, 0.0), 1e-12).unwrap();
        let mut order: Vec<usize> = (0..p.n_trunc).collect();
        order.sort_by(|&a, &b| eig.values[a].total_cmp(&eig.values[b]));
        let k = order[2];
        assert!((eig.values[k] - adiabatic_energy(&p, 2, 0.0)).abs() < 1e-10);
        let dense = eig.vectors.column(k).into_owned();
        let v = adiabatic_photon_state(&p, 2, 0.0).unwrap();
        assert!((dense.dotc(&v).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn truncated_completeness() {
        let p = CavityParams { n_trunc: 60, ..driven() };
        let keep = 30;
        let mut proj = CMatrix::zeros(p.n_trunc, p.n_trunc);
        for n in 0..keep {
            let v = adiabatic_photon_state(&p, n, 0.2).unwrap();
            proj += &v * v.adjoint();
        }
        for k in 0..keep / 2 {
            let e = fock_state(k, p.n_trunc);
            let deficit = 1.0 - e.dotc(&(&proj * &e)).re;
            assert!(deficit.abs() < 1e-6, "k={k}: {deficit:e}");
        }
    }

    #[test]
    fn truncation_guard() {
        let p = CavityParams::new(1.0, 0.0, 3.0, 0.1, 1.0, 10).unwrap();
        assert!(matches!(adiabatic_photon_state(&p, 2, 0.0), Err(Error::Truncation { .. })));
        assert!(adiabatic_photon_state(&driven(), 40, 0.0).is_err());
    }

    #[test]
    fn ratio_examples() {
        let p = CavityParams::new(1.0, 0.01, 1.0, 0.1, 1.0, 20).unwrap();
        assert!((adiabatic_ratio(&p, 1, 0.1) - 1e-3).abs() < 1e-15);
        assert_eq!(adiabatic_ratio(&p, 1, 0.0), 0.0);
        let undriven = CavityParams::new(1.0, 0.01, 0.0, 0.1, 1.0, 20).unwrap();
        assert_eq!(adiabatic_ratio(&undriven, 3, 0.5), 0.0);
    }

    #[test]
    fn coherent_overlap_examples() {
        let p = CavityParams::from_mu(1.0, 1.0, 20).unwrap();
        assert!((overlap_coherent(&p, 0, 1, PI) - (-2.0f64).exp()).abs() < 1e-12);
        assert_eq!(overlap_coherent(&p, 3, 3, 1.7), 1.0);
        assert!((overlap_coherent(&p, 0, 1, 2.0 * PI) - 1.0).abs() < 1e-12);
        let q = CavityParams::from_mu(0.5, 0.01, 20).unwrap();
        assert!((overlap_coherent_limit(&q, 0, 2, 1.0) - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(overlap_coherent_limit(&q, 0, 2, 0.0), 1.0);
        assert_eq!(overlap_coherent_limit(&q, 4, 4, 9.0), 1.0);
    }

    #[test]
    fn mirror_branches() {
        let p = CavityParams::new(1.0, 0.3, 0.0, 0.7, 1.0, 30).unwrap();
        let alpha0 = Complex64::new(0.5, -0.2);
        let start = mirror_branch(&p, 2, alpha0, 0.0).unwrap();
        assert!((start - coherent_state(alpha0, 30)).norm() < 1e-10);
        // n = f²/ω² leaves the mirror alone
        let q = CavityParams::new(1.0, 0.3, 1.0, 0.7, 1.0, 30).unwrap();
        let still = mirror_branch(&q, 1, alpha0, 3.3).unwrap();
        assert!((still - coherent_state(alpha0, 30)).norm() < 1e-10);
        for &t in &[0.4, 2.0, 4.5] {
            let a = mirror_branch(&p, 1, alpha0, t).unwrap();
            let b = mirror_branch(&p, 3, alpha0, t).unwrap();
            assert!((a.dotc(&b).norm() - overlap_coherent(&p, 1, 3, t)).abs() < 1e-8);
        }
    }

    #[test]
    fn fock_overlap_identities() {
        let p = CavityParams::from_mu(0.4, 0.3, 30).unwrap();
        for &t in &[0.0, 1.0, 5.0, 9.0] {
            assert_eq!(overlap_fock(&p, 0, 2, 0, t).unwrap(), overlap_coherent(&p, 0, 2, t));
            assert_eq!(overlap_fock(&p, 3, 3, 7, t).unwrap(), 1.0);
        }
    }

    #[test]
    fn fock_overlap_against_matrix_element() {
        // <3| D(δ) |3> at |δ|² = 1.2
        let delta = Complex64::from_polar(1.2f64.sqrt(), 0.7);
        let d = displacement_matrix(delta, 60).unwrap();
        let want = (-0.6f64).exp() * laguerre(3, 1.2).unwrap().abs();
        assert!((d[(3, 3)].norm() - want).abs() < 1e-10);
        // and through the model's α_k, α_l
        let p = CavityParams::from_mu(0.35, 0.5, 30).unwrap();
        for &t in &[0.8, 3.0, 6.0] {
            let dk = displacement_matrix(-p.alpha(1, t), 80).unwrap();
            let dl = displacement_matrix(p.alpha(3, t), 80).unwrap();
            let el = (dk * dl)[(4, 4)].norm();
            assert!((el - overlap_fock(&p, 1, 3, 4, t).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn fock_limit() {
        let p = CavityParams::from_mu(0.05, 1.0, 30).unwrap();
        assert_eq!(overlap_fock_limit(&p, 0, 1, 10, 0.0), 1.0);
        // choose t so that z = 0.01
        let t = 2.0 * (0.01f64.sqrt() / (2.0 * 0.05)).asin();
        assert!((p.fock_argument(0, 1, t) - 0.01).abs() < 1e-12);
        let exact = overlap_fock(&p, 0, 1, 100, t).unwrap();
        let approx = overlap_fock_limit(&p, 0, 1, 100, t);
        assert!((approx / exact - 1.0).abs() < 0.02);
    }

    #[test]
    fn printed_form_disagrees_at_n_zero() {
        let p = CavityParams::from_mu(0.5, 1.0, 20).unwrap();
        // z = 1 at Ωt = π
        assert!((p.fock_argument(0, 1, PI) - 1.0).abs() < 1e-12);
        let printed = overlap_fock_printed(&p, 0, 1, 0, PI).unwrap();
        let corrected = overlap_fock(&p, 0, 1, 0, PI).unwrap();
        assert!((printed - (-0.125f64).exp()).abs() < 1e-12);
        assert!((corrected - overlap_coherent(&p, 0, 1, PI)).abs() < 1e-15);
        assert!((printed - corrected).abs() / corrected > 0.1);
    }
}
