//! Two-level system coupled to a spin `j` through `f(J) σ_x`.
//!
//! Full Hamiltonian `ω_s σ_z + ω J_z + f(J) σ_x`. With
//! `f(J) = sqrt(g² J_x² - ω_s²)` the adiabatic potentials are `±g J_x`, so the
//! branch Hamiltonians are rotated copies of `Ω J_z`, `Ω = sqrt(g² + ω²)`:
//! `H_± = exp(±i J_y φ) Ω J_z exp(∓i J_y φ)` with `tan φ = g/ω`. Starting from
//! the ground state `|j,-j(φ)> = exp(i J_y φ)|j,-j>`, the branch overlap is
//! `|1 - sin²2φ sin²(Ω t / 2)|^j`: collapse for large `j`, exact revivals
//! at `t_n = 2π n / Ω`.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, HermitianEigen};
use crate::specfun::{spin_operators, HalfInteger};
use crate::Branch;
use num_complex::Complex64;

/// Largest `2j + 1` accepted by the matrix evaluation of the overlap.
pub const MAX_NUMERIC_DIM: usize = 2001;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LargeSpinParams {
    pub j: HalfInteger,
    pub omega_s: f64,
    pub omega: f64,
    pub g: f64,
}

impl LargeSpinParams {
    pub fn new(j: HalfInteger, omega_s: f64, omega: f64, g: f64) -> Result<Self> {
        for (name, v) in [("omega_s", omega_s), ("omega", omega), ("g", g)] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        Ok(Self { j, omega_s, omega, g })
    }

    /// Precession frequency `Ω = sqrt(g² + ω²)`.
    pub fn precession(&self) -> f64 {
        self.g.hypot(self.omega)
    }
}

/// `φ = arctan(g/ω)`; the branches use `φ_± = ±φ`.
pub fn mixing_angle(params: &LargeSpinParams) -> Result<f64> {
    if params.omega == 0.0 {
        return Err(Error::param("omega", "zero precession frequency leaves tan φ undefined"));
    }
    Ok((params.g / params.omega).atan())
}

/// Closed form `|1 - sin²2φ sin²(Ω t / 2)|^j`.
pub fn decoherence_factor_analytic(params: &LargeSpinParams, t: f64) -> f64 {
    let phi = (params.g / params.omega).atan();
    let s2 = (2.0 * phi).sin().powi(2);
    let st = (0.5 * params.precession() * t).sin().powi(2);
    let base = (1.0 - s2 * st).abs();
    if base == 0.0 {
        return if params.j.twice() == 0 { 1.0 } else { 0.0 };
    }
    (params.j.value() * base.ln()).exp()
}

/// Revival times `2π n / Ω` for `n = 0..=n_max`.
pub fn revival_times(params: &LargeSpinParams, n_max: usize) -> Vec<f64> {
    let period = 2.0 * std::f64::consts::PI / params.precession();
    (0..=n_max).map(|n| n as f64 * period).collect()
}

/// Branch dynamics of one parameter set, with the rotations precomputed.
///
/// Rotations `exp(±i J_y φ)` come from one eigendecomposition of `J_y`.
#[derive(Clone, Debug)]
pub struct SpinBranches {
    params: LargeSpinParams,
    precession: f64,
    jz: Vec<f64>,
    rot_plus: CMatrix,
    rot_minus: CMatrix,
    initial: CVector,
    // exp(∓i J_y φ) |j,-j(φ)>, the state in the frame where H_± is diagonal
    frame_plus: CVector,
    frame_minus: CVector,
}

impl SpinBranches {
    pub fn new(params: LargeSpinParams) -> Result<Self> {
        let dim = params.j.dim();
        if dim > MAX_NUMERIC_DIM {
            return Err(Error::DimensionGuard { dim, limit: MAX_NUMERIC_DIM });
        }
        let phi = mixing_angle(&params)?;
        let ops = spin_operators(params.j)?;
        let jy = HermitianEigen::new(&ops.jy, 1e-12)?;
        // exp(+i J_y φ) = exp(-i J_y (-φ))
        let rot_plus = jy.evolution(-phi);
        let rot_minus = jy.evolution(phi);
        let mut lowest = CVector::zeros(dim);
        lowest[dim - 1] = Complex64::new(1.0, 0.0);
        let initial = &rot_plus * &lowest;
        let frame_plus = rot_minus.clone() * &initial;
        let frame_minus = rot_plus.clone() * &initial;
        let jz = (0..dim).map(|k| ops.jz[(k, k)].re).collect();
        Ok(Self { params, precession: params.precession(), jz, rot_plus, rot_minus, initial, frame_plus, frame_minus })
    }

    pub fn params(&self) -> &LargeSpinParams {
        &self.params
    }

    /// `|j,-j(φ)>`.
    pub fn initial_state(&self) -> &CVector {
        &self.initial
    }

    /// `|D_±(t)> = exp(±i J_y φ) exp(-i Ω t J_z) exp(∓i J_y φ) |j,-j(φ)>`.
    pub fn state(&self, branch: Branch, t: f64) -> CVector {
        let (rot, frame) = match branch {
            Branch::Plus => (&self.rot_plus, &self.frame_plus),
            Branch::Minus => (&self.rot_minus, &self.frame_minus),
        };
        let phased = CVector::from_iterator(
            frame.len(),
            frame.iter().zip(&self.jz).map(|(c, m)| c * Complex64::from_polar(1.0, -self.precession * m * t)),
        );
        rot * phased
    }

    /// `<D_-(t)|D_+(t)>`.
    pub fn overlap(&self, t: f64) -> Complex64 {
        self.state(Branch::Minus, t).dotc(&self.state(Branch::Plus, t))
    }
}

pub fn branch_state(params: &LargeSpinParams, branch: Branch, t: f64) -> Result<CVector> {
    Ok(SpinBranches::new(*params)?.state(branch, t))
}

/// `<D_-(t)|D_+(t)>` from the branch state vectors.
pub fn decoherence_factor_numeric(params: &LargeSpinParams, t: f64) -> Result<Complex64> {
    Ok(SpinBranches::new(*params)?.overlap(t))
}
