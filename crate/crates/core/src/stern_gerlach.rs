//! Spin-1/2 particle crossing a helical, linearly growing magnetic field.
//!
//! Field direction `n(x) = (sinθ cos kx, sinθ sin kx, cosθ)`, magnitude
//! `B(x) ≈ ∂_x B(0) x`, so the spin Hamiltonian is `f x n(x)·σ` with
//! `f = μ ∂_x B(0)`. The adiabatic spinors `χ_±[x]` carry branch potentials
//! `V_± = ±f x` and constant gauge potentials `A_± = k (1 ± cosθ) / 2`; the
//! branch packets are the exact solutions of
//! `H_± = (p - A_±)^2 / 2M ± f x` for a Gaussian of width `a` at rest.
//!
//! The two branch packets separate and their overlap
//! `F(t) = <D_+(t)|D_-(t)>` decays. Three evaluations are provided:
//! [`decoherence_factor`] (the customary closed form, first exponent
//! `a²f²t²`), [`branch_overlap_exact`] (the momentum-space integral, first
//! exponent `2a²f²t²`) and [`branch_overlap_quadrature`] (position-space
//! quadrature of the two wave functions). The last two agree; the first
//! differs by a factor two in the force term.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::packet::{spread_width, GaussianPacket};
use crate::Branch;

/// Model parameters. `force = gyro * field_gradient`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SGParams {
    pub mass: f64,
    pub width: f64,
    pub force: f64,
    pub helix_k: f64,
    pub tilt: f64,
    pub gyro: f64,
    pub field_gradient: f64,
}

impl SGParams {
    pub fn new(mass: f64, width: f64, gyro: f64, field_gradient: f64, helix_k: f64, tilt: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::param("mass", format!("must be positive, got {mass}")));
        }
        if !(width > 0.0) {
            return Err(Error::param("width", format!("must be positive, got {width}")));
        }
        if !(0.0..=PI).contains(&tilt) {
            return Err(Error::param("theta", format!("{tilt} outside [0, π]")));
        }
        for (name, v) in [("gyro", gyro), ("field_gradient", field_gradient), ("k", helix_k)] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        Ok(Self { mass, width, force: gyro * field_gradient, helix_k, tilt, gyro, field_gradient })
    }

    /// Parameters specified by the force directly (unit gyromagnetic ratio).
    pub fn with_force(mass: f64, width: f64, force: f64, helix_k: f64, tilt: f64) -> Result<Self> {
        Self::new(mass, width, 1.0, force, helix_k, tilt)
    }

    pub fn gauge(&self, branch: Branch) -> f64 {
        let (plus, minus) = induced_gauge(self.tilt, self.helix_k);
        match branch {
            Branch::Plus => plus,
            Branch::Minus => minus,
        }
    }

    pub fn packet(&self) -> GaussianPacket {
        GaussianPacket { center: 0.0, momentum: 0.0, width: self.width, mass: self.mass }
    }

    /// Magnitude `μ B(x)` of the linearized field, signed.
    pub fn field_energy(&self, x: f64) -> f64 {
        self.force * x
    }
}

/// Wei-Norman factorization `U = e^{α p²} e^{β p} e^{γ x} e^{μ}` of
/// `exp(-i t [p²/2M - A p/M + f x])`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeiNormanParams {
    pub alpha_t: Complex64,
    pub beta_t: Complex64,
    pub gamma_t: Complex64,
    pub mu_t: Complex64,
}

/// Unit field direction `n(x)`.
pub fn field_direction(x: f64, theta: f64, k: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (s, c) = (k * x).sin_cos();
    [st * c, st * s, ct]
}

/// Eigenvectors of `n(x)·σ` with eigenvalues `+1` and `-1`.
pub fn adiabatic_spinors(x: f64, theta: f64, k: f64) -> ([Complex64; 2], [Complex64; 2]) {
    let (sh, ch) = (0.5 * theta).sin_cos();
    let phase = Complex64::from_polar(1.0, -k * x);
    let plus = [phase * ch, Complex64::new(sh, 0.0)];
    let minus = [phase * sh, Complex64::new(-ch, 0.0)];
    (plus, minus)
}

/// `|ẋ k sinθ / (μ B(x))|`; must be small for the adiabatic picture.
pub fn adiabaticity_ratio(params: &SGParams, xdot: f64, b_of_x: f64) -> Result<f64> {
    let energy = params.gyro * b_of_x;
    if energy == 0.0 || !energy.is_finite() {
        return Err(Error::param("b_of_x", "zero field: the adiabatic levels cross"));
    }
    Ok((xdot * params.helix_k * params.tilt.sin() / energy).abs())
}

/// Induced gauge potentials `(A_+, A_-) = (k (1 + cosθ) / 2, k (1 - cosθ) / 2)`.
pub fn induced_gauge(theta: f64, k: f64) -> (f64, f64) {
    let c = theta.cos();
    (0.5 * k * (1.0 + c), 0.5 * k * (1.0 - c))
}

pub fn wei_norman_params(mass: f64, gauge_a: f64, force: f64, t: f64) -> Result<WeiNormanParams> {
    if !(mass > 0.0) {
        return Err(Error::param("mass", format!("must be positive, got {mass}")));
    }
    let i = Complex64::new(0.0, 1.0);
    Ok(WeiNormanParams {
        alpha_t: -i * (t / (2.0 * mass)),
        beta_t: i * (-force * t * t / (2.0 * mass) + gauge_a * t / mass),
        gamma_t: -i * (t * force),
        mu_t: i * (-force * force * t.powi(3) / (6.0 * mass) + gauge_a * force * t * t / (2.0 * mass)),
    })
}

/// Packet centre `x_±(t) = ∓ f t² / 2M - A_± t / M`.
pub fn trajectory(params: &SGParams, branch: Branch, t: f64) -> f64 {
    let s = branch.sign();
    -s * params.force * t * t / (2.0 * params.mass) - params.gauge(branch) * t / params.mass
}

/// Global phase `Ω_±(t)` of the branch packet: `f²t³/6M ± A_± f t²/2M + A_±² t/2M`.
fn branch_phase(params: &SGParams, branch: Branch, t: f64) -> f64 {
    let (m, f, a) = (params.mass, params.force, params.gauge(branch));
    f * f * t.powi(3) / (6.0 * m) + branch.sign() * a * f * t * t / (2.0 * m) + a * a * t / (2.0 * m)
}

/// `<x|D_±(t)>`: Gaussian with complex width `a² + it/2M` centred on the
/// classical trajectory, times the momentum kick `e^{∓ i f t x}`.
pub fn branch_wavefunction(params: &SGParams, branch: Branch, t: f64, x: f64) -> Complex64 {
    let a2 = params.width * params.width;
    let q = Complex64::new(a2, t / (2.0 * params.mass));
    let norm = (a2 / (2.0 * PI.powi(3))).powf(0.25) * (Complex64::new(PI, 0.0) / q).sqrt();
    let y = x - trajectory(params, branch, t);
    let phase = -branch_phase(params, branch, t) - branch.sign() * params.force * t * x;
    norm * Complex64::from_polar(1.0, phase) * (-(y * y) / (4.0 * q)).exp()
}

/// Customary closed form `exp[-a²f²t² - (f t²/M - k cosθ t/M)² / 8a²]`.
pub fn decoherence_factor(params: &SGParams, t: f64) -> f64 {
    let (a, f, m) = (params.width, params.force, params.mass);
    let d = (f * t * t - params.helix_k * params.tilt.cos() * t) / m;
    (-a * a * f * f * t * t - d * d / (8.0 * a * a)).exp()
}

/// `<D_+(t)|D_-(t)>` evaluated in momentum space: both branch states are
/// Gaussians displaced by `∓ f t` with quadratic phases, so the integral is
/// elementary.
pub fn branch_overlap_exact(params: &SGParams, t: f64) -> Complex64 {
    let (a, f, m, k) = (params.width, params.force, params.mass, params.helix_k);
    let c = params.tilt.cos();
    let d = (f * t * t - k * c * t) / m;
    let magnitude = (-2.0 * a * a * f * f * t * t - d * d / (8.0 * a * a)).exp();
    let phase = (t * k * k * c - f * t * t * k) / (2.0 * m);
    Complex64::from_polar(magnitude, phase)
}

/// `<D_+(t)|D_-(t)>` by trapezoidal quadrature of [`branch_wavefunction`].
/// The grid spans twelve spread widths beyond both centres and resolves the
/// relative momentum `2 f t`.
pub fn branch_overlap_quadrature(params: &SGParams, t: f64) -> Complex64 {
    let w = spread_width(params.width, params.mass, t);
    let (xp, xm) = (trajectory(params, Branch::Plus, t), trajectory(params, Branch::Minus, t));
    let lo = xp.min(xm) - 12.0 * w;
    let hi = xp.max(xm) + 12.0 * w;
    let kmax = 2.0 * (params.force * t).abs() + 1.0 / params.width + (params.helix_k * t / params.mass).abs();
    let dx = (w / 8.0).min(PI / (4.0 * kmax));
    let n = ((hi - lo) / dx).ceil() as usize + 1;
    let dx = (hi - lo) / (n - 1) as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let x = lo + i as f64 * dx;
        let weight = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        sum += branch_wavefunction(params, Branch::Plus, t, x).conj()
            * branch_wavefunction(params, Branch::Minus, t, x)
            * weight;
    }
    sum * dx
}

/// Long-time form `exp(-f² t⁴ / (8 a² M²))`.
pub fn long_time_factor(params: &SGParams, t: f64) -> f64 {
    let (a, f, m) = (params.width, params.force, params.mass);
    (-(f * f) * t.powi(4) / (8.0 * a * a * m * m)).exp()
}

/// `τ_d = sqrt(2√2 M a / f)`, the `1/e` time of [`long_time_factor`].
pub fn decoherence_time(params: &SGParams) -> Result<f64> {
    if params.force == 0.0 {
        return Err(Error::NoDecoherence("zero force leaves the branches together"));
    }
    Ok((2.0 * 2f64.sqrt() * params.mass * params.width / params.force.abs()).sqrt())
}

/// Ratio of centre separation `f t² - k cosθ t` to the width term
/// `a sqrt(M² + t²/4a²)`.
pub fn distinguishability_ratio(params: &SGParams, t: f64) -> f64 {
    let a = params.width;
    let lhs = params.force * t * t - params.helix_k * params.tilt.cos() * t;
    let rhs = a * (params.mass * params.mass + t * t / (4.0 * a * a)).sqrt();
    lhs / rhs
}

/// Strict comparison `f t² - k cosθ t > a sqrt(M² + t²/4a²)`; callers wanting
/// a "much greater" margin compare [`distinguishability_ratio`] themselves.
pub fn distinguishability_condition(params: &SGParams, t: f64) -> bool {
    distinguishability_ratio(params, t) > 1.0
}
