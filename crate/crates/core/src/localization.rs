//! Macroscopic object made of `N` fixed two-level particles whose couplings
//! depend on the collective position `x`.
//!
//! Particle `j` has `h_j(x) = ω_j σ_z + f_j(x) σ_x` in the basis `(e_j, g_j)`,
//! with `f_j(x) = g_j (x + l_j)`. For a heavy object the internal evolution
//! is the S-matrix `S_j(x;t) = exp(-i h_j(x) t)` and the spatial coherence
//! `ρ(x, x')` is multiplied by
//! `F_N = Π_j <g_j| S_j†(x';t) S_j(x;t) |g_j>`. For weak coupling
//! `|F_N| ≈ exp(-(x-x')² R(t))` with `R(t) = Σ_j g_j² sin²(ω_j t) / 2ω_j²`,
//! which grows linearly (`R = γ t`) for the flat spectral density
//! `ρ(ω) = 4γ / (π g²)`.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Evaluation of the total decoherence factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorMode {
    /// Product of the 2×2 S-matrix overlaps.
    Exact,
    /// Second-order closed form in `g_j x / ω_j`.
    Weak,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationParams {
    omegas: Vec<f64>,
    couplings: Vec<f64>,
    offsets: Vec<f64>,
}

impl LocalizationParams {
    pub fn new(omegas: Vec<f64>, couplings: Vec<f64>, offsets: Vec<f64>) -> Result<Self> {
        if couplings.len() != omegas.len() {
            return Err(Error::DimensionMismatch { expected: omegas.len(), found: couplings.len() });
        }
        if offsets.len() != omegas.len() {
            return Err(Error::DimensionMismatch { expected: omegas.len(), found: offsets.len() });
        }
        if let Some(w) = omegas.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::param("omegas", format!("level splittings must be positive, got {w}")));
        }
        if couplings.iter().chain(&offsets).any(|v| !v.is_finite()) {
            return Err(Error::param("couplings", "couplings and offsets must be finite"));
        }
        Ok(Self { omegas, couplings, offsets })
    }

    /// All particles at the reference position.
    pub fn without_offsets(omegas: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        let n = omegas.len();
        Self::new(omegas, couplings, vec![0.0; n])
    }

    pub fn n_particles(&self) -> usize {
        self.omegas.len()
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// `f_j(x) = g_j (x + l_j)`.
    pub fn coupling_at(&self, j: usize, x: f64) -> f64 {
        self.couplings[j] * (x + self.offsets[j])
    }

    /// `max_j |f_j(x)| / ω_j`; the weak form needs this small.
    pub fn weakness(&self, x: f64) -> f64 {
        (0..self.n_particles()).map(|j| self.coupling_at(j, x).abs() / self.omegas[j]).fold(0.0, f64::max)
    }
}

/// Flat spectral model `ρ(ω) = 4γ / (π g²)` on `[omega_min, omega_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralModel {
    pub gamma: f64,
    pub omega_min: f64,
    pub omega_max: f64,
}

impl SpectralModel {
    pub fn new(gamma: f64, omega_min: f64, omega_max: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::param("gamma", format!("must be positive, got {gamma}")));
        }
        // ω = 0 itself is never sampled: quadrature nodes and discretized
        // modes are interior points
        if !(omega_min >= 0.0 && omega_max > omega_min && omega_max.is_finite()) {
            return Err(Error::param("band", format!("need 0 ≤ ω_min < ω_max, got [{omega_min}, {omega_max}]")));
        }
        Ok(Self { gamma, omega_min, omega_max })
    }

    /// `n` particles at the midpoints of equal sub-bands, each carrying
    /// `g_j² = 4γ Δω / π` so the sum reproduces the spectral integral.
    pub fn discretize(&self, n: usize) -> Result<LocalizationParams> {
        if n == 0 {
            return Err(Error::param("n", "need at least one mode"));
        }
        let dw = (self.omega_max - self.omega_min) / n as f64;
        let g = (4.0 * self.gamma * dw / PI).sqrt();
        let omegas = (0..n).map(|j| self.omega_min + (j as f64 + 0.5) * dw).collect();
        LocalizationParams::without_offsets(omegas, vec![g; n])
    }
}

/// Two Gaussian packets of width `d` centred at `±a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoPacketState {
    pub separation: f64,
    pub width: f64,
}

impl TwoPacketState {
    pub fn new(separation: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::param("d", format!("must be positive, got {width}")));
        }
        Ok(Self { separation, width })
    }
}

/// `exp(-i h t)` for `h = ω σ_z + f σ_x`, basis `(e, g)`.
pub fn single_s_matrix(omega_j: f64, f_j: f64, t: f64) -> Matrix2<Complex64> {
    let big = f_j.hypot(omega_j);
    let (s, c) = (big * t).sin_cos();
    let (cos_t, sin_t) = if big == 0.0 { (1.0, 0.0) } else { (omega_j / big, f_j / big) };
    let diag = |sign: f64| Complex64::new(c, -sign * s * cos_t);
    let off = Complex64::new(0.0, -s * sin_t);
    Matrix2::new(diag(1.0), off, off, diag(-1.0))
}

/// `<g| S†(x';t) S(x;t) |g>` for a coupling `f = g_j x`.
pub fn single_decoherence_factor(omega_j: f64, g_j: f64, x: f64, x_prime: f64, t: f64) -> Complex64 {
    ground_overlap(omega_j, g_j * x, g_j * x_prime, t)
}

fn ground_overlap(omega: f64, f: f64, f_prime: f64, t: f64) -> Complex64 {
    let s = single_s_matrix(omega, f, t);
    let sp = single_s_matrix(omega, f_prime, t);
    // S|g> is the second column
    sp[(0, 1)].conj() * s[(0, 1)] + sp[(1, 1)].conj() * s[(1, 1)]
}

/// Second-order form
/// `1 - (x-x')² (g²/2ω²) sin²(ωt) - i (g²/4ω²) (x² - x'²) sin(2ωt)`.
///
/// The secular phase `(g²/2ω) (x² - x'²) t` (level shift) is left out.
pub fn weak_coupling_factor(omega_j: f64, g_j: f64, x: f64, x_prime: f64, t: f64) -> Complex64 {
    let (re, im) = weak_exponent(omega_j, g_j * x, g_j * x_prime, t);
    Complex64::new(1.0 + re, im)
}

/// Real and imaginary parts of the second-order correction for couplings
/// `f`, `f'`.
fn weak_exponent(omega: f64, f: f64, f_prime: f64, t: f64) -> (f64, f64) {
    let w2 = omega * omega;
    let d = f - f_prime;
    let re = -d * d / (2.0 * w2) * (omega * t).sin().powi(2);
    let im = -(f * f - f_prime * f_prime) / (4.0 * w2) * (2.0 * omega * t).sin();
    (re, im)
}

/// `Π_j F_j(x', x, t)`, reduced in particle order.
pub fn total_decoherence_factor(
    params: &LocalizationParams,
    x: f64,
    x_prime: f64,
    t: f64,
    mode: FactorMode,
) -> Complex64 {
    let n = params.n_particles();
    match mode {
        FactorMode::Exact => (0..n).fold(Complex64::new(1.0, 0.0), |acc, j| {
            acc * ground_overlap(params.omegas[j], params.coupling_at(j, x), params.coupling_at(j, x_prime), t)
        }),
        FactorMode::Weak => {
            let (re, im) = (0..n).fold((0.0, 0.0), |(re, im), j| {
                let (r, i) =
                    weak_exponent(params.omegas[j], params.coupling_at(j, x), params.coupling_at(j, x_prime), t);
                (re + r, im + i)
            });
            Complex64::new(re, im).exp()
        }
    }
}

/// `R(t) = Σ_j g_j² sin²(ω_j t) / 2ω_j²` for a discrete set of particles.
pub fn discrete_exponent(params: &LocalizationParams, t: f64) -> f64 {
    params.omegas.iter().zip(&params.couplings).map(|(w, g)| g * g / (2.0 * w * w) * (w * t).sin().powi(2)).sum()
}

/// `R(t) = ∫ ρ(ω) g² sin²(ω t) / 2ω² dω = (2γ/π) ∫ sin²(ω t) / ω² dω` over
/// the band, by composite Gauss-Legendre quadrature refined until two
/// successive panel counts agree to `1e-12` relative.
pub fn localization_exponent(model: &SpectralModel, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::param("t", "time must be non-negative"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let integrand = |w: f64| (w * t).sin().powi(2) / (w * w);
    let span = model.omega_max - model.omega_min;
    // at least a few panels per oscillation period π/t
    let mut panels = ((span * t / PI).ceil() as usize * 4).max(16);
    let mut previous = composite_gauss_legendre(&integrand, model.omega_min, model.omega_max, panels);
    for _ in 0..12 {
        panels *= 2;
        let current = composite_gauss_legendre(&integrand, model.omega_min, model.omega_max, panels);
        if (current - previous).abs() <= 1e-12 * current.abs() {
            return Ok(2.0 * model.gamma / PI * current);
        }
        previous = current;
    }
    Err(Error::Convergence(format!("R({t}) over [{}, {}]", model.omega_min, model.omega_max)))
}

const GL_ORDER: usize = 16;

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn composite_gauss_legendre(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(GL_ORDER);
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * h;
        let mut panel = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            panel += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * panel;
    }
    total
}

/// One of the four peaks `P_kl` (`k, l ∈ {0, 1}`, `1` ↔ centre `+a`) of the
/// two-packet density.
pub fn two_packet_peak(state: &TwoPacketState, gamma: f64, t: f64, k: u8, l: u8, x: f64, x_prime: f64) -> f64 {
    let (a, d) = (state.separation, state.width);
    let centre = |i: u8| if i == 1 { a } else { -a };
    let (ck, cl) = (centre(k), centre(l));
    let norm = 1.0 / (8.0 * PI * d * d).sqrt();
    let damping = (-gamma * t * (x - x_prime).powi(2)).exp();
    norm * damping * (-(x - ck).powi(2) / (4.0 * d * d) - (x_prime - cl).powi(2) / (4.0 * d * d)).exp()
}

/// `|ρ(x, x', t)|` as the sum of the four peaks.
pub fn two_packet_density(state: &TwoPacketState, gamma: f64, t: f64, x: f64, x_prime: f64) -> f64 {
    let mut total = 0.0;
    for k in [1u8, 0] {
        for l in [1u8, 0] {
            total += two_packet_peak(state, gamma, t, k, l, x, x_prime);
        }
    }
    total
}

/// Heights `(diagonal, off-diagonal)` of the four peaks:
/// `1/sqrt(8π d²)` and `e^{-4γ t a²}/sqrt(8π d²)`.
pub fn two_packet_peak_heights(state: &TwoPacketState, gamma: f64, t: f64) -> (f64, f64) {
    let norm = 1.0 / (8.0 * PI * state.width * state.width).sqrt();
    (norm, norm * (-4.0 * gamma * t * state.separation * state.separation).exp())
}

/// Two interfering plane waves `k_1, k_2` with coherences damped by
/// `e^{-γ t (x-x')²}`. The diagonal is evaluated by its own expression and
/// never touches `γ`.
pub fn plane_wave_density(k1: f64, k2: f64, mass: f64, gamma: f64, t: f64, x: f64, x_prime: f64) -> Result<Complex64> {
    if !(mass > 0.0) {
        return Err(Error::param("mass", format!("must be positive, got {mass}")));
    }
    let beat = (k1 * k1 - k2 * k2) * t / (2.0 * mass);
    if x == x_prime {
        return Ok(Complex64::new((1.0 + (beat + (k2 - k1) * x).cos()) / (2.0 * PI), 0.0));
    }
    let e = |phase: f64| Complex64::from_polar(1.0, phase);
    let rho0 = (e(k1 * (x - x_prime))
        + e(k2 * (x - x_prime))
        + e(beat + k2 * x - k1 * x_prime)
        + e(-beat + k1 * x - k2 * x_prime))
        / (4.0 * PI);
    Ok(rho0 * (-gamma * t * (x - x_prime).powi(2)).exp())
}

/// `s(t) = Σ_j sin(2ω_j t) / (π ω_j²)`.
pub fn phase_function(params: &LocalizationParams, t: f64) -> f64 {
    params.omegas.iter().map(|w| (2.0 * w * t).sin() / (PI * w * w)).sum()
}
