//! Semiclassical toolkit for a heavy packet moving on branch-dependent
//! potentials `V_n(x)`: induced forces, the linearized decoherence factor,
//! classical trajectories, local oscillator frequencies and the
//! distinguishability test between two evolved packets.
//!
//! One spatial dimension. Derivatives use fixed central-difference steps:
//! `h = max(1e-6, 1e-6 |x|)` for first derivatives and
//! `h = max(1e-4, 1e-4 |x|)` for second derivatives (truncation `O(h^2)`).

use crate::error::{Error, Result};
use crate::packet::GaussianPacket;

/// Position-dependent potential energy.
pub type Potential = dyn Fn(f64) -> f64 + Send + Sync;

/// Two adiabatic potentials whose force difference drives decoherence.
pub struct PotentialPair {
    v_m: Box<Potential>,
    v_n: Box<Potential>,
    labels: (String, String),
    interval: (f64, f64),
}

impl PotentialPair {
    pub fn new(
        v_m: Box<Potential>,
        v_n: Box<Potential>,
        labels: (String, String),
        interval: (f64, f64),
    ) -> Result<Self> {
        if !(interval.0 < interval.1) {
            return Err(Error::param("interval", format!("empty interval {interval:?}")));
        }
        Ok(Self { v_m, v_n, labels, interval })
    }

    pub fn labels(&self) -> (&str, &str) {
        (&self.labels.0, &self.labels.1)
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn v_m(&self, x: f64) -> f64 {
        (self.v_m)(x)
    }

    pub fn v_n(&self, x: f64) -> f64 {
        (self.v_n)(x)
    }

    /// `F_m(x) - F_n(x)` with `F = -V'`.
    pub fn force_difference(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(induced_force(&*self.v_m, x)? - induced_force(&*self.v_n, x)?)
    }

    /// Linearized decoherence factor for a packet of momentum width `sigma`
    /// centred at `x_c`, forces evaluated at the packet centre.
    pub fn linearized_factor(&self, sigma: f64, x_c: f64, t: f64) -> Result<f64> {
        linearized_decoherence_factor(sigma, self.force_difference(x_c)?, t)
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if x < self.interval.0 || x > self.interval.1 {
            return Err(Error::param("x", format!("{x} outside {:?}", self.interval)));
        }
        Ok(())
    }
}

/// Sampled classical orbit `(t, x_c(t), p_c(t))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalPath {
    times: Vec<f64>,
    positions: Vec<f64>,
    momenta: Vec<f64>,
}

impl ClassicalPath {
    pub fn new(times: Vec<f64>, positions: Vec<f64>, momenta: Vec<f64>) -> Result<Self> {
        if positions.len() != times.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), found: positions.len() });
        }
        if momenta.len() != times.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), found: momenta.len() });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("times", "not strictly increasing"));
        }
        Ok(Self { times, positions, momenta })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    /// Final `(x, p)`.
    pub fn last(&self) -> (f64, f64) {
        (*self.positions.last().unwrap(), *self.momenta.last().unwrap())
    }
}

fn first_step(x: f64) -> f64 {
    1e-6f64.max(1e-6 * x.abs())
}

fn second_step(x: f64) -> f64 {
    1e-4f64.max(1e-4 * x.abs())
}

/// `-dV/dx` by central difference.
pub fn induced_force(v: &(impl Fn(f64) -> f64 + ?Sized), x: f64) -> Result<f64> {
    let h = first_step(x);
    let (hi, lo) = (v(x + h), v(x - h));
    if !hi.is_finite() || !lo.is_finite() {
        return Err(Error::param("v", format!("non-finite potential near x = {x}")));
    }
    Ok(-(hi - lo) / (2.0 * h))
}

/// `exp(-δF² t² / (4σ²))`: the coherence left after the two branch forces
/// have pushed the momentum distributions apart by `δF t`.
pub fn linearized_decoherence_factor(sigma: f64, delta_f: f64, t: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
    }
    let s = delta_f * t / sigma;
    Ok((-0.25 * s * s).exp())
}

/// Integrates Hamilton's equations with classical RK4 at fixed step `dt`;
/// the final step is shortened so the path ends exactly at `t_final`.
pub fn classical_trajectory(
    v: &(impl Fn(f64) -> f64 + ?Sized),
    packet: &GaussianPacket,
    t_final: f64,
    dt: f64,
) -> Result<ClassicalPath> {
    if !(dt > 0.0) {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    if !(t_final >= dt) {
        return Err(Error::param("t_final", format!("{t_final} shorter than dt = {dt}")));
    }
    let mass = packet.mass;
    let deriv = |x: f64, p: f64| -> Option<(f64, f64)> {
        let force = induced_force(v, x).ok().filter(|f| f.is_finite())?;
        Some((p / mass, force))
    };
    let steps = (t_final / dt - 1e-9).ceil() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut xs = Vec::with_capacity(steps + 1);
    let mut ps = Vec::with_capacity(steps + 1);
    let (mut x, mut p) = (packet.center, packet.momentum);
    times.push(0.0);
    xs.push(x);
    ps.push(p);
    for k in 0..steps {
        let t0 = k as f64 * dt;
        let h = if k + 1 == steps { t_final - t0 } else { dt };
        let fail = Error::NonFinite { time: t0 };
        let (k1x, k1p) = deriv(x, p).ok_or(fail.clone())?;
        let (k2x, k2p) = deriv(x + 0.5 * h * k1x, p + 0.5 * h * k1p).ok_or(fail.clone())?;
        let (k3x, k3p) = deriv(x + 0.5 * h * k2x, p + 0.5 * h * k2p).ok_or(fail.clone())?;
        let (k4x, k4p) = deriv(x + h * k3x, p + h * k3p).ok_or(fail)?;
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        let t = t0 + h;
        if !x.is_finite() || !p.is_finite() {
            return Err(Error::NonFinite { time: t });
        }
        times.push(t);
        xs.push(x);
        ps.push(p);
    }
    ClassicalPath::new(times, xs, ps)
}

/// Frequency of the local oscillator seen by a packet at `x_c`:
/// `ω_t = sqrt(V''(x_c) / M)`.
pub fn local_frequency(v: &(impl Fn(f64) -> f64 + ?Sized), x_c: f64, mass: f64) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::param("mass", format!("must be positive, got {mass}")));
    }
    let h = second_step(x_c);
    let (lo, mid, hi) = (v(x_c - h), v(x_c), v(x_c + h));
    if !(lo.is_finite() && mid.is_finite() && hi.is_finite()) {
        return Err(Error::param("v", format!("non-finite potential near x = {x_c}")));
    }
    let curvature = (hi - 2.0 * mid + lo) / (h * h);
    // rounding noise of the second difference is ~ eps |V| / h^2
    let noise = 1e-6 * mid.abs().max(1.0);
    if curvature < -noise {
        return Err(Error::NegativeCurvature { curvature });
    }
    Ok((curvature.max(0.0) / mass).sqrt())
}

/// `width_1 + width_2 <= |x1 - x2|`, boundary counted as distinguishable.
pub fn distinguishable(width_1: f64, width_2: f64, x1: f64, x2: f64) -> bool {
    width_1 + width_2 <= (x1 - x2).abs()
}
