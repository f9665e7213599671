//! Split-operator propagation of `p²/2M + v0(x) + v(x)·σ` on a periodic grid.
//!
//! One step is a half kinetic step in momentum space, the exact 2×2
//! exponential of the local potential at every grid point, and another half
//! kinetic step. Every factor is unitary, so the norm only drifts by
//! rounding; the drift is checked anyway.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::packet::spread_width;
use crate::stern_gerlach::{adiabatic_spinors, field_direction, SGParams};

const MIN_POINTS: usize = 256;
const STEP_DRIFT_LIMIT: f64 = 1e-12;
const RUN_DRIFT_LIMIT: f64 = 1e-8;
const EDGE_MASS_LIMIT: f64 = 1e-12;

/// Periodic grid `x_i = x_min + i dx`, `dx = (x_max - x_min) / n_points`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::param("grid", format!("need x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n_points < MIN_POINTS || !n_points.is_power_of_two() {
            return Err(Error::param("n_points", format!("need a power of two ≥ {MIN_POINTS}, got {n_points}")));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    /// Symmetric grid `[-half, half)`.
    pub fn centered(half: f64, n_points: usize) -> Result<Self> {
        Self::new(-half, half, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.x(i))
    }

    /// Angular wavenumber of FFT bin `i`.
    pub fn wavenumber(&self, i: usize) -> f64 {
        let n = self.n_points as isize;
        let i = i as isize;
        let shifted = if i < n / 2 { i } else { i - n };
        2.0 * PI * shifted as f64 / (self.x_max - self.x_min)
    }
}

/// Two-component wave function sampled on a [`Grid1D`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField {
    pub up: Vec<Complex64>,
    pub down: Vec<Complex64>,
}

impl SpinorField {
    pub fn zeros(n: usize) -> Self {
        Self { up: vec![Complex64::new(0.0, 0.0); n], down: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    /// `Σ (|up|² + |down|²) dx`.
    pub fn norm_sqr(&self, grid: &Grid1D) -> f64 {
        let s: f64 = self.up.iter().chain(&self.down).map(|c| c.norm_sqr()).sum();
        s * grid.dx()
    }

    /// Probability within `band` of either end of the grid.
    pub fn edge_mass(&self, grid: &Grid1D, band: f64) -> f64 {
        let mut mass = 0.0;
        for (i, x) in grid.positions().enumerate() {
            if x - grid.x_min < band || grid.x_max - x <= band {
                mass += self.up[i].norm_sqr() + self.down[i].norm_sqr();
            }
        }
        mass * grid.dx()
    }

    /// `<x>` and `<x²> - <x>²` of the total density.
    pub fn moments(&self, grid: &Grid1D) -> (f64, f64) {
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (i, x) in grid.positions().enumerate() {
            let p = self.up[i].norm_sqr() + self.down[i].norm_sqr();
            m0 += p;
            m1 += p * x;
            m2 += p * x * x;
        }
        let mean = m1 / m0;
        (mean, m2 / m0 - mean * mean)
    }

    /// Pointwise projection `χ(x)† Ψ(x)` onto a position-dependent spinor.
    pub fn project(&self, grid: &Grid1D, spinor: impl Fn(f64) -> [Complex64; 2]) -> Vec<Complex64> {
        grid.positions()
            .enumerate()
            .map(|(i, x)| {
                let s = spinor(x);
                s[0].conj() * self.up[i] + s[1].conj() * self.down[i]
            })
            .collect()
    }
}

/// `Σ conj(a) b dx`.
pub fn grid_inner(grid: &Grid1D, a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let s: Complex64 = a.iter().zip(b).map(|(a, b)| a.conj() * b).sum();
    s * grid.dx()
}

/// Normalized Gaussian `(2π a²)^{-1/4} exp(-(x - x_c)² / 4a² + i p x)`.
pub fn gaussian(grid: &Grid1D, center: f64, momentum: f64, width: f64) -> Vec<Complex64> {
    let norm = (2.0 * PI * width * width).powf(-0.25);
    grid.positions()
        .map(|x| {
            let y = x - center;
            Complex64::from_polar(norm * (-(y * y) / (4.0 * width * width)).exp(), momentum * x)
        })
        .collect()
}

/// Local potential `v0 + v·σ` as `[v0, vx, vy, vz]`.
pub type LocalPotential<'a> = dyn Fn(f64) -> [f64; 4] + 'a;

/// Precomputed split-operator stepper for a fixed grid, mass and `dt`.
pub struct GridPropagator {
    grid: Grid1D,
    dt: f64,
    kinetic_half: Vec<Complex64>,
    // row-major 2×2 step matrices, one per grid point
    potential: Vec<[Complex64; 4]>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl GridPropagator {
    pub fn new(grid: Grid1D, mass: f64, dt: f64, potential: &LocalPotential<'_>) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::param("mass", format!("must be positive, got {mass}")));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        let n = grid.n_points();
        let kinetic_half = (0..n)
            .map(|i| {
                let k = grid.wavenumber(i);
                Complex64::from_polar(1.0, -k * k * dt / (4.0 * mass))
            })
            .collect();
        let potential = grid.positions().map(|x| step_matrix(potential(x), dt)).collect::<Result<Vec<_>>>()?;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Ok(Self {
            grid,
            dt,
            kinetic_half,
            potential,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn kinetic(&mut self, component: &mut [Complex64]) {
        self.forward.process_with_scratch(component, &mut self.scratch);
        let scale = 1.0 / component.len() as f64;
        for (c, k) in component.iter_mut().zip(&self.kinetic_half) {
            *c *= k * scale;
        }
        self.inverse.process_with_scratch(component, &mut self.scratch);
    }

    /// One Strang step, in place.
    pub fn step(&mut self, field: &mut SpinorField) {
        self.kinetic(&mut field.up);
        self.kinetic(&mut field.down);
        for ((u, d), m) in field.up.iter_mut().zip(field.down.iter_mut()).zip(&self.potential) {
            let (a, b) = (*u, *d);
            *u = m[0] * a + m[1] * b;
            *d = m[2] * a + m[3] * b;
        }
        self.kinetic(&mut field.up);
        self.kinetic(&mut field.down);
    }

    /// `n` steps with per-step norm checks; `t0` only labels errors.
    pub fn advance(&mut self, field: &mut SpinorField, n: usize, t0: f64) -> Result<()> {
        let mut norm = field.norm_sqr(&self.grid);
        for s in 0..n {
            self.step(field);
            let next = field.norm_sqr(&self.grid);
            let drift = (next - norm).abs();
            if !next.is_finite() {
                return Err(Error::NonFinite { time: t0 + (s + 1) as f64 * self.dt });
            }
            if drift > STEP_DRIFT_LIMIT {
                return Err(Error::NormDrift { drift, limit: STEP_DRIFT_LIMIT });
            }
            norm = next;
        }
        Ok(())
    }
}

/// `exp(-i dt (v0 + v·σ))`, row-major.
fn step_matrix(v: [f64; 4], dt: f64) -> Result<[Complex64; 4]> {
    if v.iter().any(|c| !c.is_finite()) {
        return Err(Error::param("potential", "non-finite value on the grid"));
    }
    let [v0, vx, vy, vz] = v;
    let r = (vx * vx + vy * vy + vz * vz).sqrt();
    let global = Complex64::from_polar(1.0, -v0 * dt);
    let c = Complex64::new((r * dt).cos(), 0.0);
    // -i sin(r dt) v̂·σ; sin(r dt)/r → dt as r → 0
    let s = if r == 0.0 { dt } else { (r * dt).sin() / r };
    let mi = Complex64::new(0.0, -s);
    Ok([
        global * (c + mi * vz),
        global * mi * Complex64::new(vx, -vy),
        global * mi * Complex64::new(vx, vy),
        global * (c - mi * vz),
    ])
}

/// Local potential of the SG model, `f x n(x)·σ`.
pub fn sg_potential(params: &SGParams) -> impl Fn(f64) -> [f64; 4] + '_ {
    move |x| {
        let n = field_direction(x, params.tilt, params.helix_k);
        let b = params.field_energy(x);
        [0.0, b * n[0], b * n[1], b * n[2]]
    }
}

/// Propagates `initial` under the SG Hamiltonian `p²/2M + f x n(x)·σ` to
/// `t_final` with steps of at most `dt`.
///
/// Fails if the probability within eight spread widths of either edge
/// exceeds `1e-12` at any step or the total norm drifts by more than `1e-8`.
pub fn grid_propagate(
    grid: &Grid1D,
    params: &SGParams,
    initial: &SpinorField,
    t_final: f64,
    dt: f64,
) -> Result<SpinorField> {
    let mut run = SgGridRun::new(*grid, *params, initial.clone(), dt)?;
    run.advance_to(t_final)?;
    Ok(run.field)
}

/// A resumable SG grid evolution.
pub struct SgGridRun {
    params: SGParams,
    propagator: GridPropagator,
    field: SpinorField,
    time: f64,
    initial_norm: f64,
}

impl SgGridRun {
    pub fn new(grid: Grid1D, params: SGParams, initial: SpinorField, dt: f64) -> Result<Self> {
        if initial.len() != grid.n_points() || initial.down.len() != grid.n_points() {
            return Err(Error::DimensionMismatch { expected: grid.n_points(), found: initial.len() });
        }
        let potential = sg_potential(&params);
        let propagator = GridPropagator::new(grid, params.mass, dt, &potential)?;
        let initial_norm = initial.norm_sqr(&grid);
        let run = Self { params, propagator, field: initial, time: 0.0, initial_norm };
        run.check_edges()?;
        Ok(run)
    }

    /// Equal superposition `c_+ ψ_0 χ_+ + c_- ψ_0 χ_-` of the adiabatic
    /// spinors times the initial Gaussian packet.
    pub fn branch_superposition(
        grid: &Grid1D,
        params: &SGParams,
        c_plus: Complex64,
        c_minus: Complex64,
    ) -> SpinorField {
        let psi0 = gaussian(grid, 0.0, 0.0, params.width);
        let mut field = SpinorField::zeros(grid.n_points());
        for (i, x) in grid.positions().enumerate() {
            let (p, m) = adiabatic_spinors(x, params.tilt, params.helix_k);
            field.up[i] = psi0[i] * (c_plus * p[0] + c_minus * m[0]);
            field.down[i] = psi0[i] * (c_plus * p[1] + c_minus * m[1]);
        }
        field
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn field(&self) -> &SpinorField {
        &self.field
    }

    pub fn norm_drift(&self) -> f64 {
        (self.field.norm_sqr(self.propagator.grid()) - self.initial_norm).abs()
    }

    fn check_edges(&self) -> Result<()> {
        let band = 8.0 * spread_width(self.params.width, self.params.mass, self.time);
        let edge_mass = self.field.edge_mass(self.propagator.grid(), band);
        if edge_mass > EDGE_MASS_LIMIT {
            return Err(Error::BoundaryContact { edge_mass, time: self.time });
        }
        Ok(())
    }

    /// Steps until `t` is reached (the last step lands within `dt/2` of it;
    /// callers choose `t` on the step lattice for exact timing).
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        let dt = self.propagator.dt();
        let n = ((t - self.time) / dt).round().max(0.0) as usize;
        self.propagator.advance(&mut self.field, n, self.time)?;
        self.time += n as f64 * dt;
        self.check_edges()?;
        let drift = self.norm_drift();
        if drift > RUN_DRIFT_LIMIT {
            return Err(Error::NormDrift { drift, limit: RUN_DRIFT_LIMIT });
        }
        Ok(())
    }

    /// Branch amplitudes `χ_±(x)† Ψ(x)`.
    pub fn branches(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let (theta, k) = (self.params.tilt, self.params.helix_k);
        let grid = self.propagator.grid();
        let plus = self.field.project(grid, |x| adiabatic_spinors(x, theta, k).0);
        let minus = self.field.project(grid, |x| adiabatic_spinors(x, theta, k).1);
        (plus, minus)
    }

    /// `<D_+|D_->` from the projected branches, divided by `conj(c_+) c_-`.
    pub fn branch_overlap(&self, c_plus: Complex64, c_minus: Complex64) -> Complex64 {
        let (plus, minus) = self.branches();
        grid_inner(self.propagator.grid(), &plus, &minus) / (c_plus.conj() * c_minus)
    }
}

/// Outcome of [`large_mass_phase_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseCheck {
    /// `max_x |ψ(x,t) - e^{-i V(x) t} ψ(x,0)| / max_x |ψ(x,0)|`.
    pub deviation: f64,
    /// `t / (2 M a²)`; the position-eigenstate picture needs this `≪ 1`.
    pub regime_ratio: f64,
}

impl PhaseCheck {
    pub fn in_regime(&self) -> bool {
        self.regime_ratio < 0.1
    }
}

/// Evolves a packet of width `width` at the grid centre under `p²/2M + V`
/// and compares with pure local phase accumulation `e^{-i V(x) t}`.
pub fn large_mass_phase_check(
    grid: &Grid1D,
    potential: &(dyn Fn(f64) -> f64 + Sync),
    mass: f64,
    width: f64,
    t: f64,
) -> Result<PhaseCheck> {
    if t < 0.0 {
        return Err(Error::param("t", "time must be non-negative"));
    }
    if !(width > 0.0) {
        return Err(Error::param("width", format!("must be positive, got {width}")));
    }
    let centre = 0.5 * (grid.x_min() + grid.x_max());
    let psi0 = gaussian(grid, centre, 0.0, width);
    let regime_ratio = t / (2.0 * mass * width * width);
    if t == 0.0 {
        return Ok(PhaseCheck { deviation: 0.0, regime_ratio });
    }
    let n = (t / 1e-2).ceil().max(1.0) as usize;
    let local = |x: f64| [potential(x), 0.0, 0.0, 0.0];
    let mut prop = GridPropagator::new(*grid, mass, t / n as f64, &local)?;
    let mut field = SpinorField { up: psi0.clone(), down: vec![Complex64::new(0.0, 0.0); psi0.len()] };
    prop.advance(&mut field, n, 0.0)?;
    let peak = psi0.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let deviation = grid
        .positions()
        .zip(field.up.iter().zip(&psi0))
        .map(|(x, (psi, p0))| (psi - Complex64::from_polar(1.0, -potential(x) * t) * p0).norm())
        .fold(0.0, f64::max)
        / peak;
    Ok(PhaseCheck { deviation, regime_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packet::{free_packet_width, GaussianPacket};
    use crate::stern_gerlach::branch_overlap_exact;

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(0.0, 1.0, 128).is_err());
        assert!(Grid1D::new(0.0, 1.0, 300).is_err());
        assert!(Grid1D::new(1.0, 0.0, 256).is_err());
        let g = Grid1D::centered(8.0, 256).unwrap();
        assert_eq!(g.dx(), 16.0 / 256.0);
        assert_eq!(g.wavenumber(0), 0.0);
        assert!(g.wavenumber(255) < 0.0);
    }

    #[test]
    fn step_matrix_is_unitary_and_exact() {
        let m = step_matrix([0.3, 0.4, -0.2, 0.7], 0.9).unwrap();
        let u = crate::CMatrix::from_row_slice(2, 2, &m);
        assert!(crate::linalg::unitarity_defect(&u) < 1e-15);
        let h = crate::CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(1.0, 0.0), Complex64::new(0.4, 0.2), Complex64::new(0.4, -0.2), Complex64::new(-0.4, 0.0)],
        );
        let oracle = crate::linalg::unitary_exp(&h, 0.9).unwrap();
        assert!(crate::linalg::max_abs_diff(&u, &oracle) < 1e-14);
        let zero = step_matrix([0.0; 4], 1.0).unwrap();
        assert_eq!(zero[0], Complex64::new(1.0, 0.0));
        assert_eq!(zero[1], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn free_packet_spreads_as_expected() {
        let grid = Grid1D::centered(40.0, 1024).unwrap();
        let (a, m, t) = (1.0, 1.0, 6.0);
        let free = |_x: f64| [0.0; 4];
        let mut prop = GridPropagator::new(grid, m, 0.05, &free).unwrap();
        let mut field = SpinorField { up: gaussian(&grid, 0.0, 0.0, a), down: vec![Complex64::new(0.0, 0.0); 1024] };
        prop.advance(&mut field, 120, 0.0).unwrap();
        let (_, var) = field.moments(&grid);
        let want = free_packet_width(&GaussianPacket::at_rest(a, m).unwrap(), t).unwrap();
        assert!((var.sqrt() / want - 1.0).abs() < 1e-3);
    }

    #[test]
    fn constant_field_gives_global_phase() {
        let grid = Grid1D::centered(20.0, 256).unwrap();
        let field_z = |_x: f64| [0.0, 0.0, 0.0, 0.8];
        let mut prop = GridPropagator::new(grid, 1.0, 0.1, &field_z).unwrap();
        let psi0 = gaussian(&grid, 0.0, 0.0, 1.0);
        let mut field = SpinorField { up: psi0.clone(), down: vec![Complex64::new(0.0, 0.0); 256] };
        // reference: free evolution of the same packet
        let free = |_x: f64| [0.0; 4];
        let mut reference = field.clone();
        GridPropagator::new(grid, 1.0, 0.1, &free).unwrap().advance(&mut reference, 30, 0.0).unwrap();
        prop.advance(&mut field, 30, 0.0).unwrap();
        let phase = Complex64::from_polar(1.0, -0.8 * 3.0);
        for (a, b) in field.up.iter().zip(&reference.up) {
            assert!((a - phase * b).norm() < 1e-12);
        }
        assert!(field.down.iter().all(|c| c.norm() < 1e-15));
    }

    fn small_sg() -> (Grid1D, SGParams) {
        let params = SGParams::with_force(20.0, 1.0, 0.3, 1.0, 1.2).unwrap();
        (Grid1D::centered(24.0, 1024).unwrap(), params)
    }

    #[test]
    fn sg_run_tracks_exact_overlap_when_adiabatic() {
        // a strong gradient keeps the levels far apart across the packet
        let (grid, params) = small_sg();
        let params = SGParams::with_force(params.mass, params.width, params.force, 0.2, params.tilt).unwrap();
        let c = Complex64::new(0.5f64.sqrt(), 0.0);
        let init = SgGridRun::branch_superposition(&grid, &params, c, c);
        let mut run = SgGridRun::new(grid, params, init, 0.01).unwrap();
        for &t in &[1.0, 2.0, 3.0] {
            run.advance_to(t).unwrap();
            let grid_f = run.branch_overlap(c, c).norm();
            let exact = branch_overlap_exact(&params, t).norm();
            assert!((grid_f - exact).abs() < 0.02, "t={t}: grid {grid_f} exact {exact}");
        }
        assert!(run.norm_drift() < 1e-8);
    }

    #[test]
    fn splitting_is_second_order() {
        let (grid, params) = small_sg();
        let c = Complex64::new(0.5f64.sqrt(), 0.0);
        let t = 2.0;
        let overlap = |dt: f64| {
            let init = SgGridRun::branch_superposition(&grid, &params, c, c);
            let mut run = SgGridRun::new(grid, params, init, dt).unwrap();
            run.advance_to(t).unwrap();
            run.branch_overlap(c, c)
        };
        let reference = overlap(0.2 / 64.0);
        let e1 = (overlap(0.2) - reference).norm();
        let e2 = (overlap(0.1) - reference).norm();
        assert!(e1 / e2 >= 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn boundary_contact_is_reported() {
        let params = SGParams::with_force(1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let grid = Grid1D::centered(10.0, 256).unwrap();
        let init = SgGridRun::branch_superposition(&grid, &params, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let err = grid_propagate(&grid, &params, &init, 5.0, 0.05).unwrap_err();
        assert!(matches!(err, Error::BoundaryContact { .. }));
    }

    #[test]
    fn large_mass_phase_scaling() {
        let grid = Grid1D::centered(20.0, 512).unwrap();
        let zero = |_x: f64| 0.0;
        assert_eq!(large_mass_phase_check(&grid, &zero, 1e3, 1.0, 0.0).unwrap().deviation, 0.0);
        let free_dev = |m: f64| large_mass_phase_check(&grid, &zero, m, 1.0, 1.0).unwrap().deviation;
        assert!(free_dev(1e4) < free_dev(1e3));
        let linear = |x: f64| 0.5 * x;
        let dev = |m: f64| large_mass_phase_check(&grid, &linear, m, 1.0, 2.0).unwrap();
        let (d1, d2) = (dev(200.0), dev(400.0));
        assert!(d1.in_regime() && d2.in_regime());
        let ratio = d1.deviation / d2.deviation;
        assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
    }
}
