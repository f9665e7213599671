//! Acceptance checks: every closed form against its oracle, with pinned
//! tolerances.
//!
//! Each criterion returns one or more [`CriterionReport`] rows. A criterion
//! passes when all of its non-informational rows pass; informational rows
//! document known discrepancies without gating.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;

use crate::cavity::{
    overlap_coherent, overlap_coherent_limit, overlap_fock, overlap_fock_limit, overlap_fock_printed, CavityParams,
};
use crate::density::{purity, purity_from_overlaps, reduced_density, two_branch_overlaps, BranchDecomposition};
use crate::error::Result;
use crate::large_spin::{decoherence_factor_analytic, revival_times, LargeSpinParams, SpinBranches};
use crate::linalg::CMatrix;
use crate::localization::{
    discrete_exponent, localization_exponent, plane_wave_density, total_decoherence_factor, two_packet_density,
    FactorMode, LocalizationParams, SpectralModel, TwoPacketState,
};
use crate::oracle::dense::{
    coherent_overlap_dense, fock_overlap_dense, fock_truncation, tensor_product_factor, FullSpinModel,
};
use crate::oracle::grid::{large_mass_phase_check, Grid1D, SgGridRun};
use crate::oracle::partial_trace;
use crate::specfun::HalfInteger;
use crate::stern_gerlach::{
    branch_overlap_exact, branch_overlap_quadrature, decoherence_factor, decoherence_time, long_time_factor, SGParams,
};
use crate::trace::linspace;

/// Problem sizes: `Full` runs the acceptance parameters, `Fast` shrinks the
/// expensive cases for quick checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub informational: bool,
    pub detail: String,
}

impl CriterionReport {
    /// Row passing when `measured ≤ tolerance`.
    fn at_most(id: u8, name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            id,
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
            informational: false,
            detail: detail.into(),
        }
    }

    /// Row passing when `measured ≥ tolerance`.
    fn at_least(id: u8, name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { passed: measured >= tolerance, ..Self::at_most(id, name, measured, tolerance, detail) }
    }

    fn flag(id: u8, name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            id,
            name: name.into(),
            measured: if ok { 1.0 } else { 0.0 },
            tolerance: 1.0,
            passed: ok,
            informational: false,
            detail: detail.into(),
        }
    }

    fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    fn failed_with(id: u8, name: &str, err: &crate::Error) -> Self {
        Self::flag(id, name, false, format!("error: {err}"))
    }
}

/// `true` when every gating row passes.
pub fn all_passed(rows: &[CriterionReport]) -> bool {
    rows.iter().filter(|r| !r.informational).all(|r| r.passed)
}

pub const CRITERIA: [u8; 12] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12];

pub fn criterion_name(id: u8) -> &'static str {
    match id {
        1 => "large-spin exactness",
        2 => "large-spin collapse and revival",
        3 => "full-model adiabaticity",
        4 => "SG grid oracle vs closed form",
        5 => "decoherence time consistency",
        6 => "cavity overlaps vs truncated Fock",
        7 => "slow-mirror limit",
        8 => "Fock-state decay",
        9 => "localization factorization",
        10 => "continuum localization rate",
        11 => "two-packet peaks and plane-wave diagonal",
        12 => "cross-cutting density invariants",
        _ => "unknown",
    }
}

/// Runs criterion `id`; errors inside a check become failing rows.
pub fn run_criterion(id: u8, level: Level) -> Vec<CriterionReport> {
    let result = match id {
        1 => large_spin_exactness(level),
        2 => collapse_revival(level),
        3 => full_model(level),
        4 => sg_grid(level),
        5 => decoherence_time_crossing(),
        6 => cavity_overlaps(level),
        7 => slow_mirror_limit(),
        8 => fock_decay(),
        9 => localization_factorization(),
        10 => continuum_rate(),
        11 => two_packet_peaks(),
        12 => cross_cutting(),
        _ => return vec![CriterionReport::flag(id, "unknown criterion", false, "no such criterion")],
    };
    result.unwrap_or_else(|e| vec![CriterionReport::failed_with(id, criterion_name(id), &e)])
}

fn fmt_list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.4e}")).collect::<Vec<_>>().join(", ")
}

fn runtime_row(id: u8, start: Instant, limit: f64) -> CriterionReport {
    CriterionReport::at_most(id, "runtime [s]", start.elapsed().as_secs_f64(), limit, "")
}

fn spin_params(twice_j: u32, phi: f64) -> Result<LargeSpinParams> {
    LargeSpinParams::new(HalfInteger::from_twice(twice_j), 0.5, 1.0, phi.tan())
}

fn large_spin_exactness(level: Level) -> Result<Vec<CriterionReport>> {
    let start = Instant::now();
    let spins: &[u32] = match level {
        Level::Full => &[1, 10, 40, 200],
        Level::Fast => &[1, 10, 40],
    };
    let mut worst = 0.0f64;
    for &tj in spins {
        for phi in [PI / 8.0, PI / 6.0, PI / 4.0] {
            let params = spin_params(tj, phi)?;
            let branches = SpinBranches::new(params)?;
            for t in linspace(0.0, 4.0 * PI / params.precession(), 200) {
                let diff = (branches.overlap(t).norm() - decoherence_factor_analytic(&params, t)).abs();
                worst = worst.max(diff);
            }
        }
    }
    Ok(vec![
        CriterionReport::at_most(1, "max |analytic - matrix overlap|", worst, 1e-10, format!("2j in {spins:?}")),
        runtime_row(1, start, 5.0),
    ])
}

fn collapse_revival(level: Level) -> Result<Vec<CriterionReport>> {
    let phi = PI / 6.0;
    let mut revival_err = 0.0f64;
    let numeric_spins: &[u32] = match level {
        Level::Full => &[10, 40, 200],
        Level::Fast => &[10, 40],
    };
    for &tj in &[10u32, 40, 200] {
        let params = spin_params(tj, phi)?;
        let branches = if numeric_spins.contains(&tj) { Some(SpinBranches::new(params)?) } else { None };
        for t in revival_times(&params, 4).into_iter().skip(1) {
            revival_err = revival_err.max((decoherence_factor_analytic(&params, t) - 1.0).abs());
            if let Some(b) = &branches {
                revival_err = revival_err.max((b.overlap(t).norm() - 1.0).abs());
            }
        }
    }
    let minima: Vec<f64> = [10u32, 40, 200]
        .iter()
        .map(|&tj| {
            let params = spin_params(tj, phi)?;
            let period = 2.0 * PI / params.precession();
            Ok(linspace(0.0, period, 2001)
                .into_iter()
                .map(|t| decoherence_factor_analytic(&params, t))
                .fold(f64::INFINITY, f64::min))
        })
        .collect::<Result<_>>()?;
    let decreasing = minima.windows(2).all(|w| w[1] < w[0]);
    Ok(vec![
        CriterionReport::at_most(2, "max |F(t_n) - 1|", revival_err, 1e-12, "t_n = 2πn/Ω, n = 1..4, j = 5, 20, 100"),
        CriterionReport::flag(
            2,
            "period minimum decreasing in j",
            decreasing,
            format!("minima for j = 5, 20, 100: {}", fmt_list(&minima)),
        ),
    ])
}

fn full_model(level: Level) -> Result<Vec<CriterionReport>> {
    let start = Instant::now();
    let params = LargeSpinParams::new(HalfInteger::from_integer(10), 0.5, 1.0, 5.0)?;
    let h = Complex64::new(0.5f64.sqrt(), 0.0);
    let model = FullSpinModel::new(params, h, h)?;
    let samples = match level {
        Level::Full => 201,
        Level::Fast => 41,
    };
    let period = 2.0 * PI / params.precession();
    let (mut worst, mut ratio) = (0.0f64, 0.0f64);
    for t in linspace(0.0, 2.0 * period, samples) {
        let analytic = decoherence_factor_analytic(&params, t);
        worst = worst.max((model.coherence_ratio(t)? / analytic - 1.0).abs());
        ratio = ratio.max(model.adiabaticity_ratio(t)?);
    }
    Ok(vec![
        CriterionReport::at_most(
            3,
            "max relative |ρ_+-| / |c_+ c_-| F - 1",
            worst,
            0.05,
            format!("j = 10, ω = 1, g = 5, ω_s = 0.5, two periods, {} clipped level(s)", model.clipped_levels()),
        ),
        CriterionReport::at_most(3, "adiabaticity ratio", ratio, 0.01, "probability-weighted"),
        runtime_row(3, start, 60.0),
    ])
}

/// Grid evolution of the SG model at the acceptance parameters.
pub struct SgGridReport {
    pub times: Vec<f64>,
    pub grid: Vec<Complex64>,
    pub norm_drift: f64,
}

pub fn sg_grid_series(
    params: &SGParams,
    n_points: usize,
    half_width: f64,
    samples: usize,
    substeps: usize,
    t_end: f64,
) -> Result<SgGridReport> {
    let grid = Grid1D::centered(half_width, n_points)?;
    let c = Complex64::new(0.5f64.sqrt(), 0.0);
    let init = SgGridRun::branch_superposition(&grid, params, c, c);
    let dt = t_end / ((samples - 1) * substeps) as f64;
    let mut run = SgGridRun::new(grid, *params, init, dt)?;
    let times = linspace(0.0, t_end, samples);
    let mut values = Vec::with_capacity(samples);
    let mut drift = 0.0f64;
    for &t in &times {
        run.advance_to(t)?;
        values.push(run.branch_overlap(c, c));
        drift = drift.max(run.norm_drift());
    }
    Ok(SgGridReport { times, grid: values, norm_drift: drift })
}

fn sg_grid(level: Level) -> Result<Vec<CriterionReport>> {
    let start = Instant::now();
    let params = SGParams::with_force(100.0, 1.0, 0.1, 1.0, PI / 2.0)?;
    let tau = decoherence_time(&params)?;
    let (points, substeps) = match level {
        Level::Full => (4096, 40),
        Level::Fast => (1024, 10),
    };
    let series = sg_grid_series(&params, points, 32.0, 65, substeps, 2.0 * tau)?;
    let (mut vs_printed, mut vs_exact) = (0.0f64, 0.0f64);
    for (t, f) in series.times.iter().zip(&series.grid) {
        vs_printed = vs_printed.max((f.norm() - decoherence_factor(&params, *t)).abs());
        vs_exact = vs_exact.max((f.norm() - branch_overlap_exact(&params, *t).norm()).abs());
    }
    // exponent of the force term, read off where it dominates
    let t_fit = 5.0;
    let probe = sg_grid_series(&params, points, 32.0, 2, 200, t_fit)?;
    let (a, f, m) = (params.width, params.force, params.mass);
    let spread_term = ((f * t_fit * t_fit) / m).powi(2) / (8.0 * a * a);
    let factor = (-probe.grid[1].norm().ln() - spread_term) / (a * a * f * f * t_fit * t_fit);
    Ok(vec![
        CriterionReport::at_most(
            4,
            "max ||F_grid| - closed form| on [0, 2τ_d]",
            vs_printed,
            0.05,
            format!("{points} points, M = 100, a = 1, f = 0.1, k = 1, θ = π/2, τ_d = {tau:.4}"),
        ),
        CriterionReport::at_most(4, "norm drift", series.norm_drift, 1e-8, ""),
        runtime_row(4, start, 120.0),
        CriterionReport::at_most(4, "measured force-term factor (closed form assumes 1)", factor, 1.0, "fit at t = 5")
            .informational(),
        CriterionReport::at_most(4, "max ||F_grid| - momentum-space overlap|", vs_exact, 0.05, "exponent 2a²f²t²")
            .informational(),
    ])
}

fn decoherence_time_crossing() -> Result<Vec<CriterionReport>> {
    let mut worst = 0.0f64;
    for &(m, a, f) in &[(100.0, 1.0, 0.1), (1.0, 0.5, 2.0), (1e4, 3.0, 1e-3)] {
        let params = SGParams::with_force(m, a, f, 1.0, PI / 2.0)?;
        let target = (-1.0f64).exp();
        let (mut lo, mut hi) = (0.0, 1.0);
        while long_time_factor(&params, hi) > target {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if long_time_factor(&params, mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tau = decoherence_time(&params)?;
        worst = worst.max((0.5 * (lo + hi) / tau - 1.0).abs());
    }
    Ok(vec![CriterionReport::at_most(
        5,
        "relative |t_cross - τ_d| / τ_d",
        worst,
        1e-9,
        "bisection on exp(-f²t⁴/8a²M²)",
    )])
}

/// Fock states kept for coherent mirror branches with `|α| ≲ 6`.
const COHERENT_TRUNCATION: usize = 96;

fn cavity_overlaps(level: Level) -> Result<Vec<CriterionReport>> {
    let params = CavityParams::from_mu(0.6, 1.0, COHERENT_TRUNCATION)?;
    let times = linspace(
        0.0,
        2.0 * PI,
        match level {
            Level::Full => 41,
            Level::Fast => 11,
        },
    );
    let alpha0 = Complex64::new(0.8, -0.3);
    let (mut coherent, mut fock) = (0.0f64, 0.0f64);
    let mut largest_trunc = 0;
    for &t in &times {
        for &(k, l) in &[(0u32, 1u32), (1, 3), (0, 4)] {
            let dense = coherent_overlap_dense(&params, k, l, alpha0, t)?.norm();
            coherent = coherent.max((dense - overlap_coherent(&params, k, l, t)).abs());
            for &n in &[0u32, 1, 5, 20] {
                let dense = fock_overlap_dense(&params, k, l, n, t)?.norm();
                fock = fock.max((dense - overlap_fock(&params, k, l, n, t)?).abs());
                let alpha = params.alpha(k, t).norm().max(params.alpha(l, t).norm());
                largest_trunc = largest_trunc.max(fock_truncation(alpha, n as usize));
            }
        }
    }
    // z = 1: (l - k) = 1, μ/Ω = 1/2, Ωt = π
    let unit = CavityParams::from_mu(0.5, 1.0, 8)?;
    let z = unit.fock_argument(0, 1, PI);
    let corrected = overlap_fock(&unit, 0, 1, 0, PI)?;
    let printed = overlap_fock_printed(&unit, 0, 1, 0, PI)?;
    let discrepancy = (printed - corrected).abs() / corrected;
    Ok(vec![
        CriterionReport::at_most(
            6,
            "coherent mirror: max |dense - closed form|",
            coherent,
            1e-8,
            format!("mirror cut to {COHERENT_TRUNCATION} Fock states"),
        ),
        CriterionReport::at_most(
            6,
            "Fock mirror: max |dense - closed form|",
            fock,
            1e-8,
            format!("n ∈ {{0,1,5,20}}, truncation up to {largest_trunc}"),
        ),
        CriterionReport::at_most(
            6,
            "printed argument vs corrected at z = 1 (relative)",
            discrepancy,
            0.10,
            format!("z = {z:.3}, n = 0"),
        )
        .informational(),
        CriterionReport::at_least(6, "printed-form discrepancy detected", discrepancy, 0.10, "must exceed 10%"),
    ])
}

fn slow_mirror_limit() -> Result<Vec<CriterionReport>> {
    let mu = 1.0;
    let times = linspace(0.0, 3.0 / mu, 3001);
    let sups: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&r| {
            let params = CavityParams::from_mu(mu, r * mu, 8)?;
            Ok(times
                .iter()
                .map(|&t| (overlap_coherent(&params, 0, 1, t) - overlap_coherent_limit(&params, 0, 1, t)).abs())
                .fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    let decreasing = sups.windows(2).all(|w| w[1] < w[0]);
    Ok(vec![CriterionReport::flag(
        7,
        "sup |F_Ω - limit| decreasing as Ω → 0",
        decreasing,
        format!("Ω/μ = 0.1, 0.05, 0.025: {}", fmt_list(&sups)),
    )])
}

fn fock_decay() -> Result<Vec<CriterionReport>> {
    // z_max = 4 μ²/Ω² = 0.05, below the first zero of L_20
    let params = CavityParams::from_mu(0.05f64.sqrt() / 2.0, 1.0, 8)?;
    let period = 2.0 * PI / params.big_omega;
    let minima: Vec<f64> = [1u32, 5, 20]
        .iter()
        .map(|&n| {
            linspace(0.0, period, 2001)
                .into_iter()
                .map(|t| overlap_fock(&params, 0, 1, n, t))
                .try_fold(f64::INFINITY, |acc, v| v.map(|v| acc.min(v)))
        })
        .collect::<Result<_>>()?;
    let decreasing = minima.windows(2).all(|w| w[1] < w[0]);
    // n = 100 with n z ≤ 1
    let n = 100u32;
    let asym = CavityParams::from_mu(0.01f64.sqrt() / 2.0, 1.0, 8)?;
    let mut worst = 0.0f64;
    for t in linspace(0.0, period, 2001) {
        let exact = overlap_fock(&asym, 0, 1, n, t)?;
        let limit = overlap_fock_limit(&asym, 0, 1, n, t).abs();
        worst = worst.max((limit - exact).abs() / exact);
    }
    Ok(vec![
        CriterionReport::flag(
            8,
            "first-period minimum decreasing in n",
            decreasing,
            format!("n = 1, 5, 20: {}", fmt_list(&minima)),
        ),
        CriterionReport::at_most(8, "Bessel vs Laguerre at n = 100, nz ≤ 1 (relative)", worst, 0.02, ""),
    ])
}

fn localization_factorization() -> Result<Vec<CriterionReport>> {
    let start = Instant::now();
    let params = LocalizationParams::new(
        vec![1.0, 1.3, 0.7, 2.0, 0.9, 1.1, 1.6, 0.5],
        vec![0.3, 0.2, 0.5, 0.1, 0.4, 0.25, 0.35, 0.15],
        vec![0.0, 0.1, -0.2, 0.3, 0.0, -0.1, 0.2, 0.05],
    )?;
    let mut worst = 0.0f64;
    for &(x, xp) in &[(0.7, -0.4), (1.5, 1.2), (-2.0, 0.5)] {
        for t in [0.0, 0.3, 1.0, 2.7] {
            let brute = tensor_product_factor(&params, x, xp, t)?;
            let product = total_decoherence_factor(&params, x, xp, t, FactorMode::Exact);
            worst = worst.max((brute - product).norm());
        }
    }
    let elapsed = runtime_row(9, start, 10.0);
    // heavy object: local phase accumulation e^{-iVt} with O(1/M) corrections
    let grid = Grid1D::centered(20.0, 512)?;
    let linear = |x: f64| 0.5 * x;
    let d1 = large_mass_phase_check(&grid, &linear, 200.0, 1.0, 2.0)?.deviation;
    let d2 = large_mass_phase_check(&grid, &linear, 400.0, 1.0, 2.0)?.deviation;
    Ok(vec![
        CriterionReport::at_most(9, "max |product - 2^N brute force|", worst, 1e-12, "N = 8"),
        elapsed,
        CriterionReport::at_most(9, "phase-check deviation ratio M = 200 vs 400", d1 / d2, 2.4, "O(1/M): expect 2")
            .informational(),
    ])
}

fn continuum_rate() -> Result<Vec<CriterionReport>> {
    let model = SpectralModel::new(0.3, 0.0, 2000.0)?;
    let params = model.discretize(2000)?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for t in linspace(0.05, 1.5, 30) {
        let r = discrete_exponent(&params, t) / (model.gamma * t);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let quad = localization_exponent(&model, 1.0)? / model.gamma;
    Ok(vec![
        CriterionReport::at_least(10, "min R/γt", lo, 0.98, "N = 2000, Δω = 1, t ∈ [0.05, 1.5]"),
        CriterionReport::at_most(10, "max R/γt", hi, 1.02, ""),
        CriterionReport::at_most(10, "band-limited quadrature |R/γt - 1| at t = 1", (quad - 1.0).abs(), 0.02, "")
            .informational(),
    ])
}

fn two_packet_peaks() -> Result<Vec<CriterionReport>> {
    let mut worst = 0.0f64;
    for &(a, d) in &[(3.0, 0.4), (5.0, 0.5), (2.0, 0.25)] {
        let state = TwoPacketState::new(a, d)?;
        for &gamma in &[0.0, 0.05, 0.4] {
            for t in [0.0, 0.5, 2.0] {
                let ratio = two_packet_density(&state, gamma, t, a, -a) / two_packet_density(&state, gamma, t, a, a);
                worst = worst.max((ratio - (-4.0 * gamma * t * a * a).exp()).abs());
            }
        }
    }
    let mut mismatches = 0usize;
    for x in linspace(-5.0, 5.0, 101) {
        let base = plane_wave_density(1.0, 2.3, 1.5, 0.0, 0.8, x, x)?;
        for gamma in [1e-3, 0.5, 10.0, 1e6] {
            if plane_wave_density(1.0, 2.3, 1.5, gamma, 0.8, x, x)? != base {
                mismatches += 1;
            }
        }
    }
    Ok(vec![
        CriterionReport::at_most(11, "max |peak ratio - exp(-4γta²)|", worst, 1e-10, "read from the summed density"),
        CriterionReport::at_most(11, "plane-wave diagonal values changed by γ", mismatches as f64, 0.0, "bitwise"),
    ])
}

struct InvariantTally {
    worst_purity: f64,
    worst_magnitude: f64,
    invalid: usize,
    checked: usize,
}

impl InvariantTally {
    fn new() -> Self {
        Self { worst_purity: 0.0, worst_magnitude: 0.0, invalid: 0, checked: 0 }
    }

    fn overlaps(&mut self, branch: &BranchDecomposition, overlaps: &CMatrix) {
        self.checked += 1;
        for z in overlaps.iter() {
            self.worst_magnitude = self.worst_magnitude.max(z.norm() - 1.0);
        }
        match reduced_density(branch, overlaps) {
            Ok(rho) => {
                let err = (purity(&rho) - purity_from_overlaps(branch, overlaps)).abs();
                self.worst_purity = self.worst_purity.max(err);
            }
            Err(_) => self.invalid += 1,
        }
    }

    fn pair(&mut self, f: Complex64) {
        let branch = BranchDecomposition::from_coefficients(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)])
            .expect("normalized");
        self.overlaps(&branch, &two_branch_overlaps(f));
    }
}

fn cross_cutting() -> Result<Vec<CriterionReport>> {
    let mut tally = InvariantTally::new();
    let spin = spin_params(40, PI / 6.0)?;
    let branches = SpinBranches::new(spin)?;
    let sg = SGParams::with_force(50.0, 1.0, 0.2, 1.0, 1.0)?;
    let cavity = CavityParams::from_mu(0.6, 1.0, COHERENT_TRUNCATION)?;
    let loc = SpectralModel::new(0.2, 0.5, 20.0)?.discretize(40)?;
    for t in linspace(0.0, 6.0, 25) {
        tally.pair(branches.overlap(t));
        tally.pair(branch_overlap_exact(&sg, t));
        tally.pair(branch_overlap_quadrature(&sg, t));
        tally.pair(Complex64::new(decoherence_factor(&sg, t), 0.0));
        tally.pair(Complex64::new(overlap_coherent(&cavity, 0, 1, t), 0.0));
        tally.pair(fock_overlap_dense(&cavity, 0, 2, 3, t)?);
        tally.pair(total_decoherence_factor(&loc, 0.4, -0.6, t, FactorMode::Exact));
        tally.pair(total_decoherence_factor(&loc, 0.4, -0.6, t, FactorMode::Weak));
        // three photon-number branches of the cavity
        let c = [0.5, 0.5, 0.5f64.sqrt()].map(|x| Complex64::new(x, 0.0));
        let branch = BranchDecomposition::from_coefficients(c.to_vec())?;
        let overlaps = CMatrix::from_fn(3, 3, |n, m| {
            coherent_overlap_dense(&cavity, n as u32, m as u32, Complex64::new(0.5, 0.0), t)
                .unwrap_or(Complex64::new(f64::NAN, 0.0))
        });
        tally.overlaps(&branch, &overlaps);
    }
    // partial traces of the full spin model
    let full = FullSpinModel::new(
        LargeSpinParams::new(HalfInteger::from_integer(4), 0.5, 1.0, 5.0)?,
        Complex64::new(0.6, 0.0),
        Complex64::new(0.0, 0.8),
    )?;
    for t in linspace(0.0, 3.0, 7) {
        tally.checked += 2;
        if full.adiabatic_density(t).is_err() {
            tally.invalid += 1;
        }
        if partial_trace(&full.state(t)?, 0).is_err() {
            tally.invalid += 1;
        }
    }
    Ok(vec![
        CriterionReport::at_most(
            12,
            "invalid density matrices",
            tally.invalid as f64,
            0.0,
            format!("{} checked", tally.checked),
        ),
        CriterionReport::at_most(12, "max |F| - 1", tally.worst_magnitude, 1e-10, ""),
        CriterionReport::at_most(12, "max purity identity error", tally.worst_purity, 1e-10, ""),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_helpers() {
        let r = CriterionReport::at_most(1, "x", 0.5, 1.0, "");
        assert!(r.passed && !r.informational);
        assert!(!CriterionReport::at_least(1, "x", 0.5, 1.0, "").passed);
        let info = CriterionReport::at_most(1, "x", 2.0, 1.0, "").informational();
        assert!(all_passed(&[r, info]));
        assert!(!all_passed(&run_criterion(99, Level::Fast)));
    }

    #[test]
    fn cheap_criteria_pass() {
        for id in [5, 7, 8, 10, 11] {
            let rows = run_criterion(id, Level::Fast);
            assert!(all_passed(&rows), "{rows:#?}");
        }
    }
}
