//! Per-model parameters and evaluation.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use adiabat::cavity::{
    adiabatic_energy, adiabatic_photon_state, adiabatic_ratio, overlap_coherent, overlap_coherent_limit, overlap_fock,
    overlap_fock_limit, overlap_fock_printed, CavityParams,
};
use adiabat::density::two_branch_overlaps;
use adiabat::large_spin::{
    branch_state, decoherence_factor_analytic, mixing_angle, revival_times, LargeSpinParams, SpinBranches,
};
use adiabat::localization::{
    discrete_exponent, localization_exponent, phase_function, plane_wave_density, single_decoherence_factor,
    single_s_matrix, total_decoherence_factor, two_packet_density, weak_coupling_factor, FactorMode,
    LocalizationParams, SpectralModel, TwoPacketState,
};
use adiabat::oracle::dense::{coherent_overlap_dense, fock_overlap_dense};
use adiabat::semiclassics::{
    classical_trajectory, distinguishable, induced_force, linearized_decoherence_factor, local_frequency, PotentialPair,
};
use adiabat::specfun::{laguerre, wigner_small_d, HalfInteger, Projection};
use adiabat::stern_gerlach::{
    adiabatic_spinors, adiabaticity_ratio, branch_overlap_exact, branch_overlap_quadrature, branch_wavefunction,
    decoherence_factor, decoherence_time, distinguishability_condition, induced_gauge, long_time_factor, trajectory,
    wei_norman_params, SGParams,
};
use adiabat::{
    free_packet_width, purity, reduced_density, Branch, BranchDecomposition, Complex64, DecoherenceTrace,
    GaussianPacket,
};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Sg,
    Spin,
    Cavity,
    Localize,
    Semiclassic,
}

/// One model parameter; `None` default means required.
#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub key: &'static str,
    pub default: Option<f64>,
    pub help: &'static str,
}

const fn req(key: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec { key, default: None, help }
}

const fn opt(key: &'static str, default: f64, help: &'static str) -> ParamSpec {
    ParamSpec { key, default: Some(default), help }
}

const SG: &[ParamSpec] = &[
    req("M", "particle mass"),
    req("a", "initial packet width"),
    req("f", "force μ ∂B"),
    opt("k", 0.0, "helix wavenumber"),
    opt("theta", PI / 2.0, "field tilt"),
    opt("quadrature", 0.0, "1: position-space quadrature instead of the momentum integral"),
];

const SPIN: &[ParamSpec] = &[
    req("j", "large spin (integer or half-integer)"),
    req("g", "coupling"),
    opt("omega", 1.0, "precession frequency"),
    opt("omega_s", 0.5, "two-level splitting"),
    opt("analytic", 0.0, "1: closed form instead of the matrix overlap"),
];

const CAVITY: &[ParamSpec] = &[
    req("mu", "mirror coupling μ"),
    req("Omega", "mirror frequency"),
    opt("k", 0.0, "photon number of the first branch"),
    opt("l", 1.0, "photon number of the second branch"),
    opt("n_mirror", -1.0, "mirror Fock number; negative for a coherent mirror"),
    opt("limit", 0.0, "1: slow-mirror (coherent) or large-n (Fock) limit"),
    opt("omega_c", 1.0, "cavity frequency"),
    opt("drive", 0.0, "classical drive amplitude"),
    opt("mass", 1.0, "mirror mass"),
    opt("n_trunc", 96.0, "Fock truncation for dense checks"),
];

const LOCALIZE: &[ParamSpec] = &[
    req("gamma", "localization rate"),
    req("x", "first position"),
    req("x_prime", "second position"),
    opt("n", 200.0, "number of environment particles"),
    opt("omega_min", 0.0, "lower band edge"),
    opt("omega_max", 200.0, "upper band edge"),
    opt("exact", 0.0, "1: S-matrix product instead of the weak-coupling form"),
    opt("a", 1.0, "two-packet half separation"),
    opt("d", 0.25, "two-packet width"),
    opt("k1", 1.0, "plane-wave momentum 1"),
    opt("k2", 2.0, "plane-wave momentum 2"),
    opt("m", 1.0, "object mass for the plane-wave density"),
];

const SEMICLASSIC: &[ParamSpec] = &[
    req("sigma", "momentum width of the packet"),
    req("f_plus", "slope of the first potential"),
    req("f_minus", "slope of the second potential"),
    opt("mass", 1.0, "mass"),
    opt("kappa", 0.0, "common harmonic curvature"),
    opt("x0", 0.0, "initial centre"),
    opt("p0", 0.0, "initial momentum"),
];

impl Model {
    pub const ALL: [Model; 5] = [Model::Sg, Model::Spin, Model::Cavity, Model::Localize, Model::Semiclassic];

    pub fn name(self) -> &'static str {
        match self {
            Model::Sg => "sg",
            Model::Spin => "spin",
            Model::Cavity => "cavity",
            Model::Localize => "localize",
            Model::Semiclassic => "semiclassic",
        }
    }

    pub fn params(self) -> &'static [ParamSpec] {
        match self {
            Model::Sg => SG,
            Model::Spin => SPIN,
            Model::Cavity => CAVITY,
            Model::Localize => LOCALIZE,
            Model::Semiclassic => SEMICLASSIC,
        }
    }

    pub fn has_param(self, key: &str) -> bool {
        self.params().iter().any(|p| p.key == key)
    }

    /// Fills defaults, rejecting unknown keys and reporting missing ones.
    pub fn resolve_params(self, given: &BTreeMap<String, f64>) -> CliResult<BTreeMap<String, f64>> {
        if let Some(k) = given.keys().find(|k| !self.has_param(k)) {
            let known: Vec<_> = self.params().iter().map(|p| p.key).collect();
            return Err(CliError::Config(format!(
                "unknown parameter `{k}` for model {} (known: {})",
                self.name(),
                known.join(", ")
            )));
        }
        let mut out = BTreeMap::new();
        for spec in self.params() {
            let v = match (given.get(spec.key), spec.default) {
                (Some(v), _) => *v,
                (None, Some(d)) => d,
                (None, None) => {
                    return Err(CliError::Config(format!(
                        "missing required parameter `{}` ({}) for model {}",
                        spec.key,
                        spec.help,
                        self.name()
                    )))
                }
            };
            out.insert(spec.key.to_string(), v);
        }
        Ok(out)
    }
}

/// Main trace plus the form as customarily printed, where one exists.
pub struct Evaluation {
    pub main: DecoherenceTrace,
    pub printed: Option<DecoherenceTrace>,
}

fn flag(config: &RunConfig, key: &str) -> bool {
    config.param(key) != 0.0
}

fn count(config: &RunConfig, key: &str) -> CliResult<u32> {
    let v = config.param(key);
    if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
        return Err(CliError::Config(format!("parameter `{key}` must be a non-negative integer, got {v}")));
    }
    Ok(v as u32)
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn trace_of(
    config: &RunConfig,
    id: &str,
    f: impl FnMut(f64) -> adiabat::Result<Complex64>,
) -> CliResult<DecoherenceTrace> {
    Ok(DecoherenceTrace::sample(config.times(), id, config.digest(), f)?)
}

pub fn sg_params(config: &RunConfig) -> CliResult<SGParams> {
    Ok(SGParams::with_force(
        config.param("M"),
        config.param("a"),
        config.param("f"),
        config.param("k"),
        config.param("theta"),
    )?)
}

pub fn spin_params(config: &RunConfig) -> CliResult<LargeSpinParams> {
    let j = HalfInteger::from_f64(config.param("j"))?;
    Ok(LargeSpinParams::new(j, config.param("omega_s"), config.param("omega"), config.param("g"))?)
}

pub fn cavity_params(config: &RunConfig) -> CliResult<CavityParams> {
    let (mu, big, mass) = (config.param("mu"), config.param("Omega"), config.param("mass"));
    if !(big > 0.0 && mass > 0.0) {
        return Err(CliError::Config("`Omega` and `mass` must be positive".into()));
    }
    let n_trunc = count(config, "n_trunc")? as usize;
    let g = mu * (2.0 * mass * big).sqrt();
    Ok(CavityParams::new(config.param("omega_c"), g, config.param("drive"), big, mass, n_trunc)?)
}

pub fn localization_params(config: &RunConfig) -> CliResult<(SpectralModel, LocalizationParams)> {
    let model = SpectralModel::new(config.param("gamma"), config.param("omega_min"), config.param("omega_max"))?;
    let n = count(config, "n")? as usize;
    Ok((model, model.discretize(n)?))
}

fn semiclassic_pair(config: &RunConfig) -> CliResult<PotentialPair> {
    let (fp, fm, kappa) = (config.param("f_plus"), config.param("f_minus"), config.param("kappa"));
    let pair = PotentialPair::new(
        Box::new(move |x| fp * x + 0.5 * kappa * x * x),
        Box::new(move |x| fm * x + 0.5 * kappa * x * x),
        ("+".into(), "-".into()),
        (f64::NEG_INFINITY, f64::INFINITY),
    )?;
    Ok(pair)
}

pub fn evaluate(config: &RunConfig) -> CliResult<Evaluation> {
    let id = config.model.name();
    match config.model {
        Model::Sg => {
            let p = sg_params(config)?;
            let main = if flag(config, "quadrature") {
                trace_of(config, id, |t| Ok(branch_overlap_quadrature(&p, t)))?
            } else {
                trace_of(config, id, |t| Ok(branch_overlap_exact(&p, t)))?
            };
            let printed = trace_of(config, id, |t| Ok(real(decoherence_factor(&p, t))))?;
            Ok(Evaluation { main, printed: Some(printed) })
        }
        Model::Spin => {
            let p = spin_params(config)?;
            let main = if flag(config, "analytic") {
                trace_of(config, id, |t| Ok(real(decoherence_factor_analytic(&p, t))))?
            } else {
                let branches = SpinBranches::new(p)?;
                trace_of(config, id, |t| Ok(branches.overlap(t)))?
            };
            let printed = trace_of(config, id, |t| Ok(real(decoherence_factor_analytic(&p, t))))?;
            Ok(Evaluation { main, printed: Some(printed) })
        }
        Model::Cavity => {
            let p = cavity_params(config)?;
            let (k, l) = (count(config, "k")?, count(config, "l")?);
            let limit = flag(config, "limit");
            let n_mirror = config.param("n_mirror");
            if n_mirror < 0.0 {
                let main = trace_of(config, id, |t| {
                    Ok(real(if limit { overlap_coherent_limit(&p, k, l, t) } else { overlap_coherent(&p, k, l, t) }))
                })?;
                return Ok(Evaluation { main, printed: None });
            }
            let n = count(config, "n_mirror")?;
            let main = trace_of(config, id, |t| {
                Ok(real(if limit { overlap_fock_limit(&p, k, l, n, t) } else { overlap_fock(&p, k, l, n, t)? }))
            })?;
            let printed = trace_of(config, id, |t| Ok(real(overlap_fock_printed(&p, k, l, n, t)?)))?;
            Ok(Evaluation { main, printed: Some(printed) })
        }
        Model::Localize => {
            let (model, p) = localization_params(config)?;
            let (x, xp) = (config.param("x"), config.param("x_prime"));
            let mode = if flag(config, "exact") { FactorMode::Exact } else { FactorMode::Weak };
            let main = trace_of(config, id, |t| Ok(total_decoherence_factor(&p, x, xp, t, mode)))?;
            let printed = trace_of(config, id, |t| Ok(real((-model.gamma * t * (x - xp).powi(2)).exp())))?;
            Ok(Evaluation { main, printed: Some(printed) })
        }
        Model::Semiclassic => {
            let pair = semiclassic_pair(config)?;
            let (sigma, x0) = (config.param("sigma"), config.param("x0"));
            let main = trace_of(config, id, |t| Ok(real(pair.linearized_factor(sigma, x0, t)?)))?;
            Ok(Evaluation { main, printed: None })
        }
    }
}

fn c2j(z: Complex64) -> Value {
    json!([z.re, z.im])
}

/// Purity of an equal two-branch superposition with overlap `f`.
fn equal_split_purity(f: Complex64) -> CliResult<f64> {
    let h = real(0.5f64.sqrt());
    let branch = BranchDecomposition::from_coefficients(vec![h, h])?;
    Ok(purity(&reduced_density(&branch, &two_branch_overlaps(f))?))
}

/// Derived scalar quantities of the run, evaluated at `t_end`.
pub fn summary(config: &RunConfig, evaluation: &Evaluation) -> CliResult<Value> {
    let t = config.t_end;
    let last = *evaluation.main.values().last().expect("at least two samples");
    let mut out = json!({
        "model": config.model.name(),
        "params_digest": config.digest(),
        "t_end": t,
        "purity_end": equal_split_purity(last)?,
    });
    let extra = match config.model {
        Model::Sg => {
            let p = sg_params(config)?;
            let (ap, am) = induced_gauge(p.tilt, p.helix_k);
            let (xp, xm) = (trajectory(&p, Branch::Plus, t), trajectory(&p, Branch::Minus, t));
            let wn = wei_norman_params(p.mass, ap, p.force, t)?;
            let (chi_p, chi_m) = adiabatic_spinors(p.width, p.tilt, p.helix_k);
            let xdot = (p.force * t / p.mass).abs() + ap / p.mass;
            json!({
                "decoherence_time": decoherence_time(&p).ok(),
                "long_time_factor": long_time_factor(&p, t),
                "induced_gauge": [ap, am],
                "trajectory": [xp, xm],
                "wei_norman": {"alpha": c2j(wn.alpha_t), "beta": c2j(wn.beta_t), "gamma": c2j(wn.gamma_t), "mu": c2j(wn.mu_t)},
                "adiabatic_spinors": {"plus": chi_p.map(c2j), "minus": chi_m.map(c2j)},
                "adiabaticity_ratio": adiabaticity_ratio(&p, xdot, p.field_energy(p.width)).ok(),
                "distinguishable": distinguishability_condition(&p, t),
                "branch_wavefunction_peak": branch_wavefunction(&p, Branch::Plus, t, xp).norm(),
                "free_packet_width": free_packet_width(&p.packet(), t)?,
            })
        }
        Model::Spin => {
            let p = spin_params(config)?;
            let phi = mixing_angle(&p)?;
            let low = Projection::from_twice(-(p.j.twice() as i32));
            json!({
                "mixing_angle": phi,
                "precession": p.precession(),
                "revival_times": revival_times(&p, 4),
                "ground_state_persistence": wigner_small_d(p.j, low, low, phi)?.powi(2),
                "branch_state_norms": [branch_state(&p, Branch::Plus, t)?.norm(), branch_state(&p, Branch::Minus, t)?.norm()],
            })
        }
        Model::Cavity => {
            let p = cavity_params(config)?;
            let (k, l) = (count(config, "k")?, count(config, "l")?);
            let photon = adiabatic_photon_state(&p, l as usize, 0.0)?;
            let n_mirror = config.param("n_mirror");
            let (dense, laguerre_value) = if n_mirror < 0.0 {
                (coherent_overlap_dense(&p, k, l, real(0.0), t)?.norm(), None)
            } else {
                let n = count(config, "n_mirror")?;
                (fock_overlap_dense(&p, k, l, n, t)?.norm(), Some(laguerre(n, p.fock_argument(k, l, t))?))
            };
            json!({
                "fock_argument": p.fock_argument(k, l, t),
                "adiabatic_energy": [adiabatic_energy(&p, k as usize, 0.0), adiabatic_energy(&p, l as usize, 0.0)],
                "adiabatic_photon_norm": photon.norm(),
                "adiabatic_ratio_unit_velocity": adiabatic_ratio(&p, l, 1.0),
                "dense_overlap": dense,
                "laguerre": laguerre_value,
                "alpha": [c2j(p.alpha(k, t)), c2j(p.alpha(l, t))],
            })
        }
        Model::Localize => {
            let (model, params) = localization_params(config)?;
            let (x, xp) = (config.param("x"), config.param("x_prime"));
            let (w0, g0) = (params.omegas()[0], params.couplings()[0]);
            let s = single_s_matrix(w0, params.coupling_at(0, x), t);
            let state = TwoPacketState::new(config.param("a"), config.param("d"))?;
            let a = state.separation;
            let (k1, k2, m) = (config.param("k1"), config.param("k2"), config.param("m"));
            json!({
                "localization_exponent": localization_exponent(&model, t)?,
                "discrete_exponent": discrete_exponent(&params, t),
                "phase_function": phase_function(&params, t),
                "s_matrix_mode0": [[c2j(s[(0, 0)]), c2j(s[(0, 1)])], [c2j(s[(1, 0)]), c2j(s[(1, 1)])]],
                "single_factor_mode0": c2j(single_decoherence_factor(w0, g0, x, xp, t)),
                "weak_factor_mode0": c2j(weak_coupling_factor(w0, g0, x, xp, t)),
                "two_packet_peaks": [two_packet_density(&state, model.gamma, t, a, a), two_packet_density(&state, model.gamma, t, a, -a)],
                "plane_wave_diagonal": plane_wave_density(k1, k2, m, model.gamma, t, x, x)?.re,
            })
        }
        Model::Semiclassic => {
            let pair = semiclassic_pair(config)?;
            let (mass, x0, p0, sigma) =
                (config.param("mass"), config.param("x0"), config.param("p0"), config.param("sigma"));
            let width = 1.0 / (2.0 * sigma);
            let packet = GaussianPacket::new(x0, p0, width, mass)?;
            let dt = t / 1000.0;
            let end_plus = classical_trajectory(&|x| pair.v_m(x), &packet, t, dt)?.last();
            let end_minus = classical_trajectory(&|x| pair.v_n(x), &packet, t, dt)?.last();
            let w = free_packet_width(&packet, t)?;
            json!({
                "induced_force": [induced_force(&|x| pair.v_m(x), x0)?, induced_force(&|x| pair.v_n(x), x0)?],
                "force_difference": pair.force_difference(x0)?,
                "linearized_factor": linearized_decoherence_factor(sigma, pair.force_difference(x0)?, t)?,
                "trajectory_end": [[end_plus.0, end_plus.1], [end_minus.0, end_minus.1]],
                "local_frequency": [local_frequency(&|x| pair.v_m(x), x0, mass).ok(), local_frequency(&|x| pair.v_n(x), x0, mass).ok()],
                "free_packet_width": w,
                "distinguishable": distinguishable(w, w, end_plus.0, end_minus.0),
            })
        }
    };
    if let (Value::Object(base), Value::Object(more)) = (&mut out, extra) {
        base.extend(more);
    }
    Ok(out)
}

/// `(x, x', |ρ(x, x', t_end)|)` of the two-packet state on an
/// `n_steps × n_steps` grid covering both packets.
pub fn density_section(config: &RunConfig) -> CliResult<Vec<[f64; 3]>> {
    if config.model != Model::Localize {
        return Err(CliError::Config(format!(
            "density sections are only defined for model localize, not {}",
            config.model.name()
        )));
    }
    let state = TwoPacketState::new(config.param("a"), config.param("d"))?;
    let gamma = config.param("gamma");
    let reach = state.separation.abs() + 4.0 * state.width;
    let axis = adiabat::trace::linspace(-reach, reach, config.n_steps);
    let mut rows = Vec::with_capacity(axis.len() * axis.len());
    for &x in &axis {
        for &xp in &axis {
            rows.push([x, xp, two_packet_density(&state, gamma, config.t_end, x, xp)]);
        }
    }
    Ok(rows)
}
