//! Library side of the `adiabat` command: configuration, model evaluation,
//! output files and the three commands.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod models;
pub mod output;

use std::fmt;

pub use commands::{run, sweep, verify, RunOptions, RunOutput, VerifyTarget};
pub use config::{Format, RunConfig};
pub use models::Model;

/// Failure of a command, mapped to the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// At least one verification row failed (exit 1).
    Verification(String),
    /// Invalid or missing configuration (exit 2).
    Config(String),
    /// Reading or writing a file failed (exit 3).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<adiabat::Error> for CliError {
    fn from(e: adiabat::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Library operation and the command that exercises it.
pub const COVERAGE: &[(&str, &str)] = &[
    ("core::reduced_density", "run --summary (purity_end)"),
    ("core::purity", "run --summary (purity_end)"),
    ("core::free_packet_width", "run --model sg|semiclassic --summary"),
    ("specfun::spin_operators", "verify spin (full model)"),
    ("specfun::wigner_small_d", "run --model spin --summary"),
    ("specfun::laguerre", "run --model cavity --param n_mirror=N"),
    ("specfun::bessel_j0", "run --model cavity --param n_mirror=N --param limit=1"),
    ("semiclassics::induced_force", "run --model semiclassic --summary"),
    ("semiclassics::linearized_decoherence_factor", "run --model semiclassic"),
    ("semiclassics::classical_trajectory", "run --model semiclassic --summary"),
    ("semiclassics::local_frequency", "run --model semiclassic --summary"),
    ("semiclassics::distinguishable", "run --model semiclassic --summary"),
    ("stern_gerlach::adiabatic_spinors", "run --model sg --summary"),
    ("stern_gerlach::adiabaticity_ratio", "run --model sg --summary"),
    ("stern_gerlach::induced_gauge", "run --model sg --summary"),
    ("stern_gerlach::wei_norman_params", "run --model sg --summary"),
    ("stern_gerlach::branch_wavefunction", "run --model sg --summary"),
    ("stern_gerlach::trajectory", "run --model sg --summary"),
    ("stern_gerlach::decoherence_factor", "run --model sg --show-paper-form"),
    ("stern_gerlach::decoherence_time", "run --model sg --summary"),
    ("stern_gerlach::distinguishability_condition", "run --model sg --summary"),
    ("large_spin::mixing_angle", "run --model spin --summary"),
    ("large_spin::branch_state", "run --model spin --summary"),
    ("large_spin::decoherence_factor_analytic", "run --model spin --param analytic=1"),
    ("large_spin::decoherence_factor_numeric", "run --model spin"),
    ("large_spin::revival_times", "run --model spin --summary"),
    ("cavity_mirror::adiabatic_photon_state", "run --model cavity --summary"),
    ("cavity_mirror::adiabatic_ratio", "run --model cavity --summary"),
    ("cavity_mirror::displacement_matrix", "run --model cavity --param n_mirror=N --summary"),
    ("cavity_mirror::overlap_coherent", "run --model cavity"),
    ("cavity_mirror::overlap_coherent_limit", "run --model cavity --param limit=1"),
    ("cavity_mirror::overlap_fock", "run --model cavity --param n_mirror=N"),
    ("cavity_mirror::overlap_fock_limit", "run --model cavity --param n_mirror=N --param limit=1"),
    ("cavity_mirror::mirror_branch", "run --model cavity --summary"),
    ("localization::single_s_matrix", "run --model localize --summary"),
    ("localization::single_decoherence_factor", "run --model localize --summary"),
    ("localization::weak_coupling_factor", "run --model localize --summary"),
    ("localization::total_decoherence_factor", "run --model localize"),
    ("localization::localization_exponent", "run --model localize --summary"),
    ("localization::two_packet_density", "run --model localize --density"),
    ("localization::plane_wave_density", "run --model localize --summary"),
    ("localization::phase_function", "run --model localize --summary"),
    ("oracle::grid_propagate", "verify sg"),
    ("oracle::dense_evolve", "verify spin|localize"),
    ("oracle::partial_trace", "verify spin"),
    ("oracle::large_mass_phase_check", "verify localize"),
    ("cli::run", "run"),
    ("cli::verify", "verify"),
    ("cli::sweep", "sweep"),
];
