//! Decoherence from adiabatic entanglement.
//!
//! A fast quantum system coupled to a slow "large" system splits, under the
//! Born-Oppenheimer separation, into branches `c_n |n[x]> ⊗ |D_n(t)>`. The
//! coherence left in the fast system is carried by the decoherence factor
//! `F_{n,m}(t) = <D_n(t)|D_m(t)>`. This crate provides:
//!
//! * closed-form decoherence factors for four models ([`stern_gerlach`],
//!   [`large_spin`], [`cavity`], [`localization`]),
//! * the model-independent semiclassical toolkit ([`semiclassics`]),
//! * the special functions those formulas need ([`specfun`]),
//! * exact-dynamics engines that check every closed form ([`oracle`]),
//! * the acceptance criteria, runnable as a report ([`validation`]).
//!
//! Natural units throughout: `ħ = 1`. Times, energies and frequencies share
//! one unit; positions and momenta are conjugate.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod density;
pub mod error;
pub mod large_spin;
pub mod linalg;
pub mod localization;
pub mod oracle;
pub mod packet;
pub mod semiclassics;
pub mod specfun;
pub mod stern_gerlach;
pub mod trace;
pub mod validation;

pub use density::{purity, reduced_density, BranchDecomposition, ReducedDensityMatrix};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use num_complex::Complex64;
pub use packet::{free_packet_width, GaussianPacket};
pub use trace::DecoherenceTrace;

/// Two-branch label used by the spin-1/2 and large-spin models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    /// `+1.0` for [`Branch::Plus`], `-1.0` for [`Branch::Minus`].
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}
