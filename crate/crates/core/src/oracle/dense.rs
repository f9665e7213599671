//! Dense Hermitian evolution on tensor-product spaces.

use num_complex::Complex64;

use crate::cavity::{displacement_matrix, fock_state, mirror_branch, truncation_for, CavityParams};
use crate::density::ReducedDensityMatrix;
use crate::error::{Error, Result};
use crate::large_spin::{LargeSpinParams, SpinBranches};
use crate::linalg::{kron, CMatrix, CVector, HermitianEigen};
use crate::localization::LocalizationParams;
use crate::specfun::spin_operators;

/// Largest Hilbert-space dimension evolved densely.
pub const MAX_DENSE_DIM: usize = 4096;
const NORM_TOL: f64 = 1e-10;

/// Pure state of a composite system, subsystem `0` most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    dims: Vec<usize>,
    amplitudes: CVector,
}

impl DenseState {
    pub fn new(dims: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::param("dims", "need at least one non-empty subsystem"));
        }
        if total != amplitudes.len() {
            return Err(Error::DimensionMismatch { expected: total, found: amplitudes.len() });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::param("amplitudes", format!("norm {norm} differs from 1")));
        }
        Ok(Self { dims, amplitudes })
    }

    /// `a ⊗ b ⊗ …` of normalized factors.
    pub fn product(factors: &[CVector]) -> Result<Self> {
        let mut amplitudes = CVector::from_element(1, Complex64::new(1.0, 0.0));
        for f in factors {
            amplitudes = amplitudes.kronecker(f);
        }
        Self::new(factors.iter().map(|f| f.len()).collect(), amplitudes)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }
}

fn guard(dim: usize) -> Result<()> {
    if dim > MAX_DENSE_DIM {
        return Err(Error::DimensionGuard { dim, limit: MAX_DENSE_DIM });
    }
    Ok(())
}

/// `exp(-i H t) |ψ>` by eigendecomposition of `H`.
pub fn dense_evolve(hamiltonian: &CMatrix, state: &DenseState, t: f64) -> Result<DenseState> {
    guard(hamiltonian.nrows())?;
    if hamiltonian.nrows() != state.dim() {
        return Err(Error::DimensionMismatch { expected: state.dim(), found: hamiltonian.nrows() });
    }
    let eig = HermitianEigen::new(hamiltonian, 1e-10)?;
    DenseState::new(state.dims.clone(), eig.apply_evolution(&state.amplitudes, t))
}

/// Reduced density matrix of subsystem `keep`, renormalized to unit trace
/// (the state norm is only known to `1e-10`).
pub fn partial_trace(state: &DenseState, keep: usize) -> Result<ReducedDensityMatrix> {
    if keep >= state.dims.len() {
        return Err(Error::param("keep", format!("subsystem {keep} out of range 0..{}", state.dims.len())));
    }
    let d_keep = state.dims[keep];
    let inner: usize = state.dims[keep + 1..].iter().product();
    let outer: usize = state.dims[..keep].iter().product();
    // amplitude index = (o * d_keep + a) * inner + i
    let rest = outer * inner;
    let mut m = CMatrix::zeros(d_keep, rest);
    for o in 0..outer {
        for a in 0..d_keep {
            for i in 0..inner {
                m[(a, o * inner + i)] = state.amplitudes[(o * d_keep + a) * inner + i];
            }
        }
    }
    let rho = &m * m.adjoint();
    let trace = rho.trace().re;
    let rho = rho.unscale(trace);
    ReducedDensityMatrix::new((&rho + rho.adjoint()).scale(0.5))
}

/// Two-level system coupled to a spin `j` by the full Hamiltonian
/// `ω_s σ_z + ω J_z + f(J) σ_x`, `f(J) = sqrt(g² J_x² - ω_s²)`.
///
/// `f(J)` is applied spectrally in the `J_x` eigenbasis; eigenvalues with
/// `g² m_x² < ω_s²` are clipped to zero (see [`FullSpinModel::clipped_levels`]).
/// In that basis the two-level block at `J_x = m_x` is
/// `ω_s σ_z + f(m_x) σ_x` with adiabatic levels `±g|m_x|`. For states
/// supported on `m_x < 0` the lower level carries the potential `+g J_x`
/// (the `+` branch) and the upper one `-g J_x`.
#[derive(Clone, Debug)]
pub struct FullSpinModel {
    params: LargeSpinParams,
    c_plus: Complex64,
    c_minus: Complex64,
    eig: HermitianEigen,
    // columns are J_x eigenvectors
    jx_vectors: CMatrix,
    mx: Vec<f64>,
    coupling: Vec<f64>,
    initial: CVector,
    clipped: usize,
}

impl FullSpinModel {
    pub fn new(params: LargeSpinParams, c_plus: Complex64, c_minus: Complex64) -> Result<Self> {
        let d = params.j.dim();
        guard(2 * d)?;
        let norm = c_plus.norm_sqr() + c_minus.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::param("c", format!("|c_+|² + |c_-|² = {norm}")));
        }
        let ops = spin_operators(params.j)?;
        let jx = HermitianEigen::new(&ops.jx, 1e-12)?;
        let mx: Vec<f64> = jx.values.iter().map(|v| (2.0 * v).round() / 2.0).collect();
        let (g, ws) = (params.g, params.omega_s);
        let mut clipped = 0;
        let coupling: Vec<f64> = mx
            .iter()
            .map(|m| {
                let s = g * g * m * m - ws * ws;
                if s < 0.0 {
                    clipped += 1;
                }
                s.max(0.0).sqrt()
            })
            .collect();
        let f_op = jx.map_spectrum(|v| {
            let m = (2.0 * v).round() / 2.0;
            (g * g * m * m - ws * ws).max(0.0).sqrt()
        });
        let sz = CMatrix::from_diagonal(&CVector::from_vec(vec![1.0.into(), (-1.0).into()]));
        let sx = CMatrix::from_row_slice(2, 2, &[0.0.into(), 1.0.into(), 1.0.into(), 0.0.into()]);
        let id_s = CMatrix::identity(d, d);
        let id_2 = CMatrix::identity(2, 2);
        let h = kron(&sz, &id_s).scale(ws) + kron(&id_2, &ops.jz).scale(params.omega) + kron(&sx, &f_op);
        let eig = HermitianEigen::new(&h, 1e-10)?;

        let spin0 = SpinBranches::new(params)?.initial_state().clone();
        let weights = jx.vectors.ad_mul(&spin0);
        let mut initial = CVector::zeros(2 * d);
        for k in 0..d {
            let (up, low) = adiabatic_pair(ws, coupling[k]);
            let local = [c_plus * low[0] + c_minus * up[0], c_plus * low[1] + c_minus * up[1]];
            for s in 0..2 {
                for r in 0..d {
                    initial[s * d + r] += weights[k] * local[s] * jx.vectors[(r, k)];
                }
            }
        }
        Ok(Self { params, c_plus, c_minus, eig, jx_vectors: jx.vectors, mx, coupling, initial, clipped })
    }

    pub fn params(&self) -> &LargeSpinParams {
        &self.params
    }

    /// Number of `J_x` eigenvalues where `f(J)` was clipped to zero.
    pub fn clipped_levels(&self) -> usize {
        self.clipped
    }

    pub fn state(&self, t: f64) -> Result<DenseState> {
        DenseState::new(vec![2, self.params.j.dim()], self.eig.apply_evolution(&self.initial, t))
    }

    /// Branch amplitudes `(lower, upper)` per `J_x` eigenvector.
    fn branch_amplitudes(&self, psi: &CVector) -> (Vec<Complex64>, Vec<Complex64>) {
        let d = self.params.j.dim();
        let top = self.jx_vectors.ad_mul(&psi.rows(0, d).into_owned());
        let bottom = self.jx_vectors.ad_mul(&psi.rows(d, d).into_owned());
        let mut low = Vec::with_capacity(d);
        let mut up = Vec::with_capacity(d);
        for k in 0..d {
            let (u, l) = adiabatic_pair(self.params.omega_s, self.coupling[k]);
            low.push(top[k] * l[0] + bottom[k] * l[1]);
            up.push(top[k] * u[0] + bottom[k] * u[1]);
        }
        (low, up)
    }

    /// Two-level density matrix in the adiabatic basis (`+` branch first):
    /// the joint state is projected onto `u_±(m_x)` at every `m_x` and the
    /// spin is traced out.
    pub fn adiabatic_density(&self, t: f64) -> Result<ReducedDensityMatrix> {
        let psi = self.state(t)?;
        let (low, up) = self.branch_amplitudes(psi.amplitudes());
        let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 { a.iter().zip(b).map(|(x, y)| x * y.conj()).sum() };
        let mut rho = CMatrix::from_row_slice(2, 2, &[dot(&low, &low), dot(&low, &up), dot(&up, &low), dot(&up, &up)]);
        let trace = rho.trace().re;
        rho.unscale_mut(trace);
        ReducedDensityMatrix::new((&rho + rho.adjoint()).scale(0.5))
    }

    /// `|ρ_{+-}(t)| / |c_+ c_-|`, to be compared with the branch overlap.
    pub fn coherence_ratio(&self, t: f64) -> Result<f64> {
        let rho = self.adiabatic_density(t)?;
        Ok(rho.get(0, 1).norm() / (self.c_plus * self.c_minus).norm())
    }

    /// Non-adiabaticity `ω_s |f'| |ẋ| / 4E³` evaluated at `x = m_x` with
    /// `|ẋ| ≤ ω j`, averaged over the `J_x` distribution at time `t`. Levels
    /// where `f` was clipped count as fully non-adiabatic (ratio 1).
    pub fn adiabaticity_ratio(&self, t: f64) -> Result<f64> {
        let psi = self.state(t)?;
        let (low, up) = self.branch_amplitudes(psi.amplitudes());
        let (g, ws) = (self.params.g, self.params.omega_s);
        let xdot = self.params.omega.abs() * self.params.j.value();
        let mut total = 0.0;
        for k in 0..self.mx.len() {
            let p = low[k].norm_sqr() + up[k].norm_sqr();
            let f = self.coupling[k];
            let r = if f == 0.0 {
                1.0
            } else {
                let df = g * g * self.mx[k].abs() / f;
                (ws.abs() * df * xdot / (4.0 * f.hypot(ws).powi(3))).min(1.0)
            };
            total += p * r;
        }
        Ok(total)
    }
}

/// `(upper, lower)` eigenvectors of `ω_s σ_z + f σ_x` for `f ≥ 0`, real and
/// continuous in `f`.
fn adiabatic_pair(omega_s: f64, f: f64) -> ([f64; 2], [f64; 2]) {
    let half = 0.5 * f.atan2(omega_s);
    let (s, c) = half.sin_cos();
    ([c, s], [-s, c])
}

/// `<ψ(x')|ψ(x)>` for the `N` particles evolved together in the `2^N`
/// product space under `Σ_j ω_j σ_z^j + f_j(x) σ_x^j`, from `|g…g>`.
pub fn tensor_product_factor(params: &LocalizationParams, x: f64, x_prime: f64, t: f64) -> Result<Complex64> {
    let n = params.n_particles();
    if n > 12 {
        return Err(Error::DimensionGuard { dim: 1 << n.min(30), limit: MAX_DENSE_DIM });
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let dim = 1usize << n;
    let mut ground = CVector::zeros(dim);
    ground[dim - 1] = Complex64::new(1.0, 0.0);
    let state = DenseState::new(vec![2; n], ground)?;
    let evolve = |pos: f64| -> Result<CVector> {
        let h = product_hamiltonian(params, pos);
        Ok(dense_evolve(&h, &state, t)?.amplitudes.clone())
    };
    Ok(evolve(x_prime)?.dotc(&evolve(x)?))
}

fn product_hamiltonian(params: &LocalizationParams, x: f64) -> CMatrix {
    let n = params.n_particles();
    let dim = 1usize << n;
    let mut h = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        for j in 0..n {
            let bit = 1usize << (n - 1 - j);
            // bit clear ↔ excited state |e_j>
            let sign = if a & bit == 0 { 1.0 } else { -1.0 };
            h[(a, a)] += Complex64::new(sign * params.omegas()[j], 0.0);
            h[(a ^ bit, a)] += Complex64::new(params.coupling_at(j, x), 0.0);
        }
    }
    h
}

/// `<n| D(α_k)† D(α_l) |n>` from truncated displacement matrices.
pub fn fock_overlap_dense(params: &CavityParams, k: u32, l: u32, n_mirror: u32, t: f64) -> Result<Complex64> {
    let (ak, al) = (params.alpha(k, t), params.alpha(l, t));
    let n = n_mirror as usize;
    let work = fock_truncation(ak.norm().max(al.norm()), n);
    guard(work)?;
    let e_n = fock_state(n, work);
    let dk = displacement_matrix(ak, work)? * &e_n;
    let dl = displacement_matrix(al, work)? * &e_n;
    Ok(dk.dotc(&dl))
}

/// Truncation used by [`fock_overlap_dense`].
pub fn fock_truncation(alpha_abs: f64, n: usize) -> usize {
    truncation_for(alpha_abs, n) + n + 20
}

/// `<D_m|D_n>` for a coherent mirror `|α_0>`, from truncated branch states.
pub fn coherent_overlap_dense(params: &CavityParams, m: u32, n: u32, alpha0: Complex64, t: f64) -> Result<Complex64> {
    let bm = mirror_branch(params, m, alpha0, t)?;
    let bn = mirror_branch(params, n, alpha0, t)?;
    Ok(bm.dotc(&bn))
}
