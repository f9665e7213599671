//! Special functions used by the closed-form decoherence factors.
//!
//! * angular-momentum matrices and Wigner small-d functions (large-spin model),
//! * Laguerre polynomials and `J_0` (cavity model with a Fock-state mirror).
//!
//! Rotation convention: [`wigner_small_d`] returns `<j,m'| exp(+i J_y φ) |j,m>`,
//! which is the textbook `d^j_{m'm}(-φ)` built on `exp(-i J_y β)`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Largest `2j + 1` accepted by [`spin_operators`].
pub const MAX_SPIN_DIM: usize = 10001;
/// Largest Laguerre order accepted by [`laguerre`].
pub const MAX_LAGUERRE_ORDER: u32 = 100_000;

/// Non-negative half-integer stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInteger {
    twice: u32,
}

impl HalfInteger {
    pub const fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    pub const fn from_integer(j: u32) -> Self {
        Self { twice: 2 * j }
    }

    /// Nearest half-integer to `j`; fails for negative or non-half-integral input.
    pub fn from_f64(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !(twice >= 0.0) || (twice - twice.round()).abs() > 1e-9 || twice > u32::MAX as f64 {
            return Err(Error::param("j", format!("{j} is not a non-negative half-integer")));
        }
        Ok(Self { twice: twice.round() as u32 })
    }

    pub const fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// Multiplet dimension `2j + 1`.
    pub const fn dim(self) -> usize {
        self.twice as usize + 1
    }

    /// Projections `j, j-1, ..., -j` in basis order.
    pub fn projections(self) -> impl Iterator<Item = Projection> {
        let t = self.twice as i32;
        (0..=self.twice as i32).map(move |k| Projection::from_twice(t - 2 * k))
    }

    /// Basis index of projection `m` (0 for `m = j`).
    pub fn index_of(self, m: Projection) -> Result<usize> {
        let t = self.twice as i32;
        if m.twice.abs() > t || (t - m.twice) % 2 != 0 {
            return Err(Error::param("m", format!("{m} is not a projection of j = {self}")));
        }
        Ok(((t - m.twice) / 2) as usize)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Signed half-integer magnetic quantum number stored as `2m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Projection {
    twice: i32,
}

impl Projection {
    pub const fn from_twice(twice: i32) -> Self {
        Self { twice }
    }

    pub fn twice(self) -> i32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }
}

impl std::ops::Neg for Projection {
    type Output = Projection;
    fn neg(self) -> Projection {
        Projection { twice: -self.twice }
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Angular-momentum matrices of one multiplet, basis `m = j, ..., -j`.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub j: HalfInteger,
    pub jx: CMatrix,
    pub jy: CMatrix,
    pub jz: CMatrix,
}

impl SpinOperators {
    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    /// Raising operator `J_+ = J_x + i J_y`.
    pub fn raising(&self) -> CMatrix {
        &self.jx + &self.jy * Complex64::new(0.0, 1.0)
    }
}

/// Builds `J_x, J_y, J_z` with Condon-Shortley phases (real, non-negative
/// ladder elements).
pub fn spin_operators(j: HalfInteger) -> Result<SpinOperators> {
    let dim = j.dim();
    if dim > MAX_SPIN_DIM {
        return Err(Error::DimensionGuard { dim, limit: MAX_SPIN_DIM });
    }
    let jv = j.value();
    let mut jz = CMatrix::zeros(dim, dim);
    let mut jplus = DMatrix::<f64>::zeros(dim, dim);
    for (k, m) in j.projections().enumerate() {
        let m = m.value();
        jz[(k, k)] = Complex64::new(m, 0.0);
        if k > 0 {
            // <m+1| J+ |m>, row k-1 holds m+1
            jplus[(k - 1, k)] = (jv * (jv + 1.0) - m * (m + 1.0)).sqrt();
        }
    }
    let jminus = jplus.transpose();
    let jx = (&jplus + &jminus).map(|x| Complex64::new(0.5 * x, 0.0));
    let jy = (&jplus - &jminus).map(|x| Complex64::new(0.0, -0.5 * x));
    Ok(SpinOperators { j, jx, jy, jz })
}

/// Table of `ln n!`.
#[derive(Clone, Debug)]
pub struct LogFactorial {
    table: Vec<f64>,
}

impl LogFactorial {
    pub fn new(max_n: usize) -> Self {
        let mut table = Vec::with_capacity(max_n + 1);
        let mut acc = 0.0f64;
        table.push(0.0);
        for n in 1..=max_n {
            acc += (n as f64).ln();
            table.push(acc);
        }
        Self { table }
    }

    pub fn get(&self, n: usize) -> f64 {
        self.table[n]
    }
}

/// `<j,m_row| exp(+i J_y φ) |j,m_col>`.
pub fn wigner_small_d(j: HalfInteger, m_row: Projection, m_col: Projection, phi: f64) -> Result<f64> {
    j.index_of(m_row)?;
    j.index_of(m_col)?;
    let lf = LogFactorial::new(j.twice() as usize + 1);
    Ok(small_d_textbook(j, m_row, m_col, -phi, &lf))
}

/// Full `(2j+1) x (2j+1)` matrix of [`wigner_small_d`], rows and columns in
/// basis order `m = j, ..., -j`.
pub fn wigner_small_d_matrix(j: HalfInteger, phi: f64) -> DMatrix<f64> {
    let lf = LogFactorial::new(j.twice() as usize + 1);
    let ms: Vec<Projection> = j.projections().collect();
    DMatrix::from_fn(j.dim(), j.dim(), |r, c| small_d_textbook(j, ms[r], ms[c], -phi, &lf))
}

/// Textbook `d^j_{m'm}(β) = <j,m'| exp(-i J_y β) |j,m>` through the Jacobi
/// polynomial representation. The explicit alternating sum cancels
/// catastrophically for `j ≳ 30`; the Jacobi recurrence does not.
fn small_d_textbook(j: HalfInteger, mp: Projection, m: Projection, beta: f64, lf: &LogFactorial) -> f64 {
    if beta == 0.0 {
        return if mp == m { 1.0 } else { 0.0 };
    }
    // Reduce to d_{a,b} with b >= |a| using
    //   d_{m',m} = (-1)^{m-m'} d_{m,m'} = d_{-m,-m'}.
    let (a, b, sign) = {
        let (mp2, m2) = (mp.twice(), m.twice());
        let parity = if ((m2 - mp2) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if m2 >= mp2.abs() {
            (mp2, m2, 1.0)
        } else if mp2 >= m2.abs() {
            (m2, mp2, parity)
        } else if -m2 >= mp2.abs() {
            (-mp2, -m2, parity)
        } else {
            (-m2, -mp2, 1.0)
        }
    };
    let jt = j.twice() as i32;
    // all in units of 1/2
    let jpb = ((jt + b) / 2) as usize;
    let jmb = ((jt - b) / 2) as usize;
    let jpa = ((jt + a) / 2) as usize;
    let jma = ((jt - a) / 2) as usize;
    let alpha = ((b - a) / 2) as u32;
    let beta_p = ((b + a) / 2) as u32;
    let degree = jmb as u32;

    let half = 0.5 * beta;
    let (s, c) = half.sin_cos();
    if (alpha > 0 && s == 0.0) || (beta_p > 0 && c == 0.0) {
        return 0.0;
    }
    let mut log_mag = 0.5 * (lf.get(jpb) + lf.get(jmb) - lf.get(jpa) - lf.get(jma));
    let mut trig_sign = 1.0;
    if alpha > 0 {
        log_mag += alpha as f64 * s.abs().ln();
        if s < 0.0 && alpha % 2 == 1 {
            trig_sign = -trig_sign;
        }
    }
    if beta_p > 0 {
        log_mag += beta_p as f64 * c.abs().ln();
        if c < 0.0 && beta_p % 2 == 1 {
            trig_sign = -trig_sign;
        }
    }
    let (p, log_scale) = jacobi_scaled(degree, alpha as f64, beta_p as f64, beta.cos());
    sign * trig_sign * p * (log_mag + log_scale).exp()
}

/// Jacobi polynomial `P_n^{(α,β)}(x)` by forward recurrence, returned as
/// `(mantissa, ln scale)` so large orders cannot overflow.
fn jacobi_scaled(n: u32, alpha: f64, beta: f64, x: f64) -> (f64, f64) {
    const RESCALE: f64 = 1e200;
    let mut prev = 1.0f64;
    if n == 0 {
        return (prev, 0.0);
    }
    let mut cur = (alpha + 1.0) + 0.5 * (alpha + beta + 2.0) * (x - 1.0);
    let mut log_scale = 0.0;
    let ab = alpha + beta;
    for k in 1..n {
        let k = k as f64;
        let two_k_ab = 2.0 * k + ab;
        let denom = 2.0 * (k + 1.0) * (k + ab + 1.0) * two_k_ab;
        let lin = (two_k_ab + 1.0) * ((two_k_ab + 2.0) * two_k_ab * x + alpha * alpha - beta * beta);
        let back = 2.0 * (k + alpha) * (k + beta) * (two_k_ab + 2.0);
        let next = (lin * cur - back * prev) / denom;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    (cur, log_scale)
}

/// Laguerre polynomial `L_n(z)` by the three-term recurrence
/// `(k+1) L_{k+1} = (2k+1-z) L_k - k L_{k-1}`.
pub fn laguerre(n: u32, z: f64) -> Result<f64> {
    if n > MAX_LAGUERRE_ORDER {
        return Err(Error::param("n", format!("order {n} exceeds {MAX_LAGUERRE_ORDER}")));
    }
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 - z;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 - z) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Bessel function `J_0(z)`.
///
/// Power series for `|z| <= 8`, Miller backward recurrence normalised by
/// `J_0 + 2 Σ J_{2k} = 1` up to `|z| = 25`, Hankel asymptotic expansion above.
pub fn bessel_j0(z: f64) -> f64 {
    let x = z.abs();
    if x <= 8.0 {
        j0_series(x)
    } else if x <= 25.0 {
        j0_miller(x)
    } else {
        j0_asymptotic(x)
    }
}

fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= -q / (k as f64 * k as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

fn j0_miller(x: f64) -> f64 {
    let start = 2 * ((x as usize) / 2 + 30);
    let mut above = 0.0f64; // J_{n+1}
    let mut cur = 1e-30f64; // J_n
    let mut norm = 0.0f64;
    for n in (1..=start).rev() {
        if n % 2 == 0 {
            norm += 2.0 * cur;
        }
        let below = 2.0 * n as f64 / x * cur - above;
        above = cur;
        cur = below;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            above *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += cur;
    cur / norm
}

fn j0_asymptotic(x: f64) -> f64 {
    // t_k = a_k(0) / x^k, ratio t_k / t_{k-1} = -(2k-1)^2 / (8 k x)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    for k in 1..200usize {
        let ratio = -((2 * k - 1) as f64).powi(2) / (8.0 * k as f64 * x);
        let next = term * ratio;
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        // P = Σ (-1)^k t_{2k}, Q = Σ (-1)^k t_{2k+1}
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    let cos_w = (c + s) * std::f64::consts::FRAC_1_SQRT_2;
    let sin_w = (s - c) * std::f64::consts::FRAC_1_SQRT_2;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * cos_w - q * sin_w)
}
