//! Qubit density matrices and their four-atom quasi-probability states,
//! through the frame `(I ± σx ± σy ± σz) / 4` with an even number of minus
//! signs.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitBall, UnitSphere};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mes::{AccessibleMarginals, QUBIT_SIGNS};
use crate::DEFAULT_TOL;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2(pub [[Complex64; 2]; 2]);

impl Matrix2 {
    pub const ZERO: Self = Self([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Self = Self([[ONE, ZERO], [ZERO, ONE]]);
    pub const SIGMA_X: Self = Self([[ZERO, ONE], [ONE, ZERO]]);
    pub const SIGMA_Y: Self = Self([[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]]);
    pub const SIGMA_Z: Self = Self([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]]);

    pub fn paulis() -> [Self; 3] {
        [Self::SIGMA_X, Self::SIGMA_Y, Self::SIGMA_Z]
    }

    pub fn scale(self, k: f64) -> Self {
        let m = self.0;
        Self([[m[0][0] * k, m[0][1] * k], [m[1][0] * k, m[1][1] * k]])
    }

    pub fn adjoint(self) -> Self {
        let m = self.0;
        Self([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn trace(self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn determinant(self) -> Complex64 {
        let m = self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn max_abs_diff(self, other: Self) -> f64 {
        (0..4)
            .map(|k| (self.0[k / 2][k % 2] - other.0[k / 2][k % 2]).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(self, tol: f64) -> bool {
        self.max_abs_diff(self.adjoint()) <= tol
    }

    /// Eigenvalues of a Hermitian matrix, ascending, from the characteristic
    /// quadratic.
    pub fn hermitian_eigenvalues(self) -> [f64; 2] {
        let half_trace = self.trace().re / 2.0;
        let m = self.0;
        let half_gap = ((m[0][0].re - m[1][1].re) / 2.0).hypot(m[0][1].norm());
        [half_trace - half_gap, half_trace + half_gap]
    }

    /// `(I + r · σ) / 2`.
    pub fn from_bloch(r: [f64; 3]) -> Self {
        let mut m = Self::IDENTITY;
        for (sigma, &x) in Self::paulis().iter().zip(&r) {
            m = m + sigma.scale(x);
        }
        m.scale(0.5)
    }

    /// `tr(ρ σ_k)` for `k = x, y, z`.
    pub fn bloch(self) -> [f64; 3] {
        Self::paulis().map(|s| (self * s).trace().re)
    }
}

impl Add for Matrix2 {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        Self([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Matrix2 {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(-1.0)
    }
}

impl Mul for Matrix2 {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        let cell = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        Self([[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]])
    }
}

#[derive(Serialize, Deserialize)]
struct DensityRepr {
    re: [[f64; 2]; 2],
    im: [[f64; 2]; 2],
}

/// A Hermitian, unit-trace, positive semidefinite 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityRepr", into = "DensityRepr")]
pub struct DensityMatrix(Matrix2);

impl TryFrom<DensityRepr> for DensityMatrix {
    type Error = Error;

    fn try_from(r: DensityRepr) -> Result<Self> {
        let cell = |i: usize, j: usize| Complex64::new(r.re[i][j], r.im[i][j]);
        Self::new(Matrix2([
            [cell(0, 0), cell(0, 1)],
            [cell(1, 0), cell(1, 1)],
        ]))
    }
}

impl From<DensityMatrix> for DensityRepr {
    fn from(rho: DensityMatrix) -> Self {
        let m = rho.0 .0;
        Self {
            re: m.map(|row| row.map(|z| z.re)),
            im: m.map(|row| row.map(|z| z.im)),
        }
    }
}

impl DensityMatrix {
    pub fn new(m: Matrix2) -> Result<Self> {
        if !m.is_hermitian(DEFAULT_TOL) {
            return Err(Error::InvalidDensity("matrix is not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > DEFAULT_TOL {
            return Err(Error::InvalidDensity(format!("trace is {tr}, not 1")));
        }
        if !is_positive_semidefinite(&m) {
            return Err(Error::InvalidDensity(
                "matrix has a negative eigenvalue".into(),
            ));
        }
        Ok(Self(m))
    }

    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        Self::new(Matrix2::from_bloch(r))
    }

    pub fn matrix(&self) -> Matrix2 {
        self.0
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.0.bloch()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }
}

/// `λ± = 1/2 ± |r|/2 >= 0`, i.e. `|r| <= 1`, for a unit-trace Hermitian
/// matrix; a non-unit trace or non-Hermitian matrix fails outright.
pub fn is_positive_semidefinite(m: &Matrix2) -> bool {
    if !m.is_hermitian(DEFAULT_TOL) || (m.trace() - ONE).norm() > DEFAULT_TOL {
        return false;
    }
    let r = m.bloch();
    (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt() <= 1.0 + DEFAULT_TOL
}

/// The four frame operators `â, b̂, ĉ, d̂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameOps(pub [Matrix2; 4]);

pub fn frame() -> FrameOps {
    let paulis = Matrix2::paulis();
    FrameOps(QUBIT_SIGNS.map(|signs| {
        paulis
            .iter()
            .zip(signs)
            .fold(Matrix2::IDENTITY, |acc, (s, sign)| acc + s.scale(sign))
            .scale(0.25)
    }))
}

/// `q_i = tr(ρ F_i)`.
pub fn rho_to_q(rho: &DensityMatrix) -> Vec<f64> {
    frame().0.iter().map(|f| (rho.0 * *f).trace().re).collect()
}

/// Bloch vector of the matrix whose frame coefficients are `q`.
pub fn q_to_bloch(q: &[f64]) -> Result<[f64; 3]> {
    if q.len() != 4 {
        return Err(Error::DimensionMismatch {
            left: 4,
            right: q.len(),
        });
    }
    let sum: f64 = q.iter().sum();
    if (sum - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::NotNormalized { sum });
    }
    Ok([
        q[0] + q[1] - q[2] - q[3],
        q[0] + q[2] - q[1] - q[3],
        q[0] + q[3] - q[1] - q[2],
    ])
}

/// The unique Hermitian unit-trace matrix with frame coefficients `q`. It is
/// a density matrix exactly when `1 / Σq² >= 2`.
pub fn q_to_rho(q: &[f64]) -> Result<Matrix2> {
    Ok(Matrix2::from_bloch(q_to_bloch(q)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PurityRelation {
    pub chi2: f64,
    pub two_over_purity: f64,
}

pub fn purity_relation(rho: &DensityMatrix) -> Result<PurityRelation> {
    Ok(PurityRelation {
        chi2: crate::inaccessibility::chi(&rho_to_q(rho))?,
        two_over_purity: 2.0 / rho.purity(),
    })
}

/// `(tr ρ Π↑, tr ρ Π↓)` for spin measurements along `x`, `y`, `z`, with
/// `Π↑↓ = (I ± σ) / 2`.
pub fn mub_marginals(rho: &DensityMatrix) -> AccessibleMarginals {
    AccessibleMarginals(
        Matrix2::paulis()
            .iter()
            .map(|s| {
                [1.0, -1.0]
                    .iter()
                    .map(|&sign| {
                        let proj = (Matrix2::IDENTITY + s.scale(sign)).scale(0.5);
                        (rho.0 * proj).trace().re
                    })
                    .collect()
            })
            .collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PurityMode {
    /// Uniform on the Bloch sphere.
    Pure,
    /// Uniform in the Bloch ball.
    Mixed,
}

pub fn random_density(seed: u64, mode: PurityMode) -> DensityMatrix {
    random_density_with(&mut ChaCha8Rng::seed_from_u64(seed), mode)
}

pub fn random_density_with<R: Rng + ?Sized>(rng: &mut R, mode: PurityMode) -> DensityMatrix {
    let r: [f64; 3] = match mode {
        PurityMode::Pure => UnitSphere.sample(rng),
        PurityMode::Mixed => UnitBall.sample(rng),
    };
    // Sphere samples can land a rounding error outside the ball.
    let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    let r = if norm > 1.0 { r.map(|x| x / norm) } else { r };
    DensityMatrix(Matrix2::from_bloch(r))
}
