//! Small dense complex linear algebra on the coin space.
//!
//! Everything here is 2×2 or 2×1. The types are `Copy` and all operations are
//! pure, so they can be shared freely between threads.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Cosine and sine of an angle given in degrees.
///
/// Multiples of 90° are returned exactly so that projective limits
/// (for example `cos 90° = 0`) do not pick up rounding residue.
pub fn cos_sin_deg(deg: f64) -> (f64, f64) {
    let reduced = deg.rem_euclid(360.0);
    if reduced == 0.0 {
        (1.0, 0.0)
    } else if reduced == 90.0 {
        (0.0, 1.0)
    } else if reduced == 180.0 {
        (-1.0, 0.0)
    } else if reduced == 270.0 {
        (0.0, -1.0)
    } else {
        let rad = deg.to_radians();
        (rad.cos(), rad.sin())
    }
}

pub fn cos_deg(deg: f64) -> f64 {
    cos_sin_deg(deg).0
}

pub fn sin_deg(deg: f64) -> f64 {
    cos_sin_deg(deg).1
}

/// A two-component coin spinor `(⟨0|ψ⟩, ⟨1|ψ⟩)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spinor(pub [Complex64; 2]);

impl Spinor {
    pub const fn new(up: Complex64, down: Complex64) -> Self {
        Spinor([up, down])
    }

    pub fn real(up: f64, down: f64) -> Self {
        Spinor([Complex64::new(up, 0.0), Complex64::new(down, 0.0)])
    }

    pub const fn zero() -> Self {
        Spinor([ZERO, ZERO])
    }

    /// `|0⟩`, horizontal polarization.
    pub const fn up() -> Self {
        Spinor([ONE, ZERO])
    }

    /// `|1⟩`, vertical polarization.
    pub const fn down() -> Self {
        Spinor([ZERO, ONE])
    }

    pub fn basis(index: usize) -> Self {
        match index {
            0 => Self::up(),
            1 => Self::down(),
            _ => panic!("coin basis index {index} out of range"),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Returns `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            None
        } else {
            Some(self.scale(Complex64::new(1.0 / n, 0.0)))
        }
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Spinor([self.0[0] * factor, self.0[1] * factor])
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> Mat2 {
        Mat2::outer(self, self)
    }

    pub fn max_abs_diff(&self, other: &Spinor) -> f64 {
        (self.0[0] - other.0[0])
            .norm()
            .max((self.0[1] - other.0[1]).norm())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut draw = || -> f64 { rng.sample(StandardNormal) };
        let s = Spinor([
            Complex64::new(draw(), draw()),
            Complex64::new(draw(), draw()),
        ]);
        s.normalized().unwrap_or_else(Spinor::up)
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, rhs: Spinor) -> Spinor {
        Spinor([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1]])
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, rhs: Spinor) -> Spinor {
        Spinor([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1]])
    }
}

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

/// Coin rotations are plain 2×2 matrices that happen to be unitary.
pub type CoinOperator = Mat2;

impl Mat2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2([
            [Complex64::new(a, 0.0), Complex64::new(b, 0.0)],
            [Complex64::new(c, 0.0), Complex64::new(d, 0.0)],
        ])
    }

    pub const fn zeros() -> Self {
        Mat2([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub const fn pauli_x() -> Self {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub const fn pauli_y() -> Self {
        Mat2([[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]])
    }

    pub const fn pauli_z() -> Self {
        Mat2([[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]])
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Mat2::real(h, h, h, -h)
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Mat2([[a, ZERO], [ZERO, d]])
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &Spinor, b: &Spinor) -> Self {
        let mut m = Mat2::zeros();
        for r in 0..2 {
            for c in 0..2 {
                m.0[r][c] = a.0[r] * b.0[c].conj();
            }
        }
        m
    }

    /// Matrix with the given spinors as columns.
    pub fn from_columns(c0: &Spinor, c1: &Spinor) -> Self {
        Mat2([[c0.0[0], c1.0[0]], [c0.0[1], c1.0[1]]])
    }

    pub fn column(&self, index: usize) -> Spinor {
        Spinor([self.0[0][index], self.0[1][index]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|e| *e *= factor);
        m
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn apply(&self, v: &Spinor) -> Spinor {
        let m = &self.0;
        Spinor([
            m[0][0] * v.0[0] + m[0][1] * v.0[1],
            m[1][0] * v.0[0] + m[1][1] * v.0[1],
        ])
    }

    /// `⟨v|M|v⟩`.
    pub fn expectation(&self, v: &Spinor) -> Complex64 {
        v.inner(&self.apply(v))
    }

    /// General inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() < 1e-300 {
            return None;
        }
        let m = &self.0;
        let inv = det.inv();
        Some(Mat2([
            [m[1][1] * inv, -m[0][1] * inv],
            [-m[1][0] * inv, m[0][0] * inv],
        ]))
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|e| e.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.0.iter().flatten().map(|e| e.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Max-entry deviation of `M†M` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Mat2::identity())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_finite() && self.unitarity_defect() <= tol
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_finite() && self.hermiticity_defect() <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = (self.0[0][1] + self.0[1][0].conj()) * 0.5;
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - radius, mean + radius]
    }

    /// Hermitian within `tol` and smallest eigenvalue at least `-tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.hermitian_eigenvalues()[0] >= -tol
    }

    /// Pauli coefficients `(c0, cx, cy, cz)` with `M = c0·I + cx·X + cy·Y + cz·Z`.
    pub fn pauli_coefficients(&self) -> [Complex64; 4] {
        let m = &self.0;
        [
            (m[0][0] + m[1][1]) * 0.5,
            (m[0][1] + m[1][0]) * 0.5,
            (m[0][1] - m[1][0]) * I * 0.5,
            (m[0][0] - m[1][1]) * 0.5,
        ]
    }

    /// Distance between `self` and `other` modulo a global phase.
    ///
    /// The phase is the least-squares optimum `arg Tr(other† self)`; the
    /// returned value is the max-entry deviation `|self − e^{iγ}·other|` at
    /// that phase, which bounds the true minimum over γ from above.
    pub fn phase_distance(&self, other: &Mat2) -> f64 {
        let overlap = (other.adjoint() * *self).trace();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        self.max_abs_diff(&other.scale(phase))
    }

    /// Global phase γ (radians, in (−π, π]) such that `self ≈ e^{iγ}·other`.
    pub fn relative_phase(&self, other: &Mat2) -> f64 {
        (other.adjoint() * *self).trace().arg()
    }

    /// Haar-random element of U(2).
    pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut q = [0.0f64; 4];
        loop {
            for v in q.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 1e-12 {
                q.iter_mut().for_each(|v| *v /= n);
                break;
            }
        }
        let [a, b, c, d] = q;
        let su2 = Mat2::new(
            Complex64::new(a, -d),
            Complex64::new(-c, -b),
            Complex64::new(c, -b),
            Complex64::new(a, d),
        );
        let phase = Complex64::from_polar(
            1.0,
            rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        );
        su2.scale(phase)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2(std::array::from_fn(|r| {
            std::array::from_fn(|c| a[r][0] * b[0][c] + a[r][1] * b[1][c])
        }))
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] += rhs.0[r][c];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + (-rhs)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale_real(-1.0)
    }
}

impl std::iter::Sum for Mat2 {
    fn sum<It: Iterator<Item = Mat2>>(iter: It) -> Mat2 {
        iter.fold(Mat2::zeros(), |acc, m| acc + m)
    }
}
