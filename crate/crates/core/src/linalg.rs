//! Fixed-size real matrices for the plane (2×2) and the polariser ⊗ light
//! product space (4×4).
//!
//! Kronecker layout: `kron(a, b)[2i + k][2j + l] = a[i][j] * b[k][l]`, so the
//! left factor selects the 2×2 block and the right factor the entry inside it.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix2(pub [[f64; 2]; 2]);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix4(pub [[f64; 4]; 4]);

impl Matrix2 {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Matrix2([[a, b], [c, d]])
    }

    pub const fn zeros() -> Self {
        Matrix2([[0.0; 2]; 2])
    }

    pub const fn identity() -> Self {
        Matrix2::new(1.0, 0.0, 0.0, 1.0)
    }

    /// Real Pauli matrix σ₁.
    pub const fn sigma1() -> Self {
        Matrix2::new(0.0, 1.0, 1.0, 0.0)
    }

    /// Real Pauli matrix σ₃.
    pub const fn sigma3() -> Self {
        Matrix2::new(1.0, 0.0, 0.0, -1.0)
    }

    /// Antisymmetric generator τ₂ = −iσ₂ of plane rotations.
    pub const fn tau2() -> Self {
        Matrix2::new(0.0, -1.0, 1.0, 0.0)
    }

    /// Counter-clockwise rotation R(θ).
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Matrix2::new(c, -s, s, c)
    }

    /// Orthogonal projector P_θ = |θ⟩⟨θ| onto the unit vector at polar angle θ.
    pub fn projector(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Matrix2::new(c * c, c * s, c * s, s * s)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Matrix2::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, k: f64) -> Self {
        let m = &self.0;
        Matrix2::new(k * m[0][0], k * m[0][1], k * m[1][0], k * m[1][1])
    }

    pub fn max_abs_diff(&self, other: &Matrix2) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        worst
    }

    pub fn asymmetry(&self) -> f64 {
        (self.0[0][1] - self.0[1][0]).abs()
    }

    /// Closed-form spectrum of the symmetric part: returns `(λ_max, λ_min, θ)`
    /// where θ ∈ (−π/2, π/2] is the polar angle of the λ_max eigenvector.
    ///
    /// For a degenerate spectrum θ is 0.
    pub fn symmetric_eigen(&self) -> (f64, f64, f64) {
        let m = &self.0;
        let off = 0.5 * (m[0][1] + m[1][0]);
        let mean = 0.5 * (m[0][0] + m[1][1]);
        let half_diff = 0.5 * (m[0][0] - m[1][1]);
        let radius = half_diff.hypot(off);
        let theta = if radius == 0.0 {
            0.0
        } else {
            0.5 * off.atan2(half_diff)
        };
        (mean + radius, mean - radius, theta)
    }

    pub fn kron(&self, rhs: &Matrix2) -> Matrix4 {
        let mut out = [[0.0; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[2 * i + k][2 * j + l] = self.0[i][j] * rhs.0[k][l];
                    }
                }
            }
        }
        Matrix4(out)
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, rhs: Matrix2) -> Matrix2 {
        let (a, b) = (&self.0, &rhs.0);
        Matrix2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, rhs: Matrix2) -> Matrix2 {
        self + rhs.scale(-1.0)
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, rhs: Matrix2) -> Matrix2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Matrix2(out)
    }
}

impl Matrix4 {
    pub const fn zeros() -> Self {
        Matrix4([[0.0; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Matrix4(out)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn transpose(&self) -> Self {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[j][i];
            }
        }
        Matrix4(out)
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = self.0;
        out.iter_mut().flatten().for_each(|v| *v *= k);
        Matrix4(out)
    }

    pub fn max_abs_diff(&self, other: &Matrix4) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Trace over the left (polariser) factor, leaving the right (light) block.
    pub fn trace_left(&self) -> Matrix2 {
        let mut out = [[0.0; 2]; 2];
        for (k, row) in out.iter_mut().enumerate() {
            for (l, v) in row.iter_mut().enumerate() {
                *v = self.0[k][l] + self.0[2 + k][2 + l];
            }
        }
        Matrix2(out)
    }

    /// Trace over the right (light) factor, leaving the left (polariser) block.
    pub fn trace_right(&self) -> Matrix2 {
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[2 * i][2 * j] + self.0[2 * i + 1][2 * j + 1];
            }
        }
        Matrix2(out)
    }
}

impl Add for Matrix4 {
    type Output = Matrix4;
    fn add(self, rhs: Matrix4) -> Matrix4 {
        let mut out = self.0;
        for (a, b) in out.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a += b;
        }
        Matrix4(out)
    }
}

impl Mul for Matrix4 {
    type Output = Matrix4;
    fn mul(self, rhs: Matrix4) -> Matrix4 {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        Matrix4(out)
    }
}
