//! Density matrices of the real Hilbert plane.
//!
//! Every state is a point `(r, φ)` of the upper half unit disk standing for
//!
//! ```text
//! ρ(r, φ) = ½ [ 1 + r cos2φ    r sin2φ     ]
//!             [ r sin2φ        1 − r cos2φ ]
//! ```
//!
//! `r` is the degree of linear polarisation and `φ` the orientation, kept in
//! the canonical range `[0, π)` because `ρ(r, φ) = ρ(r, φ + π)`.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix2;

/// Tolerance used when validating matrices handed to [`DensityState::from_matrix`].
pub const MATRIX_TOL: f64 = 1e-12;

/// Below this radius the orientation is meaningless and is pinned to 0.
pub const DEGENERATE_R: f64 = 1e-15;

/// Reduces an angle into `[0, π)`.
pub fn reduce_angle(phi: f64) -> f64 {
    let reduced = phi.rem_euclid(PI);
    // rem_euclid can round up to exactly π for tiny negative inputs
    if reduced >= PI {
        0.0
    } else {
        reduced
    }
}

/// Representative of an orientation difference in `(−π/2, π/2]`.
pub fn wrap_orientation(delta: f64) -> f64 {
    let mut d = delta.rem_euclid(PI);
    if d > FRAC_PI_2 {
        d -= PI;
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityState {
    r: f64,
    phi: f64,
}

impl DensityState {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !r.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidState(format!(
                "non-finite coordinates (r = {r}, phi = {phi})"
            )));
        }
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidState(format!("r = {r} outside [0, 1]")));
        }
        Ok(DensityState {
            r,
            phi: reduce_angle(phi),
        })
    }

    /// Builds a state from numerically computed coordinates, absorbing
    /// round-off that pushes `r` marginally outside `[0, 1]`.
    pub(crate) fn from_computed(r: f64, phi: f64) -> Self {
        let r = r.clamp(0.0, 1.0);
        if r <= DEGENERATE_R {
            DensityState { r: 0.0, phi: 0.0 }
        } else {
            DensityState {
                r,
                phi: reduce_angle(phi),
            }
        }
    }

    /// The totally mixed state ½·1.
    pub fn mixed() -> Self {
        DensityState { r: 0.0, phi: 0.0 }
    }

    /// The pure state |φ⟩⟨φ|.
    pub fn pure(phi: f64) -> Result<Self> {
        DensityState::new(1.0, phi)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Cartesian point `(r cosφ, r sinφ)` in the upper half disk.
    pub fn cartesian(&self) -> (f64, f64) {
        let (s, c) = self.phi.sin_cos();
        (self.r * c, self.r * s)
    }

    pub fn to_matrix(&self) -> Matrix2 {
        let (s2, c2) = (2.0 * self.phi).sin_cos();
        let off = 0.5 * self.r * s2;
        Matrix2::new(0.5 + 0.5 * self.r * c2, off, off, 0.5 - 0.5 * self.r * c2)
    }

    /// Inverse of [`to_matrix`](Self::to_matrix): `r` is the eigenvalue gap and
    /// `φ` the angle of the dominant eigenvector.
    pub fn from_matrix(m: &Matrix2) -> Result<Self> {
        let values = m.0.iter().flatten();
        if values.clone().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        if m.asymmetry() > MATRIX_TOL {
            return Err(Error::InvalidMatrix(format!(
                "asymmetric (|m01 - m10| = {:e})",
                m.asymmetry()
            )));
        }
        if (m.trace() - 1.0).abs() > MATRIX_TOL {
            return Err(Error::InvalidMatrix(format!("trace {} != 1", m.trace())));
        }
        let (hi, lo, theta) = m.symmetric_eigen();
        if lo < -MATRIX_TOL {
            return Err(Error::InvalidMatrix(format!("negative eigenvalue {lo:e}")));
        }
        Ok(DensityState::from_computed(hi - lo, theta))
    }

    /// Covariance `R(θ) ρ(r, φ) R(−θ) = ρ(r, φ + θ)`.
    pub fn rotate(&self, theta: f64) -> Self {
        DensityState {
            r: self.r,
            phi: reduce_angle(self.phi + theta),
        }
    }

    /// Von Neumann entropy `−Tr ρ ln ρ`, with `0 ln 0 = 0`.
    pub fn entropy(&self) -> f64 {
        let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.ln() };
        if self.r == 0.0 {
            return LN_2;
        }
        term(0.5 * (1.0 + self.r)) + term(0.5 * (1.0 - self.r))
    }

    pub fn to_stokes(&self) -> StokesVector {
        let (s2, c2) = (2.0 * self.phi).sin_cos();
        StokesVector {
            xi1: self.r * s2,
            xi3: self.r * c2,
            circular: 0.0,
        }
    }

    pub fn from_stokes(v: &StokesVector) -> Result<Self> {
        if !(v.xi1.is_finite() && v.xi3.is_finite() && v.circular.is_finite()) {
            return Err(Error::InvalidStokes("non-finite component".into()));
        }
        if v.circular != 0.0 {
            return Err(Error::InvalidStokes(format!(
                "circular polarisation A = {} is not supported",
                v.circular
            )));
        }
        let r = v.xi1.hypot(v.xi3);
        if r > 1.0 + MATRIX_TOL {
            return Err(Error::InvalidStokes(format!(
                "linear polarisation degree {r} exceeds 1"
            )));
        }
        Ok(DensityState::from_computed(r, 0.5 * v.xi1.atan2(v.xi3)))
    }

    /// Mixture `l1·ρ1 + l2·ρ2`, computed from the sum of the Stokes vectors
    /// `l1 r1 e^{2iφ1} + l2 r2 e^{2iφ2}`.
    pub fn convex_combine(l1: f64, s1: &DensityState, l2: f64, s2: &DensityState) -> Result<Self> {
        let valid = l1.is_finite() && l2.is_finite() && l1 >= 0.0 && l2 >= 0.0;
        if !valid || (l1 + l2 - 1.0).abs() > MATRIX_TOL {
            return Err(Error::InvalidWeights(l1, l2));
        }
        let a = s1.to_stokes();
        let b = s2.to_stokes();
        let xi1 = l1 * a.xi1 + l2 * b.xi1;
        let xi3 = l1 * a.xi3 + l2 * b.xi3;
        Ok(DensityState::from_computed(xi1.hypot(xi3), 0.5 * xi1.atan2(xi3)))
    }

    /// Eigenvalues `((1 + r)/2, (1 − r)/2)`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        (0.5 * (1.0 + self.r), 0.5 * (1.0 - self.r))
    }
}

/// Linear Stokes parameters `ξ1 = r sin2φ`, `ξ3 = r cos2φ`; `circular` is the
/// degree of circular polarisation `A`, always 0 for states of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StokesVector {
    pub xi1: f64,
    pub xi3: f64,
    pub circular: f64,
}

impl StokesVector {
    pub fn linear(xi1: f64, xi3: f64) -> Self {
        StokesVector {
            xi1,
            xi3,
            circular: 0.0,
        }
    }
}

/// Symmetric observable `λ∥ P_γ + λ⊥ P_{γ+π/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observable {
    pub lambda_par: f64,
    pub lambda_perp: f64,
    pub gamma: f64,
}

impl Observable {
    pub fn new(lambda_par: f64, lambda_perp: f64, gamma: f64) -> Self {
        Observable {
            lambda_par,
            lambda_perp,
            gamma: reduce_angle(gamma),
        }
    }

    pub fn matrix(&self) -> Matrix2 {
        Matrix2::projector(self.gamma).scale(self.lambda_par)
            + Matrix2::projector(self.gamma + FRAC_PI_2).scale(self.lambda_perp)
    }
}
