//! Von Neumann interaction between a quantum polariser and linearly polarised
//! light.
//!
//! The polariser is an ancilla plane state `ρ^P(s₀, θ₀)` coupled to the light
//! through `τ₂ ⊗ A^L` with `A^L = λ∥ P_γ + λ⊥ P_{γ+π/2}`. After the interaction
//! window the joint evolution is
//!
//! ```text
//! U = R(λ∥) ⊗ P_γ + R(λ⊥) ⊗ P_{γ+π/2}
//! ```
//!
//! The polariser is always the left tensor factor and the light the right one.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Matrix2, Matrix4};
use crate::state::{reduce_angle, DEGENERATE_R, wrap_orientation, DensityState, Observable};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolariserGate {
    gamma: f64,
    pub lambda_par: f64,
    pub lambda_perp: f64,
    pub ancilla: DensityState,
}

impl PolariserGate {
    pub fn new(gamma: f64, lambda_par: f64, lambda_perp: f64, ancilla: DensityState) -> Result<Self> {
        if !(gamma.is_finite() && lambda_par.is_finite() && lambda_perp.is_finite()) {
            return Err(Error::Domain("polariser parameters must be finite".into()));
        }
        Ok(PolariserGate {
            gamma: reduce_angle(gamma),
            lambda_par,
            lambda_perp,
            ancilla,
        })
    }

    /// Gate with `λ∥ − λ⊥ = π/2`, which forces the light onto the filter axis.
    pub fn ideal(gamma: f64, ancilla: DensityState) -> Result<Self> {
        PolariserGate::new(gamma, FRAC_PI_2, 0.0, ancilla)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `δ = λ∥ − λ⊥`.
    pub fn coupling_angle(&self) -> f64 {
        self.lambda_par - self.lambda_perp
    }

    pub fn observable(&self) -> Observable {
        Observable::new(self.lambda_par, self.lambda_perp, self.gamma)
    }

    /// Joint evolution operator on polariser ⊗ light.
    pub fn evolution_operator(&self) -> Matrix4 {
        Matrix2::rotation(self.lambda_par).kron(&Matrix2::projector(self.gamma))
            + Matrix2::rotation(self.lambda_perp).kron(&Matrix2::projector(self.gamma + FRAC_PI_2))
    }

    /// `U (ρ^P ⊗ ρ^L) Uᵀ`.
    pub fn joint_evolve(&self, light: &DensityState) -> JointState {
        let u = self.evolution_operator();
        let rho = self.ancilla.to_matrix().kron(&light.to_matrix());
        JointState(u * rho * u.transpose())
    }

    /// Light state after the interaction, traced over the polariser.
    pub fn light_after(&self, light: &DensityState) -> DensityState {
        transmit(light, self.gamma, self.coupling_angle().cos())
    }

    /// Polariser state after the interaction, traced over the light:
    /// the Born-weighted mixture of the ancilla rotated by `λ∥` and by `λ⊥`.
    pub fn polariser_after(&self, light: &DensityState) -> DensityState {
        let (p_par, p_perp) = born_probabilities(light, self.gamma);
        let par = self.ancilla.rotate(self.lambda_par);
        let perp = self.ancilla.rotate(self.lambda_perp);
        // p_par + p_perp = 1 up to one rounding of the cosine term
        DensityState::convex_combine(p_par, &par, p_perp, &perp)
            .expect("Born probabilities are valid mixture weights")
    }

    pub fn interact(&self, light: &DensityState) -> InteractionOutcome {
        let (p_parallel, p_perp) = born_probabilities(light, self.gamma);
        InteractionOutcome {
            light_after: self.light_after(light),
            polariser_after: self.polariser_after(light),
            p_parallel,
            p_perp,
        }
    }
}

/// Joint polariser ⊗ light density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointState(pub Matrix4);

impl JointState {
    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn light_marginal(&self) -> Matrix2 {
        self.0.trace_left()
    }

    pub fn polariser_marginal(&self) -> Matrix2 {
        self.0.trace_right()
    }

    /// `Tr[ρ (1 ⊗ P_θ)]`: probability that the light orients along `θ`.
    pub fn orientation_probability(&self, theta: f64) -> f64 {
        let p = Matrix2::identity().kron(&Matrix2::projector(theta));
        (self.0 * p).trace()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InteractionOutcome {
    pub light_after: DensityState,
    pub polariser_after: DensityState,
    pub p_parallel: f64,
    pub p_perp: f64,
}

/// Born-rule probabilities of orienting along `γ` and `γ + π/2`.
pub fn born_probabilities(light: &DensityState, gamma: f64) -> (f64, f64) {
    let c = light.r() * (2.0 * (gamma - light.phi())).cos();
    let p_par = 0.5 * (1.0 + c);
    (p_par, 1.0 - p_par)
}

/// Reduced light state for a filter at `gamma` whose coupling enters through
/// `cos δ`:
///
/// ```text
/// a = cosζ cos2γ + cosδ sinζ sin2γ
/// b = cosζ sin2γ − cosδ sinζ cos2γ,   ζ = 2(γ − φ₀)
/// r′ = r₀ √(a² + b²),   2φ′ = atan2(b, a)
/// ```
pub fn transmit(light: &DensityState, gamma: f64, cos_delta: f64) -> DensityState {
    let (a, b) = transmission_coefficients(light.phi(), gamma, cos_delta);
    DensityState::from_computed(light.r() * a.hypot(b), 0.5 * b.atan2(a))
}

pub(crate) fn transmission_coefficients(phi0: f64, gamma: f64, cos_delta: f64) -> (f64, f64) {
    let (sz, cz) = (2.0 * (gamma - phi0)).sin_cos();
    let (s2g, c2g) = (2.0 * gamma).sin_cos();
    (
        cz * c2g + cos_delta * sz * s2g,
        cz * s2g - cos_delta * sz * c2g,
    )
}

/// Orientation from the half-angle form `tanφ′ = (√(a² + b²) − a)/b`, defined
/// for `b ≠ 0`.
pub fn half_angle_orientation(phi0: f64, gamma: f64, cos_delta: f64) -> Option<f64> {
    let (a, b) = transmission_coefficients(phi0, gamma, cos_delta);
    if b == 0.0 {
        return None;
    }
    Some(reduce_angle(((a.hypot(b) - a) / b).atan()))
}

/// Ideal filter (`δ` an odd multiple of π/2): `r′ = r₀ |cos2(γ − φ₀)|`.
///
/// The light is aligned with the filter axis when `|γ − φ₀| < π/4` (mod π),
/// the regime where the Malus form `(1 + r′)/2 = (1 − r₀)/2 + r₀ cos²(γ − φ₀)`
/// holds; beyond it the dominant eigenvector is the absorbing axis `γ + π/2`.
/// A fully depolarised output is reported with orientation `γ`.
pub fn ideal_gate_apply(light: &DensityState, gamma: f64) -> DensityState {
    let c = (2.0 * (gamma - light.phi())).cos();
    let r = light.r() * c.abs();
    if r <= DEGENERATE_R {
        return DensityState::new(0.0, gamma).expect("finite orientation");
    }
    let phi = if c > 0.0 { gamma } else { gamma + FRAC_PI_2 };
    DensityState::from_computed(r, phi)
}

/// Classical figures of merit of a polariser with output polarisation `r′`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diattenuation {
    /// `D = (T_max − T_min)/(T_max + T_min) = r′`.
    pub d: f64,
    /// `(1 + D)/(1 − D)`; infinite for an ideal polariser.
    pub extinction_ratio: f64,
    pub ideal: bool,
}

pub fn diattenuation(light_after_r: f64) -> Result<Diattenuation> {
    if !(0.0..=1.0).contains(&light_after_r) {
        return Err(Error::Domain(format!(
            "output polarisation {light_after_r} outside [0, 1]"
        )));
    }
    let t_max = 0.5 * (1.0 + light_after_r);
    let t_min = 0.5 * (1.0 - light_after_r);
    let d = (t_max - t_min) / (t_max + t_min);
    let ideal = light_after_r == 1.0;
    Ok(Diattenuation {
        d,
        extinction_ratio: if ideal { f64::INFINITY } else { t_max / t_min },
        ideal,
    })
}

/// Comparison between the exact weak-coupling action of a polariser and its
/// first-order GKLS identification (`α = 0`, step `δ`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfinitesimalReport {
    /// `β = sin²2(γ − φ₀)`.
    pub beta_eff: f64,
    /// `E = −sin2(γ−φ₀)/(2 sinφ₀) · [sin(2γ − φ₀) − cosφ₀ sin2(γ − φ₀)]`.
    pub energy_eff: f64,
    /// `|r′ − r₀ e^{−δβ}|` for `r₀ = 1`.
    pub r_error: f64,
    /// Orientation mismatch `φ′ − (φ₀ − δE)`, taken in `(−π/2, π/2]`.
    pub phi_error: f64,
    /// Observed exact orientation change `φ′ − φ₀`.
    pub observed_phi_shift: f64,
}

/// Exact action of a filter at `gamma` with coupling `cos δ = 1 − delta` on the
/// pure state at `phi0`, compared with `r₀ e^{−δβ}` and `φ₀ − δE`.
pub fn infinitesimal_consistency(gamma: f64, phi0: f64, delta: f64) -> Result<InfinitesimalReport> {
    if !(delta > 0.0 && delta <= 1e-3) {
        return Err(Error::Domain(format!("delta = {delta} must lie in (0, 1e-3]")));
    }
    if !(gamma.is_finite() && phi0.is_finite()) {
        return Err(Error::Domain("angles must be finite".into()));
    }
    let sin_phi0 = phi0.sin();
    if sin_phi0.abs() < 1e-6 {
        return Err(Error::Domain(format!("|sin phi0| = {:e} below 1e-6", sin_phi0.abs())));
    }
    let light = DensityState::new(1.0, phi0)?;
    let exact = transmit(&light, gamma, 1.0 - delta);

    let zeta = 2.0 * (gamma - phi0);
    let beta_eff = zeta.sin().powi(2);
    let energy_eff =
        -zeta.sin() / (2.0 * sin_phi0) * ((2.0 * gamma - phi0).sin() - phi0.cos() * zeta.sin());

    let r_pred = light.r() * (-delta * beta_eff).exp();
    let phi_pred = phi0 - delta * energy_eff;
    Ok(InfinitesimalReport {
        beta_eff,
        energy_eff,
        r_error: (exact.r() - r_pred).abs(),
        phi_error: wrap_orientation(exact.phi() - phi_pred),
        observed_phi_shift: wrap_orientation(exact.phi() - light.phi()),
    })
}
