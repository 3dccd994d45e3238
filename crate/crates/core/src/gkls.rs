//! GKLS (Lindblad) evolution of plane states.
//!
//! For real 2×2 density matrices the master equation reduces to the planar
//! dynamical system
//!
//! ```text
//! φ̇   = α(t) sin4φ − E(t)
//! ṙ/r = −2α(t) cos4φ − β(t)
//! ```
//!
//! with `α = (h1 − h3)/2`, `β = h1 + h3 > 0` and pseudo-Hamiltonian energy
//! `E`. Positivity of the rates `h1, h3 ≥ 0` is the condition `|2α| ≤ β`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{reduce_angle, wrap_orientation, DensityState};

pub const DEFAULT_DT: f64 = 1e-3;

/// Smallest radius the integrator accepts before signalling underflow.
pub const R_UNDERFLOW: f64 = 1e-300;

/// Slack on the positivity condition `|2α| ≤ β`.
const RATE_SLACK: f64 = 1e-12;

type CoefficientFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A coefficient of the master equation as a function of time.
#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    Function(CoefficientFn),
}

impl Coefficient {
    pub fn function(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Coefficient::Function(Arc::new(f))
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            Coefficient::Constant(v) => *v,
            Coefficient::Function(f) => f(t),
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Coefficient::Constant(v) => Some(*v),
            Coefficient::Function(_) => None,
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(v) => write!(f, "Constant({v})"),
            Coefficient::Function(_) => write!(f, "Function(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GklsParams {
    pub alpha: Coefficient,
    pub beta: Coefficient,
    pub energy: Coefficient,
}

impl GklsParams {
    /// Constant coefficients, validated once.
    pub fn constant(alpha: f64, beta: f64, energy: f64) -> Result<Self> {
        let p = GklsParams {
            alpha: Coefficient::Constant(alpha),
            beta: Coefficient::Constant(beta),
            energy: Coefficient::Constant(energy),
        };
        p.check_at(0.0)?;
        Ok(p)
    }

    /// Constant coefficients from the dissipation rates `h1`, `h3`.
    pub fn from_rates(h1: f64, h3: f64, energy: f64) -> Result<Self> {
        GklsParams::constant(0.5 * (h1 - h3), h1 + h3, energy)
    }

    /// Time-dependent coefficients. Validity is checked wherever they are
    /// sampled.
    pub fn time_dependent(alpha: Coefficient, beta: Coefficient, energy: Coefficient) -> Self {
        GklsParams {
            alpha,
            beta,
            energy,
        }
    }

    /// Replaces the energy coefficient.
    pub fn with_energy(&self, energy: Coefficient) -> Self {
        GklsParams {
            energy,
            ..self.clone()
        }
    }

    /// `(α, β, E)` if every coefficient is constant.
    pub fn constants(&self) -> Option<(f64, f64, f64)> {
        Some((
            self.alpha.as_constant()?,
            self.beta.as_constant()?,
            self.energy.as_constant()?,
        ))
    }

    pub fn check_at(&self, t: f64) -> Result<()> {
        let (alpha, beta, energy) = (self.alpha.at(t), self.beta.at(t), self.energy.at(t));
        let invalid = |reason: String| Err(Error::InvalidParams { t, reason });
        if !(alpha.is_finite() && beta.is_finite() && energy.is_finite()) {
            return invalid(format!("non-finite (alpha={alpha}, beta={beta}, E={energy})"));
        }
        if beta <= 0.0 {
            return invalid(format!("beta = {beta} must be positive"));
        }
        if 2.0 * alpha.abs() > beta * (1.0 + RATE_SLACK) {
            return invalid(format!(
                "|2 alpha| = {} exceeds beta = {beta}; rates h1, h3 would be negative",
                2.0 * alpha.abs()
            ));
        }
        Ok(())
    }

    /// `(φ̇, d ln r / dt)` at orientation `phi` and time `t`.
    pub fn log_rates(&self, phi: f64, t: f64) -> (f64, f64) {
        let alpha = self.alpha.at(t);
        let (s4, c4) = (4.0 * phi).sin_cos();
        (
            alpha * s4 - self.energy.at(t),
            -2.0 * alpha * c4 - self.beta.at(t),
        )
    }
}

/// `(φ̇, ṙ)` of the dynamical system.
pub fn gkls_rhs(s: &DensityState, t: f64, p: &GklsParams) -> (f64, f64) {
    let (phi_dot, log_rate) = p.log_rates(s.phi(), t);
    (phi_dot, s.r() * log_rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub state: DensityState,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub dt: f64,
    pub params: GklsParams,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory holds at least the initial sample")
    }

    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }
}

/// Unwrapped `(φ, ln r)` integration state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LogPolar {
    pub phi: f64,
    pub log_r: f64,
}

impl LogPolar {
    pub fn from_state(s: &DensityState) -> Self {
        LogPolar {
            phi: s.phi(),
            log_r: s.r().ln(),
        }
    }

    pub fn r(&self) -> f64 {
        self.log_r.exp()
    }

    pub fn to_state(self) -> DensityState {
        DensityState::from_computed(self.r(), self.phi)
    }
}

/// One classical RK4 step of size `h` from time `t`, with the coefficients
/// validated at every stage time.
pub(crate) fn rk4_step(p: &GklsParams, y: LogPolar, t: f64, h: f64) -> Result<LogPolar> {
    let rates = |phi: f64, tt: f64| -> Result<(f64, f64)> {
        p.check_at(tt)?;
        let (dphi, dlog) = p.log_rates(phi, tt);
        if dlog > 0.0 {
            return Err(Error::InvalidParams {
                t: tt,
                reason: format!("radial rate {dlog} is positive"),
            });
        }
        Ok((dphi, dlog))
    };
    let half = 0.5 * h;
    let k1 = rates(y.phi, t)?;
    let k2 = rates(y.phi + half * k1.0, t + half)?;
    let k3 = rates(y.phi + half * k2.0, t + half)?;
    let k4 = rates(y.phi + h * k3.0, t + h)?;
    Ok(LogPolar {
        phi: y.phi + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        log_r: y.log_r + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    })
}

/// Fixed-step RK4 integration of `(φ, ln r)` from `t0` to `t1`.
///
/// Sample times are `t0 + k·dt`; the last step is shortened so the final
/// sample lands exactly on `t1`. A state at the origin stays there.
pub fn integrate(s0: &DensityState, p: &GklsParams, t0: f64, t1: f64, dt: f64) -> Result<Trajectory> {
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(Error::Domain(format!("integration window [{t0}, {t1}]")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Domain(format!("step dt = {dt} must be positive")));
    }
    p.check_at(t0)?;
    let span = t1 - t0;
    let steps = (span / dt).ceil() as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(Sample { t: t0, state: *s0 });

    let at_origin = s0.r() == 0.0;
    let mut y = LogPolar {
        phi: s0.phi(),
        log_r: if at_origin { 0.0 } else { s0.r().ln() },
    };
    let mut t = t0;
    for k in 1..=steps {
        let t_next = if k == steps { t1 } else { t0 + k as f64 * dt };
        if t_next <= t {
            continue;
        }
        y = rk4_step(p, y, t, t_next - t)?;
        t = t_next;
        let r = if at_origin { 0.0 } else { y.r() };
        if !at_origin && r < R_UNDERFLOW {
            return Err(Error::Underflow(t));
        }
        samples.push(Sample {
            t,
            state: DensityState::from_computed(r, y.phi),
        });
    }
    Ok(Trajectory {
        samples,
        dt,
        params: p.clone(),
    })
}

/// Which closed form produced an analytic orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AnalyticBranch {
    /// `α = 0`: uniform rotation `φ0 − EΔt`.
    Uniform,
    /// `E² > α²`: periodic tangent solution.
    StrongDrive,
    /// `α² > E²` in the coth form (real log argument).
    WeakDriveCoth,
    /// `α² > E²` where the coth constant is complex; its continuation is tanh.
    WeakDriveTanh,
    /// `φ0` sits on a fixed point of `φ̇`.
    FixedPoint,
    /// `E = 0`, `α ≠ 0`: separable log-tan solution.
    Separable,
    /// `E² = α² ≠ 0`: rational solution.
    Parabolic,
}

fn check_constant(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {v} must be finite")))
    }
}

/// Orientation after `φ0` is carried along a curve `(numerator, denominator)`
/// of `tan2φ` from the parameter value at `Δt = 0` to `Δt`. The angle of the
/// vector moves continuously with the flow, so the change of `2φ` is the
/// change of that angle, taken modulo 2π (a change of π in `φ` is invisible).
fn advance_by_angle(phi0: f64, start: (f64, f64), end: (f64, f64)) -> f64 {
    let a0 = start.0.atan2(start.1);
    let a1 = end.0.atan2(end.1);
    reduce_angle(phi0 + 0.5 * (a1 - a0))
}

/// Closed-form orientation for `E² > α²`:
/// `φ(t) = ½ arctan[(−ω₁/E) tan(2ω₁Δt + c₀) + α/E] + nπ/2` with
/// `ω₁ = √(E² − α²)` and `c₀ = arctan[(−E tan2φ₀ + α)/ω₁]`.
///
/// The branch integer `n` is fixed by continuity: with `Θ = 2ω₁Δt + c₀`,
/// `tan2φ = (α cosΘ − ω₁ sinΘ)/(E cosΘ)` and the vector
/// `(α cosΘ − ω₁ sinΘ, E cosΘ)` never vanishes, so its polar angle tracks `2φ`.
pub fn analytic_phi_strong_drive(phi0: f64, alpha: f64, energy: f64, dt: f64) -> Result<f64> {
    for (n, v) in [("phi0", phi0), ("alpha", alpha), ("energy", energy), ("dt", dt)] {
        check_constant(n, v)?;
    }
    if energy * energy <= alpha * alpha {
        return Err(Error::Domain(format!(
            "strong drive requires E^2 > alpha^2 (E = {energy}, alpha = {alpha})"
        )));
    }
    let omega = (energy * energy - alpha * alpha).sqrt();
    let (s2, c2) = (2.0 * phi0).sin_cos();
    // c0 via atan2 so that tan2φ0 = ±∞ is handled
    let c0 = (alpha * c2 - energy * s2).atan2(omega * c2);
    let curve = |theta: f64| {
        let (s, c) = theta.sin_cos();
        (alpha * c - omega * s, energy * c)
    };
    Ok(advance_by_angle(phi0, curve(c0), curve(c0 + 2.0 * omega * dt)))
}

/// Period of the strong-drive φ cycle, `π/(2ω₁)`. Over one period φ advances
/// by exactly π/2.
pub fn strong_drive_period(alpha: f64, energy: f64) -> Result<f64> {
    if energy * energy <= alpha * alpha {
        return Err(Error::Domain("strong drive requires E^2 > alpha^2".into()));
    }
    Ok(PI / (2.0 * (energy * energy - alpha * alpha).sqrt()))
}

/// Closed-form orientation for `α² > E²`, `E ≠ 0`:
/// `φ(t) = ½ arctan[α/E + (γ/E) coth(2γΔt + c₂)] + nπ/2` with `γ = √(α² − E²)`
/// and `c₂ = ½ ln[(−E tan2φ₀ + α − γ)/(−E tan2φ₀ + α + γ)]`.
///
/// When the log argument is negative the constant is `c₂ + iπ/2` and the
/// solution continues as the tanh form; the branch used is returned.
pub fn analytic_phi_weak_drive(
    phi0: f64,
    alpha: f64,
    energy: f64,
    dt: f64,
) -> Result<(f64, AnalyticBranch)> {
    for (n, v) in [("phi0", phi0), ("alpha", alpha), ("energy", energy), ("dt", dt)] {
        check_constant(n, v)?;
    }
    if alpha * alpha <= energy * energy {
        return Err(Error::Domain(format!(
            "weak drive requires alpha^2 > E^2 (E = {energy}, alpha = {alpha})"
        )));
    }
    if energy == 0.0 {
        return Err(Error::Domain(
            "E = 0 is singular in the weak-drive form; use analytic_phi_separable".into(),
        ));
    }
    let gamma = (alpha * alpha - energy * energy).sqrt();
    let (s2, c2) = (2.0 * phi0).sin_cos();
    // v = (E tan2φ − α)/γ obeys v̇ = 2γ(1 − v²); write v0 = num/den
    let num = energy * s2 - alpha * c2;
    let den = gamma * c2;
    let x = 2.0 * gamma * dt;
    if (num.abs() - den.abs()).abs() <= 1e-15 * num.abs().max(den.abs()) {
        // |v0| = 1: φ0 is an equilibrium of φ̇
        return Ok((reduce_angle(phi0), AnalyticBranch::FixedPoint));
    }
    if num.abs() > den.abs() {
        // v = coth(x + c2), c2 = atanh(den/num)
        let c = (den / num).atanh();
        let curve = |u: f64| {
            let (sh, ch) = (u.sinh(), u.cosh());
            (alpha * sh + gamma * ch, energy * sh)
        };
        Ok((
            advance_by_angle(phi0, curve(c), curve(c + x)),
            AnalyticBranch::WeakDriveCoth,
        ))
    } else {
        // v = tanh(x + c), c = atanh(num/den)
        let c = (num / den).atanh();
        let curve = |u: f64| {
            let (sh, ch) = (u.sinh(), u.cosh());
            (alpha * ch + gamma * sh, energy * ch)
        };
        Ok((
            advance_by_angle(phi0, curve(c), curve(c + x)),
            AnalyticBranch::WeakDriveTanh,
        ))
    }
}

/// `E = 0`: `tan2φ(t) = tan2φ₀ · e^{4αΔt}`.
pub fn analytic_phi_separable(phi0: f64, alpha: f64, dt: f64) -> Result<f64> {
    for (n, v) in [("phi0", phi0), ("alpha", alpha), ("dt", dt)] {
        check_constant(n, v)?;
    }
    let (s2, c2) = (2.0 * phi0).sin_cos();
    let g = (2.0 * alpha * dt).exp();
    Ok(advance_by_angle(phi0, (s2, c2), (s2 * g, c2 / g)))
}

/// Orientation at `Δt` for constant `α`, `E`, dispatching to the matching
/// closed form.
pub fn analytic_phi(phi0: f64, alpha: f64, energy: f64, dt: f64) -> Result<(f64, AnalyticBranch)> {
    for (n, v) in [("phi0", phi0), ("alpha", alpha), ("energy", energy), ("dt", dt)] {
        check_constant(n, v)?;
    }
    if alpha == 0.0 {
        return Ok((reduce_angle(phi0 - energy * dt), AnalyticBranch::Uniform));
    }
    if energy == 0.0 {
        return Ok((analytic_phi_separable(phi0, alpha, dt)?, AnalyticBranch::Separable));
    }
    let (e2, a2) = (energy * energy, alpha * alpha);
    if e2 > a2 {
        Ok((
            analytic_phi_strong_drive(phi0, alpha, energy, dt)?,
            AnalyticBranch::StrongDrive,
        ))
    } else if a2 > e2 {
        analytic_phi_weak_drive(phi0, alpha, energy, dt)
    } else {
        // E = ±α: u = tan2φ − α/E obeys u̇ = −2E u², so u = u0/(1 + 2EΔt u0)
        let (s2, c2) = (2.0 * phi0).sin_cos();
        let p = energy * s2 - alpha * c2;
        let q = energy * c2;
        let curve = |tau: f64| {
            let d = q + 2.0 * energy * tau * p;
            (alpha * d + energy * p, energy * d)
        };
        Ok((
            advance_by_angle(phi0, curve(0.0), curve(dt)),
            AnalyticBranch::Parabolic,
        ))
    }
}

/// Roots of `α sin4φ = E` in `[0, π)`: the equilibria of the orientation flow.
pub fn orientation_fixed_points(alpha: f64, energy: f64) -> Vec<f64> {
    if alpha == 0.0 || (energy / alpha).abs() > 1.0 {
        return Vec::new();
    }
    let base = (energy / alpha).asin();
    let mut roots: Vec<f64> = (0..4)
        .flat_map(|k| {
            let shift = k as f64 * 2.0 * PI;
            [(base + shift) / 4.0, (PI - base + shift) / 4.0]
        })
        .map(reduce_angle)
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    roots
}

/// Drive that freezes the orientation at `φ_R`: `E(t) = α(t) sin4φ_R`, under
/// which the state slides radially, `r(t) = r_R exp[−∫(2α cos4φ_R + β)]`.
#[derive(Debug, Clone)]
pub struct ConstantPhiDrive {
    pub start: DensityState,
    pub t0: f64,
    pub params: GklsParams,
}

/// Intervals used for the radial quadrature of time-dependent coefficients.
const RADIAL_QUADRATURE_INTERVALS: usize = 2048;

impl ConstantPhiDrive {
    pub fn new(start: DensityState, t0: f64, params: &GklsParams) -> Result<Self> {
        params.check_at(t0)?;
        let phi_ref = start.phi();
        let alpha = params.alpha.clone();
        let energy = match &alpha {
            Coefficient::Constant(a) => Coefficient::Constant(a * (4.0 * phi_ref).sin()),
            Coefficient::Function(_) => {
                let alpha = alpha.clone();
                Coefficient::function(move |t| alpha.at(t) * (4.0 * phi_ref).sin())
            }
        };
        Ok(ConstantPhiDrive {
            start,
            t0,
            params: params.with_energy(energy),
        })
    }

    pub fn energy(&self, t: f64) -> f64 {
        self.params.energy.at(t)
    }

    fn decay_rate(&self, t: f64) -> f64 {
        2.0 * self.params.alpha.at(t) * (4.0 * self.start.phi()).cos() + self.params.beta.at(t)
    }

    /// Radius at time `t ≥ t0`.
    pub fn radius(&self, t: f64) -> f64 {
        let span = t - self.t0;
        let integral = match self.params.constants() {
            Some(_) => self.decay_rate(self.t0) * span,
            None => {
                // composite Simpson
                let n = RADIAL_QUADRATURE_INTERVALS;
                let h = span / n as f64;
                let mut acc = self.decay_rate(self.t0) + self.decay_rate(t);
                for k in 1..n {
                    let w = if k % 2 == 1 { 4.0 } else { 2.0 };
                    acc += w * self.decay_rate(self.t0 + k as f64 * h);
                }
                acc * h / 3.0
            }
        };
        self.start.r() * (-integral).exp()
    }

    pub fn state(&self, t: f64) -> DensityState {
        DensityState::from_computed(self.radius(t), self.start.phi())
    }
}

/// For `α = 0`, the constant energy and decay rate carrying `reference` at
/// `t_ref` to `target` at `t_target`:
/// `E = (φ_R − φ_T)/(t_T − t_R)`, `β = ln(r_R/r_T)/(t_T − t_R)`.
///
/// `φ_R − φ_T` is taken in `(−π/2, π/2]`.
pub fn constant_rate_params(
    reference: &DensityState,
    target: &DensityState,
    t_ref: f64,
    t_target: f64,
) -> Result<(f64, f64)> {
    let span = t_target - t_ref;
    if !(span.is_finite() && span > 0.0) {
        return Err(Error::Domain(format!(
            "target time {t_target} must follow reference time {t_ref}"
        )));
    }
    if target.r() == 0.0 {
        return Err(Error::Domain("target radius is zero".into()));
    }
    if target.r() >= reference.r() {
        return Err(Error::Domain(format!(
            "target radius {} must be below reference radius {} for beta > 0",
            target.r(),
            reference.r()
        )));
    }
    let energy = wrap_orientation(reference.phi() - target.phi()) / span;
    let beta = (reference.r() / target.r()).ln() / span;
    Ok((energy, beta))
}

/// Closed-system limit: rotation by `∫E dt`.
pub fn closed_rotation_evolution(s: &DensityState, energy_integral: f64) -> DensityState {
    s.rotate(energy_integral)
}

/// Fixed-point test for the radial equation at a frozen orientation:
/// `2α cos4φ + β = 0`.
pub fn is_radial_fixed_point(alpha: f64, beta: f64, phi: f64) -> bool {
    (2.0 * alpha * (4.0 * phi).cos() + beta).abs() <= 1e-12 * beta.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn st(r: f64, phi: f64) -> DensityState {
        DensityState::new(r, phi).unwrap()
    }

    fn orientation_gap(a: f64, b: f64) -> f64 {
        wrap_orientation(a - b).abs()
    }

    #[test]
    fn rhs_examples() {
        let p = GklsParams::constant(0.0, 2.0, -2.0).unwrap();
        assert_eq!(gkls_rhs(&st(1.0, 0.7), 0.0, &p), (2.0, -2.0));

        let e = (4.0 * FRAC_PI_3).sin();
        let p = GklsParams::constant(1.0, 2.0, e).unwrap();
        assert_abs_diff_eq!(gkls_rhs(&st(0.5, FRAC_PI_3), 0.0, &p).0, 0.0, epsilon = 1e-15);

        assert_eq!(gkls_rhs(&DensityState::mixed(), 0.0, &p).1, 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(GklsParams::constant(0.0, 0.0, 1.0).is_err());
        assert!(GklsParams::constant(1.5, 2.0, 1.0).is_err());
        assert!(GklsParams::constant(-1.0, 2.0, 1.0).is_ok());
        let p = GklsParams::from_rates(1.0, 1.0, -2.0).unwrap();
        assert_eq!(p.constants(), Some((0.0, 2.0, -2.0)));
    }

    #[test]
    fn integrate_isotropic_matches_closed_form() {
        let p = GklsParams::constant(0.0, 2.0, -2.0).unwrap();
        let traj = integrate(&st(1.0, FRAC_PI_2), &p, 0.0, 0.8, DEFAULT_DT).unwrap();
        for s in &traj.samples {
            assert_abs_diff_eq!(s.state.r(), (-2.0 * s.t).exp(), epsilon = 1e-8);
            let expected = reduce_angle(FRAC_PI_2 + 2.0 * s.t);
            assert!(orientation_gap(s.state.phi(), expected) < 1e-8);
        }
        assert_eq!(traj.last().t, 0.8);
    }

    #[test]
    fn integrate_fixed_point_is_stationary() {
        let p = GklsParams::constant(1.0, 2.0, 0.0).unwrap();
        let s0 = st(0.9, FRAC_PI_4);
        let traj = integrate(&s0, &p, 0.0, 2.0, DEFAULT_DT).unwrap();
        for s in &traj.samples {
            assert_abs_diff_eq!(s.state.r(), 0.9, epsilon = 1e-10);
            assert_abs_diff_eq!(s.state.phi(), FRAC_PI_4, epsilon = 1e-10);
        }
    }

    #[test]
    fn integrate_zero_span_returns_initial_state() {
        let p = GklsParams::constant(0.3, 2.0, 1.0).unwrap();
        let traj = integrate(&st(0.4, 1.0), &p, 1.5, 1.5, 0.01).unwrap();
        assert_eq!(traj.samples.len(), 1);
        assert_eq!(traj.samples[0].state, st(0.4, 1.0));
    }

    #[test]
    fn integrate_final_step_is_shortened() {
        let p = GklsParams::constant(0.0, 1.0, 1.0).unwrap();
        let traj = integrate(&st(1.0, 0.0), &p, 0.0, 0.105, 0.01).unwrap();
        assert_eq!(traj.samples.len(), 12);
        assert_eq!(traj.last().t, 0.105);
        assert!(traj.samples.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn integrate_rejects_bad_windows() {
        let p = GklsParams::constant(0.0, 1.0, 1.0).unwrap();
        assert!(integrate(&st(1.0, 0.0), &p, 1.0, 0.0, 0.1).is_err());
        assert!(integrate(&st(1.0, 0.0), &p, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn integrate_signals_underflow() {
        let p = GklsParams::constant(0.0, 1000.0, 0.0).unwrap();
        let err = integrate(&st(1.0, 0.0), &p, 0.0, 1.0, 0.01).unwrap_err();
        assert!(matches!(err, Error::Underflow(_)));
    }

    #[test]
    fn integrate_checks_time_dependent_positivity() {
        let p = GklsParams::time_dependent(
            Coefficient::function(|t| t),
            Coefficient::Constant(1.0),
            Coefficient::Constant(0.0),
        );
        let err = integrate(&st(1.0, 0.2), &p, 0.0, 1.0, 0.01).unwrap_err();
        assert!(matches!(err, Error::InvalidParams { .. }));
    }

    #[test]
    fn origin_is_invariant() {
        let p = GklsParams::constant(0.5, 2.0, 1.0).unwrap();
        let traj = integrate(&DensityState::mixed(), &p, 0.0, 1.0, 0.01).unwrap();
        assert!(traj.samples.iter().all(|s| s.state.r() == 0.0));
    }

    #[test]
    fn strong_drive_initial_condition_and_examples() {
        assert_abs_diff_eq!(analytic_phi_strong_drive(0.3, 0.5, 10.0, 0.0).unwrap(), 0.3, epsilon = 1e-15);
        for (alpha, beta) in [(-9.0, 20.0), (0.5, 3.0)] {
            let p = GklsParams::constant(alpha, beta, 10.0).unwrap();
            let period = strong_drive_period(alpha, 10.0).unwrap();
            let traj = integrate(&st(1.0, FRAC_PI_2), &p, 0.0, period, 1e-4).unwrap();
            for s in &traj.samples {
                let phi = analytic_phi_strong_drive(FRAC_PI_2, alpha, 10.0, s.t).unwrap();
                assert!(orientation_gap(phi, s.state.phi()) < 1e-6, "t = {}", s.t);
            }
        }
    }

    #[test]
    fn strong_drive_rejects_weak_parameters() {
        assert!(analytic_phi_strong_drive(0.0, 2.0, 1.0, 1.0).is_err());
        assert!(analytic_phi_strong_drive(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn strong_drive_advances_quarter_turn_per_period() {
        let (alpha, energy, phi0) = (0.5, 10.0, 0.4);
        let period = strong_drive_period(alpha, energy).unwrap();
        for t in [0.0, 0.037, 0.11] {
            let a = analytic_phi_strong_drive(phi0, alpha, energy, t).unwrap();
            let b = analytic_phi_strong_drive(phi0, alpha, energy, t + period).unwrap();
            let c = analytic_phi_strong_drive(phi0, alpha, energy, t + 2.0 * period).unwrap();
            // E > 0 drives φ downward by π/2 per period
            assert!(orientation_gap(b, a - FRAC_PI_2) < 1e-8);
            assert!(orientation_gap(c, a) < 1e-8);
        }
    }

    #[test]
    fn weak_drive_matches_rk4_and_converges_to_attractor() {
        let (alpha, energy, phi0) = (2.0, 1.0, 0.3);
        let p = GklsParams::constant(alpha, 2.0 * alpha + 1.0, energy).unwrap();
        let traj = integrate(&st(1.0, phi0), &p, 0.0, 3.0, 1e-4).unwrap();
        let (_, branch) = analytic_phi_weak_drive(phi0, alpha, energy, 0.0).unwrap();
        assert_ne!(branch, AnalyticBranch::FixedPoint);
        for s in &traj.samples {
            let (phi, _) = analytic_phi_weak_drive(phi0, alpha, energy, s.t).unwrap();
            assert!(orientation_gap(phi, s.state.phi()) < 1e-6, "t = {}", s.t);
        }
        let (late, _) = analytic_phi_weak_drive(phi0, alpha, energy, 50.0).unwrap();
        assert_abs_diff_eq!(alpha * (4.0 * late).sin(), energy, epsilon = 1e-12);
        assert!(orientation_fixed_points(alpha, energy)
            .iter()
            .any(|r| orientation_gap(*r, late) < 1e-10));
    }

    #[test]
    fn weak_drive_both_branches_match_rk4() {
        // φ0 = 0.1 gives |v0| < 1 (tanh), φ0 = 1.2 gives |v0| > 1 (coth)
        let (alpha, energy) = (-1.5, 0.7);
        let p = GklsParams::constant(alpha, 3.5, energy).unwrap();
        let mut seen = Vec::new();
        for phi0 in [0.1, 1.2] {
            let (_, branch) = analytic_phi_weak_drive(phi0, alpha, energy, 1.0).unwrap();
            seen.push(branch);
            let traj = integrate(&st(1.0, phi0), &p, 0.0, 3.0, 1e-4).unwrap();
            for s in &traj.samples {
                let (phi, _) = analytic_phi_weak_drive(phi0, alpha, energy, s.t).unwrap();
                assert!(orientation_gap(phi, s.state.phi()) < 1e-6);
            }
        }
        assert!(seen.contains(&AnalyticBranch::WeakDriveCoth));
        assert!(seen.contains(&AnalyticBranch::WeakDriveTanh));
    }

    #[test]
    fn weak_drive_domain_errors() {
        assert!(analytic_phi_weak_drive(0.3, 1.0, 2.0, 1.0).is_err());
        assert!(analytic_phi_weak_drive(0.3, 1.0, 0.0, 1.0).is_err());
        assert_abs_diff_eq!(analytic_phi_weak_drive(0.3, 2.0, 1.0, 0.0).unwrap().0, 0.3, epsilon = 1e-15);
    }

    #[test]
    fn separable_and_parabolic_match_rk4() {
        for (alpha, energy, phi0) in [(1.0, 0.0, 0.2), (-0.8, 0.0, 1.0), (1.0, 1.0, 0.5), (1.0, -1.0, 2.0)] {
            let p = GklsParams::constant(alpha, 2.0 * alpha.abs() + 0.5, energy).unwrap();
            let traj = integrate(&st(1.0, phi0), &p, 0.0, 2.0, 1e-4).unwrap();
            for s in &traj.samples {
                let (phi, _) = analytic_phi(phi0, alpha, energy, s.t).unwrap();
                assert!(orientation_gap(phi, s.state.phi()) < 1e-6, "{alpha} {energy} t={}", s.t);
            }
        }
    }

    #[test]
    fn weak_drive_fixed_point_start() {
        let (alpha, energy) = (2.0, 1.0);
        let root = orientation_fixed_points(alpha, energy)[0];
        let (phi, branch) = analytic_phi_weak_drive(root, alpha, energy, 5.0).unwrap();
        assert_eq!(branch, AnalyticBranch::FixedPoint);
        assert_abs_diff_eq!(phi, root, epsilon = 1e-12);
    }

    #[test]
    fn constant_phi_drive_examples() {
        let p = GklsParams::constant(1.0, 2.0, 0.0).unwrap();
        let drive = ConstantPhiDrive::new(st(1.0, FRAC_PI_3), 0.0, &p).unwrap();
        assert_abs_diff_eq!(drive.energy(0.7), (4.0 * FRAC_PI_3).sin(), epsilon = 1e-15);
        for t in [0.0, 0.5, 1.0, 3.0] {
            assert_abs_diff_eq!(drive.radius(t), (-t).exp(), epsilon = 1e-14);
        }
        let traj = integrate(&drive.start, &drive.params, 0.0, 2.0, 1e-3).unwrap();
        for s in &traj.samples {
            assert_abs_diff_eq!(s.state.phi(), FRAC_PI_3, epsilon = 1e-12);
            assert_abs_diff_eq!(s.state.r(), drive.radius(s.t), epsilon = 1e-12);
        }

        // 2α cos4φ + β = 0 at φ = π/4 with α = 1, β = 2
        let drive = ConstantPhiDrive::new(st(0.8, FRAC_PI_4), 0.0, &p).unwrap();
        assert!(is_radial_fixed_point(1.0, 2.0, FRAC_PI_4));
        assert_abs_diff_eq!(drive.radius(10.0), 0.8, epsilon = 1e-12);

        let beta = Coefficient::function(|t| 1.0 + t);
        let p = GklsParams::time_dependent(Coefficient::Constant(0.0), beta, Coefficient::Constant(0.0));
        let drive = ConstantPhiDrive::new(st(1.0, 0.4), 0.0, &p).unwrap();
        assert_eq!(drive.energy(1.3), 0.0);
        assert_abs_diff_eq!(drive.radius(2.0), (-4.0_f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn time_dependent_constant_phi_drive_follows_rk4() {
        let alpha = Coefficient::function(|t| 0.5 * (t).cos());
        let beta = Coefficient::function(|t| 2.0 + (t).sin());
        let p = GklsParams::time_dependent(alpha, beta, Coefficient::Constant(0.0));
        let drive = ConstantPhiDrive::new(st(1.0, 0.3), 0.0, &p).unwrap();
        let traj = integrate(&drive.start, &drive.params, 0.0, 2.0, 1e-3).unwrap();
        for s in &traj.samples {
            assert_abs_diff_eq!(s.state.phi(), 0.3, epsilon = 1e-12);
            assert_abs_diff_eq!(s.state.r(), drive.radius(s.t), epsilon = 1e-10);
        }
    }

    #[test]
    fn constant_rate_examples() {
        let (e, b) = constant_rate_params(&st(1.0, 0.0), &st(0.5, FRAC_PI_6), 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(b, std::f64::consts::LN_2, epsilon = 1e-15);
        assert_abs_diff_eq!(e, -FRAC_PI_6, epsilon = 1e-15);

        assert!(constant_rate_params(&st(0.5, 0.2), &st(0.5, 0.2), 0.0, 1.0).is_err());

        let (e, b) = constant_rate_params(&st(1.0, 0.9), &st((-2.0_f64).exp(), 0.9), 0.0, 1.0).unwrap();
        assert_eq!(e, 0.0);
        assert_abs_diff_eq!(b, 2.0, epsilon = 1e-14);

        assert!(constant_rate_params(&st(0.5, 0.2), &st(0.6, 0.2), 0.0, 1.0).is_err());
        assert!(constant_rate_params(&st(0.5, 0.2), &DensityState::mixed(), 0.0, 1.0).is_err());
        assert!(constant_rate_params(&st(1.0, 0.2), &st(0.5, 0.2), 1.0, 1.0).is_err());
    }

    #[test]
    fn constant_rate_params_reproduce_target() {
        let reference = st(1.0, 3.0);
        let target = st(0.4, 0.1);
        let (e, b) = constant_rate_params(&reference, &target, 0.0, 2.0).unwrap();
        let p = GklsParams::constant(0.0, b, e).unwrap();
        let end = integrate(&reference, &p, 0.0, 2.0, 1e-3).unwrap().last().state;
        assert_abs_diff_eq!(end.r(), 0.4, epsilon = 1e-10);
        assert!(orientation_gap(end.phi(), 0.1) < 1e-10);
    }

    #[test]
    fn closed_rotation_examples() {
        let s = st(0.7, 1.0);
        assert_eq!(closed_rotation_evolution(&s, 0.0), s);
        assert_abs_diff_eq!(closed_rotation_evolution(&s, PI).phi(), 1.0, epsilon = 1e-15);
        let s = closed_rotation_evolution(&st(1.0, 0.0), FRAC_PI_4);
        assert_abs_diff_eq!(s.phi(), FRAC_PI_4, epsilon = 1e-15);
    }
}
