//! Trace distance on the half disk and the straight-line geodesics
//! `r = 1/(C₃cosφ + C₄sinφ)` between a reference and a target state.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{reduce_angle, DensityState};

/// Residual allowed on `r·(C₃cosφ + C₄sinφ) − 1` at the endpoints.
pub const ENDPOINT_TOL: f64 = 1e-10;

/// Slack on the radial range accepted by [`geodesic_phi_at_r`].
pub const RANGE_SLACK: f64 = 1e-12;

/// `½√(r² + r′² − 2rr′cos(2φ − 2φ′))`, evaluated as
/// `½√((r − r′)² + 4rr′sin²(φ − φ′))` to avoid cancellation between close
/// states.
pub fn trace_distance(s1: &DensityState, s2: &DensityState) -> f64 {
    let (r1, r2) = (s1.r(), s2.r());
    let s = (s1.phi() - s2.phi()).sin();
    0.5 * ((r1 - r2).powi(2) + 4.0 * r1 * r2 * s * s).sqrt()
}

/// `½ Σ|λᵢ|` over the eigenvalues of `ρ₁ − ρ₂`.
pub fn trace_distance_eigen(s1: &DensityState, s2: &DensityState) -> f64 {
    let (hi, lo, _) = (s1.to_matrix() - s2.to_matrix()).symmetric_eigen();
    0.5 * (hi.abs() + lo.abs())
}

/// `½√((ξ₁ − ξ₁′)² + (ξ₃ − ξ₃′)²)`.
pub fn trace_distance_stokes(s1: &DensityState, s2: &DensityState) -> f64 {
    let (a, b) = (s1.to_stokes(), s2.to_stokes());
    0.5 * (a.xi1 - b.xi1).hypot(a.xi3 - b.xi3)
}

/// Trace distance between two states of equal radius: `r|sin(φ₁ − φ₂)|`.
pub fn equal_r_distance(r: f64, phi1: f64, phi2: f64) -> f64 {
    r * (phi1 - phi2).sin().abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SegmentKind {
    /// `r(C₃cosφ + C₄sinφ) = 1`.
    Line { c3: f64, c4: f64 },
    /// Both endpoints on the same ray through the origin.
    Radial { phi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicSegment {
    pub kind: SegmentKind,
    pub ref_state: DensityState,
    pub target_state: DensityState,
}

impl GeodesicSegment {
    pub fn is_radial(&self) -> bool {
        matches!(self.kind, SegmentKind::Radial { .. })
    }

    pub fn coefficients(&self) -> Option<(f64, f64)> {
        match self.kind {
            SegmentKind::Line { c3, c4 } => Some((c3, c4)),
            SegmentKind::Radial { .. } => None,
        }
    }

    /// `r(C₃cosφ + C₄sinφ) − 1`, or the angular offset from the ray for a
    /// radial segment.
    pub fn residual(&self, r: f64, phi: f64) -> f64 {
        match self.kind {
            SegmentKind::Line { c3, c4 } => r * (c3 * phi.cos() + c4 * phi.sin()) - 1.0,
            SegmentKind::Radial { phi: ray } => (phi - ray).sin(),
        }
    }

    /// Radial range `(r_min, r_max)` covered by the segment.
    pub fn r_range(&self) -> (f64, f64) {
        let (a, b) = (self.ref_state.r(), self.target_state.r());
        (a.min(b), a.max(b))
    }

    /// Point `P_R + s(P_T − P_R)` on the chord, `s ∈ [0, 1]`.
    pub fn point_at(&self, s: f64) -> (f64, f64) {
        let (p, d) = self.chord();
        (p.0 + s * d.0, p.1 + s * d.1)
    }

    fn chord(&self) -> ((f64, f64), (f64, f64)) {
        let p = self.ref_state.cartesian();
        let q = self.target_state.cartesian();
        (p, (q.0 - p.0, q.1 - p.1))
    }
}

pub fn geodesic_between(reference: &DensityState, target: &DensityState) -> Result<GeodesicSegment> {
    let (r_r, r_t) = (reference.r(), target.r());
    if r_r <= 0.0 || r_t <= 0.0 {
        return Err(Error::Geodesic(format!(
            "endpoints need positive radius (got {r_r} and {r_t})"
        )));
    }
    let (phi_r, phi_t) = (reference.phi(), target.phi());
    let sin_d = (phi_t - phi_r).sin();

    let kind = if sin_d == 0.0 {
        SegmentKind::Radial { phi: phi_r }
    } else {
        let den = r_t * r_r * sin_d;
        SegmentKind::Line {
            c3: (r_t * phi_t.sin() - r_r * phi_r.sin()) / den,
            c4: (-r_t * phi_t.cos() + r_r * phi_r.cos()) / den,
        }
    };
    let seg = GeodesicSegment {
        kind,
        ref_state: *reference,
        target_state: *target,
    };

    if !seg.is_radial() {
        for (r, phi) in [(r_r, phi_r), (r_t, phi_t)] {
            let res = seg.residual(r, phi);
            if res.abs() >= ENDPOINT_TOL {
                return Err(Error::Geodesic(format!(
                    "endpoint ({r}, {phi}) misses the line by {res:e}"
                )));
            }
        }
    }

    // d|P(s)|²/ds = 2 P(s)·D is linear in s, so a common sign at both ends
    // means r is strictly monotone along the chord.
    let (p, d) = seg.chord();
    let q = target.cartesian();
    let start = p.0 * d.0 + p.1 * d.1;
    let end = q.0 * d.0 + q.1 * d.1;
    if !(start * end > 0.0) {
        return Err(Error::Geodesic(format!(
            "radius is not monotone along the segment (endpoint slopes {start:e}, {end:e})"
        )));
    }
    Ok(seg)
}

/// Orientation of the segment point at radius `r`.
pub fn geodesic_phi_at_r(g: &GeodesicSegment, r: f64) -> Result<f64> {
    let (lo, hi) = g.r_range();
    if !(r >= lo - RANGE_SLACK && r <= hi + RANGE_SLACK) {
        return Err(Error::OutOfRange { r, lo, hi });
    }
    if let SegmentKind::Radial { phi } = g.kind {
        return Ok(phi);
    }
    let (p, d) = g.chord();
    let a = d.0 * d.0 + d.1 * d.1;
    let b = 2.0 * (p.0 * d.0 + p.1 * d.1);
    let c = p.0 * p.0 + p.1 * p.1 - r * r;
    let disc = b * b - 4.0 * a * c;
    let scale = b * b + (4.0 * a * c).abs();
    if disc < -1e-12 * scale {
        return Err(Error::Geodesic(format!("no chord point at radius {r}")));
    }
    let sq = disc.max(0.0).sqrt();
    // stable pair of roots
    let qv = -0.5 * (b + b.signum() * sq);
    let mut roots = [qv / a, if qv != 0.0 { c / qv } else { qv / a }];
    roots.sort_by(f64::total_cmp);
    let s_slack = 1e-9;
    let s = roots
        .into_iter()
        .find(|s| (-s_slack..=1.0 + s_slack).contains(s))
        .ok_or_else(|| Error::Geodesic(format!("chord roots {roots:?} outside the segment")))?;
    let (x, y) = g.point_at(s.clamp(0.0, 1.0));
    Ok(reduce_angle(y.atan2(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

    const FRAC_PI_12: f64 = PI / 12.0;

    fn st(r: f64, phi: f64) -> DensityState {
        DensityState::new(r, phi).unwrap()
    }

    fn table() -> [(DensityState, DensityState); 4] {
        [
            (st(1.0, 0.0), st(0.5, FRAC_PI_6)),
            (st(1.0, FRAC_PI_3), st(0.5, FRAC_PI_2)),
            (st(1.0, FRAC_PI_4), st(0.5, FRAC_PI_12)),
            (st(1.0, 11.0 * FRAC_PI_12), st(0.5, 3.0 * FRAC_PI_4)),
        ]
    }

    #[test]
    fn distance_examples() {
        let s = st(0.4, 1.1);
        assert_eq!(trace_distance(&s, &s), 0.0);
        assert_abs_diff_eq!(trace_distance(&st(1.0, 0.0), &st(1.0, FRAC_PI_2)), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(equal_r_distance(1.0, 0.3, 0.3 + FRAC_PI_2), 1.0, epsilon = 1e-15);
        assert_eq!(equal_r_distance(0.7, 0.9, 0.9), 0.0);
        let d = equal_r_distance(0.8, 1.0, 1.1);
        assert_abs_diff_eq!(d, 0.8 * 0.1_f64.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(d, trace_distance(&st(0.8, 1.0), &st(0.8, 1.1)), epsilon = 1e-14);
    }

    #[test]
    fn three_forms_agree() {
        let pairs = [
            (st(0.3, 0.1), st(0.9, 2.9)),
            (st(1.0, 0.0), st(0.0, 0.0)),
            (st(0.5, 1.0), st(0.5, 1.0 + PI / 2.0)),
        ];
        for (a, b) in pairs {
            let d = trace_distance(&a, &b);
            assert_abs_diff_eq!(d, trace_distance_eigen(&a, &b), epsilon = 1e-14);
            assert_abs_diff_eq!(d, trace_distance_stokes(&a, &b), epsilon = 1e-14);
        }
    }

    #[test]
    fn example_a_coefficients() {
        let g = geodesic_between(&st(1.0, 0.0), &st(0.5, FRAC_PI_6)).unwrap();
        let (c3, c4) = g.coefficients().unwrap();
        assert_abs_diff_eq!(c3, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c4, (1.0 - 0.5 * FRAC_PI_6.cos()) / 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(c4, 2.26795, epsilon = 1e-5);
    }

    #[test]
    fn table_configurations_are_valid_segments() {
        for (r, t) in table() {
            let g = geodesic_between(&r, &t).unwrap();
            assert!(g.residual(r.r(), r.phi()).abs() < ENDPOINT_TOL);
            assert!(g.residual(t.r(), t.phi()).abs() < ENDPOINT_TOL);
            assert_abs_diff_eq!(geodesic_phi_at_r(&g, r.r()).unwrap(), r.phi(), epsilon = 1e-12);
            assert_abs_diff_eq!(geodesic_phi_at_r(&g, t.r()).unwrap(), t.phi(), epsilon = 1e-12);
        }
    }

    #[test]
    fn radial_segment() {
        let g = geodesic_between(&st(1.0, 0.7), &st(0.5, 0.7)).unwrap();
        assert!(g.is_radial());
        assert_eq!(geodesic_phi_at_r(&g, 0.8).unwrap(), 0.7);
    }

    #[test]
    fn rejects_bad_segments() {
        assert!(geodesic_between(&st(1.0, 0.0), &DensityState::mixed()).is_err());
        // chord passes closest to the origin between the endpoints
        assert!(geodesic_between(&st(1.0, 0.2), &st(1.0, 2.0)).is_err());
        let g = geodesic_between(&st(1.0, 0.0), &st(0.5, FRAC_PI_6)).unwrap();
        assert!(matches!(geodesic_phi_at_r(&g, 0.4), Err(Error::OutOfRange { .. })));
        assert!(geodesic_phi_at_r(&g, 1.0 + 1e-13).is_ok());
    }

    #[test]
    fn phi_at_r_lies_on_line() {
        let g = geodesic_between(&st(1.0, 0.0), &st(0.5, FRAC_PI_6)).unwrap();
        let phi = geodesic_phi_at_r(&g, 0.75).unwrap();
        assert!(g.residual(0.75, phi).abs() < 1e-10);
        assert!(phi > 0.0 && phi < FRAC_PI_6);
    }

    #[test]
    fn line_satisfies_polar_euler_lagrange() {
        // r'' − rφ'² = 0 and (r²φ')' = 0 along an arc-length parametrised line
        let g = geodesic_between(&st(1.0, FRAC_PI_4), &st(0.5, FRAC_PI_12)).unwrap();
        let (p, d) = g.chord();
        let len = d.0.hypot(d.1);
        let polar = |s: f64| {
            let u = s / len;
            let (x, y) = (p.0 + u * d.0, p.1 + u * d.1);
            (x.hypot(y), y.atan2(x))
        };
        let h = 1e-3;
        let mut worst = 0.0_f64;
        let mut momentum = Vec::new();
        for k in 1..10 {
            let s = len * k as f64 / 10.0;
            // fourth-order central stencils
            let f: Vec<(f64, f64)> = (-2..=2).map(|j| polar(s + j as f64 * h)).collect();
            let r0 = f[2].0;
            let r2 = (-f[4].0 + 16.0 * f[3].0 - 30.0 * r0 + 16.0 * f[1].0 - f[0].0) / (12.0 * h * h);
            let dphi = (-f[4].1 + 8.0 * f[3].1 - 8.0 * f[1].1 + f[0].1) / (12.0 * h);
            worst = worst.max((r2 - r0 * dphi * dphi).abs());
            momentum.push(r0 * r0 * dphi);
        }
        for l in &momentum {
            worst = worst.max((l - momentum[0]).abs());
        }
        assert!(worst < 1e-8, "Euler-Lagrange residual {worst:e}");
    }
}
