//! Gate-assisted tracking of a geodesic.
//!
//! The light state evolves under the GKLS system from the reference state.
//! Whenever its distance `r|sin(φ − φ_geo(r))|` from the geodesic point at the
//! same radius exceeds the accuracy `ε`, an ideal polariser at `γ = φ_geo(r)`
//! snaps the orientation back onto the geodesic. The run stops once the radius
//! reaches the target radius.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gkls::{rk4_step, GklsParams, LogPolar, Sample, DEFAULT_DT};
use crate::metric::{equal_r_distance, geodesic_between, geodesic_phi_at_r, trace_distance, GeodesicSegment};
use crate::polariser::ideal_gate_apply;
use crate::state::{wrap_orientation, DensityState};

pub const DEFAULT_MAX_STEPS: u64 = 100_000_000;

/// Bisection rounds used to place an event inside a step.
const BISECTION_ROUNDS: usize = 60;

/// The four reference/target pairs used throughout the examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TableExample {
    A,
    B,
    C,
    D,
}

impl TableExample {
    pub const ALL: [TableExample; 4] = [TableExample::A, TableExample::B, TableExample::C, TableExample::D];

    /// `((r_R, φ_R), (r_T, φ_T))`.
    pub fn endpoints(self) -> ((f64, f64), (f64, f64)) {
        match self {
            TableExample::A => ((1.0, 0.0), (0.5, PI / 6.0)),
            TableExample::B => ((1.0, PI / 3.0), (0.5, PI / 2.0)),
            TableExample::C => ((1.0, PI / 4.0), (0.5, PI / 12.0)),
            TableExample::D => ((1.0, 11.0 * PI / 12.0), (0.5, 3.0 * PI / 4.0)),
        }
    }

    pub fn states(self) -> (DensityState, DensityState) {
        let ((rr, pr), (rt, pt)) = self.endpoints();
        (
            DensityState::new(rr, pr).expect("preset reference"),
            DensityState::new(rt, pt).expect("preset target"),
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            TableExample::A => "a",
            TableExample::B => "b",
            TableExample::C => "c",
            TableExample::D => "d",
        }
    }
}

impl std::str::FromStr for TableExample {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(TableExample::A),
            "b" => Ok(TableExample::B),
            "c" => Ok(TableExample::C),
            "d" => Ok(TableExample::D),
            other => Err(Error::Config(format!("unknown example '{other}' (expected a, b, c or d)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CircuitConfig {
    pub reference: DensityState,
    pub target: DensityState,
    pub params: GklsParams,
    pub epsilon: f64,
    pub dt: f64,
    pub max_steps: u64,
}

impl CircuitConfig {
    /// Isotropic environment `α = 0, β = 2, E = −2` at the default step.
    pub fn new(reference: DensityState, target: DensityState, epsilon: f64) -> Result<Self> {
        let cfg = CircuitConfig {
            reference,
            target,
            params: default_params(),
            epsilon,
            dt: DEFAULT_DT,
            max_steps: DEFAULT_MAX_STEPS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn example(ex: TableExample, epsilon: f64) -> Result<Self> {
        let (r, t) = ex.states();
        CircuitConfig::new(r, t, epsilon)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        CircuitConfig {
            epsilon,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<GeodesicSegment> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon = {} must be positive", self.epsilon)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt = {} must be positive", self.dt)));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        if !(self.target.r() < self.reference.r()) {
            return Err(Error::Config(format!(
                "target radius {} must be below the reference radius {}",
                self.target.r(),
                self.reference.r()
            )));
        }
        self.params.check_at(0.0)?;
        geodesic_between(&self.reference, &self.target)
    }
}

pub fn default_params() -> GklsParams {
    GklsParams::constant(0.0, 2.0, -2.0).expect("isotropic parameters are valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateEvent {
    pub t: f64,
    pub r: f64,
    pub phi_before: f64,
    pub gamma: f64,
    pub r_after: f64,
    /// Distance from the geodesic right after the gate. The gate lowers `r`,
    /// so the geodesic point is re-evaluated at the new radius.
    pub deviation_after: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CircuitResult {
    pub gate_count: u64,
    pub gate_events: Vec<GateEvent>,
    /// Accepted states; a gated state replaces the pre-gate one at that time.
    pub trajectory: Vec<Sample>,
    pub final_state: DensityState,
    pub final_target_distance: f64,
    pub geodesic: GeodesicSegment,
}

/// `r|sin(φ − φ_geo(r))|`.
pub fn deviation(state: &DensityState, g: &GeodesicSegment) -> Result<f64> {
    let phi_geo = geodesic_phi_at_r(g, state.r())?;
    Ok(equal_r_distance(state.r(), state.phi(), phi_geo))
}

struct Tracker<'a> {
    cfg: &'a CircuitConfig,
    geo: GeodesicSegment,
    r_lo: f64,
    r_hi: f64,
}

impl Tracker<'_> {
    fn phi_geo(&self, r: f64) -> Result<f64> {
        geodesic_phi_at_r(&self.geo, r.clamp(self.r_lo, self.r_hi))
    }

    fn deviation(&self, y: &LogPolar) -> Result<f64> {
        let r = y.r();
        Ok(equal_r_distance(r, y.phi, self.phi_geo(r)?))
    }

    fn step(&self, y: LogPolar, t: f64, h: f64) -> Result<LogPolar> {
        rk4_step(&self.cfg.params, y, t, h)
    }

    /// Smallest step length in `(0, h]` (to bisection resolution) at which
    /// `exceeded` holds, given that it holds at `h`.
    fn bisect(&self, y: LogPolar, t: f64, h: f64, exceeded: impl Fn(&LogPolar) -> Result<bool>) -> Result<f64> {
        let (mut lo, mut hi) = (0.0, h);
        for _ in 0..BISECTION_ROUNDS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if exceeded(&self.step(y, t, mid)?)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

pub fn run_circuit(cfg: &CircuitConfig) -> Result<CircuitResult> {
    let geo = cfg.validate()?;
    let (r_lo, r_hi) = geo.r_range();
    let tracker = Tracker { cfg, geo, r_lo, r_hi };
    let log_target = cfg.target.r().ln();

    let mut y = LogPolar::from_state(&cfg.reference);
    let mut t = 0.0;
    let mut trajectory = vec![Sample { t, state: cfg.reference }];
    let mut events = Vec::new();
    let mut steps = 0u64;

    loop {
        steps += 1;
        if steps > cfg.max_steps {
            return Err(Error::NonTermination(cfg.max_steps));
        }

        let mut h = cfg.dt;
        let mut next = tracker.step(y, t, h)?;
        let mut last = false;
        if next.log_r <= log_target {
            h = tracker.bisect(y, t, h, |s| Ok(s.log_r <= log_target))?;
            next = tracker.step(y, t, h)?;
            last = true;
        }

        if tracker.deviation(&next)? > cfg.epsilon {
            let eps = cfg.epsilon;
            let hit = tracker.bisect(y, t, h, |s| Ok(tracker.deviation(s)? > eps))?;
            let pre = tracker.step(y, t, hit)?;
            t += hit;

            let before = pre.to_state();
            let gamma = tracker.phi_geo(before.r())?;
            let after = ideal_gate_apply(&before, gamma);
            let deviation_after = if after.r() > 0.0 {
                equal_r_distance(after.r(), after.phi(), tracker.phi_geo(after.r())?)
            } else {
                0.0
            };
            events.push(GateEvent {
                t,
                r: before.r(),
                phi_before: before.phi(),
                gamma: after.phi(),
                r_after: after.r(),
                deviation_after,
            });
            trajectory.push(Sample { t, state: after });

            if after.r() <= cfg.target.r() || after.r() == 0.0 {
                break;
            }
            y = LogPolar {
                phi: pre.phi + wrap_orientation(after.phi() - pre.phi),
                log_r: after.r().ln(),
            };
            continue;
        }

        y = next;
        t += h;
        trajectory.push(Sample { t, state: y.to_state() });
        if last {
            break;
        }
    }

    let final_state = trajectory.last().expect("initial sample").state;
    Ok(CircuitResult {
        gate_count: events.len() as u64,
        gate_events: events,
        trajectory,
        final_state,
        final_target_distance: trace_distance(&final_state, &cfg.target),
        geodesic: geo,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub gate_count: u64,
}

/// `log₁₀N_g = m + n·log₁₀ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub m: f64,
    pub n: f64,
    /// Rows with `N_g ≥ 1` that entered the fit.
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// Sorted by ε descending.
    pub rows: Vec<SweepRow>,
    pub fit: Option<PowerLawFit>,
}

pub fn sweep_accuracy(base: &CircuitConfig, epsilons: &[f64]) -> Result<SweepResult> {
    if epsilons.is_empty() {
        return Err(Error::Config("empty epsilon list".into()));
    }
    let mut sorted = epsilons.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Config(format!("duplicate epsilon {}", w[0])));
    }
    let rows = sorted
        .par_iter()
        .map(|&eps| {
            run_circuit(&base.with_epsilon(eps)).map(|res| SweepRow {
                epsilon: eps,
                gate_count: res.gate_count,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = loglog_fit(&rows).ok();
    Ok(SweepResult { rows, fit })
}

/// Ordinary least squares on `(log₁₀ε, log₁₀N_g)` over the rows with
/// `N_g ≥ 1`.
pub fn loglog_fit(rows: &[SweepRow]) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.gate_count > 0)
        .map(|r| (r.epsilon.log10(), (r.gate_count as f64).log10()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Fit(format!("{} usable rows, need at least 2", pts.len())));
    }
    if pts.iter().any(|(x, _)| !x.is_finite()) {
        return Err(Error::Fit("epsilon must be positive and finite".into()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all epsilon values coincide".into()));
    }
    let n = sxy / sxx;
    Ok(PowerLawFit {
        m: my - n * mx,
        n,
        points: pts.len(),
    })
}

/// `count` log-spaced values from `lo` to `hi`, endpoints exact.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::Config(format!("log grid needs 0 < lo < hi (got {lo}, {hi})")));
    }
    grid(lo.log10(), hi.log10(), count).map(|g| {
        let mut g: Vec<f64> = g.into_iter().map(|x| 10f64.powf(x)).collect();
        g[0] = lo;
        *g.last_mut().expect("non-empty") = hi;
        g
    })
}

/// `count` evenly spaced values from `lo` to `hi`, endpoints exact.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Config(format!("grid needs 0 < lo < hi (got {lo}, {hi})")));
    }
    grid(lo, hi, count)
}

fn grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    match count {
        0 => Err(Error::Config("grid needs at least one point".into())),
        1 => Ok(vec![lo]),
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            let mut g: Vec<f64> = (0..count).map(|k| lo + k as f64 * step).collect();
            g[count - 1] = hi;
            Ok(g)
        }
    }
}

/// 24 log-spaced accuracies in `[5e-4, 5e-2]`.
pub fn default_epsilon_grid() -> Vec<f64> {
    log_grid(5e-4, 5e-2, 24).expect("default grid is valid")
}
