use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::json;

use polcirc::circuit::{default_epsilon_grid, run_circuit, sweep_accuracy, CircuitConfig, TableExample};
use polcirc::gkls::{integrate, ConstantPhiDrive, GklsParams, Sample, DEFAULT_DT};
use polcirc::polariser::{diattenuation, PolariserGate};
use polcirc::state::DensityState;
use polcirc::verify::{run_all, Tolerances, DEFAULT_SEED};

use crate::config::{parse_grid, usage, FileConfig};
use crate::svg::{half_disk, loglog, Series};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Options shared by every subcommand; flags win over the config file.
#[derive(Debug, Clone, Default)]
pub struct Globals {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub dt: Option<f64>,
    pub epsilon: Option<f64>,
    pub eps_grid: Option<String>,
    pub example: Option<String>,
    pub seed: Option<u64>,
}

impl Globals {
    fn file_config(&self) -> anyhow::Result<FileConfig> {
        match &self.config {
            Some(p) => FileConfig::load(p),
            None => Ok(FileConfig::default()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct EvolveArgs {
    pub t_end: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub energy: Option<f64>,
}

fn prepare_out(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn write_trajectory_csv(path: &Path, provenance: &str, samples: &[Sample]) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "# {provenance}")?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["t", "r", "phi", "xi1", "xi3"])?;
    for s in samples {
        let st = s.state.to_stokes();
        csv.write_record(&[
            s.t.to_string(),
            s.state.r().to_string(),
            s.state.phi().to_string(),
            st.xi1.to_string(),
            st.xi3.to_string(),
        ])?;
    }
    csv.flush().with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cartesian(samples: &[Sample]) -> Vec<(f64, f64)> {
    samples.iter().map(|s| s.state.cartesian()).collect()
}

fn state_from(r: f64, phi: f64, what: &str) -> anyhow::Result<DensityState> {
    DensityState::new(r, phi).with_context(|| format!("invalid {what}"))
}

pub fn evolve(g: &Globals, args: &EvolveArgs) -> anyhow::Result<()> {
    let cfg = g.file_config()?;
    let start = match cfg.state {
        Some(s) => state_from(s.r, s.phi.0, "initial state")?,
        None => state_from(1.0, PI / 2.0, "initial state")?,
    };
    let alpha = args.alpha.or(cfg.gkls.alpha).unwrap_or(-9.0);
    let beta = args.beta.or(cfg.gkls.beta).unwrap_or(20.0);
    let hold = cfg.gkls.hold_orientation.unwrap_or(false);
    if hold && (args.energy.is_some() || cfg.gkls.energy.is_some()) {
        return Err(usage("hold_orientation fixes the energy; do not also set it"));
    }
    let t_end = args.t_end.or(cfg.evolve.t_end).unwrap_or(1.0);
    let dt = g.dt.or(cfg.evolve.dt).unwrap_or(DEFAULT_DT);

    let base = GklsParams::constant(alpha, beta, 0.0)?;
    let params = if hold {
        ConstantPhiDrive::new(start, 0.0, &base)?.params
    } else {
        GklsParams::constant(alpha, beta, args.energy.or(cfg.gkls.energy).unwrap_or(10.0))?
    };
    let energy = params.energy.at(0.0);
    let traj = integrate(&start, &params, 0.0, t_end, dt)?;

    let provenance = format!(
        "polcirc {VERSION} evolve r0={} phi0={} alpha={alpha} beta={beta} energy={energy} hold_orientation={hold} t_end={t_end} dt={dt}",
        start.r(),
        start.phi()
    );
    prepare_out(&g.out)?;
    write_trajectory_csv(&g.out.join("evolve.csv"), &provenance, &traj.samples)?;
    let pts = cartesian(&traj.samples);
    let title = format!("trajectory: alpha={alpha}, beta={beta}, E={energy}");
    let svg = half_disk(
        &title,
        &provenance,
        &[Series { points: &pts, color: "#1f77b4", width: 1.2, dashed: false }],
        &[],
    );
    write_text(&g.out.join("evolve.svg"), &svg)?;
    let last = traj.last();
    println!("final state at t = {}: r = {}, phi = {}", last.t, last.state.r(), last.state.phi());
    Ok(())
}

pub fn gate(g: &Globals) -> anyhow::Result<()> {
    let cfg = g.file_config()?;
    let light = match cfg.state {
        Some(s) => state_from(s.r, s.phi.0, "light state")?,
        None => state_from(1.0, 0.0, "light state")?,
    };
    let gamma = cfg.gate.gamma.map(|a| a.0).unwrap_or(PI / 6.0);
    let lambda_par = cfg.gate.lambda_par.unwrap_or(PI / 2.0);
    let lambda_perp = cfg.gate.lambda_perp.unwrap_or(0.0);
    let ancilla = match cfg.gate.ancilla {
        Some(a) => state_from(a.r, a.phi.0, "ancilla state")?,
        None => state_from(1.0, 0.0, "ancilla state")?,
    };
    let gate = PolariserGate::new(gamma, lambda_par, lambda_perp, ancilla)?;
    let outcome = gate.interact(&light);
    let joint = gate.joint_evolve(&light);
    let report = json!({
        "provenance": format!(
            "polcirc {VERSION} gate r={} phi={} gamma={} lambda_par={lambda_par} lambda_perp={lambda_perp} ancilla_r={} ancilla_phi={}",
            light.r(), light.phi(), gate.gamma(), ancilla.r(), ancilla.phi()
        ),
        "light_before": light,
        "gate": gate,
        "outcome": outcome,
        "joint_light_marginal": joint.light_marginal(),
        "joint_polariser_marginal": joint.polariser_marginal(),
        "diattenuation": diattenuation(outcome.light_after.r())?,
    });
    prepare_out(&g.out)?;
    write_json(&g.out.join("gate.json"), &report)?;
    println!(
        "light after: r = {}, phi = {}; p_parallel = {}",
        outcome.light_after.r(),
        outcome.light_after.phi(),
        outcome.p_parallel
    );
    Ok(())
}

struct CircuitSetup {
    cfg: CircuitConfig,
    label: String,
}

fn circuit_setup(g: &Globals, file: &FileConfig, epsilon_default: f64) -> anyhow::Result<CircuitSetup> {
    let c = &file.circuit;
    let example = g.example.clone().or_else(|| c.example.clone());
    let (reference, target, label) = match (example, c.reference, c.target) {
        (Some(ex), _, _) => {
            let ex: TableExample = ex.parse().map_err(|e: polcirc::Error| usage(e.to_string()))?;
            let (r, t) = ex.states();
            (r, t, format!("example {}", ex.label()))
        }
        (None, Some(r), Some(t)) => (
            state_from(r.r, r.phi.0, "reference state")?,
            state_from(t.r, t.phi.0, "target state")?,
            "custom".to_string(),
        ),
        (None, None, None) => {
            let (r, t) = TableExample::A.states();
            (r, t, "example a".to_string())
        }
        _ => return Err(usage("give both [circuit.reference] and [circuit.target], or an example")),
    };
    let mut cfg = CircuitConfig {
        reference,
        target,
        params: polcirc::circuit::default_params(),
        epsilon: g.epsilon.or(c.epsilon).unwrap_or(epsilon_default),
        dt: g.dt.or(c.dt).unwrap_or(DEFAULT_DT),
        max_steps: c.max_steps.unwrap_or(polcirc::circuit::DEFAULT_MAX_STEPS),
    };
    if let (Some(a), Some(b), Some(e)) = (file.gkls.alpha, file.gkls.beta, file.gkls.energy) {
        cfg.params = GklsParams::constant(a, b, e)?;
    } else if file.gkls.alpha.is_some() || file.gkls.beta.is_some() || file.gkls.energy.is_some() {
        return Err(usage("[gkls] for a circuit needs alpha, beta and energy together"));
    }
    Ok(CircuitSetup { cfg, label })
}

fn circuit_provenance(cmd: &str, s: &CircuitSetup) -> String {
    let c = &s.cfg;
    let (a, b, e) = c.params.constants().expect("circuit parameters are constant");
    format!(
        "polcirc {VERSION} {cmd} {} ref=({}, {}) target=({}, {}) alpha={a} beta={b} energy={e} dt={} max_steps={}",
        s.label.replace(' ', "_"),
        c.reference.r(),
        c.reference.phi(),
        c.target.r(),
        c.target.phi(),
        c.dt,
        c.max_steps
    )
}

pub fn circuit(g: &Globals) -> anyhow::Result<()> {
    let file = g.file_config()?;
    let setup = circuit_setup(g, &file, 0.05)?;
    let result = run_circuit(&setup.cfg)?;
    let provenance = format!("{} epsilon={}", circuit_provenance("circuit", &setup), setup.cfg.epsilon);

    prepare_out(&g.out)?;
    write_trajectory_csv(&g.out.join("circuit.csv"), &provenance, &result.trajectory)?;
    write_json(
        &g.out.join("circuit.json"),
        &json!({
            "provenance": provenance,
            "epsilon": setup.cfg.epsilon,
            "gate_count": result.gate_count,
            "gate_events": result.gate_events,
            "final_state": result.final_state,
            "final_target_distance": result.final_target_distance,
            "geodesic": result.geodesic,
        }),
    )?;

    let path = cartesian(&result.trajectory);
    let geo: Vec<(f64, f64)> = (0..=100).map(|k| result.geodesic.point_at(k as f64 / 100.0)).collect();
    let markers: Vec<(f64, f64)> = result
        .gate_events
        .iter()
        .map(|e| DensityState::new(e.r_after, e.gamma).map(|s| s.cartesian()))
        .collect::<Result<_, _>>()?;
    let title = format!("{}: {} gates at accuracy {}", setup.label, result.gate_count, setup.cfg.epsilon);
    let svg = half_disk(
        &title,
        &provenance,
        &[
            Series { points: &geo, color: "#2ca02c", width: 1.5, dashed: true },
            Series { points: &path, color: "#1f77b4", width: 1.2, dashed: false },
        ],
        &markers,
    );
    write_text(&g.out.join("circuit.svg"), &svg)?;
    println!(
        "{}: epsilon = {}, gates = {}, final distance to target = {}",
        setup.label, setup.cfg.epsilon, result.gate_count, result.final_target_distance
    );
    Ok(())
}

fn epsilon_list(g: &Globals, file: &FileConfig) -> anyhow::Result<Vec<f64>> {
    if let Some(spec) = &g.eps_grid {
        return parse_grid(spec);
    }
    if let Some(spec) = &file.sweep.eps_grid {
        return parse_grid(spec);
    }
    match &file.sweep.epsilons {
        Some(v) if v.is_empty() => Err(usage("epsilon list is empty")),
        Some(v) => Ok(v.clone()),
        None => Ok(default_epsilon_grid()),
    }
}

pub fn sweep(g: &Globals) -> anyhow::Result<()> {
    let file = g.file_config()?;
    let eps = epsilon_list(g, &file)?;
    let setup = circuit_setup(g, &file, eps[0])?;
    let result = sweep_accuracy(&setup.cfg, &eps)?;
    let provenance = format!(
        "{} grid=[{}]",
        circuit_provenance("sweep", &setup),
        eps.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
    );

    prepare_out(&g.out)?;
    let path = g.out.join("sweep.csv");
    let file_out = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file_out);
    writeln!(w, "# {provenance}")?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["epsilon", "gate_count"])?;
    for row in &result.rows {
        csv.write_record(&[row.epsilon.to_string(), row.gate_count.to_string()])?;
    }
    csv.flush().with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());

    write_json(
        &g.out.join("sweep.json"),
        &json!({ "provenance": provenance, "rows": result.rows, "fit": result.fit }),
    )?;
    let pts: Vec<(f64, f64)> = result.rows.iter().map(|r| (r.epsilon, r.gate_count as f64)).collect();
    let svg = loglog(
        &format!("{}: gate count against accuracy", setup.label),
        &provenance,
        &pts,
        result.fit.map(|f| (f.m, f.n)),
    );
    write_text(&g.out.join("sweep.svg"), &svg)?;
    match result.fit {
        Some(f) => println!("{}: fit m = {}, n = {} over {} points", setup.label, f.m, f.n, f.points),
        None => println!("{}: fit undefined (fewer than two rows with gates)", setup.label),
    }
    Ok(())
}

pub fn verify(g: &Globals, tolerance: Option<f64>) -> anyhow::Result<()> {
    let file = g.file_config()?;
    let seed = g.seed.or(file.verify.seed).unwrap_or(DEFAULT_SEED);
    let tol = match tolerance.or(file.verify.tolerance) {
        Some(v) => Tolerances::uniform(v),
        None => Tolerances::default(),
    };
    let report = run_all(seed, &tol);
    let text = report.render();
    print!("{text}");
    prepare_out(&g.out)?;
    fs::write(g.out.join("verify.txt"), &text)
        .with_context(|| format!("cannot write {}", g.out.join("verify.txt").display()))?;
    if !report.passed() {
        anyhow::bail!("verification failed");
    }
    Ok(())
}
