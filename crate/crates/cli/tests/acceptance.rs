//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use polcirc::circuit::{default_epsilon_grid, run_circuit, sweep_accuracy, CircuitConfig, SweepResult, TableExample};
use polcirc::verify::{
    analytic_suite, depolarisation_suite, interaction_suite, metric_suite, scaling_suite, Check, Tolerances,
    ANALYTIC_DRAWS, DEFAULT_SEED, INTERACTION_DRAWS, METRIC_PAIRS,
};

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_checks(checks: &[Check]) -> Outcome {
    let detail = checks
        .iter()
        .map(|c| {
            format!(
                "{} {}: {:.3e} < {:.1e}",
                if c.passed { "ok" } else { "FAILED" },
                c.name,
                c.residual,
                c.tolerance
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome {
        passed: checks.iter().all(|c| c.passed),
        detail,
    }
}

fn sweep(ex: TableExample) -> SweepResult {
    let cfg = CircuitConfig::example(ex, 0.05).expect("preset config");
    sweep_accuracy(&cfg, &default_epsilon_grid()).expect("sweep runs")
}

fn power_law() -> Outcome {
    let start = Instant::now();
    let targets = [(TableExample::A, -1.05, -1.09), (TableExample::C, -0.17, -1.04)];
    let mut passed = true;
    let mut detail = Vec::new();
    for (ex, m_ref, n_ref) in targets {
        let res = sweep(ex);
        match res.fit {
            Some(f) => {
                let ok = (f.n - n_ref).abs() <= 0.10 && (f.m - m_ref).abs() <= 0.20;
                passed &= ok;
                detail.push(format!("({}) m = {:.4} (ref {m_ref}), n = {:.4} (ref {n_ref})", ex.label(), f.m, f.n));
            }
            None => {
                passed = false;
                detail.push(format!("({}) fit undefined", ex.label()));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    passed &= secs < 60.0;
    detail.push(format!("{secs:.1} s"));
    Outcome { passed, detail: detail.join(", ") }
}

fn pair_degeneracy() -> Outcome {
    let mut passed = true;
    let mut detail = Vec::new();
    for (x, y) in [(TableExample::A, TableExample::B), (TableExample::C, TableExample::D)] {
        let (rx, ry) = (sweep(x), sweep(y));
        let same = rx.rows == ry.rows;
        passed &= same;
        let diffs = rx.rows.iter().zip(&ry.rows).filter(|(a, b)| a != b).count();
        detail.push(format!("({})/({}): {} rows, {diffs} differ", x.label(), y.label(), rx.rows.len()));
    }
    Outcome { passed, detail: detail.join(", ") }
}

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ stream)
}

fn monotone_depolarisation() -> Outcome {
    let tol = Tolerances::default();
    let mut worst_rise = 0.0_f64;
    let mut entropy_ok = true;
    let mut runs = 0;
    for ex in TableExample::ALL {
        for eps in default_epsilon_grid() {
            let res = run_circuit(&CircuitConfig::example(ex, eps).expect("preset")).expect("circuit runs");
            for w in res.trajectory.windows(2) {
                worst_rise = worst_rise.max(w[1].state.r() - w[0].state.r());
            }
            let first = res.trajectory.first().expect("initial sample").state;
            entropy_ok &= res.final_state.entropy() > first.entropy();
            runs += 1;
        }
    }
    let suite = depolarisation_suite(&mut rng(7), &tol);
    let suite_ok = suite.iter().all(|c| c.passed);
    Outcome {
        passed: worst_rise <= 0.0 && entropy_ok && suite_ok,
        detail: format!(
            "{runs} circuit runs, largest radial increase {worst_rise:.3e}, entropy grows: {entropy_ok}; {}",
            from_checks(&suite).detail
        ),
    }
}

fn run_bin(args: &[&str], out: &Path) -> (Option<i32>, Vec<u8>) {
    let output = Command::new(env!("CARGO_BIN_EXE_polcirc"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    (output.status.code(), output.stdout)
}

fn files(dir: &Path, names: &[&str]) -> Vec<Vec<u8>> {
    names.iter().map(|n| std::fs::read(dir.join(n)).unwrap_or_default()).collect()
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().expect("temp dir");
    let (d1, d2) = (tmp.path().join("one"), tmp.path().join("two"));
    let mut passed = true;
    let mut detail = Vec::new();

    let seed = DEFAULT_SEED.to_string();
    let (c1, o1) = run_bin(&["verify", "--seed", &seed], &d1);
    let (c2, o2) = run_bin(&["verify", "--seed", &seed], &d2);
    let same = c1 == Some(0) && c2 == Some(0) && o1 == o2 && files(&d1, &["verify.txt"]) == files(&d2, &["verify.txt"]);
    passed &= same;
    detail.push(format!("verify identical: {same}"));

    for ex in ["a", "b", "c", "d"] {
        let (s1, s2) = (d1.join(ex), d2.join(ex));
        let (c1, _) = run_bin(&["sweep", "--example", ex], &s1);
        let (c2, _) = run_bin(&["sweep", "--example", ex], &s2);
        let names = ["sweep.csv", "sweep.json", "sweep.svg"];
        let same = c1 == Some(0) && c2 == Some(0) && files(&s1, &names) == files(&s2, &names);
        passed &= same;
        detail.push(format!("sweep ({ex}) identical: {same}"));
    }
    Outcome { passed, detail: detail.join(", ") }
}

fn main() -> ExitCode {
    let tol = Tolerances::default();
    let criteria: Vec<Criterion> = vec![
        ("1 power-law reproduction", Box::new(power_law)),
        ("2 pair degeneracy", Box::new(pair_degeneracy)),
        ("3 analytic-oracle agreement", Box::new(move || from_checks(&analytic_suite(&mut rng(3), ANALYTIC_DRAWS, &tol)))),
        ("4 interaction consistency", Box::new(move || from_checks(&interaction_suite(&mut rng(4), INTERACTION_DRAWS, &tol)))),
        ("5 weak-coupling scaling", Box::new(move || from_checks(&scaling_suite(&mut rng(5), &tol)))),
        ("6 metric equivalence", Box::new(move || from_checks(&metric_suite(&mut rng(6), METRIC_PAIRS, &tol)))),
        ("7 monotone depolarisation", Box::new(monotone_depolarisation)),
        ("8 determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let out = run();
        println!("{} criterion {name}: {}", if out.passed { "PASS" } else { "FAIL" }, out.detail);
        if !out.passed {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
