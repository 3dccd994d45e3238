use polcirc::circuit::{default_epsilon_grid, loglog_fit, run_circuit, sweep_accuracy};
use polcirc::{CircuitConfig, TableExample};

fn counts(ex: TableExample, dt: f64) -> Vec<u64> {
    let mut cfg = CircuitConfig::example(ex, 0.05).unwrap();
    cfg.dt = dt;
    sweep_accuracy(&cfg, &default_epsilon_grid())
        .unwrap()
        .rows
        .iter()
        .map(|r| r.gate_count)
        .collect()
}

#[test]
fn gate_counts_fall_with_accuracy() {
    for ex in TableExample::ALL {
        let n = counts(ex, 1e-3);
        // rows are ordered by epsilon descending
        assert!(n.windows(2).all(|w| w[0] <= w[1]), "{ex:?}: {n:?}");
    }
}

#[test]
fn halving_the_step_moves_counts_by_at_most_one() {
    for ex in [TableExample::A, TableExample::C] {
        let coarse = counts(ex, 1e-3);
        let fine = counts(ex, 5e-4);
        for (a, b) in coarse.iter().zip(&fine) {
            assert!(a.abs_diff(*b) <= 1, "{ex:?}: {coarse:?} vs {fine:?}");
        }
    }
}

#[test]
fn power_law_exponents() {
    let cfg = CircuitConfig::example(TableExample::A, 0.05).unwrap();
    let a = sweep_accuracy(&cfg, &default_epsilon_grid()).unwrap();
    let fit = a.fit.unwrap();
    eprintln!("a: {:?} {fit:?}", a.rows.iter().map(|r| r.gate_count).collect::<Vec<_>>());
    assert!((fit.n + 1.09).abs() <= 0.10 && (fit.m + 1.05).abs() <= 0.20);

    let cfg = CircuitConfig::example(TableExample::C, 0.05).unwrap();
    let c = sweep_accuracy(&cfg, &default_epsilon_grid()).unwrap();
    let fit = c.fit.unwrap();
    eprintln!("c: {:?} {fit:?}", c.rows.iter().map(|r| r.gate_count).collect::<Vec<_>>());
    assert!((fit.n + 1.04).abs() <= 0.10 && (fit.m + 0.17).abs() <= 0.20);
}

#[test]
fn sweep_matches_individual_runs() {
    let cfg = CircuitConfig::example(TableExample::B, 0.05).unwrap();
    let grid = [0.03, 0.006];
    let sweep = sweep_accuracy(&cfg, &grid).unwrap();
    for row in &sweep.rows {
        let single = run_circuit(&cfg.with_epsilon(row.epsilon)).unwrap();
        assert_eq!(single.gate_count, row.gate_count);
    }
    let refit = loglog_fit(&sweep.rows.to_vec()).unwrap();
    assert_eq!(Some(refit), sweep.fit);
}
