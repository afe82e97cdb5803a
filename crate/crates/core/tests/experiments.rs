use qttt::board::Player;
use qttt::experiments::{
    blocking_effectiveness, enumerate_classical, harvest_endgames, run_deterministic, run_random_games, summarize,
    write_curves_csv, write_tables_csv, write_tables_json, BlockMode, GameMode, OutcomeTable, TableReport,
    CLASSICAL_ORDERINGS,
};
use qttt::optimizer::DEFAULT_RESTARTS;
use qttt::strategies::{OpeningKind, StrategyPair};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn conserved(t: &OutcomeTable, n: u64) {
    assert_eq!(t.total, n);
    assert_eq!(t.completed() + t.premature, n);
    assert_eq!(t.wins(Player::One) + t.wins(Player::Two) + t.draws, t.completed());
}

#[test]
fn random_runs_do_not_depend_on_thread_count() {
    for (mode, opening) in [(GameMode::Classical, None), (GameMode::Quantum, Some(OpeningKind::Random))] {
        let a = in_pool(1, || run_random_games(mode, 500, 8, opening));
        let b = in_pool(3, || run_random_games(mode, 500, 8, opening));
        assert_eq!(a, b);
        conserved(&a, 500);
    }
}

#[test]
fn endgames_and_curves_do_not_depend_on_thread_count() {
    let a = in_pool(1, || harvest_endgames(60, 4));
    let b = in_pool(3, || harvest_endgames(60, 4));
    assert_eq!(a.len(), 60);
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
    let ca = in_pool(1, || blocking_effectiveness(&a, BlockMode::Weighted, 4, DEFAULT_RESTARTS, 0.1));
    let cb = in_pool(3, || blocking_effectiveness(&b, BlockMode::Weighted, 4, DEFAULT_RESTARTS, 0.1));
    assert_eq!(ca, cb);
    assert_eq!(ca.n() + ca.unresolved, 60);
    for e in &a {
        assert!(e.omega > 0.0 && e.omega < 3.0);
        let again = e.state.line_weight(Player::One, e.pre_line);
        assert_eq!(again, e.omega);
    }
}

#[test]
fn deterministic_runs_reproduce() {
    let a = in_pool(1, || run_deterministic(StrategyPair::Wbwb, OpeningKind::Random, 12, 3, DEFAULT_RESTARTS));
    let b = in_pool(3, || run_deterministic(StrategyPair::Wbwb, OpeningKind::Random, 12, 3, DEFAULT_RESTARTS));
    assert_eq!(a, b);
    conserved(&a, 12);
}

#[test]
fn quantum_games_never_end_before_five_moves() {
    let t = run_random_games(GameMode::Quantum, 2000, 6, None);
    assert_eq!(t.p1_wins[..2], [0, 0]);
    assert_eq!(t.p2_wins[..2], [0, 0]);
}

#[test]
fn monte_carlo_classical_agrees_with_enumeration() {
    let exact = enumerate_classical();
    assert_eq!(exact.total, CLASSICAL_ORDERINGS);
    let n = 10_000u64;
    let sim = run_random_games(GameMode::Classical, n, 17, None);
    conserved(&sim, n);
    let check = |p: f64, count: u64, what: &str| {
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        let q = count as f64 / n as f64;
        assert!((q - p).abs() <= 3.0 * sigma + 1e-12, "{what}: {q} vs {p}");
    };
    let total = exact.total as f64;
    for k in 0..5 {
        check(exact.p1_wins[k] as f64 / total, sim.p1_wins[k], &format!("p1 k={}", k + 1));
        check(exact.p2_wins[k] as f64 / total, sim.p2_wins[k], &format!("p2 k={}", k + 1));
    }
    check(exact.draws as f64 / total, sim.draws, "draws");
}

#[test]
fn report_writers() {
    let t = enumerate_classical();
    let rows = summarize(&t).unwrap();
    let sum: f64 = rows.iter().take(5).map(|r| r.p1_pct.unwrap() + r.p2_pct.unwrap()).sum();
    assert!((sum - 100.0).abs() < 1e-9);

    let report = TableReport::new(vec![("opening".into(), "none".into())], t).unwrap();
    let mut csv = Vec::new();
    write_tables_csv(std::slice::from_ref(&report), &mut csv).unwrap();
    let csv = String::from_utf8(csv).unwrap();
    assert!(csv.starts_with("opening,k,p1_pct,p2_pct\n"), "{csv}");
    assert_eq!(csv.lines().count(), 1 + 7);

    let mut json = Vec::new();
    write_tables_json(&[report.clone(), report], &mut json).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&json).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);

    assert!(TableReport::new(vec![], OutcomeTable::default()).is_err());

    let curve = blocking_effectiveness(&harvest_endgames(10, 1), BlockMode::Random, 1, DEFAULT_RESTARTS, 0.25);
    let mut out = Vec::new();
    write_curves_csv(&[curve], &mut out).unwrap();
    assert!(String::from_utf8(out).unwrap().starts_with("omega_lo,omega_hi,n,blocked,rate\n"));
}
