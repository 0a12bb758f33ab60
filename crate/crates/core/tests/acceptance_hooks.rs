use unimetric::acceptance::{criterion_count, render, run_all, run_criterion, Config};

#[test]
fn negative_scale_fails_every_criterion() {
    let cfg = Config {
        tolerance_scale: -1.0,
        ..Config::default()
    };
    let reports = run_all(&cfg);
    assert_eq!(reports.len(), criterion_count());
    assert!(reports.iter().all(|r| !r.passed), "{}", render(&reports));
}

#[test]
fn single_criterion_runs() {
    let r = run_criterion(&Config::default(), 1).unwrap();
    assert!(r.passed);
    assert!(run_criterion(&Config::default(), 99).is_none());
}
