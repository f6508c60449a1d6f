use tunesel::mc::{run_table1, simulate_dataset, DgpSpec, McConfig, McMethod, McMetric, TrueFunction};
use tunesel::report::Precision;
use tunesel::series::{error_metrics, EvalGrid};
use tunesel::{BasisFamily, Dataset64};

#[test]
fn datasets_are_bitwise_reproducible() {
    let spec = DgpSpec::new(TrueFunction::Sin2Pi, 200).unwrap();
    let a: Dataset64 = simulate_dataset(&spec, 42).unwrap();
    let b: Dataset64 = simulate_dataset(&spec, 42).unwrap();
    assert_eq!(a.y(), b.y());
    assert_eq!(a.x(), b.x());
    let c: Dataset64 = simulate_dataset(&spec, 43).unwrap();
    assert_ne!(a.y(), c.y());
    assert!(DgpSpec::new(TrueFunction::Sin2Pi, 9).is_err());
}

#[test]
fn covariate_mean_and_conditional_variance() {
    let spec = DgpSpec::new(TrueFunction::ExpExp, 1_000_000).unwrap();
    let d: Dataset64 = simulate_dataset(&spec, 7).unwrap();
    let xs = d.x().column(0);
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    assert!((mean - 0.5).abs() < 0.002);
    for (lo, hi) in [(0.0, 0.02), (0.98, 1.0)] {
        let e: Vec<f64> = xs
            .iter()
            .zip(d.y())
            .filter(|(x, _)| **x >= lo && **x < hi)
            .map(|(&x, &y)| y - TrueFunction::ExpExp.eval(x))
            .collect();
        let var = e.iter().map(|v| v * v).sum::<f64>() / e.len() as f64;
        let mid = (lo + hi) / 2.0;
        let target = DgpSpec::noise_variance(mid);
        assert!((var / target - 1.0).abs() < 0.05, "bin [{lo},{hi}): {var} vs {target}");
    }
}

#[test]
fn metrics_against_closed_forms() {
    let truth = |x: f64| TrueFunction::Sin2Pi.eval(x);
    let grid = EvalGrid::standard(vec![0.1, 0.2, 0.7]);
    let shifted = |x: f64| truth(x) + 0.1;
    let m = error_metrics(&shifted, &truth, 0.5, &grid).unwrap();
    for v in m {
        assert!((v - 0.1).abs() < 1e-12);
    }
    // ‖sin(2π·)‖ on [0,1] is 1/√2; its sup is 1.
    let zero = |_: f64| 0.0;
    let m = error_metrics(&zero, &truth, 0.25, &grid).unwrap();
    assert!((m[0] - 0.5f64.sqrt()).abs() < 1e-8);
    assert!((m[2] - 1.0).abs() < 1e-6);
    assert!((m[3] - 1.0).abs() < 1e-12);
}

fn small_config(jobs: usize) -> McConfig {
    let mut cfg = McConfig::table1(8, 2024);
    cfg.dgps = vec![
        DgpSpec::new(TrueFunction::Sin2Pi, 120).unwrap(),
        DgpSpec::new(TrueFunction::ExpExp, 150).unwrap(),
    ];
    cfg.lepski_draws = 500;
    cfg.quadrature_points = 501;
    cfg.uniform_points = 101;
    cfg.jobs = Some(jobs);
    cfg
}

#[test]
fn report_is_independent_of_worker_count() {
    let one = run_table1(&small_config(1)).unwrap();
    let three = run_table1(&small_config(3)).unwrap();
    assert_eq!(one.to_csv(Precision::Full), three.to_csv(Precision::Full));
    assert_eq!(one.cells.len(), 2 * 4 * 2);
    for c in &one.cells {
        assert!(c.valid);
        assert_eq!(c.reps_used + c.failures, 8);
        assert!(c.mean.iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn integrated_and_in_sample_errors_agree_at_n1000() {
    let mut cfg = McConfig::table1(20, 5);
    cfg.dgps = vec![
        DgpSpec::new(TrueFunction::Sin2Pi, 1000).unwrap(),
        DgpSpec::new(TrueFunction::ExpExp, 1000).unwrap(),
    ];
    cfg.methods = vec![McMethod::Mallows, McMethod::Aggregation, McMethod::Cv];
    let r = run_table1(&cfg).unwrap();
    for c in &r.cells {
        let (l2, l2n) = (c.mean[McMetric::L2 as usize], c.mean[McMetric::Prediction as usize]);
        assert!(((l2 - l2n) / l2).abs() < 0.10, "{:?} {:?}: {l2} vs {l2n}", c.method, c.basis);
    }
    assert!(r.value(McMethod::Mallows, BasisFamily::Monomial, 1000, TrueFunction::Sin2Pi, McMetric::L2).is_some());
}
