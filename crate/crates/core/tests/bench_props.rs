use netprop::bench::{
    emit_csv, per_class_recall, read_csv, run_sweep, summarize, ExperimentConfig, Method, RunRecord,
};
use netprop::LabelSet;
use proptest::prelude::*;

fn small(reps: usize) -> ExperimentConfig {
    ExperimentConfig {
        n: 300,
        lambda: vec![6.0, 10.0],
        reps,
        seed: 8,
        ..ExperimentConfig::default()
    }
}

fn csv_bytes(records: &[RunRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    emit_csv(records, &mut buf).unwrap();
    buf
}

#[test]
fn csv_round_trips_exactly() {
    let out = run_sweep(&small(3)).unwrap();
    assert!(out.failures.is_empty());
    let bytes = csv_bytes(&out.records);
    let back = read_csv(bytes.as_slice()).unwrap();
    assert_eq!(back, out.records);
    assert_eq!(csv_bytes(&back), bytes);
}

#[test]
fn output_does_not_depend_on_pool_size() {
    let cfg = small(4);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| csv_bytes(&run_sweep(&cfg).unwrap().records))
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

#[test]
fn records_are_in_range_and_ordered() {
    let cfg = small(2);
    let out = run_sweep(&cfg).unwrap();
    assert_eq!(out.records.len(), 2 * 2 * Method::ALL.len());
    for r in &out.records {
        assert!((0.0..=1.0).contains(&r.accuracy));
        assert!(r.realized_s > 0.0 && r.realized_s <= 1.0);
        assert_eq!(r.seconds, 0.0);
        match r.method {
            Method::Wil => assert!(r.rho_selected.is_some()),
            Method::RowKernel => assert_eq!(r.rho_selected, Some(1.0)),
            Method::ColKernel => assert_eq!(r.rho_selected, Some(0.0)),
            Method::NormalizedLaplacian => assert_eq!(r.rho_selected, None),
        }
    }
    let lambdas: Vec<f64> = out.records.iter().map(|r| r.lambda).collect();
    assert!(lambdas.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn invalid_points_are_reported_not_fatal() {
    let cfg = ExperimentConfig {
        n: 50,
        lambda: vec![5.0, 500.0],
        reps: 2,
        ..ExperimentConfig::default()
    };
    let out = run_sweep(&cfg).unwrap();
    assert_eq!(out.failures.len(), 1);
    assert_eq!(out.failures[0].point.lambda, 500.0);
    assert_eq!(out.records.len(), 2 * Method::ALL.len());
}

#[test]
fn tuned_mixture_tracks_better_endpoint_when_balanced() {
    let cfg = ExperimentConfig {
        n: 1000,
        lambda: vec![7.0],
        reps: 20,
        seed: 3,
        methods: vec![Method::Wil, Method::RowKernel, Method::ColKernel],
        ..ExperimentConfig::default()
    };
    let out = run_sweep(&cfg).unwrap();
    let summary = summarize(&out.records);
    let mean = |m: Method| summary.iter().find(|s| s.method == m).unwrap().mean_accuracy;
    let best = mean(Method::RowKernel).max(mean(Method::ColKernel));
    let wil = mean(Method::Wil);
    assert!(wil >= best - 0.02, "wil {wil} vs best endpoint {best}");
}

proptest! {
    #[test]
    fn recall_is_a_fraction(truth in proptest::collection::vec(0usize..3, 1..60), seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pred: Vec<usize> = truth.iter().map(|&c| if r.random::<f64>() < 0.7 { c } else { r.random_range(0..3) }).collect();
        let truth = LabelSet::full(3, &truth).unwrap();
        let pred = LabelSet::full(3, &pred).unwrap();
        let all: Vec<usize> = (0..truth.len()).collect();
        let rec = per_class_recall(&pred, &truth, &all);
        prop_assert_eq!(rec.len(), 3);
        prop_assert!(rec.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert_eq!(per_class_recall(&truth, &truth, &all), vec![1.0; 3]);
    }
}
