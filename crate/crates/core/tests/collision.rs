//! Collision-map properties: Markovian embedding, reduction to the
//! deterministic model, fixed points of the averaged maps and ensemble
//! statistics.

use std::f64::consts::PI;

use qqcm_core::{
    fixed_point, long_run_stats, simulate_queue, ChannelSpec, CollisionEngine, DensityMatrix, DephasingConvention,
    DistributionSpec, EnsembleStats, Error, FixedPointMode, ModelSpec, QueueTrace, RngStream, Superoperator,
};

fn exp(rate: f64) -> DistributionSpec {
    DistributionSpec::exponential(rate).unwrap()
}

fn det(value: f64) -> DistributionSpec {
    DistributionSpec::deterministic(value).unwrap()
}

fn xxz_model(lambda: f64, service: DistributionSpec) -> ModelSpec {
    let g = PI / 12.0;
    ModelSpec {
        arrival: exp(lambda),
        service,
        idle_channel: ChannelSpec::Dephasing {
            gamma: 0.05,
            convention: DephasingConvention::Generator,
        },
        waiting_channel: ChannelSpec::Dephasing {
            gamma: 0.05,
            convention: DephasingConvention::Generator,
        },
        interaction_channel: ChannelSpec::XxzDephasing {
            g,
            delta: 0.1 / g,
            gamma: 0.05,
        },
        ancilla_state: DensityMatrix::plus(),
        initial_system_state: DensityMatrix::ground(),
    }
}

fn swap_model(lambda: f64) -> ModelSpec {
    ModelSpec {
        arrival: exp(lambda),
        service: det(1.0),
        idle_channel: ChannelSpec::Dephasing {
            gamma: 0.05,
            convention: DephasingConvention::ClosedForm,
        },
        waiting_channel: ChannelSpec::Identity,
        interaction_channel: ChannelSpec::PartialSwap { g: PI / 12.0 },
        ancilla_state: DensityMatrix::plus(),
        initial_system_state: DensityMatrix::ground(),
    }
}

#[test]
fn state_depends_only_on_previous_state_and_current_times() {
    let engine = CollisionEngine::new(xxz_model(0.5, exp(1.0))).unwrap();
    let trace = simulate_queue(&exp(0.5), &exp(1.0), 400, &mut RngStream::new(4, 0)).unwrap();
    let record = engine.run_trajectory(&trace).unwrap();
    for n in [1, 7, 100, 399] {
        let prev = &record.samples[n - 1].state;
        let again = engine
            .collision_step(prev, trace.waiting[n], trace.idle[n], trace.service[n])
            .unwrap();
        assert_eq!(again, record.samples[n].state);
    }

    // Arrival epochs and interarrival gaps do not enter once (W, I, S) are fixed.
    let mut shifted: QueueTrace = trace.clone();
    for k in 0..shifted.len() {
        shifted.arrival[k] += 1000.0;
        shifted.departure[k] += 1000.0;
        shifted.interarrival[k] *= 3.0;
    }
    let other = engine.run_trajectory(&shifted).unwrap();
    for (a, b) in record.samples.iter().zip(&other.samples) {
        assert_eq!(a.state, b.state);
    }
}

#[test]
fn identity_idle_and_waiting_reduce_to_deterministic_model() {
    let mut model = xxz_model(0.5, det(1.0));
    model.idle_channel = ChannelSpec::Identity;
    model.waiting_channel = ChannelSpec::Identity;
    let engine = CollisionEngine::new(model).unwrap();
    let trace = simulate_queue(&exp(0.5), &det(1.0), 1000, &mut RngStream::new(9, 1)).unwrap();
    let record = engine.run_trajectory(&trace).unwrap();
    let mut rho = DensityMatrix::ground();
    for sample in &record.samples {
        rho = engine.deterministic_limit_step(&rho, 1.0).unwrap();
        assert_eq!(rho, sample.state);
    }
}

#[test]
fn long_run_statistics_forget_the_initial_state() {
    let base = xxz_model(0.5, det(1.0));
    let mut excited = base.clone();
    excited.initial_system_state = DensityMatrix::excited();
    let mut tilted = base.clone();
    tilted.initial_system_state = DensityMatrix::from_bloch(-0.6, 0.5, 0.1).unwrap();
    let stats: Vec<f64> = [base, excited, tilted]
        .into_iter()
        .map(|m| {
            let rec = CollisionEngine::new(m).unwrap().run_indexed(20_000, 17, 0).unwrap();
            long_run_stats(&rec, 0.2).unwrap().mean
        })
        .collect();
    assert!((stats[0] - stats[1]).abs() <= 1e-9, "{stats:?}");
    assert!((stats[0] - stats[2]).abs() <= 1e-9, "{stats:?}");
}

#[test]
fn averaged_fixed_points_are_states() {
    let models = [
        xxz_model(0.5, det(1.0)),
        xxz_model(0.5, exp(1.0)),
        xxz_model(0.9, det(1.0)),
        swap_model(0.3),
    ];
    for model in models {
        let engine = CollisionEngine::new(model).unwrap();
        for mode in [
            FixedPointMode::DeterministicLimit,
            FixedPointMode::StochasticLimit,
            FixedPointMode::MixedAncilla,
        ] {
            let fp = engine.averaged_map_fixed_point(mode).unwrap();
            assert!(fp.residual <= 1e-10, "{mode:?}: residual {:e}", fp.residual);
            assert!(fp.state.min_eigenvalue() >= -1e-10);
            let map = engine.averaged_map(mode).unwrap();
            assert!(map.apply(fp.state.matrix()).max_abs_diff(fp.state.matrix()) <= 1e-10);
        }
    }
}

#[test]
fn partial_swap_homogenizes_to_the_ancilla() {
    let mut model = swap_model(0.5);
    model.idle_channel = ChannelSpec::Identity;
    let engine = CollisionEngine::new(model).unwrap();
    let fp = engine
        .averaged_map_fixed_point(FixedPointMode::DeterministicLimit)
        .unwrap();
    assert!(fp.state.distance(&DensityMatrix::plus()) <= 1e-10);
}

#[test]
fn unital_dynamics_with_mixed_ancilla_fix_the_mixed_state() {
    let engine = CollisionEngine::new(xxz_model(0.5, det(1.0))).unwrap();
    let fp = engine.averaged_map_fixed_point(FixedPointMode::MixedAncilla).unwrap();
    assert!(fp.state.distance(&DensityMatrix::maximally_mixed(2)) <= 1e-10);
}

#[test]
fn identity_map_has_ambiguous_fixed_point() {
    let e = fixed_point(&Superoperator::identity(2)).unwrap_err();
    assert!(matches!(e, Error::AmbiguousFixedPoint { .. }));
}

#[test]
fn identical_runs_have_zero_variance() {
    let engine = CollisionEngine::new(xxz_model(0.5, det(1.0))).unwrap();
    let rec = engine.run_indexed(50, 3, 0).unwrap();
    let stats = EnsembleStats::from_records(&[rec.clone(), rec.clone(), rec]).unwrap();
    assert!(stats.variance.iter().all(|&v| v == 0.0));

    let mut fixed = xxz_model(0.5, det(1.0));
    fixed.arrival = det(2.0);
    let engine = CollisionEngine::new(fixed).unwrap();
    let runs: Vec<_> = (0..4).map(|r| engine.run_indexed(50, 3, r).unwrap()).collect();
    let stats = EnsembleStats::from_records(&runs).unwrap();
    assert!(stats.variance.iter().all(|&v| v == 0.0));
}

#[test]
fn ensemble_means_agree_across_sizes() {
    let engine = CollisionEngine::new(xxz_model(0.5, exp(1.0))).unwrap();
    let n = 30;
    let run = |seed: u64, runs: u64| {
        let recs: Vec<_> = (0..runs).map(|r| engine.run_indexed(n, seed, r).unwrap()).collect();
        EnsembleStats::from_records(&recs).unwrap()
    };
    let small = run(100, 100);
    let large = run(200, 1000);
    let within = (0..n)
        .filter(|&k| {
            let se = (small.variance[k] / 100.0 + large.variance[k] / 1000.0).sqrt();
            (small.mean[k] - large.mean[k]).abs() <= 3.0 * se.max(1e-12)
        })
        .count();
    assert!(within as f64 >= 0.9 * n as f64, "{within}/{n}");
}

#[test]
fn seeded_runs_are_reproducible() {
    let engine = CollisionEngine::new(xxz_model(0.5, exp(1.0))).unwrap();
    let a = engine.run_indexed(200, 5, 2).unwrap();
    let b = engine.run_indexed(200, 5, 2).unwrap();
    let c = engine.run_indexed(200, 5, 3).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}
