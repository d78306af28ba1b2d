use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use qrc_core::bounds::{
    best_bound, cost_bound, fixture_schedules, propagate_schedule, schedule_cost, BoundConfig, CostInputs, CostSource,
};
use qrc_core::cgp::{cgp_estimate, CgpKind};
use qrc_core::gates::{load_unitary, phase_distance, save_unitary, standard_gate, GateName};
use qrc_core::linalg::{DensityMatrix, LogBase};
use qrc_core::measures::{Measure, MeasureKind};
use qrc_core::powers::{certificate_objective, power_search, PowerConfig};

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn quick() -> BoundConfig {
    BoundConfig { power: PowerConfig { restarts: 4, ..Default::default() }, samples: 2000, ..Default::default() }
}

#[test]
fn loaded_t_gate_matches_library() {
    let u = load_unitary(fixture("t_gate.json")).unwrap();
    let t = standard_gate(GateName::T).unwrap();
    assert!(phase_distance(u.matrix(), t.matrix()) < 1e-12);
    let dir = tempfile::tempdir().unwrap();
    for name in ["t.json", "t.csv"] {
        let p = dir.path().join(name);
        save_unitary(&u, &p).unwrap();
        let back = load_unitary(&p).unwrap();
        assert!((back.matrix() - u.matrix()).norm() < 1e-15);
    }
}

#[test]
fn certificates_reproduce_their_values() {
    let q = standard_gate(GateName::Qft(2)).unwrap();
    for m in [
        Measure::TsallisCoherence { alpha: 0.5 },
        Measure::RelEntCoherence { base: LogBase::Two },
        Measure::TsallisImaginarity { alpha: 0.3 },
    ] {
        let c = power_search(&q, m, &PowerConfig::default()).unwrap();
        assert_abs_diff_eq!(certificate_objective(&q, &c).unwrap(), c.value, epsilon = 1e-12);
    }
}

#[test]
fn qft_coherence_bound_beats_imaginarity_bound() {
    let cfg = BoundConfig { alphas: vec![2.0], include_cgp: false, ..quick() };
    let r = best_bound(&standard_gate(GateName::Qft(5)).unwrap(), &cfg).unwrap();
    let thm2b = r.bounds.iter().find(|b| b.source == CostSource::Thm2b).unwrap().value;
    let thm4 = cost_bound(CostSource::Thm4, CostInputs::new(1.0, 2, 5)).unwrap().value;
    assert!(thm2b >= 0.82322 - 1e-5);
    assert!(thm2b >= thm4);
    let c2 = r.certificates.iter().find(|c| c.kind == MeasureKind::TsallisCoherence).unwrap();
    assert!(c2.value >= 32f64.sqrt() - 1.0 - 1e-9);
}

#[test]
fn schedules_sandwich_bounds() {
    for g in [GateName::H, GateName::T, GateName::X, GateName::Cnot] {
        let u = standard_gate(g).unwrap();
        let best = best_bound(&u, &quick()).unwrap().best().unwrap().value;
        for s in fixture_schedules(&g).unwrap() {
            assert!(schedule_cost(&s) >= best - 1e-8, "{g}");
            assert!(phase_distance(propagate_schedule(&s).unwrap().matrix(), u.matrix()) <= 1e-6);
        }
    }
    let t = &fixture_schedules(&GateName::T).unwrap()[0];
    assert_abs_diff_eq!(schedule_cost(t), PI / 8.0, epsilon = 1e-15);
}

#[test]
fn restricted_bound_runs_only_with_delta() {
    let h = standard_gate(GateName::H).unwrap();
    let without = best_bound(&h, &quick()).unwrap();
    assert!(without.bounds.iter().all(|b| b.source != CostSource::Eq26Restricted));
    let with = best_bound(&h, &BoundConfig { delta: Some(0.25), ..quick() }).unwrap();
    let b = with.bounds.iter().find(|b| b.source == CostSource::Eq26Restricted).unwrap();
    assert!(b.value > 0.0);
    assert_eq!(b.inputs.delta, Some(0.25));
}

#[test]
fn estimates_depend_only_on_seed() {
    let u = standard_gate(GateName::Qft(3)).unwrap();
    let a = cgp_estimate(&u, CgpKind::RelEnt, 3000, 11, LogBase::Two).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap()
        .install(|| cgp_estimate(&u, CgpKind::RelEnt, 3000, 11, LogBase::Two).unwrap());
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    let c = cgp_estimate(&u, CgpKind::RelEnt, 3000, 12, LogBase::Two).unwrap();
    assert_ne!(a.mean, c.mean);
}

#[test]
fn maximally_mixed_input_has_zero_objective() {
    let h = standard_gate(GateName::H).unwrap();
    let mixed = DensityMatrix::maximally_mixed(2, 1).unwrap();
    let m = Measure::SkewCoherence;
    assert_abs_diff_eq!(qrc_core::powers::power_objective(&h, &m, &mixed).unwrap(), 0.0, epsilon = 1e-12);
}
