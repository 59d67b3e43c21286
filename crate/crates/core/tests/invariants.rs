use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::{prop, prop_assert, proptest, ProptestConfig};

use qusense_core::circuit::circuit_unitary;
use qusense_core::gates::GateOp;
use qusense_core::noise::{dephase, DephasingSpec};
use qusense_core::register::DimensionVector;
use qusense_core::sensing::{
    periodogram, prepare_phase_state, readout_qft, simulate_correlation_spectroscopy, top_adjacent_pair,
    CorrelationRun, TargetSpinConfig,
};
use qusense_core::state::{measure_distribution, MixedState, PureState};
use qusense_core::{Circuit, Complex};

fn dims_strategy() -> impl proptest::strategy::Strategy<Value = Vec<usize>> {
    prop::collection::vec(2usize..=4, 2..=3)
}

fn state_from(dims: &DimensionVector, re: &[f64], im: &[f64]) -> PureState {
    let amps = DVector::from_fn(dims.total(), |k, _| {
        Complex::new(re[k % re.len()] + 1e-3, im[k % im.len()])
    });
    PureState::normalized(dims.clone(), amps).unwrap()
}

fn local_gate(q: usize, kind: u8, theta: f64) -> GateOp {
    match kind % 3 {
        0 => GateOp::chrestenson(q),
        1 => GateOp::phase(q, theta),
        _ => GateOp::chrestenson_dag(q),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn disjoint_gates_commute(
        dims in dims_strategy(),
        k1 in 0u8..3,
        k2 in 0u8..3,
        t1 in -PI..PI,
        t2 in -PI..PI,
    ) {
        let dv = DimensionVector::new(dims.clone()).unwrap();
        let last = dims.len() - 1;
        let a = local_gate(0, k1, t1);
        let b = local_gate(last, k2, t2);
        let ab = circuit_unitary(&Circuit::from_ops(dv.clone(), vec![a.clone(), b.clone()]).unwrap()).unwrap();
        let ba = circuit_unitary(&Circuit::from_ops(dv, vec![b, a]).unwrap()).unwrap();
        prop_assert!((ab - ba).norm() < 1e-12);
    }

    #[test]
    fn pure_distribution_is_density_diagonal(
        dims in dims_strategy(),
        re in prop::collection::vec(-1.0..1.0f64, 8),
        im in prop::collection::vec(-1.0..1.0f64, 8),
    ) {
        let dv = DimensionVector::new(dims).unwrap();
        let psi = state_from(&dv, &re, &im);
        let rho = psi.to_mixed();
        let p = measure_distribution(&psi);
        let q = measure_distribution(&rho);
        for (k, (a, b)) in p.iter().zip(&q).enumerate() {
            prop_assert!((a - b).abs() < 1e-14);
            prop_assert!((rho.rho()[(k, k)].re - a).abs() < 1e-14);
        }
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_dephasing_is_idempotent(
        dims in dims_strategy(),
        re in prop::collection::vec(-1.0..1.0f64, 8),
        im in prop::collection::vec(-1.0..1.0f64, 8),
    ) {
        let dv = DimensionVector::new(dims).unwrap();
        let rho = state_from(&dv, &re, &im).to_mixed();
        let spec = DephasingSpec::full(dv.len());
        let once = dephase(&rho, &spec).unwrap();
        let twice = dephase(&once, &spec).unwrap();
        prop_assert!((once.rho() - twice.rho()).norm() < 1e-14);
        let off: f64 = (0..dv.total())
            .flat_map(|i| (0..dv.total()).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| once.rho()[(i, j)].norm())
            .sum();
        prop_assert!(off < 1e-14);
    }

    #[test]
    fn qft_readout_contrast(dims in dims_strategy(), phi in 0.0..2.0 * PI) {
        // two adjacent outcomes carry at least 8/pi^2 of the mass
        let dv = DimensionVector::new(dims).unwrap();
        let dist = readout_qft(&prepare_phase_state(&dv, phi)).unwrap();
        let (_, mass) = top_adjacent_pair(&dist);
        prop_assert!(mass >= 8.0 / (PI * PI) - 1e-12);
    }

    #[test]
    fn zero_padding_keeps_spectral_peak(f in 500.0..15_000.0f64, pad_pow in 10u32..13) {
        let dt = 15e-6;
        let x: Vec<f64> = (0..400).map(|i| (2.0 * PI * f * i as f64 * dt).cos()).collect();
        let plain = periodogram(&x, dt, None).unwrap();
        let padded = periodogram(&x, dt, Some(1 << pad_pow)).unwrap();
        let (a, b) = (plain.peak().unwrap(), padded.peak().unwrap());
        prop_assert!((a - b).abs() <= plain.resolution);
    }
}

#[test]
fn correlation_peaks_survive_padding_and_readout_errors() {
    let cfg = TargetSpinConfig::default();
    let base = CorrelationRun::default();
    let plain = simulate_correlation_spectroscopy(&cfg, &base, 0).unwrap();
    let noisy = CorrelationRun {
        pad_to: Some(4096),
        readout_fidelities: Some(qusense_core::sensing::MEMORY_FIDELITIES),
        shots: Some(2000),
        ..base
    };
    let r = simulate_correlation_spectroscopy(&cfg, &noisy, 11).unwrap();
    let bin = plain.spectrum1.resolution;
    let (p1, p2) = plain.peaks();
    let (q1, q2) = r.peaks();
    assert!((p1.unwrap() - q1.unwrap()).abs() <= bin);
    assert!((p2.unwrap() - q2.unwrap()).abs() <= bin);
    assert!(r.p_mem1.iter().chain(&r.p_mem2).all(|p| (0.0..=1.0).contains(p)));
}

#[test]
fn correlation_run_is_deterministic_per_seed() {
    let cfg = TargetSpinConfig::default();
    let run = CorrelationRun {
        shots: Some(500),
        tc_points: 64,
        ..CorrelationRun::default()
    };
    let a = simulate_correlation_spectroscopy(&cfg, &run, 7).unwrap();
    let b = simulate_correlation_spectroscopy(&cfg, &run, 7).unwrap();
    let c = simulate_correlation_spectroscopy(&cfg, &run, 8).unwrap();
    assert_eq!(a.p_mem1, b.p_mem1);
    assert_ne!(a.p_mem1, c.p_mem1);
}

#[test]
fn mixed_state_rejects_non_physical_input() {
    let dims = DimensionVector::qubits(1).unwrap();
    let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![Complex::new(1.5, 0.0), Complex::new(-0.5, 0.0)]));
    assert!(MixedState::new(dims, bad).is_err());
}
