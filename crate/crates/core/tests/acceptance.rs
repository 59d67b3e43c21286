//! Acceptance suite. Every criterion prints one `PASS` / `FAIL` line; the test
//! fails if any criterion fails. Expected values come from the closed-form
//! oracles below, never from the library under test.
//!
//! The digitization golden image lives in `tests/golden/`. Regenerate it from
//! the oracle with `QUSENSE_BLESS=1 cargo test --test acceptance`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use proptest::prelude::{any, prop, prop_assert, prop_assert_eq, prop_oneof, Just};
use proptest::strategy::Strategy as Gen;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qusense_core::circuit::{circuit_unitary, synthesize_inverse_qft, synthesize_qft, Circuit};
use qusense_core::gates::GateOp;
use qusense_core::metrology::{
    dynamic_range, dynamic_range_gain, fisher_analysis, qcrb_precision, qfi_strategy, FisherOptions,
    SensingParams, Strategy, Units,
};
use qusense_core::noise::{dephase, purity_study_default, DephasingSpec};
use qusense_core::register::{digits_to_index, index_to_digits, DimensionVector};
use qusense_core::sensing::{
    ac_field_sweep, crosstalk, estimator_spread, first_step_phases, is_monotone_staircase, phase_sweep,
    prepare_phase_state, readout_local_hadamard, readout_qft, sensing_step, simulate_correlation_spectroscopy,
    support_size, uniform_phases, CorrelationRun, LedgerWeight, Mapping, SpinState, SpreadOptions,
    TargetSpinConfig,
};
use qusense_core::state::{MixedState, PureState};
use qusense_core::Complex;

// ---------------------------------------------------------------- oracles

/// `value(f) = sum_l j_l prod_{m<l} d_m` for the big-endian flat label `f`.
fn value_of(dims: &[usize], flat: usize) -> usize {
    let mut rest = flat;
    let mut digits = vec![0; dims.len()];
    for l in (0..dims.len()).rev() {
        digits[l] = rest % dims[l];
        rest /= dims[l];
    }
    let mut v = 0;
    let mut w = 1;
    for l in 0..dims.len() {
        v += digits[l] * w;
        w *= dims[l];
    }
    v
}

/// `U[r, c] = exp(2 pi i r value(c) / N) / sqrt N`.
fn qft_oracle(dims: &[usize]) -> DMatrix<Complex> {
    let n: usize = dims.iter().product();
    DMatrix::from_fn(n, n, |r, c| {
        let rv = (r * value_of(dims, c)) % n;
        Complex::cis(2.0 * PI * rv as f64 / n as f64) / (n as f64).sqrt()
    })
}

/// `|(1/d) sum_j exp(i x j)|^2`.
fn fejer(d: usize, x: f64) -> f64 {
    let s: Complex = (0..d).map(|j| Complex::cis(x * j as f64)).sum();
    s.norm_sqr() / (d * d) as f64
}

/// Value-labeled inverse-QFT readout of the phase ladder.
fn qft_readout_oracle(dims: &[usize], phi: f64) -> Vec<f64> {
    let n: usize = dims.iter().product();
    (0..n).map(|v| fejer(n, phi - 2.0 * PI * v as f64 / n as f64)).collect()
}

/// Value-labeled local-Hadamard readout: a product of per-qudit Fejer kernels,
/// qudit `l` carrying `phi * prod_{m>l} d_m`, digit `j_l` of the value read
/// with weight `prod_{m<l} d_m`.
fn local_h_oracle(dims: &[usize], phi: f64) -> Vec<f64> {
    let n: usize = dims.iter().product();
    (0..n)
        .map(|v| {
            let mut rest = v;
            let mut p = 1.0;
            for (l, &d) in dims.iter().enumerate() {
                let j = rest % d;
                rest /= d;
                let stride: usize = dims[l + 1..].iter().product();
                p *= fejer(d, phi * stride as f64 - 2.0 * PI * j as f64 / d as f64);
            }
            p
        })
        .collect()
}

fn frobenius(a: &DMatrix<Complex>, b: &DMatrix<Complex>) -> f64 {
    (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

// ---------------------------------------------------------------- harness

struct Check {
    failures: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check { failures: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self, started: Instant, budget: Option<Duration>) -> Result<String, String> {
        let elapsed = started.elapsed();
        let mut failures = self.failures;
        if let Some(b) = budget {
            if elapsed > b {
                failures.push(format!("runtime {elapsed:.2?} exceeds {b:?}"));
            }
        }
        if failures.is_empty() {
            Ok(format!("{elapsed:.2?}"))
        } else {
            Err(failures.join("; "))
        }
    }
}

fn unwrap<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- criteria

fn criterion_1() -> Result<String, String> {
    let t0 = Instant::now();
    let mut c = Check::new();
    for dims in [vec![2], vec![3], vec![2, 2], vec![3, 2], vec![3, 2, 2], vec![2, 2, 2, 2]] {
        let dv = unwrap(DimensionVector::new(dims.clone()))?;
        let u = unwrap(circuit_unitary(&synthesize_qft(&dv)))?;
        let err = frobenius(&u, &qft_oracle(&dims));
        c.require(err < 1e-9, || format!("{dims:?}: Frobenius error {err:e}"));
    }
    c.finish(t0, Some(Duration::from_secs(1)))
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/digitize_3x2x2.csv")
}

const GOLDEN_PHASES: usize = 96;

fn render_image(rows: &[(usize, &str, Vec<f64>)]) -> String {
    let mut out = String::from("phi_index,mapping,outcome,probability\n");
    for (i, mapping, dist) in rows {
        for (k, p) in dist.iter().enumerate() {
            writeln!(out, "{i},{mapping},{k},{p:.9}").unwrap();
        }
    }
    out
}

fn criterion_2() -> Result<String, String> {
    let t0 = Instant::now();
    let mut c = Check::new();
    let dims = vec![3, 2, 2];
    let dv = unwrap(DimensionVector::new(dims.clone()))?;

    for k in 0..12 {
        let phi = 2.0 * PI * k as f64 / 12.0;
        let d = unwrap(readout_qft(&prepare_phase_state(&dv, phi)))?;
        c.require((d[k] - 1.0).abs() < 1e-9, || format!("phi = 2 pi {k}/12: P({k}) = {}", d[k]));
    }
    let spread = unwrap(readout_local_hadamard(&prepare_phase_state(&dv, 2.0 * PI * 0.13)))?;
    c.require(support_size(&spread, 1e-6) > 1, || "local H at 2 pi 0.13 has single support".into());
    let sharp = unwrap(readout_local_hadamard(&prepare_phase_state(&dv, PI)))?;
    c.require(support_size(&sharp, 1e-9) == 1, || {
        format!("local H at pi has support {}", support_size(&sharp, 1e-9))
    });

    let phis = uniform_phases(GOLDEN_PHASES);
    let mut lib_rows = Vec::new();
    let mut oracle_rows = Vec::new();
    for mapping in Mapping::ALL {
        let image = unwrap(phase_sweep(&dv, &phis, mapping))?;
        for (i, (dist, &phi)) in image.into_iter().zip(&phis).enumerate() {
            lib_rows.push((i, mapping.name(), dist));
            let oracle = match mapping {
                Mapping::Qft => qft_readout_oracle(&dims, phi),
                Mapping::LocalH => local_h_oracle(&dims, phi),
            };
            oracle_rows.push((i, mapping.name(), oracle));
        }
    }
    let lib = render_image(&lib_rows);
    let oracle = render_image(&oracle_rows);
    let path = golden_path();
    if std::env::var_os("QUSENSE_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).map_err(|e| e.to_string())?;
        std::fs::write(&path, &oracle).map_err(|e| e.to_string())?;
    }
    match std::fs::read_to_string(&path) {
        Ok(golden) => {
            c.require(golden == oracle, || "oracle image differs from the golden file".into());
            c.require(golden == lib, || {
                let line = golden.lines().zip(lib.lines()).position(|(a, b)| a != b);
                format!("simulated image differs from the golden file at line {line:?}")
            });
        }
        Err(e) => c.require(false, || format!("golden file {}: {e}", path.display())),
    }
    c.finish(t0, None)
}

fn qfi_oracle(strategy: Strategy, n: usize) -> f64 {
    let n = n as i32;
    match strategy {
        Strategy::Sql => n as f64,
        Strategy::Qpea => (4f64.powi(n) - 1.0) / 3.0,
        Strategy::Noon => (2f64.powi(n) - 1.0).powi(2),
    }
}

fn criterion_3() -> Result<String, String> {
    let t0 = Instant::now();
    let mut c = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..=8 {
        for strategy in Strategy::ALL {
            let expected = qfi_oracle(strategy, n);
            for _ in 0..20 {
                let phi = rng.random_range(0.0..2.0 * PI);
                let f = unwrap(qfi_strategy(strategy, n, phi, 1e-6))?;
                c.require(rel(f, expected) < 1e-6, || {
                    format!("{} n={n} phi={phi}: qfi {f} vs {expected}", strategy.name())
                });
            }
        }
    }
    c.require(qfi_oracle(Strategy::Qpea, 3) == 21.0, || "QPEA n=3 is not 21".into());
    c.require(qfi_oracle(Strategy::Noon, 3) == 49.0, || "NOON n=3 is not 49".into());
    for (s, exact) in [(Strategy::Qpea, 21.0), (Strategy::Noon, 49.0)] {
        let f = unwrap(qfi_strategy(s, 3, 0.7, 1e-6))?;
        c.require(rel(f, exact) < 1e-6, || format!("{} n=3: {f}", s.name()));
    }

    let opts = FisherOptions::default();
    for n in 1..=8 {
        for strategy in Strategy::ALL {
            let r = unwrap(fisher_analysis(strategy, n, &opts))?;
            let worst = r.cfi_curve.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            c.require(worst <= r.qfi + 1e-6, || {
                format!("{} n={n}: max cfi {worst} above qfi {}", strategy.name(), r.qfi)
            });
            c.require(r.cfi_mean <= r.qfi + 1e-6, || format!("{} n={n}: cfi_mean above qfi", strategy.name()));
            if strategy == Strategy::Qpea && n >= 2 {
                c.require(r.cfi_mean > n as f64, || format!("QPEA n={n}: cfi_mean {} <= {n}", r.cfi_mean));
            }
        }
    }
    c.finish(t0, Some(Duration::from_secs(30)))
}

fn criterion_4() -> Result<String, String> {
    let t0 = Instant::now();
    let mut c = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let p = SensingParams {
            de_dalpha: rng.random_range(0.1..10.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 },
            tau: rng.random_range(1e-6..1e-2),
            measurements: rng.random_range(1..100_000),
            n: rng.random_range(1..=10),
            units: if rng.random_bool(0.5) { Units::Natural } else { Units::Si },
        };
        let h = match p.units {
            Units::Natural => 1.0,
            Units::Si => 6.626_070_15e-34,
        };
        let nm = p.measurements as f64;
        let td = p.tau * p.de_dalpha.abs();
        let big = 2f64.powi(p.n as i32);
        let expected = [
            (Strategy::Sql, h / nm.sqrt() / td),
            (Strategy::Qpea, h * (3.0 / (nm * (big * big - 1.0))).sqrt() / td),
            (Strategy::Noon, h / (nm.sqrt() * (big - 1.0) * td)),
        ];
        for (s, want) in expected {
            let got = unwrap(qcrb_precision(s, &p))?;
            c.require(rel(got, want) < 1e-12, || format!("{} {p:?}: {got} vs {want}", s.name()));
        }
    }
    let p = SensingParams {
        de_dalpha: 1.3,
        tau: 2e-3,
        measurements: 500,
        n: 3,
        units: Units::Natural,
    };
    let ratio = unwrap(dynamic_range(Strategy::Qpea, &p))? / unwrap(dynamic_range(Strategy::Sql, &p))?;
    let want = 2.0 / 3f64.sqrt() * 63f64.sqrt();
    c.require(rel(ratio, want) < 1e-12, || format!("DR ratio {ratio} vs {want}"));
    let gain = dynamic_range_gain(&unwrap(DimensionVector::new(vec![3, 2, 2]))?);
    c.require(rel(gain, 12.0) <= 0.2, || format!("12-level gain {gain} not within 20% of 12"));
    c.finish(t0, None).map(|t| format!("{t}, 12-level gain {gain:.3}"))
}

fn criterion_5() -> Result<String, String> {
    let t0 = Instant::now();
    let mut c = Check::new();
    for dims in [vec![2, 2, 2], vec![3, 2, 2]] {
        let dv = unwrap(DimensionVector::new(dims.clone()))?;
        let n = dv.total();
        let m = 20 * n;
        let phis: Vec<f64> = (0..m).map(|i| 2.0 * PI * (i as f64 + 0.5) / m as f64).collect();
        let image = unwrap(ac_field_sweep(&dv, &phis))?;
        c.require(is_monotone_staircase(&image.outcomes, n), || format!("{dims:?}: not a monotone staircase"));
    }
    let opts = SpreadOptions::default();
    let mut zs = Vec::new();
    for n in 1..=6 {
        let s = unwrap(estimator_spread(n, &opts))?;
        let qcrb = 1.0 / (opts.shots as f64 * qfi_oracle(Strategy::Qpea, n)).sqrt();
        let z = (s.std - qcrb) / (s.std / (2.0 * (opts.trials as f64 - 1.0)).sqrt());
        c.require(z.abs() <= 3.0, || format!("n={n}: std {} vs qcrb {qcrb}, z = {z:.2}", s.std));
        zs.push(format!("{z:.2}"));
    }
    c.finish(t0, None).map(|t| format!("{t}, z = [{}]", zs.join(", ")))
}

fn criterion_6() -> Result<String, String> {
    let t0 = Instant::now();
    let mut c = Check::new();
    let ideal = TargetSpinConfig {
        couplings_hz: vec![6e3, 12e3],
        ..TargetSpinConfig::default()
    };
    let tau = ideal.default_tau();
    // table rows: (12 kHz target, 6 kHz target) -> (LSB, MSB)
    let table = [
        ((0.5, 0.5), (1.5 * PI, 0.75 * PI)),
        ((0.5, -0.5), (0.5 * PI, 0.25 * PI)),
        ((-0.5, 0.5), (-0.5 * PI, -0.25 * PI)),
        ((-0.5, -0.5), (-1.5 * PI, -0.75 * PI)),
    ];
    for ((i2, i1), (lsb, msb)) in table {
        let (l, m) = first_step_phases(&ideal.couplings_hz, &[i1, i2], tau, LedgerWeight::Double);
        c.require((l - lsb).abs() < 1e-12 && (m - msb).abs() < 1e-12, || {
            format!("spins ({i2}, {i1}): ({l}, {m}) vs ({lsb}, {msb})")
        });
    }

    let run = CorrelationRun::default();
    let r = unwrap(simulate_correlation_spectroscopy(&TargetSpinConfig::default(), &run, 0))?;
    let bin = r.spectrum1.resolution;
    let (f1, f2) = r.peaks();
    let (f1, f2) = (f1.unwrap_or(f64::NAN), f2.unwrap_or(f64::NAN));
    c.require((f1 - 2.5e3).abs() <= bin, || format!("memory 1 peak {f1} Hz, bin {bin}"));
    c.require((f2 - 3.8e3).abs() <= bin, || format!("memory 2 peak {f2} Hz, bin {bin}"));
    let (x2, x1) = unwrap(crosstalk(&ideal, &run))?;
    c.require(x2 < 1e-6 && x1 < 1e-6, || format!("cross-talk {x2:e} (memory 2), {x1:e} (memory 1)"));
    let (w1, w2) = r.linewidths();
    c.finish(t0, None).map(|t| {
        format!(
            "{t}, peaks {f1:.1} / {f2:.1} Hz, bin {bin:.1} Hz, linewidths {:.0} / {:.0} Hz",
            w1.unwrap_or(f64::NAN),
            w2.unwrap_or(f64::NAN)
        )
    })
}

fn criterion_7() -> Result<String, String> {
    let t0 = Instant::now();
    let mut c = Check::new();
    let mut local_means = Vec::new();
    for n in 1..=5 {
        let dims = vec![2; n];
        let qft = unwrap(purity_study_default(n, Mapping::Qft))?;
        let loc = unwrap(purity_study_default(n, Mapping::LocalH))?;
        for (r, oracle) in [(&qft, qft_readout_oracle as fn(&[usize], f64) -> Vec<f64>), (&loc, local_h_oracle)] {
            for (&phi, &p) in r.phis.iter().zip(&r.purities) {
                let want: f64 = oracle(&dims, phi).iter().map(|q| q * q).sum();
                c.require((p - want).abs() < 1e-10, || {
                    format!("{} n={n} phi={phi}: purity {p} vs {want}", r.mapping.name())
                });
            }
        }
        if n == 1 {
            c.require(qft.mean >= loc.mean - 1e-12, || format!("n=1: {} < {}", qft.mean, loc.mean));
        } else {
            c.require(qft.mean > loc.mean, || format!("n={n}: {} <= {}", qft.mean, loc.mean));
        }
        local_means.push(loc.mean);
    }
    c.require(local_means.windows(2).all(|w| w[1] < w[0]), || {
        format!("local H purity not decreasing: {local_means:?}")
    });
    c.finish(t0, None)
}

// ---------------------------------------------------------------- criterion 8

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases: 1000,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn arb_dims() -> impl Gen<Value = Vec<usize>> {
    prop::collection::vec(2usize..=4, 1..=3)
}

fn random_state(dims: &DimensionVector, seed: u64) -> PureState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = nalgebra::DVector::from_fn(dims.total(), |_, _| {
        Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    PureState::normalized(dims.clone(), amps).unwrap()
}

fn random_mixed(dims: &DimensionVector, seed: u64) -> MixedState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dims.total();
    let a = DMatrix::from_fn(n, n, |_, _| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    MixedState::new(dims.clone(), rho / tr).unwrap()
}

fn random_circuit(dims: &DimensionVector, seed: u64, len: usize) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = dims.len();
    let mut c = Circuit::new(dims.clone());
    for _ in 0..len {
        let t = rng.random_range(0..q);
        let theta = rng.random_range(-PI..PI);
        let op = match rng.random_range(0..4) {
            0 => GateOp::chrestenson(t),
            1 => GateOp::phase(t, theta),
            2 if q > 1 => {
                let ctrl = (t + rng.random_range(1..q)) % q;
                GateOp::controlled_phase(ctrl, t, theta)
            }
            _ => GateOp::chrestenson_dag(t),
        };
        c.push(op).unwrap();
    }
    c
}

fn property(name: &str, f: impl FnOnce(&mut TestRunner) -> Result<(), String>, c: &mut Check) {
    let mut r = runner();
    if let Err(e) = f(&mut r) {
        c.require(false, || format!("{name}: {e}"));
    }
}

fn criterion_8() -> Result<String, String> {
    let t0 = Instant::now();
    let mut c = Check::new();

    property(
        "unitarity and trace preservation",
        |r| {
            r.run(&(arb_dims(), any::<u64>()), |(dims, seed)| {
                let dv = DimensionVector::new(dims).unwrap();
                let circ = random_circuit(&dv, seed, 6);
                let u = circuit_unitary(&circ).unwrap();
                let id = DMatrix::<Complex>::identity(dv.total(), dv.total());
                prop_assert!(frobenius(&(u.adjoint() * &u), &id) < 1e-10);
                let mut psi = random_state(&dv, seed ^ 1);
                psi.apply_circuit(&circ).unwrap();
                prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
                let mut rho = random_mixed(&dv, seed ^ 2);
                rho.apply_circuit(&circ).unwrap();
                prop_assert!((rho.trace() - Complex::new(1.0, 0.0)).norm() < 1e-12);
                prop_assert!(rho.validate(1e-10).is_ok());
                Ok(())
            })
            .map_err(|e| e.to_string())
        },
        &mut c,
    );

    property(
        "digit round-trips",
        |r| {
            r.run(&(prop::collection::vec(2usize..=7, 1..=5), any::<u64>()), |(dims, seed)| {
                let dv = DimensionVector::new(dims).unwrap();
                let flat = (seed % dv.total() as u64) as usize;
                let d = index_to_digits(flat, &dv).unwrap();
                prop_assert_eq!(digits_to_index(&d.digits, &dv).unwrap().flat, flat);
                Ok(())
            })
            .map_err(|e| e.to_string())
        },
        &mut c,
    );

    property(
        "QFT then inverse QFT is the identity",
        |r| {
            r.run(&(arb_dims(), any::<u64>()), |(dims, seed)| {
                let dv = DimensionVector::new(dims).unwrap();
                let psi = random_state(&dv, seed);
                let mut s = psi.clone();
                s.apply_circuit(&synthesize_qft(&dv)).unwrap();
                s.apply_circuit(&synthesize_inverse_qft(&dv)).unwrap();
                prop_assert!((s.inner(&psi).unwrap().norm() - 1.0).abs() < 1e-10);
                Ok(())
            })
            .map_err(|e| e.to_string())
        },
        &mut c,
    );

    property(
        "dephasing keeps states positive",
        |r| {
            r.run(&(arb_dims(), any::<u64>()), |(dims, seed)| {
                let dv = DimensionVector::new(dims).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let lambdas = (0..dv.len()).map(|_| rng.random_range(0.0..=1.0)).collect();
                let rho = random_mixed(&dv, seed ^ 3);
                let out = dephase(&rho, &DephasingSpec::new(lambdas).unwrap()).unwrap();
                prop_assert!(out.validate(1e-10).is_ok());
                prop_assert!(out.purity() <= rho.purity() + 1e-12);
                Ok(())
            })
            .map_err(|e| e.to_string())
        },
        &mut c,
    );

    property(
        "sign reversal cancels the sensing phase",
        |r| {
            let spin = prop_oneof![Just(SpinState::Up), Just(SpinState::Down)];
            let strat = (1e3..50e3f64, 1e3..50e3f64, 1e-6..1e-4f64, spin.clone(), spin, any::<bool>());
            r.run(&strat, |(a1, a2, tau, s1, s2, single)| {
                let cfg = TargetSpinConfig {
                    couplings_hz: vec![a1, a2],
                    initial: vec![s1, s2],
                    ..TargetSpinConfig::default()
                };
                let ledger = if single { LedgerWeight::Single } else { LedgerWeight::Double };
                let mut step = sensing_step(&cfg, tau, ledger, 1.0).unwrap();
                step.extend(&sensing_step(&cfg, tau, ledger, -1.0).unwrap()).unwrap();
                let u = circuit_unitary(&step).unwrap();
                let id = DMatrix::<Complex>::identity(16, 16);
                prop_assert!(frobenius(&u, &id) < 1e-10);
                let run = CorrelationRun {
                    tau: Some(tau),
                    tc_points: 2,
                    evolve: [false, false],
                    ledger,
                    ..CorrelationRun::default()
                };
                let res = simulate_correlation_spectroscopy(&cfg, &run, 0).unwrap();
                prop_assert!(res.p_mem1.iter().chain(&res.p_mem2).all(|p| p.abs() < 1e-10));
                Ok(())
            })
            .map_err(|e| e.to_string())
        },
        &mut c,
    );

    c.finish(t0, Some(Duration::from_secs(60)))
}

type Criterion = fn() -> Result<String, String>;

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, Criterion); 8] = [
        ("QFT synthesis", criterion_1),
        ("phase digitization", criterion_2),
        ("Fisher information", criterion_3),
        ("Cramer-Rao bound and dynamic range", criterion_4),
        ("AC-field estimation", criterion_5),
        ("correlation spectroscopy", criterion_6),
        ("purity study", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS ({name}; {detail})", i + 1),
            Err(why) => {
                println!("criterion {}: FAIL ({name}; {why})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
