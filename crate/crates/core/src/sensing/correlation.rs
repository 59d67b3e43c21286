//! Two-target correlation spectroscopy with two memory qubits.
//!
//! Register layout `{2,2,2,2}`: memory 1 (the LSQ, weight 2), memory 2 (the
//! MSQ, weight 1), target 1, target 2. Target digit 0 is spin up
//! (`I = +1/2`). The sensor is abstracted into ideal controlled-phase writes:
//! one sensing step multiplies the memory ladder state by
//! `exp(i s theta k)` with `k = 2 j_LSQ + j_MSQ` and
//!
//! ```text
//! theta = kappa * 2 pi * tau * sum_i A_i I_i
//! ```
//!
//! where `s = +1` for the first step and `-1` for the second. Between the
//! steps the memories are mapped to populations (inverse QFT), the targets
//! undergo a Ramsey sequence of length `T_c`, and the memories are mapped back.
//! After the final inverse QFT, memory 1 flips when target 1 flipped and
//! memory 2 when target 2 flipped.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::circuit::{synthesize_inverse_qft, synthesize_qft, Circuit};
use crate::error::{Error, Result};
use crate::gates::GateOp;
use crate::noise::{dephase, DephasingSpec};
use crate::par;
use crate::register::DimensionVector;
use crate::sensing::spectrum::{periodogram, Spectrum};
use crate::state::{MixedState, PureState};
use crate::Complex;

const MEM_LSQ: usize = 0;
const MEM_MSQ: usize = 1;
const TARGET: [usize; 2] = [2, 3];

/// Target spin state before the first sensing step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinState {
    Up,
    Down,
    /// `(|up> + |down>) / sqrt 2`.
    Superposition,
}

impl SpinState {
    /// `I_z` eigenvalue for the basis states.
    pub fn spin(self) -> Option<f64> {
        match self {
            SpinState::Up => Some(0.5),
            SpinState::Down => Some(-0.5),
            SpinState::Superposition => None,
        }
    }
}

/// Target spins seen by the sensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpinConfig {
    /// `A_zz` per target (Hz), target 1 first.
    pub couplings_hz: Vec<f64>,
    #[serde(default = "default_initial")]
    pub initial: Vec<SpinState>,
    /// Drive detuning of the target Ramsey sequence (Hz).
    #[serde(default = "default_detuning")]
    pub detuning_hz: f64,
}

fn default_initial() -> Vec<SpinState> {
    vec![SpinState::Up, SpinState::Up]
}

fn default_detuning() -> f64 {
    2.5e3
}

impl Default for TargetSpinConfig {
    fn default() -> Self {
        TargetSpinConfig {
            couplings_hz: vec![6.0e3, 12.4e3],
            initial: default_initial(),
            detuning_hz: default_detuning(),
        }
    }
}

impl TargetSpinConfig {
    pub fn validate(&self) -> Result<()> {
        if self.couplings_hz.len() != 2 {
            return Err(Error::argument(format!(
                "correlation spectroscopy needs two targets, got {} couplings",
                self.couplings_hz.len()
            )));
        }
        if self.initial.len() != 2 {
            return Err(Error::argument("one initial state per target is required"));
        }
        if self.couplings_hz.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::argument("couplings must be positive"));
        }
        if !self.detuning_hz.is_finite() {
            return Err(Error::argument("detuning must be finite"));
        }
        Ok(())
    }

    /// Ramsey frequency of each target in the frame of the target drive:
    /// `(A_i - A_1) - detuning`.
    pub fn ramsey_frequencies(&self) -> Vec<f64> {
        let a1 = self.couplings_hz[0];
        self.couplings_hz.iter().map(|a| (a - a1) - self.detuning_hz).collect()
    }

    /// `1 / (4 A_max)`.
    pub fn default_tau(&self) -> f64 {
        let a = self.couplings_hz.iter().cloned().fold(0.0, f64::max);
        1.0 / (4.0 * a)
    }
}

/// Weight `kappa` of the single-step phase ledger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LedgerWeight {
    /// `kappa = 2`: the MSQ acquires `4 tau A I` per step (in units of `2 pi`).
    #[default]
    Double,
    /// `kappa = 1`: the MSQ acquires `2 tau A I` per step.
    Single,
}

impl LedgerWeight {
    pub fn kappa(self) -> f64 {
        match self {
            LedgerWeight::Double => 2.0,
            LedgerWeight::Single => 1.0,
        }
    }
}

/// Sweep and readout settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorrelationRun {
    /// Sensing time per step (s); `None` uses `1 / (4 A_max)`.
    pub tau: Option<f64>,
    pub tc_start: f64,
    pub tc_step: f64,
    pub tc_points: usize,
    /// Target coherence time (s); `None` disables the decay.
    pub t2_star: Option<f64>,
    /// Which targets undergo the Ramsey sequence during `T_c`.
    pub evolve: [bool; 2],
    pub ledger: LedgerWeight,
    /// Per-memory readout fidelity, applied as a symmetric confusion matrix.
    pub readout_fidelities: Option<[f64; 2]>,
    /// Finite-shot sampling of each point; `None` gives exact probabilities.
    pub shots: Option<u64>,
    /// Zero-pad the spectra to this many samples.
    pub pad_to: Option<usize>,
}

impl Default for CorrelationRun {
    fn default() -> Self {
        CorrelationRun {
            tau: None,
            tc_start: 0.0,
            tc_step: 15e-6,
            tc_points: 400,
            t2_star: Some(5e-3),
            evolve: [true, true],
            ledger: LedgerWeight::Double,
            readout_fidelities: None,
            shots: None,
            pad_to: None,
        }
    }
}

/// Readout fidelities of the two memories used by the experiment (LSQ, MSQ).
pub const MEMORY_FIDELITIES: [f64; 2] = [0.996, 0.969];

impl CorrelationRun {
    pub fn validate(&self) -> Result<()> {
        if let Some(tau) = self.tau {
            if !(tau > 0.0) || !tau.is_finite() {
                return Err(Error::argument(format!("tau must be positive, got {tau}")));
            }
        }
        if !(self.tc_step > 0.0) || !self.tc_step.is_finite() {
            return Err(Error::argument("tc_step must be positive"));
        }
        if !(self.tc_start >= 0.0) || !self.tc_start.is_finite() {
            return Err(Error::argument("tc_start must be non-negative"));
        }
        if self.tc_points < 2 {
            return Err(Error::argument("tc_points must be at least 2"));
        }
        if let Some(t2) = self.t2_star {
            if !(t2 > 0.0) {
                return Err(Error::argument("t2_star must be positive"));
            }
        }
        if let Some(f) = self.readout_fidelities {
            if f.iter().any(|x| !(0.5..=1.0).contains(x)) {
                return Err(Error::argument("readout fidelities must lie in [0.5, 1]"));
            }
        }
        if self.shots == Some(0) {
            return Err(Error::argument("shots must be at least 1"));
        }
        Ok(())
    }

    pub fn correlation_times(&self) -> Vec<f64> {
        (0..self.tc_points)
            .map(|i| self.tc_start + i as f64 * self.tc_step)
            .collect()
    }
}

/// Register phases `(LSQ, MSQ)` after one sensing step with targets in the
/// given `I_z` eigenstates.
pub fn first_step_phases(couplings_hz: &[f64], spins: &[f64], tau: f64, ledger: LedgerWeight) -> (f64, f64) {
    let field: f64 = couplings_hz.iter().zip(spins).map(|(a, i)| a * i).sum();
    let msq = ledger.kappa() * 2.0 * PI * tau * field;
    (2.0 * msq, msq)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub tau: f64,
    pub t_c: Vec<f64>,
    /// Flip probability of memory 1 (LSQ) per `T_c`.
    pub p_mem1: Vec<f64>,
    /// Flip probability of memory 2 (MSQ) per `T_c`.
    pub p_mem2: Vec<f64>,
    pub spectrum1: Spectrum,
    pub spectrum2: Spectrum,
}

impl CorrelationResult {
    pub fn peaks(&self) -> (Option<f64>, Option<f64>) {
        (self.spectrum1.peak(), self.spectrum2.peak())
    }

    pub fn linewidths(&self) -> (Option<f64>, Option<f64>) {
        (self.spectrum1.peak_width(), self.spectrum2.peak_width())
    }
}

fn register() -> DimensionVector {
    DimensionVector::qubits(4).expect("four qubits")
}

/// One sensing step with sign `sign` as controlled phases from the targets.
pub fn sensing_step(cfg: &TargetSpinConfig, tau: f64, ledger: LedgerWeight, sign: f64) -> Result<Circuit> {
    let dims = register();
    let base = sign * ledger.kappa() * 2.0 * PI * tau;
    let mut c = Circuit::new(dims);
    for (mem, weight) in [(MEM_LSQ, 2.0), (MEM_MSQ, 1.0)] {
        // I_i = 1/2 - t_i
        let offset: f64 = cfg.couplings_hz.iter().map(|a| a / 2.0).sum();
        c.push(GateOp::phase(mem, base * weight * offset))?;
        for (i, &a) in cfg.couplings_hz.iter().enumerate() {
            c.push(GateOp::controlled_phase(TARGET[i], mem, -base * weight * a))?;
        }
    }
    Ok(c)
}

fn rx(theta: f64) -> DMatrix<Complex> {
    let (s, c) = (theta / 2.0).sin_cos();
    DMatrix::from_row_slice(2, 2, &[Complex::new(c, 0.0), Complex::new(0.0, -s), Complex::new(0.0, -s), Complex::new(c, 0.0)])
}

fn memory_circuits() -> Result<(Circuit, Circuit)> {
    let mem = DimensionVector::qubits(2)?;
    let full = register();
    Ok((
        synthesize_qft(&mem).embed(&full, &[MEM_LSQ, MEM_MSQ])?,
        synthesize_inverse_qft(&mem).embed(&full, &[MEM_LSQ, MEM_MSQ])?,
    ))
}

/// Register state right after the first inverse QFT (independent of `T_c`).
fn after_first_step(cfg: &TargetSpinConfig, tau: f64, ledger: LedgerWeight) -> Result<MixedState> {
    let (qft, iqft) = memory_circuits()?;
    let mut s = PureState::basis(register(), 0)?;
    for (i, init) in cfg.initial.iter().enumerate() {
        match init {
            SpinState::Up => {}
            SpinState::Down => s.apply(&GateOp::custom(vec![TARGET[i]], rx(PI))?)?,
            SpinState::Superposition => s.apply(&GateOp::hadamard(TARGET[i]))?,
        }
    }
    s.apply_circuit(&qft)?;
    s.apply_circuit(&sensing_step(cfg, tau, ledger, 1.0)?)?;
    s.apply_circuit(&iqft)?;
    Ok(s.to_mixed())
}

/// Memory flip probabilities `(p_mem1, p_mem2)` at one correlation time.
fn memory_flips(
    start: &MixedState,
    cfg: &TargetSpinConfig,
    run: &CorrelationRun,
    t_c: f64,
    second: &Circuit,
) -> Result<(f64, f64)> {
    let mut rho = start.clone();
    let freqs = cfg.ramsey_frequencies();
    let half = GateOp::custom(vec![0], rx(PI / 2.0))?;
    let half_back = GateOp::custom(vec![0], rx(-PI / 2.0))?;
    for i in 0..2 {
        if !run.evolve[i] {
            continue;
        }
        let t = TARGET[i];
        rho.apply(&GateOp { targets: vec![t], ..half.clone() })?;
        rho.apply(&GateOp::phase(t, (2.0 * PI * freqs[i] * t_c).rem_euclid(2.0 * PI)))?;
        if let Some(t2) = run.t2_star {
            let mut lambdas = vec![0.0; 4];
            lambdas[t] = 1.0 - (-t_c / t2).exp();
            rho = dephase(&rho, &DephasingSpec::new(lambdas)?)?;
        }
        rho.apply(&GateOp { targets: vec![t], ..half_back.clone() })?;
    }
    rho.apply_circuit(second)?;
    let mem = rho.partial_trace(&[MEM_LSQ, MEM_MSQ])?;
    let d = mem.distribution();
    // memory flat index = 2 j_LSQ + j_MSQ
    Ok(((d[2] + d[3]).clamp(0.0, 1.0), (d[1] + d[3]).clamp(0.0, 1.0)))
}

/// Runs the `T_c` sweep and the per-memory spectra.
pub fn simulate_correlation_spectroscopy(
    cfg: &TargetSpinConfig,
    run: &CorrelationRun,
    seed: u64,
) -> Result<CorrelationResult> {
    cfg.validate()?;
    run.validate()?;
    let tau = run.tau.unwrap_or_else(|| cfg.default_tau());
    let start = after_first_step(cfg, tau, run.ledger)?;
    let (qft, iqft) = memory_circuits()?;
    let mut second = qft;
    second.extend(&sensing_step(cfg, tau, run.ledger, -1.0)?)?;
    second.extend(&iqft)?;

    let t_c = run.correlation_times();
    let flips = par::try_map_range(t_c.len(), |i| memory_flips(&start, cfg, run, t_c[i], &second))?;
    let mut p1: Vec<f64> = flips.iter().map(|f| f.0).collect();
    let mut p2: Vec<f64> = flips.iter().map(|f| f.1).collect();

    if let Some(fid) = run.readout_fidelities {
        for (series, f) in [(&mut p1, fid[0]), (&mut p2, fid[1])] {
            for p in series.iter_mut() {
                *p = f * *p + (1.0 - f) * (1.0 - *p);
            }
        }
    }
    if let Some(shots) = run.shots {
        for (m, series) in [&mut p1, &mut p2].into_iter().enumerate() {
            for (i, p) in series.iter_mut().enumerate() {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((2 * i + m) as u64);
                let k = Binomial::new(shots, *p)
                    .map_err(|e| Error::argument(e.to_string()))?
                    .sample(&mut rng);
                *p = k as f64 / shots as f64;
            }
        }
    }

    let spectrum1 = periodogram(&p1, run.tc_step, run.pad_to)?;
    let spectrum2 = periodogram(&p2, run.tc_step, run.pad_to)?;
    Ok(CorrelationResult {
        tau,
        t_c,
        p_mem1: p1,
        p_mem2: p2,
        spectrum1,
        spectrum2,
    })
}

/// Peak-to-peak variation of the non-designated memory when only one target
/// evolves: `(memory 2 with target 1 evolving, memory 1 with target 2 evolving)`.
pub fn crosstalk(cfg: &TargetSpinConfig, run: &CorrelationRun) -> Result<(f64, f64)> {
    let spread = |v: &[f64]| {
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        hi - lo
    };
    let exact = CorrelationRun {
        readout_fidelities: None,
        shots: None,
        ..run.clone()
    };
    let only1 = simulate_correlation_spectroscopy(cfg, &CorrelationRun { evolve: [true, false], ..exact.clone() }, 0)?;
    let only2 = simulate_correlation_spectroscopy(cfg, &CorrelationRun { evolve: [false, true], ..exact }, 0)?;
    Ok((spread(&only1.p_mem2), spread(&only2.p_mem1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal() -> TargetSpinConfig {
        TargetSpinConfig {
            couplings_hz: vec![6e3, 12e3],
            ..TargetSpinConfig::default()
        }
    }

    #[test]
    fn table_of_first_step_phases() {
        let a = [6e3, 12e3];
        let tau = 1.0 / (4.0 * 12e3);
        // (t2, t1) spin pairs as labeled in the table: 12 kHz target first
        let cases = [
            ((0.5, 0.5), (1.5 * PI, 0.75 * PI)),
            ((0.5, -0.5), (0.5 * PI, 0.25 * PI)),
            ((-0.5, 0.5), (-0.5 * PI, -0.25 * PI)),
            ((-0.5, -0.5), (-1.5 * PI, -0.75 * PI)),
        ];
        for ((i2, i1), (lsb, msb)) in cases {
            let (l, m) = first_step_phases(&a, &[i1, i2], tau, LedgerWeight::Double);
            assert!((l - lsb).abs() < 1e-12 && (m - msb).abs() < 1e-12, "{i2} {i1}");
        }
    }

    #[test]
    fn no_evolution_gives_no_signal() {
        let run = CorrelationRun {
            evolve: [false, false],
            tc_points: 16,
            ..CorrelationRun::default()
        };
        let r = simulate_correlation_spectroscopy(&TargetSpinConfig::default(), &run, 0).unwrap();
        assert!(r.p_mem1.iter().chain(&r.p_mem2).all(|&p| p.abs() < 1e-12));
    }

    #[test]
    fn ideal_pair_has_no_crosstalk() {
        let run = CorrelationRun {
            tc_points: 64,
            ..CorrelationRun::default()
        };
        let (x2, x1) = crosstalk(&ideal(), &run).unwrap();
        assert!(x2 < 1e-9 && x1 < 1e-9, "{x2} {x1}");
    }

    #[test]
    fn memory_one_follows_target_one() {
        let run = CorrelationRun {
            evolve: [true, false],
            t2_star: None,
            tc_points: 40,
            ..CorrelationRun::default()
        };
        let cfg = ideal();
        let r = simulate_correlation_spectroscopy(&cfg, &run, 0).unwrap();
        let f = cfg.ramsey_frequencies()[0];
        for (t, p) in r.t_c.iter().zip(&r.p_mem1) {
            let oracle = (1.0 - (2.0 * PI * f * t).cos()) / 2.0;
            assert!((p - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_tau() {
        let run = CorrelationRun {
            tau: Some(-1e-6),
            ..CorrelationRun::default()
        };
        assert!(simulate_correlation_spectroscopy(&TargetSpinConfig::default(), &run, 0).is_err());
        let cfg = TargetSpinConfig {
            couplings_hz: vec![6e3],
            ..TargetSpinConfig::default()
        };
        assert!(simulate_correlation_spectroscopy(&cfg, &CorrelationRun::default(), 0).is_err());
    }

    #[test]
    fn readout_confusion_and_shots() {
        let run = CorrelationRun {
            tc_points: 32,
            readout_fidelities: Some(MEMORY_FIDELITIES),
            shots: Some(500),
            ..CorrelationRun::default()
        };
        let cfg = TargetSpinConfig::default();
        let a = simulate_correlation_spectroscopy(&cfg, &run, 9).unwrap();
        let b = simulate_correlation_spectroscopy(&cfg, &run, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.p_mem1.iter().all(|p| (0.0..=1.0).contains(p)));
    }
}
