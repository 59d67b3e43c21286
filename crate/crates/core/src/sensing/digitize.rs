//! Phase-ladder states and the two phase-to-population readouts: local
//! Hadamard/Chrestenson gates versus the inverse QFT.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::circuit::{synthesize_inverse_qft, Circuit};
use crate::error::{Error, Result};
use crate::gates::GateOp;
use crate::par;
use crate::register::{DigitReversal, DimensionVector};
use crate::state::PureState;
use crate::Complex;

/// Phase-to-population mapping applied before measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mapping {
    /// Inverse QFT on the whole register.
    Qft,
    /// `H` (qubits) or `C'` (qudits) on each qudit independently.
    LocalH,
}

impl Mapping {
    pub const ALL: [Mapping; 2] = [Mapping::Qft, Mapping::LocalH];

    pub fn name(self) -> &'static str {
        match self {
            Mapping::Qft => "qft",
            Mapping::LocalH => "local_h",
        }
    }

    pub fn circuit(self, dims: &DimensionVector) -> Circuit {
        match self {
            Mapping::Qft => synthesize_inverse_qft(dims),
            Mapping::LocalH => local_hadamard_circuit(dims),
        }
    }
}

impl std::fmt::Display for Mapping {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mapping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qft" => Ok(Mapping::Qft),
            "local_h" => Ok(Mapping::LocalH),
            other => Err(Error::argument(format!("unknown mapping '{other}'"))),
        }
    }
}

/// Phase ladder `sum_k exp(i phi k) |k> / sqrt(N)` over flat labels `k`.
///
/// Qudit `l` carries the relative phase `phi * stride_l` per unit of its digit,
/// so `{3,2,2}` gives `|4phi, 8phi> (x) |2phi> (x) |phi>` with the qutrit first.
pub fn prepare_phase_state(dims: &DimensionVector, phi: f64) -> PureState {
    let n = dims.total();
    let norm = 1.0 / (n as f64).sqrt();
    let amps = DVector::from_fn(n, |k, _| {
        // reduce phi*k mod 2pi through the integer part to limit error growth
        Complex::cis(phase_mod(phi, k)) * norm
    });
    PureState::new(dims.clone(), amps).expect("phase ladder is normalized by construction")
}

fn phase_mod(phi: f64, k: usize) -> f64 {
    (phi * k as f64).rem_euclid(2.0 * PI)
}

/// `C'` (or `H`) on every qudit.
pub fn local_hadamard_circuit(dims: &DimensionVector) -> Circuit {
    let ops = (0..dims.len())
        .map(|q| {
            if dims.dim(q) == 2 {
                GateOp::hadamard(q)
            } else {
                GateOp::chrestenson_dag(q)
            }
        })
        .collect();
    Circuit::from_ops(dims.clone(), ops).expect("local gates are valid for their own register")
}

/// Outcome distribution after `mapping`, labeled by value (qudit 1 least
/// significant) so that the inverse QFT reads `phi = 2 pi k / N` as `k`.
pub fn readout(state: &PureState, mapping: Mapping) -> Result<Vec<f64>> {
    let mut s = state.clone();
    s.apply_circuit(&mapping.circuit(state.dims()))?;
    Ok(DigitReversal::new(state.dims()).relabel(&s.distribution()))
}

pub fn readout_qft(state: &PureState) -> Result<Vec<f64>> {
    readout(state, Mapping::Qft)
}

pub fn readout_local_hadamard(state: &PureState) -> Result<Vec<f64>> {
    readout(state, Mapping::LocalH)
}

/// `points` uniformly spaced phases on `[0, 2 pi)`.
pub fn uniform_phases(points: usize) -> Vec<f64> {
    (0..points).map(|i| 2.0 * PI * i as f64 / points as f64).collect()
}

/// Readout distribution for every phase of a sweep (rows follow `phis`).
pub fn phase_sweep(dims: &DimensionVector, phis: &[f64], mapping: Mapping) -> Result<Vec<Vec<f64>>> {
    let circuit = mapping.circuit(dims);
    let rev = DigitReversal::new(dims);
    par::map(phis, |&phi| {
        let mut s = prepare_phase_state(dims, phi);
        s.apply_circuit(&circuit)?;
        Ok(rev.relabel(&s.distribution()))
    })
    .into_iter()
    .collect()
}

/// Largest single-outcome probability and its label.
pub fn max_outcome(dist: &[f64]) -> (usize, f64) {
    dist.iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, p)| if p > best.1 { (k, p) } else { best })
}

/// Largest mass on two cyclically adjacent outcomes, with the lower label.
pub fn top_adjacent_pair(dist: &[f64]) -> (usize, f64) {
    let n = dist.len();
    if n == 1 {
        return (0, dist[0]);
    }
    (0..n)
        .map(|k| (k, dist[k] + dist[(k + 1) % n]))
        .fold((0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

/// Number of outcomes with probability above `threshold`.
pub fn support_size(dist: &[f64], threshold: f64) -> usize {
    dist.iter().filter(|&&p| p > threshold).count()
}

/// One memory qubit reading a target flip: `H`, phase `2 pi A tau` if the
/// target flipped, `H`, then the probability of `|1>`, i.e. `sin^2(dphi / 2)`.
pub fn single_memory_protocol(a_zz_hz: f64, tau_s: f64, flip_target: bool) -> Result<f64> {
    if !(tau_s > 0.0) || !tau_s.is_finite() {
        return Err(Error::argument(format!("tau must be positive, got {tau_s}")));
    }
    if !a_zz_hz.is_finite() {
        return Err(Error::argument("coupling must be finite"));
    }
    let dims = DimensionVector::qubits(1)?;
    let dphi = if flip_target { 2.0 * PI * a_zz_hz * tau_s } else { 0.0 };
    let mut s = PureState::basis(dims, 0)?;
    s.apply(&GateOp::hadamard(0))?;
    s.apply(&GateOp::phase(0, dphi))?;
    s.apply(&GateOp::hadamard(0))?;
    Ok(s.distribution()[1])
}

/// Result of the two-memory phase estimation example.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoMemoryOutcome {
    /// Most likely outcome, MSB first.
    pub bits: String,
    pub probability: f64,
    /// Probabilities of `00, 01, 10, 11` (MSB first).
    pub distribution: [f64; 4],
}

/// Two memory qubits: the LSB acquires `2 phi`, the MSB `phi`; then `H` on the
/// LSB, a `-pi/2` phase on the MSB controlled by the LSB, and `H` on the MSB.
///
/// `0, pi/2, pi, 3pi/2` read out as `00, 01, 10, 11`; `2 pi` wraps to `00`.
pub fn two_memory_qpea_example(phi: f64) -> TwoMemoryOutcome {
    // qudit 0 = LSB (weight 2), qudit 1 = MSB (weight 1)
    let dims = DimensionVector::qubits(2).expect("two qubits");
    let mut s = prepare_phase_state(&dims, phi);
    let ops = [
        GateOp::hadamard(0),
        GateOp::controlled_phase(0, 1, -PI / 2.0),
        GateOp::hadamard(1),
    ];
    for op in &ops {
        s.apply(op).expect("valid two-qubit gates");
    }
    let flat = s.distribution();
    // flat index = 2*lsb + msb; reorder to MSB-first labels
    let distribution = [flat[0], flat[2], flat[1], flat[3]];
    let (k, probability) = max_outcome(&distribution);
    TwoMemoryOutcome {
        bits: format!("{:02b}", k),
        probability,
        distribution,
    }
}
