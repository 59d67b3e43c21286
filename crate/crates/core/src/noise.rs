//! Computational-basis dephasing and the purity comparison between the inverse
//! QFT and local Hadamard phase-to-population mappings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::register::DimensionVector;
use crate::sensing::digitize::{prepare_phase_state, uniform_phases, Mapping};
use crate::state::MixedState;

/// Default phase grid of the purity study.
pub const DEFAULT_PURITY_GRID: usize = 256;

/// Per-qudit dephasing strength; `1` removes every coherence between basis
/// states that differ on that qudit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DephasingSpec {
    lambdas: Vec<f64>,
}

impl DephasingSpec {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if let Some(l) = lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(Error::argument(format!("dephasing strength {l} outside [0, 1]")));
        }
        Ok(DephasingSpec { lambdas })
    }

    pub fn uniform(qudits: usize, lambda: f64) -> Result<Self> {
        Self::new(vec![lambda; qudits])
    }

    /// `lambda = 1` on every qudit.
    pub fn full(qudits: usize) -> Self {
        DephasingSpec {
            lambdas: vec![1.0; qudits],
        }
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }
}

impl TryFrom<Vec<f64>> for DephasingSpec {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        DephasingSpec::new(v)
    }
}

impl From<DephasingSpec> for Vec<f64> {
    fn from(s: DephasingSpec) -> Self {
        s.lambdas
    }
}

/// Multiplies `rho[r, c]` by `prod (1 - lambda_i)` over the qudits `i` on which
/// `r` and `c` differ.
pub fn dephase(state: &MixedState, spec: &DephasingSpec) -> Result<MixedState> {
    let dims = state.dims();
    if spec.lambdas.len() != dims.len() {
        return Err(Error::shape(format!(
            "{} dephasing strengths for a {}-qudit register",
            spec.lambdas.len(),
            dims.len()
        )));
    }
    let n = dims.total();
    let digits: Vec<Vec<usize>> = (0..n).map(|f| (0..dims.len()).map(|q| dims.digit(f, q)).collect()).collect();
    let keep: Vec<f64> = spec.lambdas.iter().map(|l| 1.0 - l).collect();
    let mut rho = state.rho().clone();
    for c in 0..n {
        for r in 0..n {
            if r == c {
                continue;
            }
            let factor: f64 = (0..dims.len())
                .filter(|&q| digits[r][q] != digits[c][q])
                .map(|q| keep[q])
                .product();
            rho[(r, c)] *= factor;
        }
    }
    Ok(MixedState::from_parts(dims.clone(), rho))
}

/// Mean purity over a phase grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PurityResult {
    pub n: usize,
    pub mapping: Mapping,
    pub phis: Vec<f64>,
    pub purities: Vec<f64>,
    pub mean: f64,
    /// Standard error of the mean over the grid.
    pub std_err: f64,
}

/// For each phase: prepare the `n`-qubit phase ladder, apply `mapping`, fully
/// dephase every qubit and record `Tr(rho^2)`.
pub fn purity_study(n_qubits: usize, phis: &[f64], mapping: Mapping) -> Result<PurityResult> {
    if n_qubits == 0 {
        return Err(Error::argument("purity study needs at least one qubit"));
    }
    if phis.is_empty() {
        return Err(Error::argument("purity study needs at least one phase"));
    }
    let dims = DimensionVector::qubits(n_qubits)?;
    let circuit = mapping.circuit(&dims);
    let spec = DephasingSpec::full(n_qubits);
    let purities = par::try_map_range(phis.len(), |i| {
        let mut rho = prepare_phase_state(&dims, phis[i]).to_mixed();
        rho.apply_circuit(&circuit)?;
        Ok(dephase(&rho, &spec)?.purity())
    })?;
    let m = purities.len() as f64;
    let mean = purities.iter().sum::<f64>() / m;
    let std_err = if purities.len() > 1 {
        let var = purities.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (m - 1.0);
        (var / m).sqrt()
    } else {
        0.0
    };
    Ok(PurityResult {
        n: n_qubits,
        mapping,
        phis: phis.to_vec(),
        purities,
        mean,
        std_err,
    })
}

/// [`purity_study`] on the default 256-point grid.
pub fn purity_study_default(n_qubits: usize, mapping: Mapping) -> Result<PurityResult> {
    purity_study(n_qubits, &uniform_phases(DEFAULT_PURITY_GRID), mapping)
}
