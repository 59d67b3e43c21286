//! Quantum and classical Fisher information, Cramér-Rao precision and dynamic
//! range for the SQL, QPEA (+ inverse QFT) and NOON strategies.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::circuit::synthesize_inverse_qft;
use crate::error::{Error, Result};
use crate::gates::GateOp;
use crate::par;
use crate::register::{DigitReversal, DimensionVector, DEFAULT_TOLERANCE};
use crate::sensing::digitize::{prepare_phase_state, uniform_phases};
use crate::state::PureState;
use crate::Complex;

/// Planck constant in J s.
pub const PLANCK_SI: f64 = 6.626_070_15e-34;

/// Default central-difference step (radians).
pub const DEFAULT_STEP: f64 = 1e-5;

/// Default number of points of the `[0, 2 pi)` phase grid.
pub const DEFAULT_GRID_POINTS: usize = 720;

/// Probabilities below this use the removable-singularity limit in the CFI.
pub const CFI_PROBABILITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// `n` independent qubits, `(|0> + e^{i phi}|1>)/sqrt 2` each.
    Sql,
    /// Phase ladder: qubit `j` carries `2^j phi`, read out with the inverse QFT.
    Qpea,
    /// `(|0..0> + e^{i (2^n - 1) phi}|1..1>)/sqrt 2`.
    Noon,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Sql, Strategy::Qpea, Strategy::Noon];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Sql => "sql",
            Strategy::Qpea => "qpea",
            Strategy::Noon => "noon",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sql" => Ok(Strategy::Sql),
            "qpea" => Ok(Strategy::Qpea),
            "noon" => Ok(Strategy::Noon),
            other => Err(Error::argument(format!("unknown strategy '{other}'"))),
        }
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::argument("strategy needs at least one qubit"));
    }
    if n > 12 {
        return Err(Error::argument(format!("{n} qubits exceed the dense simulation range")));
    }
    Ok(())
}

/// Final probe state of `strategy` on `n` qubits after acquiring `phi`.
pub fn strategy_state(strategy: Strategy, n: usize, phi: f64) -> Result<PureState> {
    check_qubits(n)?;
    let dims = DimensionVector::qubits(n)?;
    let total = dims.total();
    let state = match strategy {
        Strategy::Qpea => prepare_phase_state(&dims, phi),
        Strategy::Sql => {
            // phase accumulates once per excited qubit
            let norm = (total as f64).sqrt().recip();
            let amps = DVector::from_fn(total, |k, _| Complex::cis(phi * k.count_ones() as f64) * norm);
            PureState::new(dims, amps)?
        }
        Strategy::Noon => {
            let mut amps = DVector::zeros(total);
            let m = ((1u64 << n) - 1) as f64;
            amps[0] = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            amps[total - 1] = Complex::cis(phi * m) * std::f64::consts::FRAC_1_SQRT_2;
            PureState::new(dims, amps)?
        }
    };
    Ok(state)
}

/// Closed-form quantum Fisher information.
pub fn qfi_analytic(strategy: Strategy, n: usize) -> f64 {
    let n = n as i32;
    match strategy {
        Strategy::Sql => n as f64,
        Strategy::Qpea => (4f64.powi(n) - 1.0) / 3.0,
        Strategy::Noon => (2f64.powi(n) - 1.0).powi(2),
    }
}

/// QFI of a phase ladder over an arbitrary register:
/// `4 sum_l stride_l^2 (d_l^2 - 1) / 12`, equal to `(N^2 - 1) / 3`.
pub fn qfi_ladder_analytic(dims: &DimensionVector) -> f64 {
    (0..dims.len())
        .map(|l| {
            let w = dims.stride(l) as f64;
            let d = dims.dim(l) as f64;
            w * w * (d * d - 1.0) / 3.0
        })
        .sum()
}

/// Pure-state QFI `4 (<dpsi|dpsi> - |<dpsi|psi>|^2)` with a central-difference
/// derivative of step `h_step`.
pub fn qfi_pure<F>(state_fn: F, phi: f64, h_step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<PureState>,
{
    if !(h_step > 0.0) || !h_step.is_finite() {
        return Err(Error::argument(format!("step must be positive, got {h_step}")));
    }
    let centre = state_fn(phi)?;
    let plus = state_fn(phi + h_step)?;
    let minus = state_fn(phi - h_step)?;
    for s in [&centre, &plus, &minus] {
        let norm = s.norm();
        if (norm - 1.0).abs() > DEFAULT_TOLERANCE {
            return Err(Error::invariant(format!("state norm {norm} != 1")));
        }
    }
    if plus.dims() != centre.dims() || minus.dims() != centre.dims() {
        return Err(Error::shape("state function changed register"));
    }
    let dpsi = (plus.amplitudes() - minus.amplitudes()) / Complex::new(2.0 * h_step, 0.0);
    let psi = centre.amplitudes();
    let overlap = dpsi.dotc(psi);
    Ok(4.0 * (dpsi.norm_squared() - overlap.norm_sqr()))
}

/// Numeric QFI of a strategy state.
pub fn qfi_strategy(strategy: Strategy, n: usize, phi: f64, h_step: f64) -> Result<f64> {
    qfi_pure(|p| strategy_state(strategy, n, p), phi, h_step)
}

/// Classical Fisher information on a grid.
///
/// The derivative is a central difference of step `step` around each grid
/// point. At a zero of an outcome probability (`p < CFI_PROBABILITY_FLOOR`
/// and no larger than its neighbours at `+-step`) the term `(dp)^2 / p` is
/// replaced by its limit `2 p''`, since a smooth non-negative `p` has `dp = 0`
/// wherever `p = 0`. Elsewhere `p` is floored at `CFI_PROBABILITY_FLOOR`. The second difference uses step `2 step`,
/// which gives a single tone the same truncation factor as the squared first
/// difference.
pub fn cfi_with_step<F>(prob_fn: F, phi_grid: &[f64], step: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync + Send,
{
    if phi_grid.len() < 3 {
        return Err(Error::argument(format!(
            "CFI grid needs at least 3 points, got {}",
            phi_grid.len()
        )));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::argument(format!("step must be positive, got {step}")));
    }
    par::try_map_range(phi_grid.len(), |i| {
        let phi = phi_grid[i];
        let p0 = prob_fn(phi)?;
        let pp = prob_fn(phi + step)?;
        let pm = prob_fn(phi - step)?;
        if pp.len() != p0.len() || pm.len() != p0.len() {
            return Err(Error::shape("probability function changed outcome count"));
        }
        // an outcome at a zero of p: below the floor and a local minimum within +-step
        let at_zero = |k: usize| p0[k] < CFI_PROBABILITY_FLOOR && p0[k] <= pp[k] && p0[k] <= pm[k];
        let far = if (0..p0.len()).any(at_zero) {
            Some((prob_fn(phi + 2.0 * step)?, prob_fn(phi - 2.0 * step)?))
        } else {
            None
        };
        let mut f = 0.0;
        for k in 0..p0.len() {
            let p = p0[k];
            match &far {
                Some((pp2, pm2)) if at_zero(k) => {
                    let second = (pp2[k] - 2.0 * p + pm2[k]) / (4.0 * step * step);
                    f += 2.0 * second.max(0.0);
                }
                _ => {
                    let dp = (pp[k] - pm[k]) / (2.0 * step);
                    f += dp * dp / p.max(CFI_PROBABILITY_FLOOR);
                }
            }
        }
        Ok(f)
    })
}

pub fn cfi<F>(prob_fn: F, phi_grid: &[f64]) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync + Send,
{
    cfi_with_step(prob_fn, phi_grid, DEFAULT_STEP)
}

/// Readout distribution of each strategy's canonical measurement: x basis on
/// every SQL qubit, inverse QFT for QPEA, and the `(|0..0> +- |1..1>)/sqrt 2`
/// pair for NOON.
pub fn strategy_distribution(strategy: Strategy, n: usize, phi: f64) -> Result<Vec<f64>> {
    let state = strategy_state(strategy, n, phi)?;
    match strategy {
        Strategy::Sql => {
            let mut s = state;
            for q in 0..n {
                s.apply(&GateOp::hadamard(q))?;
            }
            Ok(s.distribution())
        }
        Strategy::Qpea => {
            let dims = state.dims().clone();
            let mut s = state;
            s.apply_circuit(&synthesize_inverse_qft(&dims))?;
            Ok(DigitReversal::new(&dims).relabel(&s.distribution()))
        }
        Strategy::Noon => {
            let a = state.amplitudes();
            let (a0, a1) = (a[0], a[a.len() - 1]);
            let half = 0.5;
            Ok(vec![(a0 + a1).norm_sqr() * half, (a0 - a1).norm_sqr() * half])
        }
    }
}

/// Fisher information summary of one strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherResult {
    pub strategy: Strategy,
    pub n: usize,
    pub qfi: f64,
    pub phi_grid: Vec<f64>,
    pub cfi_curve: Vec<f64>,
    pub cfi_mean: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherOptions {
    pub grid_points: usize,
    /// Central-difference step of the CFI.
    pub step: f64,
    /// Central-difference step of the QFI. Both differences underestimate,
    /// so the QFI uses a finer step than the CFI it bounds.
    pub qfi_step: f64,
    /// Phase at which the QFI is evaluated.
    pub qfi_phi: f64,
}

impl Default for FisherOptions {
    fn default() -> Self {
        FisherOptions {
            grid_points: DEFAULT_GRID_POINTS,
            step: DEFAULT_STEP,
            qfi_step: 1e-6,
            qfi_phi: 0.3,
        }
    }
}

pub fn fisher_analysis(strategy: Strategy, n: usize, opts: &FisherOptions) -> Result<FisherResult> {
    check_qubits(n)?;
    let grid = uniform_phases(opts.grid_points);
    let qfi = qfi_strategy(strategy, n, opts.qfi_phi, opts.qfi_step)?;
    let curve = cfi_with_step(|p| strategy_distribution(strategy, n, p), &grid, opts.step)?;
    let cfi_mean = curve.iter().sum::<f64>() / curve.len() as f64;
    Ok(FisherResult {
        strategy,
        n,
        qfi,
        phi_grid: grid,
        cfi_curve: curve,
        cfi_mean,
    })
}

/// Unit system for the Planck constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// `h = 1`.
    #[default]
    Natural,
    /// `h = 6.62607015e-34 J s`.
    Si,
}

impl Units {
    pub fn planck(self) -> f64 {
        match self {
            Units::Natural => 1.0,
            Units::Si => PLANCK_SI,
        }
    }
}

/// Parameters of an estimate of `alpha` through the phase `phi = dE(alpha) tau / h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensingParams {
    /// `dE / d alpha`.
    pub de_dalpha: f64,
    /// Interrogation time (s).
    pub tau: f64,
    /// Number of repeated measurements `N_m`.
    pub measurements: u64,
    /// Qubit count.
    pub n: usize,
    #[serde(default)]
    pub units: Units,
}

impl SensingParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::argument(format!("tau must be positive, got {}", self.tau)));
        }
        if self.measurements == 0 {
            return Err(Error::argument("measurement count must be at least 1"));
        }
        if self.n == 0 {
            return Err(Error::argument("qubit count must be at least 1"));
        }
        if self.de_dalpha == 0.0 || !self.de_dalpha.is_finite() {
            return Err(Error::argument("dE/dalpha must be finite and nonzero"));
        }
        Ok(())
    }

    fn planck(&self) -> f64 {
        self.units.planck()
    }
}

/// Cramér-Rao precision `delta alpha`:
///
/// ```text
/// SQL   h / (sqrt(N_m) tau dE)
/// QPEA  h sqrt(3 / (N_m (4^n - 1))) / (tau dE)
/// NOON  h / (sqrt(N_m) (2^n - 1) tau dE)
/// ```
pub fn qcrb_precision(strategy: Strategy, p: &SensingParams) -> Result<f64> {
    p.validate()?;
    let h = p.planck();
    let nm = p.measurements as f64;
    let td = p.tau * p.de_dalpha.abs();
    let n = p.n as i32;
    Ok(match strategy {
        Strategy::Sql => h / (nm.sqrt() * td),
        Strategy::Qpea => h * (3.0 / (nm * (4f64.powi(n) - 1.0))).sqrt() / td,
        Strategy::Noon => h / (nm.sqrt() * (2f64.powi(n) - 1.0) * td),
    })
}

/// Dynamic range:
///
/// ```text
/// SQL   (pi / h) sqrt(N_m)
/// QPEA  (2 pi / (sqrt(3) h)) sqrt(N_m) sqrt(4^n - 1)
/// ```
///
/// NOON gains precision by `2^n - 1` but its unambiguous range shrinks by the
/// same factor, so its dynamic range equals the SQL value.
pub fn dynamic_range(strategy: Strategy, p: &SensingParams) -> Result<f64> {
    p.validate()?;
    let h = p.planck();
    let nm = (p.measurements as f64).sqrt();
    Ok(match strategy {
        Strategy::Sql | Strategy::Noon => PI / h * nm,
        Strategy::Qpea => 2.0 * PI / (3f64.sqrt() * h) * nm * (4f64.powi(p.n as i32) - 1.0).sqrt(),
    })
}

/// `DR_QPEA / DR_SQL` with the `2^n` level count replaced by the register
/// dimension `N`: `(2 / sqrt 3) sqrt(N^2 - 1)`.
pub fn dynamic_range_gain(dims: &DimensionVector) -> f64 {
    let n = dims.total() as f64;
    2.0 / 3f64.sqrt() * (n * n - 1.0).sqrt()
}

/// Chain rule `F_alpha = F_phi (tau dE / h)^2`.
pub fn fisher_alpha(f_phi: f64, p: &SensingParams) -> Result<f64> {
    p.validate()?;
    Ok(f_phi * (p.tau * p.de_dalpha / p.planck()).powi(2))
}
