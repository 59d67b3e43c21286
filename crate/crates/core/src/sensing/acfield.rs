//! QFT-based estimation of an AC-field phase: qudit `l` picks up the field
//! phase times its radix weight, the inverse QFT turns the phase ladder into a
//! register population, and repeated shots give the estimate.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{circuit_unitary, synthesize_inverse_qft, Circuit};
use crate::error::{Error, Result};
use crate::gates::GateOp;
use crate::metrology::{qfi_ladder_analytic, Strategy};
use crate::par;
use crate::register::{DigitReversal, DimensionVector};
use crate::state::{sample_counts, PureState};
use crate::Complex;

/// Preparation and phase acquisition: a Chrestenson (Hadamard) gate on every
/// qudit followed by a phase `phi * stride_l` on qudit `l`.
pub fn acquisition_circuit(dims: &DimensionVector, phi_field: f64) -> Circuit {
    let mut ops = Vec::with_capacity(2 * dims.len());
    for q in 0..dims.len() {
        ops.push(if dims.dim(q) == 2 {
            GateOp::hadamard(q)
        } else {
            GateOp::chrestenson(q)
        });
    }
    for q in 0..dims.len() {
        let weight = dims.stride(q) as f64;
        ops.push(GateOp::phase(q, (phi_field * weight).rem_euclid(2.0 * PI)));
    }
    Circuit::from_ops(dims.clone(), ops).expect("gates built from the register are valid")
}

/// Value-labeled outcome distribution for one field phase.
pub fn ac_field_distribution(dims: &DimensionVector, phi_field: f64) -> Result<Vec<f64>> {
    let mut s = PureState::basis(dims.clone(), 0)?;
    s.apply_circuit(&acquisition_circuit(dims, phi_field))?;
    s.apply_circuit(&synthesize_inverse_qft(dims))?;
    Ok(DigitReversal::new(dims).relabel(&s.distribution()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcFieldEstimate {
    pub phi_field: f64,
    /// Exact outcome distribution (value labels).
    pub distribution: Vec<f64>,
    pub counts: Vec<u64>,
    /// Most frequent outcome, the maximum-likelihood register value.
    pub outcome: usize,
    /// `2 pi outcome / N`.
    pub estimate: f64,
}

/// Simulates `shots` single-shot readouts and returns the most likely
/// register value as the phase estimate.
pub fn simulate_ac_field_estimation(
    phi_field: f64,
    dims: &DimensionVector,
    shots: u64,
    seed: u64,
) -> Result<AcFieldEstimate> {
    let distribution = ac_field_distribution(dims, phi_field)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = sample_counts(&distribution, shots, &mut rng)?;
    let outcome = counts
        .iter()
        .enumerate()
        .fold((0, 0), |best, (k, &c)| if c > best.1 { (k, c) } else { best })
        .0;
    Ok(AcFieldEstimate {
        phi_field,
        estimate: 2.0 * PI * outcome as f64 / dims.total() as f64,
        distribution,
        counts,
        outcome,
    })
}

/// Outcome image over a sweep of field phases.
#[derive(Debug, Clone, PartialEq)]
pub struct AcFieldImage {
    pub phis: Vec<f64>,
    /// `probs[i][k]`: probability of value `k` at `phis[i]`.
    pub probs: Vec<Vec<f64>>,
    /// Most likely value per phase.
    pub outcomes: Vec<usize>,
}

pub fn ac_field_sweep(dims: &DimensionVector, phis: &[f64]) -> Result<AcFieldImage> {
    let probs = par::try_map_range(phis.len(), |i| ac_field_distribution(dims, phis[i]))?;
    let outcomes = probs.iter().map(|p| crate::sensing::digitize::max_outcome(p).0).collect();
    Ok(AcFieldImage {
        phis: phis.to_vec(),
        probs,
        outcomes,
    })
}

/// True when the outcomes rise by at most one step at a time from 0 to `N-1`
/// (wrapping back to 0 only at the end of the range), visiting every value:
/// each outcome then names a single phase interval.
pub fn is_monotone_staircase(outcomes: &[usize], n: usize) -> bool {
    if outcomes.first() != Some(&0) {
        return false;
    }
    let mut seen = vec![false; n];
    let mut wrapped = false;
    for w in outcomes.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b == a || b == a + 1 {
            if wrapped && b != 0 {
                return false;
            }
            continue;
        }
        if a == n - 1 && b == 0 && !wrapped {
            wrapped = true;
            continue;
        }
        return false;
    }
    for &o in outcomes {
        if o >= n {
            return false;
        }
        seen[o] = true;
    }
    seen.iter().all(|&s| s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadOptions {
    pub shots: u64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for SpreadOptions {
    fn default() -> Self {
        SpreadOptions {
            shots: 10_000,
            trials: 2_000,
            seed: 0x5eed,
        }
    }
}

/// Monte Carlo spread of the maximum-likelihood phase estimate on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSpread {
    pub n: usize,
    pub phi_true: f64,
    pub shots: u64,
    pub trials: usize,
    /// Sample standard deviation of the estimates.
    pub std: f64,
    /// Standard error of `std`, `std / sqrt(2 (trials - 1))`.
    pub std_err: f64,
    /// Cramér-Rao prediction `1 / sqrt(shots * F_Q)`.
    pub qcrb: f64,
    pub mean_bias: f64,
}

impl EstimatorSpread {
    /// `(std - qcrb) / std_err`.
    pub fn z_score(&self) -> f64 {
        (self.std - self.qcrb) / self.std_err
    }
}

/// Phase-estimation likelihood model: inverse QFT applied to the `n`-qubit
/// phase ladder.
struct LadderModel {
    dims: DimensionVector,
    inverse_qft: DMatrix<Complex>,
    reversal: DigitReversal,
}

impl LadderModel {
    fn new(dims: DimensionVector) -> Result<Self> {
        let inverse_qft = circuit_unitary(&synthesize_inverse_qft(&dims))?;
        let reversal = DigitReversal::new(&dims);
        Ok(LadderModel {
            dims,
            inverse_qft,
            reversal,
        })
    }

    fn distribution(&self, phi: f64) -> Vec<f64> {
        let psi = crate::sensing::digitize::prepare_phase_state(&self.dims, phi);
        let out = &self.inverse_qft * psi.amplitudes();
        let flat: Vec<f64> = out.iter().map(|a| a.norm_sqr()).collect();
        self.reversal.relabel(&flat)
    }

    fn log_likelihood(&self, counts: &[u64], phi: f64) -> f64 {
        let p = self.distribution(phi);
        counts
            .iter()
            .zip(&p)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, &q)| c as f64 * q.max(1e-300).ln())
            .sum()
    }
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// Maximum-likelihood phase from outcome counts: coarse search on the grid
/// of `table` (spacing `step`), then golden-section refinement within one
/// grid step.
fn mle_phase(model: &LadderModel, table: &[Vec<f64>], step: f64, counts: &[u64]) -> f64 {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, logp) in table.iter().enumerate() {
        let ll: f64 = counts
            .iter()
            .zip(logp)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, &l)| c as f64 * l)
            .sum();
        if ll > best.1 {
            best = (i, ll);
        }
    }
    let centre = best.0 as f64 * step;
    let (mut a, mut b) = (centre - step, centre + step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = model.log_likelihood(counts, x1);
    let mut f2 = model.log_likelihood(counts, x2);
    while b - a > 1e-10 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = model.log_likelihood(counts, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = model.log_likelihood(counts, x2);
        }
    }
    0.5 * (a + b)
}

/// Repeats `trials` independent experiments of `shots` readouts each at the
/// phase `2 pi (floor(N/3) + 0.3) / N` and compares the spread of the
/// maximum-likelihood estimates with the QPEA Cramér-Rao bound.
pub fn estimator_spread(n: usize, opts: &SpreadOptions) -> Result<EstimatorSpread> {
    if n == 0 || n > 10 {
        return Err(Error::argument(format!("estimator study supports 1..=10 qubits, got {n}")));
    }
    if opts.trials < 2 {
        return Err(Error::argument("estimator study needs at least 2 trials"));
    }
    let dims = DimensionVector::qubits(n)?;
    let big_n = dims.total();
    let phi_true = 2.0 * PI * ((big_n / 3) as f64 + 0.3) / big_n as f64;
    let model = LadderModel::new(dims.clone())?;
    let exact = model.distribution(phi_true);
    // one qubit reads cos^2(phi/2), identifiable only on [0, pi]
    let range = if big_n == 2 { PI } else { 2.0 * PI };
    let step = 2.0 * PI / (8 * big_n) as f64;
    let grid = (range / step).round() as usize + usize::from(big_n == 2);
    let table: Vec<Vec<f64>> = (0..grid)
        .map(|i| {
            model
                .distribution(i as f64 * step)
                .into_iter()
                .map(|p| p.max(1e-300).ln())
                .collect()
        })
        .collect();

    let deviations = par::try_map_range(opts.trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(t as u64);
        let counts = sample_counts(&exact, opts.shots, &mut rng)?;
        Ok::<f64, Error>(wrap(mle_phase(&model, &table, step, &counts) - phi_true))
    })?;

    let t = deviations.len() as f64;
    let mean = deviations.iter().sum::<f64>() / t;
    let var = deviations.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (t - 1.0);
    let std = var.sqrt();
    let f_q = qfi_ladder_analytic(&dims);
    debug_assert_eq!(f_q, crate::metrology::qfi_analytic(Strategy::Qpea, n));
    Ok(EstimatorSpread {
        n,
        phi_true,
        shots: opts.shots,
        trials: opts.trials,
        std,
        std_err: std / (2.0 * (t - 1.0)).sqrt(),
        qcrb: 1.0 / (opts.shots as f64 * f_q).sqrt(),
        mean_bias: mean,
    })
}
