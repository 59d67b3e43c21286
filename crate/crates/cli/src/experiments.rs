//! Experiment runners. Each returns its named output tables after checking
//! the numeric invariants of the results.

use qusense_core::metrology::{dynamic_range, fisher_analysis, qcrb_precision, FisherOptions};
use qusense_core::noise::purity_study;
use qusense_core::register::DimensionVector;
use qusense_core::report::{Cell, Table};
use qusense_core::sensing::{
    ac_field_sweep, estimator_spread, phase_sweep, simulate_ac_field_estimation, simulate_correlation_spectroscopy,
    uniform_phases, SpreadOptions,
};

use crate::config::{AcFieldConfig, CorrelateConfig, DigitizeConfig, FisherConfig, PurityConfig, Settings};

/// Failure while running an experiment.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    /// The library rejected an input the schema let through.
    #[error(transparent)]
    Input(qusense_core::Error),
    /// A result broke a numeric invariant.
    #[error("{0}")]
    Invariant(String),
}

impl From<qusense_core::Error> for RunError {
    fn from(e: qusense_core::Error) -> Self {
        match e {
            qusense_core::Error::Invariant(m) => RunError::Invariant(m),
            other => RunError::Input(other),
        }
    }
}

type Outputs = Vec<(&'static str, Table)>;

const PROBABILITY_TOL: f64 = 1e-9;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), RunError> {
    if ok {
        Ok(())
    } else {
        Err(RunError::Invariant(msg()))
    }
}

fn check_distribution(dist: &[f64], what: impl Fn() -> String) -> Result<(), RunError> {
    let sum: f64 = dist.iter().sum();
    ensure((sum - 1.0).abs() < PROBABILITY_TOL, || format!("{}: probabilities sum to {sum}", what()))?;
    ensure(dist.iter().all(|&p| p >= -PROBABILITY_TOL), || format!("{}: negative probability", what()))
}

fn push(t: &mut Table, row: Vec<Cell>) {
    t.push(row).expect("row width matches the header");
}

pub fn run(settings: &Settings, seed: u64) -> Result<Outputs, RunError> {
    match settings {
        Settings::Digitize(c) => digitize(c),
        Settings::Acfield(c) => acfield(c, seed),
        Settings::Correlate(c) => correlate(c, seed),
        Settings::Fisher(c) => fisher(c),
        Settings::Purity(c) => purity(c),
    }
}

fn digitize(c: &DigitizeConfig) -> Result<Outputs, RunError> {
    let dims = DimensionVector::new(c.dims.clone())?;
    let phis = uniform_phases(c.phase_points);
    let mut t = Table::new(["phi", "mapping", "outcome", "probability"]);
    for &mapping in &c.mappings {
        let image = phase_sweep(&dims, &phis, mapping)?;
        for (dist, &phi) in image.iter().zip(&phis) {
            check_distribution(dist, || format!("{} readout at phi = {phi}", mapping.name()))?;
            for (k, &p) in dist.iter().enumerate() {
                push(&mut t, vec![phi.into(), mapping.name().into(), k.into(), p.into()]);
            }
        }
    }
    Ok(vec![("digitize", t)])
}

/// Independent per-point seed derived from the run seed.
fn point_seed(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn acfield(c: &AcFieldConfig, seed: u64) -> Result<Outputs, RunError> {
    let dims = DimensionVector::new(c.dims.clone())?;
    let phis = uniform_phases(c.phase_points);
    let image = ac_field_sweep(&dims, &phis)?;
    let mut t = Table::new(["phi", "outcome", "probability", "sampled_outcome", "estimate"]);
    for (i, (&phi, dist)) in phis.iter().zip(&image.probs).enumerate() {
        check_distribution(dist, || format!("AC-field readout at phi = {phi}"))?;
        let est = simulate_ac_field_estimation(phi, &dims, c.shots, point_seed(seed, i))?;
        let k = image.outcomes[i];
        push(
            &mut t,
            vec![phi.into(), k.into(), dist[k].into(), est.outcome.into(), est.estimate.into()],
        );
    }
    let mut out = vec![("acfield", t)];
    if let Some(s) = &c.spread {
        let opts = SpreadOptions {
            shots: s.shots,
            trials: s.trials,
            seed,
        };
        let mut t = Table::new(["n", "shots", "trials", "std", "std_err", "qcrb", "z"]);
        for &n in &s.qubits {
            let r = estimator_spread(n, &opts)?;
            ensure(r.std.is_finite(), || format!("estimator spread for n = {n} is not finite"))?;
            push(
                &mut t,
                vec![
                    n.into(),
                    r.shots.into(),
                    r.trials.into(),
                    r.std.into(),
                    r.std_err.into(),
                    r.qcrb.into(),
                    r.z_score().into(),
                ],
            );
        }
        out.push(("acfield_spread", t));
    }
    Ok(out)
}

fn optional(x: Option<f64>) -> Cell {
    x.map_or_else(|| Cell::Text(String::new()), Cell::Float)
}

fn correlate(c: &CorrelateConfig, seed: u64) -> Result<Outputs, RunError> {
    let r = simulate_correlation_spectroscopy(&c.targets, &c.run, seed)?;
    ensure(
        r.p_mem1.iter().chain(&r.p_mem2).all(|p| (-PROBABILITY_TOL..=1.0 + PROBABILITY_TOL).contains(p)),
        || "memory flip probability outside [0, 1]".to_string(),
    )?;
    let mut series = Table::new(["t_c", "p_mem1", "p_mem2"]);
    for ((&t, &a), &b) in r.t_c.iter().zip(&r.p_mem1).zip(&r.p_mem2) {
        push(&mut series, vec![t.into(), a.into(), b.into()]);
    }
    let mut spectrum = Table::new(["f", "s1", "s2"]);
    for ((&f, &a), &b) in r.spectrum1.freqs.iter().zip(&r.spectrum1.magnitude).zip(&r.spectrum2.magnitude) {
        push(&mut spectrum, vec![f.into(), a.into(), b.into()]);
    }
    let (p1, p2) = r.peaks();
    let (w1, w2) = r.linewidths();
    let mut peaks = Table::new(["memory", "peak_hz", "linewidth_hz", "resolution_hz", "tau"]);
    for (m, p, w) in [(1usize, p1, w1), (2, p2, w2)] {
        push(
            &mut peaks,
            vec![m.into(), optional(p), optional(w), r.spectrum1.resolution.into(), r.tau.into()],
        );
    }
    Ok(vec![
        ("correlate_series", series),
        ("correlate_spectrum", spectrum),
        ("correlate_peaks", peaks),
    ])
}

fn fisher(c: &FisherConfig) -> Result<Outputs, RunError> {
    let opts = FisherOptions {
        grid_points: c.grid_points,
        step: c.step,
        ..FisherOptions::default()
    };
    let mut summary = Table::new(["n", "strategy", "qfi", "cfi_mean"]);
    let mut curve = Table::new(["n", "strategy", "phi", "cfi"]);
    let mut bounds = Table::new(["n", "strategy", "qcrb", "dynamic_range"]);
    for &n in &c.qubits {
        for &s in &c.strategies {
            let r = fisher_analysis(s, n, &opts)?;
            ensure(r.cfi_mean <= r.qfi + 1e-6, || {
                format!("{} n = {n}: classical Fisher information {} exceeds {}", s.name(), r.cfi_mean, r.qfi)
            })?;
            push(&mut summary, vec![n.into(), s.name().into(), r.qfi.into(), r.cfi_mean.into()]);
            for (&phi, &f) in r.phi_grid.iter().zip(&r.cfi_curve) {
                push(&mut curve, vec![n.into(), s.name().into(), phi.into(), f.into()]);
            }
            if let Some(sensing) = &c.sensing {
                let p = sensing.params(n);
                push(
                    &mut bounds,
                    vec![
                        n.into(),
                        s.name().into(),
                        qcrb_precision(s, &p)?.into(),
                        dynamic_range(s, &p)?.into(),
                    ],
                );
            }
        }
    }
    let mut out = vec![("fisher", summary), ("fisher_curve", curve)];
    if c.sensing.is_some() {
        out.push(("fisher_bounds", bounds));
    }
    Ok(out)
}

fn purity(c: &PurityConfig) -> Result<Outputs, RunError> {
    let phis = uniform_phases(c.phase_points);
    let mut t = Table::new(["n", "mapping", "mean_purity", "std_err"]);
    for &n in &c.qubits {
        let floor = 1.0 / (1u64 << n) as f64;
        for &mapping in &c.mappings {
            let r = purity_study(n, &phis, mapping)?;
            ensure(
                r.purities.iter().all(|&p| p >= floor - 1e-12 && p <= 1.0 + 1e-12),
                || format!("{} n = {n}: purity outside [1/N, 1]", mapping.name()),
            )?;
            push(&mut t, vec![n.into(), mapping.name().into(), r.mean.into(), r.std_err.into()]);
        }
    }
    Ok(vec![("purity", t)])
}
