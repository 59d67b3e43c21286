//! Dense pure and mixed states over a mixed-radix register.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::{GateOp, Layout};
use crate::register::{DimensionVector, Limits, DEFAULT_TOLERANCE};
use crate::Complex;

/// Normalized amplitude vector of length `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: DimensionVector,
    amps: DVector<Complex>,
}

impl PureState {
    /// Builds a state, checking length and unit norm (tolerance 1e-10).
    pub fn new(dims: DimensionVector, amps: DVector<Complex>) -> Result<Self> {
        Self::new_with_tolerance(dims, amps, DEFAULT_TOLERANCE)
    }

    pub fn new_with_tolerance(dims: DimensionVector, amps: DVector<Complex>, tol: f64) -> Result<Self> {
        if amps.len() != dims.total() {
            return Err(Error::shape(format!(
                "{} amplitudes for register {dims} of dimension {}",
                amps.len(),
                dims.total()
            )));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::invariant(format!("state norm {norm} != 1")));
        }
        Ok(PureState { dims, amps })
    }

    /// Normalizes `amps` before wrapping them.
    pub fn normalized(dims: DimensionVector, amps: DVector<Complex>) -> Result<Self> {
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::argument("cannot normalize a zero or non-finite vector"));
        }
        Self::new(dims, amps / Complex::new(norm, 0.0))
    }

    /// Computational basis state `|flat>`.
    pub fn basis(dims: DimensionVector, flat: usize) -> Result<Self> {
        let n = dims.total();
        if flat >= n {
            return Err(Error::Range { index: flat, dim: n });
        }
        let mut amps = DVector::zeros(n);
        amps[flat] = Complex::new(1.0, 0.0);
        Ok(PureState { dims, amps })
    }

    /// Equal superposition of all `N` basis states.
    pub fn uniform(dims: DimensionVector) -> Self {
        let n = dims.total();
        let a = Complex::new(1.0 / (n as f64).sqrt(), 0.0);
        PureState {
            dims,
            amps: DVector::from_element(n, a),
        }
    }

    pub fn dims(&self) -> &DimensionVector {
        &self.dims
    }

    pub fn amplitudes(&self) -> &DVector<Complex> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> DVector<Complex> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex> {
        if self.dims != other.dims {
            return Err(Error::shape("inner product of states on different registers"));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        let op = gate.local_op(&self.dims)?;
        Layout::new(&self.dims, &gate.targets).apply(&op, self.amps.as_mut_slice());
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.dims() != &self.dims {
            return Err(Error::shape(format!(
                "circuit on {} applied to state on {}",
                circuit.dims(),
                self.dims
            )));
        }
        for op in circuit.ops() {
            self.apply(op)?;
        }
        Ok(())
    }

    /// `|psi><psi|`.
    pub fn to_mixed(&self) -> MixedState {
        MixedState {
            dims: self.dims.clone(),
            rho: &self.amps * self.amps.adjoint(),
        }
    }

    /// Probability of each flat outcome, `|<k|psi>|^2`.
    pub fn distribution(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// `N x N` density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    dims: DimensionVector,
    rho: DMatrix<Complex>,
}

impl MixedState {
    /// Builds a density matrix, checking Hermiticity, unit trace and
    /// positivity (eigenvalues >= -tol) with the default limits.
    pub fn new(dims: DimensionVector, rho: DMatrix<Complex>) -> Result<Self> {
        Self::new_with_limits(dims, rho, &Limits::default())
    }

    pub fn new_with_limits(dims: DimensionVector, rho: DMatrix<Complex>, limits: &Limits) -> Result<Self> {
        let n = dims.total();
        limits.check_dense(n)?;
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::shape(format!(
                "density matrix is {}x{}, register dimension {n}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let state = MixedState { dims, rho };
        state.validate(limits.tolerance)?;
        Ok(state)
    }

    pub(crate) fn from_parts(dims: DimensionVector, rho: DMatrix<Complex>) -> Self {
        MixedState { dims, rho }
    }

    pub fn maximally_mixed(dims: DimensionVector) -> Self {
        let n = dims.total();
        MixedState {
            dims,
            rho: DMatrix::identity(n, n) / Complex::new(n as f64, 0.0),
        }
    }

    pub fn dims(&self) -> &DimensionVector {
        &self.dims
    }

    pub fn rho(&self) -> &DMatrix<Complex> {
        &self.rho
    }

    pub fn into_matrix(self) -> DMatrix<Complex> {
        self.rho
    }

    pub fn trace(&self) -> Complex {
        self.rho.trace()
    }

    /// Checks the density-matrix invariants at tolerance `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let herm = (&self.rho - self.rho.adjoint()).norm();
        if herm > tol {
            return Err(Error::invariant(format!("density matrix not Hermitian ({herm:e})")));
        }
        let tr = self.rho.trace();
        if (tr - Complex::new(1.0, 0.0)).norm() > tol {
            return Err(Error::invariant(format!("trace {tr} != 1")));
        }
        if !is_positive_semidefinite(&self.rho, tol) {
            return Err(Error::invariant("density matrix has an eigenvalue below -tol"));
        }
        Ok(())
    }

    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        let op = gate.local_op(&self.dims)?;
        let layout = Layout::new(&self.dims, &gate.targets);
        let n = self.dims.total();
        // U rho U' = (U (U rho)')'
        for col in self.rho.as_mut_slice().chunks_mut(n) {
            layout.apply(&op, col);
        }
        self.rho.adjoint_mut();
        for col in self.rho.as_mut_slice().chunks_mut(n) {
            layout.apply(&op, col);
        }
        self.rho.adjoint_mut();
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.dims() != &self.dims {
            return Err(Error::shape(format!(
                "circuit on {} applied to state on {}",
                circuit.dims(),
                self.dims
            )));
        }
        for op in circuit.ops() {
            self.apply(op)?;
        }
        Ok(())
    }

    /// Diagonal `<k|rho|k>`.
    pub fn distribution(&self) -> Vec<f64> {
        (0..self.dims.total()).map(|k| self.rho[(k, k)].re).collect()
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Reduced state on `keep` (qudit labels, any order; result follows
    /// register order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<MixedState> {
        if keep.is_empty() {
            return Err(Error::argument("partial trace needs at least one kept qudit"));
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept.len() != keep.len() {
            return Err(Error::argument("duplicate qudit in keep set"));
        }
        for &q in &kept {
            self.dims.check_qudit(q)?;
        }
        let traced: Vec<usize> = (0..self.dims.len()).filter(|q| !kept.contains(q)).collect();
        let kept_dims = DimensionVector::new(kept.iter().map(|&q| self.dims.dim(q)).collect::<Vec<_>>())?;
        if traced.is_empty() {
            return Ok(MixedState::from_parts(kept_dims, self.rho.clone()));
        }

        let n = self.dims.total();
        let index_in = |flat: usize, qs: &[usize]| -> usize {
            qs.iter()
                .fold(0, |acc, &q| acc * self.dims.dim(q) + self.dims.digit(flat, q))
        };
        let kept_idx: Vec<usize> = (0..n).map(|f| index_in(f, &kept)).collect();
        let env_idx: Vec<usize> = (0..n).map(|f| index_in(f, &traced)).collect();
        let env_dim: usize = traced.iter().map(|&q| self.dims.dim(q)).product();

        // group flat indices by environment label
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); env_dim];
        for f in 0..n {
            groups[env_idx[f]].push(f);
        }
        let m = kept_dims.total();
        let mut out = DMatrix::<Complex>::zeros(m, m);
        for group in &groups {
            for &r in group {
                for &c in group {
                    out[(kept_idx[r], kept_idx[c])] += self.rho[(r, c)];
                }
            }
        }
        Ok(MixedState::from_parts(kept_dims, out))
    }
}

/// Anything that yields a measurement distribution in the computational basis.
pub trait Measure {
    fn distribution(&self) -> Vec<f64>;
}

impl Measure for PureState {
    fn distribution(&self) -> Vec<f64> {
        PureState::distribution(self)
    }
}

impl Measure for MixedState {
    fn distribution(&self) -> Vec<f64> {
        MixedState::distribution(self)
    }
}

/// Outcome probabilities over the `N` flat basis labels.
pub fn measure_distribution<S: Measure>(state: &S) -> Vec<f64> {
    state.distribution()
}

/// `Tr(rho^2)`.
pub fn purity(state: &MixedState) -> f64 {
    state.purity()
}

/// Multinomial outcome counts for `shots` draws, reproducible for a fixed seed.
pub fn sample_outcomes(dist: &[f64], shots: u64, seed: u64) -> Result<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_counts(dist, shots, &mut rng)
}

/// Multinomial sampling from an explicit generator, via conditional binomials.
pub fn sample_counts<R: Rng + ?Sized>(dist: &[f64], shots: u64, rng: &mut R) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::argument("shots must be at least 1"));
    }
    check_distribution(dist, 1e-9)?;
    let mut counts = vec![0u64; dist.len()];
    let mut remaining = shots;
    let mut mass_left: f64 = dist.iter().map(|p| p.max(0.0)).sum();
    for (i, &p) in dist.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let p = p.max(0.0);
        let q = if mass_left > 0.0 { (p / mass_left).min(1.0) } else { 0.0 };
        let k = if i == dist.len() - 1 || q >= 1.0 {
            remaining
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(remaining, q)
                .map_err(|e| Error::argument(e.to_string()))?
                .sample(rng)
        };
        counts[i] = k;
        remaining -= k;
        mass_left -= p;
    }
    Ok(counts)
}

pub(crate) fn check_distribution(dist: &[f64], tol: f64) -> Result<()> {
    if dist.is_empty() {
        return Err(Error::argument("empty distribution"));
    }
    if dist.iter().any(|p| !p.is_finite() || *p < -tol) {
        return Err(Error::argument("distribution has a negative or non-finite entry"));
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > tol {
        return Err(Error::argument(format!("distribution sums to {total}")));
    }
    Ok(())
}

/// Positive semidefiniteness: smallest eigenvalue of the Hermitian part >= -tol.
pub(crate) fn is_positive_semidefinite(rho: &DMatrix<Complex>, tol: f64) -> bool {
    let hermitian = (rho + rho.adjoint()) * Complex::new(0.5, 0.0);
    hermitian.symmetric_eigenvalues().iter().all(|&l| l >= -tol)
}
