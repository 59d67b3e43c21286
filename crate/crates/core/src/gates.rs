//! Gate library: Hadamard, Chrestenson, phase rotations, controlled phases,
//! conditional rotations and arbitrary unitaries on a subset of qudits.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::register::{DimensionVector, DEFAULT_TOLERANCE};
use crate::Complex;

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    /// Qubit Hadamard.
    Hadamard,
    /// d-point DFT on one qudit; `inverse` selects its adjoint.
    Chrestenson { inverse: bool },
    /// `exp(-i pi/4 Y)`, the pi/2 y-rotation some hardware uses in place of H.
    RyHalfPi { inverse: bool },
    /// `|t> -> exp(i theta t) |t>` on one qudit.
    PhaseRot { theta: f64 },
    /// Two-qudit phase on targets `[control, target]`.
    ///
    /// Without a control value the phase is `exp(i theta c t)`, so a qutrit
    /// control applies `theta` once per unit of its digit. With
    /// `control_value = Some(v)` the phase `exp(i theta t)` fires only when `c == v`.
    ControlledPhase {
        theta: f64,
        control_value: Option<usize>,
    },
    /// Cyclic shift `|t> -> |t+1 mod d>` on the target when the control equals
    /// `control_value`. Targets are `[control, target]`.
    Crot { control_value: usize, inverse: bool },
    /// Arbitrary unitary on the listed targets (big-endian over the targets).
    Custom { matrix: DMatrix<Complex> },
}

/// A gate bound to the qudits it acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

/// Matrix of a gate restricted to its targets.
#[derive(Debug, Clone)]
pub(crate) enum LocalOp {
    Dense(DMatrix<Complex>),
    Diagonal(Vec<Complex>),
}

impl GateOp {
    pub fn hadamard(target: usize) -> Self {
        GateOp {
            kind: GateKind::Hadamard,
            targets: vec![target],
        }
    }

    pub fn chrestenson(target: usize) -> Self {
        GateOp {
            kind: GateKind::Chrestenson { inverse: false },
            targets: vec![target],
        }
    }

    pub fn chrestenson_dag(target: usize) -> Self {
        GateOp {
            kind: GateKind::Chrestenson { inverse: true },
            targets: vec![target],
        }
    }

    pub fn ry_half_pi(target: usize) -> Self {
        GateOp {
            kind: GateKind::RyHalfPi { inverse: false },
            targets: vec![target],
        }
    }

    pub fn phase(target: usize, theta: f64) -> Self {
        GateOp {
            kind: GateKind::PhaseRot { theta },
            targets: vec![target],
        }
    }

    pub fn controlled_phase(control: usize, target: usize, theta: f64) -> Self {
        GateOp {
            kind: GateKind::ControlledPhase {
                theta,
                control_value: None,
            },
            targets: vec![control, target],
        }
    }

    pub fn controlled_phase_on(control: usize, value: usize, target: usize, theta: f64) -> Self {
        GateOp {
            kind: GateKind::ControlledPhase {
                theta,
                control_value: Some(value),
            },
            targets: vec![control, target],
        }
    }

    pub fn crot(control: usize, value: usize, target: usize) -> Self {
        GateOp {
            kind: GateKind::Crot {
                control_value: value,
                inverse: false,
            },
            targets: vec![control, target],
        }
    }

    /// Arbitrary unitary. Fails if `matrix` is not unitary within 1e-10.
    pub fn custom(targets: Vec<usize>, matrix: DMatrix<Complex>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::shape("custom gate matrix is not square"));
        }
        let err = unitarity_error(&matrix);
        if err > DEFAULT_TOLERANCE {
            return Err(Error::invariant(format!(
                "custom gate is not unitary (|U'U - I|_F = {err:e})"
            )));
        }
        Ok(GateOp {
            kind: GateKind::Custom { matrix },
            targets,
        })
    }

    /// Control qudit of a two-qudit gate, if any.
    pub fn control(&self) -> Option<usize> {
        match self.kind {
            GateKind::ControlledPhase { .. } | GateKind::Crot { .. } => Some(self.targets[0]),
            _ => None,
        }
    }

    /// Rotation angle, for the kinds that carry one.
    pub fn theta(&self) -> Option<f64> {
        match self.kind {
            GateKind::PhaseRot { theta } | GateKind::ControlledPhase { theta, .. } => Some(theta),
            _ => None,
        }
    }

    pub fn adjoint(&self) -> GateOp {
        let kind = match &self.kind {
            GateKind::Hadamard => GateKind::Hadamard,
            GateKind::Chrestenson { inverse } => GateKind::Chrestenson { inverse: !inverse },
            GateKind::RyHalfPi { inverse } => GateKind::RyHalfPi { inverse: !inverse },
            GateKind::PhaseRot { theta } => GateKind::PhaseRot { theta: -theta },
            GateKind::ControlledPhase {
                theta,
                control_value,
            } => GateKind::ControlledPhase {
                theta: -theta,
                control_value: *control_value,
            },
            GateKind::Crot {
                control_value,
                inverse,
            } => GateKind::Crot {
                control_value: *control_value,
                inverse: !inverse,
            },
            GateKind::Custom { matrix } => GateKind::Custom {
                matrix: matrix.adjoint(),
            },
        };
        GateOp {
            kind,
            targets: self.targets.clone(),
        }
    }

    /// Checks the targets against the register and returns the product of the
    /// target dimensions.
    pub fn validate(&self, dims: &DimensionVector) -> Result<usize> {
        let arity = match self.kind {
            GateKind::Hadamard
            | GateKind::Chrestenson { .. }
            | GateKind::RyHalfPi { .. }
            | GateKind::PhaseRot { .. } => Some(1),
            GateKind::ControlledPhase { .. } | GateKind::Crot { .. } => Some(2),
            GateKind::Custom { .. } => None,
        };
        if let Some(a) = arity {
            if self.targets.len() != a {
                return Err(Error::shape(format!(
                    "gate expects {a} target(s), got {}",
                    self.targets.len()
                )));
            }
        }
        if self.targets.is_empty() {
            return Err(Error::shape("gate has no targets"));
        }
        for (i, &t) in self.targets.iter().enumerate() {
            dims.check_qudit(t)?;
            if self.targets[..i].contains(&t) {
                return Err(Error::shape(format!("qudit {t} targeted twice")));
            }
        }
        let local: usize = self.targets.iter().map(|&t| dims.dim(t)).product();
        match &self.kind {
            GateKind::Hadamard | GateKind::RyHalfPi { .. } if local != 2 => {
                return Err(Error::shape(format!(
                    "qubit gate on qudit {} of dimension {local}",
                    self.targets[0]
                )))
            }
            GateKind::ControlledPhase {
                control_value: Some(v),
                ..
            }
            | GateKind::Crot {
                control_value: v, ..
            } if *v >= dims.dim(self.targets[0]) => {
                return Err(Error::shape(format!(
                    "control value {v} out of range for qudit of dimension {}",
                    dims.dim(self.targets[0])
                )))
            }
            GateKind::Custom { matrix } if matrix.nrows() != local => {
                return Err(Error::shape(format!(
                    "custom matrix is {}x{} but targets span {local} levels",
                    matrix.nrows(),
                    matrix.ncols()
                )))
            }
            _ => {}
        }
        Ok(local)
    }

    pub(crate) fn local_op(&self, dims: &DimensionVector) -> Result<LocalOp> {
        self.validate(dims)?;
        let op = match &self.kind {
            GateKind::Hadamard => LocalOp::Dense(hadamard_matrix()),
            GateKind::Chrestenson { inverse } => {
                let c = chrestenson_matrix(dims.dim(self.targets[0]))?;
                LocalOp::Dense(if *inverse { c.adjoint() } else { c })
            }
            GateKind::RyHalfPi { inverse } => {
                let r = ry_half_pi_matrix();
                LocalOp::Dense(if *inverse { r.adjoint() } else { r })
            }
            GateKind::PhaseRot { theta } => {
                let d = dims.dim(self.targets[0]);
                LocalOp::Diagonal((0..d).map(|t| Complex::cis(theta * t as f64)).collect())
            }
            GateKind::ControlledPhase {
                theta,
                control_value,
            } => {
                let dc = dims.dim(self.targets[0]);
                let dt = dims.dim(self.targets[1]);
                let mut diag = Vec::with_capacity(dc * dt);
                for c in 0..dc {
                    for t in 0..dt {
                        let weight = match control_value {
                            None => (c * t) as f64,
                            Some(v) if *v == c => t as f64,
                            Some(_) => 0.0,
                        };
                        diag.push(Complex::cis(theta * weight));
                    }
                }
                LocalOp::Diagonal(diag)
            }
            GateKind::Crot {
                control_value,
                inverse,
            } => {
                let dc = dims.dim(self.targets[0]);
                let dt = dims.dim(self.targets[1]);
                let n = dc * dt;
                let mut m = DMatrix::zeros(n, n);
                for c in 0..dc {
                    for t in 0..dt {
                        let out = if c == *control_value {
                            if *inverse {
                                (t + dt - 1) % dt
                            } else {
                                (t + 1) % dt
                            }
                        } else {
                            t
                        };
                        m[(c * dt + out, c * dt + t)] = Complex::new(1.0, 0.0);
                    }
                }
                LocalOp::Dense(m)
            }
            GateKind::Custom { matrix } => LocalOp::Dense(matrix.clone()),
        };
        Ok(op)
    }

    /// Full-register matrix of this gate.
    pub fn full_matrix(&self, dims: &DimensionVector) -> Result<DMatrix<Complex>> {
        let n = dims.total();
        let mut m = DMatrix::<Complex>::identity(n, n);
        let local = self.local_op(dims)?;
        let layout = Layout::new(dims, &self.targets);
        for col in m.as_mut_slice().chunks_mut(n) {
            layout.apply(&local, col);
        }
        Ok(m)
    }
}

/// Index bookkeeping for applying a local operator to a flat amplitude vector.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    offsets: Vec<usize>,
    bases: Vec<usize>,
}

impl Layout {
    pub(crate) fn new(dims: &DimensionVector, targets: &[usize]) -> Self {
        let local: usize = targets.iter().map(|&t| dims.dim(t)).product();
        let mut offsets = Vec::with_capacity(local);
        for a in 0..local {
            let mut rem = a;
            let mut off = 0;
            for &t in targets.iter().rev() {
                let d = dims.dim(t);
                off += (rem % d) * dims.stride(t);
                rem /= d;
            }
            offsets.push(off);
        }
        let bases = (0..dims.total())
            .filter(|&f| targets.iter().all(|&t| dims.digit(f, t) == 0))
            .collect();
        Layout { offsets, bases }
    }

    pub(crate) fn apply(&self, op: &LocalOp, amps: &mut [Complex]) {
        match op {
            LocalOp::Diagonal(diag) => {
                for &b in &self.bases {
                    for (off, ph) in self.offsets.iter().zip(diag) {
                        amps[b + off] *= ph;
                    }
                }
            }
            LocalOp::Dense(m) => {
                let d = self.offsets.len();
                let mut local = vec![Complex::new(0.0, 0.0); d];
                for &b in &self.bases {
                    for (slot, off) in local.iter_mut().zip(&self.offsets) {
                        *slot = amps[b + off];
                    }
                    for (r, off) in self.offsets.iter().enumerate() {
                        let mut acc = Complex::new(0.0, 0.0);
                        for (c, v) in local.iter().enumerate() {
                            acc += m[(r, c)] * v;
                        }
                        amps[b + off] = acc;
                    }
                }
            }
        }
    }
}

pub fn hadamard_matrix() -> DMatrix<Complex> {
    let h = Complex::new(FRAC_1_SQRT_2, 0.0);
    DMatrix::from_row_slice(2, 2, &[h, h, h, -h])
}

fn ry_half_pi_matrix() -> DMatrix<Complex> {
    let h = Complex::new(FRAC_1_SQRT_2, 0.0);
    DMatrix::from_row_slice(2, 2, &[h, -h, h, h])
}

/// The d-level Chrestenson gate, `C[j, k] = omega^{jk} / sqrt(d)` with
/// `omega = exp(2 pi i / d)`. Equals the Hadamard matrix for `d = 2`.
pub fn chrestenson_matrix(d: usize) -> Result<DMatrix<Complex>> {
    if d < 2 {
        return Err(Error::argument(format!("Chrestenson gate needs d >= 2, got {d}")));
    }
    Ok(fourier(d))
}

/// N-point DFT matrix `F[k, j] = exp(2 pi i jk / N) / sqrt(N)`.
pub fn dft_matrix(n: usize) -> Result<DMatrix<Complex>> {
    if n == 0 {
        return Err(Error::argument("DFT size must be at least 1"));
    }
    Ok(fourier(n))
}

fn fourier(n: usize) -> DMatrix<Complex> {
    let norm = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |k, j| {
        // reduce jk mod n before scaling to keep the angle small
        let m = (j * k) % n;
        Complex::cis(2.0 * PI * m as f64 / n as f64) * norm
    })
}

/// Frobenius norm of `U'U - I`.
pub fn unitarity_error(u: &DMatrix<Complex>) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - DMatrix::<Complex>::identity(n, n)).norm()
}
