//! Gate sequences over a register and synthesis of the generalized QFT.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{GateKind, GateOp, Layout};
use crate::register::{DimensionVector, Limits};
use crate::Complex;

/// Ordered gate list; the first op acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    dims: DimensionVector,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(dims: DimensionVector) -> Self {
        Circuit { dims, ops: Vec::new() }
    }

    pub fn from_ops(dims: DimensionVector, ops: Vec<GateOp>) -> Result<Self> {
        for op in &ops {
            op.validate(&dims)?;
        }
        Ok(Circuit { dims, ops })
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(&self.dims)?;
        self.ops.push(op);
        Ok(())
    }

    /// Appends every op of `other`, which must act on the same register.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.dims != self.dims {
            return Err(Error::shape(format!(
                "cannot append a circuit on {} to one on {}",
                other.dims, self.dims
            )));
        }
        self.ops.extend(other.ops.iter().cloned());
        Ok(())
    }

    pub fn dims(&self) -> &DimensionVector {
        &self.dims
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Reversed sequence of adjoint gates.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            dims: self.dims.clone(),
            ops: self.ops.iter().rev().map(GateOp::adjoint).collect(),
        }
    }

    /// Number of two-qudit gates.
    pub fn controlled_count(&self) -> usize {
        self.ops.iter().filter(|op| op.control().is_some()).count()
    }

    /// Places this circuit on `qudits` of a larger register; qudit `i` of this
    /// circuit becomes `qudits[i]`.
    pub fn embed(&self, full: &DimensionVector, qudits: &[usize]) -> Result<Circuit> {
        if qudits.len() != self.dims.len() {
            return Err(Error::shape(format!(
                "{} qudit labels for a {}-qudit circuit",
                qudits.len(),
                self.dims.len()
            )));
        }
        for (i, &q) in qudits.iter().enumerate() {
            full.check_qudit(q)?;
            if full.dim(q) != self.dims.dim(i) {
                return Err(Error::shape(format!(
                    "qudit {q} has dimension {}, circuit expects {}",
                    full.dim(q),
                    self.dims.dim(i)
                )));
            }
        }
        let ops = self
            .ops
            .iter()
            .map(|op| GateOp {
                kind: op.kind.clone(),
                targets: op.targets.iter().map(|&t| qudits[t]).collect(),
            })
            .collect();
        Circuit::from_ops(full.clone(), ops)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = CircuitDoc {
            dims: self.dims.dims().to_vec(),
            ops: self.ops.iter().map(OpDoc::from).collect(),
        };
        serde_json::to_value(doc).expect("circuit documents always serialize")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: CircuitDoc =
            serde_json::from_value(value.clone()).map_err(|e| Error::argument(e.to_string()))?;
        let dims = DimensionVector::new(doc.dims)?;
        let ops = doc.ops.into_iter().map(OpDoc::into_op).collect::<Result<Vec<_>>>()?;
        Circuit::from_ops(dims, ops)
    }
}

/// Generalized QFT on a mixed-radix register.
///
/// Qudits are processed from the last to the first. Qudit `l` gets a
/// Chrestenson gate (a Hadamard for `d = 2`), then a controlled phase from
/// every earlier qudit `p`, nearest first, with angle `2 pi / prod_{m=p..l} d_m`
/// per unit of the control digit. The unitary equals `dft_matrix(N) * P` with
/// `P` the [`DigitReversal`](crate::DigitReversal) permutation.
pub fn synthesize_qft(dims: &DimensionVector) -> Circuit {
    let mut ops = Vec::with_capacity(dims.len() * (dims.len() + 1) / 2);
    for l in (0..dims.len()).rev() {
        if dims.dim(l) == 2 {
            ops.push(GateOp::hadamard(l));
        } else {
            ops.push(GateOp::chrestenson(l));
        }
        let mut radix = dims.dim(l);
        for p in (0..l).rev() {
            radix *= dims.dim(p);
            ops.push(GateOp::controlled_phase(p, l, 2.0 * PI / radix as f64));
        }
    }
    Circuit {
        dims: dims.clone(),
        ops,
    }
}

pub fn synthesize_inverse_qft(dims: &DimensionVector) -> Circuit {
    synthesize_qft(dims).inverse()
}

/// Dense product of the circuit's gates, built by pushing the identity's
/// columns through the gate kernels. Fails above the default dense cap.
pub fn circuit_unitary(circuit: &Circuit) -> Result<DMatrix<Complex>> {
    circuit_unitary_with_limits(circuit, &Limits::default())
}

pub fn circuit_unitary_with_limits(circuit: &Circuit, limits: &Limits) -> Result<DMatrix<Complex>> {
    let n = circuit.dims.total();
    limits.check_dense(n)?;
    let mut u = DMatrix::<Complex>::identity(n, n);
    for op in &circuit.ops {
        let local = op.local_op(&circuit.dims)?;
        let layout = Layout::new(&circuit.dims, &op.targets);
        for col in u.as_mut_slice().chunks_mut(n) {
            layout.apply(&local, col);
        }
    }
    Ok(u)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    dims: Vec<usize>,
    ops: Vec<OpDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OpDoc {
    kind: String,
    targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    control_value: Option<usize>,
    /// Row-major `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

impl From<&GateOp> for OpDoc {
    fn from(op: &GateOp) -> Self {
        let mut doc = OpDoc {
            kind: String::new(),
            targets: op.targets.clone(),
            theta: None,
            control_value: None,
            matrix: None,
        };
        doc.kind = match &op.kind {
            GateKind::Hadamard => "hadamard",
            GateKind::Chrestenson { inverse: false } => "chrestenson",
            GateKind::Chrestenson { inverse: true } => "chrestenson_dag",
            GateKind::RyHalfPi { inverse: false } => "ry_half_pi",
            GateKind::RyHalfPi { inverse: true } => "ry_half_pi_dag",
            GateKind::PhaseRot { theta } => {
                doc.theta = Some(*theta);
                "phase"
            }
            GateKind::ControlledPhase { theta, control_value } => {
                doc.theta = Some(*theta);
                doc.control_value = *control_value;
                "controlled_phase"
            }
            GateKind::Crot { control_value, inverse } => {
                doc.control_value = Some(*control_value);
                if *inverse {
                    "crot_dag"
                } else {
                    "crot"
                }
            }
            GateKind::Custom { matrix } => {
                doc.matrix = Some(
                    matrix
                        .row_iter()
                        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                        .collect(),
                );
                "custom"
            }
        }
        .to_string();
        doc
    }
}

impl OpDoc {
    fn into_op(self) -> Result<GateOp> {
        let need_theta = || {
            self.theta
                .ok_or_else(|| Error::argument(format!("{} gate needs theta", self.kind)))
        };
        let need_value = || {
            self.control_value
                .ok_or_else(|| Error::argument(format!("{} gate needs control_value", self.kind)))
        };
        let kind = match self.kind.as_str() {
            "hadamard" => GateKind::Hadamard,
            "chrestenson" => GateKind::Chrestenson { inverse: false },
            "chrestenson_dag" => GateKind::Chrestenson { inverse: true },
            "ry_half_pi" => GateKind::RyHalfPi { inverse: false },
            "ry_half_pi_dag" => GateKind::RyHalfPi { inverse: true },
            "phase" => GateKind::PhaseRot { theta: need_theta()? },
            "controlled_phase" => GateKind::ControlledPhase {
                theta: need_theta()?,
                control_value: self.control_value,
            },
            "crot" => GateKind::Crot {
                control_value: need_value()?,
                inverse: false,
            },
            "crot_dag" => GateKind::Crot {
                control_value: need_value()?,
                inverse: true,
            },
            "custom" => {
                let rows = self
                    .matrix
                    .as_ref()
                    .ok_or_else(|| Error::argument("custom gate needs matrix"))?;
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(Error::shape("custom gate matrix is not square"));
                }
                let m = DMatrix::from_fn(n, n, |r, c| Complex::new(rows[r][c][0], rows[r][c][1]));
                return GateOp::custom(self.targets, m);
            }
            other => return Err(Error::argument(format!("unknown gate kind '{other}'"))),
        };
        Ok(GateOp {
            kind,
            targets: self.targets,
        })
    }
}
