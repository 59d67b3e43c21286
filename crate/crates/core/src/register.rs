//! Mixed-radix register bookkeeping.
//!
//! A register is an ordered list of qudit dimensions `d = (d_1, ..., d_n)`.
//! Flat basis indices are big-endian: qudit 1 is the most significant digit,
//!
//! ```text
//! k = k_n + sum_{l<n} k_l * prod_{m>l} d_m
//! ```
//!
//! The generalized QFT reads its input in the opposite order (qudit 1 least
//! significant). [`DigitReversal`] maps between the two readings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for structural invariants (norms, traces, unitarity).
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Default cap on the total dimension of dense `N x N` objects.
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Numeric limits shared by state validation and dense matrix construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub tolerance: f64,
    pub dense_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            tolerance: DEFAULT_TOLERANCE,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

impl Limits {
    /// Capacity error when a dense `dim x dim` matrix would exceed the cap.
    pub fn check_dense(&self, dim: usize) -> Result<()> {
        if dim > self.dense_cap {
            return Err(Error::Capacity {
                dim,
                cap: self.dense_cap,
            });
        }
        Ok(())
    }
}

/// Ordered qudit dimensions of a hybrid register.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct DimensionVector {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl DimensionVector {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::argument("register needs at least one qudit"));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::argument(format!("qudit dimension {d} < 2")));
        }
        let mut strides = vec![1usize; dims.len()];
        let mut total = 1usize;
        for (i, &d) in dims.iter().enumerate().rev() {
            strides[i] = total;
            total = total
                .checked_mul(d)
                .ok_or_else(|| Error::argument("register dimension overflows usize"))?;
        }
        Ok(DimensionVector {
            dims,
            strides,
            total,
        })
    }

    /// `n` qubits.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total Hilbert-space dimension `N = prod d_i`.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn dim(&self, qudit: usize) -> usize {
        self.dims[qudit]
    }

    /// Place value of qudit `l` in the flat index, `prod_{m>l} d_m`.
    ///
    /// This is also the phase weight qudit `l` carries in a phase-ladder state.
    pub fn stride(&self, qudit: usize) -> usize {
        self.strides[qudit]
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn is_qubit_only(&self) -> bool {
        self.dims.iter().all(|&d| d == 2)
    }

    /// Digit of `qudit` in the flat index (no range check on `flat`).
    #[inline]
    pub fn digit(&self, flat: usize, qudit: usize) -> usize {
        (flat / self.strides[qudit]) % self.dims[qudit]
    }

    pub(crate) fn check_qudit(&self, qudit: usize) -> Result<()> {
        if qudit >= self.len() {
            return Err(Error::shape(format!(
                "qudit {qudit} does not exist in a {}-qudit register",
                self.len()
            )));
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for DimensionVector {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        DimensionVector::new(dims)
    }
}

impl From<DimensionVector> for Vec<usize> {
    fn from(d: DimensionVector) -> Self {
        d.dims
    }
}

impl std::fmt::Display for DimensionVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "}}")
    }
}

/// A basis label in both flat and digit form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterIndex {
    pub digits: Vec<usize>,
    pub flat: usize,
}

/// Mixed-radix decomposition of `flat`, most significant digit first.
pub fn index_to_digits(flat: usize, dims: &DimensionVector) -> Result<RegisterIndex> {
    if flat >= dims.total() {
        return Err(Error::Range {
            index: flat,
            dim: dims.total(),
        });
    }
    let digits = (0..dims.len()).map(|q| dims.digit(flat, q)).collect();
    Ok(RegisterIndex { digits, flat })
}

/// Inverse of [`index_to_digits`].
pub fn digits_to_index(digits: &[usize], dims: &DimensionVector) -> Result<RegisterIndex> {
    if digits.len() != dims.len() {
        return Err(Error::shape(format!(
            "{} digits for a {}-qudit register",
            digits.len(),
            dims.len()
        )));
    }
    let mut flat = 0;
    for (q, &k) in digits.iter().enumerate() {
        if k >= dims.dim(q) {
            return Err(Error::Range {
                index: k,
                dim: dims.dim(q),
            });
        }
        flat += k * dims.stride(q);
    }
    Ok(RegisterIndex {
        digits: digits.to_vec(),
        flat,
    })
}

/// Permutation between the flat (big-endian) label of a basis state and its
/// "value" reading with qudit 1 as the least significant digit,
///
/// ```text
/// value = j_1 + sum_{l>1} j_l * prod_{m<l} d_m
/// ```
///
/// The synthesized QFT satisfies `U = F * P` where `F` is the N-point DFT
/// matrix and `P |f> = |value(f)>`. Measured outcomes after an inverse QFT are
/// reported by value, so a phase `2 pi k / N` reads out as `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitReversal {
    to_value: Vec<usize>,
    to_flat: Vec<usize>,
}

impl DigitReversal {
    pub fn new(dims: &DimensionVector) -> Self {
        let n = dims.total();
        let mut place = vec![1usize; dims.len()];
        for q in 1..dims.len() {
            place[q] = place[q - 1] * dims.dim(q - 1);
        }
        let to_value: Vec<usize> = (0..n)
            .map(|flat| (0..dims.len()).map(|q| dims.digit(flat, q) * place[q]).sum())
            .collect();
        let mut to_flat = vec![0; n];
        for (flat, &value) in to_value.iter().enumerate() {
            to_flat[value] = flat;
        }
        DigitReversal { to_value, to_flat }
    }

    pub fn value_of(&self, flat: usize) -> usize {
        self.to_value[flat]
    }

    pub fn flat_of(&self, value: usize) -> usize {
        self.to_flat[value]
    }

    pub fn len(&self) -> usize {
        self.to_value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_value.is_empty()
    }

    /// Relabel a flat-indexed distribution by value.
    pub fn relabel(&self, flat_dist: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; flat_dist.len()];
        for (flat, &p) in flat_dist.iter().enumerate() {
            out[self.to_value[flat]] = p;
        }
        out
    }

    /// Dense permutation matrix with `P[value(f), f] = 1`.
    pub fn matrix(&self) -> nalgebra::DMatrix<crate::Complex> {
        let n = self.len();
        let mut p = nalgebra::DMatrix::zeros(n, n);
        for flat in 0..n {
            p[(self.to_value[flat], flat)] = crate::Complex::new(1.0, 0.0);
        }
        p
    }
}
