//! The coherence-sensitive readout model `z = A x + C y`.
//!
//! `A[k][l] = <l|F_k|l>` is the usual assignment matrix. Column `2p` of `C`
//! (pair `p = (l, r)`, `l < r`) holds `2 Re <r|F_k|l>` and column `2p + 1`
//! holds `2 Im <l|F_k|r>`, so that
//!
//! ```text
//! z_k = Tr(F_k rho) = sum_l A_kl x_l + sum_{l<r} (C_k,2p Re c_lr + C_k,2p+1 Im c_lr)
//! ```
//!
//! holds literally with `c_lr = <l|rho|r>`. The imaginary column pairs the
//! coherence with `Im <l|F_k|r> = -Im <r|F_k|l>`; the superoperator oracle
//! test below fixes this orientation.

use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{RealMatrix, PHYSICAL_TOL, STRUCTURAL_TOL};
use crate::povm::Povm;
use crate::state::{coherence_len, pair_index, pairs, DensityMatrix, StateDecomposition};

/// Vector of outcome probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbabilityVector(pub Vec<f64>);

impl ProbabilityVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// `max_k |self_k - other_k|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len(), "length mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Checks entries are `>= -tol` and sum to one within `tol`.
    pub fn check_physical(&self, tol: f64) -> Result<()> {
        if self.0.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("probability vector"));
        }
        if let Some(p) = self.0.iter().find(|&&p| p < -tol) {
            return Err(Error::NotPhysical(format!("negative probability {p}")));
        }
        let s = self.sum();
        if (s - 1.0).abs() > tol {
            return Err(Error::NotPhysical(format!("probabilities sum to {s}")));
        }
        Ok(())
    }
}

/// Matrix norm used to summarize `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceNorm {
    /// Largest absolute entry.
    Max,
    Frobenius,
}

/// Assignment matrix `A` (N x N) and coherence-response matrix `C`
/// (N x N(N-1)).
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutModel {
    dim: usize,
    a: RealMatrix,
    c: RealMatrix,
}

impl ReadoutModel {
    /// Builds a model from explicit matrices, checking shapes and the
    /// structural invariants: columns of `A` lie in `[0, 1]` and sum to one,
    /// columns of `C` sum to zero.
    pub fn new(a: RealMatrix, c: RealMatrix) -> Result<Self> {
        Self::with_tolerance(a, c, PHYSICAL_TOL)
    }

    pub fn with_tolerance(a: RealMatrix, c: RealMatrix, tol: f64) -> Result<Self> {
        let dim = a.rows();
        if dim == 0 || a.cols() != dim {
            return Err(Error::InvalidModel(format!(
                "A must be square and non-empty, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if c.rows() != dim || c.cols() != coherence_len(dim) {
            return Err(Error::InvalidModel(format!(
                "C must be {dim}x{}, got {}x{}",
                coherence_len(dim),
                c.rows(),
                c.cols()
            )));
        }
        for (l, s) in a.column_sums().iter().enumerate() {
            if (s - 1.0).abs() > tol {
                return Err(Error::InvalidModel(format!("column {l} of A sums to {s}")));
            }
        }
        for k in 0..dim {
            for l in 0..dim {
                let v = a.get(k, l);
                if v < -tol || v > 1.0 + tol {
                    return Err(Error::InvalidModel(format!("A[{k}][{l}] = {v} outside [0, 1]")));
                }
            }
        }
        for (j, s) in c.column_sums().iter().enumerate() {
            if s.abs() > tol {
                return Err(Error::InvalidModel(format!("column {j} of C sums to {s}")));
            }
        }
        Ok(Self { dim, a, c })
    }

    /// Model with `A = I`, `C = 0`.
    pub fn ideal(dim: usize) -> Self {
        let mut a = RealMatrix::zeros(dim, dim);
        for l in 0..dim {
            a.set(l, l, 1.0);
        }
        Self {
            dim,
            a,
            c: RealMatrix::zeros(dim, coherence_len(dim)),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn a(&self) -> &RealMatrix {
        &self.a
    }

    #[inline]
    pub fn c(&self) -> &RealMatrix {
        &self.c
    }

    fn check_len(&self, found: usize, expected: usize) -> Result<()> {
        if found != expected {
            return Err(Error::DimensionMismatch { expected, found });
        }
        Ok(())
    }
}

/// Reads `A` and `C` off the matrix elements of the POVM.
pub fn extract(p: &Povm) -> Result<ReadoutModel> {
    let dim = p.dim();
    let mut a = RealMatrix::zeros(dim, dim);
    let mut c = RealMatrix::zeros(dim, coherence_len(dim));
    for (k, f) in p.elements().iter().enumerate() {
        for l in 0..dim {
            let alpha = f.get(l, l);
            if alpha.im.abs() > STRUCTURAL_TOL {
                return Err(Error::PovmAxiom {
                    axiom: "hermiticity",
                    defect: alpha.im.abs(),
                    tol: STRUCTURAL_TOL,
                });
            }
            a.set(k, l, alpha.re);
        }
        for (l, r) in pairs(dim) {
            let col = 2 * pair_index(l, r, dim);
            c.set(k, col, 2.0 * f.get(r, l).re);
            c.set(k, col + 1, 2.0 * f.get(l, r).im);
        }
    }
    ReadoutModel::new(a, c)
}

/// `z = A x + C y`.
pub fn forward(m: &ReadoutModel, d: &StateDecomposition) -> Result<ProbabilityVector> {
    m.check_len(d.x.len(), m.dim)?;
    m.check_len(d.y.len(), coherence_len(m.dim))?;
    let z = (0..m.dim)
        .map(|k| {
            let populations = m.a.row(k).iter().zip(&d.x);
            let coherences = m.c.row(k).iter().zip(&d.y);
            populations.chain(coherences).map(|(a, b)| a * b).sum()
        })
        .collect();
    Ok(ProbabilityVector(z))
}

/// Classical prediction `z = A x`, ignoring coherences.
pub fn classical_forward(m: &ReadoutModel, x: &[f64]) -> Result<ProbabilityVector> {
    m.check_len(x.len(), m.dim)?;
    Ok(ProbabilityVector(m.a.matvec(x)))
}

/// Outcome probabilities from the full superoperator: the diagonal of
/// `unvec(H vec(rho))`. Shares no code with the POVM coefficient path.
pub fn oracle_probabilities(ch: &KrausChannel, rho: &DensityMatrix) -> Result<ProbabilityVector> {
    let out = ch.superoperator().apply(rho.matrix())?;
    Ok(ProbabilityVector(
        (0..ch.dim()).map(|k| out.get(k, k).re).collect(),
    ))
}

/// Norm of `C`: zero exactly when the readout is classical.
pub fn nonclassicality(m: &ReadoutModel, norm: CoherenceNorm) -> f64 {
    match norm {
        CoherenceNorm::Max => m.c.max_abs(),
        CoherenceNorm::Frobenius => m.c.frobenius_norm(),
    }
}
