//! Effective POVMs and the operator-valued kernel of a channel.
//!
//! Pushing a channel into the measurement gives `F_k = E^dagger(|k><k|)`.
//! The kernel `K(s, t) = E(|s><t|)` is the Schrödinger-picture counterpart,
//! related by `<k|K(l, r)|k> = <r|F_k|l>`.

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue_hermitian, ComplexMatrix, PHYSICAL_TOL};

/// A computational-basis measurement seen through a noise channel: one
/// positive operator per outcome, summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

/// Worst-case violation of each POVM axiom over all elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmDefects {
    pub hermiticity: f64,
    /// Smallest eigenvalue over all elements.
    pub min_eigenvalue: f64,
    /// Largest absolute entry of `sum_k F_k - I`.
    pub completeness: f64,
}

impl PovmDefects {
    pub fn measure(elements: &[ComplexMatrix]) -> Result<Self> {
        let dim = elements.first().map_or(0, ComplexMatrix::dim);
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "elements",
                reason: "a POVM needs at least one element".into(),
            });
        }
        let mut hermiticity: f64 = 0.0;
        let mut min_eigenvalue = f64::INFINITY;
        let mut sum = ComplexMatrix::zeros(dim);
        for f in elements {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: f.dim(),
                });
            }
            hermiticity = hermiticity.max(f.hermiticity_defect());
            min_eigenvalue = min_eigenvalue.min(min_eigenvalue_hermitian(f)?);
            sum = &sum + f;
        }
        Ok(Self {
            hermiticity,
            min_eigenvalue,
            completeness: sum.max_abs_diff(&ComplexMatrix::identity(dim)),
        })
    }

    /// First violated axiom at `tol`, if any.
    pub fn check(&self, tol: f64) -> Result<()> {
        if self.hermiticity > tol {
            return Err(Error::PovmAxiom {
                axiom: "hermiticity",
                defect: self.hermiticity,
                tol,
            });
        }
        if self.min_eigenvalue < -tol {
            return Err(Error::PovmAxiom {
                axiom: "positivity",
                defect: -self.min_eigenvalue,
                tol,
            });
        }
        if self.completeness > tol {
            return Err(Error::PovmAxiom {
                axiom: "completeness",
                defect: self.completeness,
                tol,
            });
        }
        Ok(())
    }
}

impl Povm {
    /// Builds a POVM with one element per computational-basis outcome,
    /// rejecting any axiom violation beyond [`PHYSICAL_TOL`].
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let defects = PovmDefects::measure(&elements)?;
        let dim = elements[0].dim();
        if elements.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                found: elements.len(),
            });
        }
        defects.check(PHYSICAL_TOL)?;
        Ok(Self { dim, elements })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &ComplexMatrix {
        &self.elements[k]
    }
}

/// `F_k = sum_a E_a^dagger |k><k| E_a` for every outcome `k`.
pub fn effective_povm(ch: &KrausChannel) -> Result<Povm> {
    let dim = ch.dim();
    let elements = (0..dim)
        .map(|k| ch.adjoint_apply(&ComplexMatrix::basis(dim, k, k)))
        .collect::<Result<Vec<_>>>()?;
    Povm::new(elements)
}

/// `K(s, t) = E(|s><t|)`.
pub fn kernel(ch: &KrausChannel, s: usize, t: usize) -> Result<ComplexMatrix> {
    let dim = ch.dim();
    for index in [s, t] {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
    }
    ch.apply(&ComplexMatrix::basis(dim, s, t))
}

/// `max_{k, l != r} |<k|K(l, r)|k>|`; zero exactly when the classical
/// assignment model is exact for this channel.
pub fn kernel_diag_defect(ch: &KrausChannel) -> f64 {
    let dim = ch.dim();
    let mut worst: f64 = 0.0;
    for l in 0..dim {
        for r in 0..dim {
            if l == r {
                continue;
            }
            let k_lr = kernel(ch, l, r).expect("indices in range");
            for k in 0..dim {
                worst = worst.max(k_lr.get(k, k).norm());
            }
        }
    }
    worst
}

/// `max_{k, l != r} |<r|F_k|l>|`.
pub fn povm_offdiag_defect(p: &Povm) -> f64 {
    let mut worst: f64 = 0.0;
    for f in &p.elements {
        for r in 0..p.dim {
            for l in 0..p.dim {
                if l != r {
                    worst = worst.max(f.get(r, l).norm());
                }
            }
        }
    }
    worst
}
