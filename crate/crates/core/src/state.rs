//! Density matrices and their population/coherence decomposition.
//!
//! For `N x N` rho the populations are `x_l = <l|rho|l>` and the coherence
//! vector stacks `(Re c_lr, Im c_lr)` for every pair `l < r` in
//! lexicographic order, where `c_lr = <l|rho|r>`:
//!
//! ```text
//! y = [Re c_01, Im c_01, Re c_02, Im c_02, ..., Re c_(N-2)(N-1), Im c_(N-2)(N-1)]
//! ```

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channels::MAX_DIM;
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue_hermitian, ComplexMatrix, PHYSICAL_TOL};

/// Number of coherence coordinates, `N (N - 1)`.
#[inline]
pub fn coherence_len(dim: usize) -> usize {
    dim * dim.saturating_sub(1)
}

/// Position of the pair `(l, r)`, `l < r`, among all such pairs in
/// lexicographic order. The real part sits at `2 * idx`, the imaginary part
/// at `2 * idx + 1`.
#[inline]
pub fn pair_index(l: usize, r: usize, dim: usize) -> usize {
    debug_assert!(l < r && r < dim);
    l * dim - l * (l + 1) / 2 + (r - l - 1)
}

/// Iterator over `(l, r)` pairs with `l < r`, in storage order.
pub fn pairs(dim: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..dim).flat_map(move |l| (l + 1..dim).map(move |r| (l, r)))
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` at [`PHYSICAL_TOL`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, PHYSICAL_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if matrix.dim() > MAX_DIM {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: format!("{} exceeds the supported maximum {MAX_DIM}", matrix.dim()),
            });
        }
        let herm = matrix.hermiticity_defect();
        if herm > tol {
            return Err(Error::NotPhysical(format!(
                "hermiticity defect {herm:e} exceeds {tol:e}"
            )));
        }
        let trace = matrix.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::NotPhysical(format!(
                "trace {} differs from 1 by more than {tol:e}",
                trace.re
            )));
        }
        let min_eig = min_eigenvalue_hermitian(&matrix)?;
        if min_eig < -tol {
            return Err(Error::NotPhysical(format!(
                "minimum eigenvalue {min_eig:e} below -{tol:e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Pure state `|psi><psi|` from a (not necessarily normalized) vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.is_empty() || !(norm2 > 0.0) || !norm2.is_finite() {
            return Err(Error::NotPhysical("state vector has zero or non-finite norm".into()));
        }
        let m = ComplexMatrix::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj() / norm2);
        Self::new(m)
    }

    /// `|l><l|`.
    pub fn basis_state(dim: usize, l: usize) -> Self {
        Self {
            matrix: ComplexMatrix::basis(dim, l, l),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// Populations `x` and interleaved coherences `y` of a state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDecomposition {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl StateDecomposition {
    /// Checks that the lengths describe an `N`-dimensional state and returns `N`.
    pub fn dim(&self) -> Result<usize> {
        let n = self.x.len();
        if n == 0 {
            return Err(Error::LengthMismatch {
                expected: 1,
                found: 0,
            });
        }
        if self.y.len() != coherence_len(n) {
            return Err(Error::LengthMismatch {
                expected: coherence_len(n),
                found: self.y.len(),
            });
        }
        Ok(n)
    }

    /// `c_lr` for `l < r`.
    pub fn coherence(&self, l: usize, r: usize) -> Complex64 {
        let idx = 2 * pair_index(l, r, self.x.len());
        Complex64::new(self.y[idx], self.y[idx + 1])
    }

    /// Stacked `v = [x; y]`.
    pub fn to_vector(&self) -> Vec<f64> {
        self.x.iter().chain(&self.y).copied().collect()
    }

    /// Splits `v = [x; y]` for an `N`-dimensional state.
    pub fn from_vector(v: &[f64], dim: usize) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                found: v.len(),
            });
        }
        Ok(Self {
            x: v[..dim].to_vec(),
            y: v[dim..].to_vec(),
        })
    }
}

/// Decomposes any Hermitian matrix. Only the upper triangle is read for
/// coherences, so non-Hermitian input loses its lower triangle.
pub fn decompose_matrix(m: &ComplexMatrix) -> StateDecomposition {
    let n = m.dim();
    let x = (0..n).map(|l| m.get(l, l).re).collect();
    let mut y = Vec::with_capacity(coherence_len(n));
    for (l, r) in pairs(n) {
        let c = m.get(l, r);
        y.push(c.re);
        y.push(c.im);
    }
    StateDecomposition { x, y }
}

pub fn decompose(rho: &DensityMatrix) -> StateDecomposition {
    decompose_matrix(rho.matrix())
}

/// Hermitian matrix with populations `x` and coherences `y`. Positivity is
/// not guaranteed; wrap the result in [`DensityMatrix::new`] to check it.
pub fn reconstruct(d: &StateDecomposition, dim: usize) -> Result<ComplexMatrix> {
    if d.x.len() != dim {
        return Err(Error::LengthMismatch {
            expected: dim,
            found: d.x.len(),
        });
    }
    d.dim()?;
    if d.x.iter().chain(&d.y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("state decomposition"));
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (l, &xl) in d.x.iter().enumerate() {
        entries[l * dim + l] = Complex64::new(xl, 0.0);
    }
    for (l, r) in pairs(dim) {
        let c = d.coherence(l, r);
        entries[l * dim + r] = c;
        entries[r * dim + l] = c.conj();
    }
    ComplexMatrix::new(dim, entries)
}

/// Random full-rank density matrix `G G^dagger / Tr(G G^dagger)` with complex
/// Gaussian `G`, deterministic per seed.
pub fn random_density(n_qubits: usize, seed: u64) -> Result<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_density_with(n_qubits, &mut rng)
}

pub fn random_density_with<R: rand::Rng + ?Sized>(
    n_qubits: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if n_qubits == 0 || 1usize << n_qubits > MAX_DIM {
        return Err(Error::InvalidParameter {
            name: "n_qubits",
            reason: format!("{n_qubits} outside 1..=6"),
        });
    }
    let dim = 1 << n_qubits;
    let g = ComplexMatrix::random_gaussian(dim, rng);
    let p = &g * &g.adjoint();
    let tr = p.trace().re;
    // Symmetrize away rounding so the result is exactly Hermitian.
    DensityMatrix::new(p.scale_real(1.0 / tr).hermitian_part())
}
