//! Physically constrained mitigation for the underdetermined system
//! `z = B v`, `B = [A C]`, `v = [x; y]`.
//!
//! The solver minimizes `1/2 ||z - B v||^2` over the set of `v` whose
//! reconstructed matrix is a density matrix. Iterates are kept in the
//! Frobenius-orthonormal coordinates `u = (x, sqrt(2) y)`, where the
//! Euclidean projection onto the feasible set is the eigenvalue projection
//! of the reconstructed matrix onto the probability simplex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, project_to_simplex, ComplexMatrix, RealMatrix};
use crate::model::{ProbabilityVector, ReadoutModel};
use crate::state::{coherence_len, decompose_matrix, reconstruct, StateDecomposition};

const POWER_ITERATIONS: usize = 200;
const POWER_TOL: f64 = 1e-10;
const STAGNATION_TOL: f64 = 1e-12;
const MAX_BACKTRACKS: usize = 30;
const SINGULAR_PIVOT_TOL: f64 = 1e-12;

/// Norm used for the data-fit term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitNorm {
    #[default]
    Euclidean,
}

/// Objective minimized over the feasible set. Only the plain least-squares
/// fit exists; sparsity-seeking variants would slot in here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    #[default]
    LeastSquares,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Gradient step; `None` uses `1 / L` with `L` the largest eigenvalue of
    /// the normal matrix.
    pub step_size: Option<f64>,
    /// Stop once `||z - B v||` falls to this value.
    pub residual_tol: f64,
    pub norm: FitNorm,
    pub objective: Objective,
    /// Seeds the power-iteration start vector.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            step_size: None,
            residual_tol: 1e-9,
            norm: FitNorm::Euclidean,
            objective: Objective::LeastSquares,
            seed: 0,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iterations",
                reason: "must be at least 1".into(),
            });
        }
        if let Some(step) = self.step_size {
            if !(step > 0.0 && step.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "step_size",
                    reason: format!("{step} is not a positive finite number"),
                });
            }
        }
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "residual_tol",
                reason: format!("{} is not positive", self.residual_tol),
            });
        }
        Ok(())
    }
}

/// Observed probabilities together with the model that produced them.
#[derive(Debug, Clone)]
pub struct MitigationProblem {
    model: ReadoutModel,
    z: ProbabilityVector,
}

impl MitigationProblem {
    pub fn new(model: ReadoutModel, z: ProbabilityVector) -> Result<Self> {
        if z.len() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                found: z.len(),
            });
        }
        if z.as_slice().iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("observed probabilities"));
        }
        Ok(Self { model, z })
    }

    pub fn model(&self) -> &ReadoutModel {
        &self.model
    }

    pub fn observed(&self) -> &ProbabilityVector {
        &self.z
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigationResult {
    #[serde(skip)]
    pub v_hat: Vec<f64>,
    #[serde(rename = "x")]
    pub x_hat: Vec<f64>,
    #[serde(rename = "y")]
    pub y_hat: Vec<f64>,
    /// `||z - B v_hat||`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `1/2 ||z - B v||^2` for the start point and every accepted iterate.
    #[serde(skip)]
    pub objective_history: Vec<f64>,
}

/// `B = [A C]`, with columns ordered like `[x; y]`.
pub fn assemble_b(m: &ReadoutModel) -> RealMatrix {
    m.a().hstack(m.c()).expect("A and C share their row count")
}

/// Nearest density matrix (Frobenius norm) to the Hermitian matrix with
/// populations `x` and coherences `y`, returned in decomposed form.
pub fn project_to_density_set(x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let dim = x.len();
    let d = StateDecomposition {
        x: x.to_vec(),
        y: y.to_vec(),
    };
    let m = reconstruct(&d, dim)?;
    let projected = project_matrix(&m)?;
    let out = decompose_matrix(&projected);
    Ok((out.x, out.y))
}

fn project_matrix(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(m)?;
    let clipped = project_to_simplex(&eig.values);
    Ok(ComplexMatrix::from_eigen(&clipped, &eig.vectors))
}

/// Classical baseline: solve `A x' = z`, then project `x'` onto the simplex.
pub fn classical_invert(m: &ReadoutModel, z: &ProbabilityVector) -> Result<Vec<f64>> {
    if z.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: z.len(),
        });
    }
    let raw = m.a().solve(z.as_slice(), SINGULAR_PIVOT_TOL)?;
    Ok(project_to_simplex(&raw))
}

/// Working state in orthonormal coordinates `u = W^{1/2} v`,
/// `W = diag(1, .., 1, 2, .., 2)`.
struct Scaled {
    dim: usize,
    b: RealMatrix,
}

impl Scaled {
    fn new(m: &ReadoutModel) -> Self {
        let dim = m.dim();
        let mut b = assemble_b(m);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        for r in 0..b.rows() {
            for col in dim..b.cols() {
                let v = b.get(r, col);
                b.set(r, col, v * inv_sqrt2);
            }
        }
        Self { dim, b }
    }

    fn to_u(&self, v: &[f64]) -> Vec<f64> {
        let s = std::f64::consts::SQRT_2;
        v.iter()
            .enumerate()
            .map(|(i, &x)| if i < self.dim { x } else { x * s })
            .collect()
    }

    fn to_v(&self, u: &[f64]) -> Vec<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        u.iter()
            .enumerate()
            .map(|(i, &x)| if i < self.dim { x } else { x * s })
            .collect()
    }

    fn residual(&self, u: &[f64], z: &[f64]) -> Vec<f64> {
        self.b
            .matvec(u)
            .into_iter()
            .zip(z)
            .map(|(p, q)| p - q)
            .collect()
    }

    fn project(&self, u: &[f64]) -> Result<Vec<f64>> {
        let v = self.to_v(u);
        let (x, y) = project_to_density_set(&v[..self.dim], &v[self.dim..])?;
        Ok(self.to_u(&[x, y].concat()))
    }

    /// Largest eigenvalue of `B^T B` by power iteration.
    fn lipschitz(&self, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w: Vec<f64> = (0..self.b.cols()).map(|_| rng.random::<f64>() + 0.5).collect();
        normalize(&mut w);
        let mut estimate = 0.0;
        for _ in 0..POWER_ITERATIONS {
            let mut next = self.b.transpose_matvec(&self.b.matvec(&w));
            let norm = norm2(&next);
            if norm == 0.0 {
                break;
            }
            next.iter_mut().for_each(|x| *x /= norm);
            let converged = (norm - estimate).abs() <= POWER_TOL * norm;
            estimate = norm;
            w = next;
            if converged {
                break;
            }
        }
        estimate
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Projected gradient descent on `1/2 ||z - B v||^2` over density matrices,
/// starting from the maximally mixed state.
pub fn mitigate(p: &MitigationProblem, opts: &SolverOptions) -> Result<MitigationResult> {
    opts.validate()?;
    let dim = p.model.dim();
    let z = p.z.as_slice();
    let scaled = Scaled::new(&p.model);

    let step0 = match opts.step_size {
        Some(step) => step,
        None => {
            let lipschitz = scaled.lipschitz(opts.seed);
            if !(lipschitz > 0.0 && lipschitz.is_finite()) {
                return Err(Error::NonFinite("Lipschitz constant of the fit"));
            }
            1.0 / lipschitz
        }
    };

    let mut u = vec![0.0; dim * dim];
    u[..dim].iter_mut().for_each(|x| *x = 1.0 / dim as f64);
    let mut r = scaled.residual(&u, z);
    let mut objective = 0.5 * norm2(&r).powi(2);
    let mut history = vec![objective];
    let mut iterations = 0;
    let mut converged = norm2(&r) <= opts.residual_tol;

    while !converged && iterations < opts.max_iterations {
        iterations += 1;
        let grad = scaled.b.transpose_matvec(&r);
        let mut step = step0;
        let mut accepted = None;
        for _ in 0..=MAX_BACKTRACKS {
            let trial: Vec<f64> = u.iter().zip(&grad).map(|(a, g)| a - step * g).collect();
            let candidate = scaled.project(&trial)?;
            let cand_r = scaled.residual(&candidate, z);
            let cand_obj = 0.5 * norm2(&cand_r).powi(2);
            if !cand_obj.is_finite() {
                return Err(Error::NonFinite("solver objective"));
            }
            if cand_obj <= objective {
                accepted = Some((candidate, cand_r, cand_obj));
                break;
            }
            step *= 0.5;
        }
        let Some((candidate, cand_r, cand_obj)) = accepted else {
            // No descent possible at any tried step: the iterate is stationary
            // to working precision.
            converged = true;
            break;
        };
        let displacement = norm2(
            &candidate
                .iter()
                .zip(&u)
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        );
        u = candidate;
        r = cand_r;
        objective = cand_obj;
        history.push(objective);
        if norm2(&r) <= opts.residual_tol || displacement < STAGNATION_TOL {
            converged = true;
        }
    }

    let v_hat = scaled.to_v(&u);
    Ok(MitigationResult {
        x_hat: v_hat[..dim].to_vec(),
        y_hat: v_hat[dim..].to_vec(),
        v_hat,
        residual: norm2(&r),
        iterations,
        converged,
        objective_history: history,
    })
}

/// Checks that `(x, y)` decode to a density matrix within `tol`.
pub fn is_physical(x: &[f64], y: &[f64], tol: f64) -> bool {
    if y.len() != coherence_len(x.len()) {
        return false;
    }
    let d = StateDecomposition {
        x: x.to_vec(),
        y: y.to_vec(),
    };
    let Ok(m) = reconstruct(&d, x.len()) else {
        return false;
    };
    let Ok(eig) = eigh(&m) else {
        return false;
    };
    (m.trace().re - 1.0).abs() <= tol && eig.values[0] >= -tol
}
