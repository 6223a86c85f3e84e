//! CPTP channels in Kraus form.
//!
//! A channel acts as `rho -> sum_a E_a rho E_a^dagger` and is trace preserving
//! when `sum_a E_a^dagger E_a = I`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{eigh, kron, unvec, vec, ComplexMatrix, PHYSICAL_TOL};

/// Upper bound on the Hilbert-space dimension handled by the library.
pub const MAX_DIM: usize = 64;
/// Upper bound on the number of Kraus operators in a single channel.
pub const MAX_KRAUS: usize = 4096;

/// Ordered list of Kraus operators defining a CPTP map.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    ops: Vec<ComplexMatrix>,
}

/// Outcome of a trace-preservation check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpReport {
    /// Largest absolute entry of `sum_a E_a^dagger E_a - I`.
    pub defect: f64,
    pub tol: f64,
    pub passed: bool,
}

impl KrausChannel {
    /// Builds a channel and checks trace preservation at [`PHYSICAL_TOL`].
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::new_unchecked(ops)?;
        let report = ch.validate_cptp(PHYSICAL_TOL);
        if !report.passed {
            return Err(Error::NotTracePreserving {
                defect: report.defect,
                tol: report.tol,
            });
        }
        Ok(ch)
    }

    /// Builds a Kraus list with only structural checks (non-empty, equal
    /// dimensions). Use [`KrausChannel::validate_cptp`] to inspect it.
    pub fn new_unchecked(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = match ops.first() {
            Some(op) => op.dim(),
            None => {
                return Err(Error::InvalidParameter {
                    name: "kraus",
                    reason: "at least one Kraus operator is required".into(),
                })
            }
        };
        if dim > MAX_DIM {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: format!("{dim} exceeds the supported maximum {MAX_DIM}"),
            });
        }
        if ops.len() > MAX_KRAUS {
            return Err(Error::InvalidParameter {
                name: "kraus",
                reason: format!("{} operators exceed the maximum {MAX_KRAUS}", ops.len()),
            });
        }
        if let Some(bad) = ops.iter().find(|op| op.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { dim, ops })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            ops: vec![ComplexMatrix::identity(dim)],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    /// `sum_a E_a^dagger E_a`.
    pub fn completeness(&self) -> ComplexMatrix {
        self.ops
            .iter()
            .map(|e| &e.adjoint() * e)
            .fold(ComplexMatrix::zeros(self.dim), |acc, m| &acc + &m)
    }

    pub fn validate_cptp(&self, tol: f64) -> CptpReport {
        let defect = self
            .completeness()
            .max_abs_diff(&ComplexMatrix::identity(self.dim));
        CptpReport {
            defect,
            tol,
            passed: defect <= tol,
        }
    }

    fn check_dim(&self, m: &ComplexMatrix) -> Result<()> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: m.dim(),
            });
        }
        Ok(())
    }

    /// Schrödinger picture: `sum_a E_a rho E_a^dagger`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(rho)?;
        Ok(self
            .ops
            .iter()
            .map(|e| &(e * rho) * &e.adjoint())
            .fold(ComplexMatrix::zeros(self.dim), |acc, m| &acc + &m))
    }

    /// Heisenberg picture: `sum_a E_a^dagger M E_a`.
    pub fn adjoint_apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(m)?;
        Ok(self
            .ops
            .iter()
            .map(|e| &(&e.adjoint() * m) * e)
            .fold(ComplexMatrix::zeros(self.dim), |acc, x| &acc + &x))
    }

    /// Kraus list `{E_a (x) F_b}` acting on the joint space.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.dim * other.dim;
        let count = self.ops.len() * other.ops.len();
        if dim > MAX_DIM || count > MAX_KRAUS {
            return Err(Error::InvalidParameter {
                name: "tensor",
                reason: format!("product channel too large (dim {dim}, {count} operators)"),
            });
        }
        let ops = self
            .ops
            .iter()
            .flat_map(|a| other.ops.iter().map(move |b| kron(a, b)))
            .collect();
        Ok(Self { dim, ops })
    }

    /// `self` applied after `inner`: Kraus list `{E_out E_in}`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if self.dim != inner.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: inner.dim,
            });
        }
        let count = self.ops.len() * inner.ops.len();
        if count > MAX_KRAUS {
            return Err(Error::InvalidParameter {
                name: "compose",
                reason: format!("{count} operators exceed the maximum {MAX_KRAUS}"),
            });
        }
        let ops = self
            .ops
            .iter()
            .flat_map(|outer| inner.ops.iter().map(move |e| outer * e))
            .collect();
        Ok(Self { dim: self.dim, ops })
    }

    /// Superoperator `H = sum_a conj(E_a) (x) E_a`, so that
    /// `vec(apply(rho)) = H vec(rho)` under column stacking.
    pub fn superoperator(&self) -> Superoperator {
        let n2 = self.dim * self.dim;
        let matrix = self
            .ops
            .iter()
            .map(|e| kron(&e.conj(), e))
            .fold(ComplexMatrix::zeros(n2), |acc, m| &acc + &m);
        Superoperator {
            dim: self.dim,
            matrix,
        }
    }
}

/// Matrix representation of a channel on column-stacked density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    /// Hilbert-space dimension `N`; the matrix itself is `N^2 x N^2`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `unvec(H vec(rho))`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.dim(),
            });
        }
        unvec(&self.matrix.apply_vec(&vec(rho)), self.dim)
    }
}

fn unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("{value} is outside [0, 1]"),
        });
    }
    Ok(())
}

fn pauli_matrices() -> [ComplexMatrix; 4] {
    let i = Complex64::i();
    [
        ComplexMatrix::identity(2),
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        ComplexMatrix::new(2, vec![0.0.into(), -i, i, 0.0.into()]).expect("valid Y"),
        ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]),
    ]
}

/// Single-qubit dephasing that scales coherences by `lambda`, with Kraus
/// operators `sqrt((1+lambda)/2) I` and `sqrt((1-lambda)/2) Z`.
pub fn dephasing(lambda: f64) -> Result<KrausChannel> {
    unit_interval("lambda", lambda)?;
    let [id, _, _, z] = pauli_matrices();
    Ok(KrausChannel {
        dim: 2,
        ops: vec![
            id.scale_real(((1.0 + lambda) / 2.0).sqrt()),
            z.scale_real(((1.0 - lambda) / 2.0).sqrt()),
        ],
    })
}

/// Single-qubit amplitude damping with decay probability `gamma`.
pub fn amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    unit_interval("gamma", gamma)?;
    Ok(KrausChannel {
        dim: 2,
        ops: vec![
            ComplexMatrix::from_real_diagonal(&[1.0, (1.0 - gamma).sqrt()]),
            ComplexMatrix::basis(2, 0, 1).scale_real(gamma.sqrt()),
        ],
    })
}

/// Coherent rotation `exp(-i theta Y / 2)`.
pub fn rotation_y(theta: f64) -> Result<KrausChannel> {
    if !theta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "theta",
            reason: "must be finite".into(),
        });
    }
    let (s, c) = (theta / 2.0).sin_cos();
    Ok(KrausChannel {
        dim: 2,
        ops: vec![ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]])],
    })
}

/// `n`-qubit Pauli channel with Kraus operators `sqrt(p_i) P_i`.
///
/// Pauli strings are ordered `I, X, Y, Z` per qubit with the first qubit
/// most significant, so `probs[4*a + b]` weights `P_a (x) P_b` for `n = 2`.
/// Zero-probability terms are dropped.
pub fn pauli_channel(probs: &[f64], n: usize) -> Result<KrausChannel> {
    if n == 0 || 1usize << n > MAX_DIM {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("qubit count {n} outside 1..=6"),
        });
    }
    let count = 1usize << (2 * n);
    if probs.len() != count {
        return Err(Error::LengthMismatch {
            expected: count,
            found: probs.len(),
        });
    }
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidParameter {
            name: "probs",
            reason: "probabilities must be finite and non-negative".into(),
        });
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter {
            name: "probs",
            reason: format!("probabilities sum to {total}, expected 1"),
        });
    }
    let paulis = pauli_matrices();
    let mut ops = Vec::new();
    for (index, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let mut op = ComplexMatrix::identity(1);
        for q in (0..n).rev() {
            let digit = (index >> (2 * q)) & 3;
            op = kron(&op, &paulis[digit]);
        }
        ops.push(op.scale_real(p.sqrt()));
    }
    Ok(KrausChannel { dim: 1 << n, ops })
}

/// Random CPTP channel: `kraus_count` complex Gaussian matrices normalized
/// on the right by `S^{-1/2}`, with `S = sum_a G_a^dagger G_a`.
pub fn random_channel<R: Rng + ?Sized>(
    n_qubits: usize,
    kraus_count: usize,
    rng: &mut R,
) -> Result<KrausChannel> {
    if n_qubits == 0 || 1usize << n_qubits > MAX_DIM {
        return Err(Error::InvalidParameter {
            name: "n_qubits",
            reason: format!("{n_qubits} outside 1..=6"),
        });
    }
    if kraus_count == 0 || kraus_count > MAX_KRAUS {
        return Err(Error::InvalidParameter {
            name: "kraus_count",
            reason: format!("{kraus_count} outside 1..={MAX_KRAUS}"),
        });
    }
    let dim = 1 << n_qubits;
    let raw: Vec<ComplexMatrix> = (0..kraus_count)
        .map(|_| ComplexMatrix::random_gaussian(dim, rng))
        .collect();
    let s = KrausChannel { dim, ops: raw.clone() }.completeness();
    let eig = eigh(&s)?;
    if eig.values[0] <= 0.0 {
        return Err(Error::NotPhysical("degenerate random Kraus sample".into()));
    }
    let inv_sqrt: Vec<f64> = eig.values.iter().map(|v| 1.0 / v.sqrt()).collect();
    let s_inv_sqrt = ComplexMatrix::from_eigen(&inv_sqrt, &eig.vectors);
    KrausChannel::new(raw.iter().map(|g| g * &s_inv_sqrt).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hs_inner;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
        ComplexMatrix::random_gaussian(dim, rng).hermitian_part()
    }

    fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
        let g = ComplexMatrix::random_gaussian(dim, rng);
        let p = &g * &g.adjoint();
        let tr = p.trace().re;
        p.scale_real(1.0 / tr)
    }

    fn zoo() -> Vec<KrausChannel> {
        vec![
            KrausChannel::identity(2),
            dephasing(0.5).unwrap(),
            dephasing(0.0).unwrap(),
            amplitude_damping(0.3).unwrap(),
            amplitude_damping(1.0).unwrap(),
            rotation_y(0.3).unwrap(),
            rotation_y(std::f64::consts::PI).unwrap(),
            pauli_channel(&[0.7, 0.1, 0.1, 0.1], 1).unwrap(),
        ]
    }

    #[test]
    fn validate_cptp_examples() {
        let r = KrausChannel::identity(2).validate_cptp(1e-10);
        assert!(r.passed);
        assert_eq!(r.defect, 0.0);
        assert!(amplitude_damping(0.3).unwrap().validate_cptp(1e-10).passed);

        let halved =
            KrausChannel::new_unchecked(vec![ComplexMatrix::identity(2).scale_real(0.5)]).unwrap();
        let r = halved.validate_cptp(1e-10);
        assert!(!r.passed);
        assert!((r.defect - 0.75).abs() < 1e-12);
        assert!(matches!(
            KrausChannel::new(vec![ComplexMatrix::identity(2).scale_real(0.5)]),
            Err(Error::NotTracePreserving { .. })
        ));
    }

    #[test]
    fn constructor_structure_errors() {
        assert!(KrausChannel::new_unchecked(vec![]).is_err());
        assert!(matches!(
            KrausChannel::new_unchecked(vec![
                ComplexMatrix::identity(2),
                ComplexMatrix::identity(4)
            ]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn apply_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_state(&mut rng, 2);
        assert!(KrausChannel::identity(2).apply(&rho).unwrap().max_abs_diff(&rho) < 1e-12);

        let (x0, x1, coh) = (0.6, 0.4, c(0.2, -0.1));
        let rho = ComplexMatrix::new(2, vec![c(x0, 0.0), coh, coh.conj(), c(x1, 0.0)]).unwrap();
        let out = dephasing(0.5).unwrap().apply(&rho).unwrap();
        let expected =
            ComplexMatrix::new(2, vec![c(x0, 0.0), coh * 0.5, coh.conj() * 0.5, c(x1, 0.0)])
                .unwrap();
        assert!(out.max_abs_diff(&expected) < 1e-12);

        let decayed = amplitude_damping(1.0)
            .unwrap()
            .apply(&ComplexMatrix::basis(2, 1, 1))
            .unwrap();
        assert!(decayed.max_abs_diff(&ComplexMatrix::basis(2, 0, 0)) < 1e-12);

        assert!(matches!(
            KrausChannel::identity(2).apply(&ComplexMatrix::identity(4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn adjoint_apply_examples() {
        let m = ComplexMatrix::from_real_rows(&[&[0.1, 0.2], &[0.3, 0.4]]);
        assert_eq!(KrausChannel::identity(2).adjoint_apply(&m).unwrap(), m);
        let gamma = 0.3;
        let f0 = amplitude_damping(gamma)
            .unwrap()
            .adjoint_apply(&ComplexMatrix::basis(2, 0, 0))
            .unwrap();
        assert!(f0.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, gamma])) < 1e-12);
        for ch in zoo() {
            let id = ch.adjoint_apply(&ComplexMatrix::identity(2)).unwrap();
            assert!(id.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-10);
        }
    }

    #[test]
    fn dephasing_examples() {
        assert!(dephasing(1.2).is_err());
        assert!(dephasing(-0.1).is_err());
        let rho = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(dephasing(1.0).unwrap().apply(&rho).unwrap().max_abs_diff(&rho) < 1e-12);
        let out = dephasing(0.0).unwrap().apply(&rho).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.5, 0.5])) < 1e-12);
    }

    #[test]
    fn amplitude_damping_examples() {
        assert!(amplitude_damping(1.5).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_state(&mut rng, 2);
        let id = amplitude_damping(0.0).unwrap();
        assert!(id.apply(&rho).unwrap().max_abs_diff(&rho) < 1e-12);
        let f1 = amplitude_damping(0.3)
            .unwrap()
            .adjoint_apply(&ComplexMatrix::basis(2, 1, 1))
            .unwrap();
        assert!(f1.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.0, 0.7])) < 1e-12);
        let full = amplitude_damping(1.0).unwrap().apply(&rho).unwrap();
        assert!(full.max_abs_diff(&ComplexMatrix::basis(2, 0, 0)) < 1e-12);
    }

    #[test]
    fn rotation_examples() {
        let r0 = rotation_y(0.0).unwrap();
        assert_eq!(r0.kraus_ops()[0], ComplexMatrix::identity(2));
        assert!(rotation_y(f64::NAN).is_err());
        let f0 = rotation_y(std::f64::consts::PI)
            .unwrap()
            .adjoint_apply(&ComplexMatrix::basis(2, 0, 0))
            .unwrap();
        assert!(f0.max_abs_diff(&ComplexMatrix::basis(2, 1, 1)) < 1e-12);
        let f0 = rotation_y(std::f64::consts::FRAC_PI_2)
            .unwrap()
            .adjoint_apply(&ComplexMatrix::basis(2, 0, 0))
            .unwrap();
        // U^dagger|0> = (cos, -sin), so the off-diagonal is -sin(theta)/2
        assert!((f0.get(0, 1) - c(-0.5, 0.0)).norm() < 1e-12);
        assert!((f0.get(1, 0) - c(-0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn pauli_channel_examples() {
        let id = pauli_channel(&[1.0, 0.0, 0.0, 0.0], 1).unwrap();
        assert_eq!(id.kraus_ops(), &[ComplexMatrix::identity(2)]);
        assert!(pauli_channel(&[0.5, 0.5, 0.5, -0.5], 1).is_err());
        assert!(pauli_channel(&[0.5, 0.5, 0.1, 0.0], 1).is_err());
        assert!(pauli_channel(&[1.0], 1).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let raw: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
        let ch = pauli_channel(&probs, 2).unwrap();
        // Direct check: sum p_i P_i^dagger P_i = (sum p_i) I.
        assert!(ch.validate_cptp(1e-10).passed);
        assert_eq!(ch.kraus_ops().len(), 16);
    }

    #[test]
    fn pauli_ordering_is_lexicographic() {
        let mut probs = vec![0.0; 16];
        probs[4] = 1.0; // X (x) I
        let ch = pauli_channel(&probs, 2).unwrap();
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(ch.kraus_ops()[0], kron(&x, &ComplexMatrix::identity(2)));
    }

    #[test]
    fn tensor_examples() {
        let ii = KrausChannel::identity(2)
            .tensor(&KrausChannel::identity(2))
            .unwrap();
        assert_eq!(ii.dim(), 4);
        assert_eq!(ii.kraus_ops(), &[ComplexMatrix::identity(4)]);

        let gamma = 0.3;
        let ch = amplitude_damping(gamma)
            .unwrap()
            .tensor(&KrausChannel::identity(2))
            .unwrap();
        let f00 = ch.adjoint_apply(&ComplexMatrix::basis(4, 0, 0)).unwrap();
        // Independently: F_0 (x) |0><0| from the single-qubit POVM.
        let f0 = amplitude_damping(gamma)
            .unwrap()
            .adjoint_apply(&ComplexMatrix::basis(2, 0, 0))
            .unwrap();
        let expected = kron(&f0, &ComplexMatrix::basis(2, 0, 0));
        assert!(f00.max_abs_diff(&expected) < 1e-12);
        assert!(f00.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0, gamma, 0.0])) < 1e-12);

        let mixed = rotation_y(0.4).unwrap().tensor(&dephasing(0.2).unwrap()).unwrap();
        assert!(mixed.validate_cptp(1e-10).passed);
    }

    #[test]
    fn compose_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_state(&mut rng, 2);
        let ch = amplitude_damping(0.4).unwrap();
        let composed = KrausChannel::identity(2).compose(&ch).unwrap();
        assert!(composed.apply(&rho).unwrap().max_abs_diff(&ch.apply(&rho).unwrap()) < 1e-12);

        let ab = rotation_y(0.3).unwrap().compose(&rotation_y(0.9).unwrap()).unwrap();
        let direct = rotation_y(1.2).unwrap();
        assert!(ab.apply(&rho).unwrap().max_abs_diff(&direct.apply(&rho).unwrap()) < 1e-12);

        let dd = dephasing(0.5).unwrap().compose(&dephasing(0.4).unwrap()).unwrap();
        let out = dd.apply(&rho).unwrap();
        assert!((out.get(0, 1) - rho.get(0, 1) * 0.2).norm() < 1e-12);
        assert!((out.get(0, 0) - rho.get(0, 0)).norm() < 1e-12);
        assert!((out.get(1, 1) - rho.get(1, 1)).norm() < 1e-12);

        assert!(matches!(
            ch.compose(&KrausChannel::identity(4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn superoperator_examples() {
        let h = KrausChannel::identity(2).superoperator();
        assert_eq!(h.matrix(), &ComplexMatrix::identity(4));
        let lambda = 0.35;
        let h = dephasing(lambda).unwrap().superoperator();
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, lambda, lambda, 1.0]);
        assert!(h.matrix().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn superoperator_matches_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut channels = zoo();
        for n in 1..=2 {
            for k in 1..=4 {
                channels.push(random_channel(n, k, &mut rng).unwrap());
            }
        }
        for ch in &channels {
            let h = ch.superoperator();
            for _ in 0..50 {
                let rho = random_state(&mut rng, ch.dim());
                let via_h = h.apply(&rho).unwrap();
                let direct = ch.apply(&rho).unwrap();
                assert!(via_h.max_abs_diff(&direct) < 1e-12);
                assert!((via_h.trace() - c(1.0, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn heisenberg_schrodinger_duality() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for n in 1..=3 {
            let ch = random_channel(n, 3, &mut rng).unwrap();
            let dim = ch.dim();
            for _ in 0..20 {
                let m = random_hermitian(&mut rng, dim);
                let rho = random_state(&mut rng, dim);
                let lhs = hs_inner(&m, &ch.apply(&rho).unwrap()).unwrap();
                let rhs = hs_inner(&ch.adjoint_apply(&m).unwrap(), &rho).unwrap();
                assert!((lhs - rhs).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn random_channels_are_cptp_and_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=3 {
            for k in 1..=5 {
                let ch = random_channel(n, k, &mut rng).unwrap();
                assert!(ch.validate_cptp(1e-10).passed);
                let id = ch.adjoint_apply(&ComplexMatrix::identity(ch.dim())).unwrap();
                assert!(id.max_abs_diff(&ComplexMatrix::identity(ch.dim())) < 1e-10);
            }
        }
        let a = random_channel(1, 2, &mut rng).unwrap();
        let b = random_channel(1, 3, &mut rng).unwrap();
        assert!(a.tensor(&b).unwrap().validate_cptp(1e-10).passed);
        assert!(a.compose(&b).unwrap().validate_cptp(1e-10).passed);
    }
}
