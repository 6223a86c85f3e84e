//! JSON file formats for channels, states, models, probability vectors,
//! counts and mitigation results.
//!
//! Complex matrices are flat row-major lists of `[re, im]` pairs. Every
//! `parse_*` entry point accepts arbitrary text and reports malformed or
//! unphysical input as an [`Error`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::channels::{
    amplitude_damping, dephasing, pauli_channel, rotation_y, KrausChannel, MAX_DIM, MAX_KRAUS,
};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, RealMatrix};
use crate::model::{nonclassicality, CoherenceNorm, ProbabilityVector, ReadoutModel};
use crate::state::{reconstruct, DensityMatrix, StateDecomposition};

/// Column-order tag written into model files.
pub const COLUMN_ORDER: &str = "lex-pairs-RI";

const MAX_QUBITS: u32 = 6;

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

fn dim_for_qubits(n: u32) -> Result<usize> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: format!("qubit count {n} outside 1..={MAX_QUBITS}"),
        });
    }
    Ok(1usize << n)
}

fn matrix_from_pairs(dim: usize, pairs: &[[f64; 2]]) -> Result<ComplexMatrix> {
    ComplexMatrix::new(dim, pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
}

fn matrix_to_pairs(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    m.entries().iter().map(|z| [z.re, z.im]).collect()
}

/// Parameters of a named channel constructor.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuiltinParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
}

/// Channel description as it appears on disk.
///
/// ```json
/// {"dim": 2, "kraus": [[[1,0],[0,0],[0,0],[1,0]]]}
/// {"builtin": "amplitude_damping", "params": {"gamma": 0.3}}
/// {"tensor": [{"builtin": "rotation_y", "params": {"theta": 0.3}}, {"builtin": "identity"}]}
/// {"compose": [outer, inner]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Kraus {
        dim: usize,
        kraus: Vec<Vec<[f64; 2]>>,
    },
    Builtin {
        builtin: String,
        #[serde(default)]
        params: BuiltinParams,
    },
    Tensor {
        tensor: Vec<ChannelSpec>,
    },
    Compose {
        compose: Vec<ChannelSpec>,
    },
}

impl ChannelSpec {
    pub fn builtin(name: &str, params: BuiltinParams) -> Self {
        ChannelSpec::Builtin {
            builtin: name.to_string(),
            params,
        }
    }

    /// Builds the channel and checks trace preservation.
    pub fn build(&self) -> Result<KrausChannel> {
        let ch = self.build_unchecked()?;
        KrausChannel::new(ch.kraus_ops().to_vec())
    }

    /// Builds the Kraus list without the trace-preservation check.
    pub fn build_unchecked(&self) -> Result<KrausChannel> {
        match self {
            ChannelSpec::Kraus { dim, kraus } => {
                if *dim == 0 || *dim > MAX_DIM {
                    return Err(Error::InvalidParameter {
                        name: "dim",
                        reason: format!("{dim} outside 1..={MAX_DIM}"),
                    });
                }
                if kraus.len() > MAX_KRAUS {
                    return Err(Error::InvalidParameter {
                        name: "kraus",
                        reason: format!("more than {MAX_KRAUS} operators"),
                    });
                }
                let ops = kraus
                    .iter()
                    .map(|op| matrix_from_pairs(*dim, op))
                    .collect::<Result<Vec<_>>>()?;
                KrausChannel::new_unchecked(ops)
            }
            ChannelSpec::Builtin { builtin, params } => build_builtin(builtin, params),
            ChannelSpec::Tensor { tensor } => {
                let mut parts = tensor.iter();
                let first = parts.next().ok_or_else(|| Error::InvalidParameter {
                    name: "tensor",
                    reason: "empty channel list".into(),
                })?;
                parts.try_fold(first.build_unchecked()?, |acc, spec| {
                    acc.tensor(&spec.build_unchecked()?)
                })
            }
            ChannelSpec::Compose { compose } => {
                // Listed outermost first: [E3, E2, E1] means E3 o E2 o E1.
                let mut parts = compose.iter();
                let first = parts.next().ok_or_else(|| Error::InvalidParameter {
                    name: "compose",
                    reason: "empty channel list".into(),
                })?;
                parts.try_fold(first.build_unchecked()?, |acc, spec| {
                    acc.compose(&spec.build_unchecked()?)
                })
            }
        }
    }
}

fn required(value: Option<f64>, name: &'static str) -> Result<f64> {
    value.ok_or_else(|| Error::InvalidParameter {
        name,
        reason: "missing parameter".into(),
    })
}

fn build_builtin(name: &str, params: &BuiltinParams) -> Result<KrausChannel> {
    match name {
        "identity" => Ok(KrausChannel::identity(dim_for_qubits(params.n.unwrap_or(1))?)),
        "dephasing" => dephasing(required(params.lambda, "lambda")?),
        "amplitude_damping" => amplitude_damping(required(params.gamma, "gamma")?),
        "rotation_y" => rotation_y(required(params.theta, "theta")?),
        "pauli" => {
            let n = params.n.unwrap_or(1);
            dim_for_qubits(n)?;
            let probs = params.probs.as_deref().ok_or_else(|| Error::InvalidParameter {
                name: "probs",
                reason: "missing parameter".into(),
            })?;
            pauli_channel(probs, n as usize)
        }
        other => Err(Error::InvalidParameter {
            name: "builtin",
            reason: format!("unknown channel `{other}`"),
        }),
    }
}

/// Parses channel JSON into its description.
pub fn parse_channel_spec(text: &str) -> Result<ChannelSpec> {
    serde_json::from_str(text).map_err(parse_err)
}

/// Parses and builds a channel without checking trace preservation.
pub fn parse_channel_unchecked(text: &str) -> Result<KrausChannel> {
    parse_channel_spec(text)?.build_unchecked()
}

/// Parses and builds a trace-preserving channel.
pub fn parse_channel(text: &str) -> Result<KrausChannel> {
    parse_channel_spec(text)?.build()
}

/// Explicit Kraus-list JSON for a channel.
pub fn channel_to_json(ch: &KrausChannel) -> Value {
    json!({
        "dim": ch.dim(),
        "kraus": ch.kraus_ops().iter().map(matrix_to_pairs).collect::<Vec<_>>(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    Matrix { n: u32, matrix: Vec<[f64; 2]> },
    Decomposed { x: Vec<f64>, y: Vec<f64> },
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        StateFile::Matrix {
            n: rho.dim().trailing_zeros(),
            matrix: matrix_to_pairs(rho.matrix()),
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        match self {
            StateFile::Matrix { n, matrix } => {
                let dim = dim_for_qubits(*n)?;
                DensityMatrix::new(matrix_from_pairs(dim, matrix)?)
            }
            StateFile::Decomposed { x, y } => {
                let dim = x.len();
                if !dim.is_power_of_two() || dim < 2 || dim > MAX_DIM {
                    return Err(Error::InvalidParameter {
                        name: "x",
                        reason: format!("length {dim} is not 2^n for 1 <= n <= {MAX_QUBITS}"),
                    });
                }
                let d = StateDecomposition {
                    x: x.clone(),
                    y: y.clone(),
                };
                DensityMatrix::new(reconstruct(&d, dim)?)
            }
        }
    }
}

/// Parses a state file in either matrix or `(x, y)` form and validates it.
pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    serde_json::from_str::<StateFile>(text)
        .map_err(parse_err)?
        .to_density()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub n: u32,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    pub column_order: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonclassicality_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonclassicality_frobenius: Option<f64>,
}

impl ModelFile {
    pub fn from_model(m: &ReadoutModel) -> Self {
        Self {
            n: m.dim().trailing_zeros(),
            a: m.a().to_rows(),
            c: m.c().to_rows(),
            column_order: COLUMN_ORDER.to_string(),
            nonclassicality_max: Some(nonclassicality(m, CoherenceNorm::Max)),
            nonclassicality_frobenius: Some(nonclassicality(m, CoherenceNorm::Frobenius)),
        }
    }

    pub fn to_model(&self) -> Result<ReadoutModel> {
        if self.column_order != COLUMN_ORDER {
            return Err(Error::InvalidParameter {
                name: "column_order",
                reason: format!("expected `{COLUMN_ORDER}`, got `{}`", self.column_order),
            });
        }
        let dim = dim_for_qubits(self.n)?;
        if self.a.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                found: self.a.len(),
            });
        }
        let a = RealMatrix::from_rows(&self.a)?;
        let c = if dim == 1 {
            RealMatrix::zeros(1, 0)
        } else {
            RealMatrix::from_rows(&self.c)?
        };
        ReadoutModel::new(a, c)
    }
}

pub fn parse_model(text: &str) -> Result<ReadoutModel> {
    serde_json::from_str::<ModelFile>(text)
        .map_err(parse_err)?
        .to_model()
}

pub fn model_to_json(m: &ReadoutModel) -> Value {
    serde_json::to_value(ModelFile::from_model(m)).expect("model serializes")
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ProbabilityFile {
    Wrapped { z: Vec<f64> },
    Bare(Vec<f64>),
}

/// Parses `{"z": [...]}` or a bare array. No normalization check is made
/// here; callers decide how strict to be.
pub fn parse_probabilities(text: &str) -> Result<ProbabilityVector> {
    let z = match serde_json::from_str::<ProbabilityFile>(text).map_err(parse_err)? {
        ProbabilityFile::Wrapped { z } | ProbabilityFile::Bare(z) => z,
    };
    if z.is_empty() || z.len() > MAX_DIM {
        return Err(Error::InvalidParameter {
            name: "z",
            reason: format!("length {} outside 1..={MAX_DIM}", z.len()),
        });
    }
    Ok(ProbabilityVector(z))
}

/// Output of the sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsFile {
    pub counts: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Parses `{"counts": [...], "shots": s}`; `shots`, when present, must equal
/// the sum of the counts.
pub fn parse_counts(text: &str) -> Result<Vec<u64>> {
    let file: CountsFile = serde_json::from_str(text).map_err(parse_err)?;
    if file.counts.is_empty() || file.counts.len() > MAX_DIM {
        return Err(Error::InvalidParameter {
            name: "counts",
            reason: format!("length {} outside 1..={MAX_DIM}", file.counts.len()),
        });
    }
    let total = file
        .counts
        .iter()
        .try_fold(0u64, |acc, &c| acc.checked_add(c))
        .ok_or_else(|| Error::InvalidParameter {
            name: "counts",
            reason: "total overflows".into(),
        })?;
    if let Some(shots) = file.shots {
        if shots != total {
            return Err(Error::InvalidParameter {
                name: "shots",
                reason: format!("{shots} does not match the counts total {total}"),
            });
        }
    }
    Ok(file.counts)
}
