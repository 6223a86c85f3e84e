use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use readout_core::channels::{amplitude_damping, dephasing, rotation_y, KrausChannel};
use readout_core::io;
use readout_core::linalg::{ComplexMatrix, RealMatrix, PHYSICAL_TOL, STRUCTURAL_TOL};
use readout_core::model::{
    forward, nonclassicality, oracle_probabilities, CoherenceNorm, ProbabilityVector,
    ReadoutModel,
};
use readout_core::povm::{kernel_diag_defect, PovmDefects};
use readout_core::sampling::{frequencies, sample_counts, SAMPLING_TOL};
use readout_core::solver::{mitigate, MitigationProblem, SolverOptions};
use readout_core::state::{decompose, DensityMatrix};
use readout_core::{readout_model, Error};

const GOLDEN_TOL: f64 = 1e-12;

#[derive(Parser)]
#[command(name = "readout", version, about = "Coherence-sensitive readout models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check trace preservation and the effective POVM of a channel.
    ChannelValidate {
        #[arg(long)]
        channel: PathBuf,
    },
    /// Extract (A, C) from a channel.
    ModelExtract {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Outcome probabilities of a state seen through a channel.
    Forward {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Model)]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Outcome probabilities through the superoperator only.
    Oracle {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw finite-shot counts, either from channel + state or from a z file.
    Sample {
        #[arg(long, requires = "state", conflicts_with = "z")]
        channel: Option<PathBuf>,
        #[arg(long, requires = "channel")]
        state: Option<PathBuf>,
        #[arg(long, required_unless_present = "channel")]
        z: Option<PathBuf>,
        #[arg(long)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover a physical (x, y) from observed probabilities or counts.
    Mitigate {
        #[arg(long, required_unless_present = "channel", conflicts_with = "channel")]
        model: Option<PathBuf>,
        #[arg(long)]
        channel: Option<PathBuf>,
        #[arg(long, required_unless_present = "counts", conflicts_with = "counts")]
        z: Option<PathBuf>,
        #[arg(long)]
        counts: Option<PathBuf>,
        #[arg(long, default_value_t = 5000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare extracted models of the standard single-qubit channels with
    /// their closed forms.
    PaperExamples,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Model,
    Oracle,
    Both,
}

enum Failure {
    /// Exit code 1.
    Domain(String),
    /// Exit code 2.
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> readout_core::Result<T>) -> Result<T, Failure> {
    let text = read(path)?;
    parse(&text).map_err(|e| match Failure::from(e) {
        Failure::Usage(m) => Failure::Usage(format!("{}: {m}", path.display())),
        Failure::Domain(m) => Failure::Domain(format!("{}: {m}", path.display())),
    })
}

fn emit(value: &Value, out: Option<&Path>) -> CmdResult {
    let text = serde_json::to_string_pretty(value).expect("json value serializes");
    match out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| Failure::Domain(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn check_dims(ch: &KrausChannel, rho: &DensityMatrix) -> CmdResult {
    if ch.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: rho.dim(),
        }
        .into());
    }
    Ok(())
}

fn channel_validate(path: &Path) -> CmdResult {
    let ch = load(path, io::parse_channel_unchecked)?;
    let cptp = ch.validate_cptp(PHYSICAL_TOL);
    let dim = ch.dim();
    let elements = (0..dim)
        .map(|k| ch.adjoint_apply(&ComplexMatrix::basis(dim, k, k)))
        .collect::<readout_core::Result<Vec<_>>>()?;
    let povm = PovmDefects::measure(&elements)?;
    let povm_ok = povm.check(PHYSICAL_TOL).is_ok();
    let diag = kernel_diag_defect(&ch);
    println!("dim: {dim}");
    println!("kraus operators: {}", ch.kraus_ops().len());
    println!(
        "CPTP defect: {:e} ({})",
        cptp.defect,
        if cptp.passed { "ok" } else { "FAIL" }
    );
    println!("POVM hermiticity defect: {:e}", povm.hermiticity);
    println!("POVM min eigenvalue: {:e}", povm.min_eigenvalue);
    println!(
        "POVM completeness defect: {:e} ({})",
        povm.completeness,
        if povm_ok { "ok" } else { "FAIL" }
    );
    println!("kernel_diag_defect: {diag:e}");
    println!("C-classical: {}", diag <= STRUCTURAL_TOL);
    if cptp.passed && povm_ok {
        Ok(())
    } else {
        Err(Failure::Domain("channel fails validation".into()))
    }
}

fn model_extract(path: &Path, out: Option<&Path>) -> CmdResult {
    let ch = load(path, io::parse_channel)?;
    emit(&io::model_to_json(&readout_model(&ch)?), out)
}

fn forward_cmd(channel: &Path, state: &Path, mode: Mode, out: Option<&Path>) -> CmdResult {
    let ch = load(channel, io::parse_channel)?;
    let rho = load(state, io::parse_state)?;
    check_dims(&ch, &rho)?;
    let value = match mode {
        Mode::Model => {
            let z = forward(&readout_model(&ch)?, &decompose(&rho))?;
            json!({ "z": z })
        }
        Mode::Oracle => json!({ "z": oracle_probabilities(&ch, &rho)? }),
        Mode::Both => {
            let zm = forward(&readout_model(&ch)?, &decompose(&rho))?;
            let zo = oracle_probabilities(&ch, &rho)?;
            json!({
                "z_model": zm,
                "z_oracle": zo,
                "discrepancy": zm.max_abs_diff(&zo),
            })
        }
    };
    emit(&value, out)
}

fn sample_cmd(
    channel: Option<&Path>,
    state: Option<&Path>,
    z: Option<&Path>,
    shots: u64,
    seed: u64,
    out: Option<&Path>,
) -> CmdResult {
    let z = match (channel, state, z) {
        (Some(c), Some(s), _) => {
            let ch = load(c, io::parse_channel)?;
            let rho = load(s, io::parse_state)?;
            check_dims(&ch, &rho)?;
            oracle_probabilities(&ch, &rho)?
        }
        (_, _, Some(z)) => load(z, io::parse_probabilities)?,
        _ => return Err(Failure::Usage("need --channel and --state, or --z".into())),
    };
    z.check_physical(SAMPLING_TOL)?;
    let counts = sample_counts(&z, shots, seed)?;
    emit(
        &serde_json::to_value(io::CountsFile {
            counts,
            shots: Some(shots),
            seed: Some(seed),
        })
        .expect("counts serialize"),
        out,
    )
}

#[allow(clippy::too_many_arguments)]
fn mitigate_cmd(
    model: Option<&Path>,
    channel: Option<&Path>,
    z: Option<&Path>,
    counts: Option<&Path>,
    max_iters: usize,
    tol: f64,
    seed: u64,
    out: Option<&Path>,
) -> CmdResult {
    let model: ReadoutModel = match (model, channel) {
        (Some(m), _) => load(m, io::parse_model)?,
        (None, Some(c)) => readout_model(&load(c, io::parse_channel)?)?,
        (None, None) => return Err(Failure::Usage("need --model or --channel".into())),
    };
    let z: ProbabilityVector = match (z, counts) {
        (Some(z), _) => load(z, io::parse_probabilities)?,
        (None, Some(c)) => frequencies(&load(c, io::parse_counts)?)?,
        (None, None) => return Err(Failure::Usage("need --z or --counts".into())),
    };
    let opts = SolverOptions {
        max_iterations: max_iters,
        residual_tol: tol,
        seed,
        ..SolverOptions::default()
    };
    let result = mitigate(&MitigationProblem::new(model, z)?, &opts)?;
    if !result.converged {
        eprintln!(
            "warning: not converged after {} iterations (residual {:e})",
            result.iterations, result.residual
        );
    }
    emit(&serde_json::to_value(&result).expect("result serializes"), out)
}

fn rows(m: &RealMatrix) -> String {
    m.to_rows()
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:+.12}")).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

struct Example {
    name: String,
    channel: readout_core::Result<KrausChannel>,
    a: [[f64; 2]; 2],
    c: [[f64; 2]; 2],
    /// Expected max-norm of `C`.
    coherence: f64,
}

fn examples() -> Vec<Example> {
    let mut list = Vec::new();
    for lambda in [0.0, 0.5, 1.0] {
        list.push(Example {
            name: format!("dephasing lambda={lambda}"),
            channel: dephasing(lambda),
            a: [[1.0, 0.0], [0.0, 1.0]],
            c: [[0.0; 2]; 2],
            coherence: 0.0,
        });
    }
    for gamma in [0.0, 0.3, 1.0] {
        list.push(Example {
            name: format!("amplitude_damping gamma={gamma}"),
            channel: amplitude_damping(gamma),
            a: [[1.0, gamma], [0.0, 1.0 - gamma]],
            c: [[0.0; 2]; 2],
            coherence: 0.0,
        });
    }
    for (label, theta) in [("0", 0.0), ("0.3", 0.3), ("pi/2", FRAC_PI_2), ("pi", PI)] {
        let (h, s) = ((theta / 2.0).cos().powi(2), (theta / 2.0).sin().powi(2));
        // U = [[cos, -sin], [sin, cos]] gives <0|F_0|1> = -sin(theta)/2.
        let sn = theta.sin();
        list.push(Example {
            name: format!("rotation_y theta={label}"),
            channel: rotation_y(theta),
            a: [[h, s], [s, h]],
            c: [[-sn, 0.0], [sn, 0.0]],
            coherence: sn.abs(),
        });
    }
    list
}

fn paper_examples() -> CmdResult {
    let mut failed = Vec::new();
    for ex in examples() {
        let m = readout_model(&ex.channel?)?;
        let a = RealMatrix::from_rows(&ex.a.map(Vec::from)).expect("2x2");
        let c = RealMatrix::from_rows(&ex.c.map(Vec::from)).expect("2x2");
        let err = m
            .a()
            .max_abs_diff(&a)
            .max(m.c().max_abs_diff(&c))
            .max((nonclassicality(&m, CoherenceNorm::Max) - ex.coherence).abs());
        let ok = err <= GOLDEN_TOL;
        let mut report = String::new();
        let _ = writeln!(report, "{}: {} (max error {err:e})", ex.name, if ok { "ok" } else { "FAIL" });
        let _ = writeln!(report, "  A extracted   {}", rows(m.a()));
        let _ = writeln!(report, "  A closed form {}", rows(&a));
        let _ = writeln!(report, "  C extracted   {}", rows(m.c()));
        let _ = write!(report, "  C closed form {}", rows(&c));
        println!("{report}");
        if !ok {
            failed.push(ex.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Domain(format!("mismatch in: {}", failed.join(", "))))
    }
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::ChannelValidate { channel } => channel_validate(&channel),
        Command::ModelExtract { channel, out } => model_extract(&channel, out.as_deref()),
        Command::Forward {
            channel,
            state,
            mode,
            out,
        } => forward_cmd(&channel, &state, mode, out.as_deref()),
        Command::Oracle {
            channel,
            state,
            out,
        } => forward_cmd(&channel, &state, Mode::Oracle, out.as_deref()),
        Command::Sample {
            channel,
            state,
            z,
            shots,
            seed,
            out,
        } => sample_cmd(
            channel.as_deref(),
            state.as_deref(),
            z.as_deref(),
            shots,
            seed,
            out.as_deref(),
        ),
        Command::Mitigate {
            model,
            channel,
            z,
            counts,
            max_iters,
            tol,
            seed,
            out,
        } => mitigate_cmd(
            model.as_deref(),
            channel.as_deref(),
            z.as_deref(),
            counts.as_deref(),
            max_iters,
            tol,
            seed,
            out.as_deref(),
        ),
        Command::PaperExamples => paper_examples(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
