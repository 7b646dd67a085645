//! Command-line front end: argument parsing, file I/O, output formats and
//! exit codes. Scenarios live in [`scenarios`].

pub mod report;
pub mod scenarios;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use deqfi_core::channels::{named_channel, KrausChannel, NamedChannel};
use deqfi_core::classify::{hierarchy_report, is_hdp, Verdict};
use deqfi_core::fisher::{dephasing_qfi, pe_qfi};
use deqfi_core::hamming::enumerate_hdf;
use deqfi_core::io::{parse_channel, parse_state, ChannelJson, StateJson};
use deqfi_core::state::{
    uniform_superposition, BlochVector, DensityMatrix, Hamiltonian, DEFAULT_TOL,
};
use deqfi_core::transform::{
    check_c1_c2, cone_r_max, extreme_cone_channel, golden_transform, hdp_cone_contains,
    merge_channel, ConeQuery, MergeSpec,
};
use serde_json::json;

use crate::report::Report;
use crate::scenarios::{cone_table, run_scenario, Params, Scenario};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "deqfi",
    version,
    about = "Dephasing-estimation resource theory toolkit"
)]
pub struct Cli {
    /// Numerical tolerance for validation and classification.
    #[arg(long, global = true, env = "DEQFI_TOL", default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Phase-damping strength.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub theta: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Structured JSON report.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Grid or boundary data as CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Channel JSON file.
    #[arg(long, conflicts_with = "named")]
    pub channel: Option<PathBuf>,
    /// Built-in channel: W, R, N, Z, U_sio, V, U_phase.
    #[arg(long)]
    pub named: Option<String>,
    /// Qubit count for built-in channels.
    #[arg(long)]
    pub n: Option<usize>,
    /// Phase for U_phase.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dephasing QFI of a state.
    Qfi {
        #[arg(long)]
        state: PathBuf,
    },
    /// Phase-estimation QFI for H = ε Σ popcount.
    PeQfi {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
    },
    /// Place a channel in the HDP/SHP/SIO/DIO hierarchy.
    Classify {
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Single-qubit HDP cone of a Bloch vector.
    Cone {
        /// Source Bloch vector x,y,z.
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        source: [f64; 3],
        /// Target Bloch vector x,y,z.
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        target: Option<[f64; 3]>,
        /// Boundary samples in z on [−1, 1].
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// List every Hamming-distance-preserving bijection on n bits.
    EnumerateHdf {
        #[arg(long)]
        n: usize,
    },
    /// Apply a channel to a state, or build a golden-state or merging channel.
    Transform {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        channel: ChannelArgs,
        /// Treat the state as a pure target and build the channel reaching
        /// it from the uniform superposition.
        #[arg(long, conflicts_with_all = ["channel", "named", "merge"])]
        golden: bool,
        /// Build the merging channel for the state.
        #[arg(long, conflicts_with_all = ["channel", "named"])]
        merge: bool,
    },
    /// Run a named reproduction scenario.
    Reproduce {
        #[arg(value_enum)]
        scenario: Scenario,
    },
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z but got {s:?}"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|e| format!("{p:?}: {e}"))?;
    }
    Ok(v)
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] deqfi_core::Error),
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_state(path: &Path, tol: f64) -> Result<DensityMatrix, CliError> {
    Ok(parse_state(&read(path)?, tol)?)
}

fn load_channel(args: &ChannelArgs, tol: f64) -> Result<(String, KrausChannel), CliError> {
    match (&args.channel, &args.named) {
        (Some(p), None) => Ok((p.display().to_string(), parse_channel(&read(p)?, tol)?)),
        (None, Some(name)) => {
            let nc = NamedChannel::parse(name, args.phi)?;
            let n = args.n.unwrap_or(nc.default_qubits());
            Ok((nc.name().to_string(), named_channel(nc, n)?))
        }
        _ => Err(CliError::Usage(
            "give exactly one of --channel or --named".into(),
        )),
    }
}

fn bloch(v: [f64; 3], tol: f64) -> Result<BlochVector, CliError> {
    Ok(BlochVector::new(v[0], v[1], v[2], tol)?)
}

/// Executes a parsed command and returns its report.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    let tol = cli.tol;
    let params = Params {
        theta: cli.theta,
        seed: cli.seed,
        tol,
    };
    Ok(match &cli.command {
        Command::Qfi { state } => {
            let rho = load_state(state, tol)?;
            let mut r = Report::new("qfi");
            r.value("theta", cli.theta);
            r.value("dephasing_qfi", dephasing_qfi(&rho, cli.theta)?);
            r
        }
        Command::PeQfi { state, epsilon } => {
            let rho = load_state(state, tol)?;
            let h = Hamiltonian::new(rho.n_qubits(), *epsilon)?;
            let mut r = Report::new("pe-qfi");
            r.value("epsilon", *epsilon);
            r.value("pe_qfi", pe_qfi(&rho, &h)?);
            r
        }
        Command::Classify { channel } => {
            let (name, ch) = load_channel(channel, tol)?;
            let h = hierarchy_report(&ch, tol);
            let mut r = Report::new(format!("classify {name}"));
            r.value("region", h.region.to_string());
            r.value(
                "report",
                serde_json::to_value(&h).expect("report serializes"),
            );
            for (class, v) in [
                ("HDP", &h.hdp),
                ("DIO", &h.dio),
                ("SIO", &h.sio),
                ("SHP", &h.shp),
            ] {
                if v.verdict == Verdict::NonMember {
                    r.check(
                        format!("{class} certificate rechecks"),
                        v.certificate.recheck(&ch, tol),
                        "independent re-evaluation of the violation",
                    );
                }
            }
            r
        }
        Command::Cone {
            source,
            target,
            points,
        } => {
            let s = bloch(*source, tol)?;
            let mut r = Report::new("cone");
            r.value("source", json!(source));
            if let Some(t) = target {
                let t = bloch(*t, tol)?;
                let q = ConeQuery {
                    source: s,
                    target: t,
                };
                let inside = hdp_cone_contains(&q, tol);
                r.value("r_max", cone_r_max(&s, t.z));
                r.value("contains", inside);
                if inside {
                    let ch = extreme_cone_channel(&q, tol)?;
                    r.value(
                        "channel",
                        serde_json::to_value(ChannelJson::from_channel(&ch)).expect("plain data"),
                    );
                }
            }
            r.table = Some(cone_table(&s, *points));
            r
        }
        Command::EnumerateHdf { n } => {
            let all = enumerate_hdf(*n)?;
            let mut r = Report::new(format!("enumerate-hdf n={n}"));
            r.value("count", all.len());
            r.value(
                "hdfs",
                all.iter()
                    .map(|f| json!({"table": f.table(), "mask": f.mask(), "reorder": f.reorder()}))
                    .collect::<Vec<_>>(),
            );
            r
        }
        Command::Transform {
            state,
            channel,
            golden,
            merge,
        } => transform(cli, state, channel, *golden, *merge)?,
        Command::Reproduce { scenario } => run_scenario(*scenario, &params)?,
    })
}

fn transform(
    cli: &Cli,
    state: &Path,
    args: &ChannelArgs,
    golden: bool,
    merge: bool,
) -> Result<Report, CliError> {
    let tol = cli.tol;
    let rho = load_state(state, tol)?;
    let n = rho.n_qubits();
    let (label, ch, input) = if golden {
        if (rho.purity() - 1.0).abs() > tol {
            return Err(CliError::Usage("--golden needs a pure target state".into()));
        }
        let amps = leading_vector(&rho)?;
        let eta = vec![0.0; rho.dim()];
        let ch = golden_transform(&amps, &eta, tol)?;
        ("golden".to_string(), ch, uniform_superposition(n, &eta)?)
    } else if merge {
        let pairing = check_c1_c2(&rho, tol)
            .ok_or_else(|| CliError::Usage("state violates the merging conditions".into()))?;
        let j = (1usize << pairing.c) - 1;
        let spec = MergeSpec::optimal(rho.clone(), 0, j, tol)?;
        ("merge".to_string(), merge_channel(&spec, tol)?, rho)
    } else {
        let (name, ch) = load_channel(args, tol)?;
        (name, ch, rho)
    };
    if ch.dim() != input.dim() {
        return Err(CliError::Usage(format!(
            "channel acts on {} qubits but the state has {}",
            ch.n_qubits(),
            input.n_qubits()
        )));
    }
    let out = ch.apply(&input)?;
    let mut r = Report::new(format!("transform {label}"));
    r.value("hdp", is_hdp(&ch, tol).verdict == Verdict::Member);
    r.value("dephasing_qfi_before", dephasing_qfi(&input, cli.theta)?);
    r.value("dephasing_qfi_after", dephasing_qfi(&out, cli.theta)?);
    if golden || merge {
        r.value(
            "channel",
            serde_json::to_value(ChannelJson::from_channel(&ch)).expect("plain data"),
        );
    }
    r.value(
        "output",
        serde_json::to_value(StateJson::from_state(&out)).expect("plain data"),
    );
    Ok(r)
}

/// Amplitudes of a pure state, phase-fixed on its largest entry.
fn leading_vector(rho: &DensityMatrix) -> Result<Vec<deqfi_core::C64>, CliError> {
    let d = rho.dim();
    let k = (0..d)
        .max_by(|&a, &b| rho.entry(a, a).re.total_cmp(&rho.entry(b, b).re))
        .expect("nonempty");
    let norm = rho.entry(k, k).re.sqrt();
    Ok((0..d).map(|x| rho.entry(x, k) / norm).collect())
}

fn render(cli: &Cli, report: &Report) -> Result<String, CliError> {
    if cli.json {
        Ok(report.to_json())
    } else if cli.csv {
        report.table.as_ref().map(|t| t.to_csv()).ok_or_else(|| {
            CliError::Usage(format!("{} has no tabular data for --csv", report.title))
        })
    } else {
        Ok(report.to_text())
    }
}

/// Full entry point: parses `argv`, runs the command, writes output and
/// returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = execute(&cli).and_then(|rep| Ok((render(&cli, &rep)?, rep.passed())));
    let (text, passed) = match result {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_USAGE;
    }
    if passed {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    }
}
