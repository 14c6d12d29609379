//! `ncpmap`: command-line access to qubit-map classification, positivity
//! domains, Pauli-family measures and divergence scans.

mod args;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncpmap_core::families::{
    bncp_example, cnot_intermediate_map, dephasing_intermediate, ControlledUnitaryFamily,
    DephasingModel,
};
use ncpmap_core::measure::{divergence_scan, estimate_pauli_measure, estimate_rotated_measure};
use ncpmap_core::{
    check_validity, classify, detect_fixed_lines, export_domain, scan_domain, superop_from_choi,
    DivergenceFamily, Error, MapDocument, ProbeConfig, QubitMap, Representation, SuperOp,
};
use serde::Serialize;
use serde_json::json;

use args::{Angle, GridSpec, ModeSpec};

const EXIT_INPUT: u8 = 2;
const EXIT_REJECTED: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

const UNRESTRICTED_EXPLANATION: &str = "\
no volume measure exists for the unrestricted set of qubit maps.
Including NCP maps, the set is neither closed nor bounded: near singular points
of intermediate maps (for example the CNOT family at theta = pi/4) the Choi
eigenvalues grow without limit while their sum stays 2, so any estimate would
depend on an arbitrary cutoff. Use --family pauli or --family rotated, whose
reference set is the cube of positive unital Pauli maps.";

#[derive(Parser)]
#[command(
    name = "ncpmap",
    version,
    about = "Analyze qubit maps, including NCP ones"
)]
struct Cli {
    /// Leave the timestamp out of JSON output, making runs byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a map as CP or NCP from its Choi spectrum.
    Classify(SourceArgs),
    /// Sample the positivity domain of a map over the Bloch ball.
    Domain(DomainArgs),
    /// Estimate the CP fraction of unital Pauli maps by Monte Carlo.
    Measure(MeasureArgs),
    /// Track the largest Choi eigenvalue of an intermediate-map family.
    Scan(ScanArgs),
    /// Search for points of a map's positivity domain.
    Validate(ValidateArgs),
    /// Write a built-in family member as a JSON map document.
    ExportMap(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MapFamily {
    /// The NCP example with Choi spectrum {2.324, 0.669, 0.131, -1.124}.
    Bncp,
    Identity,
    /// Intermediate map of the double-CNOT dynamics at control angle `--theta`.
    Cnot,
    /// Intermediate dephasing map between `--q1` and `--q2` at memory `--nu`.
    Dephasing,
}

#[derive(Args, Serialize)]
struct SourceArgs {
    /// JSON map document.
    #[arg(conflicts_with = "family", required_unless_present = "family")]
    map_file: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<MapFamily>,
    /// Control angle for `--family cnot`, e.g. `pi/4-1e-7`.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<Angle>,
    /// Memory parameter in (0, 1] for `--family dephasing`.
    #[arg(long)]
    nu: Option<f64>,
    /// Start of the interval, in [0, 1].
    #[arg(long)]
    q1: Option<f64>,
    /// End of the interval, in [q1, 1].
    #[arg(long)]
    q2: Option<f64>,
}

#[derive(Args, Serialize)]
struct DomainArgs {
    #[command(flatten)]
    #[serde(flatten)]
    source: SourceArgs,
    /// `grid:RESOLUTION` or `mc:SAMPLES`.
    #[arg(long, default_value = "grid:64")]
    mode: ModeSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Point-cloud CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MeasureFamily {
    Pauli,
    /// Pauli maps conjugated by `U = Rz(u_phi) Ry(u_theta) Rz(u_xi)`.
    Rotated,
    /// All qubit maps including NCP ones; always rejected.
    Unrestricted,
}

#[derive(Args, Serialize)]
struct MeasureArgs {
    #[arg(long, value_enum)]
    family: MeasureFamily,
    #[arg(long, default_value_t = 1_000_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; results do not depend on it. Defaults to all cores.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    u_theta: Angle,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    u_phi: Angle,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    u_xi: Angle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ScanFamily {
    Cnot,
    /// Controlled-Q with `Q = Rz(phi) Ry(theta) Rz(xi)`.
    ControlledQ,
}

#[derive(Args, Serialize)]
struct ScanArgs {
    #[arg(long, value_enum)]
    family: ScanFamily,
    /// Control angles: `linspace:START:STOP:COUNT` or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    grid: GridSpec,
    /// Threshold M on the largest Choi eigenvalue modulus.
    #[arg(long, default_value_t = 1e6)]
    bound: f64,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    theta: Angle,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    phi: Angle,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    xi: Angle,
}

#[derive(Args, Serialize)]
struct ValidateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    source: SourceArgs,
    /// Uniform ball samples on top of the canonical probes.
    #[arg(long, default_value_t = 10_000)]
    probes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum RepArg {
    Choi,
    Superop,
}

#[derive(Args, Serialize)]
struct ExportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum, default_value = "choi")]
    rep: RepArg,
    /// Destination file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SingularMatrix { .. }
            | Error::NoConvergence { .. }
            | Error::DivergentMap { .. }
            | Error::RateSingularity { .. } => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<String, Failure>;

fn require<T: Copy>(value: Option<T>, flag: &str, family: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::input(format!("--family {family} needs --{flag}")))
}

fn read_document(path: &Path) -> Result<MapDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    MapDocument::parse(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

impl SourceArgs {
    /// The selected map and a short descriptor of where it came from.
    fn resolve(&self) -> Result<(QubitMap, String), Failure> {
        if let Some(path) = &self.map_file {
            let map = read_document(path)?.to_map()?;
            return Ok((map, format!("file:{}", path.display())));
        }
        let family = self
            .family
            .ok_or_else(|| Failure::input("give a map file or --family"))?;
        match family {
            MapFamily::Bncp => Ok((superop_from_choi(&bncp_example()).into(), "bncp".into())),
            MapFamily::Identity => Ok((SuperOp::identity().into(), "identity".into())),
            MapFamily::Cnot => {
                let theta = self
                    .theta
                    .clone()
                    .ok_or_else(|| Failure::input("--family cnot needs --theta"))?;
                Ok((
                    cnot_intermediate_map(theta.value),
                    format!("cnot theta={theta}"),
                ))
            }
            MapFamily::Dephasing => {
                let nu = require(self.nu, "nu", "dephasing")?;
                let q1 = require(self.q1, "q1", "dephasing")?;
                let q2 = require(self.q2, "q2", "dephasing")?;
                let model = DephasingModel::new(nu)?;
                Ok((
                    dephasing_intermediate(&model, q1, q2)?,
                    format!("dephasing nu={nu} q1={q1} q2={q2}"),
                ))
            }
        }
    }
}

fn cmd_classify(a: &SourceArgs, stamp: bool) -> CmdResult {
    let (map, descriptor) = a.resolve()?;
    let superop = map.superop().ok_or_else(|| Failure {
        code: EXIT_NUMERICAL,
        message: format!("{descriptor} is singular: its Choi matrix diverges"),
    })?;
    let choi = ncpmap_core::choi_from_superop(superop)?;
    let verdict = classify(&choi)?;
    let result = json!({
        "descriptor": descriptor,
        "verdict": verdict,
        "trace_preserving": choi.is_trace_preserving(),
        "unital": choi.is_unital(),
    });
    Ok(output::envelope("classify", a, &result, stamp))
}

fn cmd_domain(a: &DomainArgs, stamp: bool) -> CmdResult {
    let (map, descriptor) = a.source.resolve()?;
    let report = scan_domain(&map, &descriptor, a.mode.scan_mode(a.seed))?;
    if let Some(path) = &a.out {
        export_domain(&report, path)?;
    }
    let result = json!({
        "descriptor": report.descriptor,
        "scan": report.scan,
        "summary": report.summary,
        "fixed_lines": detect_fixed_lines(&map),
        "csv": a.out,
    });
    Ok(output::envelope("domain", a, &result, stamp))
}

fn cmd_measure(a: &mut MeasureArgs, stamp: bool) -> CmdResult {
    if a.family == MeasureFamily::Unrestricted {
        return Err(Failure {
            code: EXIT_REJECTED,
            message: UNRESTRICTED_EXPLANATION.into(),
        });
    }
    let workers = a.workers.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(usize::from)
            .unwrap_or(1)
    });
    if workers == 0 {
        return Err(Failure::input("--workers must be at least 1"));
    }
    a.workers = Some(workers);
    let estimate = match a.family {
        MeasureFamily::Pauli => estimate_pauli_measure(a.n, a.seed, workers)?,
        _ => {
            let u = ControlledUnitaryFamily {
                theta: a.u_theta.value,
                phi: a.u_phi.value,
                xi: a.u_xi.value,
                control_angle: 0.0,
            }
            .q_unitary();
            estimate_rotated_measure(&u, a.n, a.seed, workers)?
        }
    };
    Ok(output::envelope("measure", a, &estimate, stamp))
}

fn cmd_scan(a: &ScanArgs, stamp: bool) -> CmdResult {
    let family = match a.family {
        ScanFamily::Cnot => DivergenceFamily::Cnot,
        ScanFamily::ControlledQ => DivergenceFamily::ControlledQ {
            theta: a.theta.value,
            phi: a.phi.value,
            xi: a.xi.value,
        },
    };
    if a.bound.is_nan() || a.bound <= 0.0 {
        return Err(Failure::input("--bound must be positive"));
    }
    let scan = divergence_scan(family, &a.grid.values, a.bound)?;
    Ok(output::envelope("scan", a, &scan, stamp))
}

fn cmd_validate(a: &ValidateArgs, stamp: bool) -> CmdResult {
    let (map, descriptor) = a.source.resolve()?;
    let probes = ProbeConfig {
        ball_samples: a.probes,
        seed: a.seed,
        ..ProbeConfig::default()
    };
    let verdict = check_validity(&map, &probes);
    let result = json!({ "descriptor": descriptor, "verdict": verdict });
    Ok(output::envelope("validate", a, &result, stamp))
}

fn cmd_export(a: &ExportArgs) -> CmdResult {
    if a.source.map_file.is_some() {
        return Err(Failure::input("export-map takes --family, not a map file"));
    }
    let (map, _) = a.source.resolve()?;
    let rep = match a.rep {
        RepArg::Choi => Representation::Choi,
        RepArg::Superop => Representation::Superop,
    };
    let text = MapDocument::from_map(&map, rep)?.to_json();
    match &a.out {
        Some(path) => {
            fs::write(path, &text).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stamp = !cli.no_timestamp;
    let outcome = match cli.command {
        Command::Classify(a) => cmd_classify(&a, stamp),
        Command::Domain(a) => cmd_domain(&a, stamp),
        Command::Measure(mut a) => cmd_measure(&mut a, stamp),
        Command::Scan(a) => cmd_scan(&a, stamp),
        Command::Validate(a) => cmd_validate(&a, stamp),
        Command::ExportMap(a) => cmd_export(&a),
    };
    match outcome {
        Ok(text) => {
            if !text.is_empty() {
                println!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
