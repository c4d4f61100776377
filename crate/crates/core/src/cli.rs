//! The `adia` command line: search, spectrum, trotter-audit, nmr-compile
//! and gap-sweep.
//!
//! Every command is computed by [`execute`] into in-memory report bodies;
//! [`run`] writes them atomically and maps failures onto exit codes
//! (0 success, 2 input error, 3 numeric error).

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::database::{self, DatabaseError, EncodedDatabase, SearchOutcome};
use crate::evolve::{self, EvolutionPlan, EvolutionReport, EvolveError, FidelityAudit, Method, QuantumState};
use crate::nmr::{self, NmrError, SpinSystem, StepVerification};
use crate::operators::{
    database_operator, initial_hamiltonian, pauli_decompose, problem_hamiltonian, CouplingStrength,
    HermitianOperator, OperatorError,
};
use crate::spectrum::{self, GapReport, PermutationInstances, ScalingRow, SpectrumError, SweepOptions};

pub const SCHEMA_VERSION: u32 = 1;

/// Per-step and overall fidelity thresholds for the Trotter audit.
pub const AUDIT_STEP_THRESHOLD: f64 = 0.996;
pub const AUDIT_OVERALL_TARGET: f64 = 0.991;
pub const AUDIT_OVERALL_TOLERANCE: f64 = 0.005;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<DatabaseError> for CliError {
    fn from(e: DatabaseError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<OperatorError> for CliError {
    fn from(e: OperatorError) -> Self {
        match e {
            OperatorError::BadCoupling(_) => CliError::Input(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<EvolveError> for CliError {
    fn from(e: EvolveError) -> Self {
        match e {
            EvolveError::InvalidPlan(_) => CliError::Input(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<SpectrumError> for CliError {
    fn from(e: SpectrumError) -> Self {
        match e {
            SpectrumError::TooFewGridPoints(_) | SpectrumError::UnsupportedSize(_) => CliError::Input(e.to_string()),
            SpectrumError::Evolve(inner) => inner.into(),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<NmrError> for CliError {
    fn from(e: NmrError) -> Self {
        match e {
            NmrError::Evolve(inner) => inner.into(),
            NmrError::WrongQubitCount(_) | NmrError::UnsupportedHamiltonian(_) | NmrError::BadCoupling(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Continuous,
    Discrete,
    Trotter,
}

#[derive(Debug, Parser)]
#[command(name = "adia", version, about = "Oracle-free adiabatic database search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search the database for a value and decode the answer
    Search(RunArgs),
    /// Eigenvalue trace of H(s) and its minimum gap
    Spectrum(RunArgs),
    /// Per-step and overall fidelity of the second-order Trotter split
    TrotterAudit(RunArgs),
    /// Compile the two-qubit Trotter steps into NMR pulse sequences
    NmrCompile(RunArgs),
    /// Minimum gap and time-to-success versus register size
    GapSweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Database file (CSV `key,value` or JSON); defaults to the bundled phone book
    #[arg(long)]
    pub db: Option<PathBuf>,
    /// Value label to search for
    #[arg(long, default_value = "3601002")]
    pub target: String,
    /// Transverse-field coupling strength
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Total evolution time
    #[arg(long = "T", default_value_t = 10.45)]
    pub total_time: f64,
    /// Step parameter; S + 1 discrete steps of length T/(S+1)
    #[arg(long = "S", default_value_t = 10)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Trotter)]
    pub method: MethodArg,
    /// Spectrum grid points
    #[arg(long, default_value_t = spectrum::DEFAULT_GRID_POINTS)]
    pub grid: usize,
    /// RK4 step for the continuous method (default min(T/10000, 0.2/‖H‖))
    #[arg(long)]
    pub dt: Option<f64>,
    /// Primary output file; companion files are written next to it
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Reject targets that are not stored in the database
    #[arg(long)]
    pub strict: bool,
}

impl Default for RunArgs {
    fn default() -> Self {
        Self {
            db: None,
            target: "3601002".into(),
            g: 1.0,
            total_time: 10.45,
            steps: 10,
            method: MethodArg::Trotter,
            grid: spectrum::DEFAULT_GRID_POINTS,
            dt: None,
            out: None,
            seed: 0,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 2)]
    pub n_min: usize,
    #[arg(long, default_value_t = 5)]
    pub n_max: usize,
    /// Target code searched in each generated permutation database
    #[arg(long, default_value_t = 2.0)]
    pub target_code: f64,
    /// Wall-clock cap per instance, seconds
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
}

impl Default for SweepArgs {
    fn default() -> Self {
        Self {
            run: RunArgs {
                grid: 201,
                ..RunArgs::default()
            },
            n_min: 2,
            n_max: 5,
            target_code: 2.0,
            timeout: 60.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub path: PathBuf,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    /// Printed to stdout.
    pub summary: String,
    pub files: Vec<OutputFile>,
}

/// The encoded instance shared by the database-driven commands.
pub struct Instance {
    pub db: EncodedDatabase,
    pub target_label: String,
    pub target_code: f64,
    pub target_in_database: bool,
    pub hi: HermitianOperator,
    pub hp: HermitianOperator,
    pub plan: EvolutionPlan,
}

impl Instance {
    pub fn load(args: &RunArgs) -> Result<Self, CliError> {
        let rows = match &args.db {
            Some(path) => database::load_rows(path)?,
            None => database::parse_csv(database::PHONE_BOOK_CSV)?,
        };
        let db = database::encode_database(&rows)?;
        let target = db.encode_target(&args.target)?;
        if args.strict && !target.in_database {
            return Err(DatabaseError::TargetNotInDatabase(args.target.clone()).into());
        }
        let g = CouplingStrength::new(args.g)?;
        let plan = EvolutionPlan::new(args.total_time, args.steps, g)?;
        let hp = problem_hamiltonian(&database_operator(&db), target.code)?;
        let hi = initial_hamiltonian(db.n_qubits(), g);
        Ok(Self {
            db,
            target_label: args.target.trim().to_string(),
            target_code: target.code,
            target_in_database: target.in_database,
            hi,
            hp,
            plan,
        })
    }

    fn parameters(&self, dt: Option<f64>) -> Parameters {
        Parameters {
            n_qubits: self.db.n_qubits(),
            g: self.plan.coupling().value(),
            total_time: self.plan.total_time(),
            steps: self.plan.steps(),
            tau: self.plan.tau(),
            dt,
            schedule: self.plan.schedule().name().to_string(),
            target_label: self.target_label.clone(),
            target_code: self.target_code,
            target_in_database: self.target_in_database,
            multi_solution_database: self.db.has_duplicate_values(),
        }
    }
}

#[derive(Debug, Serialize)]
struct Parameters {
    n_qubits: usize,
    g: f64,
    #[serde(rename = "T")]
    total_time: f64,
    #[serde(rename = "S")]
    steps: usize,
    tau: f64,
    dt: Option<f64>,
    schedule: String,
    target_label: String,
    target_code: f64,
    target_in_database: bool,
    multi_solution_database: bool,
}

#[derive(Serialize)]
struct SearchReport<'a> {
    schema_version: u32,
    method: Method,
    parameters: Parameters,
    probabilities: &'a [f64],
    ground_population_trace: &'a [(f64, f64)],
    fidelity_audit: &'a Option<FidelityAudit>,
    outcomes: Vec<SearchOutcome>,
}

#[derive(Serialize)]
struct SpectrumReport {
    schema_version: u32,
    parameters: Parameters,
    grid_points: usize,
    #[serde(flatten)]
    gap: GapReport,
}

#[derive(Serialize)]
struct AuditReport {
    schema_version: u32,
    parameters: Parameters,
    per_step: Vec<f64>,
    overall: f64,
    min_per_step: f64,
    per_step_threshold: f64,
    overall_target: f64,
    overall_tolerance: f64,
    per_step_pass: bool,
    overall_pass: bool,
}

#[derive(Serialize)]
struct NmrStepReport {
    #[serde(flatten)]
    check: StepVerification,
    global_phase: f64,
}

#[derive(Serialize)]
struct NmrReport {
    schema_version: u32,
    parameters: Parameters,
    system: SpinSystem,
    steps: Vec<NmrStepReport>,
    min_fidelity: f64,
    all_pass: bool,
    final_probabilities: Vec<f64>,
    top_outcome: SearchOutcome,
}

#[derive(Serialize)]
struct SweepReport<'a> {
    schema_version: u32,
    seed: u64,
    target_code: f64,
    grid_points: usize,
    success_threshold: f64,
    rows: &'a [ScalingRow],
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn sibling(primary: &Path, suffix: &str) -> PathBuf {
    let stem = primary.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    primary.with_file_name(format!("{stem}{suffix}"))
}

fn primary_path(args: &RunArgs, default: &str) -> PathBuf {
    args.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

/// Runs the selected evolution method on the instance.
pub fn evolve_instance(inst: &Instance, method: MethodArg, dt: Option<f64>) -> Result<(EvolutionReport, Option<f64>), CliError> {
    Ok(match method {
        MethodArg::Continuous => {
            let dt = dt.unwrap_or_else(|| inst.plan.default_dt(&inst.hi, &inst.hp));
            (evolve::evolve_continuous(&inst.hi, &inst.hp, &inst.plan, dt)?, Some(dt))
        }
        MethodArg::Discrete => (evolve::evolve_discrete_exact(&inst.hi, &inst.hp, &inst.plan)?, None),
        MethodArg::Trotter => (evolve::evolve_trotter(&inst.hi, &inst.hp, &inst.plan)?, None),
    })
}

pub fn cmd_search(args: &RunArgs) -> Result<CommandOutput, CliError> {
    let inst = Instance::load(args)?;
    let (report, dt) = evolve_instance(&inst, args.method, args.dt)?;
    let outcomes = inst.db.decode_outcome(&report.probabilities)?;
    let top = &outcomes[0];
    let mut summary = format!("{}\t{}", top.key, top.probability);
    if inst.db.has_duplicate_values() {
        summary.push_str("\n(warning: database has duplicate values; this may be a multi-solution search)");
    }
    let body = to_json(&SearchReport {
        schema_version: SCHEMA_VERSION,
        method: report.method,
        parameters: inst.parameters(dt),
        probabilities: &report.probabilities,
        ground_population_trace: &report.ground_population_trace,
        fidelity_audit: &report.fidelity_audit,
        outcomes: outcomes.clone(),
    });
    Ok(CommandOutput {
        summary,
        files: vec![OutputFile {
            path: primary_path(args, "search_report.json"),
            body,
        }],
    })
}

pub fn cmd_spectrum(args: &RunArgs) -> Result<CommandOutput, CliError> {
    let inst = Instance::load(args)?;
    let trace = spectrum::trace_spectrum(&inst.hi, &inst.hp, args.grid)?;
    let gap = spectrum::min_gap(&trace);
    let csv_path = primary_path(args, "spectrum.csv");
    let summary = format!(
        "min_gap {} at s = {}; ground degeneracy at s = 1: {}",
        gap.min_gap, gap.s_at_min, gap.ground_degeneracy_at_end
    );
    let gap_body = to_json(&SpectrumReport {
        schema_version: SCHEMA_VERSION,
        parameters: inst.parameters(None),
        grid_points: args.grid,
        gap,
    });
    Ok(CommandOutput {
        summary,
        files: vec![
            OutputFile {
                path: sibling(&csv_path, ".gap.json"),
                body: gap_body,
            },
            OutputFile {
                path: csv_path,
                body: trace.to_csv(),
            },
        ],
    })
}

pub fn cmd_trotter_audit(args: &RunArgs) -> Result<CommandOutput, CliError> {
    let inst = Instance::load(args)?;
    let audit = evolve::trotter_audit(&inst.hi, &inst.hp, &inst.plan)?;
    let min_per_step = audit.per_step.iter().copied().fold(f64::INFINITY, f64::min);
    let per_step_pass = min_per_step >= AUDIT_STEP_THRESHOLD;
    let overall_pass = (audit.overall - AUDIT_OVERALL_TARGET).abs() <= AUDIT_OVERALL_TOLERANCE;
    let summary = format!(
        "min step fidelity {min_per_step} ({}), overall {} ({})",
        if per_step_pass { "pass" } else { "FAIL" },
        audit.overall,
        if overall_pass { "pass" } else { "FAIL" },
    );
    let body = to_json(&AuditReport {
        schema_version: SCHEMA_VERSION,
        parameters: inst.parameters(None),
        per_step: audit.per_step,
        overall: audit.overall,
        min_per_step,
        per_step_threshold: AUDIT_STEP_THRESHOLD,
        overall_target: AUDIT_OVERALL_TARGET,
        overall_tolerance: AUDIT_OVERALL_TOLERANCE,
        per_step_pass,
        overall_pass,
    });
    Ok(CommandOutput {
        summary,
        files: vec![OutputFile {
            path: primary_path(args, "trotter_audit.json"),
            body,
        }],
    })
}

pub fn cmd_nmr_compile(args: &RunArgs) -> Result<CommandOutput, CliError> {
    let inst = Instance::load(args)?;
    if inst.db.n_qubits() != 2 {
        return Err(NmrError::WrongQubitCount(inst.db.n_qubits()).into());
    }
    let system = SpinSystem::chloroform();
    let terms = pauli_decompose(&inst.hp);
    let sequences = nmr::compile_full(&inst.plan, &terms, &system)?;

    let mut steps = Vec::with_capacity(sequences.len());
    let mut psi = evolve::initial_ground_state(2);
    for seq in &sequences {
        let reference = evolve::trotter_step(&inst.hi, &inst.hp, &inst.plan, seq.step)?;
        steps.push(NmrStepReport {
            check: nmr::verify_step(seq, &reference)?,
            global_phase: seq.global_phase,
        });
        psi = psi.apply(&nmr::simulate_sequence(seq));
    }
    let min_fidelity = steps.iter().map(|s| s.check.fidelity).fold(f64::INFINITY, f64::min);
    let final_probabilities = evolve::measure_probabilities(&psi);
    let top_outcome = inst.db.decode_outcome(&final_probabilities)?.remove(0);
    let all_pass = min_fidelity >= 1.0 - 1e-6;

    let program_path = primary_path(args, "pulse_program.jsonl");
    let summary = format!(
        "{} sequences, min step fidelity {min_fidelity}; top outcome {} ({})",
        sequences.len(),
        top_outcome.key,
        top_outcome.probability
    );
    let verify = to_json(&NmrReport {
        schema_version: SCHEMA_VERSION,
        parameters: inst.parameters(None),
        system,
        steps,
        min_fidelity,
        all_pass,
        final_probabilities,
        top_outcome,
    });
    Ok(CommandOutput {
        summary,
        files: vec![
            OutputFile {
                path: sibling(&program_path, ".verify.json"),
                body: verify,
            },
            OutputFile {
                path: program_path,
                body: nmr::pulse_program_jsonl(&sequences),
            },
        ],
    })
}

pub fn cmd_gap_sweep(args: &SweepArgs) -> Result<CommandOutput, CliError> {
    if args.n_min > args.n_max {
        return Err(CliError::Input(format!("empty n range {}..={}", args.n_min, args.n_max)));
    }
    if !(args.timeout > 0.0) {
        return Err(CliError::Input("timeout must be positive".into()));
    }
    let options = SweepOptions {
        coupling: CouplingStrength::new(args.run.g)?,
        grid_points: args.run.grid,
        instance_timeout: Some(Duration::from_secs_f64(args.timeout)),
        ..SweepOptions::default()
    };
    let generator = PermutationInstances {
        seed: args.run.seed,
        target: args.target_code,
        anchor_example: true,
    };
    let n_range: Vec<usize> = (args.n_min..=args.n_max).collect();
    let rows = spectrum::gap_scaling_sweep(&n_range, &generator, &options)?;
    let csv_path = primary_path(&args.run, "gap_sweep.csv");
    let summary = rows
        .iter()
        .map(|r| format!("n={} N={} min_gap={} T={:?}", r.n, r.size, r.min_gap, r.t_to_success))
        .collect::<Vec<_>>()
        .join("\n");
    let json = to_json(&SweepReport {
        schema_version: SCHEMA_VERSION,
        seed: args.run.seed,
        target_code: args.target_code,
        grid_points: options.grid_points,
        success_threshold: options.success_threshold,
        rows: &rows,
    });
    Ok(CommandOutput {
        summary,
        files: vec![
            OutputFile {
                path: sibling(&csv_path, ".json"),
                body: json,
            },
            OutputFile {
                path: csv_path,
                body: spectrum::scaling_csv(&rows),
            },
        ],
    })
}

pub fn execute(command: &Command) -> Result<CommandOutput, CliError> {
    match command {
        Command::Search(a) => cmd_search(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::TrotterAudit(a) => cmd_trotter_audit(a),
        Command::NmrCompile(a) => cmd_nmr_compile(a),
        Command::GapSweep(a) => cmd_gap_sweep(a),
    }
}

/// Writes `body` to a temporary file beside `path` and renames it into place.
pub fn write_atomic(path: &Path, body: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(body.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn thread_cap() -> Option<usize> {
    std::env::var("ADIA_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Executes a parsed command, writes its files and returns the exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => Err(CliError::Numeric(e.to_string())),
        },
        None => execute(&cli.command),
    };
    let output = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("adia: {e}");
            return e.exit_code();
        }
    };
    for f in &output.files {
        if let Err(e) = write_atomic(&f.path, &f.body) {
            eprintln!("adia: cannot write {}: {e}", f.path.display());
            return 2;
        }
    }
    println!("{}", output.summary);
    0
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}

/// Final state of the full compiled pulse program, for callers that want
/// the state rather than the report.
pub fn run_pulse_program(sequences: &[nmr::PulseSequence]) -> QuantumState {
    sequences
        .iter()
        .fold(evolve::initial_ground_state(2), |psi, seq| psi.apply(&nmr::simulate_sequence(seq)))
}
