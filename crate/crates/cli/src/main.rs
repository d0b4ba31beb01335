use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use steerbox_core::certify::{classify, reproduce};
use steerbox_core::discord::{discord, is_classical_quantum, is_quantum_classical, SearchConfig};
use steerbox_core::io::{box_to_json, natural_mode, read_box, read_state};
use steerbox_core::quantum::{bb84_box_exact, noisy_chsh_box, paper_state};
use steerbox_core::scalar::{parse_q, Scalar};
use steerbox_core::{ArithmeticMode, CorrBox, DensityMatrix, Direction, Error, SolverConfig};

const EXIT_CLAIMS_FAILED: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "steerbox", version, about = "Locality, superlocality and superunsteerability of 2x2x2x2 correlation boxes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a box read from a JSON file.
    Analyze(AnalyzeArgs),
    /// Write a member of the noisy CHSH or BB84 family as a JSON box.
    Family(FamilyArgs),
    /// Quantum discord of a two-qubit state.
    Discord(DiscordArgs),
    /// Run the full reproduction suite.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct SolverArgs {
    /// Number of random starts of the numeric search.
    #[arg(long, default_value_t = 2000)]
    starts: usize,
    /// Base seed; the STEERBOX_SEED environment variable takes precedence.
    #[arg(long, default_value_t = 20180)]
    seed: u64,
    /// Sum of squared residuals above which a failed search counts as infeasible.
    #[arg(long, default_value_t = 1e-6)]
    residual_threshold: f64,
    /// Entry-wise tolerance for accepting a floating certificate.
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, Failure> {
        let seed = match std::env::var("STEERBOX_SEED") {
            Ok(s) => s.trim().parse().map_err(|_| Failure::usage(format!("STEERBOX_SEED is not an integer: {s:?}")))?,
            Err(_) => self.seed,
        };
        let cfg = SolverConfig {
            starts: self.starts,
            seed,
            residual_threshold: self.residual_threshold,
            certificate_tol: self.tolerance,
            ..SolverConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Rational,
    Float,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// JSON box file.
    input: PathBuf,
    #[arg(long, default_value_t = 2)]
    da: usize,
    #[arg(long, default_value_t = 2)]
    db: usize,
    /// Arithmetic used for the analysis; float disables the exact engines.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Write the JSON report here.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the text summary.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Chsh,
    Bb84,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(value_enum)]
    name: FamilyName,
    /// Visibility in [0, 1], as a decimal or `num/den`.
    #[arg(long = "v", allow_hyphen_values = true)]
    visibility: String,
    /// Output mode; defaults to rational when the entries are rational.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirArg {
    Ab,
    Ba,
    Both,
}

#[derive(Args)]
struct DiscordArgs {
    /// JSON state file, or `paper` for the built-in quantum-classical state.
    state: String,
    #[arg(long, value_enum, default_value = "both")]
    dir: DirArg,
    /// Print JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Directory for reproduction.json and reproduction.txt.
    #[arg(long, default_value = "reproduction")]
    out_dir: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_IO,
            _ => EXIT_VALIDATION,
        };
        Self { code, message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
}

fn load_box(path: &Path) -> Result<CorrBox, Failure> {
    read_box(path).map_err(|e| match e {
        Error::Io(e) => io_failure(path, e),
        e => Failure::usage(format!("{}: {e}", path.display())),
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| io_failure(path, e))
}

fn analyze(args: AnalyzeArgs) -> Result<u8, Failure> {
    let mut cfg = args.solver.config()?;
    let mut b = load_box(&args.input)?;
    if let Some(Mode::Float) = args.mode {
        b = b.to_float();
        cfg.exact = false;
    }
    let report = classify(&b, args.da, args.db, &cfg)?;
    let js = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    if let Some(out) = &args.out {
        write_file(out, &(js.clone() + "\n"))?;
    }
    if args.json {
        println!("{js}");
    } else {
        print!("{}", report.to_text());
    }
    Ok(0)
}

fn family(args: FamilyArgs) -> Result<u8, Failure> {
    let v = parse_q(&args.visibility)?;
    let b = match args.name {
        FamilyName::Bb84 => bb84_box_exact(&v)?,
        FamilyName::Chsh => noisy_chsh_box(v.approx())?,
    };
    let mode = match args.mode {
        Some(Mode::Rational) => ArithmeticMode::Rational,
        Some(Mode::Float) => ArithmeticMode::Float,
        None => natural_mode(&b),
    };
    let b = if mode == ArithmeticMode::Float && b.is_rational() { b.to_float() } else { b };
    let js = box_to_json(&b, mode)? + "\n";
    match &args.out {
        Some(out) => write_file(out, &js)?,
        None => print!("{js}"),
    }
    Ok(0)
}

fn discord_cmd(args: DiscordArgs) -> Result<u8, Failure> {
    let state: DensityMatrix = if args.state == "paper" {
        paper_state()
    } else {
        let path = Path::new(&args.state);
        read_state(path).map_err(|e| match e {
            Error::Io(e) => io_failure(path, e),
            e => Failure::usage(format!("{}: {e}", path.display())),
        })?
    };
    if state.dim() != 4 {
        return Err(Failure::usage(format!("expected a two-qubit state, got dimension {}", state.dim())));
    }
    let dirs: &[Direction] = match args.dir {
        DirArg::Ab => &[Direction::AliceToBob],
        DirArg::Ba => &[Direction::BobToAlice],
        DirArg::Both => &[Direction::AliceToBob, Direction::BobToAlice],
    };
    let cfg = SearchConfig::default();
    let results = dirs.iter().map(|&d| discord(&state, d, &cfg)).collect::<Result<Vec<_>, _>>()?;
    let qc = is_quantum_classical(&state, 1e-9)?;
    let cq = is_classical_quantum(&state, 1e-9)?;
    if args.json {
        let js = json!({ "results": results, "quantum_classical": qc, "classical_quantum": cq });
        println!("{}", serde_json::to_string_pretty(&js).map_err(Error::from)?);
    } else {
        for r in &results {
            let name = match r.direction {
                Direction::AliceToBob => "A->B",
                Direction::BobToAlice => "B->A",
            };
            println!("{name}  discord {:.9} bits", r.discord);
            println!("      mutual information {:.9}, classical correlation {:.9}", r.mutual_information, r.classical_correlation);
            let m = r.measurement;
            println!("      optimal measurement ({:.6}, {:.6}, {:.6})", m[0], m[1], m[2]);
        }
        println!("quantum-classical {qc}, classical-quantum {cq}");
    }
    Ok(0)
}

fn reproduce_cmd(args: ReproduceArgs) -> Result<u8, Failure> {
    let cfg = args.solver.config()?;
    let report = reproduce(&cfg)?;
    report.write(&args.out_dir).map_err(|e| io_failure(&args.out_dir, e))?;
    print!("{}", report.to_text());
    Ok(if report.all_pass() { 0 } else { EXIT_CLAIMS_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Family(a) => family(a),
        Command::Discord(a) => discord_cmd(a),
        Command::Reproduce(a) => reproduce_cmd(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
