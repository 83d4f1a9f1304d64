//! `polybloch`: essential-norm bounds for `C_φ − C_ψ : B → H^∞` on the
//! unit polydisc, Bloch-norm estimates, and the verification suites.
//!
//! ```bash
//! polybloch analyze --dim 2 --phi "z1; z2" --psi "pow(z1,2); z2"
//! polybloch analyze --job job.json --format csv --out rows.csv
//! polybloch bloch --dim 2 --f "z1*z2"
//! polybloch verify lemma1 --trials 10000
//! ```
//!
//! Exit codes: 0 success, 1 parse or usage error, 2 a symbol escapes the
//! polydisc, 3 I/O failure, 4 a verification suite found violations.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polybloch::bloch::{estimate_bloch_norms, BlochConfig};
use polybloch::job::{run_analysis, JobConfig, JobError, OutputFormat};
use polybloch::report::{rows_to_csv, to_json, SCHEMA_VERSION, TOOL_VERSION};
use polybloch::symbols::parse_expr;
use polybloch::verify::{
    chain_subjects, check_fm, check_jets, check_lemma1, check_lemma2, check_norm_chain, check_oracle,
    curated_family, InequalityReport, DEFAULT_FM_MODULI, DEFAULT_R_LADDER,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "polybloch", version, about = "Essential-norm bounds for differences of composition operators on the polydisc")]
struct Cli {
    /// Worker threads (default: machine parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound the essential norm of C_phi - C_psi and decide compactness
    Analyze(AnalyzeArgs),
    /// Estimate the Bloch norms of one function
    Bloch(BlochArgs),
    /// Run a verification suite
    Verify(VerifyArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// JSON job file; flags given alongside override its fields
    #[arg(long)]
    job: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    /// Components of phi separated by ';'
    #[arg(long)]
    phi: Option<String>,
    /// Components of psi separated by ';'
    #[arg(long)]
    psi: Option<String>,
    /// Comma-separated, strictly decreasing
    #[arg(long, value_delimiter = ',')]
    delta_ladder: Option<Vec<f64>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    refine_iters: Option<usize>,
    #[arg(long, env = "POLYBLOCH_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Record wall-clock time in runtime_ms (output is then not reproducible)
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct BlochArgs {
    #[arg(long)]
    f: String,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, env = "POLYBLOCH_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Lemma1,
    Lemma2,
    Norms,
    Oracle,
    Fm,
    Jets,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Trials per function (directions per pair for `oracle`, pairs for `jets`)
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, env = "POLYBLOCH_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Validation(String),
    Io(String),
    Violations,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Io(_) => 3,
            Failure::Violations => 4,
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let mut config = match &args.job {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<JobConfig>(&text)
                .map_err(|e| Failure::Usage(format!("job file {}: {e}", path.display())))?
        }
        None => {
            let (Some(dim), Some(phi), Some(psi)) = (args.dim, args.phi.clone(), args.psi.clone()) else {
                return Err(Failure::Usage("--dim, --phi and --psi are required without --job".into()));
            };
            JobConfig::new(dim, phi, psi)
        }
    };
    if let Some(v) = args.dim {
        config.dim = v;
    }
    if let Some(v) = args.phi {
        config.phi_source = v;
    }
    if let Some(v) = args.psi {
        config.psi_source = v;
    }
    if let Some(v) = args.delta_ladder {
        config.delta_ladder = v;
    }
    if let Some(v) = args.samples {
        config.sample_budget = v;
    }
    if let Some(v) = args.refine_iters {
        config.refine_iters = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.out {
        config.output_path = Some(v.display().to_string());
    }
    if let Some(v) = args.format {
        config.format = match v {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        };
    }

    let doc = run_analysis(&config, args.timing).map_err(|e| match e {
        JobError::Validation { ref report, .. } => {
            let witness = report
                .witness
                .as_ref()
                .and_then(|w| serde_json::to_string(w).ok())
                .unwrap_or_else(|| "none".into());
            Failure::Validation(format!("{e}\nwitness z = {witness}"))
        }
        other => Failure::Usage(other.to_string()),
    })?;
    let text = match config.format {
        OutputFormat::Json => to_json(&doc).map_err(|e| Failure::Io(e.to_string()))?,
        OutputFormat::Csv => rows_to_csv(&doc.report).map_err(|e| Failure::Io(e.to_string()))?,
    };
    emit(&text, config.output_path.as_ref().map(PathBuf::from).as_ref())?;
    eprintln!(
        "verdict {:?}: {:.6e} <= ||C_phi - C_psi||_e <= {:.6e}",
        doc.report.verdict, doc.report.lower_bound, doc.report.upper_bound
    );
    Ok(())
}

fn bloch(args: BlochArgs) -> Result<(), Failure> {
    let f = parse_expr(&args.f, args.dim).map_err(|e| Failure::Usage(format!("f: {e}")))?;
    let estimate = estimate_bloch_norms(&f, args.dim, &BlochConfig::new(args.samples, args.seed))
        .map_err(|e| Failure::Usage(format!("f cannot be evaluated: {e}")))?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "tool_version": TOOL_VERSION,
        "f": args.f,
        "dim": args.dim,
        "seed": args.seed,
        "estimate": estimate,
    });
    emit(&to_json(&doc).map_err(|e| Failure::Io(e.to_string()))?, args.out.as_ref())
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let seed = args.seed;
    let (name, reports): (&str, Vec<InequalityReport>) = match args.suite {
        Suite::Lemma1 => {
            let trials = args.trials.unwrap_or(10_000);
            ("lemma1", (1..=3).map(|n| check_lemma1(&curated_family(n), trials, seed + n as u64)).collect())
        }
        Suite::Lemma2 => {
            let trials = args.trials.unwrap_or(4000);
            let reports = (1..=3)
                .map(|n| check_lemma2(&curated_family(n), 0.5, &DEFAULT_R_LADDER, trials, seed + n as u64))
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::Usage(e.to_string()))?;
            ("lemma2", reports)
        }
        Suite::Norms => {
            let trials = args.trials.unwrap_or(10_000);
            ("norms", vec![check_norm_chain(&chain_subjects(10, seed), trials, seed)])
        }
        Suite::Oracle => {
            let trials = args.trials.unwrap_or(100_000);
            ("oracle", vec![check_oracle(100, trials, 1e-4, seed)])
        }
        Suite::Fm => {
            let trials = args.trials.unwrap_or(10_000);
            let report = check_fm(&DEFAULT_FM_MODULI, 2, 20_000, trials, seed).map_err(|e| Failure::Usage(e.to_string()))?;
            ("fm", vec![report])
        }
        Suite::Jets => {
            let trials = args.trials.unwrap_or(1000);
            ("jets", vec![check_jets(trials, 1e-6, seed)])
        }
    };
    let violations: usize = reports.iter().map(|r| r.violations).sum();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "tool_version": TOOL_VERSION,
        "suite": name,
        "seed": seed,
        "violations": violations,
        "reports": reports,
    });
    emit(&to_json(&doc).map_err(|e| Failure::Io(e.to_string()))?, args.out.as_ref())?;
    eprintln!("{name}: {violations} violations");
    if violations == 0 {
        Ok(())
    } else {
        Err(Failure::Violations)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Bloch(args) => bloch(args),
        Command::Verify(args) => verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Validation(m) | Failure::Io(m) => eprintln!("error: {m}"),
                Failure::Violations => {}
            }
            ExitCode::from(f.code())
        }
    }
}
