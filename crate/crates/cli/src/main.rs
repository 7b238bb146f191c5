mod suites;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use apcore::extremal::{bound_curves, increment_oracle, max_apfree_group, max_apfree_interval, Family};
use apcore::increment::{drive, Mode, PipelineConfig};
use apcore::io::{parse_group, parse_set_file};
use apcore::ApcError;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "apc", version, about = "Density-increment pipeline for 3-AP-free sets, with brute-force oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run randomized self-check suites.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest group order sampled by the suites.
        #[arg(long, default_value_t = 64)]
        size_cap: usize,
    },
    /// Drive the density increment on a set and print the trace as JSON.
    Pipeline {
        #[arg(long, value_enum)]
        mode: PipelineMode,
        #[arg(long)]
        group: String,
        #[arg(long)]
        set: PathBuf,
        /// JSON file with pipeline configuration overrides.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the trace here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest 3-AP-free subset of [1, N] or of a group.
    Search {
        #[arg(long, conflicts_with = "group", required_unless_present = "group")]
        n: Option<usize>,
        #[arg(long)]
        group: Option<String>,
        /// Node budget for branch and bound.
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
    },
    /// Brute-force density-increment oracles.
    Oracle {
        #[command(subcommand)]
        kind: OracleKind,
    },
    /// Evaluate the upper-bound curves at N.
    Bound {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        c: f64,
    },
}

#[derive(Subcommand)]
enum OracleKind {
    /// Densest translate over all subspaces of codimension at most M.
    Increment {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        codim: usize,
        /// Maximum number of subspaces enumerated.
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Harmonic,
    Bohr,
    Sifting,
    Periodicity,
    Increment,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum PipelineMode {
    Ff,
    Cyclic,
}

fn error_exit(e: &ApcError) -> u8 {
    match e {
        ApcError::InvalidArgument(_) | ApcError::Precondition(_) => 2,
        ApcError::Internal(_) => 1,
        ApcError::ResourceLimit(_) | ApcError::NotFound(_) => 3,
    }
}

fn fail(e: ApcError) -> ExitCode {
    eprintln!("apc: {e}");
    if error_exit(&e) == 2 {
        eprintln!("usage: apc <verify|pipeline|search|oracle|bound> [options]; see `apc --help`");
    }
    ExitCode::from(error_exit(&e))
}

fn read(path: &Path) -> Result<String, ApcError> {
    std::fs::read_to_string(path).map_err(|e| ApcError::InvalidArgument(format!("{}: {e}", path.display())))
}

fn emit(value: &impl serde::Serialize, out: Option<&Path>) -> Result<(), ApcError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| ApcError::Internal(e.to_string()))?;
    match out {
        Some(p) => {
            std::fs::write(p, text + "\n").map_err(|e| ApcError::InvalidArgument(format!("{}: {e}", p.display())))
        }
        None => {
            // a closed pipe downstream is not an error for a batch tool
            let _ = writeln!(std::io::stdout(), "{text}");
            Ok(())
        }
    }
}

fn verify(suite: Suite, seed: u64, cap: usize) -> ExitCode {
    let names: Vec<&str> = match suite {
        Suite::All => suites::SUITES.to_vec(),
        Suite::Harmonic => vec!["harmonic"],
        Suite::Bohr => vec!["bohr"],
        Suite::Sifting => vec!["sifting"],
        Suite::Periodicity => vec!["periodicity"],
        Suite::Increment => vec!["increment"],
    };
    let mut ok = true;
    for name in names {
        let r = suites::run(name, seed, cap);
        let status = if r.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{status} {}: {} checks, {} failures", r.name, r.checks, r.failures.len());
        for f in &r.failures {
            eprintln!("  {}: {f}", r.name);
        }
        ok &= r.failures.is_empty();
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn pipeline(mode: PipelineMode, group: &str, set: &Path, config: Option<&Path>, out: Option<&Path>) -> ExitCode {
    let run = || -> Result<i32, ApcError> {
        let g = parse_group(group)?;
        let (fg, a) = parse_set_file(&read(set)?)?;
        if fg != g {
            return Err(ApcError::InvalidArgument(format!(
                "--group {} does not match the set file group {}",
                g.descriptor(),
                fg.descriptor()
            )));
        }
        let cfg: PipelineConfig = match config {
            Some(p) => serde_json::from_str(&read(p)?)
                .map_err(|e| ApcError::InvalidArgument(format!("{}: {e}", p.display())))?,
            None => PipelineConfig::default(),
        };
        cfg.validate()?;
        let mode = match mode {
            PipelineMode::Ff => Mode::Ff,
            PipelineMode::Cyclic => Mode::Cyclic,
        };
        let trace = drive(mode, &g, &a, &cfg)?;
        emit(&trace, out)?;
        if let Some(m) = &trace.message {
            eprintln!("apc: {m}");
        }
        Ok(trace.exit_code())
    };
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => fail(e),
    }
}

fn search(n: Option<usize>, group: Option<&str>, budget: u64) -> ExitCode {
    let run = || -> Result<bool, ApcError> {
        let (domain, r) = match (n, group) {
            (Some(n), _) => (format!("[1, {n}]"), max_apfree_interval(n, budget)),
            (None, Some(spec)) => {
                let g = parse_group(spec)?;
                (g.descriptor(), max_apfree_group(&g, budget))
            }
            (None, None) => return Err(ApcError::InvalidArgument("give --n or --group".into())),
        };
        emit(&json!({ "domain": domain, "result": r }), None)?;
        if !r.exact {
            eprintln!("apc: budget exhausted; size {} is a lower bound", r.size);
        }
        Ok(r.exact)
    };
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => fail(e),
    }
}

fn oracle(set: &Path, codim: usize, cap: usize) -> ExitCode {
    let run = || -> Result<(), ApcError> {
        let (g, a) = parse_set_file(&read(set)?)?;
        let hit = increment_oracle(&g, &a, &Family::Subspaces { max_codim: codim }, cap)?;
        let alpha = a.len() as f64 / g.size() as f64;
        emit(&json!({ "group": g.descriptor(), "alpha": alpha, "best": hit }), None)
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn bound(n: f64, c: f64) -> ExitCode {
    match bound_curves(n, c) {
        Ok((main, ff)) => {
            println!("{}", json!({ "n": n, "c": c, "cyclic": main, "finite_field": ff }));
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("APC_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("apc: ignoring APC_THREADS={v:?}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match cli.command {
        Command::Verify { suite, seed, size_cap } => verify(suite, seed, size_cap),
        Command::Pipeline { mode, group, set, config, out } => {
            pipeline(mode, &group, &set, config.as_deref(), out.as_deref())
        }
        Command::Search { n, group, budget } => search(n, group.as_deref(), budget),
        Command::Oracle { kind: OracleKind::Increment { set, codim, cap } } => oracle(&set, codim, cap),
        Command::Bound { n, c } => bound(n, c),
    }
}
