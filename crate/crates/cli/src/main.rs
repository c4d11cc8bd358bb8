mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crosslab::verify::{convergence_study, list_suites, run_suites, LabReport};

use config::LabConfig;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "crosslab", version, about = "Randomized residual checks for smooth crossed products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; defaults apply to every missing key.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Use the direct O(N^2) quadratures instead of the FFT paths.
    #[arg(long)]
    oracle: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity suites and write a JSON report.
    Run {
        #[command(flatten)]
        common: Common,
        /// Suite to run; repeat for several. Defaults to the config selection.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Report path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print only the JSON report on stdout.
        #[arg(long)]
        json_only: bool,
    },
    /// Tabulate the worst residual of a suite over grid refinements.
    Convergence {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        suite: String,
        /// Ascending powers of two.
        #[arg(long, value_delimiter = ',')]
        points: Option<Vec<usize>>,
        /// CSV path.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json_only: bool,
    },
    /// List suites with the statements they check.
    List,
}

fn load(common: &Common) -> Result<LabConfig, String> {
    let mut cfg = match &common.config {
        Some(path) => LabConfig::load(path)?,
        None => LabConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if common.oracle {
        cfg.oracle = true;
    }
    Ok(cfg)
}

/// Writes through a temporary file in the target directory and renames it into place.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), String> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    tmp.write_all(bytes).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    tmp.persist(path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(())
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn print_summary(report: &LabReport) {
    for r in report.suites.values() {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status} {} ({} checks, {:.0} ms)", r.suite, r.checks.len(), r.timing.elapsed_ms);
        for c in r.failures() {
            let residual = c.residual.map_or("none".to_string(), |v| format!("{v:.3e}"));
            let note = c.note.as_deref().map(|n| format!(" [{n}]")).unwrap_or_default();
            println!("    {} residual {residual} > tolerance {:.1e}{note}", c.id, c.tolerance);
        }
    }
}

fn cmd_run(common: Common, suites: Vec<String>, out: Option<PathBuf>, json_only: bool) -> ExitCode {
    let mut cfg = match load(&common) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    if !suites.is_empty() {
        cfg.suites = suites;
    }
    if let Some(out) = out {
        cfg.output.report = out;
    }
    if let Err(e) = cfg.validate() {
        return usage(e);
    }
    let names = cfg.selected_suites();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let report = match run_suites(&names, &cfg.suite_config()) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    let json = match report.to_json() {
        Ok(j) => j,
        Err(e) => return usage(e),
    };
    if let Err(e) = write_atomic(&cfg.output.report, json.as_bytes()) {
        return usage(e);
    }
    if json_only {
        println!("{json}");
    } else {
        print_summary(&report);
        println!("report written to {}", cfg.output.report.display());
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn cmd_convergence(
    common: Common,
    suite: String,
    points: Option<Vec<usize>>,
    out: Option<PathBuf>,
    json_only: bool,
) -> ExitCode {
    let mut cfg = match load(&common) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    if let Some(p) = points {
        cfg.convergence.points = p;
    }
    if let Some(out) = out {
        cfg.output.convergence_csv = out;
    }
    cfg.suites = vec![suite.clone()];
    if let Err(e) = cfg.validate() {
        return usage(e);
    }
    let study = match convergence_study(&suite, &cfg.convergence.points, &cfg.suite_config()) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let mut csv = Vec::new();
    if let Err(e) = study.write_csv(&mut csv) {
        return usage(e);
    }
    if let Err(e) = write_atomic(&cfg.output.convergence_csv, &csv) {
        return usage(e);
    }
    if json_only {
        match serde_json::to_string_pretty(&study) {
            Ok(j) => println!("{j}"),
            Err(e) => return usage(e),
        }
    } else {
        print!("{}", String::from_utf8_lossy(&csv));
        for f in &study.flags {
            println!("flag: {f}");
        }
        let verdict = if study.converged { "converged" } else { "not converged" };
        println!("{verdict}; table written to {}", cfg.output.convergence_csv.display());
    }
    if study.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn cmd_list() -> ExitCode {
    for (name, statement) in list_suites() {
        println!("{name} — {statement}");
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run {
            common,
            suites,
            out,
            json_only,
        } => cmd_run(common, suites, out, json_only),
        Command::Convergence {
            common,
            suite,
            points,
            out,
            json_only,
        } => cmd_convergence(common, suite, points, out, json_only),
        Command::List => cmd_list(),
    }
}
