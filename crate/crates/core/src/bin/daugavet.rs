//! Command-line driver: build towers, run verification suites, summarise
//! reports and re-check serialized certificates.
//!
//! Exit codes: 0 when nothing failed, 1 when some check has status `fail`
//! (or a certificate does not verify), 2 on any error.

use clap::{Parser, Subcommand};
use daugavet::analysis::{verify_certificate, DaugCertificate};
use daugavet::config::RunConfig;
use daugavet::construction::{build_tower, write_tower};
use daugavet::measure::set_cell_cap;
use daugavet::report::{any_failed, reports_from_json, reports_to_json, sort_reports, summary_csv, Status};
use daugavet::suites::{run_suites, Context, Suite};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "daugavet", version, about = "Exact finite-stage certificates for a Schur space with the Daugavet property")]
struct Cli {
    /// TOML run configuration; every field is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for sampled checks (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest number of grid cells any step function may have.
    #[arg(long, global = true)]
    max_cells: Option<usize>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the configured tower and write its manifest, bases and nets.
    Build,
    /// Run one verification suite, or `all`.
    Verify { suite: String },
    /// Write `summary.csv` and `reports.json` from the saved suite reports.
    Report,
    /// Re-check a serialized certificate from its recorded data alone.
    CheckCertificate { file: PathBuf },
}

type CliResult = Result<ExitCode, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(|e| e.to_string())?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    if let Some(cap) = cli.max_cells {
        if cap == 0 {
            return Err("--max-cells must be positive".into());
        }
        set_cell_cap(cap);
        cfg.set_cell_cap(cap);
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn write(path: &Path, contents: &str) -> Result<(), String> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(cli: Cli) -> CliResult {
    let cfg = load_config(&cli)?;
    match &cli.command {
        Command::Build => build(&cfg),
        Command::Verify { suite } => verify(cfg, suite),
        Command::Report => report(&cfg),
        Command::CheckCertificate { file } => check_certificate(file),
    }
}

fn build(cfg: &RunConfig) -> CliResult {
    let tower = build_tower(&cfg.tower).map_err(|e| e.to_string())?;
    let dir = cfg.out.join("tower");
    let manifest = write_tower(&tower, &dir).map_err(|e| e.to_string())?;
    for s in &manifest.stages {
        println!("stage {}: eps {} dim {} cells {}", s.index, s.eps, s.dim, s.cells);
    }
    println!("manifest: {}", dir.join("manifest.json").display());
    Ok(ExitCode::SUCCESS)
}

fn verify(cfg: RunConfig, selection: &str) -> CliResult {
    let suites = Suite::parse_selection(selection).map_err(|e| e.to_string())?;
    let out = cfg.out.clone();
    let ctx = Context::new(cfg);
    let result = run_suites(&ctx, &suites).map_err(|e| e.to_string())?;
    for suite in &suites {
        let mine: Vec<_> = result.reports.iter().filter(|r| r.suite == suite.name()).cloned().collect();
        write(&out.join("reports").join(format!("{}.json", suite.name())), &reports_to_json(&mine))?;
    }
    for a in &result.artifacts {
        write(&out.join(&a.name), &a.contents)?;
    }
    for r in &result.reports {
        println!("{:<18} {}/{} {}", r.status, r.suite, r.anchor, r.case);
    }
    let count = |s: Status| result.reports.iter().filter(|r| r.status == s).count();
    println!(
        "{} checks: {} pass, {} fail, {} precondition-unmet, {} report-only",
        result.reports.len(),
        count(Status::Pass),
        count(Status::Fail),
        count(Status::PreconditionUnmet),
        count(Status::ReportOnly)
    );
    Ok(if any_failed(&result.reports) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn report(cfg: &RunConfig) -> CliResult {
    let dir = cfg.out.join("reports");
    let mut files: Vec<PathBuf> = match fs::read_dir(&dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect(),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(format!("{}: {e}", dir.display())),
    };
    files.sort();
    let mut reports = Vec::new();
    for f in &files {
        let text = fs::read_to_string(f).map_err(|e| format!("{}: {e}", f.display()))?;
        reports.extend(reports_from_json(&text).map_err(|e| format!("{}: {e}", f.display()))?);
    }
    sort_reports(&mut reports);
    write(&cfg.out.join("summary.csv"), &summary_csv(&reports))?;
    write(&cfg.out.join("reports.json"), &reports_to_json(&reports))?;
    println!("{} reports from {} files -> {}", reports.len(), files.len(), cfg.out.join("summary.csv").display());
    Ok(ExitCode::SUCCESS)
}

fn check_certificate(file: &Path) -> CliResult {
    let text = fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let cert = DaugCertificate::from_json(&text).map_err(|e| e.to_string())?;
    let check = verify_certificate(&cert);
    for p in &check.problems {
        println!("problem: {p}");
    }
    if check.passed() {
        println!(
            "certificate verifies: stage {} n {}, every audited point at distance >= {} (hull minimum {})",
            cert.stage, cert.n, cert.lower_bound, cert.hull_minimum
        );
        Ok(ExitCode::SUCCESS)
    } else {
        println!("certificate does not verify ({} problems)", check.problems.len());
        Ok(ExitCode::from(1))
    }
}
