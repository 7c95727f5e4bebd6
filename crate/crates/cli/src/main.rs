//! Command-line driver for the verification engine.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use glnn_core::fock::parse_sector;
use glnn_core::runner::{explain, explain_ids, run, RunConfig, Suite};

#[derive(Parser)]
#[command(
    name = "glnn",
    about = "Exact verification engine for the quantum affine superalgebra U_q[gl(N|N)^] in its all-odd root system",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and emit a JSON report.
    Verify(VerifyArgs),
    /// Print the statement behind a relation id (as found in reports).
    Explain { relation_id: String },
    /// List the available suites.
    ListSuites,
}

#[derive(Args)]
struct VerifyArgs {
    /// Rank N of gl(N|N)^.
    #[arg(long)]
    n: Option<usize>,
    /// Fock degree cap for the truncated modules.
    #[arg(long)]
    degree: Option<u32>,
    /// Mode window half-width for relation instantiation.
    #[arg(long)]
    modes: Option<i32>,
    /// Truncation order for operator-product series.
    #[arg(long = "series-order")]
    series_order: Option<usize>,
    /// Suite to run (repeatable); defaults to all.
    #[arg(long = "suite")]
    suites: Vec<String>,
    /// Momentum sector as comma-separated rationals (repeatable);
    /// defaults to the zero vacuum plus each seed-shifted vacuum.
    #[arg(long = "sector")]
    sectors: Vec<String>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plain-text key=value configuration file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn build_config(args: &VerifyArgs) -> Result<RunConfig, String> {
    let mut config = RunConfig::default();
    let mut file_suites: Option<Vec<String>> = None;
    let mut file_sectors: Vec<String> = Vec::new();

    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {}", path.display(), e))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: &dyn std::fmt::Display| format!("{}:{}: {}", path.display(), lineno + 1, e);
            match key {
                "n" => config.n = value.parse().map_err(|e| bad(&e))?,
                "degree" => config.degree = value.parse().map_err(|e| bad(&e))?,
                "modes" => config.modes = value.parse().map_err(|e| bad(&e))?,
                "series-order" => config.series_order = value.parse().map_err(|e| bad(&e))?,
                "jobs" => config.jobs = value.parse().map_err(|e| bad(&e))?,
                "suites" => {
                    file_suites = Some(value.split(',').map(|s| s.trim().to_string()).collect())
                }
                "sector" => file_sectors.push(value.to_string()),
                other => {
                    return Err(format!("{}:{}: unknown key `{}`", path.display(), lineno + 1, other))
                }
            }
        }
    }

    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(d) = args.degree {
        config.degree = d;
    }
    if let Some(m) = args.modes {
        config.modes = m;
    }
    if let Some(s) = args.series_order {
        config.series_order = s;
    }
    if let Some(j) = args.jobs {
        config.jobs = j;
    }

    let suite_names: Option<&[String]> = if !args.suites.is_empty() {
        Some(&args.suites)
    } else {
        file_suites.as_deref()
    };
    if let Some(names) = suite_names {
        let mut suites = Vec::new();
        for name in names {
            suites.push(Suite::from_name(name).map_err(|e| e.to_string())?);
        }
        config.suites = suites;
    }

    let sector_texts: &[String] = if !args.sectors.is_empty() { &args.sectors } else { &file_sectors };
    if !sector_texts.is_empty() {
        let mut sectors = Vec::new();
        for t in sector_texts {
            sectors.push(parse_sector(t).map_err(|e| e.to_string())?);
        }
        config.sectors = Some(sectors);
    }

    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListSuites => {
            for s in Suite::all() {
                println!("{:24} {}", s.name(), s.description());
            }
            ExitCode::SUCCESS
        }
        Command::Explain { relation_id } => match explain(&relation_id) {
            Ok(text) => {
                println!("{}", text);
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {}", e);
                eprintln!("known ids:");
                for id in explain_ids() {
                    eprintln!("  {}", id);
                }
                ExitCode::from(2)
            }
        },
        Command::Verify(args) => {
            let config = match build_config(&args) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {}", e);
                    return ExitCode::from(2);
                }
            };
            if let Err(e) = config.validate() {
                eprintln!("error: {}", e);
                return ExitCode::from(2);
            }
            let report = match run(&config) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("internal error: {}", e);
                    return ExitCode::from(3);
                }
            };
            let json = report.to_json();
            if let Some(path) = &args.out {
                if let Err(e) = std::fs::write(path, &json) {
                    eprintln!("cannot write {}: {}", path.display(), e);
                    return ExitCode::from(3);
                }
            } else {
                print!("{}", json);
            }
            eprintln!(
                "{} suites: {} pass, {} fail, {} boundary-skipped",
                report.suites.len(),
                report.summary.pass,
                report.summary.fail,
                report.summary.skipped_boundary
            );
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                for suite in &report.suites {
                    for f in suite.failures().take(3) {
                        eprintln!("FAIL {} {:?}", f.id, f.params);
                    }
                }
                ExitCode::FAILURE
            }
        }
    }
}
