//! `hpo`: run, list, trace, and export for the verification suites.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use hpo_verify::config::SuiteConfig;
use hpo_verify::export;
use hpo_verify::report::csv_quote;
use hpo_verify::suites::{self, histories_setup, run_suite, CATALOG, SUITE_NAMES};

#[derive(Debug, Parser)]
#[command(
    name = "hpo",
    about = "Verification suites for the continuous-time history algebra",
    version
)]
struct Cli {
    /// Configuration file (TOML); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Suite selection (repeatable); all suites when omitted.
    #[arg(long = "suite", global = true)]
    suites: Vec<String>,

    /// Output directory for report and export files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the selected suites and write one report file per suite.
    Run,
    /// Enumerate suites and their checks.
    List,
    /// Emit the identity-to-check traceability matrix.
    Trace,
    /// Export sample artifacts (decoherence matrix, spectra, operators).
    Export,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn load_config(cli: &Cli) -> Result<SuiteConfig> {
    let mut config = match &cli.config {
        Some(path) => SuiteConfig::load(path)?,
        None => SuiteConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn selected_suites(cli: &Cli) -> Result<Vec<&'static str>> {
    if cli.suites.is_empty() {
        return Ok(SUITE_NAMES.to_vec());
    }
    cli.suites
        .iter()
        .map(|name| {
            SUITE_NAMES
                .iter()
                .copied()
                .find(|s| s == name)
                .ok_or_else(|| anyhow!("unknown suite name: {name}"))
        })
        .collect()
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run => cmd_run(&cli),
        Command::List => {
            cmd_list(&cli)?;
            Ok(true)
        }
        Command::Trace => {
            cmd_trace(&cli)?;
            Ok(true)
        }
        Command::Export => {
            cmd_export(&cli)?;
            Ok(true)
        }
    }
}

fn cmd_run(cli: &Cli) -> Result<bool> {
    let config = load_config(cli)?;
    let names = selected_suites(cli)?;
    std::fs::create_dir_all(&cli.out)
        .with_context(|| format!("cannot create output directory {}", cli.out.display()))?;
    let mut all_passed = true;
    for name in names {
        let report = run_suite(name, &config)?;
        let (ext, body) = match cli.format {
            Format::Json => ("json", report.to_json()),
            Format::Csv => ("csv", report.to_csv()),
        };
        let path = cli.out.join(format!("{name}-report.{ext}"));
        std::fs::write(&path, body)
            .with_context(|| format!("cannot write report {}", path.display()))?;
        let verdict = if report.passed { "pass" } else { "FAIL" };
        println!(
            "{name}: {verdict} ({} checks, {} ms) -> {}",
            report.checks.len(),
            report.wall_clock_ms,
            path.display()
        );
        all_passed &= report.passed;
    }
    Ok(all_passed)
}

fn cmd_list(cli: &Cli) -> Result<()> {
    let names = selected_suites(cli)?;
    for name in names {
        println!("{name}");
        for (suite, id, anchor) in CATALOG {
            if *suite == name {
                println!("  {id}: {anchor}");
            }
        }
    }
    Ok(())
}

fn cmd_trace(cli: &Cli) -> Result<()> {
    let names = selected_suites(cli)?;
    match cli.format {
        Format::Csv => {
            println!("suite,check_id,anchor");
            for (suite, id, anchor) in CATALOG {
                if names.contains(suite) {
                    println!("{suite},{id},{}", csv_quote(anchor));
                }
            }
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = CATALOG
                .iter()
                .filter(|(suite, _, _)| names.contains(suite))
                .map(|(suite, id, anchor)| {
                    serde_json::json!({"suite": suite, "check_id": id, "anchor": anchor})
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows)?);
        }
    }
    Ok(())
}

fn cmd_export(cli: &Cli) -> Result<()> {
    use hpo_core::fock::{sector_spectrum, FockBasis};
    use hpo_core::histories::decoherence;
    use hpo_core::lattice::{TestFunction, TimeLattice};
    use hpo_core::linalg::cplx;
    use hpo_core::oscillator::{build_h, OscillatorParams};
    use hpo_core::quadratic::ModeSpace;

    let config = load_config(cli)?;
    std::fs::create_dir_all(&cli.out)
        .with_context(|| format!("cannot create output directory {}", cli.out.display()))?;

    // Decoherence matrix of the designated family.
    let setup = histories_setup(&config)?;
    let labels: Vec<String> = setup.family.iter().map(|h| h.label().to_string()).collect();
    let mut d = Vec::new();
    for a in &setup.family {
        let mut row = Vec::new();
        for b in &setup.family {
            row.push(decoherence(&setup.system, a, b)?);
        }
        d.push(row);
    }
    std::fs::write(cli.out.join("decoherence.csv"), export::decoherence_csv(&labels, &d))?;

    // Block spectra of the unit-weight time-averaged energy.
    let lat = TimeLattice::periodic(config.fock.nparticle_modes, config.lattice.dt)?;
    let modes = ModeSpace::time(lat);
    let p = OscillatorParams {
        hbar: config.physics.hbar,
        mass: config.physics.mass,
        omega: config.physics.omega,
    };
    let one = TestFunction::constant(lat, cplx(1.0, 0.0));
    let h = build_h(&modes, &one, &p)?;
    let basis = FockBasis::new(modes.clone(), config.fock.n_max)?;
    let blocks: Vec<(usize, Vec<f64>)> = (0..=config.fock.n_max)
        .map(|n| Ok((n, sector_spectrum(&h, &basis, n)?)))
        .collect::<Result<_>>()?;
    std::fs::write(cli.out.join("spectrum.csv"), export::spectrum_csv(&blocks))?;

    // The energy operator itself in structured text and as a Fock matrix.
    std::fs::write(cli.out.join("hamiltonian-operator.txt"), export::operator_text(&h))?;
    std::fs::write(
        cli.out.join("hamiltonian-fock.txt"),
        export::fock_matrix_text(&h, &basis)?,
    )?;

    println!(
        "exported decoherence.csv, spectrum.csv, hamiltonian-operator.txt, hamiltonian-fock.txt to {}",
        cli.out.display()
    );
    let _ = suites::anchor_of;
    Ok(())
}
