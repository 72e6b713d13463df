use clap::{Parser, Subcommand};
use mmp_core::io::{self, RunStatus, Suite};
use mmp_core::lp;
use std::path::PathBuf;
use std::process::ExitCode;

/// Magneto-micropolar pseudo-spectral solver.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration and write diagnostics, snapshots and a manifest.
    Run { config: PathBuf },
    /// Run a self-test suite: spectral, lp, dynamics, picard, monitors or all.
    Verify { suite: String },
    /// Print a snapshot header and norms.
    Inspect { snapshot: PathBuf },
}

fn inspect(path: &PathBuf) -> mmp_core::Result<()> {
    let bytes = std::fs::read(path)?;
    let header = io::snapshot::read_header(&bytes)?;
    let (state, _) = io::read_snapshot(&bytes[..])?;
    let p = header.params;
    println!("format version {}", header.version);
    println!("grid n = {}", header.n);
    println!("time = {}", header.time);
    println!(
        "params mu = {} chi = {} kappa = {} gamma = {} nu = {}",
        p.mu, p.chi, p.kappa, p.gamma, p.nu
    );
    for (name, f) in ["u", "omega", "b"].iter().zip(state.fields()) {
        println!(
            "{name:<6} L2 = {:.6e}  H1 = {:.6e}  H2 = {:.6e}  max|div| = {:.3e}",
            f.l2_norm(),
            lp::sobolev_hs(f, 1.0),
            lp::sobolev_hs(f, 2.0),
            f.divergence_defect()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match cli.command {
        Command::Run { config } => {
            let result = io::parse_config(&config).and_then(|c| io::run(&c));
            match result {
                Ok(outcome) => match outcome.status {
                    RunStatus::Completed => {
                        println!(
                            "completed: {} records up to t = {} in {}",
                            outcome.records,
                            outcome.final_time,
                            outcome.output_dir.display()
                        );
                        ExitCode::SUCCESS
                    }
                    RunStatus::Unstable { time, norm } => {
                        eprintln!("instability at t = {time} (norm {norm:.3e}); last good state saved");
                        ExitCode::from(2)
                    }
                },
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Verify { suite } => {
            let suite: Suite = match suite.parse() {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            match io::verify(suite) {
                Ok(report) => {
                    println!("{report}");
                    if report.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(3)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(3)
                }
            }
        }
        Command::Inspect { snapshot } => match inspect(&snapshot) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
    }
}
