use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fuzzmech_cli::config::ScenarioConfig;
use fuzzmech_cli::demos::{self, DEMOS};
use fuzzmech_cli::scenario::{self, CompareVerdict};
use fuzzmech_cli::{init_threads, CliError, CliResult};

#[derive(Parser)]
#[command(name = "fuzzmech", version, about = "Density/flow mechanics scenarios and demonstrations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario: series.csv plus optional checkpoints.
    Run { config: PathBuf },
    /// Evolve the flow equations and a wave scheme side by side.
    Compare { config: PathBuf },
    /// Canned demonstration: wallstrom, winding, hamiltonian-scan or dbr.
    Demo {
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Constancy test for sampled `x, N` columns.
    Dbr {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
    },
    /// Winding number of a checkpointed state around a circle.
    Winding {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Circle `cx,cy,r` in the first two axes.
        #[arg(long = "loop", value_parser = parse_circle, allow_hyphen_values = true)]
        circle: [f64; 3],
    },
}

fn parse_circle(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"))).collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(v).map_err(|v| format!("expected cx,cy,r, got {} numbers", v.len()))
}

fn execute(cli: Cli) -> CliResult<()> {
    init_threads()?;
    match cli.command {
        Command::Run { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            let s = scenario::run(&cfg)?;
            println!(
                "run complete: t = {}, {} records, max norm drift {:.3e}",
                s.final_time, s.records, s.max_norm_drift
            );
            if let Some(p) = s.series {
                println!("series: {}", p.display());
            }
            if !s.checkpoints.is_empty() {
                println!("checkpoints: {}", s.checkpoints.len());
            }
        }
        Command::Compare { config } => {
            let cfg = ScenarioConfig::load(&config)?;
            let r = scenario::compare(&cfg)?;
            let last = r.times.last().copied().unwrap_or(0.0);
            match &r.verdict {
                CompareVerdict::Pass => println!("PASS compare: L2 gap {:.3e} at t = {last} vs {}", r.final_l2(), r.reference),
                CompareVerdict::Fail => {
                    println!("FAIL compare: L2 gap {:.3e} at t = {last} vs {}", r.final_l2(), r.reference);
                    return Err(CliError::Invariant(format!("flow and wave evolutions disagree by {:.3e}", r.final_l2())));
                }
                CompareVerdict::SchemeLimitation(msg) => println!("LIMITATION compare: {msg}"),
            }
        }
        Command::Demo { name, out } => {
            if !DEMOS.contains(&name.as_str()) {
                return Err(CliError::Usage(format!("unknown demo '{name}'; expected one of {}", DEMOS.join(", "))));
            }
            let o = demos::run_demo(&name, &out)?;
            println!("{}", o.verdict_line());
            for line in &o.evidence {
                println!("  {line}");
            }
            if !o.pass {
                return Err(CliError::Invariant(format!("demo {name} did not reproduce")));
            }
        }
        Command::Dbr { input, n_max } => {
            let (_, line) = demos::dbr_file(&input, n_max)?;
            println!("{line}");
        }
        Command::Winding { checkpoint, circle } => {
            let r = demos::winding_file(&checkpoint, circle)?;
            println!(
                "n_l = {} (circulation {:.6e} rad, residual {:.3e})",
                r.n_l, r.raw_circulation, r.residual
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fuzzmech: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
