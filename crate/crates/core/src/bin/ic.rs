use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use intermittent::cli::{exit_code, run_analyze, run_simulate, run_sweep};
use intermittent::scenario::{Scenario, SweepParam};
use intermittent::Result;

/// Limit-cycle analysis and simulation for intermittent control.
#[derive(Parser)]
#[command(name = "ic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral sweep, critical interval and cycle prediction.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Event-driven simulation compared against the prediction.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Repeats the simulation over values of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// rho, q_t or b
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        values: Vec<f64>,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file.
    file: PathBuf,
    /// Output directory (default: out/NAME, NAME from the scenario).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Simulation step in seconds.
    #[arg(long)]
    dt: Option<f64>,
    /// Simulated duration in seconds.
    #[arg(long)]
    duration: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<(Scenario, PathBuf)> {
        let scenario = Scenario::load(&self.file)?.with_timing(self.dt, self.duration);
        let out = self.out_dir.clone().unwrap_or_else(|| PathBuf::from("out").join(&scenario.name));
        Ok((scenario, out))
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze { common } => {
            let (scenario, out) = common.load()?;
            let report = run_analyze(&scenario, &out)?;
            match report.delta_crit {
                Some(d) => println!("{}: {} at delta_crit = {d:.6} s", scenario.name, report.cycle_class),
                None => println!("{}: {} ({})", scenario.name, report.cycle_class, report.reason.unwrap_or_default()),
            }
            println!("wrote {}", out.display());
        }
        Command::Simulate { common } => {
            let (scenario, out) = common.load()?;
            let s = run_simulate(&scenario, &out)?;
            println!(
                "{}: {} events, class {}, predicted period {}, measured period {}, converged {}",
                scenario.name,
                s.event_count,
                s.cycle_class,
                s.predicted_period.map_or("-".into(), |p| format!("{p:.4}")),
                s.measured_period.map_or("-".into(), |p| format!("{p:.4}")),
                s.converged
            );
            if let Some(t) = s.diverged_at {
                println!("intermittent run diverged at t = {t:.3} s");
            }
            println!("wrote {}", out.display());
        }
        Command::Sweep { common, param, values } => {
            let param: SweepParam = param.parse()?;
            let (scenario, out) = common.load()?;
            let rows = run_sweep(&scenario, param, &values, &out)?;
            for row in rows {
                match row.outcome {
                    Ok(s) => println!("{param} = {}: {} converged {}", row.value, s.cycle_class, s.converged),
                    Err(e) => println!("{param} = {}: failed: {e}", row.value),
                }
            }
            println!("wrote {}", out.join("sweep_summary.csv").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

