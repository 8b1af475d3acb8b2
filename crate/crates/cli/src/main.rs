//! Command-line driver: reproduces the figure-style sweeps as deterministic
//! CSV/JSON datasets and runs the invariant checks.
//!
//! Every flag can also be supplied through an upper-cased `PETZREC_`
//! environment variable, e.g. `PETZREC_ETA=0.3 petzrec fig2`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use petzrec::checks::{run_checks, CheckConfig};
use petzrec::experiments::{
    gnuplot_script, run_fig2, run_fig3, run_fig4, ExperimentRun, Fig2Config, Fig3Config,
    Fig4Config, InputPreset, SweepSpec,
};

#[derive(Parser)]
#[command(
    name = "petzrec",
    about = "Recovery analysis of single-mode optical loss: experiment sweeps and checks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output path; '-' writes to stdout.
    #[arg(long, default_value = "-", env = "PETZREC_OUT")]
    out: String,
    #[arg(long, value_enum, default_value = "csv", env = "PETZREC_FORMAT")]
    format: Format,
    /// Also write a gnuplot script next to the CSV (requires --out FILE).
    #[arg(long, env = "PETZREC_EMIT_PLOT_SCRIPT")]
    emit_plot_script: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Primary sweep as start:stop:steps. fig2 sweeps the reference
    /// occupation, fig3 the fraction of the feasible family range, fig4 the
    /// forward transmissivity.
    #[arg(long, env = "PETZREC_SWEEP")]
    sweep: Option<String>,
    /// Comma-separated subset of thermal2,squeezed,coherent.
    #[arg(long, env = "PETZREC_INPUTS")]
    inputs: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Fidelity of the three recovery protocols against the reference
    /// occupation, for the two default environments (panels a-f).
    Fig2 {
        #[arg(long, default_value_t = 0.5, env = "PETZREC_ETA")]
        eta: f64,
        /// Run a single custom environment instead of the default pair
        /// (10, 0).
        #[arg(long, env = "PETZREC_N_XI")]
        n_xi: Option<f64>,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fidelity across the feasible recovery family for the three default
    /// parameter sets, with recovery-map and optimum markers.
    Fig3 {
        #[arg(long, default_value_t = 0.5, env = "PETZREC_ETA")]
        eta: f64,
        /// Together with --n-sigma, replaces the default sets by one custom
        /// set.
        #[arg(long, requires = "n_sigma", env = "PETZREC_N_XI")]
        n_xi: Option<f64>,
        #[arg(long, requires = "n_xi", env = "PETZREC_N_SIGMA")]
        n_sigma: Option<f64>,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Relative transmissivity and fidelity differences against the forward
    /// transmissivity for the two default parameter sets.
    Fig4 {
        /// Together with --n-sigma, replaces the default sets by one custom
        /// set.
        #[arg(long, requires = "n_sigma", env = "PETZREC_N_XI")]
        n_xi: Option<f64>,
        #[arg(long, requires = "n_xi", env = "PETZREC_N_SIGMA")]
        n_sigma: Option<f64>,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run every module's invariant suite and print a pass/fail report.
    Checks {
        /// Fock cutoff for the oracle-backed checks.
        #[arg(long, default_value_t = 80, env = "PETZREC_CUTOFF")]
        cutoff: usize,
        /// Seed for the randomized suites.
        #[arg(long, default_value_t = 7, env = "PETZREC_SEED")]
        seed: u64,
    },
}

fn parse_sweep(args: &SweepArgs, default: SweepSpec) -> Result<SweepSpec> {
    match &args.sweep {
        Some(s) => Ok(SweepSpec::parse(s)?),
        None => Ok(default),
    }
}

fn parse_inputs(args: &SweepArgs) -> Result<Vec<InputPreset>> {
    match &args.inputs {
        Some(s) => Ok(InputPreset::parse_list(s)?),
        None => Ok(InputPreset::all()),
    }
}

fn write_run(run: &ExperimentRun, output: &OutputArgs) -> Result<()> {
    for notice in &run.notices {
        eprintln!("notice: {notice}");
    }
    let body = match output.format {
        Format::Csv => run.dataset.to_csv(),
        Format::Json => run.dataset.to_json(),
    };
    if output.out == "-" {
        std::io::stdout().write_all(body.as_bytes())?;
        if output.emit_plot_script {
            anyhow::bail!("--emit-plot-script requires --out FILE");
        }
        return Ok(());
    }
    let path = PathBuf::from(&output.out);
    fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    if output.emit_plot_script {
        if output.format != Format::Csv {
            anyhow::bail!("--emit-plot-script requires --format csv");
        }
        let script = gnuplot_script(
            &run.dataset,
            path.file_name()
                .and_then(|s| s.to_str())
                .unwrap_or(&output.out),
        );
        let gp = path.with_extension("gp");
        fs::write(&gp, script).with_context(|| format!("writing {}", gp.display()))?;
    }
    Ok(())
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Fig2 {
            eta,
            n_xi,
            sweep,
            output,
        } => {
            let cfg = Fig2Config {
                eta,
                n_xi_override: n_xi,
                sweep: parse_sweep(&sweep, Fig2Config::default().sweep)?,
                inputs: parse_inputs(&sweep)?,
            };
            write_run(&run_fig2(&cfg)?, &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Fig3 {
            eta,
            n_xi,
            n_sigma,
            sweep,
            output,
        } => {
            let cfg = Fig3Config {
                eta,
                custom_set: n_xi.zip(n_sigma),
                sweep: parse_sweep(&sweep, Fig3Config::default().sweep)?,
                inputs: parse_inputs(&sweep)?,
            };
            write_run(&run_fig3(&cfg)?, &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Fig4 {
            n_xi,
            n_sigma,
            sweep,
            output,
        } => {
            let cfg = Fig4Config {
                custom_set: n_xi.zip(n_sigma),
                sweep: parse_sweep(&sweep, Fig4Config::default().sweep)?,
                inputs: parse_inputs(&sweep)?,
            };
            write_run(&run_fig4(&cfg)?, &output)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Checks { cutoff, seed } => {
            let report = run_checks(&CheckConfig { cutoff, seed });
            print!("{}", report.render());
            if report.all_passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
    }
}
