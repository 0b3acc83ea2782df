//! Experiment runner CLI: wires the simulation toolkit into the figure
//! scenarios and emits CSV data bundles.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use flatwalk::experiment::{run_experiment, sweep, ExperimentConfig, Scenario};

#[derive(Parser)]
#[command(name = "flatwalk", version, about = "Flat-band quantum-walk simulation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// TOML config document; omit to use the scenario defaults.
    #[arg(short, long)]
    config: Option<PathBuf>,

    /// Scenario id (overrides the document's `scenario` field).
    #[arg(short, long)]
    scenario: Option<String>,

    /// Field overrides as dotted.path=VALUE (repeatable), e.g.
    /// --set evolution.t_max=2.0 --set sampling.shots=256
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output directory (overrides the config's output_dir).
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its result bundle.
    Run(ConfigArgs),
    /// Run one experiment per axis value and aggregate a summary CSV.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Numeric config field to sweep, e.g. lattice.plaquette_amp.
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values, e.g. 1,2,5,10.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// List the built-in scenarios.
    ListScenarios,
    /// Parse and validate a config document without running it.
    ValidateConfig(ConfigArgs),
}

fn resolve_config(args: &ConfigArgs) -> Result<ExperimentConfig, flatwalk::Error> {
    let mut cfg = match (&args.config, &args.scenario) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => ExperimentConfig::for_scenario(Scenario::parse(name)?),
        (None, None) => {
            return Err(flatwalk::Error::Config {
                field: "config".into(),
                message: "provide --config and/or --scenario".into(),
            })
        }
    };
    if let Some(name) = &args.scenario {
        if args.config.is_some() {
            cfg.apply_override("scenario", &format!("{:?}", name))?;
        }
    }
    for entry in &args.overrides {
        let (key, value) = entry.split_once('=').ok_or_else(|| flatwalk::Error::Config {
            field: "--set".into(),
            message: format!("expected KEY=VALUE, got `{entry}`"),
        })?;
        cfg.apply_override(key.trim(), value.trim())?;
    }
    if let Some(dir) = &args.output_dir {
        cfg.output_dir = dir.clone();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<(), flatwalk::Error> {
    match cli.command {
        Command::Run(args) => {
            let cfg = resolve_config(&args)?;
            cfg.validate()?;
            let summary = run_experiment(&cfg)?;
            println!(
                "run complete: scenario={} output={}",
                summary.scenario,
                summary.output_dir.display()
            );
            for p in &summary.pipelines {
                let mut line = format!(
                    "  {}: mean_fidelity={:.4} final_fidelity={:.4}",
                    p.pipeline, p.mean_fidelity_vs_exact, p.final_fidelity_vs_exact
                );
                if let Some(cr) = p.final_cr {
                    line.push_str(&format!(" cr={cr:.1}%"));
                }
                if let Some(tau) = p.tau_avg {
                    line.push_str(&format!(" tau_avg={tau:.4}"));
                }
                println!("{line}");
            }
            println!("  files: {}", summary.files.len());
            Ok(())
        }
        Command::Sweep {
            config,
            axis,
            values,
        } => {
            let cfg = resolve_config(&config)?;
            let result = sweep(&cfg, &axis, &values)?;
            println!(
                "sweep complete: axis={} points={} aggregate={}",
                result.axis,
                result.values.len(),
                result.aggregate_csv.display()
            );
            Ok(())
        }
        Command::ListScenarios => {
            for s in Scenario::all() {
                println!("{:<16} {}", s.name(), s.description());
            }
            Ok(())
        }
        Command::ValidateConfig(args) => {
            let cfg = resolve_config(&args)?;
            cfg.validate()?;
            println!("config ok: scenario={}", cfg.scenario.name());
            Ok(())
        }
    }
}
