use std::fs;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use regchain::generate_synth;
use regchain_cli::runner::method_slug;
use regchain_cli::{
    read_paths, render_table, run_experiment, ConfigError, ExperimentConfig, Metric, ResultGrid,
    TableFormat,
};

#[derive(Parser)]
#[command(
    name = "regchain",
    version,
    about = "Probabilistic regressor chain experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured method on every dataset and write the results.
    Run { config: PathBuf },
    /// Write the bimodal synthetic dataset as CSV (targets last).
    Synth {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0.03)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a results table for one metric.
    Table {
        results: PathBuf,
        #[arg(long, default_value = "mse")]
        metric: String,
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Print the exported particle paths of one test instance.
    Paths {
        results: PathBuf,
        #[arg(long)]
        instance: usize,
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long)]
        method: Option<String>,
    },
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { config } => {
            let config = ExperimentConfig::load(&config)?;
            let summary = run_experiment(&config)?;
            let failed = summary.n_failed();
            eprintln!("results written to {}", summary.output_dir.display());
            if failed > 0 {
                eprintln!("{failed} cell(s) failed; see manifest.json");
                return Ok(ExitCode::from(1));
            }
        }
        Command::Synth {
            n,
            noise,
            seed,
            out,
        } => {
            let data = generate_synth::<f64>(n, noise, seed)?;
            fs::write(&out, data.to_csv()).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Table {
            results,
            metric,
            format,
        } => {
            let metric: Metric = metric.parse()?;
            let format: TableFormat = format.parse()?;
            let path = results.join("cells.csv");
            let text =
                fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let grid = ResultGrid::from_cells_csv(&text).map_err(anyhow::Error::msg)?;
            print!("{}", render_table(&grid, metric, format));
        }
        Command::Paths {
            results,
            instance,
            dataset,
            method,
        } => {
            let root = results.join("paths");
            let mut found = 0;
            let mut dirs: Vec<_> = fs::read_dir(&root)
                .with_context(|| format!("reading {}", root.display()))?
                .collect::<std::io::Result<_>>()?;
            dirs.sort_by_key(|e| e.file_name());
            for d in dirs {
                let name = d.file_name().to_string_lossy().into_owned();
                if dataset.as_ref().is_some_and(|want| *want != name) {
                    continue;
                }
                let mut files: Vec<_> = fs::read_dir(d.path())?.collect::<std::io::Result<_>>()?;
                files.sort_by_key(|e| e.file_name());
                for f in files {
                    let stem = f
                        .path()
                        .file_stem()
                        .unwrap_or_default()
                        .to_string_lossy()
                        .into_owned();
                    if method
                        .as_ref()
                        .is_some_and(|want| method_slug(want) != stem)
                    {
                        continue;
                    }
                    let records = read_paths(BufReader::new(fs::File::open(f.path())?))?;
                    for r in records.iter().filter(|r| r.instance_id == instance) {
                        println!("{}\t{}\t{}", name, stem, serde_json::to_string(r)?);
                        found += 1;
                    }
                }
            }
            if found == 0 {
                anyhow::bail!("no exported paths for instance {instance}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
