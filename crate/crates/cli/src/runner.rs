//! The experiment grid: every method on every dataset under k-fold CV.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use regchain::data::{generate_synth, parse_arff, parse_csv};
use regchain::{cross_validate, CvConfig, Dataset};

use crate::config::{DatasetEntry, ExperimentConfig, ResolvedMethod};
use crate::export::export_paths;
use crate::table::{render_table, CellMetrics, Metric, ResultGrid, TableFormat};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellStatus {
    pub dataset: String,
    pub method: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    library_version: &'static str,
    seed: u64,
    folds: usize,
    c: f64,
    export_paths: bool,
    datasets: &'a [DatasetEntry],
    methods: &'a [ResolvedMethod],
    cells: &'a [CellStatus],
    files: Vec<String>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub grid: ResultGrid,
    pub cells: Vec<CellStatus>,
    pub output_dir: PathBuf,
}

impl RunSummary {
    pub fn n_failed(&self) -> usize {
        self.cells.iter().filter(|c| c.status != "ok").count()
    }
}

/// File-system friendly form of a method key (`PF.R/B` → `PF.R_B`).
pub fn method_slug(key: &str) -> String {
    key.replace('/', "_")
}

pub fn load_dataset(entry: &DatasetEntry) -> Result<Dataset<f64>> {
    if let Some(s) = &entry.synth {
        return Ok(generate_synth(s.n, s.noise, s.seed)?);
    }
    let path = entry
        .path
        .as_ref()
        .context("dataset has neither path nor synth")?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let l = entry.n_targets.unwrap_or(0);
    let is_arff = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("arff"));
    let data = if is_arff {
        let parsed = parse_arff(&text, l)?;
        if parsed.dropped_rows > 0 {
            eprintln!(
                "{}: dropped {} rows with missing values",
                entry.name, parsed.dropped_rows
            );
        }
        parsed.dataset
    } else {
        parse_csv(&text, l, entry.header.unwrap_or(true))?
    };
    Ok(data)
}

fn write_file(dir: &Path, name: &str, contents: &str, files: &mut Vec<String>) -> Result<()> {
    fs::write(dir.join(name), contents).with_context(|| format!("writing {name}"))?;
    files.push(name.to_string());
    Ok(())
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary> {
    let methods = config.validate()?;
    let exp = &config.experiment;
    let out_dir = exp.output_dir.clone();
    fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;

    let mut datasets = Vec::new();
    let mut loaded = Vec::new();
    for entry in &config.datasets {
        match load_dataset(entry) {
            Ok(d) => {
                datasets.push((entry.name.clone(), d.n_targets()));
                loaded.push(Ok(d));
            }
            Err(e) => {
                datasets.push((entry.name.clone(), entry.n_targets.unwrap_or(0)));
                loaded.push(Err(format!("{e:#}")));
            }
        }
    }
    let mut grid = ResultGrid::new(datasets, methods.iter().map(|m| m.key.clone()).collect());
    let mut cells = Vec::new();
    let mut files = Vec::new();
    let mut folds_csv = String::from("dataset,method,fold,mse,mae,zero_one\n");

    for (d, entry) in config.datasets.iter().enumerate() {
        for (m, method) in methods.iter().enumerate() {
            eprintln!("running {} on {}", method.key, entry.name);
            let outcome = match &loaded[d] {
                Err(e) => Err(e.clone()),
                Ok(data) => {
                    let cv = CvConfig {
                        method: method.config.clone(),
                        c: exp.c,
                        keep_clouds: exp.export_paths && method.method.is_sampling(),
                    };
                    cross_validate(data, method.method, exp.folds, exp.seed, &cv)
                        .map_err(|e| e.to_string())
                }
            };
            match outcome {
                Ok(out) => {
                    let r = &out.report;
                    grid.cells[d][m] = Some(CellMetrics {
                        mse: r.mse,
                        mae: r.mae,
                        zero_one: r.zero_one,
                    });
                    for (f, fm) in r.per_fold.iter().enumerate() {
                        folds_csv += &format!(
                            "{},{},{f},{},{},{}\n",
                            entry.name, method.key, fm.mse, fm.mae, fm.zero_one
                        );
                    }
                    if !out.clouds.is_empty() {
                        let rel =
                            format!("paths/{}/{}.jsonl", entry.name, method_slug(&method.key));
                        let path = out_dir.join(&rel);
                        fs::create_dir_all(path.parent().unwrap())?;
                        let mut clouds = out.clouds;
                        clouds.sort_by_key(|c| c.instance);
                        let mut sink = BufWriter::new(fs::File::create(&path)?);
                        for c in &clouds {
                            export_paths(&c.cloud, c.instance, &mut sink)?;
                        }
                        sink.flush()?;
                        files.push(rel);
                    }
                    cells.push(CellStatus {
                        dataset: entry.name.clone(),
                        method: method.key.clone(),
                        status: "ok",
                        error: None,
                    });
                }
                Err(e) => {
                    eprintln!("  failed: {e}");
                    cells.push(CellStatus {
                        dataset: entry.name.clone(),
                        method: method.key.clone(),
                        status: "failed",
                        error: Some(e),
                    });
                }
            }
        }
    }

    write_file(&out_dir, "cells.csv", &grid.to_cells_csv(), &mut files)?;
    write_file(&out_dir, "folds.csv", &folds_csv, &mut files)?;
    for metric in Metric::ALL {
        for (format, ext) in [(TableFormat::Csv, "csv"), (TableFormat::Text, "txt")] {
            let name = format!("table_{}.{ext}", metric.name());
            write_file(
                &out_dir,
                &name,
                &render_table(&grid, metric, format),
                &mut files,
            )?;
        }
    }
    let manifest = Manifest {
        tool: "regchain",
        version: env!("CARGO_PKG_VERSION"),
        library_version: regchain::VERSION,
        seed: exp.seed,
        folds: exp.folds,
        c: exp.c,
        export_paths: exp.export_paths,
        datasets: &config.datasets,
        methods: &methods,
        cells: &cells,
        files,
    };
    let json = serde_json::to_string_pretty(&manifest)? + "\n";
    fs::write(out_dir.join("manifest.json"), json)?;
    Ok(RunSummary {
        grid,
        cells,
        output_dir: out_dir,
    })
}
