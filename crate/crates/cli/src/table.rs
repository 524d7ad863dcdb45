//! Result grids and their rendering as datasets × methods tables.

use std::fmt;
use std::str::FromStr;

use regchain::avg_rank_partial;

use crate::config::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Mse,
    Mae,
    ZeroOne,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Mse, Metric::Mae, Metric::ZeroOne];

    pub fn name(self) -> &'static str {
        match self {
            Self::Mse => "mse",
            Self::Mae => "mae",
            Self::ZeroOne => "zero_one",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s.to_ascii_lowercase().as_str() {
            "mse" => Ok(Self::Mse),
            "mae" => Ok(Self::Mae),
            "zero_one" | "0/1" | "01" | "zero-one" => Ok(Self::ZeroOne),
            other => Err(ConfigError(format!("unknown metric `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    Csv,
    #[default]
    Text,
}

impl FromStr for TableFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Self::Csv),
            "text" | "txt" => Ok(Self::Text),
            other => Err(ConfigError(format!("unknown table format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMetrics {
    pub mse: f64,
    pub mae: f64,
    pub zero_one: f64,
}

impl CellMetrics {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Mse => self.mse,
            Metric::Mae => self.mae,
            Metric::ZeroOne => self.zero_one,
        }
    }
}

/// Datasets × methods, each cell holding fold-averaged metrics or nothing when the
/// cell failed or was not run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultGrid {
    pub datasets: Vec<(String, usize)>,
    pub methods: Vec<String>,
    /// `cells[dataset][method]`
    pub cells: Vec<Vec<Option<CellMetrics>>>,
}

const CELLS_HEADER: &str = "dataset,n_targets,method,status,mse,mae,zero_one";

impl ResultGrid {
    pub fn new(datasets: Vec<(String, usize)>, methods: Vec<String>) -> Self {
        let cells = vec![vec![None; methods.len()]; datasets.len()];
        Self {
            datasets,
            methods,
            cells,
        }
    }

    /// Long-form CSV with full-precision values; failed cells have status `failed`.
    pub fn to_cells_csv(&self) -> String {
        let mut out = format!("{CELLS_HEADER}\n");
        for (d, (name, l)) in self.datasets.iter().enumerate() {
            for (m, method) in self.methods.iter().enumerate() {
                match &self.cells[d][m] {
                    Some(c) => {
                        out += &format!(
                            "{name},{l},{method},ok,{},{},{}\n",
                            c.mse, c.mae, c.zero_one
                        )
                    }
                    None => out += &format!("{name},{l},{method},failed,,,\n"),
                }
            }
        }
        out
    }

    pub fn from_cells_csv(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        if lines.next() != Some(CELLS_HEADER) {
            return Err("unexpected header in cells file".into());
        }
        let mut datasets: Vec<(String, usize)> = Vec::new();
        let mut methods: Vec<String> = Vec::new();
        let mut entries = Vec::new();
        for (i, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(format!("line {}: expected 7 fields", i + 2));
            }
            let l: usize = f[1]
                .parse()
                .map_err(|_| format!("line {}: bad n_targets", i + 2))?;
            let d = match datasets.iter().position(|(n, _)| n == f[0]) {
                Some(d) => d,
                None => {
                    datasets.push((f[0].to_string(), l));
                    datasets.len() - 1
                }
            };
            let m = match methods.iter().position(|k| k == f[2]) {
                Some(m) => m,
                None => {
                    methods.push(f[2].to_string());
                    methods.len() - 1
                }
            };
            let cell = if f[3] == "ok" {
                let num = |s: &str| {
                    s.parse::<f64>()
                        .map_err(|_| format!("line {}: bad value", i + 2))
                };
                Some(CellMetrics {
                    mse: num(f[4])?,
                    mae: num(f[5])?,
                    zero_one: num(f[6])?,
                })
            } else {
                None
            };
            entries.push((d, m, cell));
        }
        let mut grid = Self::new(datasets, methods);
        for (d, m, cell) in entries {
            grid.cells[d][m] = cell;
        }
        Ok(grid)
    }

    /// Mean rank per method, lower values ranking first. Missing cells are left
    /// out of their row.
    pub fn avg_ranks(&self, metric: Metric) -> Vec<Option<f64>> {
        let rows: Vec<Vec<Option<f64>>> = self
            .cells
            .iter()
            .map(|row| row.iter().map(|c| c.map(|c| c.get(metric))).collect())
            .collect();
        avg_rank_partial(&rows, true)
    }
}

fn fmt2(v: Option<f64>) -> String {
    v.map_or_else(|| "missing".to_string(), |v| format!("{v:.2}"))
}

/// Datasets as rows with their label count, methods as columns, two decimals, and
/// an `Avg Rank` footer.
pub fn render_table(grid: &ResultGrid, metric: Metric, format: TableFormat) -> String {
    let mut header = vec!["Dataset".to_string(), "L".to_string()];
    header.extend(grid.methods.iter().cloned());
    let mut rows = vec![header];
    for (d, (name, l)) in grid.datasets.iter().enumerate() {
        let mut row = vec![name.clone(), l.to_string()];
        row.extend(grid.cells[d].iter().map(|c| fmt2(c.map(|c| c.get(metric)))));
        rows.push(row);
    }
    let mut footer = vec!["Avg Rank".to_string(), String::new()];
    footer.extend(grid.avg_ranks(metric).into_iter().map(fmt2));

    match format {
        TableFormat::Csv => {
            rows.push(footer);
            rows.iter().map(|r| r.join(",") + "\n").collect()
        }
        TableFormat::Text => {
            let n_cols = rows[0].len();
            let widths: Vec<usize> = (0..n_cols)
                .map(|c| {
                    rows.iter()
                        .chain([&footer])
                        .map(|r| r[c].len())
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |r: &[String]| {
                let cells: Vec<String> = r
                    .iter()
                    .enumerate()
                    .map(|(c, s)| {
                        if c == 0 {
                            format!("{s:<w$}", w = widths[c])
                        } else {
                            format!("{s:>w$}", w = widths[c])
                        }
                    })
                    .collect();
                cells.join("  ").trim_end().to_string() + "\n"
            };
            let rule = "-".repeat(widths.iter().sum::<usize>() + 2 * (n_cols - 1)) + "\n";
            let mut out = line(&rows[0]);
            out += &rule;
            for r in &rows[1..] {
                out += &line(r);
            }
            out += &rule;
            out += &line(&footer);
            out
        }
    }
}
