use ndarray::Array2;

use super::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Parse a rectangular numeric CSV whose last `n_targets` columns are targets.
///
/// Without a header, names are generated as `x1..xD`, `y1..yL`.
pub fn parse_csv<T: Real>(text: &str, n_targets: usize, has_header: bool) -> Result<Dataset<T>> {
    if n_targets == 0 {
        return Err(Error::InvalidArgument(
            "n_targets must be at least 1".into(),
        ));
    }
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let mut header: Option<Vec<String>> = None;
    if has_header {
        let (_, line) = lines.next().ok_or(Error::EmptyDataset { dropped: 0 })?;
        header = Some(line.split(',').map(|s| s.trim().to_string()).collect());
    }
    let mut width = header.as_ref().map(Vec::len);
    let mut values: Vec<T> = Vec::new();
    let mut n_rows = 0;
    for (idx, line) in lines {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        match width {
            None => width = Some(cells.len()),
            Some(w) if w != cells.len() => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("row has {} cells, expected {w}", cells.len()),
                })
            }
            _ => {}
        }
        for (col, cell) in cells.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Cell {
                row: idx + 1,
                column: col + 1,
                value: cell.to_string(),
            })?;
            values.push(T::lit(v));
        }
        n_rows += 1;
    }
    let width = width.unwrap_or(0);
    if n_rows == 0 {
        return Err(Error::EmptyDataset { dropped: 0 });
    }
    if n_targets >= width {
        return if n_targets == width {
            Err(Error::NoFeatures)
        } else {
            Err(Error::InvalidArgument(format!(
                "{n_targets} targets requested but rows have {width} columns"
            )))
        };
    }
    let d = width - n_targets;
    let all = Array2::from_shape_vec((n_rows, width), values)
        .map_err(|e| Error::ShapeMismatch(e.to_string()))?;
    let x = all.slice(ndarray::s![.., ..d]).to_owned();
    let y = all.slice(ndarray::s![.., d..]).to_owned();
    match header {
        Some(mut names) => {
            let targets = names.split_off(d);
            Dataset::new(x, y, names, targets)
        }
        None => Dataset::from_arrays(x, y),
    }
}
