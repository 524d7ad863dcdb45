//! Numeric-only ARFF reader.
//!
//! Supports `@relation`, `@attribute <name> numeric|real|integer`, `@data` and
//! full-line `%` comments. Targets are the trailing `n_targets` attributes. Rows
//! containing `?` are dropped and counted.

use ndarray::Array2;

use super::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A parsed ARFF file.
#[derive(Debug, Clone)]
pub struct ArffData<T> {
    pub relation: String,
    pub dataset: Dataset<T>,
    /// Rows dropped because they contained missing values.
    pub dropped_rows: usize,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Split off the first token, honouring single or double quotes.
fn take_token(s: &str) -> Option<(String, &str)> {
    let s = s.trim_start();
    let mut chars = s.char_indices();
    let (_, first) = chars.next()?;
    if first == '\'' || first == '"' {
        let end = s[1..].find(first)? + 1;
        Some((s[1..end].to_string(), &s[end + 1..]))
    } else {
        let end = s.find(char::is_whitespace).unwrap_or(s.len());
        Some((s[..end].to_string(), &s[end..]))
    }
}

fn keyword_rest<'a>(line: &'a str, keyword: &str) -> Option<&'a str> {
    let head = line.get(..keyword.len())?;
    if head.eq_ignore_ascii_case(keyword) {
        let rest = &line[keyword.len()..];
        if rest.is_empty() || rest.starts_with(char::is_whitespace) {
            return Some(rest);
        }
    }
    None
}

pub fn parse_arff<T: Real>(text: &str, n_targets: usize) -> Result<ArffData<T>> {
    let mut relation = String::new();
    let mut names: Vec<String> = Vec::new();
    let mut in_data = false;
    let mut values: Vec<T> = Vec::new();
    let mut n_rows = 0usize;
    let mut dropped = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if in_data {
            if line.starts_with('{') {
                return Err(parse_err(lineno, "sparse ARFF rows are not supported"));
            }
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            if cells.len() != names.len() {
                return Err(parse_err(
                    lineno,
                    format!("expected {} values, found {}", names.len(), cells.len()),
                ));
            }
            if cells.contains(&"?") {
                dropped += 1;
                continue;
            }
            for (col, cell) in cells.iter().enumerate() {
                let unquoted = cell.trim_matches(|c| c == '\'' || c == '"');
                let v: f64 = unquoted.parse().map_err(|_| Error::Cell {
                    row: lineno,
                    column: col,
                    value: cell.to_string(),
                })?;
                values.push(T::lit(v));
            }
            n_rows += 1;
            continue;
        }
        if !line.starts_with('@') {
            return Err(parse_err(
                lineno,
                "expected a header declaration before @data",
            ));
        }
        if let Some(rest) = keyword_rest(line, "@relation") {
            relation = take_token(rest)
                .map(|(t, _)| t)
                .ok_or_else(|| parse_err(lineno, "@relation without a name"))?;
        } else if let Some(rest) = keyword_rest(line, "@attribute") {
            let (name, rest) =
                take_token(rest).ok_or_else(|| parse_err(lineno, "@attribute without a name"))?;
            let kind = rest.trim();
            if kind.is_empty() {
                return Err(parse_err(lineno, format!("attribute `{name}` has no type")));
            }
            let lower = kind.to_ascii_lowercase();
            match lower.as_str() {
                "numeric" | "real" | "integer" => names.push(name),
                _ if lower.starts_with('{')
                    || lower.starts_with("string")
                    || lower.starts_with("date")
                    || lower.starts_with("relational") =>
                {
                    return Err(Error::UnsupportedAttribute {
                        name,
                        kind: kind.to_string(),
                        line: lineno,
                    })
                }
                _ => {
                    return Err(parse_err(
                        lineno,
                        format!("unknown attribute type `{kind}`"),
                    ))
                }
            }
        } else if keyword_rest(line, "@data").is_some() {
            if names.is_empty() {
                return Err(parse_err(lineno, "@data before any @attribute"));
            }
            in_data = true;
        } else {
            return Err(parse_err(lineno, format!("unknown declaration `{line}`")));
        }
    }

    if !in_data {
        return Err(parse_err(
            text.lines().count().max(1),
            "missing @data section",
        ));
    }
    if n_rows == 0 {
        return Err(Error::EmptyDataset { dropped });
    }
    if n_targets == 0 {
        return Err(Error::InvalidArgument(
            "n_targets must be at least 1".into(),
        ));
    }
    if n_targets >= names.len() {
        return if n_targets == names.len() {
            Err(Error::NoFeatures)
        } else {
            Err(Error::InvalidArgument(format!(
                "{n_targets} targets requested but the file declares {} attributes",
                names.len()
            )))
        };
    }
    let width = names.len();
    let d = width - n_targets;
    let all = Array2::from_shape_vec((n_rows, width), values)
        .map_err(|e| Error::ShapeMismatch(e.to_string()))?;
    let x = all.slice(ndarray::s![.., ..d]).to_owned();
    let y = all.slice(ndarray::s![.., d..]).to_owned();
    let target_names = names.split_off(d);
    let dataset = Dataset::new(x, y, names, target_names)?;
    Ok(ArffData {
        relation,
        dataset,
        dropped_rows: dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        "% comment\n@relation tiny\n@attribute a numeric\n@attribute b numeric\n@data\n1.0,2.0\n";

    #[test]
    fn minimal_file() {
        let a: ArffData<f64> = parse_arff(MINIMAL, 1).unwrap();
        let d = &a.dataset;
        assert_eq!((d.n_instances(), d.n_features(), d.n_targets()), (1, 1, 1));
        assert_eq!(d.x()[[0, 0]], 1.0);
        assert_eq!(d.y()[[0, 0]], 2.0);
        assert_eq!(a.relation, "tiny");
        assert_eq!(a.dropped_rows, 0);
        assert_eq!(d.target_names(), &["b"]);
    }

    #[test]
    fn missing_rows_are_dropped_and_counted() {
        let text = format!("{MINIMAL}?,2.0\n");
        let a: ArffData<f64> = parse_arff(&text, 1).unwrap();
        assert_eq!(a.dataset.n_instances(), 1);
        assert_eq!(a.dropped_rows, 1);
    }

    #[test]
    fn quoted_names_and_mixed_case_keywords() {
        let text =
            "@RELATION 'my data'\n@ATTRIBUTE 'x one' REAL\n@attribute \"t\" integer\n@DATA\n3,4\n";
        let a: ArffData<f64> = parse_arff(text, 1).unwrap();
        assert_eq!(a.relation, "my data");
        assert_eq!(a.dataset.feature_names(), &["x one"]);
        assert_eq!(a.dataset.target_names(), &["t"]);
    }

    #[test]
    fn nominal_attribute_is_unsupported() {
        let text = "@relation r\n@attribute a {x,y}\n@attribute b numeric\n@data\nx,1\n";
        let err = parse_arff::<f64>(text, 1).unwrap_err();
        assert!(
            matches!(err, Error::UnsupportedAttribute { line: 2, .. }),
            "{err}"
        );
    }

    #[test]
    fn malformed_header_reports_line() {
        let text = "@relation r\n@attribute a\n@data\n";
        match parse_arff::<f64>(text, 1) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let text = "@relation r\n@attribute a numeric\n@attribute b numeric\n@bogus\n@data\n1,2\n";
        assert!(matches!(
            parse_arff::<f64>(text, 1),
            Err(Error::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn ragged_data_row_reports_line() {
        let text = format!("{MINIMAL}1.0\n");
        assert!(matches!(
            parse_arff::<f64>(&text, 1),
            Err(Error::Parse { line: 7, .. })
        ));
    }

    #[test]
    fn zero_rows_is_empty_dataset() {
        let text = "@relation r\n@attribute a numeric\n@attribute b numeric\n@data\n?,1\n";
        assert!(matches!(
            parse_arff::<f64>(text, 1),
            Err(Error::EmptyDataset { dropped: 1 })
        ));
    }

    #[test]
    fn all_targets_means_no_features() {
        assert!(matches!(
            parse_arff::<f64>(MINIMAL, 2),
            Err(Error::NoFeatures)
        ));
    }
}
