use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fdr_core::PValueVector;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Csv,
    Tsv,
    Lines,
}

impl InputFormat {
    /// `.csv` and `.tsv` by extension, anything else one value per line.
    pub fn infer(path: &Path) -> Self {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            Some("csv") => InputFormat::Csv,
            Some("tsv") | Some("tab") => InputFormat::Tsv,
            _ => InputFormat::Lines,
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::Csv => "csv",
            InputFormat::Tsv => "tsv",
            InputFormat::Lines => "lines",
        })
    }
}

/// Column selector: a 0-based index or a header name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Column {
    Index(usize),
    Name(String),
}

impl FromStr for Column {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => Column::Index(i),
            Err(_) => Column::Name(s.to_string()),
        })
    }
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{0}: file not found")]
    FileNotFound(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("line {line}: cannot parse `{content}` as a p-value")]
    ParseError { line: u64, content: String },

    #[error("line {line}: p-value {value} is outside [0, 1]")]
    OutOfRange { line: u64, value: f64 },

    #[error("line {line}: no column {column}")]
    MissingColumn { line: u64, column: String },

    #[error("column `{0}` not found in header")]
    ColumnNotFound(String),

    #[error("no p-values found")]
    EmptyInput,
}

fn is_numeric(field: &str) -> bool {
    field.trim().parse::<f64>().is_ok()
}

fn parse_value(field: &str, line: u64) -> Result<f64, InputError> {
    let trimmed = field.trim();
    let value: f64 = trimmed.parse().map_err(|_| InputError::ParseError {
        line,
        content: trimmed.to_string(),
    })?;
    if !value.is_finite() || !(0.0..=1.0).contains(&value) {
        return Err(InputError::OutOfRange { line, value });
    }
    Ok(value)
}

/// Read one p-value per record. The first record is treated as a header
/// when its selected field is not a number.
pub fn parse_pvalue_file(
    path: &Path,
    format: InputFormat,
    column: Option<&Column>,
) -> Result<PValueVector, InputError> {
    let file = File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => InputError::FileNotFound(path.to_path_buf()),
        _ => InputError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })?;
    let io_err = |e: io::Error| InputError::Io {
        path: path.to_path_buf(),
        source: e,
    };

    let values = match format {
        InputFormat::Lines => {
            let mut values = Vec::new();
            let mut first = true;
            for (n, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(io_err)?;
                let text = line.trim();
                if text.is_empty() || text.starts_with('#') {
                    continue;
                }
                if std::mem::take(&mut first) && !is_numeric(text) {
                    continue;
                }
                values.push(parse_value(text, n as u64 + 1)?);
            }
            values
        }
        InputFormat::Csv | InputFormat::Tsv => {
            let delimiter = if format == InputFormat::Csv {
                b','
            } else {
                b'\t'
            };
            let mut reader = csv::ReaderBuilder::new()
                .delimiter(delimiter)
                .has_headers(false)
                .flexible(true)
                .comment(Some(b'#'))
                .from_reader(file);
            parse_delimited(&mut reader, column)?
        }
    };

    if values.is_empty() {
        return Err(InputError::EmptyInput);
    }
    Ok(PValueVector::new(values).expect("values validated while parsing"))
}

fn parse_delimited<R: io::Read>(
    reader: &mut csv::Reader<R>,
    column: Option<&Column>,
) -> Result<Vec<f64>, InputError> {
    let mut values = Vec::new();
    let mut index = match column {
        Some(Column::Index(i)) => Some(*i),
        _ => None,
    };
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            InputError::ParseError {
                line,
                content: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if std::mem::take(&mut first) {
            if let Some(Column::Name(name)) = column {
                let found = record.iter().position(|f| f.trim() == name);
                index = Some(found.ok_or_else(|| InputError::ColumnNotFound(name.clone()))?);
                continue;
            }
            let field = record.get(index.unwrap_or(0)).unwrap_or("");
            if !is_numeric(field) {
                continue;
            }
        }
        let col = index.unwrap_or(0);
        let field = record.get(col).ok_or_else(|| InputError::MissingColumn {
            line,
            column: col.to_string(),
        })?;
        values.push(parse_value(field, line)?);
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(contents: &str, suffix: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn parse(
        contents: &str,
        format: InputFormat,
        column: Option<&str>,
    ) -> Result<Vec<f64>, InputError> {
        let f = file(contents, ".txt");
        let column = column.map(|c| c.parse::<Column>().unwrap());
        parse_pvalue_file(f.path(), format, column.as_ref()).map(|p| p.values().to_vec())
    }

    #[test]
    fn lines_format() {
        assert_eq!(
            parse("0.01\n0.2\n", InputFormat::Lines, None).unwrap(),
            [0.01, 0.2]
        );
        assert_eq!(
            parse("p\n0.5\n\n", InputFormat::Lines, None).unwrap(),
            [0.5]
        );
    }

    #[test]
    fn csv_header_detection() {
        assert_eq!(parse("p\n0.05\n", InputFormat::Csv, None).unwrap(), [0.05]);
        assert_eq!(
            parse("0.05\n0.5\n", InputFormat::Csv, None).unwrap(),
            [0.05, 0.5]
        );
    }

    #[test]
    fn column_by_name_and_index() {
        let csv = "gene,pvalue\na,0.01\nb,0.3\n";
        assert_eq!(
            parse(csv, InputFormat::Csv, Some("pvalue")).unwrap(),
            [0.01, 0.3]
        );
        assert_eq!(
            parse(csv, InputFormat::Csv, Some("1")).unwrap(),
            [0.01, 0.3]
        );
        assert!(matches!(
            parse(csv, InputFormat::Csv, Some("q")),
            Err(InputError::ColumnNotFound(_))
        ));
        let tsv = "id\tp\n7\t0.04\n";
        assert_eq!(parse(tsv, InputFormat::Tsv, Some("p")).unwrap(), [0.04]);
    }

    #[test]
    fn malformed_value_reports_line() {
        match parse("0.01\nabc\n", InputFormat::Lines, None) {
            Err(InputError::ParseError { line, content }) => {
                assert_eq!(line, 2);
                assert_eq!(content, "abc");
            }
            other => panic!("{other:?}"),
        }
        match parse("p\n0.1\nxyz\n", InputFormat::Csv, None) {
            Err(InputError::ParseError { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn out_of_range_reports_line() {
        assert!(matches!(
            parse("0.1\n1.5\n", InputFormat::Lines, None),
            Err(InputError::OutOfRange { line: 2, .. })
        ));
        assert!(matches!(
            parse("0.1\nnan\n", InputFormat::Lines, None),
            Err(InputError::OutOfRange { line: 2, .. })
        ));
    }

    #[test]
    fn empty_and_missing() {
        assert!(matches!(
            parse("", InputFormat::Lines, None),
            Err(InputError::EmptyInput)
        ));
        assert!(matches!(
            parse("p\n", InputFormat::Csv, None),
            Err(InputError::EmptyInput)
        ));
        assert!(matches!(
            parse_pvalue_file(Path::new("/nonexistent/p.txt"), InputFormat::Lines, None),
            Err(InputError::FileNotFound(_))
        ));
    }

    #[test]
    fn format_inference() {
        assert_eq!(InputFormat::infer(Path::new("a.CSV")), InputFormat::Csv);
        assert_eq!(InputFormat::infer(Path::new("a.tsv")), InputFormat::Tsv);
        assert_eq!(InputFormat::infer(Path::new("a.txt")), InputFormat::Lines);
        assert_eq!(InputFormat::infer(Path::new("pvals")), InputFormat::Lines);
    }
}
