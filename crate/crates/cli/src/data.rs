//! CSV input and output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rankdir::ranks::grouped_rank_transform;
use rankdir::Dataset;

use crate::CliError;

/// Complete rows of the requested columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub rows: Vec<Vec<f64>>,
    pub response: Vec<f64>,
    pub groups: Option<Vec<String>>,
    pub dropped: usize,
}

impl Loaded {
    /// Builds the dataset, ranking the response within groups when labels
    /// are present.
    pub fn dataset(&self, intercept: bool) -> Result<Dataset, CliError> {
        let response = match &self.groups {
            Some(g) => grouped_rank_transform(&self.response, g)?,
            None => self.response.clone(),
        };
        Ok(Dataset::from_rows(&self.rows, response)?.with_intercept(intercept))
    }
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell.eq_ignore_ascii_case("na") || cell.eq_ignore_ascii_case("nan")
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize, CliError> {
    headers.iter().position(|h| h == name).ok_or_else(|| {
        let available: Vec<&str> = headers.iter().collect();
        CliError::UnknownColumn(format!(
            "unknown column '{name}' (available: {})",
            available.join(", ")
        ))
    })
}

/// Reads `path`, keeping the response, covariate and optional group
/// columns. Rows with an empty, `NA` or `NaN` cell in any of them are
/// dropped and counted.
pub fn load(
    path: &Path,
    response: &str,
    covariates: &[String],
    group: Option<&str>,
) -> Result<Loaded, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
        .clone();
    let y_col = column_index(&headers, response)?;
    let x_cols = covariates
        .iter()
        .map(|c| column_index(&headers, c))
        .collect::<Result<Vec<_>, _>>()?;
    let g_col = group.map(|g| column_index(&headers, g)).transpose()?;

    let mut out = Loaded {
        rows: Vec::new(),
        response: Vec::new(),
        groups: g_col.map(|_| Vec::new()),
        dropped: 0,
    };
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        let cell = |i: usize| record.get(i).unwrap_or("");
        let parse = |i: usize| -> Result<Option<f64>, CliError> {
            let text = cell(i);
            if is_missing(text) {
                return Ok(None);
            }
            match text.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Some(v)),
                _ => Err(CliError::Data(format!(
                    "data row {}, column '{}': cannot parse '{text}' as a finite number",
                    line + 1,
                    &headers[i]
                ))),
            }
        };
        let y = parse(y_col)?;
        let xs = x_cols.iter().map(|&i| parse(i)).collect::<Result<Vec<_>, _>>()?;
        let label = g_col.map(cell);
        let complete = y.is_some()
            && xs.iter().all(Option::is_some)
            && label.is_none_or(|l| !is_missing(l));
        if !complete {
            out.dropped += 1;
            continue;
        }
        out.response.push(y.unwrap_or_default());
        out.rows.push(xs.into_iter().flatten().collect());
        if let (Some(groups), Some(l)) = (out.groups.as_mut(), label) {
            groups.push(l.to_string());
        }
    }
    if out.rows.is_empty() {
        return Err(CliError::Data(format!("{}: no complete rows", path.display())));
    }
    Ok(out)
}

/// A CSV sink that starts with a `#` provenance line.
pub struct CsvOut {
    writer: csv::Writer<Box<dyn Write>>,
}

impl CsvOut {
    pub fn create(path: Option<&Path>, comment: &str) -> Result<Self, CliError> {
        let mut sink: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?,
            )),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        writeln!(sink, "# {comment}").map_err(io_error)?;
        Ok(Self {
            writer: csv::Writer::from_writer(sink),
        })
    }

    pub fn row<I, T>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.writer.write_record(fields).map_err(|e| CliError::Data(e.to_string()))
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.writer.flush().map_err(io_error)
    }
}

fn io_error(e: io::Error) -> CliError {
    CliError::Data(e.to_string())
}

/// Shortest round-trip formatting, `NA` for missing values.
pub fn num(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => "NA".into(),
    }
}
