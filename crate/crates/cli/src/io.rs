//! CSV ingestion, chain and table serialization, and key=value sidecars.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use twopiece::forecasting::standardize_first_differences;
use twopiece::mcmc::Chain;

use crate::CliError;

/// Shortest decimal text that parses back to the same `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

fn parse_cell(cell: &str, row: usize, col: usize) -> Result<f64, CliError> {
    cell.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Data(format!("row {row}, column {col}: '{}' is not a number", cell.trim())))
}

fn reader(path: &Path, header: bool) -> Result<csv::Reader<File>, CliError> {
    csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeriesTransform {
    #[default]
    None,
    /// Standardized first differences.
    StdDiff,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub values: Vec<f64>,
    /// Leading date column, when present. After differencing, the date of
    /// each difference's later observation.
    pub dates: Option<Vec<String>>,
}

/// Reads one value per row, optionally preceded by a date column. Row
/// numbers in errors are 1-based file lines.
pub fn read_series_csv(path: &Path, header: bool, transform: SeriesTransform) -> Result<Series, CliError> {
    let mut rdr = reader(path, header)?;
    let mut values = Vec::new();
    let mut dates = Vec::new();
    let mut width = None;
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1 + usize::from(header);
        let rec = rec.map_err(|e| CliError::Data(format!("row {row}: {e}")))?;
        let w = *width.get_or_insert(rec.len());
        if rec.len() != w {
            return Err(CliError::Data(format!("row {row}: expected {w} columns, found {}", rec.len())));
        }
        match w {
            1 => values.push(parse_cell(&rec[0], row, 1)?),
            2 => {
                dates.push(rec[0].to_string());
                values.push(parse_cell(&rec[1], row, 2)?);
            }
            _ => return Err(CliError::Data(format!("row {row}: expected a value or a date and a value, found {w} columns"))),
        }
    }
    if values.is_empty() {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    let mut dates = (width == Some(2)).then_some(dates);
    if transform == SeriesTransform::StdDiff {
        values = standardize_first_differences(&values)?;
        if let Some(d) = dates.as_mut() {
            d.remove(0);
        }
    }
    Ok(Series { values, dates })
}

/// Reads a response column followed by covariate columns and prepends an
/// intercept column to the design.
pub fn read_design_csv(path: &Path, header: bool) -> Result<(Vec<f64>, DMatrix<f64>), CliError> {
    let mut rdr = reader(path, header)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1 + usize::from(header);
        let rec = rec.map_err(|e| CliError::Data(format!("row {row}: {e}")))?;
        if let Some(first) = rows.first() {
            if rec.len() != first.len() {
                return Err(CliError::Data(format!(
                    "row {row}: expected {} columns, found {}",
                    first.len(),
                    rec.len()
                )));
            }
        }
        let parsed = rec.iter().enumerate().map(|(c, cell)| parse_cell(cell, row, c + 1)).collect::<Result<_, _>>()?;
        rows.push(parsed);
    }
    if rows.is_empty() {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    let n = rows.len();
    let k = rows[0].len();
    let y = rows.iter().map(|r| r[0]).collect();
    let x = DMatrix::from_fn(n, k, |i, j| if j == 0 { 1.0 } else { rows[i][j] });
    Ok((y, x))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// A header and rows of already-formatted cells.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        self.write_to(create(path)?)
    }
}

pub fn chain_table(chain: &Chain) -> Table {
    let mut t = Table::new(&chain.names);
    for i in 0..chain.len() {
        t.push(chain.draws.iter().map(|c| fmt_num(c[i])).collect());
    }
    t
}

/// Column names and columns of a chain CSV.
pub fn read_chain_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let mut rdr = reader(path, true)?;
    let names: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::Data(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut cols = vec![Vec::new(); names.len()];
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| CliError::Data(format!("row {row}: {e}")))?;
        if rec.len() != names.len() {
            return Err(CliError::Data(format!("row {row}: expected {} columns", names.len())));
        }
        for (c, cell) in rec.iter().enumerate() {
            cols[c].push(parse_cell(cell, row, c + 1)?);
        }
    }
    Ok((names, cols))
}

/// Writes `key=value` lines in the given order.
pub fn write_sidecar(path: &Path, entries: &[(String, String)]) -> Result<(), CliError> {
    let mut w = create(path)?;
    for (k, v) in entries {
        debug_assert!(!k.contains('=') && !v.contains('\n'));
        writeln!(w, "{k}={v}").map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn read_sidecar(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Data(format!("{}: line {} is not key=value", path.display(), i + 1)))
        })
        .collect()
}

/// Sidecar entries describing a chain: seed, sampler settings and
/// acceptance rates.
pub fn chain_metadata(chain: &Chain) -> Vec<(String, String)> {
    let c = &chain.config;
    let mut m = vec![
        ("seed".to_string(), chain.seed.to_string()),
        ("n_iter".to_string(), c.n_iter.to_string()),
        ("n_burn".to_string(), c.n_burn.to_string()),
        ("thin".to_string(), c.thin.to_string()),
        ("p_max".to_string(), c.p_max.to_string()),
        ("adapt".to_string(), c.adapt.to_string()),
        ("draws".to_string(), chain.len().to_string()),
        ("final_scale.coef".to_string(), fmt_num(chain.final_scales.coef)),
        ("final_scale.logit_alpha".to_string(), fmt_num(chain.final_scales.logit_alpha)),
        ("final_scale.log_sigma".to_string(), fmt_num(chain.final_scales.log_sigma)),
    ];
    for (b, r) in &chain.acceptance {
        m.push((format!("acceptance.{}", b.name()), fmt_num(*r)));
    }
    m
}
