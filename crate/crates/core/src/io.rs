//! Dataset ingestion, result documents and Q-Q plot data.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{EstimationResult, NullTest};
use crate::stats::normal_quantile;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Response vector and regressor matrix (n x p) with names.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub y: Vec<f64>,
    pub x: DMatrix<f64>,
    pub response_name: String,
    pub column_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        y: Vec<f64>,
        x: DMatrix<f64>,
        response_name: impl Into<String>,
        column_names: Vec<String>,
    ) -> Result<Self> {
        let n = y.len();
        if x.nrows() != n {
            return Err(Error::Dimension(format!(
                "response has {n} rows but X has {}",
                x.nrows()
            )));
        }
        if column_names.len() != x.ncols() {
            return Err(Error::Dimension(format!(
                "{} column names for {} columns",
                column_names.len(),
                x.ncols()
            )));
        }
        if n < 2 {
            return Err(Error::Dimension(format!("need at least 2 rows, got {n}")));
        }
        if y.iter().chain(x.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Schema("dataset contains non-finite values".into()));
        }
        let response_name = response_name.into();
        let mut seen = HashSet::new();
        for name in std::iter::once(&response_name).chain(&column_names) {
            if !seen.insert(name.as_str()) {
                return Err(Error::Schema(format!("duplicate column name {name:?}")));
            }
        }
        Ok(Self {
            y,
            x,
            response_name,
            column_names,
        })
    }

    /// Dataset with generated names `x1..xp` and response `y`.
    pub fn from_matrix(y: Vec<f64>, x: DMatrix<f64>) -> Result<Self> {
        let names = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
        Self::new(y, x, "y", names)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Rows `indices` (with repetition) as a new dataset.
    pub fn resample(&self, indices: &[usize]) -> Dataset {
        let y = indices.iter().map(|&i| self.y[i]).collect();
        let x = DMatrix::from_fn(indices.len(), self.p(), |r, c| self.x[(indices[r], c)]);
        Dataset {
            y,
            x,
            response_name: self.response_name.clone(),
            column_names: self.column_names.clone(),
        }
    }
}

/// Reads a headed CSV; every retained column must be numeric.
pub fn read_csv(
    path: impl AsRef<Path>,
    response_column: &str,
    drop_columns: &[String],
) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv_from(file, response_column, drop_columns)
}

pub fn read_csv_from(
    reader: impl std::io::Read,
    response_column: &str,
    drop_columns: &[String],
) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut seen = HashSet::new();
    for h in &headers {
        if !seen.insert(h.as_str()) {
            return Err(Error::Schema(format!("duplicate header {h:?}")));
        }
    }
    for d in drop_columns {
        if !seen.contains(d.as_str()) {
            return Err(Error::Schema(format!("cannot drop unknown column {d:?}")));
        }
    }
    let resp_idx = headers
        .iter()
        .position(|h| h == response_column)
        .ok_or_else(|| Error::Schema(format!("response column {response_column:?} not found")))?;
    let keep: Vec<usize> = (0..headers.len())
        .filter(|&j| j != resp_idx && !drop_columns.contains(&headers[j]))
        .collect();

    let mut y = Vec::new();
    let mut values = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = r + 1;
        let cell = |j: usize| -> Result<f64> {
            let raw = rec.get(j).unwrap_or("").trim();
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    row,
                    column: headers[j].clone(),
                    value: raw.to_string(),
                })
        };
        y.push(cell(resp_idx)?);
        for &j in &keep {
            values.push(cell(j)?);
        }
    }
    let n = y.len();
    if n >= 1 && y.iter().all(|v| *v == y[0]) {
        return Err(Error::Schema(format!(
            "response column {response_column:?} is constant"
        )));
    }
    let x = DMatrix::from_row_slice(n, keep.len(), &values);
    let names = keep.iter().map(|&j| headers[j].clone()).collect();
    Dataset::new(y, x, response_column, names)
}

/// Writes the dataset with the response first; values use shortest round-trip formatting.
pub fn write_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let mut header = vec![data.response_name.clone()];
    header.extend(data.column_names.iter().cloned());
    w.write_record(&header)?;
    for i in 0..data.n() {
        let mut rec = vec![data.y[i].to_string()];
        rec.extend((0..data.p()).map(|j| data.x[(i, j)].to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// JSON document written for an estimation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub tool_version: String,
    #[serde(flatten)]
    pub result: EstimationResult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<NullTest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

pub fn write_result(result: &EstimationResult, path: impl AsRef<Path>) -> Result<()> {
    write_document(
        &ResultDocument {
            tool_version: TOOL_VERSION.to_string(),
            result: result.clone(),
            test: None,
            config: None,
        },
        path,
    )
}

pub fn write_document(doc: &ResultDocument, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, doc).map_err(|e| Error::Json(e.to_string()))?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_result(path: impl AsRef<Path>) -> Result<ResultDocument> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QqPoint {
    pub theoretical: f64,
    pub sample: f64,
}

/// Sorted `resid / sqrt(sigma2)` against normal quantiles at `(i - 0.5)/n`.
pub fn qq_points(residuals: &[f64], sigma2: f64) -> Result<Vec<QqPoint>> {
    if residuals.is_empty() {
        return Err(Error::EmptyData);
    }
    if !(sigma2 > 0.0) {
        return Err(Error::NonPositiveVariance(sigma2));
    }
    let sd = sigma2.sqrt();
    let mut z: Vec<f64> = residuals.iter().map(|r| r / sd).collect();
    z.sort_by(f64::total_cmp);
    let n = z.len() as f64;
    Ok(z.into_iter()
        .enumerate()
        .map(|(i, sample)| QqPoint {
            theoretical: normal_quantile((i as f64 + 0.5) / n),
            sample,
        })
        .collect())
}

/// Q-Q data of the standardized residuals of a nuisance fit.
pub fn qq_data(nuis: &crate::nuisance::NuisanceAtTheta) -> Result<Vec<QqPoint>> {
    qq_points(&nuis.resid, nuis.h.sigma2)
}

/// Largest vertical distance from the diagonal.
pub fn qq_sup_deviation(points: &[QqPoint]) -> f64 {
    points
        .iter()
        .map(|p| (p.sample - p.theoretical).abs())
        .fold(0.0, f64::max)
}

pub fn write_qq_csv(points: &[QqPoint], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(["theoretical", "sample"])?;
    for p in points {
        w.write_record([p.theoretical.to_string(), p.sample.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
