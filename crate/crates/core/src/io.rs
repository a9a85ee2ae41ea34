//! File formats: JSON specs, CSV point processes and covariates.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::complexity::DiscretePrior;
use crate::error::{Error, Result};
use crate::poisson::PointProcess;
use crate::sphere::CovariateSet;

/// Deviation from unit norm above which loaded covariates deserve a warning.
pub const COVARIATE_NORM_TOL: f64 = 1e-8;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(BufReader::new(f))?)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(f))
}

/// `{"ids": [...], "weights": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorFile {
    pub ids: Vec<String>,
    pub weights: Vec<f64>,
}

/// `{"ids": [...], "matrix": [[...], ...]}`; `ids` may be omitted when the
/// rows follow the prior's order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossFile {
    #[serde(default)]
    pub ids: Option<Vec<String>>,
    pub matrix: Vec<Vec<f64>>,
}

pub fn load_prior(prior: &PriorFile, loss: &LossFile) -> Result<DiscretePrior> {
    if let Some(ids) = &loss.ids {
        if *ids != prior.ids {
            return Err(Error::Shape(
                "loss file ids differ from the prior ids".into(),
            ));
        }
    }
    let n = prior.ids.len();
    if loss.matrix.len() != n || loss.matrix.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("loss matrix must be {n}×{n}")));
    }
    DiscretePrior::from_matrix(
        prior.ids.clone(),
        prior.weights.clone(),
        loss.matrix.concat(),
    )
}

pub fn read_prior(prior_path: &Path, loss_path: &Path) -> Result<DiscretePrior> {
    load_prior(&read_json(prior_path)?, &read_json(loss_path)?)
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(f))
}

fn parse_row(record: &csv::StringRecord, line: usize) -> Result<Vec<f64>> {
    record
        .iter()
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Data(format!("line {line}: cannot parse {v:?}")))
        })
        .collect()
}

/// Rows `process_id, x₁, …, x_d`; processes are numbered `0..n`.
pub fn read_points_csv(path: &Path, n: usize, dim: usize) -> Result<Vec<PointProcess>> {
    let mut out: Vec<PointProcess> = (0..n)
        .map(|i| PointProcess {
            points: Vec::new(),
            covariate_index: i,
        })
        .collect();
    for (k, rec) in csv_reader(path)?.records().enumerate() {
        let row = parse_row(&rec?, k + 2)?;
        if row.len() != dim + 1 {
            return Err(Error::Data(format!(
                "line {}: expected {} fields",
                k + 2,
                dim + 1
            )));
        }
        let id = row[0];
        if id < 0.0 || id.fract() != 0.0 || id as usize >= n {
            return Err(Error::Data(format!("line {}: bad process id {id}", k + 2)));
        }
        out[id as usize].points.push(row[1..].to_vec());
    }
    Ok(out)
}

pub fn write_points_csv(path: &Path, processes: &[PointProcess], dim: usize) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["process_id".to_owned()];
    header.extend((1..=dim).map(|k| format!("x{k}")));
    w.write_record(&header)?;
    for p in processes {
        for x in &p.points {
            let mut row = vec![p.covariate_index.to_string()];
            row.extend(x.iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Covariate vectors, one per row, renormalised to unit length. Also
/// returns the largest norm deviation seen.
pub fn read_covariates_csv(path: &Path) -> Result<(CovariateSet, f64)> {
    let rows = csv_reader(path)?
        .records()
        .enumerate()
        .map(|(k, rec)| parse_row(&rec?, k + 2))
        .collect::<Result<Vec<_>>>()?;
    CovariateSet::renormalized(rows)
}
