//! Dataset CSV files and JSON sidecars.
//!
//! A dataset file holds one point per row, `N` comma-separated numeric
//! columns, `.` as decimal separator. Values are written with the shortest
//! representation that parses back to the same `f64`, so a write/read round
//! trip is exact.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::synth::{GroundTruth, SyntheticSpec};
use crate::model::{Bundle, DataSet, Partition, Subspace};

pub fn read_dataset_from<R: Read>(reader: R, header: bool) -> Result<DataSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut points: Vec<Vec<f64>> = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!(
                        "row {}: cannot parse '{field}' as a number",
                        line + 1
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        points.push(row);
    }
    if points.is_empty() {
        return Err(Error::InvalidInput("dataset file has no rows".into()));
    }
    DataSet::from_points(&points)
}

pub fn read_dataset(path: &Path, header: bool) -> Result<DataSet> {
    read_dataset_from(File::open(path)?, header)
}

pub fn write_dataset_to<W: Write>(writer: W, f: &DataSet) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    for j in 0..f.count() {
        wtr.write_record(f.point(j).iter().map(|v| v.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_dataset(path: &Path, f: &DataSet) -> Result<()> {
    write_dataset_to(File::create(path)?, f)
}

/// JSON form of a bundle: one list of basis columns per subspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleJson {
    pub ambient_dim: usize,
    pub cap_dim: usize,
    pub bases: Vec<Vec<Vec<f64>>>,
}

impl BundleJson {
    pub fn from_bundle(b: &Bundle) -> Self {
        Self {
            ambient_dim: b.ambient_dim(),
            cap_dim: b.cap_dim(),
            bases: b
                .subspaces()
                .iter()
                .map(|v| {
                    v.basis()
                        .column_iter()
                        .map(|c| c.iter().cloned().collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_bundle(&self) -> Result<Bundle> {
        let subspaces = self
            .bases
            .iter()
            .map(|cols| {
                if let Some(bad) = cols.iter().find(|c| c.len() != self.ambient_dim) {
                    return Err(Error::DimensionMismatch {
                        expected: self.ambient_dim,
                        found: bad.len(),
                    });
                }
                let q = DMatrix::from_fn(self.ambient_dim, cols.len(), |i, j| cols[j][i]);
                Subspace::from_orthonormal(q)
            })
            .collect::<Result<Vec<_>>>()?;
        Bundle::new(subspaces, self.cap_dim)
    }
}

/// Ground-truth sidecar written next to a generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthJson {
    pub spec: SyntheticSpec,
    /// 0-based point indices per subspace.
    pub partition: Vec<Vec<usize>>,
    pub bundle: BundleJson,
}

impl TruthJson {
    pub fn new(spec: &SyntheticSpec, truth: &GroundTruth) -> Self {
        Self {
            spec: spec.clone(),
            partition: truth.partition.groups().to_vec(),
            bundle: BundleJson::from_bundle(&truth.bundle),
        }
    }

    pub fn to_ground_truth(&self) -> Result<GroundTruth> {
        Ok(GroundTruth {
            bundle: self.bundle.to_bundle()?,
            partition: Partition::new(self.partition.clone(), self.spec.count)?,
        })
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = File::create(path)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n")?;
    Ok(())
}
