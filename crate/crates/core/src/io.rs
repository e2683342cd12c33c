//! File formats.
//!
//! Tensors are JSON, either `{"format": "dense", "m", "n", "entries": [..]}`
//! with the `(mn)^2` entries row-major over `(i1, j1, i2, j2)`, or
//! `{"format": "coo", "m", "n", "entries": [[i1, j1, i2, j2, value], ..]}`
//! with 1-based indices and absent entries zero. Sample batches are CSV: a
//! `m,n` header, one record with the two dimensions, then one row-major
//! flattened sample per record.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{BiquadError, Result};
use crate::spectra::SolverTrace;
use crate::stats::SampleBatch;
use crate::structured::{B0Decomposition, SosCertificate};
use crate::tensor::BiquadraticTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TensorFormat {
    #[default]
    Dense,
    Coo,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "format", rename_all = "lowercase", deny_unknown_fields)]
enum TensorFile {
    Dense { m: usize, n: usize, entries: Vec<f64> },
    Coo { m: usize, n: usize, entries: Vec<(usize, usize, usize, usize, f64)> },
}

impl TensorFile {
    fn from_tensor(a: &BiquadraticTensor, format: TensorFormat) -> Self {
        let (m, n) = (a.m(), a.n());
        match format {
            TensorFormat::Dense => TensorFile::Dense { m, n, entries: a.entries().to_vec() },
            TensorFormat::Coo => {
                let mut entries = Vec::new();
                for i1 in 0..m {
                    for j1 in 0..n {
                        for i2 in 0..m {
                            for j2 in 0..n {
                                let v = a.get(i1, j1, i2, j2);
                                if v != 0.0 {
                                    entries.push((i1 + 1, j1 + 1, i2 + 1, j2 + 1, v));
                                }
                            }
                        }
                    }
                }
                TensorFile::Coo { m, n, entries }
            }
        }
    }

    fn into_tensor(self) -> Result<BiquadraticTensor> {
        match self {
            TensorFile::Dense { m, n, entries } => {
                let want = (m * n).pow(2);
                if entries.len() != want {
                    return Err(BiquadError::Parse(format!(
                        "dense tensor with m={m}, n={n} needs {want} entries, found {}",
                        entries.len()
                    )));
                }
                BiquadraticTensor::new(m, n, entries)
            }
            TensorFile::Coo { m, n, entries } => {
                let mut a = BiquadraticTensor::zeros(m, n)?;
                let mut seen = BTreeMap::new();
                for (k, (i1, j1, i2, j2, v)) in entries.into_iter().enumerate() {
                    let ok = |i: usize, hi: usize| (1..=hi).contains(&i);
                    if !(ok(i1, m) && ok(j1, n) && ok(i2, m) && ok(j2, n)) {
                        return Err(BiquadError::Parse(format!(
                            "coo entry {}: index ({i1}, {j1}, {i2}, {j2}) outside 1..={m} x 1..={n}",
                            k + 1
                        )));
                    }
                    if !v.is_finite() {
                        return Err(BiquadError::Parse(format!("coo entry {}: non-finite value", k + 1)));
                    }
                    if let Some(prev) = seen.insert((i1, j1, i2, j2), k + 1) {
                        return Err(BiquadError::Parse(format!(
                            "coo entry {}: index ({i1}, {j1}, {i2}, {j2}) repeats entry {prev}",
                            k + 1
                        )));
                    }
                    a.set(i1 - 1, j1 - 1, i2 - 1, j2 - 1, v);
                }
                Ok(a)
            }
        }
    }
}

fn json_error(e: serde_json::Error) -> BiquadError {
    BiquadError::Parse(e.to_string())
}

pub fn tensor_from_json(text: &str) -> Result<BiquadraticTensor> {
    serde_json::from_str::<TensorFile>(text).map_err(json_error)?.into_tensor()
}

pub fn tensor_to_json(a: &BiquadraticTensor, format: TensorFormat) -> String {
    serde_json::to_string(&TensorFile::from_tensor(a, format)).expect("tensor serializes")
}

pub fn read_tensor(path: &Path) -> Result<BiquadraticTensor> {
    let text = std::fs::read_to_string(path)?;
    tensor_from_json(&text).map_err(|e| match e {
        BiquadError::Parse(msg) => BiquadError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_tensor(path: &Path, a: &BiquadraticTensor, format: TensorFormat) -> Result<()> {
    std::fs::write(path, tensor_to_json(a, format) + "\n")?;
    Ok(())
}

fn csv_error(e: csv::Error) -> BiquadError {
    match e.position() {
        Some(p) => BiquadError::Parse(format!("line {}: {e}", p.line())),
        None => BiquadError::Parse(e.to_string()),
    }
}

pub fn samples_from_csv(text: &str) -> Result<SampleBatch> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.iter().collect::<Vec<_>>() != ["m", "n"] {
        return Err(BiquadError::Parse("line 1: expected header `m,n`".into()));
    }
    let mut records = rdr.records();
    let dims = records
        .next()
        .ok_or_else(|| BiquadError::Parse("line 2: missing dimension record".into()))?
        .map_err(csv_error)?;
    let parse_dim = |k: usize| -> Result<usize> {
        let s = dims
            .get(k)
            .ok_or_else(|| BiquadError::Parse(format!("line {}: missing field {}", line(&dims), k + 1)))?;
        s.parse()
            .map_err(|_| BiquadError::Parse(format!("line {}, field {}: `{s}` is not a dimension", line(&dims), k + 1)))
    };
    let (m, n) = (parse_dim(0)?, parse_dim(1)?);
    if m < 2 || n < 2 {
        return Err(BiquadError::InvalidDimensions { m, n });
    }
    let mut samples = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        if rec.len() != m * n {
            return Err(BiquadError::Parse(format!(
                "line {}: expected {} fields, found {}",
                line(&rec),
                m * n,
                rec.len()
            )));
        }
        let mut s = DMatrix::zeros(m, n);
        for (k, v) in rec.iter().enumerate() {
            let x: f64 = v.parse().map_err(|_| {
                BiquadError::Parse(format!("line {}, field {}: `{v}` is not a number", line(&rec), k + 1))
            })?;
            s[(k / n, k % n)] = x;
        }
        samples.push(s);
    }
    SampleBatch::new(samples)
}

fn line(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

pub fn samples_to_csv(batch: &SampleBatch) -> String {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    let (m, n) = (batch.m(), batch.n());
    w.write_record(["m", "n"]).expect("in-memory write");
    w.write_record([m.to_string(), n.to_string()]).expect("in-memory write");
    for s in batch.samples() {
        let row = (0..m).flat_map(|i| (0..n).map(move |j| s[(i, j)].to_string()));
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn read_samples(path: &Path) -> Result<SampleBatch> {
    let text = std::fs::read_to_string(path)?;
    samples_from_csv(&text).map_err(|e| match e {
        BiquadError::Parse(msg) => BiquadError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// One row per iteration: `k,f,grad_norm,alpha,source`, with empty `alpha`
/// and `source` on the final record.
pub fn trace_to_csv(trace: &SolverTrace) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "f", "grad_norm", "alpha", "source"]).expect("in-memory write");
    for r in &trace.records {
        w.write_record([
            r.k.to_string(),
            r.f.to_string(),
            r.grad_norm.to_string(),
            r.alpha.map_or(String::new(), |a| a.to_string()),
            r.source.map_or(String::new(), |s| s.as_str().to_string()),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn matrix_rows(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    a.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Serialize)]
struct CorrectionOut {
    h: f64,
    /// 1-based `(i, j)`.
    pairs: Vec<(usize, usize)>,
}

pub fn decomposition_to_json(dec: &B0Decomposition) -> serde_json::Value {
    let corrections: Vec<CorrectionOut> = dec
        .corrections
        .iter()
        .map(|c| CorrectionOut { h: c.h, pairs: c.support.iter().map(|p| (p.i + 1, p.j + 1)).collect() })
        .collect();
    serde_json::json!({
        "m_part": TensorFile::from_tensor(&dec.m_part, TensorFormat::Dense),
        "corrections": corrections,
    })
}

pub fn sos_to_json(cert: &SosCertificate) -> serde_json::Value {
    let factors: Vec<_> = cert.factors.iter().map(matrix_rows).collect();
    serde_json::json!({ "min_eigenvalue": cert.min_eigenvalue, "factors": factors })
}
