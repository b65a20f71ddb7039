//! Tensor files: `pdtomo-tensor-v1` JSON and small-system CSV.

use std::fs;
use std::path::Path;

use pdtomo::model::Provenance;
use pdtomo::tensor::Tensor;
use pdtomo::DataTensor;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const TENSOR_FORMAT: &str = "pdtomo-tensor-v1";

#[derive(Serialize, Deserialize)]
struct TensorFile {
    format: String,
    m: usize,
    d: usize,
    shape: Vec<usize>,
    /// Row-major, state axis slowest.
    values: Vec<f64>,
    provenance: Provenance,
}

pub fn tensor_to_json(t: &DataTensor) -> String {
    let file = TensorFile {
        format: TENSOR_FORMAT.into(),
        m: t.m(),
        d: t.d(),
        shape: t.shape().to_vec(),
        values: t.values().to_vec(),
        provenance: t.provenance().clone(),
    };
    let mut out = serde_json::to_string(&file).expect("tensor files serialize");
    out.push('\n');
    out
}

pub fn tensor_from_json(text: &str) -> Result<DataTensor, CliError> {
    let file: TensorFile = serde_json::from_str(text).map_err(|e| CliError::Io(format!("bad tensor file: {e}")))?;
    if file.format != TENSOR_FORMAT {
        return Err(CliError::Io(format!(
            "unsupported tensor format {:?}, expected {TENSOR_FORMAT:?}",
            file.format
        )));
    }
    Tensor::new(file.m, file.d, file.shape, file.values, file.provenance)
        .map_err(|e| CliError::Io(format!("bad tensor file: {e}")))
}

/// Reads `a,i[,j],value` rows (optional header) into a dense tensor.
pub fn tensor_from_csv(text: &str, d: usize, source: &str) -> Result<DataTensor, CliError> {
    let bad = |msg: String| CliError::Io(format!("{source}: {msg}"));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut entries: Vec<(Vec<usize>, f64)> = Vec::new();
    let mut width = None;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        if line == 0 && record.get(0).is_some_and(|f| f.parse::<usize>().is_err()) {
            continue;
        }
        let n = record.len();
        if !(3..=4).contains(&n) {
            return Err(bad(format!("line {}: expected a,i[,j],value", line + 1)));
        }
        if *width.get_or_insert(n) != n {
            return Err(bad(format!("line {}: column count changed", line + 1)));
        }
        let index = (0..n - 1)
            .map(|c| record[c].parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(format!("line {}: {e}", line + 1)))?;
        let value = record[n - 1]
            .parse::<f64>()
            .map_err(|e| bad(format!("line {}: {e}", line + 1)))?;
        entries.push((index, value));
    }
    let Some(width) = width else {
        return Err(bad("no data rows".into()));
    };
    let naxes = width - 1;
    let shape: Vec<usize> = (0..naxes)
        .map(|ax| entries.iter().map(|(ix, _)| ix[ax] + 1).max().unwrap_or(0))
        .collect();
    let total: usize = shape.iter().product();
    let mut values = vec![None; total];
    for (index, value) in entries {
        let flat = index.iter().zip(&shape).fold(0, |acc, (&i, &n)| acc * n + i);
        if values[flat].replace(value).is_some() {
            return Err(bad(format!("duplicate entry {index:?}")));
        }
    }
    let values = values
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| bad(format!("missing entries for shape {shape:?}")))?;
    Tensor::new(naxes - 1, d, shape, values, Provenance::ingested(source)).map_err(|e| bad(e.to_string()))
}

/// JSON by default; CSV when the extension is `.csv` (needs `d`).
pub fn read_tensor(path: &Path, d: Option<usize>) -> Result<DataTensor, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let d = d.ok_or_else(|| CliError::Usage("CSV input needs --d".into()))?;
        tensor_from_csv(&text, d, &path.display().to_string())
    } else {
        tensor_from_json(&text)
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
