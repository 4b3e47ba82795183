//! Tensor file format.
//!
//! A tensor is stored as a single self-describing JSON document:
//!
//! ```json
//! {
//!   "format": "dense-tensor",
//!   "version": 1,
//!   "order": 2,
//!   "dims": [2, 2],
//!   "dtype": "f64",
//!   "layout": "row-major",
//!   "entries": [1.0, 0.0, 0.0, 1.0]
//! }
//! ```
//!
//! Small tensors (at most [`INLINE_ENTRY_LIMIT`] entries) inline their
//! entries as a JSON array. Larger tensors carry an `entries_b64` field
//! instead: the standard-alphabet base64 encoding of the entry array as
//! little-endian IEEE-754 doubles in row-major order. Readers accept either
//! representation at any size; writers pick by the size threshold. The
//! format is versioned and `version` is checked on read.

use std::io::{Read, Write};

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{DenseTensor, Shape};

pub const TENSOR_FORMAT_NAME: &str = "dense-tensor";
pub const TENSOR_FORMAT_VERSION: u32 = 1;

/// Largest tensor whose entries are written as a JSON array.
pub const INLINE_ENTRY_LIMIT: usize = 64;

#[derive(Serialize, Deserialize)]
struct TensorFile {
    format: String,
    version: u32,
    order: usize,
    dims: Vec<usize>,
    dtype: String,
    layout: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entries_b64: Option<String>,
}

pub fn to_json_string(tensor: &DenseTensor) -> String {
    let inline = tensor.entries().len() <= INLINE_ENTRY_LIMIT;
    let file = TensorFile {
        format: TENSOR_FORMAT_NAME.to_string(),
        version: TENSOR_FORMAT_VERSION,
        order: tensor.order(),
        dims: tensor.shape().dims().to_vec(),
        dtype: "f64".to_string(),
        layout: "row-major".to_string(),
        entries: inline.then(|| tensor.entries().to_vec()),
        entries_b64: (!inline).then(|| encode_entries(tensor.entries())),
    };
    serde_json::to_string(&file).expect("finite entries always serialize")
}

pub fn from_json_str(text: &str) -> Result<DenseTensor> {
    let file: TensorFile =
        serde_json::from_str(text).map_err(|e| Error::TensorFormat(e.to_string()))?;
    if file.format != TENSOR_FORMAT_NAME {
        return Err(Error::TensorFormat(format!(
            "unknown format {:?}, expected {TENSOR_FORMAT_NAME:?}",
            file.format
        )));
    }
    if file.version != TENSOR_FORMAT_VERSION {
        return Err(Error::TensorFormat(format!(
            "unsupported version {}, this reader understands {TENSOR_FORMAT_VERSION}",
            file.version
        )));
    }
    if file.dtype != "f64" {
        return Err(Error::TensorFormat(format!("unsupported dtype {:?}", file.dtype)));
    }
    if file.layout != "row-major" {
        return Err(Error::TensorFormat(format!("unsupported layout {:?}", file.layout)));
    }
    if file.order != file.dims.len() {
        return Err(Error::TensorFormat(format!(
            "order {} disagrees with {} dims",
            file.order,
            file.dims.len()
        )));
    }
    let entries = match (file.entries, file.entries_b64) {
        (Some(v), None) => v,
        (None, Some(b)) => decode_entries(&b)?,
        (Some(_), Some(_)) => {
            return Err(Error::TensorFormat(
                "both entries and entries_b64 present".into(),
            ))
        }
        (None, None) => {
            return Err(Error::TensorFormat(
                "neither entries nor entries_b64 present".into(),
            ))
        }
    };
    let shape = Shape::new(&file.dims)?;
    DenseTensor::new(shape, entries)
}

pub fn write_tensor<W: Write>(tensor: &DenseTensor, mut writer: W) -> Result<()> {
    writer.write_all(to_json_string(tensor).as_bytes())?;
    writer.write_all(b"\n")?;
    Ok(())
}

pub fn read_tensor<R: Read>(mut reader: R) -> Result<DenseTensor> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    from_json_str(&text)
}

pub fn save_tensor(tensor: &DenseTensor, path: &std::path::Path) -> Result<()> {
    write_tensor(tensor, std::fs::File::create(path)?)
}

pub fn load_tensor(path: &std::path::Path) -> Result<DenseTensor> {
    read_tensor(std::fs::File::open(path)?)
}

fn encode_entries(entries: &[f64]) -> String {
    let mut bytes = Vec::with_capacity(entries.len() * 8);
    for e in entries {
        bytes.extend_from_slice(&e.to_le_bytes());
    }
    BASE64.encode(bytes)
}

fn decode_entries(text: &str) -> Result<Vec<f64>> {
    let bytes = BASE64
        .decode(text)
        .map_err(|e| Error::TensorFormat(format!("bad base64 payload: {e}")))?;
    if bytes.len() % 8 != 0 {
        return Err(Error::TensorFormat(format!(
            "payload of {} bytes is not a whole number of f64s",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}
