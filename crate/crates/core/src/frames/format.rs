//! Frame files.
//!
//! JSON: `{"n": 3, "k": 2, "vectors": [[..], [..], [..]]}`.
//! CSV: header `v1,...,vk`, then one row of `k` reals per vector.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Frame, UFrame};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameFile {
    n: usize,
    k: usize,
    vectors: Vec<Vec<f64>>,
}

impl<T: Real> Serialize for Frame<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FrameFile {
            n: self.n(),
            k: self.k(),
            vectors: self
                .vectors()
                .iter()
                .map(|v| v.iter().map(|x| x.as_f64()).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<T: Real> Serialize for UFrame<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_frame().serialize(serializer)
    }
}

fn check_shape(n: usize, k: usize, vectors: &[Vec<f64>]) -> Result<()> {
    if vectors.len() != n {
        return Err(Error::Format(format!(
            "declared n = {n} but found {} vectors",
            vectors.len()
        )));
    }
    if let Some((i, v)) = vectors.iter().enumerate().find(|(_, v)| v.len() != k) {
        return Err(Error::Format(format!(
            "vector {i} has {} coordinates, declared k = {k}",
            v.len()
        )));
    }
    Ok(())
}

fn to_frame<T: Real>(k: usize, vectors: Vec<Vec<f64>>) -> Result<Frame<T>> {
    Frame::new(k, vectors.into_iter().map(|v| v.into_iter().map(T::lit).collect()).collect())
}

pub fn from_json<T: Real>(text: &str) -> Result<Frame<T>> {
    let file: FrameFile = serde_json::from_str(text)?;
    check_shape(file.n, file.k, &file.vectors)?;
    to_frame(file.k, file.vectors)
}

pub fn to_json<T: Real>(frame: &Frame<T>) -> String {
    serde_json::to_string(frame).expect("frame serialises")
}

/// JSON value of a frame, for embedding in reports.
pub fn to_json_value<T: Real>(frame: &Frame<T>) -> serde_json::Value {
    serde_json::to_value(frame).expect("frame serialises")
}

pub fn from_csv<T: Real>(text: &str) -> Result<Frame<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let k = headers.len();
    for (i, h) in headers.iter().enumerate() {
        if h != format!("v{}", i + 1) {
            return Err(Error::Format(format!(
                "expected header column v{}, found {h:?}",
                i + 1
            )));
        }
    }
    let mut vectors = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("bad number {field:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        vectors.push(row);
    }
    check_shape(vectors.len(), k, &vectors)?;
    to_frame(k, vectors)
}

pub fn to_csv<T: Real>(frame: &Frame<T>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = (1..=frame.k()).map(|i| format!("v{i}")).collect();
    writer.write_record(&header).expect("in-memory write");
    for v in frame.vectors() {
        writer
            .write_record(v.iter().map(|x| x.as_f64().to_string()))
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("flush")).expect("utf8 csv")
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads a frame, choosing CSV for `.csv` files and JSON otherwise.
pub fn load<T: Real>(path: &Path) -> Result<Frame<T>> {
    let text = fs::read_to_string(path)?;
    if is_csv(path) {
        from_csv(&text)
    } else {
        from_json(&text)
    }
}

pub fn save<T: Real>(path: &Path, frame: &Frame<T>) -> Result<()> {
    let text = if is_csv(path) {
        to_csv(frame)
    } else {
        to_json(frame)
    };
    fs::write(path, text)?;
    Ok(())
}
