//! Dataset files: labeled CSV and the `NSCRMAT1` binary matrix format.
//!
//! CSV: UTF-8, header row with one `label` column plus numeric feature
//! columns, one sample per row. Binary: magic `NSCRMAT1`, u64 LE feature
//! dimension D, u64 LE sample count N, D·N f64 LE values column-major,
//! then a label block (u64 LE count, then length-prefixed UTF-8 strings).
//! Loaders group samples by class; writers emit the grouped order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use super::SampleMatrix;
use crate::error::Error;
use crate::Result;

const MAGIC: &[u8; 8] = b"NSCRMAT1";

/// Loads a labeled CSV dataset; returns the class-grouped matrix and the
/// per-sample labels in grouped column order.
pub fn load_csv_dataset(path: impl AsRef<Path>) -> Result<(SampleMatrix, Vec<String>)> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let header = reader.headers()?.clone();

    let mut label_col = None;
    for (i, name) in header.iter().enumerate() {
        if header.iter().take(i).any(|earlier| earlier == name) {
            return Err(Error::DuplicateColumn(name.to_string()));
        }
        if name == "label" {
            label_col = Some(i);
        }
    }
    let label_col = label_col.ok_or(Error::MissingLabelColumn)?;
    if header.len() < 2 {
        return Err(Error::NoFeatureColumns);
    }
    let dim = header.len() - 1;

    let mut labels = Vec::new();
    let mut cells: Vec<f64> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        for (i, cell) in record.iter().enumerate() {
            if i == label_col {
                labels.push(cell.to_string());
                continue;
            }
            let parsed = cell.trim().parse::<f64>().ok().filter(|v| v.is_finite());
            match parsed {
                Some(v) => cells.push(v),
                None => {
                    return Err(Error::BadCell {
                        row: row_idx + 1,
                        column: header[i].to_string(),
                        value: cell.to_string(),
                    })
                }
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptyDataset);
    }

    // Samples arrive as rows; the matrix stores them as columns, so the
    // row-major cell stream is exactly the column-major layout of values.
    let values = DMatrix::from_vec(dim, labels.len(), cells);
    let matrix = SampleMatrix::from_labeled_columns(values, &labels)?;
    let grouped_labels = matrix.labels();
    Ok((matrix, grouped_labels))
}

/// Writes a dataset as labeled CSV with feature columns `f0..f{D-1}`.
pub fn write_csv_dataset(path: impl AsRef<Path>, matrix: &SampleMatrix) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let mut header = vec!["label".to_string()];
    header.extend((0..matrix.dim()).map(|i| format!("f{i}")));
    writer.write_record(&header)?;
    for j in 0..matrix.len() {
        let mut record = vec![matrix.label_of(j).to_string()];
        record.extend(matrix.column(j).iter().map(|v| v.to_string()));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Loads an `NSCRMAT1` binary dataset; returns the class-grouped matrix and
/// the per-sample labels in grouped column order.
pub fn load_binary_dataset(path: impl AsRef<Path>) -> Result<(SampleMatrix, Vec<String>)> {
    let mut reader = BufReader::new(File::open(path.as_ref())?);

    let mut magic = [0u8; 8];
    reader.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::BadMagic);
    }
    let dim = read_u64(&mut reader)? as usize;
    let n = read_u64(&mut reader)? as usize;
    let cell_count = dim
        .checked_mul(n)
        .ok_or_else(|| Error::BadBinary("dimension overflow".into()))?;

    let mut cells = Vec::with_capacity(cell_count);
    let mut buf = [0u8; 8];
    for _ in 0..cell_count {
        reader.read_exact(&mut buf)?;
        cells.push(f64::from_le_bytes(buf));
    }

    let label_count = read_u64(&mut reader)? as usize;
    if label_count != n {
        return Err(Error::BadBinary(format!(
            "label block has {label_count} entries for {n} samples"
        )));
    }
    let mut labels = Vec::with_capacity(label_count);
    for _ in 0..label_count {
        let len = read_u64(&mut reader)? as usize;
        let mut bytes = vec![0u8; len];
        reader.read_exact(&mut bytes)?;
        labels.push(
            String::from_utf8(bytes)
                .map_err(|_| Error::BadBinary("label is not valid UTF-8".into()))?,
        );
    }
    if reader.read(&mut buf)? != 0 {
        return Err(Error::BadBinary("trailing bytes after label block".into()));
    }

    let values = DMatrix::from_vec(dim, n, cells);
    let matrix = SampleMatrix::from_labeled_columns(values, &labels)?;
    let grouped_labels = matrix.labels();
    Ok((matrix, grouped_labels))
}

/// Writes a dataset in the `NSCRMAT1` binary format.
pub fn write_binary_dataset(path: impl AsRef<Path>, matrix: &SampleMatrix) -> Result<()> {
    let mut writer = BufWriter::new(File::create(path.as_ref())?);
    writer.write_all(MAGIC)?;
    writer.write_all(&(matrix.dim() as u64).to_le_bytes())?;
    writer.write_all(&(matrix.len() as u64).to_le_bytes())?;
    for value in matrix.values().iter() {
        writer.write_all(&value.to_le_bytes())?;
    }
    writer.write_all(&(matrix.len() as u64).to_le_bytes())?;
    for j in 0..matrix.len() {
        let label = matrix.label_of(j).as_bytes();
        writer.write_all(&(label.len() as u64).to_le_bytes())?;
        writer.write_all(label)?;
    }
    writer.flush()?;
    Ok(())
}

fn read_u64(reader: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    reader.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}
