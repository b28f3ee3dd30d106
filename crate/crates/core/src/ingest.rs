//! CSV input and coordinate-file output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{DataMatrix, Matrix};

/// Numeric table plus the optional label column.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub data: DataMatrix,
    pub labels: Option<Vec<String>>,
    pub header: Option<Vec<String>>,
}

/// Reads a comma-separated numeric table. Every column except `label_column`
/// must parse as a finite number; row numbers in errors are 1-based file lines.
pub fn ingest_csv(path: &Path, has_header: bool, label_column: Option<usize>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;

    let header = if has_header {
        let h = reader.headers().map_err(|e| csv_error(path, e))?;
        Some(h.iter().map(str::to_owned).collect::<Vec<_>>())
    } else {
        None
    };

    let mut width: Option<usize> = header.as_ref().map(Vec::len);
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(rows + 1, |p| p.line() as usize);
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        match width {
            Some(w) if w != record.len() => {
                return Err(Error::MalformedInput {
                    path: path.to_owned(),
                    row: line,
                    reason: format!("{} fields, expected {w}", record.len()),
                })
            }
            None => width = Some(record.len()),
            _ => {}
        }
        if let Some(lc) = label_column {
            if lc >= record.len() {
                return Err(Error::MalformedInput {
                    path: path.to_owned(),
                    row: line,
                    reason: format!("label column {lc} out of range for {} fields", record.len()),
                });
            }
        }
        for (col, cell) in record.iter().enumerate() {
            if Some(col) == label_column {
                labels.push(cell.to_owned());
                continue;
            }
            let v: f64 = cell.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| {
                Error::ParseError { path: path.to_owned(), row: line, col: col + 1, cell: cell.to_owned() }
            })?;
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::EmptyInput(path.to_owned()));
    }
    let cols = values.len() / rows;
    if cols == 0 {
        return Err(Error::MalformedInput {
            path: path.to_owned(),
            row: 1,
            reason: "no numeric columns".into(),
        });
    }
    let data = DataMatrix::new(Matrix::from_row_major(rows, cols, values)?)?;
    let header = header.map(|h| {
        h.into_iter().enumerate().filter(|(i, _)| Some(*i) != label_column).map(|(_, s)| s).collect()
    });
    Ok(Dataset { data, labels: label_column.map(|_| labels), header })
}

/// Writes a matrix as CSV with 17 significant digits, optionally followed by a label column.
pub fn write_coordinates(
    path: &Path,
    header: &[String],
    m: &Matrix,
    labels: Option<&[String]>,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_coordinates_to(&mut out, header, m, labels)?;
    out.flush()?;
    Ok(())
}

pub fn write_coordinates_to<W: Write>(
    out: &mut W,
    header: &[String],
    m: &Matrix,
    labels: Option<&[String]>,
) -> Result<()> {
    let mut head = header.join(",");
    if labels.is_some() {
        head.push_str(",label");
    }
    writeln!(out, "{head}")?;
    for i in 0..m.nrows() {
        let mut line = m.row(i).iter().map(|v| format_sig17(*v)).collect::<Vec<_>>().join(",");
        if let Some(l) = labels {
            line.push(',');
            line.push_str(&l[i]);
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn format_sig17(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::MalformedInput { path: path.to_owned(), row, reason: format!("{other:?}") },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn temp_csv(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn headerless_numeric_file() {
        let f = temp_csv("1,2\n3,4\n");
        let ds = ingest_csv(f.path(), false, None).unwrap();
        assert_eq!(ds.data.matrix().as_slice(), &[1.0, 2.0, 3.0, 4.0]);
        assert!(ds.labels.is_none());
    }

    #[test]
    fn crlf_and_labels() {
        let f = temp_csv("a,b,kind\r\n1,2,x\r\n3,4,y\r\n");
        let ds = ingest_csv(f.path(), true, Some(2)).unwrap();
        assert_eq!(ds.data.matrix().shape(), (2, 2));
        assert_eq!(ds.labels.unwrap(), vec!["x", "y"]);
        assert_eq!(ds.header.unwrap(), vec!["a", "b"]);
    }

    #[test]
    fn na_cell_is_a_parse_error() {
        let f = temp_csv("a,b\n1,2\n3,NA\n");
        match ingest_csv(f.path(), true, None) {
            Err(Error::ParseError { row, col, cell, .. }) => {
                assert_eq!((row, col, cell.as_str()), (3, 2, "NA"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_row_is_malformed() {
        let f = temp_csv("1,2\n3,4,5\n");
        assert!(matches!(ingest_csv(f.path(), false, None), Err(Error::MalformedInput { row: 2, .. })));
    }

    #[test]
    fn empty_file() {
        let f = temp_csv("");
        assert!(matches!(ingest_csv(f.path(), false, None), Err(Error::EmptyInput(_))));
        let f = temp_csv("a,b\n");
        assert!(matches!(ingest_csv(f.path(), true, None), Err(Error::EmptyInput(_))));
    }
}
