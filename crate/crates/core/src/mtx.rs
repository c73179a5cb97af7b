//! Matrix Market I/O.
//!
//! Reads array and coordinate files, general and symmetric, and writes
//! array-format files with 17 significant digits so a save/load round trip
//! is bit-exact. Vectors travel as one-column array files.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Vector};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Array,
    Coordinate,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

struct Header {
    format: Format,
    symmetry: Symmetry,
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::MtxParse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn parse_header(path: &Path, line: &str) -> Result<Header> {
    let mut tokens = line.split_whitespace();
    let banner = tokens.next().unwrap_or("");
    if !banner.eq_ignore_ascii_case("%%MatrixMarket") {
        return Err(parse_err(path, 1, "missing %%MatrixMarket banner"));
    }
    let object = tokens.next().unwrap_or("").to_ascii_lowercase();
    if object != "matrix" {
        return Err(parse_err(path, 1, format!("unsupported object '{object}'")));
    }
    let format = match tokens.next().unwrap_or("").to_ascii_lowercase().as_str() {
        "array" => Format::Array,
        "coordinate" => Format::Coordinate,
        other => return Err(parse_err(path, 1, format!("unsupported format '{other}'"))),
    };
    let field = tokens.next().unwrap_or("").to_ascii_lowercase();
    if field != "real" && field != "integer" {
        return Err(parse_err(path, 1, format!("unsupported field '{field}'")));
    }
    let symmetry = match tokens.next().unwrap_or("").to_ascii_lowercase().as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => {
            return Err(parse_err(path, 1, format!("unsupported symmetry '{other}'")));
        }
    };
    Ok(Header { format, symmetry })
}

fn parse_value(path: &Path, line_no: usize, token: &str) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(path, line_no, format!("bad numeric value '{token}'")))?;
    if !v.is_finite() {
        return Err(Error::NonFiniteEntry {
            path: path.to_path_buf(),
            line: line_no,
        });
    }
    Ok(v)
}

/// Raw load: header, size line, dense row-major data. Shared by the matrix
/// and vector loaders.
fn load_dense(path: &Path) -> Result<(usize, usize, Vec<f64>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(i, l)| *i == 1 || (!l.trim().is_empty() && !l.trim_start().starts_with('%')));

    let (_, first) = lines.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let header = parse_header(path, first)?;

    let (size_no, size_line) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing size line"))?;
    let sizes: Vec<&str> = size_line.split_whitespace().collect();

    match header.format {
        Format::Array => {
            if sizes.len() != 2 {
                return Err(parse_err(path, size_no, "array size line needs 'rows cols'"));
            }
            let rows: usize = sizes[0]
                .parse()
                .map_err(|_| parse_err(path, size_no, "bad row count"))?;
            let cols: usize = sizes[1]
                .parse()
                .map_err(|_| parse_err(path, size_no, "bad column count"))?;
            if rows == 0 || cols == 0 {
                return Err(parse_err(path, size_no, "dimensions must be positive"));
            }
            if header.symmetry == Symmetry::Symmetric && rows != cols {
                return Err(Error::NotSquare {
                    path: path.to_path_buf(),
                    rows,
                    cols,
                });
            }
            let mut data = vec![0.0; rows * cols];
            let expected = match header.symmetry {
                Symmetry::General => rows * cols,
                // Symmetric array files store the lower triangle, column-major.
                Symmetry::Symmetric => rows * (rows + 1) / 2,
            };
            let mut seen = 0usize;
            let mut col = 0usize;
            let mut row = 0usize;
            if header.symmetry == Symmetry::General {
                // Column-major fill.
                for (line_no, line) in &mut lines {
                    for token in line.split_whitespace() {
                        if seen >= expected {
                            return Err(parse_err(path, line_no, "too many entries"));
                        }
                        let v = parse_value(path, line_no, token)?;
                        let r = seen % rows;
                        let c = seen / rows;
                        data[r * cols + c] = v;
                        seen += 1;
                    }
                }
            } else {
                for (line_no, line) in &mut lines {
                    for token in line.split_whitespace() {
                        if seen >= expected {
                            return Err(parse_err(path, line_no, "too many entries"));
                        }
                        let v = parse_value(path, line_no, token)?;
                        data[row * cols + col] = v;
                        data[col * cols + row] = v;
                        seen += 1;
                        row += 1;
                        if row == rows {
                            col += 1;
                            row = col;
                        }
                    }
                }
            }
            if seen != expected {
                return Err(parse_err(
                    path,
                    size_no,
                    format!("expected {expected} entries, found {seen}"),
                ));
            }
            Ok((rows, cols, data))
        }
        Format::Coordinate => {
            if sizes.len() != 3 {
                return Err(parse_err(path, size_no, "coordinate size line needs 'rows cols nnz'"));
            }
            let rows: usize = sizes[0]
                .parse()
                .map_err(|_| parse_err(path, size_no, "bad row count"))?;
            let cols: usize = sizes[1]
                .parse()
                .map_err(|_| parse_err(path, size_no, "bad column count"))?;
            let nnz: usize = sizes[2]
                .parse()
                .map_err(|_| parse_err(path, size_no, "bad nonzero count"))?;
            if rows == 0 || cols == 0 {
                return Err(parse_err(path, size_no, "dimensions must be positive"));
            }
            // Unlisted entries are zero.
            let mut data = vec![0.0; rows * cols];
            let mut seen = 0usize;
            for (line_no, line) in &mut lines {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(parse_err(path, line_no, "coordinate entry needs 'i j value'"));
                }
                let i: usize = toks[0]
                    .parse()
                    .map_err(|_| parse_err(path, line_no, "bad row index"))?;
                let j: usize = toks[1]
                    .parse()
                    .map_err(|_| parse_err(path, line_no, "bad column index"))?;
                if i < 1 || i > rows || j < 1 || j > cols {
                    return Err(parse_err(path, line_no, "index out of range"));
                }
                let v = parse_value(path, line_no, toks[2])?;
                seen += 1;
                if seen > nnz {
                    return Err(parse_err(path, line_no, "more entries than the declared nnz"));
                }
                // Duplicates accumulate, matching assembly conventions.
                data[(i - 1) * cols + (j - 1)] += v;
                if header.symmetry == Symmetry::Symmetric && i != j {
                    data[(j - 1) * cols + (i - 1)] += v;
                }
            }
            if seen != nnz {
                return Err(parse_err(
                    path,
                    size_no,
                    format!("expected {nnz} entries, found {seen}"),
                ));
            }
            Ok((rows, cols, data))
        }
    }
}

/// Loads a square dense matrix from a Matrix Market file.
pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let (rows, cols, data) = load_dense(path)?;
    if rows != cols {
        return Err(Error::NotSquare {
            path: path.to_path_buf(),
            rows,
            cols,
        });
    }
    DenseMatrix::new(rows, data)
}

/// Formats with 17 significant digits: enough to reproduce any f64 exactly.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `a` as a general array-format file (column-major values).
pub fn save_matrix_market(a: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix array real general\n");
    let n = a.n();
    out.push_str(&format!("{n} {n}\n"));
    for j in 0..n {
        for i in 0..n {
            out.push_str(&fmt_f64(a.get(i, j)));
            out.push('\n');
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

/// Loads a vector stored as a one-column array-format file.
pub fn load_vector(path: impl AsRef<Path>) -> Result<Vector> {
    let path = path.as_ref();
    let (rows, cols, data) = load_dense(path)?;
    if cols != 1 {
        return Err(parse_err(path, 1, format!("expected one column, found {cols}")));
    }
    debug_assert_eq!(data.len(), rows);
    Ok(data)
}

/// Writes a vector as a one-column array-format file.
pub fn save_vector(v: &[f64], path: impl AsRef<Path>) -> Result<()> {
    if v.is_empty() {
        return Err(Error::ZeroVector);
    }
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix array real general\n");
    out.push_str(&format!("{} 1\n", v.len()));
    for x in v {
        if !x.is_finite() {
            return Err(Error::InvalidArgument("non-finite vector entry".into()));
        }
        out.push_str(&fmt_f64(*x));
        out.push('\n');
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}
