//! Matrix Market coordinate (sparse) and array (dense vector) files.

use std::fmt::Write as _;
use std::path::Path;

use super::CsrMatrix;
use crate::{Complex64, Error, Result};

pub fn write_matrix_market(m: &CsrMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut s = String::with_capacity(48 * m.nnz() + 128);
    s.push_str("%%MatrixMarket matrix coordinate complex general\n");
    let _ = writeln!(s, "{} {} {}", m.n_rows, m.n_cols, m.nnz());
    for i in 0..m.n_rows {
        let (cols, vals) = m.row(i);
        for (&c, v) in cols.iter().zip(vals) {
            let _ = writeln!(s, "{} {} {:?} {:?}", i + 1, c + 1, v.re, v.im);
        }
    }
    std::fs::write(path, s)?;
    Ok(())
}

pub fn write_vector_market(v: &[Complex64], path: impl AsRef<Path>) -> Result<()> {
    let mut s = String::with_capacity(48 * v.len() + 64);
    s.push_str("%%MatrixMarket matrix array complex general\n");
    let _ = writeln!(s, "{} 1", v.len());
    for z in v {
        let _ = writeln!(s, "{:?} {:?}", z.re, z.im);
    }
    std::fs::write(path, s)?;
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
}

struct Header {
    coordinate: bool,
    field: Field,
    symmetry: Symmetry,
}

fn parse_header(line: &str, path: &Path) -> Result<Header> {
    let lower = line.to_ascii_lowercase();
    let f: Vec<&str> = lower.split_whitespace().collect();
    if f.len() != 5 || f[0] != "%%matrixmarket" || f[1] != "matrix" {
        return Err(Error::format(path, format!("bad Matrix Market header '{line}'")));
    }
    let coordinate = match f[2] {
        "coordinate" => true,
        "array" => false,
        other => return Err(Error::format(path, format!("unsupported format '{other}'"))),
    };
    let field = match f[3] {
        "real" | "integer" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(Error::format(path, format!("unsupported field '{other}'"))),
    };
    let symmetry = match f[4] {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => return Err(Error::format(path, format!("unsupported symmetry '{other}'"))),
    };
    Ok(Header {
        coordinate,
        field,
        symmetry,
    })
}

fn num<T: std::str::FromStr>(s: Option<&str>, path: &Path) -> Result<T> {
    let s = s.ok_or_else(|| Error::format(path, "missing field"))?;
    s.parse().map_err(|_| Error::format(path, format!("cannot parse '{s}'")))
}

fn read_body(path: &Path) -> Result<(Header, Vec<String>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = parse_header(lines.next().unwrap_or(""), path)?;
    let body = lines
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%'))
        .map(str::to_owned)
        .collect();
    Ok((header, body))
}

fn value<'a>(it: &mut impl Iterator<Item = &'a str>, field: Field, path: &Path) -> Result<Complex64> {
    let re = num::<f64>(it.next(), path)?;
    let im = if field == Field::Complex { num::<f64>(it.next(), path)? } else { 0.0 };
    Ok(Complex64::new(re, im))
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    let (h, body) = read_body(path)?;
    if !h.coordinate {
        return Err(Error::format(path, "expected a coordinate (sparse) matrix"));
    }
    let mut lines = body.iter();
    let size = lines.next().ok_or_else(|| Error::format(path, "missing size line"))?;
    let mut it = size.split_whitespace();
    let (rows, cols, nnz): (usize, usize, usize) = (num(it.next(), path)?, num(it.next(), path)?, num(it.next(), path)?);
    let mut triplets = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let l = lines.next().ok_or_else(|| Error::format(path, "fewer entries than declared"))?;
        let mut it = l.split_whitespace();
        let i: usize = num(it.next(), path)?;
        let j: usize = num(it.next(), path)?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(Error::format(path, format!("entry ({i}, {j}) out of range")));
        }
        let v = value(&mut it, h.field, path)?;
        triplets.push((i - 1, j - 1, v));
        if h.symmetry == Symmetry::Symmetric && i != j {
            triplets.push((j - 1, i - 1, v));
        }
    }
    CsrMatrix::from_triplets(rows, cols, &triplets)
}

pub fn read_vector_market(path: impl AsRef<Path>) -> Result<Vec<Complex64>> {
    let path = path.as_ref();
    let (h, body) = read_body(path)?;
    if h.coordinate {
        return Err(Error::format(path, "expected a dense array"));
    }
    let mut lines = body.iter();
    let size = lines.next().ok_or_else(|| Error::format(path, "missing size line"))?;
    let mut it = size.split_whitespace();
    let (rows, cols): (usize, usize) = (num(it.next(), path)?, num(it.next(), path)?);
    if cols != 1 {
        return Err(Error::format(path, format!("expected one column, found {cols}")));
    }
    (0..rows)
        .map(|_| {
            let l = lines.next().ok_or_else(|| Error::format(path, "fewer values than declared"))?;
            value(&mut l.split_whitespace(), h.field, path)
        })
        .collect()
}
