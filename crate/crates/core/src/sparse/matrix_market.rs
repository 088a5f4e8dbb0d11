//! MatrixMarket coordinate format.
//!
//! Writing always produces `coordinate complex general`; reading accepts
//! real, integer, complex and pattern fields with general or symmetric
//! storage.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::{SparseMatrix, Triplets};
use crate::error::{Error, Result};

pub const HEADER: &str = "%%MatrixMarket matrix coordinate complex general";

pub fn write_matrix_market(a: &SparseMatrix, path: &Path) -> Result<()> {
    let mut s = String::with_capacity(48 * a.nnz() + 128);
    s.push_str(HEADER);
    s.push('\n');
    let _ = writeln!(s, "{} {} {}", a.dim(), a.dim(), a.nnz());
    for (i, j, v) in a.iter() {
        // Display for f64 is the shortest string that round-trips
        let _ = writeln!(s, "{} {} {} {}", i + 1, j + 1, v.re, v.im);
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
    Pattern,
}

pub fn read_matrix_market(path: &Path) -> Result<SparseMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };

    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(1, format!("bad header {header:?}")));
    }
    if tokens[2] != "coordinate" {
        return Err(err(1, "only coordinate format is supported".into()));
    }
    let field = match tokens[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        f => return Err(err(1, format!("unsupported field {f:?}"))),
    };
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        s => return Err(err(1, format!("unsupported symmetry {s:?}"))),
    };

    let mut body = lines.filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('%'));
    let (ln, size) = body.next().ok_or_else(|| err(2, "missing size line".into()))?;
    let size: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(ln, format!("bad size field {t:?}"))))
        .collect::<Result<_>>()?;
    let [rows, cols, nnz] = size[..] else {
        return Err(err(ln, "size line needs three fields".into()));
    };
    if rows != cols {
        return Err(err(ln, format!("matrix is {rows}x{cols}, expected square")));
    }

    let mut t = Triplets::with_capacity(rows, if symmetric { 2 * nnz } else { nnz });
    let mut seen = 0;
    for (ln, line) in body {
        let f: Vec<&str> = line.split_whitespace().collect();
        let need = match field {
            Field::Pattern => 2,
            Field::Real => 3,
            Field::Complex => 4,
        };
        if f.len() < need {
            return Err(err(ln, format!("expected {need} fields")));
        }
        let idx = |s: &str| -> Result<usize> {
            let v: usize = s.parse().map_err(|_| err(ln, format!("bad index {s:?}")))?;
            if v == 0 || v > rows {
                return Err(err(ln, format!("index {v} out of range")));
            }
            Ok(v - 1)
        };
        let num = |s: &str| -> Result<f64> { s.parse().map_err(|_| err(ln, format!("bad number {s:?}"))) };
        let (i, j) = (idx(f[0])?, idx(f[1])?);
        let v = match field {
            Field::Pattern => Complex64::new(1.0, 0.0),
            Field::Real => Complex64::new(num(f[2])?, 0.0),
            Field::Complex => Complex64::new(num(f[2])?, num(f[3])?),
        };
        t.push(i, j, v);
        if symmetric && i != j {
            t.push(j, i, v);
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(err(0, format!("expected {nnz} entries, found {seen}")));
    }
    t.compress()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_expected_header_and_one_based_indices() {
        let mut t = Triplets::new(2);
        t.push(1, 0, Complex64::new(1.5, -2.0));
        let a = t.compress().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.mtx");
        write_matrix_market(&a, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, format!("{HEADER}\n2 2 1\n2 1 1.5 -2\n"));
    }

    #[test]
    fn reads_real_symmetric() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.mtx");
        std::fs::write(
            &path,
            "%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 2\n1 1 4\n3 1 -1\n",
        )
        .unwrap();
        let a = read_matrix_market(&path).unwrap();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(0, 2), Complex64::new(-1.0, 0.0));
        assert_eq!(a.get(2, 0), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn rejects_malformed_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.mtx");
        for body in [
            "%%MatrixMarket matrix array real general\n1 1\n1\n",
            "%%MatrixMarket matrix coordinate complex general\n2 3 0\n",
            "%%MatrixMarket matrix coordinate complex general\n2 2 1\n3 1 1 0\n",
            "%%MatrixMarket matrix coordinate complex general\n2 2 2\n1 1 1 0\n",
        ] {
            std::fs::write(&path, body).unwrap();
            assert!(read_matrix_market(&path).is_err(), "{body}");
        }
    }
}
