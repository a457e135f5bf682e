use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sparse::FeatureMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Coordinate,
    Array,
}

/// Value field of a Matrix Market file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmField {
    Real,
    Integer,
    Pattern,
}

/// Storage symmetry of a Matrix Market file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmSymmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

struct Ctx<'a> {
    path: &'a Path,
}

impl Ctx<'_> {
    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::MatrixMarket {
            path: self.path.to_path_buf(),
            line,
            message: message.into(),
        }
    }
}

/// Reads a Matrix Market file into a [`FeatureMatrix`] (rows = samples).
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_matrix_market(BufReader::new(file), path)
}

/// Parses Matrix Market text; `path` is used only in error messages.
///
/// Supports coordinate and array formats with real, integer or pattern
/// values and general, symmetric or skew-symmetric storage. Pattern entries
/// become 1.0; symmetric storage is expanded.
pub fn parse_matrix_market<R: BufRead>(reader: R, path: &Path) -> Result<FeatureMatrix> {
    let ctx = Ctx { path };
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines
        .next()
        .ok_or_else(|| ctx.err(1, "empty file"))?;
    let header = header.map_err(|e| Error::io(path, e))?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(ctx.err(1, format!("malformed header `{header}`")));
    }
    let format = match tokens[2].as_str() {
        "coordinate" => Format::Coordinate,
        "array" => Format::Array,
        other => return Err(ctx.err(1, format!("unsupported format `{other}`"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "double" => MmField::Real,
        "integer" => MmField::Integer,
        "pattern" if format == Format::Coordinate => MmField::Pattern,
        other => return Err(ctx.err(1, format!("unsupported field type `{other}`"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => MmSymmetry::General,
        "symmetric" => MmSymmetry::Symmetric,
        "skew-symmetric" => MmSymmetry::SkewSymmetric,
        other => return Err(ctx.err(1, format!("unsupported symmetry `{other}`"))),
    };

    let mut data = lines.filter_map(|(n, l)| match l {
        Ok(s) => {
            let t = s.trim();
            if t.is_empty() || t.starts_with('%') {
                None
            } else {
                Some(Ok((n, t.to_string())))
            }
        }
        Err(e) => Some(Err(Error::io(path, e))),
    });

    let (size_line, size) = data.next().ok_or_else(|| ctx.err(1, "missing size line"))??;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| ctx.err(size_line, format!("bad size line `{size}`: {e}")))?;
    let expected_dims = if format == Format::Coordinate { 3 } else { 2 };
    if dims.len() != expected_dims {
        return Err(ctx.err(size_line, format!("size line needs {expected_dims} integers, got `{size}`")));
    }
    let (n_rows, n_cols) = (dims[0], dims[1]);
    if symmetry != MmSymmetry::General && n_rows != n_cols {
        return Err(ctx.err(size_line, "symmetric storage requires a square matrix"));
    }

    let parse_value = |line: usize, tok: Option<&str>| -> Result<f64> {
        let tok = tok.ok_or_else(|| ctx.err(line, "missing value"))?;
        let v = match field {
            MmField::Integer => tok
                .parse::<i64>()
                .map(|v| v as f64)
                .map_err(|e| ctx.err(line, format!("bad integer `{tok}`: {e}")))?,
            _ => tok
                .parse::<f64>()
                .map_err(|e| ctx.err(line, format!("bad value `{tok}`: {e}")))?,
        };
        if !v.is_finite() {
            return Err(ctx.err(line, format!("non-finite value `{tok}`")));
        }
        Ok(v)
    };

    let mut triplets = Vec::new();
    let mut push = |line: usize, i: usize, j: usize, v: f64| -> Result<()> {
        triplets.push((i, j, v));
        if i != j {
            match symmetry {
                MmSymmetry::General => {}
                MmSymmetry::Symmetric => triplets.push((j, i, v)),
                MmSymmetry::SkewSymmetric => triplets.push((j, i, -v)),
            }
        } else if symmetry == MmSymmetry::SkewSymmetric && v != 0.0 {
            return Err(ctx.err(line, "skew-symmetric matrix with a nonzero diagonal entry"));
        }
        Ok(())
    };

    match format {
        Format::Coordinate => {
            let nnz = dims[2];
            let mut count = 0;
            for item in data.by_ref() {
                let (line, text) = item?;
                count += 1;
                if count > nnz {
                    return Err(ctx.err(line, format!("more entries than the declared {nnz}")));
                }
                let mut it = text.split_whitespace();
                let mut index = |name: &str, bound: usize| -> Result<usize> {
                    let tok = it.next().ok_or_else(|| ctx.err(line, format!("missing {name} index")))?;
                    let k: usize = tok
                        .parse()
                        .map_err(|e| ctx.err(line, format!("bad {name} index `{tok}`: {e}")))?;
                    if k == 0 || k > bound {
                        return Err(ctx.err(line, format!("{name} index {k} outside 1..={bound}")));
                    }
                    Ok(k - 1)
                };
                let i = index("row", n_rows)?;
                let j = index("column", n_cols)?;
                if symmetry != MmSymmetry::General && j > i {
                    return Err(ctx.err(line, "entry above the diagonal in symmetric storage"));
                }
                let v = match field {
                    MmField::Pattern => 1.0,
                    _ => parse_value(line, it.next())?,
                };
                if it.next().is_some() {
                    return Err(ctx.err(line, "trailing tokens"));
                }
                push(line, i, j, v)?;
            }
            if count != nnz {
                return Err(ctx.err(size_line, format!("declared {nnz} entries but found {count}")));
            }
        }
        Format::Array => {
            // column-major; symmetric storage lists the lower triangle only
            let mut slots = Vec::new();
            for j in 0..n_cols {
                let start = match symmetry {
                    MmSymmetry::General => 0,
                    MmSymmetry::Symmetric => j,
                    MmSymmetry::SkewSymmetric => j + 1,
                };
                for i in start..n_rows {
                    slots.push((i, j));
                }
            }
            let mut next = slots.into_iter();
            let mut last_line = size_line;
            for item in data.by_ref() {
                let (line, text) = item?;
                last_line = line;
                for tok in text.split_whitespace() {
                    let (i, j) = next
                        .next()
                        .ok_or_else(|| ctx.err(line, "more values than the matrix holds"))?;
                    let v = parse_value(line, Some(tok))?;
                    if v != 0.0 {
                        push(line, i, j, v)?;
                    }
                }
            }
            if next.next().is_some() {
                return Err(ctx.err(last_line, "fewer values than the matrix holds"));
            }
        }
    }
    FeatureMatrix::from_triplets(n_rows, n_cols, &triplets).map_err(|e| ctx.err(0, e.to_string()))
}

/// Writes `x` in coordinate format.
///
/// `Pattern` requires every stored value to be 1; symmetric storage
/// requires a square symmetric matrix and writes the lower triangle.
/// Values are printed in shortest round-trip form.
pub fn write_matrix_market(
    path: impl AsRef<Path>,
    x: &FeatureMatrix,
    field: MmField,
    symmetry: MmSymmetry,
) -> Result<()> {
    let path = path.as_ref();
    let to_err = |message: String| Error::MatrixMarket {
        path: PathBuf::from(path),
        line: 0,
        message,
    };
    if symmetry == MmSymmetry::SkewSymmetric {
        return Err(to_err("writing skew-symmetric storage is not supported".into()));
    }
    if symmetry == MmSymmetry::Symmetric && (x.n_samples() != x.n_features() || *x != x.transpose()) {
        return Err(to_err("matrix is not symmetric".into()));
    }
    if field == MmField::Pattern && x.values().iter().any(|&v| v != 1.0) {
        return Err(to_err("pattern output needs all stored values equal to 1".into()));
    }
    if field == MmField::Integer && x.values().iter().any(|v| v.fract() != 0.0) {
        return Err(to_err("integer output needs integral values".into()));
    }

    let mut entries = Vec::with_capacity(x.nnz());
    for i in 0..x.n_samples() {
        let (cols, vals) = x.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if symmetry == MmSymmetry::General || j <= i {
                entries.push((i, j, v));
            }
        }
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let field_name = match field {
        MmField::Real => "real",
        MmField::Integer => "integer",
        MmField::Pattern => "pattern",
    };
    let sym_name = match symmetry {
        MmSymmetry::General => "general",
        _ => "symmetric",
    };
    let io = |e| Error::io(path, e);
    writeln!(w, "%%MatrixMarket matrix coordinate {field_name} {sym_name}").map_err(io)?;
    writeln!(w, "{} {} {}", x.n_samples(), x.n_features(), entries.len()).map_err(io)?;
    for (i, j, v) in entries {
        match field {
            MmField::Pattern => writeln!(w, "{} {}", i + 1, j + 1),
            MmField::Integer => writeln!(w, "{} {} {}", i + 1, j + 1, v as i64),
            MmField::Real => writeln!(w, "{} {} {}", i + 1, j + 1, v),
        }
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<FeatureMatrix> {
        parse_matrix_market(s.as_bytes(), Path::new("inline.mtx"))
    }

    #[test]
    fn coordinate_real_general() {
        let m = parse("%%MatrixMarket matrix coordinate real general\n% comment\n3 3 2\n1 1 2.5\n3 2 -1\n").unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.to_dense()[(2, 1)], -1.0);
    }

    #[test]
    fn symmetric_pattern_expands() {
        let m = parse("%%MatrixMarket matrix coordinate pattern symmetric\n3 3 3\n1 1\n2 1\n3 2\n").unwrap();
        assert_eq!(m.nnz(), 5);
        assert_eq!(m.to_dense()[(0, 1)], 1.0);
    }

    #[test]
    fn array_format() {
        let m = parse("%%MatrixMarket matrix array real general\n2 2\n1\n0\n3\n4\n").unwrap();
        assert_eq!(m.to_dense(), nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 3.0, 0.0, 4.0]));
        let s = parse("%%MatrixMarket matrix array integer symmetric\n2 2\n1\n2\n3\n").unwrap();
        assert_eq!(s.to_dense(), nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0]));
    }

    #[test]
    fn skew_symmetric() {
        let m = parse("%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 3\n").unwrap();
        assert_eq!(m.to_dense()[(0, 1)], -3.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = [
            ("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n", 1),
            ("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n", 2),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n", 3),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 x\n", 3),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1\n2 2 1\n", 4),
            ("%%NotMatrixMarket\n", 1),
        ];
        for (text, want) in bad {
            match parse(text) {
                Err(Error::MatrixMarket { line, .. }) => assert_eq!(line, want, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn pattern_symmetric_round_trip() {
        let m = FeatureMatrix::from_triplets(3, 3, &[(0, 0, 1.0), (0, 2, 1.0), (2, 0, 1.0), (1, 1, 1.0)]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.mtx");
        write_matrix_market(&p, &m, MmField::Pattern, MmSymmetry::Symmetric).unwrap();
        assert_eq!(read_matrix_market(&p).unwrap(), m);
    }

    #[test]
    fn real_round_trip_is_exact() {
        let m = FeatureMatrix::from_triplets(2, 3, &[(0, 0, 0.1), (1, 2, -1.0 / 3.0), (0, 1, 1e-300)]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.mtx");
        write_matrix_market(&p, &m, MmField::Real, MmSymmetry::General).unwrap();
        assert_eq!(read_matrix_market(&p).unwrap(), m);
    }
}
