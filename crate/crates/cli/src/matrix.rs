use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;

/// Reads a square matrix written one row per line, entries separated by
/// whitespace or commas. Blank lines and `#` comments are skipped.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading matrix {}", path.display()))?;
    parse_matrix(&text).with_context(|| format!("parsing matrix {}", path.display()))
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().with_context(|| format!("bad entry `{s}`")))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        bail!("empty matrix");
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        bail!("row {} has {} entries, expected {n}", bad + 1, rows[bad].len());
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_square_matrices() {
        let m = parse_matrix("1 0\n# comment\n0, 1\n").unwrap();
        assert_eq!(m, DMatrix::identity(2, 2));
    }

    #[test]
    fn rejects_ragged_rows() {
        assert!(parse_matrix("1 0\n0\n").is_err());
        assert!(parse_matrix("1 0 0\n0 1 0\n").is_err());
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("1 x\n0 1").is_err());
    }
}
