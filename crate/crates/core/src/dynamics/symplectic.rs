use nalgebra::DMatrix;

use crate::error::{shape, Error, Result};

/// Canonical symplectic form `J = [[0, I], [-I, 0]]` of size `2n x 2n`.
pub fn canonical_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// Max-norm of `C J C^T - J`.
///
/// For integer matrices every product and sum is exact in `f64`, so a
/// symplectic integer matrix gives exactly zero.
pub fn check_symplectic(c: &DMatrix<f64>) -> Result<f64> {
    if c.nrows() != c.ncols() || c.nrows() % 2 != 0 || c.nrows() == 0 {
        return Err(shape(
            "square matrix of even dimension",
            format!("{}x{}", c.nrows(), c.ncols()),
        ));
    }
    let j = canonical_j(c.nrows() / 2);
    let r = c * &j * c.transpose() - &j;
    Ok(r.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// A linear symplectic change of coordinates `(x, y[, z], p_x, p_y[, p_z]) -> (q, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    entries: DMatrix<f64>,
    inverse: DMatrix<f64>,
    residual: f64,
}

/// Residual accepted by [`SymplecticMatrix::new`].
pub const SYMPLECTIC_TOL: f64 = 1e-12;

impl SymplecticMatrix {
    /// Validates `entries` and precomputes the inverse.
    ///
    /// The inverse is `-C` when `C^T = -C` holds exactly. Otherwise the
    /// symplectic identity `C^{-1} = -J C^T J` is used, which is exact for
    /// integer matrices; if that candidate fails `C C^{-1} = I` the LU inverse
    /// is taken.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let residual = check_symplectic(&entries)?;
        if residual > SYMPLECTIC_TOL || !residual.is_finite() {
            return Err(Error::SymplecticViolation { residual });
        }
        let n = entries.nrows();
        let inverse = if entries.transpose() == -&entries {
            -&entries
        } else {
            let j = canonical_j(n / 2);
            let candidate = -(&j * entries.transpose() * &j);
            let err = (&entries * &candidate - DMatrix::<f64>::identity(n, n)).amax();
            if err <= SYMPLECTIC_TOL {
                candidate
            } else {
                entries
                    .clone()
                    .try_inverse()
                    .ok_or(Error::SymplecticViolation { residual })?
            }
        };
        Ok(Self {
            entries,
            inverse,
            residual,
        })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(shape(format!("{n}x{n}"), "ragged rows"));
        }
        Self::new(DMatrix::from_fn(n, n, |i, k| rows[i][k]))
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Whether `C^T = C^{-1} = -C` holds exactly.
    pub fn is_antisymmetric_orthogonal(&self) -> bool {
        let t = self.entries.transpose();
        t == -&self.entries && t == self.inverse
    }

    /// Default 2-DoF coupling: `q1 = p_x, q2 = p_y, p1 = -x + p_x + p_y, p2 = -y + p_x + p_y`.
    pub fn coupled2_default() -> Self {
        Self::from_integer_rows(&COUPLED2_CATALOG[0].1)
    }

    /// Default 3-DoF coupling: `q_i = p_{x_i}`, `p_i = -x_i + p_x + p_y + p_z`.
    pub fn coupled3_default() -> Self {
        Self::from_integer_rows(&COUPLED3_CATALOG[0].1)
    }

    fn from_integer_rows<const D: usize>(rows: &[[i8; D]; D]) -> Self {
        let m = DMatrix::from_fn(D, D, |i, k| rows[i][k] as f64);
        Self::new(m).expect("catalog matrices are symplectic")
    }

    /// The three 4x4 and three 6x6 integer transforms of the catalog, by name.
    pub fn catalog() -> Vec<(&'static str, SymplecticMatrix)> {
        let mut out = Vec::new();
        for (name, rows) in COUPLED2_CATALOG.iter() {
            out.push((*name, Self::from_integer_rows(rows)));
        }
        for (name, rows) in COUPLED3_CATALOG.iter() {
            out.push((*name, Self::from_integer_rows(rows)));
        }
        out
    }
}

/// Raw integer entries of the 4x4 catalog, usable without any validation.
pub const COUPLED2_CATALOG: [(&str, [[i8; 4]; 4]); 3] = [
    (
        "c4a",
        [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 1, 1], [0, -1, 1, 1]],
    ),
    (
        "c4b",
        [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 1, 0], [0, -1, 0, 1]],
    ),
    (
        "c4c",
        [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 1], [0, -1, 1, 0]],
    ),
];

/// Raw integer entries of the 6x6 catalog.
pub const COUPLED3_CATALOG: [(&str, [[i8; 6]; 6]); 3] = [
    (
        "c6a",
        [
            [0, 0, 0, 1, 0, 0],
            [0, 0, 0, 0, 1, 0],
            [0, 0, 0, 0, 0, 1],
            [-1, 0, 0, 1, 1, 1],
            [0, -1, 0, 1, 1, 1],
            [0, 0, -1, 1, 1, 1],
        ],
    ),
    (
        "c6b",
        [
            [0, 0, 0, 1, 0, 0],
            [0, 0, 0, 0, 1, 0],
            [0, 0, 0, 0, 0, 1],
            [-1, 0, 0, 1, 0, 0],
            [0, -1, 0, 0, 1, 0],
            [0, 0, -1, 0, 0, 1],
        ],
    ),
    (
        "c6c",
        [
            [0, 0, 0, 1, 0, 0],
            [0, 0, 0, 0, 1, 0],
            [0, 0, 0, 0, 0, 1],
            [-1, 0, 0, 0, 1, 1],
            [0, -1, 0, 1, 0, 1],
            [0, 0, -1, 1, 1, 0],
        ],
    ),
];
