//! Dense integer matrices with checked `i64` arithmetic.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape("matrix dimensions must be positive".into()));
        }
        if rows * cols != entries.len() {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(IntMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        IntMatrix::new(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0);
        IntMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    fn require_square(&self, op: &str) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "{op} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a.checked_mul(other.get(k, j));
                    let sum = prod.and_then(|p| out.get(i, j).checked_add(p));
                    match sum {
                        Some(v) => out.set(i, j, v),
                        None => {
                            return Err(Error::MatrixOverflow {
                                op: "matrix product",
                                row: i,
                                col: j,
                            })
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).try_fold(0i64, |acc, (&a, &b)| {
                    a.checked_mul(b)
                        .and_then(|p| acc.checked_add(p))
                        .ok_or(Error::MatrixOverflow {
                            op: "matrix-vector product",
                            row: i,
                            col: 0,
                        })
                })
            })
            .collect()
    }

    /// Binary exponentiation; `pow(0)` is the identity.
    pub fn pow(&self, mut k: u64) -> Result<IntMatrix> {
        self.require_square("matrix power")?;
        let mut acc = IntMatrix::identity(self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(
                "subtraction of differently shaped matrices".into(),
            ));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v =
                    self.get(i, j)
                        .checked_sub(other.get(i, j))
                        .ok_or(Error::MatrixOverflow {
                            op: "matrix difference",
                            row: i,
                            col: j,
                        })?;
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    pub fn add_scaled_identity(&self, scale: i64) -> Result<IntMatrix> {
        self.require_square("identity shift")?;
        let mut out = self.clone();
        for i in 0..self.rows {
            let v = out
                .get(i, i)
                .checked_add(scale)
                .ok_or(Error::MatrixOverflow {
                    op: "identity shift",
                    row: i,
                    col: i,
                })?;
            out.set(i, i, v);
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    /// Exact determinant by Bareiss fraction-free elimination, with `i128`
    /// intermediates and row pivoting on zero pivots.
    pub fn det(&self) -> Result<i64> {
        self.require_square("determinant")?;
        let n = self.rows;
        let mut a: Vec<Vec<i128>> = (0..n)
            .map(|r| self.row(r).iter().map(|&v| v as i128).collect())
            .collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n.saturating_sub(1) {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&r| a[r][k] != 0) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let lhs = a[i][j].checked_mul(a[k][k]);
                    let rhs = a[i][k].checked_mul(a[k][j]);
                    let v = match (lhs, rhs) {
                        (Some(l), Some(r)) => l.checked_sub(r),
                        _ => None,
                    }
                    .ok_or(Error::MatrixOverflow {
                        op: "determinant",
                        row: i,
                        col: j,
                    })?;
                    // Bareiss: the division is exact.
                    a[i][j] = v / prev;
                }
                a[i][k] = 0;
            }
            prev = a[k][k];
        }
        let d = sign * a[n - 1][n - 1];
        i64::try_from(d).map_err(|_| Error::Overflow("determinant"))
    }

    pub fn is_unimodular(&self) -> Result<bool> {
        Ok(matches!(self.det()?, 1 | -1))
    }

    pub fn block_diag(blocks: &[IntMatrix]) -> Result<IntMatrix> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("block_diag of an empty list".into()));
        }
        for b in blocks {
            b.require_square("block_diag")?;
        }
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = IntMatrix::zeros(n, n);
        let mut offset = 0;
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out.set(offset + i, offset + j, b.get(i, j));
                }
            }
            offset += b.rows;
        }
        Ok(out)
    }

    /// Right-aligned columns, one row per line.
    pub fn to_aligned_text(&self) -> String {
        let width = self
            .entries
            .iter()
            .map(|v| v.to_string().len())
            .max()
            .unwrap_or(1);
        let mut out = String::new();
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|v| format!("{v:>width$}")).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_aligned_text())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<i64>>,
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        if raw.entries.len() != raw.rows {
            return Err(serde::de::Error::custom("row count does not match entries"));
        }
        let m = IntMatrix::from_rows(&raw.entries).map_err(serde::de::Error::custom)?;
        if m.cols != raw.cols {
            return Err(serde::de::Error::custom(
                "column count does not match entries",
            ));
        }
        Ok(m)
    }
}
