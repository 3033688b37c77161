//! Dense complex matrices with row-major storage.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite values.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix("dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry at ({}, {})",
                k / cols + 1,
                k % cols + 1
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Diagonal matrix with entries `e^{i θ_k}`.
    pub fn phase_diagonal(phases: &[f64]) -> Self {
        let mut m = Self::zeros(phases.len(), phases.len());
        for (k, &p) in phases.iter().enumerate() {
            m[(k, k)] = C64::from_polar(1.0, p);
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Max-norm of the elementwise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// `‖U†U − I‖_max`; `None` for non-square input.
    pub fn unitarity_defect(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let p = self.adjoint().matmul(self).ok()?;
        p.max_abs_diff(&Self::identity(self.rows)).ok()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect().is_some_and(|d| d <= tol)
    }

    /// Submatrix built from the given row and column indices (0-based,
    /// repetitions allowed).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// Swaps two rows (0-based).
    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on incompatible shapes; use [`ComplexMatrix::matmul`] to get an error instead.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("incompatible matrix shapes")
    }
}

/// Plain-text matrix files: one row per line, entries separated by
/// whitespace, each entry `re,im` (or a bare real number); `#` starts a
/// comment.
impl ComplexMatrix {
    pub fn parse_text(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse { path: origin.to_string(), line, msg };
        let mut data = Vec::new();
        let mut cols = None;
        let mut rows = 0;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut n = 0;
            for tok in line.split_whitespace() {
                let (re, im) = tok.split_once(',').unwrap_or((tok, "0"));
                let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| err(k + 1, format!("bad entry {tok:?}")));
                let z = C64::new(parse(re)?, parse(im)?);
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(err(k + 1, format!("non-finite entry {tok:?}")));
                }
                data.push(z);
                n += 1;
            }
            match cols {
                None => cols = Some(n),
                Some(c) if c != n => return Err(err(k + 1, format!("row has {n} entries, expected {c}"))),
                _ => {}
            }
            rows += 1;
        }
        let cols = cols.ok_or_else(|| err(1, "no matrix rows".into()))?;
        Self::from_rows(rows, cols, data)
    }

    pub fn read_text(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_text(&text, &path.display().to_string())
    }

    /// Round-trip exact text form accepted by [`ComplexMatrix::parse_text`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|z| format!("{},{}", z.re, z.im)).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "[{}]", row.join("  "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let err = ComplexMatrix::from_rows(1, 2, vec![C64::new(1.0, 0.0), C64::new(f64::NAN, 0.0)]);
        assert!(matches!(err, Err(Error::InvalidMatrix(_))));
    }

    #[test]
    fn rejects_wrong_length() {
        assert!(ComplexMatrix::from_rows(2, 2, vec![C64::new(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn identity_is_unitary() {
        assert_eq!(ComplexMatrix::identity(4).unitarity_defect(), Some(0.0));
    }

    #[test]
    fn select_and_swap() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| C64::new((3 * i + j) as f64, 0.0));
        let s = m.select(&[2, 0], &[1]);
        assert_eq!(s[(0, 0)].re, 7.0);
        assert_eq!(s[(1, 0)].re, 1.0);
        let mut w = m.clone();
        w.swap_rows(0, 2);
        assert_eq!(w.row(0), m.row(2));
    }

    #[test]
    fn text_round_trip_and_errors() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| C64::new(i as f64 / 3.0, -(j as f64) * 0.1));
        assert_eq!(ComplexMatrix::parse_text(&m.to_text(), "m").unwrap(), m);
        let bare = ComplexMatrix::parse_text("# header\n1 0\n0 1 # tail\n", "m").unwrap();
        assert_eq!(bare, ComplexMatrix::identity(2));
        match ComplexMatrix::parse_text("1,0 0\n0 1,x\n", "bad.txt") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(ComplexMatrix::parse_text("1 0\n1\n", "m"), Err(Error::Parse { line: 2, .. })));
        assert!(ComplexMatrix::parse_text("# nothing\n", "m").is_err());
    }
}
