use crate::error::{Error, Result};

/// Borrowed view of one sparse column.
#[derive(Debug, Clone, Copy)]
pub struct SparseVector<'a> {
    pub indices: &'a [usize],
    pub values: &'a [f64],
}

impl<'a> SparseVector<'a> {
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + 'a {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, x)| x * dense[i]).sum()
    }

    pub fn sq_norm(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum()
    }

    /// `dense += scale * self`
    pub fn axpy(&self, scale: f64, dense: &mut [f64]) {
        for (i, x) in self.iter() {
            dense[i] += scale * x;
        }
    }
}

/// Compressed sparse column matrix.
///
/// Row indices inside a column are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    nrows: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    pub fn empty(nrows: usize) -> Self {
        CscMatrix {
            nrows,
            col_ptr: vec![0],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a matrix from per-column `(row, value)` lists.
    pub fn from_columns<I>(nrows: usize, columns: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<(usize, f64)>>,
    {
        let mut m = CscMatrix::empty(nrows);
        for col in columns {
            m.push_column(&col)?;
        }
        Ok(m)
    }

    /// Builds a matrix from dense columns, storing only nonzero entries.
    pub fn from_dense_columns(nrows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        CscMatrix::from_columns(
            nrows,
            columns.iter().map(|c| {
                c.iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0.0)
                    .map(|(i, &x)| (i, x))
                    .collect::<Vec<_>>()
            }),
        )
    }

    pub(crate) fn push_column(&mut self, entries: &[(usize, f64)]) -> Result<()> {
        let mut prev: Option<usize> = None;
        for &(row, _) in entries {
            if row >= self.nrows {
                return Err(Error::InvalidArgument(format!(
                    "row index {row} out of range for {} rows",
                    self.nrows
                )));
            }
            if prev.is_some_and(|p| row <= p) {
                return Err(Error::InvalidArgument(format!(
                    "row indices must be strictly increasing within a column (got {row} after {})",
                    prev.unwrap_or_default()
                )));
            }
            prev = Some(row);
        }
        self.row_idx.extend(entries.iter().map(|e| e.0));
        self.values.extend(entries.iter().map(|e| e.1));
        self.col_ptr.push(self.row_idx.len());
        Ok(())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.col_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    pub fn column(&self, j: usize) -> SparseVector<'_> {
        let (lo, hi) = (self.col_ptr[j], self.col_ptr[j + 1]);
        SparseVector {
            indices: &self.row_idx[lo..hi],
            values: &self.values[lo..hi],
        }
    }

    pub fn columns(&self) -> impl Iterator<Item = SparseVector<'_>> {
        (0..self.ncols()).map(move |j| self.column(j))
    }

    /// `self * x` (length `nrows`).
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols(), "mul_vec dimension");
        let mut out = vec![0.0; self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                self.column(j).axpy(xj, &mut out);
            }
        }
        out
    }

    /// `self^T * y` (length `ncols`).
    pub fn tmul_vec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.nrows, "tmul_vec dimension");
        self.columns().map(|c| c.dot(y)).collect()
    }

    pub fn transpose(&self) -> CscMatrix {
        let ncols = self.ncols();
        let mut counts = vec![0usize; self.nrows + 1];
        for &r in &self.row_idx {
            counts[r + 1] += 1;
        }
        for i in 0..self.nrows {
            counts[i + 1] += counts[i];
        }
        let col_ptr = counts.clone();
        let mut next = counts;
        let mut row_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        // Visiting source columns in order keeps the output rows sorted.
        for j in 0..ncols {
            for (r, x) in self.column(j).iter() {
                let pos = next[r];
                row_idx[pos] = j;
                values[pos] = x;
                next[r] += 1;
            }
        }
        CscMatrix {
            nrows: ncols,
            col_ptr,
            row_idx,
            values,
        }
    }

    /// New matrix made of the selected columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> CscMatrix {
        let mut m = CscMatrix::empty(self.nrows);
        for &j in cols {
            let c = self.column(j);
            m.row_idx.extend_from_slice(c.indices);
            m.values.extend_from_slice(c.values);
            m.col_ptr.push(m.row_idx.len());
        }
        m
    }

    /// Applies `f(row, col, value)` to every stored entry.
    pub fn map_values(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> CscMatrix {
        let mut out = self.clone();
        for j in 0..self.ncols() {
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                out.values[k] = f(self.row_idx[k], j, self.values[k]);
            }
        }
        out
    }

    pub fn to_dense_columns(&self) -> Vec<Vec<f64>> {
        self.columns()
            .map(|c| {
                let mut d = vec![0.0; self.nrows];
                for (i, x) in c.iter() {
                    d[i] = x;
                }
                d
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CscMatrix {
        // [[1, 0, 2],
        //  [0, 3, 0]]
        CscMatrix::from_columns(2, vec![vec![(0, 1.0)], vec![(1, 3.0)], vec![(0, 2.0)]]).unwrap()
    }

    #[test]
    fn products_match_dense() {
        let m = sample();
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, 3.0]);
        assert_eq!(m.tmul_vec(&[1.0, 2.0]), vec![1.0, 6.0, 2.0]);
    }

    #[test]
    fn transpose_twice_is_identity() {
        let m = sample();
        let t = m.transpose();
        assert_eq!(t.nrows(), 3);
        assert_eq!(t.ncols(), 2);
        assert_eq!(t.column(0).indices, &[0, 2]);
        assert_eq!(t.transpose(), m);
    }

    #[test]
    fn rejects_bad_columns() {
        assert!(CscMatrix::from_columns(2, vec![vec![(2, 1.0)]]).is_err());
        assert!(CscMatrix::from_columns(3, vec![vec![(1, 1.0), (1, 2.0)]]).is_err());
        assert!(CscMatrix::from_columns(3, vec![vec![(2, 1.0), (1, 2.0)]]).is_err());
    }
}
