//! Compressed-row sparse matrices.

use super::FemError;

/// Square or rectangular CSR matrix. Column indices are strictly
/// increasing within each row; duplicate triplets are summed during
/// construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_counts = vec![0usize; n_rows];
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for &(r, c, v) in &triplets {
            assert!(r < n_rows && c < n_cols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_counts[r] += 1;
                last = Some((r, c));
            }
        }
        let mut row_offsets = vec![0usize; n_rows + 1];
        for r in 0..n_rows {
            row_offsets[r + 1] = row_offsets[r] + row_counts[r];
        }
        SparseMatrix {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries `(col, value)` of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_offsets[r];
        let hi = self.row_offsets[r + 1];
        self.col_indices[lo..hi]
            .iter()
            .zip(&self.values[lo..hi])
            .map(|(&c, &v)| (c, v))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let lo = self.row_offsets[r];
        let hi = self.row_offsets[r + 1];
        match self.col_indices[lo..hi].binary_search(&c) {
            Ok(k) => self.values[lo + k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, FemError> {
        if x.len() != self.n_cols {
            return Err(FemError::DimensionMismatch {
                rows: self.n_rows,
                cols: self.n_cols,
                len: x.len(),
            });
        }
        let mut y = vec![0.0; self.n_rows];
        for r in 0..self.n_rows {
            let lo = self.row_offsets[r];
            let hi = self.row_offsets[r + 1];
            let mut acc = 0.0;
            for k in lo..hi {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            y[r] = acc;
        }
        Ok(y)
    }

    /// Diagonal entries (zero where the pattern has no diagonal).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols))
            .map(|i| self.get(i, i))
            .collect()
    }

    /// Rewrites entries in place through `f(row, col, value)`.
    pub fn map_entries<F>(&self, f: F) -> SparseMatrix
    where
        F: Fn(usize, usize, f64) -> f64,
    {
        let mut out = self.clone();
        for r in 0..self.n_rows {
            let lo = out.row_offsets[r];
            let hi = out.row_offsets[r + 1];
            for k in lo..hi {
                out.values[k] = f(r, out.col_indices[k], out.values[k]);
            }
        }
        out
    }

    /// Largest absolute deviation from symmetry, for invariant checks.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n_cols]; self.n_rows];
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                dense[r][c] = v;
            }
        }
        dense
    }

    /// Column indices strictly increasing within each row.
    pub fn has_sorted_rows(&self) -> bool {
        (0..self.n_rows).all(|r| {
            let lo = self.row_offsets[r];
            let hi = self.row_offsets[r + 1];
            self.col_indices[lo..hi].windows(2).all(|w| w[0] < w[1])
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_merge_and_sort() {
        let a = SparseMatrix::from_triplets(
            2,
            2,
            vec![(1, 1, 2.0), (0, 0, 1.0), (1, 1, 3.0), (0, 1, -1.0)],
        );
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(0, 0), 1.0);
        assert_eq!(a.get(0, 1), -1.0);
        assert_eq!(a.get(1, 1), 5.0);
        assert_eq!(a.get(1, 0), 0.0);
        assert!(a.has_sorted_rows());
    }

    #[test]
    fn matvec_against_dense() {
        let a = SparseMatrix::from_triplets(
            3,
            3,
            vec![(0, 0, 2.0), (0, 2, 1.0), (1, 1, -1.0), (2, 0, 4.0), (2, 2, 3.0)],
        );
        let x = vec![1.0, 2.0, 3.0];
        let y = a.matvec(&x).unwrap();
        let dense = a.to_dense();
        for r in 0..3 {
            let expect: f64 = (0..3).map(|c| dense[r][c] * x[c]).sum();
            assert_eq!(y[r], expect);
        }
    }

    #[test]
    fn matvec_rejects_bad_length() {
        let a = SparseMatrix::identity(3);
        assert!(a.matvec(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn empty_rows_are_allowed() {
        let a = SparseMatrix::from_triplets(3, 3, vec![(2, 1, 5.0)]);
        assert_eq!(a.row(0).count(), 0);
        assert_eq!(a.row(1).count(), 0);
        assert_eq!(a.get(2, 1), 5.0);
    }
}
