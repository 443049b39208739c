use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::product::BasisTag;

/// Real sparse matrix over a basis, stored row-compressed.
///
/// Entries are coalesced: at most one per `(row, col)`, columns ascending
/// within each row. Operators built by this crate are exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    tag: BasisTag,
}

impl SparseOperator {
    /// Assemble from coordinate triplets, summing duplicates and dropping
    /// entries that coalesce to exactly zero.
    pub fn from_triplets(
        dim: usize,
        tag: BasisTag,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|&&(r, c, _)| r >= dim || c >= dim) {
            return Err(Error::DimensionMismatch(format!(
                "triplet ({r}, {c}) outside a {dim}x{dim} operator"
            )));
        }
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            match rows[r].last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => rows[r].push((c, v)),
            }
        }
        Ok(Self::from_sorted_rows(dim, tag, rows))
    }

    /// Rows must already be sorted by column with no duplicates.
    pub(crate) fn from_sorted_rows(dim: usize, tag: BasisTag, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let nnz = rows.iter().map(Vec::len).sum();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v != 0.0 {
                    cols.push(c as u32);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
            tag,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    /// `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1])
                .map(move |k| (r, self.cols[k] as usize, self.vals[k]))
        })
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k] as usize, self.vals[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = &self.cols[self.row_ptr[r]..self.row_ptr[r + 1]];
        match span.binary_search(&(c as u32)) {
            Ok(k) => self.vals[self.row_ptr[r] + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|r| self.get(r, r)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.triplets().all(|(r, c, _)| r == c)
    }

    /// Exact (bitwise) symmetry check.
    pub fn is_symmetric(&self) -> bool {
        self.triplets().all(|(r, c, v)| self.get(c, r) == v)
    }

    /// Upper bound on the spectral radius (maximum absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| self.row(r).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `out = H·x` for a complex vector.
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.cols[k] as usize] * self.vals[k];
            }
            *o = acc;
        }
    }

    pub fn apply_real(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|r| self.row(r).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Write in matrix-market coordinate format with 1-based indices.
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.dim, self.dim, self.nnz())?;
        for (r, c, v) in self.triplets() {
            writeln!(w, "{} {} {:e}", r + 1, c + 1, v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coalesces_duplicates() {
        let op = SparseOperator::from_triplets(
            2,
            BasisTag(0),
            vec![(0, 1, 0.25), (1, 0, 0.5), (0, 1, 0.25), (1, 1, 1.0), (0, 0, 0.0)],
        )
        .unwrap();
        assert_eq!(op.nnz(), 3);
        assert_eq!(op.get(0, 1), 0.5);
        assert!(op.is_symmetric());
        assert!(!op.is_diagonal());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(SparseOperator::from_triplets(2, BasisTag(0), vec![(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn matrix_market_is_one_based() {
        let op = SparseOperator::from_triplets(2, BasisTag(0), vec![(1, 0, 2.0), (0, 1, 2.0)]).unwrap();
        let mut buf = Vec::new();
        op.write_matrix_market(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[1], "2 2 2");
        assert_eq!(lines[2], "1 2 2e0");
        assert_eq!(lines[3], "2 1 2e0");
    }
}
