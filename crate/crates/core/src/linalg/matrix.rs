use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Column-major sparse matrix over ℤ. Columns are sorted by row index and never
/// store a zero.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, BigInt)>>,
}

impl SparseIntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseIntMatrix { rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        let columns = (0..n).map(|i| vec![(i, BigInt::one())]).collect();
        SparseIntMatrix { rows: n, cols: n, columns }
    }

    /// Builds from per-column entry lists; duplicates are summed and zeros
    /// removed.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, BigInt)>>) -> Result<Self> {
        let cols = columns.len();
        let columns = columns.into_iter().map(|c| normalize(rows, c)).collect::<Result<Vec<_>>>()?;
        Ok(SparseIntMatrix { rows, cols, columns })
    }

    pub fn from_triplets<I>(rows: usize, cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, BigInt)>,
    {
        let mut columns = vec![Vec::new(); cols];
        for (r, c, v) in entries {
            if c >= cols {
                return Err(Error::Dimension(format!("column {c} out of range {cols}")));
            }
            columns[c].push((r, v));
        }
        Self::from_columns(rows, columns)
    }

    /// Row-major dense input, mostly for tests.
    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let entries = rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (i, j, BigInt::from(v))));
        Self::from_triplets(r, c, entries).expect("rectangular dense input")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, BigInt)] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<(usize, BigInt)>] {
        &self.columns
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        match self.columns[c].binary_search_by_key(&r, |e| e.0) {
            Ok(k) => self.columns[c][k].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.columns.iter().enumerate().flat_map(|(j, col)| col.iter().map(move |(i, v)| (*i, j, v)))
    }

    pub fn transpose(&self) -> Self {
        let mut columns = vec![Vec::new(); self.rows];
        for (i, j, v) in self.iter() {
            columns[i].push((j, v.clone()));
        }
        SparseIntMatrix { rows: self.cols, cols: self.rows, columns }
    }

    pub fn mul(&self, rhs: &SparseIntMatrix) -> Result<SparseIntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let columns = rhs
            .columns
            .iter()
            .map(|col| {
                let mut acc: Vec<(usize, BigInt)> = Vec::new();
                for (k, a) in col {
                    for (i, b) in &self.columns[*k] {
                        acc.push((*i, a * b));
                    }
                }
                normalize(self.rows, acc).expect("in range")
            })
            .collect();
        Ok(SparseIntMatrix { rows: self.rows, cols: rhs.cols, columns })
    }

    /// `self * v` for a sparse column vector.
    pub fn apply(&self, v: &[(usize, BigInt)]) -> Vec<(usize, BigInt)> {
        let mut acc = Vec::new();
        for (k, a) in v {
            for (i, b) in &self.columns[*k] {
                acc.push((*i, a * b));
            }
        }
        normalize(self.rows, acc).expect("in range")
    }

    pub fn hstack(&self, other: &SparseIntMatrix) -> Result<SparseIntMatrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension("hstack with different row counts".into()));
        }
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        Ok(SparseIntMatrix { rows: self.rows, cols: columns.len(), columns })
    }

    pub fn select_columns(&self, which: &[usize]) -> SparseIntMatrix {
        let columns = which.iter().map(|&j| self.columns[j].clone()).collect();
        SparseIntMatrix { rows: self.rows, cols: which.len(), columns }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (i, j, v) in self.iter() {
            d[i][j] = v.clone();
        }
        d
    }

    pub fn from_dense_big(rows: usize, cols: usize, d: &[Vec<BigInt>]) -> Self {
        let columns = (0..cols)
            .map(|j| (0..rows).filter(|&i| !d[i][j].is_zero()).map(|i| (i, d[i][j].clone())).collect())
            .collect();
        SparseIntMatrix { rows, cols, columns }
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.iter().map(|(_, _, v)| v.abs()).max().unwrap_or_default()
    }
}

fn normalize(rows: usize, mut col: Vec<(usize, BigInt)>) -> Result<Vec<(usize, BigInt)>> {
    col.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, BigInt)> = Vec::with_capacity(col.len());
    for (r, v) in col {
        if r >= rows {
            return Err(Error::Dimension(format!("row {r} out of range {rows}")));
        }
        match out.last_mut() {
            Some((lr, lv)) if *lr == r => *lv += v,
            _ => out.push((r, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    Ok(out)
}

impl fmt::Debug for SparseIntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SparseIntMatrix {}x{}", self.rows, self.cols)?;
        if self.rows * self.cols <= 400 {
            for row in self.to_dense() {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                writeln!(f, "  [{}]", cells.join(" "))?;
            }
        }
        Ok(())
    }
}
