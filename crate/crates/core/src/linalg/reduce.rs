//! Sparse column reduction over a field.
//!
//! Columns are reduced against previously stored columns keyed by their last
//! nonzero row, the same scheme persistence software uses for boundary
//! matrices. Stored columns are scaled so their pivot entry is one.

use std::collections::HashMap;

use num_bigint::BigInt;

use super::field::Field;
use super::matrix::SparseIntMatrix;

pub type SparseVec<E> = Vec<(usize, E)>;

/// `a + c * b` for sorted sparse vectors.
pub fn axpy<F: Field>(field: &F, a: &[(usize, F::Elem)], c: &F::Elem, b: &[(usize, F::Elem)]) -> SparseVec<F::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, field.mul(c, &b[j].1)));
            j += 1;
        } else {
            let v = field.add(&a[i].1, &field.mul(c, &b[j].1));
            if !field.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn convert_column<F: Field>(field: &F, col: &[(usize, BigInt)]) -> SparseVec<F::Elem> {
    col.iter()
        .filter_map(|(i, v)| {
            let e = field.from_int(v);
            (!field.is_zero(&e)).then_some((*i, e))
        })
        .collect()
}

pub struct ColumnReducer<'f, F: Field> {
    field: &'f F,
    pivot_of_row: HashMap<usize, usize>,
    stored: Vec<SparseVec<F::Elem>>,
    track: bool,
    stored_ops: Vec<SparseVec<F::Elem>>,
    pushed: usize,
}

impl<'f, F: Field> ColumnReducer<'f, F> {
    pub fn new(field: &'f F) -> Self {
        ColumnReducer {
            field,
            pivot_of_row: HashMap::new(),
            stored: Vec::new(),
            track: false,
            stored_ops: Vec::new(),
            pushed: 0,
        }
    }

    /// Records which combination of input columns produced each stored column,
    /// so that columns reducing to zero yield kernel vectors.
    pub fn tracking(field: &'f F) -> Self {
        let mut r = Self::new(field);
        r.track = true;
        r
    }

    pub fn rank(&self) -> usize {
        self.stored.len()
    }

    /// Reduces `col`; returns the kernel combination when it reduces to zero
    /// (empty if not tracking) or `None` when it adds a new pivot.
    pub fn push(&mut self, mut col: SparseVec<F::Elem>) -> Option<SparseVec<F::Elem>> {
        let f = self.field;
        let index = self.pushed;
        self.pushed += 1;
        let mut ops: SparseVec<F::Elem> = if self.track { vec![(index, f.one())] } else { Vec::new() };
        while let Some((row, coeff)) = col.last().cloned() {
            match self.pivot_of_row.get(&row) {
                Some(&k) => {
                    let c = f.neg(&coeff);
                    col = axpy(f, &col, &c, &self.stored[k]);
                    if self.track {
                        ops = axpy(f, &ops, &c, &self.stored_ops[k]);
                    }
                }
                None => {
                    let inv = f.inv(&coeff);
                    for e in col.iter_mut() {
                        e.1 = f.mul(&e.1, &inv);
                    }
                    if self.track {
                        for e in ops.iter_mut() {
                            e.1 = f.mul(&e.1, &inv);
                        }
                    }
                    self.pivot_of_row.insert(row, self.stored.len());
                    self.stored.push(col);
                    if self.track {
                        self.stored_ops.push(ops);
                    }
                    return None;
                }
            }
        }
        Some(ops)
    }

    /// Whether `col` lies in the span of the stored columns.
    pub fn in_span(&self, mut col: SparseVec<F::Elem>) -> bool {
        let f = self.field;
        while let Some((row, coeff)) = col.last().cloned() {
            match self.pivot_of_row.get(&row) {
                Some(&k) => col = axpy(f, &col, &f.neg(&coeff), &self.stored[k]),
                None => return false,
            }
        }
        true
    }
}

pub fn rank_over<F: Field>(field: &F, m: &SparseIntMatrix) -> usize {
    let mut red = ColumnReducer::new(field);
    for col in m.columns() {
        red.push(convert_column(field, col));
    }
    red.rank()
}

/// Kernel basis over the field, one vector per column that reduces to zero.
pub fn kernel_over<F: Field>(field: &F, m: &SparseIntMatrix) -> Vec<SparseVec<F::Elem>> {
    let mut red = ColumnReducer::tracking(field);
    m.columns().iter().filter_map(|col| red.push(convert_column(field, col))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{PrimeField, Rationals};

    #[test]
    fn ranks_over_different_fields() {
        let m = SparseIntMatrix::from_dense(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(rank_over(&Rationals, &m), 2);
        assert_eq!(rank_over(&PrimeField::new(2).unwrap(), &m), 1);
        assert_eq!(rank_over(&PrimeField::new(3).unwrap(), &m), 1);
        assert_eq!(rank_over(&PrimeField::new(5).unwrap(), &m), 2);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = SparseIntMatrix::from_dense(&[vec![1, 1, 2], vec![0, 1, 1]]);
        let ker = kernel_over(&Rationals, &m);
        assert_eq!(ker.len(), 1);
        let v = &ker[0];
        for row in m.transpose().columns() {
            let mut s = Rationals.zero();
            for (j, a) in row {
                if let Some((_, x)) = v.iter().find(|e| e.0 == *j) {
                    s = Rationals.add(&s, &Rationals.mul(&Rationals.from_int(a), x));
                }
            }
            assert!(Rationals.is_zero(&s));
        }
    }
}
