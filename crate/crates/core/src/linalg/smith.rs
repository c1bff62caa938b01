//! Smith normal form over ℤ and the kernels derived from it.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::field::{PrimeField, Ring};
use super::matrix::SparseIntMatrix;
use super::reduce::kernel_over;
use crate::error::Result;

/// Unimodular `u`, `v` with `u · M · v = diag(factors, 0, …)`, plus inverses.
#[derive(Clone, Debug)]
pub struct SmithTransforms {
    pub u: SparseIntMatrix,
    pub u_inv: SparseIntMatrix,
    pub v: SparseIntMatrix,
    pub v_inv: SparseIntMatrix,
}

#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Nonzero invariant factors, positive, each dividing the next.
    pub factors: Vec<BigInt>,
    pub transforms: Option<SmithTransforms>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

/// Smith form; transforms are computed densely and only when asked for.
pub fn smith(m: &SparseIntMatrix, with_transforms: bool) -> SmithForm {
    if with_transforms {
        let mut calc = DenseSmith::new(m.to_dense(), m.rows(), m.cols(), true);
        calc.run();
        calc.finish()
    } else {
        SmithForm { factors: smith_factors(m), transforms: None }
    }
}

struct DenseSmith {
    a: Vec<Vec<BigInt>>,
    m: usize,
    n: usize,
    track: bool,
    u: Vec<Vec<BigInt>>,
    u_inv: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    v_inv: Vec<Vec<BigInt>>,
}

fn dense_identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

impl DenseSmith {
    fn new(a: Vec<Vec<BigInt>>, m: usize, n: usize, track: bool) -> Self {
        let (u, u_inv, v, v_inv) = if track {
            (dense_identity(m), dense_identity(m), dense_identity(n), dense_identity(n))
        } else {
            (Vec::new(), Vec::new(), Vec::new(), Vec::new())
        };
        DenseSmith { a, m, n, track, u, u_inv, v, v_inv }
    }

    // row_i += c * row_j
    fn row_add(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for k in 0..self.n {
            if !self.a[j][k].is_zero() {
                let t = &self.a[j][k] * c;
                self.a[i][k] += t;
            }
        }
        if self.track {
            for k in 0..self.m {
                let t = &self.u[j][k] * c;
                self.u[i][k] += t;
                let t = &self.u_inv[k][i] * c;
                self.u_inv[k][j] -= t;
            }
        }
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if self.track {
            self.u.swap(i, j);
            for row in self.u_inv.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn row_negate(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        if self.track {
            for x in self.u[i].iter_mut() {
                *x = -&*x;
            }
            for row in self.u_inv.iter_mut() {
                row[i] = -&row[i];
            }
        }
    }

    // col_i += c * col_j
    fn col_add(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for k in 0..self.m {
            if !self.a[k][j].is_zero() {
                let t = &self.a[k][j] * c;
                self.a[k][i] += t;
            }
        }
        if self.track {
            for k in 0..self.n {
                let t = &self.v[k][j] * c;
                self.v[k][i] += t;
                let t = &self.v_inv[i][k] * c;
                self.v_inv[j][k] -= t;
            }
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        if self.track {
            for row in self.v.iter_mut() {
                row.swap(i, j);
            }
            self.v_inv.swap(i, j);
        }
    }

    fn smallest_in(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.m {
            for j in t..self.n {
                let x = &self.a[i][j];
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < self.a[bi][bj].abs()) {
                    best = Some((i, j));
                    if x.abs().is_one() {
                        return best;
                    }
                }
            }
        }
        best
    }

    fn run(&mut self) {
        let mut t = 0;
        while t < self.m.min(self.n) {
            let Some((pi, pj)) = self.smallest_in(t) else { break };
            self.row_swap(t, pi);
            self.col_swap(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..self.m {
                    if !self.a[i][t].is_zero() {
                        let q = self.a[i][t].div_floor(&self.a[t][t]);
                        self.row_add(i, t, &-q);
                        clean &= self.a[i][t].is_zero();
                    }
                }
                for j in t + 1..self.n {
                    if !self.a[t][j].is_zero() {
                        let q = self.a[t][j].div_floor(&self.a[t][t]);
                        self.col_add(j, t, &-q);
                        clean &= self.a[t][j].is_zero();
                    }
                }
                if !clean {
                    // Move the smallest remainder in row t or column t to the pivot.
                    let mut best = (t, t);
                    let mut best_abs: Option<BigInt> = None;
                    for i in t + 1..self.m {
                        let x = self.a[i][t].abs();
                        if !x.is_zero() && best_abs.as_ref().is_none_or(|b| x < *b) {
                            best = (i, t);
                            best_abs = Some(x);
                        }
                    }
                    for j in t + 1..self.n {
                        let x = self.a[t][j].abs();
                        if !x.is_zero() && best_abs.as_ref().is_none_or(|b| x < *b) {
                            best = (t, j);
                            best_abs = Some(x);
                        }
                    }
                    self.row_swap(t, best.0);
                    self.col_swap(t, best.1);
                    continue;
                }
                let pivot = self.a[t][t].clone();
                let offender = (t + 1..self.m).find(|&i| (t + 1..self.n).any(|j| !self.a[i][j].is_multiple_of(&pivot)));
                match offender {
                    Some(i) => self.row_add(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.row_negate(t);
            }
            t += 1;
        }
    }

    fn finish(self) -> SmithForm {
        let k = self.m.min(self.n);
        let factors: Vec<BigInt> = (0..k).map(|i| self.a[i][i].clone()).filter(|x| !x.is_zero()).collect();
        let transforms = self.track.then(|| SmithTransforms {
            u: SparseIntMatrix::from_dense_big(self.m, self.m, &self.u),
            u_inv: SparseIntMatrix::from_dense_big(self.m, self.m, &self.u_inv),
            v: SparseIntMatrix::from_dense_big(self.n, self.n, &self.v),
            v_inv: SparseIntMatrix::from_dense_big(self.n, self.n, &self.v_inv),
        });
        SmithForm { factors, transforms }
    }
}

/// Invariant factors without transforms.
///
/// Unit pivots are eliminated sparsely first (boundary matrices of digraph
/// complexes are mostly ±1); the residual block goes through the dense
/// algorithm.
pub fn smith_factors(m: &SparseIntMatrix) -> Vec<BigInt> {
    let mut rows: Vec<BTreeMap<usize, BigInt>> = vec![BTreeMap::new(); m.rows()];
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols()];
    for (i, j, v) in m.iter() {
        rows[i].insert(j, v.clone());
        col_rows[j].insert(i);
    }
    let mut units = 0usize;
    let mut col_alive = vec![true; m.cols()];
    let mut row_alive = vec![true; m.rows()];
    loop {
        let mut progressed = false;
        let mut order: Vec<usize> = (0..m.cols()).filter(|&j| col_alive[j]).collect();
        order.sort_by_key(|&j| col_rows[j].len());
        for c in order {
            if !col_alive[c] || col_rows[c].is_empty() {
                continue;
            }
            let Some(r) =
                col_rows[c].iter().copied().filter(|&r| rows[r][&c].abs().is_one()).min_by_key(|&r| rows[r].len())
            else {
                continue;
            };
            let pivot_row = std::mem::take(&mut rows[r]);
            let sign = pivot_row[&c].clone();
            let others: Vec<usize> = col_rows[c].iter().copied().filter(|&r2| r2 != r).collect();
            for r2 in others {
                let factor = &rows[r2][&c] * &sign;
                for (&j, v) in &pivot_row {
                    let entry = rows[r2].entry(j).or_insert_with(BigInt::zero);
                    *entry -= &factor * v;
                    if entry.is_zero() {
                        rows[r2].remove(&j);
                        col_rows[j].remove(&r2);
                    } else {
                        col_rows[j].insert(r2);
                    }
                }
            }
            for &j in pivot_row.keys() {
                col_rows[j].remove(&r);
            }
            col_alive[c] = false;
            row_alive[r] = false;
            units += 1;
            progressed = true;
        }
        if !progressed {
            break;
        }
    }
    let live_rows: Vec<usize> = (0..m.rows()).filter(|&i| row_alive[i] && !rows[i].is_empty()).collect();
    let live_cols: Vec<usize> = (0..m.cols()).filter(|&j| col_alive[j] && !col_rows[j].is_empty()).collect();
    let mut factors = vec![BigInt::one(); units];
    if !live_rows.is_empty() && !live_cols.is_empty() {
        let col_pos: BTreeMap<usize, usize> = live_cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
        let dense: Vec<Vec<BigInt>> = live_rows
            .iter()
            .map(|&i| {
                let mut row = vec![BigInt::zero(); live_cols.len()];
                for (j, v) in &rows[i] {
                    row[col_pos[j]] = v.clone();
                }
                row
            })
            .collect();
        let mut calc = DenseSmith::new(dense, live_rows.len(), live_cols.len(), false);
        calc.run();
        factors.extend(calc.finish().factors);
    }
    factors
}

/// Turns any list of nonzero diagonal entries into the invariant factor chain
/// of the same diagonal matrix.
pub fn invariant_chain(diagonal: &[BigInt]) -> Vec<BigInt> {
    let mut d: Vec<BigInt> = diagonal.iter().map(|x| x.abs()).filter(|x| !x.is_zero()).collect();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

/// Columns spanning the kernel of `m` over `ring`.
///
/// Over ℤ the columns form a basis of the kernel lattice, which is saturated.
/// Over ℚ the columns are primitive integer vectors. Over 𝔽p the entries are
/// residues in `[0, p)`.
pub fn kernel_basis(m: &SparseIntMatrix, ring: Ring) -> Result<SparseIntMatrix> {
    match ring {
        Ring::Z => Ok(integer_kernel(m)),
        Ring::Q => Ok(rational_kernel(m)),
        Ring::Fp(p) => {
            let f = PrimeField::new(p)?;
            let cols: Vec<Vec<(usize, BigInt)>> = kernel_over(&f, m)
                .into_iter()
                .map(|v| v.into_iter().map(|(i, x)| (i, BigInt::from(x))).collect())
                .collect();
            SparseIntMatrix::from_columns(m.cols(), cols)
        }
    }
}

/// Free-variable kernel basis from the reduced row echelon form over ℚ.
fn rref_kernel(m: &SparseIntMatrix) -> Vec<Vec<BigRational>> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigRational>> =
        m.to_dense().into_iter().map(|r| r.into_iter().map(BigRational::from_integer).collect()).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    if !a[r][j].is_zero() {
                        let t = &f * &a[r][j];
                        a[i][j] -= t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let is_pivot: BTreeSet<usize> = pivots.iter().copied().collect();
    (0..cols)
        .filter(|c| !is_pivot.contains(c))
        .map(|free| {
            let mut v = vec![BigRational::zero(); cols];
            v[free] = BigRational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][free].clone();
            }
            v
        })
        .collect()
}

fn primitive(v: &[BigRational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

fn columns_to_matrix(rows: usize, vs: &[Vec<BigInt>]) -> SparseIntMatrix {
    let cols = vs
        .iter()
        .map(|v| v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect())
        .collect();
    SparseIntMatrix::from_columns(rows, cols).expect("in range")
}

fn rational_kernel(m: &SparseIntMatrix) -> SparseIntMatrix {
    let vs: Vec<Vec<BigInt>> = rref_kernel(m).iter().map(|v| primitive(v)).collect();
    columns_to_matrix(m.cols(), &vs)
}

fn integer_kernel(m: &SparseIntMatrix) -> SparseIntMatrix {
    let rat = rref_kernel(m);
    if rat.iter().all(|v| v.iter().all(|x| x.is_integer())) {
        let vs: Vec<Vec<BigInt>> = rat.iter().map(|v| v.iter().map(|x| x.to_integer()).collect()).collect();
        return columns_to_matrix(m.cols(), &vs);
    }
    let vs: Vec<Vec<BigInt>> = rat.iter().map(|v| primitive(v)).collect();
    saturate(&columns_to_matrix(m.cols(), &vs))
}

/// Basis of `(column span ⊗ ℚ) ∩ ℤⁿ` for a full-column-rank integer matrix.
pub fn saturate(k: &SparseIntMatrix) -> SparseIntMatrix {
    let form = smith(k, true);
    let t = form.transforms.expect("requested transforms");
    let r = form.factors.len();
    t.u_inv.select_columns(&(0..r).collect::<Vec<_>>())
}

/// Kernel as the trailing columns of the right Smith transform; an independent
/// route to the saturated integer kernel.
pub fn integer_kernel_via_smith(m: &SparseIntMatrix) -> SparseIntMatrix {
    let form = smith(m, true);
    let t = form.transforms.expect("requested transforms");
    let r = form.factors.len();
    t.v.select_columns(&(r..m.cols()).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Determinantal divisors: gcd of all k×k minors, by cofactor expansion.
    fn det(m: &[Vec<i64>]) -> i64 {
        match m.len() {
            0 => 1,
            1 => m[0][0],
            n => (0..n)
                .map(|j| {
                    let minor: Vec<Vec<i64>> = m[1..]
                        .iter()
                        .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &x)| x).collect())
                        .collect();
                    let s = if j % 2 == 0 { 1 } else { -1 };
                    s * m[0][j] * det(&minor)
                })
                .sum(),
        }
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = subsets(n - 1, k);
        for mut s in subsets(n - 1, k - 1) {
            s.push(n - 1);
            out.push(s);
        }
        out
    }

    /// Brute-force oracle: d_k = D_k / D_{k-1} with D_k the gcd of k-minors.
    fn factors_by_minors(m: &[Vec<i64>]) -> Vec<BigInt> {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        let mut divisors = vec![BigInt::one()];
        for k in 1..=rows.min(cols) {
            let mut g = BigInt::zero();
            for rs in subsets(rows, k) {
                for cs in subsets(cols, k) {
                    let minor: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j]).collect()).collect();
                    g = g.gcd(&BigInt::from(det(&minor)));
                }
            }
            if g.is_zero() {
                break;
            }
            divisors.push(g);
        }
        divisors.windows(2).map(|w| &w[1] / &w[0]).collect()
    }

    #[test]
    fn smith_examples() {
        let d = SparseIntMatrix::from_dense(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(factors_by_minors(&[vec![2, 0], vec![0, 3]]), big(&[1, 6]));
        assert_eq!(smith(&d, false).factors, big(&[1, 6]));
        assert_eq!(smith(&d, true).factors, big(&[1, 6]));
        assert!(smith(&SparseIntMatrix::zeros(3, 2), true).factors.is_empty());
        assert_eq!(smith(&SparseIntMatrix::identity(3), false).factors, big(&[1, 1, 1]));
    }

    #[test]
    fn kernel_examples() {
        let m = SparseIntMatrix::from_dense(&[vec![1, 3]]);
        let k = kernel_basis(&m, Ring::Z).unwrap();
        assert_eq!(k.cols(), 1);
        let col: Vec<BigInt> = (0..2).map(|i| k.get(i, 0)).collect();
        assert!(col == big(&[3, -1]) || col == big(&[-3, 1]));
        assert_eq!(kernel_basis(&SparseIntMatrix::identity(3), Ring::Q).unwrap().cols(), 0);
        let two = SparseIntMatrix::from_dense(&[vec![2]]);
        let k2 = kernel_basis(&two, Ring::Fp(2)).unwrap();
        assert_eq!((k2.cols(), k2.get(0, 0)), (1, BigInt::one()));
        assert!(kernel_basis(&two, Ring::Fp(4)).is_err());
    }

    #[test]
    fn saturation_of_non_integral_rref() {
        // Kernel of (2 3) has rational free-variable basis (-3/2, 1).
        let m = SparseIntMatrix::from_dense(&[vec![2, 3]]);
        let k = kernel_basis(&m, Ring::Z).unwrap();
        assert!(m.mul(&k).unwrap().is_zero());
        assert_eq!(smith(&k, false).factors, big(&[1]));
    }

    #[test]
    fn invariant_chain_normalizes() {
        assert_eq!(invariant_chain(&big(&[6, 4])), big(&[2, 12]));
        assert_eq!(invariant_chain(&big(&[2, 3])), big(&[1, 6]));
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-4i64..5, c), r))
    }

    proptest! {
        #[test]
        fn smith_matches_minor_oracle(rows in small_matrix()) {
            let m = SparseIntMatrix::from_dense(&rows);
            let expected = factors_by_minors(&rows);
            prop_assert_eq!(&smith(&m, false).factors, &expected);
            let full = smith(&m, true);
            prop_assert_eq!(&full.factors, &expected);
            let t = full.transforms.unwrap();
            let diag = t.u.mul(&m).unwrap().mul(&t.v).unwrap();
            for (i, j, v) in diag.iter() {
                prop_assert_eq!(i, j);
                prop_assert_eq!(v, &expected[i]);
            }
            prop_assert_eq!(t.u.mul(&t.u_inv).unwrap(), SparseIntMatrix::identity(m.rows()));
            prop_assert_eq!(t.v.mul(&t.v_inv).unwrap(), SparseIntMatrix::identity(m.cols()));
        }

        #[test]
        fn factors_agree_with_field_ranks(rows in small_matrix()) {
            let m = SparseIntMatrix::from_dense(&rows);
            let factors = smith(&m, false).factors;
            prop_assert_eq!(crate::linalg::rank_over(&crate::linalg::Rationals, &m), factors.len());
            for p in [2u64, 3, 5] {
                let f = crate::linalg::PrimeField::new(p).unwrap();
                let expected = factors.iter().filter(|d| !d.is_multiple_of(&BigInt::from(p))).count();
                prop_assert_eq!(crate::linalg::rank_over(&f, &m), expected);
            }
        }

        #[test]
        fn integer_kernel_is_saturated(rows in small_matrix()) {
            let m = SparseIntMatrix::from_dense(&rows);
            let k = kernel_basis(&m, Ring::Z).unwrap();
            prop_assert!(m.mul(&k).unwrap().is_zero());
            prop_assert_eq!(k.cols(), m.cols() - smith(&m, false).factors.len());
            prop_assert!(smith(&k, false).factors.iter().all(|d| d.is_one()));
            let other = integer_kernel_via_smith(&m);
            prop_assert!(m.mul(&other).unwrap().is_zero());
            prop_assert_eq!(other.cols(), k.cols());
            // Two saturated lattices of equal rank in the same rational kernel coincide:
            // stacking them must not raise the rank and must stay saturated.
            let both = k.hstack(&other).unwrap();
            prop_assert_eq!(smith(&both, false).factors.len(), k.cols());
            prop_assert!(smith(&both, false).factors.iter().all(|d| d.is_one()));
        }
    }
}
