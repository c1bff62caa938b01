//! Bounded chain complexes of free abelian groups and their homology.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Serialize, Serializer};

use super::field::{Field, FieldKind, Ring};
use super::matrix::SparseIntMatrix;
use super::reduce::{convert_column, kernel_over, rank_over, ColumnReducer, SparseVec};
use super::smith::smith_factors;
use crate::error::{Error, Result};
use crate::linalg::field::with_field;

/// Chain complex `C_0 ← C_1 ← … ← C_top` with labelled bases.
///
/// `boundary(n)` for `1 ≤ n ≤ top` maps the degree-n basis to the degree-(n−1)
/// basis. Construction fails unless every composite `∂_{n−1} ∂_n` vanishes.
#[derive(Clone, Debug)]
pub struct ChainComplexZ {
    labels: Vec<Vec<String>>,
    boundaries: Vec<SparseIntMatrix>,
}

impl ChainComplexZ {
    /// `labels[n]` is the degree-n basis, `boundaries[n-1]` is `∂_n`.
    pub fn new(labels: Vec<Vec<String>>, boundaries: Vec<SparseIntMatrix>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Dimension("a chain complex needs degree 0".into()));
        }
        if boundaries.len() + 1 != labels.len() {
            return Err(Error::Dimension(format!(
                "{} degrees but {} boundary matrices",
                labels.len(),
                boundaries.len()
            )));
        }
        for (k, d) in boundaries.iter().enumerate() {
            let n = k + 1;
            if d.cols() != labels[n].len() || d.rows() != labels[n - 1].len() {
                return Err(Error::Dimension(format!(
                    "boundary in degree {n} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    labels[n - 1].len(),
                    labels[n].len()
                )));
            }
        }
        for n in 2..labels.len() {
            let dd = boundaries[n - 2].mul(&boundaries[n - 1])?;
            if let Some(col) = (0..dd.cols()).find(|&j| !dd.column(j).is_empty()) {
                return Err(Error::BoundarySquare { degree: n, label: labels[n][col].clone() });
            }
        }
        Ok(ChainComplexZ { labels, boundaries })
    }

    pub fn top_degree(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn dim(&self, n: usize) -> usize {
        self.labels.get(n).map_or(0, Vec::len)
    }

    pub fn labels(&self, n: usize) -> &[String] {
        self.labels.get(n).map_or(&[], |v| v.as_slice())
    }

    /// `∂_n`; `None` for `n = 0` or above the top degree.
    pub fn boundary(&self, n: usize) -> Option<&SparseIntMatrix> {
        if n == 0 {
            None
        } else {
            self.boundaries.get(n - 1)
        }
    }

    fn boundary_rank(&self, n: usize, field: FieldKind) -> Result<usize> {
        Ok(match self.boundary(n) {
            None => 0,
            Some(d) => with_field!(field, |f| rank_over(f, d)),
        })
    }

    /// Homology in every degree. The free rank is always reported; torsion only
    /// when `Ring::Z` is requested.
    ///
    /// The top degree reports the cycles of `C_top`, so callers wanting honest
    /// homology in degree n must supply degree n+1.
    pub fn homology(&self, rings: &[Ring]) -> Result<HomologySummary> {
        let want_z = rings.contains(&Ring::Z);
        let mut fields: Vec<FieldKind> = rings.iter().filter_map(|r| r.field()).collect();
        fields.sort();
        fields.dedup();
        for f in &fields {
            f.validate()?;
        }
        let top = self.top_degree();
        let mut z_factors: Vec<Option<Vec<BigInt>>> = vec![None; top + 2];
        let mut free_boundary_rank = vec![0usize; top + 2];
        for n in 1..=top {
            let d = &self.boundaries[n - 1];
            if want_z {
                let factors = smith_factors(d);
                free_boundary_rank[n] = factors.len();
                z_factors[n] = Some(factors);
            } else {
                free_boundary_rank[n] = rank_over(&super::field::Rationals, d);
            }
        }
        let mut field_boundary_rank: BTreeMap<FieldKind, Vec<usize>> = BTreeMap::new();
        for &f in &fields {
            let ranks = if f == FieldKind::Q {
                free_boundary_rank.clone()
            } else {
                let mut v = vec![0usize; top + 2];
                for (n, slot) in v.iter_mut().enumerate().take(top + 1).skip(1) {
                    *slot = match &z_factors[n] {
                        Some(factors) => {
                            let FieldKind::Fp(p) = f else { unreachable!() };
                            let p = BigInt::from(p);
                            factors.iter().filter(|d| !d.is_multiple_of(&p)).count()
                        }
                        None => self.boundary_rank(n, f)?,
                    };
                }
                v
            };
            field_boundary_rank.insert(f, ranks);
        }
        let degrees = (0..=top)
            .map(|n| {
                let dim = self.dim(n);
                let free_rank = dim - free_boundary_rank[n] - free_boundary_rank[n + 1];
                let torsion = want_z.then(|| {
                    z_factors[n + 1]
                        .as_ref()
                        .map(|fs| fs.iter().filter(|d| *d > &BigInt::from(1)).cloned().collect())
                        .unwrap_or_default()
                });
                let field_ranks =
                    field_boundary_rank.iter().map(|(f, ranks)| (*f, dim - ranks[n] - ranks[n + 1])).collect();
                DegreeHomology { degree: n, free_rank, torsion, field_ranks }
            })
            .collect();
        Ok(HomologySummary { degrees })
    }
}

/// Homology in one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeHomology {
    pub degree: usize,
    pub free_rank: usize,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_torsion")]
    pub torsion: Option<Vec<BigInt>>,
    #[serde(serialize_with = "serialize_field_ranks")]
    pub field_ranks: BTreeMap<FieldKind, usize>,
}

impl DegreeHomology {
    pub fn rank_over(&self, f: FieldKind) -> Option<usize> {
        self.field_ranks.get(&f).copied()
    }
}

fn serialize_torsion<S: Serializer>(t: &Option<Vec<BigInt>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    serialize_bigint_seq(t.as_deref().unwrap_or(&[]), s)
}

/// Integers as JSON numbers when they fit in 64 bits, as strings otherwise.
pub(crate) fn serialize_bigint_seq<S: Serializer>(t: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use num_traits::ToPrimitive;
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(t.len()))?;
    for d in t {
        match d.to_u64() {
            Some(v) => seq.serialize_element(&v)?,
            None => seq.serialize_element(&d.to_string())?,
        }
    }
    seq.end()
}

fn serialize_field_ranks<S: Serializer>(m: &BTreeMap<FieldKind, usize>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(m.len()))?;
    for (k, v) in m {
        map.serialize_entry(&k.to_string(), v)?;
    }
    map.end()
}

/// Per-degree homology, serialized as a JSON array.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct HomologySummary {
    pub degrees: Vec<DegreeHomology>,
}

impl HomologySummary {
    pub fn degree(&self, n: usize) -> Option<&DegreeHomology> {
        self.degrees.get(n)
    }

    pub fn free_ranks(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.free_rank).collect()
    }

    /// Ranks over `f`, or the free ranks when `f` was not requested and is ℚ.
    pub fn ranks_over(&self, f: FieldKind) -> Option<Vec<usize>> {
        self.degrees
            .iter()
            .map(|d| match (d.rank_over(f), f) {
                (Some(r), _) => Some(r),
                (None, FieldKind::Q) => Some(d.free_rank),
                _ => None,
            })
            .collect()
    }

    /// Keeps degrees `0..=n`.
    pub fn truncate(&mut self, n: usize) {
        self.degrees.truncate(n + 1);
    }
}

/// Rank of `H_n(f): H_n(src) → H_n(dst)` over `field`.
///
/// `chain_map[k]` is the matrix of `f_k` from the degree-k basis of `src` to
/// that of `dst`. Commutation with the boundaries is checked in every degree
/// where both sides are defined.
pub fn induced_image_rank(
    src: &ChainComplexZ,
    dst: &ChainComplexZ,
    chain_map: &[SparseIntMatrix],
    n: usize,
    field: FieldKind,
) -> Result<usize> {
    if chain_map.len() <= n {
        return Err(Error::Dimension(format!("chain map missing degree {n}")));
    }
    for (k, f) in chain_map.iter().enumerate() {
        if f.cols() != src.dim(k) || f.rows() != dst.dim(k) {
            return Err(Error::Dimension(format!(
                "chain map in degree {k} is {}x{}, expected {}x{}",
                f.rows(),
                f.cols(),
                dst.dim(k),
                src.dim(k)
            )));
        }
        if k == 0 {
            continue;
        }
        if let (Some(ds), Some(dd)) = (src.boundary(k), dst.boundary(k)) {
            if dd.mul(f)? != chain_map[k - 1].mul(ds)? {
                return Err(Error::NotAChainMap { degree: k });
            }
        }
    }
    with_field!(field.validate()?, |fld| image_rank_over(fld, src, dst, &chain_map[n], n))
}

fn image_rank_over<F: Field>(
    field: &F,
    src: &ChainComplexZ,
    dst: &ChainComplexZ,
    f_n: &SparseIntMatrix,
    n: usize,
) -> Result<usize> {
    let kernel: Vec<SparseVec<F::Elem>> = match src.boundary(n) {
        Some(d) => kernel_over(field, d),
        None => (0..src.dim(n)).map(|j| vec![(j, field.one())]).collect(),
    };
    let mut reducer = ColumnReducer::new(field);
    if let Some(d) = dst.boundary(n + 1) {
        for col in d.columns() {
            reducer.push(convert_column(field, col));
        }
    }
    let base = reducer.rank();
    let images: Vec<SparseVec<F::Elem>> = f_n.columns().iter().map(|c| convert_column(field, c)).collect();
    for z in kernel {
        let mut acc: BTreeMap<usize, F::Elem> = BTreeMap::new();
        for (j, c) in &z {
            for (i, v) in &images[*j] {
                let e = acc.entry(*i).or_insert_with(|| field.zero());
                *e = field.add(e, &field.mul(c, v));
            }
        }
        let col: SparseVec<F::Elem> = acc.into_iter().filter(|(_, v)| !field.is_zero(v)).collect();
        reducer.push(col);
    }
    Ok(reducer.rank() - base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::smith::kernel_basis;
    use proptest::prelude::*;

    fn labels(dims: &[usize]) -> Vec<Vec<String>> {
        dims.iter().map(|&d| (0..d).map(|i| format!("e{i}")).collect()).collect()
    }

    #[test]
    fn multiplication_by_two() {
        let c = ChainComplexZ::new(labels(&[1, 1]), vec![SparseIntMatrix::from_dense(&[vec![2]])]).unwrap();
        let h = c.homology(&[Ring::Z, Ring::Q, Ring::Fp(2)]).unwrap();
        assert_eq!(h.degrees[0].free_rank, 0);
        assert_eq!(h.degrees[0].torsion, Some(vec![BigInt::from(2)]));
        assert_eq!(h.degrees[0].rank_over(FieldKind::Fp(2)), Some(1));
        assert_eq!(h.degrees[1].free_rank, 0);
        assert_eq!(h.degrees[1].rank_over(FieldKind::Fp(2)), Some(1));
        let json = serde_json::to_value(&h).unwrap();
        assert_eq!(json[0], serde_json::json!({"degree":0,"free_rank":0,"torsion":[2],"field_ranks":{"Q":0,"F2":1}}));
    }

    #[test]
    fn empty_complex() {
        let c = ChainComplexZ::new(labels(&[0, 0]), vec![SparseIntMatrix::zeros(0, 0)]).unwrap();
        assert_eq!(c.homology(&[Ring::Z]).unwrap().free_ranks(), vec![0, 0]);
    }

    #[test]
    fn nonzero_square_is_rejected() {
        let d1 = SparseIntMatrix::from_dense(&[vec![1]]);
        let d2 = SparseIntMatrix::from_dense(&[vec![1]]);
        let err = ChainComplexZ::new(labels(&[1, 1, 1]), vec![d1, d2]).unwrap_err();
        assert!(matches!(err, Error::BoundarySquare { degree: 2, .. }));
    }

    #[test]
    fn induced_identity_and_zero() {
        // Circle: two vertices, two edges a,b from v0 to v1.
        let d1 = SparseIntMatrix::from_dense(&[vec![-1, -1], vec![1, 1]]);
        let c = ChainComplexZ::new(labels(&[2, 2]), vec![d1]).unwrap();
        let id = vec![SparseIntMatrix::identity(2), SparseIntMatrix::identity(2)];
        assert_eq!(induced_image_rank(&c, &c, &id, 1, FieldKind::Q).unwrap(), 1);
        assert_eq!(induced_image_rank(&c, &c, &id, 0, FieldKind::Q).unwrap(), 1);
        let zero = vec![SparseIntMatrix::zeros(2, 2), SparseIntMatrix::zeros(2, 2)];
        assert_eq!(induced_image_rank(&c, &c, &zero, 1, FieldKind::Q).unwrap(), 0);
        let bad = vec![SparseIntMatrix::zeros(2, 2), SparseIntMatrix::identity(2)];
        assert!(matches!(induced_image_rank(&c, &c, &bad, 1, FieldKind::Q), Err(Error::NotAChainMap { degree: 1 })));
    }

    fn random_complex() -> impl Strategy<Value = ChainComplexZ> {
        (1usize..4, 1usize..5, 1usize..4).prop_flat_map(|(c0, c1, c2)| {
            (
                prop::collection::vec(prop::collection::vec(-3i64..4, c1), c0),
                prop::collection::vec(prop::collection::vec(-2i64..3, c2), c1),
            )
                .prop_map(move |(d1, mix)| {
                    let d1 = SparseIntMatrix::from_dense(&d1);
                    let ker = kernel_basis(&d1, Ring::Z).unwrap();
                    // Columns of ∂₂ are integer combinations of kernel vectors.
                    let coeffs = SparseIntMatrix::from_dense(&mix[..ker.cols()]);
                    let d2 =
                        if ker.cols() == 0 { SparseIntMatrix::zeros(d1.cols(), c2) } else { ker.mul(&coeffs).unwrap() };
                    ChainComplexZ::new(labels(&[c0, c1, c2]), vec![d1, d2]).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn universal_coefficients(c in random_complex()) {
            let h = c.homology(&[Ring::Z, Ring::Q, Ring::Fp(2), Ring::Fp(3), Ring::Fp(5)]).unwrap();
            for d in &h.degrees {
                prop_assert_eq!(d.rank_over(FieldKind::Q), Some(d.free_rank));
                let t = d.torsion.as_ref().unwrap();
                prop_assert!(t.windows(2).all(|w| w[1].is_multiple_of(&w[0])));
            }
            for p in [2u64, 3, 5] {
                let pb = BigInt::from(p);
                let tp = |n: usize| h.degrees[n].torsion.as_ref().unwrap().iter().filter(|d| d.is_multiple_of(&pb)).count();
                for n in 0..h.degrees.len() {
                    let expected = h.degrees[n].free_rank + tp(n) + if n > 0 { tp(n - 1) } else { 0 };
                    // The top degree is not followed by a boundary, so only the lower
                    // neighbor contributes there; tp(top) is zero because torsion needs ∂_{top+1}.
                    prop_assert_eq!(h.degrees[n].rank_over(FieldKind::Fp(p)), Some(expected));
                }
            }
            // Field route must agree with the Smith route.
            let fields_only = c.homology(&[Ring::Fp(2), Ring::Fp(3)]).unwrap();
            for n in 0..h.degrees.len() {
                prop_assert_eq!(fields_only.degrees[n].rank_over(FieldKind::Fp(2)), h.degrees[n].rank_over(FieldKind::Fp(2)));
                prop_assert_eq!(fields_only.degrees[n].rank_over(FieldKind::Fp(3)), h.degrees[n].rank_over(FieldKind::Fp(3)));
            }
        }
    }
}
