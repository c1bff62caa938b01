//! Accessible sequences, magnitude complexes and the length-filtered nerve.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use serde::Serialize;

use crate::digraph::{Digraph, Dist};
use crate::error::{Error, Result};
use crate::linalg::{induced_image_rank, ChainComplexZ, FieldKind, HomologySummary, Ring, SparseIntMatrix};

/// A vertex sequence with finite consecutive distances.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AccSeq {
    vertices: Vec<usize>,
    length: u32,
}

impl AccSeq {
    pub fn new(x: &Digraph, vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Range("an accessible sequence has at least one vertex".into()));
        }
        if let Some(&v) = vertices.iter().find(|&&v| v >= x.vertex_count()) {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        let mut length = 0;
        for w in vertices.windows(2) {
            match x.dist(w[0], w[1]) {
                Dist::Finite(d) => length += d,
                Dist::Infinite => {
                    return Err(Error::Range(format!("{} is unreachable from {}", x.name(w[1]), x.name(w[0]))))
                }
            }
        }
        Ok(AccSeq { vertices, length })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Simplicial dimension, one less than the number of vertices.
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn is_regular(&self) -> bool {
        self.vertices.windows(2).all(|w| w[0] != w[1])
    }

    pub fn label(&self, x: &Digraph) -> String {
        seq_label(x, &self.vertices)
    }
}

pub(crate) fn seq_label(x: &Digraph, vertices: &[usize]) -> String {
    let names: Vec<&str> = vertices.iter().map(|&v| x.name(v)).collect();
    format!("({})", names.join(","))
}

/// Regular accessible sequences bucketed by (dimension, length).
#[derive(Clone, Debug)]
pub struct MagnitudeBasis {
    n_max: usize,
    l_max: u32,
    buckets: BTreeMap<(usize, u32), Vec<AccSeq>>,
}

impl MagnitudeBasis {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    /// Sequences of dimension `n` and length exactly `l`, in lexicographic order.
    pub fn get(&self, n: usize, l: u32) -> &[AccSeq] {
        self.buckets.get(&(n, l)).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Every regular accessible sequence of dimension ≤ `n_max` and length ≤ `l_max`.
pub fn enum_regular_seqs(x: &Digraph, n_max: usize, l_max: u32) -> MagnitudeBasis {
    let mut buckets: BTreeMap<(usize, u32), Vec<AccSeq>> = BTreeMap::new();
    for_each_regular_seq(x, n_max, l_max, |seq, length| {
        buckets.entry((seq.len() - 1, length)).or_default().push(AccSeq { vertices: seq.to_vec(), length });
    });
    MagnitudeBasis { n_max, l_max, buckets }
}

/// Depth-first enumeration in lexicographic order; a prefix is visited before
/// its extensions.
fn for_each_regular_seq<F: FnMut(&[usize], u32)>(x: &Digraph, n_max: usize, l_max: u32, mut visit: F) {
    fn go<F: FnMut(&[usize], u32)>(
        x: &Digraph,
        n_max: usize,
        l_max: u32,
        seq: &mut Vec<usize>,
        len: u32,
        visit: &mut F,
    ) {
        visit(seq, len);
        if seq.len() > n_max {
            return;
        }
        let last = *seq.last().expect("nonempty");
        for v in 0..x.vertex_count() {
            if v == last {
                continue;
            }
            if let Dist::Finite(d) = x.dist(last, v) {
                if len + d <= l_max {
                    seq.push(v);
                    go(x, n_max, l_max, seq, len + d, visit);
                    seq.pop();
                }
            }
        }
    }
    let mut seq = Vec::with_capacity(n_max + 1);
    for v in 0..x.vertex_count() {
        seq.push(v);
        go(x, n_max, l_max, &mut seq, 0, &mut visit);
        seq.pop();
    }
}

/// Bases and complex for sequences with `b < L ≤ a`, degrees `0..=n_cap`.
#[derive(Clone, Debug)]
pub struct RelativeComplex {
    pub a: u32,
    pub b: i64,
    pub bases: Vec<Vec<AccSeq>>,
    pub complex: ChainComplexZ,
}

impl RelativeComplex {
    fn index(&self, n: usize) -> HashMap<&[usize], usize> {
        self.bases[n].iter().enumerate().map(|(k, s)| (s.vertices(), k)).collect()
    }
}

/// Faces surviving in the quotient `𝒩^a / 𝒩^b`, with signs.
fn surviving_faces(x: &Digraph, seq: &AccSeq, b: i64) -> Vec<(Vec<usize>, i64)> {
    let v = seq.vertices();
    let n = seq.dim();
    if n == 0 {
        return Vec::new();
    }
    let d = |p: usize, q: usize| x.dist(p, q).finite().expect("accessible");
    let mut out = Vec::new();
    for i in 0..=n {
        let face_len = if i == 0 {
            seq.length() - d(v[0], v[1])
        } else if i == n {
            seq.length() - d(v[n - 1], v[n])
        } else {
            if v[i - 1] == v[i + 1] {
                continue;
            }
            seq.length() - d(v[i - 1], v[i]) - d(v[i], v[i + 1]) + d(v[i - 1], v[i + 1])
        };
        if i64::from(face_len) <= b {
            continue;
        }
        let mut face = v.to_vec();
        face.remove(i);
        out.push((face, if i % 2 == 0 { 1 } else { -1 }));
    }
    out
}

/// Chain complex of the quotient of length filtrations `𝒩^a / 𝒩^b` in degrees
/// `0..=n_cap`; `b = -1` gives the absolute complex of `𝒩^a`.
pub fn relative_complex(x: &Digraph, a: u32, b: i64, n_cap: usize) -> Result<ChainComplexZ> {
    Ok(relative_parts(x, a, b, n_cap)?.complex)
}

pub fn relative_parts(x: &Digraph, a: u32, b: i64, n_cap: usize) -> Result<RelativeComplex> {
    if b < -1 || b >= i64::from(a) {
        return Err(Error::Range(format!("relative complex needs a > b >= -1, got a={a}, b={b}")));
    }
    let mut bases: Vec<Vec<AccSeq>> = vec![Vec::new(); n_cap + 1];
    for_each_regular_seq(x, n_cap, a, |seq, length| {
        if i64::from(length) > b {
            bases[seq.len() - 1].push(AccSeq { vertices: seq.to_vec(), length });
        }
    });
    let mut boundaries = Vec::with_capacity(n_cap);
    for n in 1..=n_cap {
        let index: HashMap<&[usize], usize> = bases[n - 1].iter().enumerate().map(|(k, s)| (s.vertices(), k)).collect();
        let columns = bases[n]
            .iter()
            .map(|seq| {
                surviving_faces(x, seq, b)
                    .into_iter()
                    .map(|(face, sign)| (index[face.as_slice()], BigInt::from(sign)))
                    .collect()
            })
            .collect();
        boundaries.push(SparseIntMatrix::from_columns(bases[n - 1].len(), columns)?);
    }
    let labels = bases.iter().map(|b| b.iter().map(|s| s.label(x)).collect()).collect();
    let complex = ChainComplexZ::new(labels, boundaries)?;
    Ok(RelativeComplex { a, b, bases, complex })
}

/// Magnitude complex `MC^l` in degrees `0..=l`.
#[derive(Clone, Debug)]
pub struct MagnitudeComplex {
    pub l: u32,
    pub bases: Vec<Vec<AccSeq>>,
    pub complex: ChainComplexZ,
}

pub fn mc_complex(x: &Digraph, l: u32) -> Result<MagnitudeComplex> {
    let parts = relative_parts(x, l, i64::from(l) - 1, l as usize)?;
    Ok(MagnitudeComplex { l, bases: parts.bases, complex: parts.complex })
}

/// `MH^l_n` for `0 ≤ n ≤ l`; higher degrees vanish identically.
pub fn magnitude_homology(x: &Digraph, l: u32, rings: &[Ring]) -> Result<HomologySummary> {
    mc_complex(x, l)?.complex.homology(rings)
}

/// Ranks `MH^l_n` over one field for all `n ≤ l ≤ l_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MagnitudeTable {
    pub field: String,
    pub l_max: u32,
    pub entries: Vec<MagnitudeEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MagnitudeEntry {
    pub n: usize,
    pub l: u32,
    pub rank: usize,
}

impl MagnitudeTable {
    /// Zero above the diagonal.
    pub fn rank(&self, n: usize, l: u32) -> usize {
        self.entries.iter().find(|e| e.n == n && e.l == l).map_or(0, |e| e.rank)
    }
}

pub fn magnitude_table(x: &Digraph, l_max: u32, field: FieldKind) -> Result<MagnitudeTable> {
    let field = field.validate()?;
    let mut entries = Vec::new();
    for l in 0..=l_max {
        let h = magnitude_homology(x, l, &[Ring::from(field)])?;
        for d in &h.degrees {
            entries.push(MagnitudeEntry { n: d.degree, l, rank: d.rank_over(field).expect("requested") });
        }
    }
    Ok(MagnitudeTable { field: field.to_string(), l_max, entries })
}

/// Page `E^r` of the spectral sequence of the length filtration, keyed by
/// filtration level `s` and total degree `n`.
///
/// `E^1_{s,n} = MH^s_n`; for `r ≥ 2` the entry is the rank of the image of
/// `H_n(𝒩^s/𝒩^{s−r}) → H_n(𝒩^{s+r−1}/𝒩^{s−1})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MpssPage {
    pub r: u32,
    pub field: String,
    pub entries: Vec<PageEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PageEntry {
    /// Filtration level.
    pub s: u32,
    /// Total degree.
    pub n: usize,
    pub rank: usize,
}

/// `(i, j)` coordinates of a page entry under the two customary conventions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PageCoordinates {
    /// Filtration second: `i = n − s`, `j = s`.
    pub filtration_second: (i64, i64),
    /// Filtration first: `i = s`, `j = n − s`.
    pub filtration_first: (i64, i64),
}

impl PageEntry {
    pub fn coordinates(&self) -> PageCoordinates {
        let (s, n) = (i64::from(self.s), self.n as i64);
        PageCoordinates { filtration_second: (n - s, s), filtration_first: (s, n - s) }
    }
}

impl MpssPage {
    pub fn rank(&self, s: u32, n: usize) -> usize {
        self.entries.iter().find(|e| e.s == s && e.n == n).map_or(0, |e| e.rank)
    }
}

/// Entries for `0 ≤ s ≤ s_max`, `0 ≤ n ≤ n_max`.
pub fn mpss_page(x: &Digraph, r: u32, s_max: u32, n_max: usize, field: FieldKind) -> Result<MpssPage> {
    if r == 0 {
        return Err(Error::Range("pages start at r = 1".into()));
    }
    let field = field.validate()?;
    let mut entries = Vec::new();
    for s in 0..=s_max {
        for n in 0..=n_max {
            let rank = if n as u32 > s { 0 } else { page_entry(x, r, s, n, field)? };
            entries.push(PageEntry { s, n, rank });
        }
    }
    Ok(MpssPage { r, field: field.to_string(), entries })
}

/// A single entry `E^r_{s,n}`.
pub fn page_entry(x: &Digraph, r: u32, s: u32, n: usize, field: FieldKind) -> Result<usize> {
    if n as u32 > s {
        return Ok(0);
    }
    if r == 1 {
        let mc = mc_complex(x, s)?;
        let h = mc.complex.homology(&[Ring::from(field)])?;
        return Ok(h.degree(n).and_then(|d| d.rank_over(field)).unwrap_or(0));
    }
    let src = relative_parts(x, s, (i64::from(s) - i64::from(r)).max(-1), n + 1)?;
    let dst = relative_parts(x, s + r - 1, i64::from(s) - 1, n + 1)?;
    induced_image_rank(&src.complex, &dst.complex, &filtration_map(&src, &dst), n, field)
}

/// Identity on the sequences both quotients share, zero on the rest.
fn filtration_map(src: &RelativeComplex, dst: &RelativeComplex) -> Vec<SparseIntMatrix> {
    (0..src.bases.len().min(dst.bases.len()))
        .map(|k| {
            let index = dst.index(k);
            let columns = src.bases[k]
                .iter()
                .map(|seq| index.get(seq.vertices()).map(|&i| vec![(i, BigInt::from(1))]).unwrap_or_default())
                .collect();
            SparseIntMatrix::from_columns(dst.bases[k].len(), columns).expect("in range")
        })
        .collect()
}
