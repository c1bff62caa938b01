//! Path chains Ω, path homology and cluster decompositions.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::digraph::{Digraph, DigraphMorphism};
use crate::error::{Error, Result};
use crate::fundamental::ParsedVoltage;
use crate::linalg::{
    induced_image_rank, kernel_basis, rank_over, ChainComplexZ, FieldKind, HomologySummary, PrimeField, Rationals,
    Ring, SparseIntMatrix,
};
use crate::nerve::seq_label;

/// Largest degree accepted by the path homology routines.
pub const MAX_DEGREE: usize = 6;

/// Directed paths of each length, lexicographically ordered.
#[derive(Clone, Debug)]
pub struct PathBasis {
    paths: Vec<Vec<Vec<usize>>>,
}

impl PathBasis {
    pub fn new(x: &Digraph, n_max: usize) -> Self {
        let mut paths: Vec<Vec<Vec<usize>>> = vec![(0..x.vertex_count()).map(|v| vec![v]).collect()];
        for _ in 0..n_max {
            let prev = paths.last().expect("degree 0");
            let next = prev
                .iter()
                .flat_map(|p| {
                    let last = *p.last().expect("nonempty");
                    x.out_neighbors(last).iter().map(move |&v| [p.as_slice(), &[v]].concat())
                })
                .collect();
            paths.push(next);
        }
        PathBasis { paths }
    }

    pub fn get(&self, n: usize) -> &[Vec<usize>] {
        self.paths.get(n).map_or(&[], Vec::as_slice)
    }
}

/// Sign and sequence of every interior face `d_i` (1 ≤ i ≤ n−1) of `p` that
/// is not a path; degenerate faces are skipped.
fn defect_faces(x: &Digraph, p: &[usize]) -> Vec<(Vec<usize>, i64)> {
    let n = p.len() - 1;
    (1..n)
        .filter(|&i| p[i - 1] != p[i + 1] && !x.has_arrow(p[i - 1], p[i + 1]))
        .map(|i| {
            let mut face = p.to_vec();
            face.remove(i);
            (face, if i % 2 == 0 { 1 } else { -1 })
        })
        .collect()
}

/// Ω_n restricted to one endpoint pair (and optionally one voltage value).
#[derive(Clone, Debug)]
pub struct OmegaBlock {
    pub tail: usize,
    pub head: usize,
    pub label: Option<String>,
    /// The n-paths of this block.
    pub paths: Vec<Vec<usize>>,
    /// Columns span Ω inside the span of `paths`.
    pub basis: SparseIntMatrix,
    coords: Option<Coordinates>,
}

/// Rows on which the basis is invertible over ℚ, and that inverse.
#[derive(Clone, Debug)]
struct Coordinates {
    rows: Vec<usize>,
    inverse: Vec<Vec<BigRational>>,
}

impl OmegaBlock {
    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    /// Integer coordinates of a chain on `paths` in the basis, if it lies in Ω.
    fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let c = self.coords.as_ref().expect("integral block");
        let k = self.rank();
        let picked: Vec<BigRational> = c.rows.iter().map(|&r| BigRational::from_integer(v[r].clone())).collect();
        let mut out = Vec::with_capacity(k);
        for row in &c.inverse {
            let s: BigRational = row.iter().zip(&picked).map(|(a, b)| a * b).sum();
            if !s.is_integer() {
                return None;
            }
            out.push(s.to_integer());
        }
        let mut check = vec![BigInt::zero(); self.paths.len()];
        for (j, cj) in out.iter().enumerate() {
            for (i, a) in self.basis.column(j) {
                check[*i] += a * cj;
            }
        }
        (check == v).then_some(out)
    }
}

/// Ω_n as a direct sum of blocks.
#[derive(Clone, Debug)]
pub struct OmegaSubspace {
    pub degree: usize,
    pub ring: Ring,
    pub blocks: Vec<OmegaBlock>,
}

impl OmegaSubspace {
    pub fn rank(&self) -> usize {
        self.blocks.iter().map(OmegaBlock::rank).sum()
    }
}

type BlockKey = (usize, usize, Option<String>);

fn group_paths(
    x: &Digraph,
    paths: &[Vec<usize>],
    voltage: Option<&ParsedVoltage>,
) -> BTreeMap<BlockKey, Vec<Vec<usize>>> {
    let mut blocks: BTreeMap<BlockKey, Vec<Vec<usize>>> = BTreeMap::new();
    for p in paths {
        let key = (p[0], *p.last().expect("nonempty"), voltage.map(|v| v.path_label(x, p)));
        blocks.entry(key).or_default().push(p.clone());
    }
    blocks
}

fn defect_matrix(x: &Digraph, paths: &[Vec<usize>]) -> SparseIntMatrix {
    let mut rows: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut columns = Vec::with_capacity(paths.len());
    for p in paths {
        let col = defect_faces(x, p)
            .into_iter()
            .map(|(face, sign)| {
                let next = rows.len();
                (*rows.entry(face).or_insert(next), BigInt::from(sign))
            })
            .collect();
        columns.push(col);
    }
    let n_rows = rows.len();
    SparseIntMatrix::from_columns(n_rows, columns).expect("rows in range")
}

fn coordinates_for(basis: &SparseIntMatrix) -> Coordinates {
    // Pivot columns of Kᵀ are rows of K on which K is invertible.
    let kt = basis.transpose();
    let k = basis.cols();
    let mut rows = Vec::with_capacity(k);
    let mut red = crate::linalg::ColumnReducer::new(&Rationals);
    for (r, col) in kt.columns().iter().enumerate() {
        if rows.len() == k {
            break;
        }
        if red.push(crate::linalg::convert_column(&Rationals, col)).is_none() {
            rows.push(r);
        }
    }
    let square: Vec<Vec<BigRational>> =
        rows.iter().map(|&r| (0..k).map(|j| BigRational::from_integer(basis.get(r, j))).collect()).collect();
    Coordinates { rows, inverse: invert(square) }
}

fn invert(mut a: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("invertible");
        a.swap(c, p);
        inv.swap(c, p);
        let s = a[c][c].recip();
        for j in 0..n {
            a[c][j] *= &s;
            inv[c][j] *= &s;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in 0..n {
                    let t = &f * &a[c][j];
                    a[r][j] -= t;
                    let t = &f * &inv[c][j];
                    inv[r][j] -= t;
                }
            }
        }
    }
    inv
}

fn build_omega(
    x: &Digraph,
    paths: &[Vec<usize>],
    n: usize,
    ring: Ring,
    voltage: Option<&ParsedVoltage>,
) -> Result<OmegaSubspace> {
    let mut blocks = Vec::new();
    for ((tail, head, label), paths) in group_paths(x, paths, voltage) {
        let d = defect_matrix(x, &paths);
        let basis = if d.rows() == 0 { SparseIntMatrix::identity(paths.len()) } else { kernel_basis(&d, ring)? };
        let coords = (ring == Ring::Z).then(|| coordinates_for(&basis));
        blocks.push(OmegaBlock { tail, head, label, paths, basis, coords });
    }
    Ok(OmegaSubspace { degree: n, ring, blocks })
}

/// A basis of Ω_n over `ring`, block by block.
pub fn omega_basis(x: &Digraph, n: usize, ring: Ring) -> Result<OmegaSubspace> {
    check_degree(n)?;
    let basis = PathBasis::new(x, n);
    build_omega(x, basis.get(n), n, ring, None)
}

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::Range(format!("degree {n} exceeds the cap {MAX_DEGREE}")));
    }
    Ok(())
}

/// Ω over ℤ in degrees `0..=top` together with its chain complex in Ω coordinates.
#[derive(Clone, Debug)]
pub struct PathComplex {
    pub omega: Vec<OmegaSubspace>,
    pub complex: ChainComplexZ,
    /// For each degree, `(block, column)` of every global basis element.
    positions: Vec<Vec<(usize, usize)>>,
    /// For each degree, the block index of every (tail, head) pair.
    block_of: Vec<HashMap<(usize, usize), usize>>,
    /// Position of each path inside its block.
    path_slot: Vec<HashMap<Vec<usize>, usize>>,
    offsets: Vec<Vec<usize>>,
}

impl PathComplex {
    pub fn new(x: &Digraph, top: usize) -> Result<Self> {
        let basis = PathBasis::new(x, top);
        let omega: Vec<OmegaSubspace> =
            (0..=top).map(|n| build_omega(x, basis.get(n), n, Ring::Z, None)).collect::<Result<_>>()?;
        let mut positions = Vec::new();
        let mut block_of = Vec::new();
        let mut path_slot = Vec::new();
        let mut offsets = Vec::new();
        let mut labels = Vec::new();
        for om in &omega {
            let mut pos = Vec::new();
            let mut off = Vec::new();
            let mut lab = Vec::new();
            let mut bo = HashMap::new();
            let mut slots = HashMap::new();
            for (b, block) in om.blocks.iter().enumerate() {
                off.push(pos.len());
                bo.insert((block.tail, block.head), b);
                for (i, p) in block.paths.iter().enumerate() {
                    slots.insert(p.clone(), i);
                }
                for j in 0..block.rank() {
                    pos.push((b, j));
                    lab.push(chain_label(x, &block.paths, block.basis.column(j)));
                }
            }
            positions.push(pos);
            block_of.push(bo);
            path_slot.push(slots);
            offsets.push(off);
            labels.push(lab);
        }
        let mut pc = PathComplex {
            omega,
            complex: ChainComplexZ::new(vec![Vec::new()], Vec::new())?,
            positions,
            block_of,
            path_slot,
            offsets,
        };
        let mut boundaries = Vec::new();
        for n in 1..=top {
            let cols = (0..pc.positions[n].len())
                .map(|g| {
                    let (b, j) = pc.positions[n][g];
                    let block = &pc.omega[n].blocks[b];
                    let chain: Vec<(Vec<usize>, BigInt)> =
                        block.basis.column(j).iter().map(|(i, a)| (block.paths[*i].clone(), a.clone())).collect();
                    pc.express(n - 1, &path_boundary(&chain))
                        .ok_or_else(|| Error::Internal(format!("boundary of {} leaves Ω_{}", labels[n][g], n - 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            boundaries.push(SparseIntMatrix::from_columns(pc.positions[n - 1].len(), cols)?);
        }
        pc.complex = ChainComplexZ::new(labels, boundaries)?;
        Ok(pc)
    }

    pub fn top_degree(&self) -> usize {
        self.complex.top_degree()
    }

    /// Coordinates in the degree-n Ω basis of an integer chain on n-paths, or
    /// `None` if the chain is not in Ω_n.
    pub fn express(&self, n: usize, chain: &BTreeMap<Vec<usize>, BigInt>) -> Option<Vec<(usize, BigInt)>> {
        let mut per_block: BTreeMap<usize, Vec<BigInt>> = BTreeMap::new();
        for (p, a) in chain {
            if a.is_zero() {
                continue;
            }
            let key = (p[0], *p.last().expect("nonempty"));
            let b = *self.block_of[n].get(&key)?;
            let slot = *self.path_slot[n].get(p)?;
            let v = per_block.entry(b).or_insert_with(|| vec![BigInt::zero(); self.omega[n].blocks[b].paths.len()]);
            v[slot] += a;
        }
        let mut out = Vec::new();
        for (b, v) in per_block {
            let c = self.omega[n].blocks[b].coordinates(&v)?;
            for (j, cj) in c.into_iter().enumerate() {
                if !cj.is_zero() {
                    out.push((self.offsets[n][b] + j, cj));
                }
            }
        }
        Some(out)
    }

    /// The chain of the `g`-th basis element of Ω_n.
    pub fn basis_chain(&self, n: usize, g: usize) -> Vec<(Vec<usize>, BigInt)> {
        let (b, j) = self.positions[n][g];
        let block = &self.omega[n].blocks[b];
        block.basis.column(j).iter().map(|(i, a)| (block.paths[*i].clone(), a.clone())).collect()
    }
}

/// `Σ (−1)^i d_i` on the regular path complex, dropping degenerate faces.
fn path_boundary(chain: &[(Vec<usize>, BigInt)]) -> BTreeMap<Vec<usize>, BigInt> {
    let mut out: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
    for (p, a) in chain {
        let n = p.len() - 1;
        for i in 0..=n {
            if i > 0 && i < n && p[i - 1] == p[i + 1] {
                continue;
            }
            let mut face = p.clone();
            face.remove(i);
            let e = out.entry(face).or_insert_with(BigInt::zero);
            if i % 2 == 0 {
                *e += a;
            } else {
                *e -= a;
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn chain_label(x: &Digraph, paths: &[Vec<usize>], col: &[(usize, BigInt)]) -> String {
    let mut s = String::new();
    for (k, (i, a)) in col.iter().enumerate() {
        let sign = if a.is_negative() {
            "-"
        } else if k > 0 {
            "+"
        } else {
            ""
        };
        let mag = a.abs();
        s.push_str(sign);
        if !mag.is_one() {
            s.push_str(&mag.to_string());
        }
        s.push_str(&seq_label(x, &paths[*i]));
    }
    s
}

/// Path homology in degrees `0..=n_max`.
///
/// Ω is computed over ℤ; field ranks are those of `Ω_ℤ ⊗ K`.
pub fn ph(x: &Digraph, rings: &[Ring], n_max: usize) -> Result<HomologySummary> {
    check_degree(n_max)?;
    let pc = PathComplex::new(x, n_max + 1)?;
    warn_on_field_defects(x, &pc, rings);
    let mut h = pc.complex.homology(rings)?;
    h.truncate(n_max);
    Ok(h)
}

/// Logs blocks whose defect system changes rank modulo a requested prime,
/// where `Ω_ℤ ⊗ 𝔽p` and Ω over 𝔽p differ.
fn warn_on_field_defects(x: &Digraph, pc: &PathComplex, rings: &[Ring]) {
    let primes: Vec<u64> = rings.iter().filter_map(|r| if let Ring::Fp(p) = r { Some(*p) } else { None }).collect();
    if primes.is_empty() {
        return;
    }
    for om in pc.omega.iter().filter(|o| o.degree >= 4) {
        for block in &om.blocks {
            let d = defect_matrix(x, &block.paths);
            let q = rank_over(&Rationals, &d);
            for &p in &primes {
                let f = PrimeField::new(p).expect("validated ring");
                if rank_over(&f, &d) != q {
                    log::warn!(
                        "degree {} block {}->{}: defect rank drops mod {p}",
                        om.degree,
                        x.name(block.tail),
                        x.name(block.head)
                    );
                }
            }
        }
    }
}

/// Path homology ranks of a morphism's source and target with the image ranks
/// of the induced maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InducedPh {
    pub field: String,
    pub source_ranks: Vec<usize>,
    pub target_ranks: Vec<usize>,
    pub image_ranks: Vec<usize>,
}

impl InducedPh {
    /// Image ranks on reduced homology.
    pub fn reduced_image_ranks(&self) -> Vec<usize> {
        let mut r = self.image_ranks.clone();
        if let Some(first) = r.first_mut() {
            *first = first.saturating_sub(1);
        }
        r
    }
}

/// Chain map `Ω(X) → Ω(Y)` in Ω coordinates, degrees `0..=top`.
pub fn omega_chain_map(f: &DigraphMorphism, src: &PathComplex, dst: &PathComplex) -> Result<Vec<SparseIntMatrix>> {
    let top = src.top_degree().min(dst.top_degree());
    (0..=top)
        .map(|n| {
            let cols = (0..src.complex.dim(n))
                .map(|g| {
                    let mut image: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
                    for (p, a) in src.basis_chain(n, g) {
                        let q: Vec<usize> = p.iter().map(|&v| f.apply(v)).collect();
                        if q.windows(2).any(|w| w[0] == w[1]) {
                            continue;
                        }
                        *image.entry(q).or_insert_with(BigInt::zero) += a;
                    }
                    dst.express(n, &image)
                        .ok_or_else(|| Error::Internal(format!("image of an Ω_{n} generator leaves Ω_{n}")))
                })
                .collect::<Result<Vec<_>>>()?;
            SparseIntMatrix::from_columns(dst.complex.dim(n), cols)
        })
        .collect()
}

pub fn ph_induced(f: &DigraphMorphism, n_max: usize, field: FieldKind) -> Result<InducedPh> {
    check_degree(n_max)?;
    let field = field.validate()?;
    let src = PathComplex::new(f.source(), n_max + 1)?;
    let dst = PathComplex::new(f.target(), n_max + 1)?;
    induced_between(f, &src, &dst, n_max, field)
}

pub fn induced_between(
    f: &DigraphMorphism,
    src: &PathComplex,
    dst: &PathComplex,
    n_max: usize,
    field: FieldKind,
) -> Result<InducedPh> {
    let map = omega_chain_map(f, src, dst)?;
    let ring = [Ring::from(field)];
    let ranks = |c: &PathComplex| -> Result<Vec<usize>> {
        let mut h = c.complex.homology(&ring)?;
        h.truncate(n_max);
        Ok(h.degrees.iter().map(|d| d.rank_over(field).expect("requested")).collect())
    };
    let image_ranks = (0..=n_max)
        .map(|n| induced_image_rank(&src.complex, &dst.complex, &map, n, field))
        .collect::<Result<Vec<_>>>()?;
    Ok(InducedPh { field: field.to_string(), source_ranks: ranks(src)?, target_ranks: ranks(dst)?, image_ranks })
}

/// Component of Ω_n for one endpoint pair and optional voltage value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ClusterKey {
    pub tail: String,
    pub head: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Ranks of the Ω_n components keyed by `(tail, head[, voltage])`.
///
/// Blocks are ordered by vertex index; the voltage must hold at level 2.
pub fn cluster_decompose(x: &Digraph, n: usize, voltage: Option<&ParsedVoltage>) -> Result<Vec<(ClusterKey, usize)>> {
    check_degree(n)?;
    if let Some(v) = voltage {
        let check = v.check(x, 2);
        if !check.holds {
            let (a, b) = check.violation.expect("violation reported");
            return Err(Error::Voltage(format!("paths {a} and {b} have different labels")));
        }
    }
    let basis = PathBasis::new(x, n);
    let om = build_omega(x, basis.get(n), n, Ring::Q, voltage)?;
    Ok(om
        .blocks
        .iter()
        .filter(|b| b.rank() > 0)
        .map(|b| {
            (
                ClusterKey {
                    tail: x.name(b.tail).to_string(),
                    head: x.name(b.head).to_string(),
                    label: b.label.clone(),
                },
                b.rank(),
            )
        })
        .collect())
}

/// Ω_n rank over `field` for the block with given tail and any head in `heads`.
pub(crate) fn omega_rank_between(
    x: &Digraph,
    n: usize,
    tail: usize,
    heads: &[usize],
    field: FieldKind,
) -> Result<usize> {
    let basis = PathBasis::new(x, n);
    let paths: Vec<Vec<usize>> =
        basis.get(n).iter().filter(|p| p[0] == tail && heads.contains(p.last().expect("nonempty"))).cloned().collect();
    Ok(build_omega(x, &paths, n, Ring::from(field), None)?.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn c3() -> Digraph {
        Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn square() -> Digraph {
        Digraph::from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn eight() -> Digraph {
        let mut arrows = Vec::new();
        for i in 0..4 {
            let j = (i + 1) % 4;
            for (a, b) in [(i, j), (i, 4 + j), (4 + i, j), (4 + i, 4 + j)] {
                arrows.push((a, b));
            }
        }
        Digraph::from_edges(8, arrows).unwrap()
    }

    #[test]
    fn omega_examples() {
        let sq = omega_basis(&square(), 2, Ring::Z).unwrap();
        assert_eq!(sq.rank(), 1);
        let block = &sq.blocks[0];
        let col: Vec<(Vec<usize>, BigInt)> =
            block.basis.column(0).iter().map(|(i, a)| (block.paths[*i].clone(), a.clone())).collect();
        let expected = [(vec![0, 1, 3], BigInt::from(1)), (vec![0, 2, 3], BigInt::from(-1))];
        let negated = [(vec![0, 1, 3], BigInt::from(-1)), (vec![0, 2, 3], BigInt::from(1))];
        assert!(col == expected || col == negated);
        let i2 = Digraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(omega_basis(&i2, 2, Ring::Q).unwrap().rank(), 0);
        assert_eq!(omega_basis(&c3(), 0, Ring::Z).unwrap().rank(), 3);
        assert_eq!(omega_basis(&c3(), 1, Ring::Z).unwrap().rank(), 3);
        assert!(omega_basis(&c3(), 7, Ring::Z).is_err());
    }

    #[test]
    fn ph_examples() {
        let h = ph(&c3(), &[Ring::Z, Ring::Q], 3).unwrap();
        assert_eq!(h.free_ranks(), vec![1, 1, 0, 0]);
        assert!(h.degrees.iter().all(|d| d.torsion.as_ref().unwrap().is_empty()));
        let chord = Digraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(ph(&chord, &[Ring::Q], 3).unwrap().free_ranks(), vec![1, 0, 0, 0]);
        assert_eq!(ph(&eight(), &[Ring::Q], 2).unwrap().free_ranks(), vec![1, 1, 0]);
        assert_eq!(ph(&square(), &[Ring::Q], 2).unwrap().free_ranks(), vec![1, 0, 0]);
    }

    #[test]
    fn induced_examples() {
        let x = Arc::new(c3());
        let id = DigraphMorphism::identity(x.clone());
        let r = ph_induced(&id, 2, FieldKind::Q).unwrap();
        assert_eq!(r.image_ranks, r.source_ranks);
        let point = Arc::new(Digraph::from_edges(1, []).unwrap());
        let constant = DigraphMorphism::new(x.clone(), point, vec![0, 0, 0]).unwrap();
        assert!(ph_induced(&constant, 2, FieldKind::Q).unwrap().reduced_image_ranks().iter().all(|&r| r == 0));
    }

    #[test]
    fn clusters() {
        let v =
            crate::fundamental::parse_voltage(&c3(), "group Z\narrow 0 1 = 1\narrow 1 2 = 1\narrow 2 0 = 1\n").unwrap();
        let keys = cluster_decompose(&c3(), 1, Some(&v)).unwrap();
        let expected: Vec<(ClusterKey, usize)> = [("0", "1"), ("1", "2"), ("2", "0")]
            .iter()
            .map(|(a, b)| (ClusterKey { tail: a.to_string(), head: b.to_string(), label: Some("1".into()) }, 1))
            .collect();
        assert_eq!(keys, expected);
        let sq = cluster_decompose(&square(), 2, None).unwrap();
        assert_eq!(sq, vec![(ClusterKey { tail: "0".into(), head: "3".into(), label: None }, 1)]);
        assert_eq!(cluster_decompose(&c3(), 0, None).unwrap().len(), 3);
    }
}
