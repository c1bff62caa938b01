//! Ranks along increasing sequences of induced subdigraphs.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use crate::digraph::{Digraph, DigraphMorphism};
use crate::error::{Error, Result};
use crate::linalg::{induced_image_rank, FieldKind, Ring, SparseIntMatrix};
use crate::nerve::{mc_complex, AccSeq, MagnitudeComplex};
use crate::path::{induced_between, PathComplex, MAX_DEGREE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Invariant {
    /// `PH_n` for `n ≤ n_max`.
    Ph { n_max: usize },
    /// `MH^l_n` for `n ≤ l`.
    Mh { l: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExhaustionStep {
    pub vertices: usize,
    pub ranks: Vec<usize>,
    /// Image ranks into the stage `window` steps later, when there is one.
    pub image_ranks: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExhaustionReport {
    pub invariant: Invariant,
    pub field: FieldKind,
    pub window: usize,
    pub reduced: bool,
    pub steps: Vec<ExhaustionStep>,
    /// Image ranks of the last stage that has a partner `window` steps later.
    pub stabilized: Option<Vec<usize>>,
}

/// Each digraph must be an induced subdigraph of the next, vertices matched by
/// name. With `reduced`, degree 0 of path homology counts reduced homology.
pub fn exhaustion_report(
    seq: &[Digraph],
    invariant: Invariant,
    field: FieldKind,
    window: usize,
    reduced: bool,
) -> Result<ExhaustionReport> {
    let field = field.validate()?;
    if window == 0 {
        return Err(Error::Range("window must be at least 1".into()));
    }
    let mut inclusions = Vec::with_capacity(seq.len().saturating_sub(1));
    for (k, w) in seq.windows(2).enumerate() {
        inclusions.push(w[0].inclusion_into(&w[1]).ok_or(Error::NotInclusion(k))?);
    }
    let digraphs: Vec<Arc<Digraph>> = seq.iter().cloned().map(Arc::new).collect();
    let reduce = |mut v: Vec<usize>, nonempty: bool| {
        if reduced && nonempty {
            v[0] = v[0].saturating_sub(1);
        }
        v
    };
    let mut steps = Vec::with_capacity(seq.len());
    match invariant {
        Invariant::Ph { n_max } => {
            if n_max > MAX_DEGREE {
                return Err(Error::Range(format!("degree {n_max} exceeds {MAX_DEGREE}")));
            }
            let complexes = digraphs.iter().map(|x| PathComplex::new(x, n_max + 1)).collect::<Result<Vec<_>>>()?;
            for k in 0..seq.len() {
                let nonempty = seq[k].vertex_count() > 0;
                let (ranks, image_ranks) = if k + window < seq.len() {
                    let f = composite(&digraphs, &inclusions, k, window)?;
                    let ind = induced_between(&f, &complexes[k], &complexes[k + window], n_max, field)?;
                    (ind.source_ranks, Some(reduce(ind.image_ranks, nonempty)))
                } else {
                    let mut h = complexes[k].complex.homology(&[Ring::from(field)])?;
                    h.truncate(n_max);
                    (h.ranks_over(field).expect("requested"), None)
                };
                steps.push(ExhaustionStep {
                    vertices: seq[k].vertex_count(),
                    ranks: reduce(ranks, nonempty),
                    image_ranks,
                });
            }
        }
        Invariant::Mh { l } => {
            let complexes = seq.iter().map(|x| mc_complex(x, l)).collect::<Result<Vec<_>>>()?;
            for k in 0..seq.len() {
                let h = complexes[k].complex.homology(&[Ring::from(field)])?;
                let image_ranks = if k + window < seq.len() {
                    let f = composite(&digraphs, &inclusions, k, window)?;
                    let map = magnitude_chain_map(&f, &complexes[k], &complexes[k + window])?;
                    let ranks = (0..=l as usize)
                        .map(|n| {
                            induced_image_rank(&complexes[k].complex, &complexes[k + window].complex, &map, n, field)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Some(ranks)
                } else {
                    None
                };
                steps.push(ExhaustionStep {
                    vertices: seq[k].vertex_count(),
                    ranks: h.ranks_over(field).expect("requested"),
                    image_ranks,
                });
            }
        }
    }
    let reduced = reduced && matches!(invariant, Invariant::Ph { .. });
    let stabilized = steps.iter().rev().find_map(|s| s.image_ranks.clone());
    Ok(ExhaustionReport { invariant, field, window, reduced, steps, stabilized })
}

fn composite(digraphs: &[Arc<Digraph>], inclusions: &[Vec<usize>], k: usize, window: usize) -> Result<DigraphMorphism> {
    let mut map: Vec<usize> = (0..digraphs[k].vertex_count()).collect();
    for inc in &inclusions[k..k + window] {
        map = map.iter().map(|&v| inc[v]).collect();
    }
    DigraphMorphism::new(digraphs[k].clone(), digraphs[k + window].clone(), map)
}

/// Sends a sequence to its image when the length is preserved, otherwise to zero.
pub fn magnitude_chain_map(
    f: &DigraphMorphism,
    src: &MagnitudeComplex,
    dst: &MagnitudeComplex,
) -> Result<Vec<SparseIntMatrix>> {
    if src.l != dst.l {
        return Err(Error::Dimension("magnitude complexes of different lengths".into()));
    }
    let y = f.target();
    src.bases
        .iter()
        .zip(&dst.bases)
        .map(|(from, to)| {
            let index: HashMap<&[usize], usize> = to.iter().enumerate().map(|(k, s)| (s.vertices(), k)).collect();
            let cols = from
                .iter()
                .map(|s: &AccSeq| {
                    let image: Vec<usize> = s.vertices().iter().map(|&v| f.apply(v)).collect();
                    match index.get(image.as_slice()) {
                        Some(&k) if length(y, &image) == Some(s.length()) => vec![(k, BigInt::from(1))],
                        _ => Vec::new(),
                    }
                })
                .collect();
            SparseIntMatrix::from_columns(to.len(), cols)
        })
        .collect()
}

fn length(y: &Digraph, seq: &[usize]) -> Option<u32> {
    seq.windows(2).map(|w| y.dist(w[0], w[1]).finite()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn segment(lo: i64, hi: i64) -> Digraph {
        let names: Vec<String> = (lo..=hi).map(|i| i.to_string()).collect();
        Digraph::new(names, (0..(hi - lo) as usize).map(|i| (i, i + 1))).unwrap()
    }

    #[test]
    fn acyclic_segments() {
        let seq = [segment(-2, 2), segment(-4, 4), segment(-6, 6)];
        let r = exhaustion_report(&seq, Invariant::Ph { n_max: 2 }, FieldKind::Q, 1, true).unwrap();
        assert_eq!(r.stabilized, Some(vec![0, 0, 0]));
        assert!(r.steps.last().unwrap().image_ranks.is_none());
    }

    #[test]
    fn constant_sequence() {
        let c3 = Digraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let seq = [c3.clone(), c3.clone(), c3];
        let r = exhaustion_report(&seq, Invariant::Ph { n_max: 2 }, FieldKind::Q, 1, false).unwrap();
        assert_eq!(r.stabilized, Some(vec![1, 1, 0]));
        assert_eq!(r.steps[0].ranks, vec![1, 1, 0]);
        let m = exhaustion_report(&seq, Invariant::Mh { l: 1 }, FieldKind::Q, 2, false).unwrap();
        assert_eq!(m.stabilized, Some(vec![0, 3]));
    }

    #[test]
    fn magnitude_map_drops_shortcuts() {
        // a new vertex 4 with 0 -> 4 -> 3 shortens (0,3) from 3 to 2
        let a = Digraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let b = Digraph::from_edges(5, [(0, 1), (1, 2), (2, 3), (0, 4), (4, 3)]).unwrap();
        let f = DigraphMorphism::new(Arc::new(a.clone()), Arc::new(b.clone()), vec![0, 1, 2, 3]).unwrap();
        let (ca, cb) = (mc_complex(&a, 3).unwrap(), mc_complex(&b, 3).unwrap());
        let map = magnitude_chain_map(&f, &ca, &cb).unwrap();
        assert_eq!(ca.bases[1].len(), 1);
        assert!(map[1].column(0).is_empty());
        assert_eq!(map[3].nnz(), 1);
        for n in 0..=3 {
            assert_eq!(induced_image_rank(&ca.complex, &cb.complex, &map, n, FieldKind::Q).unwrap(), 0);
        }
        let r = exhaustion_report(&[a, b], Invariant::Mh { l: 1 }, FieldKind::Q, 1, false).unwrap();
        assert_eq!(r.stabilized, Some(vec![0, 3]));
    }

    #[test]
    fn rejects_non_inclusions() {
        let a = Digraph::from_edges(2, [(0, 1)]).unwrap();
        let b = Digraph::from_edges(2, [(1, 0)]).unwrap();
        assert!(matches!(
            exhaustion_report(&[a, b], Invariant::Ph { n_max: 1 }, FieldKind::Q, 1, false),
            Err(Error::NotInclusion(0))
        ));
    }
}
