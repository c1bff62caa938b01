#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use dihom::Digraph;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn cycle(n: usize) -> Digraph {
    Digraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

pub fn square() -> Digraph {
    Digraph::from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
}

/// `x_i → x_{i+1}, x_i → y_{i+1}, y_i → x_{i+1}, y_i → y_{i+1}` with indices mod `m`;
/// vertices `0..m` are the `x_i`, `m..2m` the `y_i`.
pub fn twisted_band(m: usize) -> Digraph {
    let mut arrows = Vec::new();
    for i in 0..m {
        let j = (i + 1) % m;
        arrows.extend([(i, j), (i, m + j), (m + i, j), (m + i, m + j)]);
    }
    let names = (0..m).map(|i| format!("x{i}")).chain((0..m).map(|i| format!("y{i}"))).collect();
    Digraph::new(names, arrows).unwrap()
}

/// `twisted_band(8) → twisted_band(4)` reducing indices mod 4.
pub fn band_cover() -> (Arc<Digraph>, Arc<Digraph>, Vec<usize>) {
    let projection = (0..16).map(|v| if v < 8 { v % 4 } else { 4 + v % 4 }).collect();
    (Arc::new(twisted_band(8)), Arc::new(twisted_band(4)), projection)
}

pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Digraph {
    let arrows: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| u != v).filter(|_| rng.gen_bool(p)).collect();
    Digraph::from_edges(n, arrows).unwrap()
}

pub fn random_corpus(seed: u64, count: usize, max_vertices: usize, p: f64) -> Vec<Digraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=max_vertices);
            random_digraph(&mut rng, n, p)
        })
        .collect()
}

/// Breadth-first distances, `None` when unreachable.
pub fn bfs_distances(x: &Digraph) -> Vec<Vec<Option<u32>>> {
    (0..x.vertex_count())
        .map(|s| {
            let mut d = vec![None; x.vertex_count()];
            d[s] = Some(0);
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &(a, b) in x.arrows() {
                    if a == u && d[b].is_none() {
                        d[b] = Some(d[u].unwrap() + 1);
                        q.push_back(b);
                    }
                }
            }
            d
        })
        .collect()
}

/// Rank over ℚ by dense Gaussian elimination.
pub fn rank_q(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = &rows[r][c] / &pivot;
                for k in c..cols {
                    let t = &f * &rows[rank][k];
                    rows[r][k] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn allowed_paths(x: &Digraph, n: usize) -> Vec<Vec<usize>> {
    let mut paths: Vec<Vec<usize>> = (0..x.vertex_count()).map(|v| vec![v]).collect();
    for _ in 0..n {
        paths = paths
            .iter()
            .flat_map(|p| {
                let last = *p.last().unwrap();
                x.arrows().iter().filter(move |&&(a, _)| a == last).map(move |&(_, b)| [p.clone(), vec![b]].concat())
            })
            .collect();
    }
    paths
}

/// Path homology ranks over ℚ from dimension counts alone:
/// `dim Ω_n = |A_n| − rank(non-allowed part of ∂)`, `dim Z_n = |A_n| − rank ∂`.
pub fn brute_ph_ranks(x: &Digraph, n_max: usize) -> Vec<usize> {
    let mut omega = Vec::new();
    let mut cycles = Vec::new();
    for n in 0..=n_max + 1 {
        let a = allowed_paths(x, n);
        if n == 0 {
            omega.push(a.len());
            cycles.push(a.len());
            continue;
        }
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut entries: Vec<(usize, usize, i64)> = Vec::new();
        for (c, p) in a.iter().enumerate() {
            for i in 0..=n {
                let mut face = p.clone();
                face.remove(i);
                if face.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                let len = index.len();
                let r = *index.entry(face).or_insert(len);
                entries.push((r, c, if i % 2 == 0 { 1 } else { -1 }));
            }
        }
        let mut faces: Vec<Vec<usize>> = vec![Vec::new(); index.len()];
        for (f, &r) in &index {
            faces[r] = f.clone();
        }
        let mut full = vec![vec![BigRational::zero(); a.len()]; index.len()];
        for (r, c, s) in entries {
            full[r][c] += BigRational::from_integer(s.into());
        }
        let allowed = |f: &[usize]| f.windows(2).all(|w| x.has_arrow(w[0], w[1]));
        let outside: Vec<Vec<BigRational>> =
            full.iter().enumerate().filter(|(r, _)| !allowed(&faces[*r])).map(|(_, row)| row.clone()).collect();
        let full_rank = rank_q(full);
        omega.push(a.len() - rank_q(outside));
        cycles.push(a.len() - full_rank);
    }
    (0..=n_max).map(|n| cycles[n] - (omega[n + 1] - cycles[n + 1])).collect()
}

/// Definition-level covering test: for each `n ≤ l`, `p: D_n(E) → D_n(X)` maps no
/// arrow into a fiber and lifts every arrow out of and into `p(e)` uniquely.
pub fn oracle_is_l_covering(e: &Digraph, x: &Digraph, p: &[usize], l: u32) -> bool {
    if e.arrows().iter().any(|&(a, b)| p[a] != p[b] && !x.has_arrow(p[a], p[b])) {
        return false;
    }
    for n in 1..=l {
        let (dn_e, dn_x) = (e.d_power(n).unwrap(), x.d_power(n).unwrap());
        if dn_e.arrows().iter().any(|&(a, b)| p[a] == p[b]) {
            return false;
        }
        for v in 0..e.vertex_count() {
            for &y in dn_x.out_neighbors(p[v]) {
                if dn_e.out_neighbors(v).iter().filter(|&&w| p[w] == y).count() != 1 {
                    return false;
                }
            }
            for &y in dn_x.in_neighbors(p[v]) {
                if dn_e.in_neighbors(v).iter().filter(|&&w| p[w] == y).count() != 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// All fiber-preserving vertex bijections that preserve arrows.
pub fn oracle_deck_order(e: &Digraph, p: &[usize]) -> usize {
    let n = e.vertex_count();
    let mut phi = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(v: usize, e: &Digraph, p: &[usize], phi: &mut Vec<usize>, used: &mut Vec<bool>) -> usize {
        if v == phi.len() {
            return usize::from(e.arrows().iter().all(|&(a, b)| e.has_arrow(phi[a], phi[b])));
        }
        let mut count = 0;
        for w in 0..phi.len() {
            if !used[w] && p[w] == p[v] {
                phi[v] = w;
                used[w] = true;
                count += go(v + 1, e, p, phi, used);
                used[w] = false;
            }
        }
        count
    }
    go(0, e, p, &mut phi, &mut used)
}

/// Every vertex map `W → Y`, as vectors.
pub fn all_maps(source_size: usize, target_size: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..source_size {
        out = out
            .into_iter()
            .flat_map(|m: Vec<usize>| (0..target_size).map(move |t| [m.clone(), vec![t]].concat()))
            .collect();
    }
    out
}

pub fn convolve(a: &[usize], b: &[usize], n_max: usize) -> Vec<usize> {
    (0..=n_max)
        .map(|n| (0..=n).map(|i| a.get(i).copied().unwrap_or(0) * b.get(n - i).copied().unwrap_or(0)).sum())
        .collect()
}

/// Face digraph of a simplicial complex given by its facets: one vertex per
/// simplex, arrows from each simplex to its codimension-one faces.
pub fn face_digraph(facets: &[&[usize]]) -> Digraph {
    let mut simplices: Vec<Vec<usize>> = Vec::new();
    for f in facets {
        let k = f.len();
        for mask in 1u32..(1 << k) {
            simplices.push((0..k).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect());
        }
    }
    simplices.sort();
    simplices.dedup();
    let index: HashMap<&Vec<usize>, usize> = simplices.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut arrows = Vec::new();
    for s in simplices.iter().filter(|s| s.len() > 1) {
        for i in 0..s.len() {
            let mut face = s.clone();
            face.remove(i);
            arrows.push((index[s], index[&face]));
        }
    }
    let names = simplices.iter().map(|s| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("")).collect();
    Digraph::new(names, arrows).unwrap()
}

/// Six-vertex triangulation of the real projective plane.
pub const RP2: [&[usize]; 10] = [
    &[0, 1, 2],
    &[0, 2, 3],
    &[0, 3, 4],
    &[0, 4, 5],
    &[0, 1, 5],
    &[1, 2, 4],
    &[2, 3, 5],
    &[1, 3, 4],
    &[2, 4, 5],
    &[1, 3, 5],
];
