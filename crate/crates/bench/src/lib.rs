//! Input families shared by the benchmarks.

use dihom::{box_product, Digraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn cycle(n: usize) -> Digraph {
    Digraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle arrows are valid")
}

pub fn line(n: usize) -> Digraph {
    Digraph::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("line arrows are valid")
}

/// The `m × n` grid as a box product of two lines.
pub fn grid(m: usize, n: usize) -> Digraph {
    box_product(&line(m), &line(n))
}

/// Each ordered pair of distinct vertices is an arrow with probability `p`.
pub fn random_digraph(seed: u64, n: usize, p: f64) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arrows: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| u != v && rng.gen_bool(p)).collect();
    Digraph::from_edges(n, arrows).expect("random arrows are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_sizes() {
        assert_eq!(cycle(5).arrow_count(), 5);
        assert_eq!(grid(3, 4).vertex_count(), 12);
        assert_eq!(grid(3, 4).arrow_count(), 17);
        assert_eq!(random_digraph(1, 6, 0.3), random_digraph(1, 6, 0.3));
    }
}
