//! Tanner graphs sampled from the regular configuration-model ensemble.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::gf2::BitMatrix;
use crate::error::{Error, Result};

/// A bipartite multigraph between `n` variable nodes and `m` check nodes.
/// Parallel edges are kept for message passing; the parity-check matrix
/// keeps a variable-check pair only when it is joined by an odd number of
/// edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TannerGraph {
    n: usize,
    m: usize,
    /// `(variable, check)` per edge.
    edges: Vec<(usize, usize)>,
    var_edges: Vec<Vec<usize>>,
    check_edges: Vec<Vec<usize>>,
}

impl TannerGraph {
    pub fn from_edges(n: usize, m: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut var_edges = vec![Vec::new(); n];
        let mut check_edges = vec![Vec::new(); m];
        for (e, &(v, c)) in edges.iter().enumerate() {
            if v >= n || c >= m {
                return Err(Error::Graph(format!(
                    "edge {e} joins ({v}, {c}) outside {n} x {m}"
                )));
            }
            var_edges[v].push(e);
            check_edges[c].push(e);
        }
        Ok(TannerGraph {
            n,
            m,
            edges,
            var_edges,
            check_edges,
        })
    }

    /// Uniform random matching of the `n·d_v` variable sockets to the
    /// `m·d_c` check sockets.
    pub fn sample(n: usize, d_v: usize, d_c: usize, seed: u64) -> Result<Self> {
        if d_v == 0 || d_c == 0 || n == 0 {
            return Err(Error::Graph("n, d_v and d_c must be positive".into()));
        }
        if !(n * d_v).is_multiple_of(d_c) {
            return Err(Error::Graph(format!(
                "n·d_v = {} is not divisible by d_c = {d_c}",
                n * d_v
            )));
        }
        if n < d_c {
            return Err(Error::Graph(format!("n = {n} is smaller than d_c = {d_c}")));
        }
        let sockets = n * d_v;
        let m = sockets / d_c;
        let mut perm: Vec<usize> = (0..sockets).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let edges = (0..sockets).map(|s| (s / d_v, perm[s] / d_c)).collect();
        Self::from_edges(n, m, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn var_edges(&self, v: usize) -> &[usize] {
        &self.var_edges[v]
    }

    pub fn check_edges(&self, c: usize) -> &[usize] {
        &self.check_edges[c]
    }

    /// `H[c][v] = 1` iff `v` and `c` share an odd number of edges.
    pub fn parity_check(&self) -> BitMatrix {
        let mut h = BitMatrix::zeros(self.m, self.n);
        for &(v, c) in &self.edges {
            h.flip(c, v);
        }
        h
    }

    /// Per-check parity of `x` summed over edges, so parallel edges cancel
    /// exactly as in [`TannerGraph::parity_check`].
    pub fn syndrome(&self, x: &[u8]) -> Vec<u8> {
        self.check_edges
            .iter()
            .map(|es| {
                es.iter()
                    .fold(0u8, |acc, &e| acc ^ (x[self.edges[e].0] & 1))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn socket_counts() {
        let g = TannerGraph::sample(4, 3, 4, 9).unwrap();
        assert_eq!(g.m(), 3);
        assert_eq!(g.edges().len(), 12);
        assert!((0..4).all(|v| g.var_edges(v).len() == 3));
        assert!((0..3).all(|c| g.check_edges(c).len() == 4));
    }

    #[test]
    fn odd_edge_rule_row_weights() {
        for seed in 0..20 {
            let g = TannerGraph::sample(8, 3, 4, seed).unwrap();
            let h = g.parity_check();
            for c in 0..g.m() {
                let mut counts = vec![0usize; g.n()];
                for &e in g.check_edges(c) {
                    counts[g.edges()[e].0] += 1;
                }
                let even_pairs: usize = counts.iter().map(|&k| k / 2).sum();
                assert_eq!(h.row_weight(c), 4 - 2 * even_pairs);
            }
        }
    }

    #[test]
    fn seeded_sampling_is_deterministic() {
        let a = TannerGraph::sample(100, 3, 6, 42).unwrap();
        let b = TannerGraph::sample(100, 3, 6, 42).unwrap();
        let c = TannerGraph::sample(100, 3, 6, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn divisibility_is_checked() {
        assert!(TannerGraph::sample(5, 3, 4, 0).is_err());
        assert!(TannerGraph::sample(2, 2, 4, 0).is_err());
    }
}
