use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph; edges are stored as `(low, high)` pairs, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut canon: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::invalid(format!("self-loop on vertex {a}")));
            }
            if a >= n_vertices || b >= n_vertices {
                return Err(Error::invalid(format!("edge ({a}, {b}) outside graph")));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        let before = canon.len();
        canon.dedup();
        if canon.len() != before {
            return Err(Error::invalid("repeated edge"));
        }
        Ok(Graph { n_vertices, edges: canon })
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_vertices];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn is_connected(&self) -> bool {
        if self.n_vertices == 0 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.n_vertices];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.n_vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Random connected simple 3-regular graph from the pairing model, rejecting
/// matchings with loops, repeated edges, or more than one component.
pub fn gen_3regular(n: usize, seed: u64) -> Result<Graph> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::invalid(format!("3-regular graphs need an even vertex count >= 4, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..3 * n).map(|i| i / 3).collect();
    for _ in 0..100_000 {
        points.shuffle(&mut rng);
        let pairs = points.chunks(2).map(|c| (c[0], c[1]));
        if let Ok(g) = Graph::new(n, pairs) {
            if g.is_connected() {
                return Ok(g);
            }
        }
    }
    Err(Error::NotConverged(format!("no simple 3-regular graph on {n} vertices found")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_vertices_give_k4() {
        let g = gen_3regular(4, 3).unwrap();
        assert_eq!(g.edges, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn eight_vertices() {
        let g = gen_3regular(8, 0).unwrap();
        assert_eq!(g.edges.len(), 12);
        assert!(g.degrees().iter().all(|&d| d == 3));
        assert!(g.is_connected());
        assert_eq!(g, gen_3regular(8, 0).unwrap());
    }

    #[test]
    fn odd_rejected() {
        assert!(matches!(gen_3regular(7, 0), Err(Error::InvalidArgument(_))));
        assert!(gen_3regular(2, 0).is_err());
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
    }
}
