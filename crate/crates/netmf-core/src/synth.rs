//! Synthetic and fixture graphs: seeded Erdős–Rényi graphs patched to be
//! connected, stochastic block models with ground-truth labels, and the
//! 34-vertex karate-club network used as a small real-world test case.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::{Graph, IsolatedPolicy};

/// Zachary's karate club: 34 vertices, 78 edges, connected, non-bipartite.
/// Tokens are the conventional 1-based vertex numbers.
pub fn karate_club() -> Graph {
    const EDGES: [(usize, usize); 78] = [
        (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 7), (0, 8), (0, 10), (0, 11),
        (0, 12), (0, 13), (0, 17), (0, 19), (0, 21), (0, 31), (1, 2), (1, 3), (1, 7), (1, 13),
        (1, 17), (1, 19), (1, 21), (1, 30), (2, 3), (2, 7), (2, 8), (2, 9), (2, 13), (2, 27),
        (2, 28), (2, 32), (3, 7), (3, 12), (3, 13), (4, 6), (4, 10), (5, 6), (5, 10), (5, 16),
        (6, 16), (8, 30), (8, 32), (8, 33), (9, 33), (13, 33), (14, 32), (14, 33), (15, 32),
        (15, 33), (18, 32), (18, 33), (19, 33), (20, 32), (20, 33), (22, 32), (22, 33),
        (23, 25), (23, 27), (23, 29), (23, 32), (23, 33), (24, 25), (24, 27), (24, 31),
        (25, 31), (26, 29), (26, 33), (27, 33), (28, 31), (28, 33), (29, 32), (29, 33),
        (30, 32), (30, 33), (31, 32), (31, 33), (32, 33),
    ];
    let tokens: Vec<String> = (1..=34).map(|i| i.to_string()).collect();
    let edges: Vec<(usize, usize, f64)> = EDGES.iter().map(|&(a, b)| (a, b, 1.0)).collect();
    Graph::from_edges(tokens, &edges, IsolatedPolicy::Reject).expect("fixture is valid")
}

fn components_of(n: usize, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut comp = Vec::new();
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        comps.push(comp);
    }
    comps
}

/// Add the fewest edges needed to make the edge set connected over all n
/// vertices (each extra component gets one link into the first component,
/// endpoint chosen by the rng).
fn connect_up(n: usize, edges: &mut Vec<(usize, usize, f64)>, rng: &mut ChaCha8Rng) {
    let mut adj = vec![Vec::new(); n];
    for &(a, b, _) in edges.iter() {
        adj[a].push(b);
        adj[b].push(a);
    }
    let comps = components_of(n, &adj);
    if comps.len() <= 1 {
        return;
    }
    let anchor_comp = &comps[0];
    for comp in comps.iter().skip(1) {
        let a = anchor_comp[rng.random_range(0..anchor_comp.len())];
        let b = comp[rng.random_range(0..comp.len())];
        edges.push((a, b, 1.0));
    }
}

/// Seeded G(n, p) graph, patched with extra edges until connected.
pub fn random_connected(n: usize, p: f64, seed: u64) -> Result<Graph> {
    assert!(n >= 2 && (0.0..=1.0).contains(&p));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    connect_up(n, &mut edges, &mut rng);
    let tokens: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    Graph::from_edges(tokens, &edges, IsolatedPolicy::Reject)
}

/// Seeded stochastic block model with within-block probability `p_in` and
/// cross-block probability `p_out`; patched until connected. Returns the
/// graph and the block index of every vertex.
pub fn stochastic_block_model(
    block_sizes: &[usize],
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(Graph, Vec<usize>)> {
    let n: usize = block_sizes.iter().sum();
    assert!(n >= 2);
    let mut block = Vec::with_capacity(n);
    for (bi, &size) in block_sizes.iter().enumerate() {
        block.extend(std::iter::repeat(bi).take(size));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if block[i] == block[j] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    connect_up(n, &mut edges, &mut rng);
    let tokens: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let graph = Graph::from_edges(tokens, &edges, IsolatedPolicy::Reject)?;
    Ok((graph, block))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn karate_shape() {
        let g = karate_club();
        assert_eq!(g.n(), 34);
        assert_eq!(g.edge_count(), 78);
        assert_eq!(g.volume(), 156.0);
        assert!(g.is_connected());
        assert!(!g.is_bipartite());
        assert_eq!(g.degree(33), 17.0); // the instructor hub
        assert_eq!(g.degree(0), 16.0);
    }

    #[test]
    fn random_connected_is_connected_and_seeded() {
        for seed in 0..5 {
            let g = random_connected(30, 0.08, seed).unwrap();
            assert!(g.is_connected());
            let g2 = random_connected(30, 0.08, seed).unwrap();
            assert_eq!(g.adjacency(), g2.adjacency());
        }
    }

    #[test]
    fn sbm_blocks_and_connectivity() {
        let (g, labels) = stochastic_block_model(&[20, 20, 20], 0.3, 0.02, 9).unwrap();
        assert_eq!(g.n(), 60);
        assert!(g.is_connected());
        assert_eq!(labels.iter().filter(|&&b| b == 0).count(), 20);
        assert_eq!(labels[59], 2);
    }
}
