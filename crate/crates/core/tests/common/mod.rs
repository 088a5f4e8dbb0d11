//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use helmdg::Complex64;
use rand::Rng;

/// Dense Doolittle LU without pivoting: returns `(L, U)` with unit `L`.
pub fn dense_lu(a: &[Vec<Complex64>]) -> Option<(Vec<Vec<Complex64>>, Vec<Vec<Complex64>>)> {
    let n = a.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut l = vec![vec![zero; n]; n];
    let mut u = vec![vec![zero; n]; n];
    for i in 0..n {
        for j in i..n {
            let s: Complex64 = (0..i).map(|k| l[i][k] * u[k][j]).sum();
            u[i][j] = a[i][j] - s;
        }
        if u[i][i].norm() == 0.0 {
            return None;
        }
        l[i][i] = Complex64::new(1.0, 0.0);
        for j in i + 1..n {
            let s: Complex64 = (0..i).map(|k| l[j][k] * u[k][i]).sum();
            l[j][i] = (a[j][i] - s) / u[i][i];
        }
    }
    Some((l, u))
}

/// Adjacency matrix of a symmetric pattern given by edges.
pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(i, j) in edges {
        if i != j {
            adj[i][j] = true;
            adj[j][i] = true;
        }
    }
    adj
}

/// Eliminates vertices in `order` on a dense boolean graph, connecting the
/// remaining neighbors pairwise. Returns the number of added edges.
pub fn naive_fill_edges(adj: &[Vec<bool>], order: &[usize]) -> usize {
    let n = adj.len();
    let mut g = adj.to_vec();
    let mut done = vec![false; n];
    let mut added = 0;
    for &v in order {
        done[v] = true;
        let nb: Vec<usize> = (0..n).filter(|&w| !done[w] && g[v][w]).collect();
        for (a, &x) in nb.iter().enumerate() {
            for &y in &nb[a + 1..] {
                if !g[x][y] {
                    g[x][y] = true;
                    g[y][x] = true;
                    added += 1;
                }
            }
        }
    }
    added
}

/// `N + 2 * (edges of the filled graph)`, the nonzero count of `L + U - I`.
pub fn naive_combined_nnz(adj: &[Vec<bool>], order: &[usize]) -> usize {
    let n = adj.len();
    let edges: usize = (0..n).map(|i| (i + 1..n).filter(|&j| adj[i][j]).count()).sum();
    n + 2 * (edges + naive_fill_edges(adj, order))
}

/// Minimum number of fill edges over all `N!` elimination orders, by
/// depth-first enumeration with bitmask adjacency.
pub fn brute_force_min_fill(adj: &[Vec<bool>]) -> usize {
    let n = adj.len();
    assert!(n <= 10);
    let masks: Vec<u32> = (0..n)
        .map(|i| (0..n).filter(|&j| adj[i][j]).fold(0u32, |m, j| m | (1 << j)))
        .collect();
    let mut best = usize::MAX;
    search(&masks, 0, 0, &mut best);
    best
}

fn search(masks: &[u32], eliminated: u32, fill: usize, best: &mut usize) {
    let n = masks.len();
    if eliminated.count_ones() as usize == n {
        *best = (*best).min(fill);
        return;
    }
    for v in 0..n {
        if eliminated & (1 << v) != 0 {
            continue;
        }
        let nb = masks[v] & !eliminated & !(1 << v);
        let mut next = masks.to_vec();
        let mut added = 0;
        for x in 0..n {
            if nb & (1 << x) == 0 {
                continue;
            }
            let missing = nb & !next[x] & !(1 << x);
            added += missing.count_ones() as usize;
            next[x] |= nb & !(1 << x);
        }
        // each missing pair was counted from both ends
        search(&next, eliminated | (1 << v), fill + added / 2, best);
    }
}

/// Erdos-Renyi graph with edge probability `p`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Random labelled tree built by attaching each vertex to an earlier one,
/// then relabelled by a random permutation.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> Vec<(usize, usize)> {
    let mut labels: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        labels.swap(i, rng.gen_range(0..=i));
    }
    (1..n).map(|v| (labels[v], labels[rng.gen_range(0..v)])).collect()
}
